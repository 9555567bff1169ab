"""Exact truncated power series in z and the catalytic functional equations.

Coefficients are polynomials in u (and x, truncated at Nx) over arbitrary
precision integers; no floating point enters this module.  The solved
equations, written with u marking the *true* root-face valency internally:

* all maps:        M = 1 + z u^2 M^2 + z u (u M(u) - M(1)) / (u - 1)
* bipartite:       B = 1 + z u^2 B^2 + z u^2 (B(1) - B(u)) / (1 - u^2)
* 2-connected:     N = z u (z u + D) / (1 - (z u + D)),
                   D = (u N(1) - N(u)) / (1 - u)

The paper prints the first equation once with u-powers (zu^2 M^2, divided
difference in (u-1)) and once inside the pattern proposition with different
powers; the variant above is the one whose coefficients equal exhaustive
enumeration and is used throughout.  Bipartite series are exposed with u
marking valency/2 (all internal exponents are even); 2-connected series
start at z^2 (the equation excludes the degenerate one-edge maps).

Pattern equations add, for a pattern with e edges, boundary length v and r
rotations, the occurrence term  x r z^(e-v+1) u^-(v-2) P_(v-1)  and one term
per intersection type i:

    x^2 r_i z^(e_i-v_i+1) u^-(v_i-2) P_(v_i-1) prod_j fill_j^(d_ij)

where P_i are the partial-simple-boundary series and the deep-face fill is
fill_j = z^-j [u^j] P_(j-1) truncated to non-negative z-orders.  The dropped
z^(j-1) term of [u^2]P_1 is the bare one-edge map: gluing it into a deep
2-gon is exactly the "contract to a single edge" move, and the contracted
unions are enumerated as intersection types of their own, so keeping it
would double count.  For 2-connected maps P_(v-1) is replaced by the
sequence-of-blocks extraction [w^(v-1)] S/(1-S) and fills read off slices
of N itself.

The partial-simple-boundary recursion (general-map analogue of the
bipartite one in the paper, derived by classifying the first violating
boundary step; the violation at walk vertex w_k splits the map into a
simple-boundary piece and a shorter-psb remainder):

    P_0 = M
    P_i = P_(i-1) - u^i [u^i] P_(i-1)
          - sum_(k=0)^(i-1)  Phat_k u^(i-k) [u^(i-k)] P_(i-k-1)

with Phat_0 = M - 1 and Phat_k = P_k, plus for i = 1 the removal of the
valency-0 atomic term.  Its x-marked slices are exact only for patterns
with simple boundary; for patterns with boundary pinch points the cut at
w_k severs marks that straddle it, which pollutes x^2 coefficients (the
x^0 and x^1 slices are always exact).  See the acceptance notes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .maps import MapClass, MapError

try:
    import gmpy2

    _MPZ: Optional[Callable] = gmpy2.mpz
except ImportError:  # pragma: no cover
    _MPZ = None


class SeriesError(ValueError):
    pass


# ---------------------------------------------------------------------------
# dense integer polynomials (lists of ints, index = u exponent)
# ---------------------------------------------------------------------------

_KARA_CUTOFF = 144  # len(a)*len(b) above which Kronecker packing wins


def _trim(p: list) -> list:
    n = len(p)
    while n > 1 and not p[n - 1]:
        n -= 1
    return p[:n] if n != len(p) else p


def padd(a: Sequence[int], b: Sequence[int]) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return out


def psub(a: Sequence[int], b: Sequence[int]) -> list:
    out = list(a) + [0] * (len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    return out


def pscale(a: Sequence[int], c: int) -> list:
    if c == 0:
        return [0]
    return [c * x for x in a]


def _pmul_school(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _pack(p: list, width_bytes: int) -> int:
    buf = bytearray(width_bytes * len(p))
    for i, c in enumerate(p):
        if c:
            buf[i * width_bytes : i * width_bytes + (c.bit_length() + 7) // 8] = c.to_bytes(
                (c.bit_length() + 7) // 8, "little"
            )
    return int.from_bytes(buf, "little")


def _unpack(val: int, width_bytes: int, n_terms: int) -> list:
    raw = val.to_bytes(width_bytes * n_terms + 8, "little")
    out = [0] * n_terms
    for i in range(n_terms):
        out[i] = int.from_bytes(raw[i * width_bytes : (i + 1) * width_bytes], "little")
    return out


def _pmul_kron_nonneg(a, b):
    """Kronecker substitution for non-negative polynomials."""
    ma = max(a)
    mb = max(b)
    if not ma or not mb:
        return [0]
    nbits = ma.bit_length() + mb.bit_length() + (min(len(a), len(b))).bit_length() + 1
    w = (nbits + 7) // 8
    pa = _pack(a, w)
    pb = _pack(b, w)
    if _MPZ is not None:
        prod = int(_MPZ(pa) * _MPZ(pb))
    else:
        prod = pa * pb
    return _unpack(prod, w, len(a) + len(b) - 1)


def pmul(a: Sequence[int], b: Sequence[int]) -> list:
    a = list(a)
    b = list(b)
    if len(a) * len(b) <= _KARA_CUTOFF:
        return _pmul_school(a, b)
    neg_a = any(x < 0 for x in a)
    neg_b = any(x < 0 for x in b)
    if not neg_a and not neg_b:
        return _pmul_kron_nonneg(a, b)
    ap = [x if x > 0 else 0 for x in a]
    am = [-x if x < 0 else 0 for x in a]
    bp = [x if x > 0 else 0 for x in b]
    bm = [-x if x < 0 else 0 for x in b]
    pos = padd(_pmul_kron_nonneg(ap, bp), _pmul_kron_nonneg(am, bm))
    neg = padd(_pmul_kron_nonneg(ap, bm), _pmul_kron_nonneg(am, bp))
    return psub(pos, neg)


def pushift(p: Sequence[int], t: int) -> list:
    """Multiply by u^t; negative t requires divisibility."""
    if not any(p):
        return [0]
    if t >= 0:
        return [0] * t + list(p)
    if any(p[:-t]):
        raise SeriesError(f"u-shift by {t} hits negative exponents")
    return list(p[-t:])


def peval1(p: Sequence[int]) -> int:
    return sum(p)


def pdd(p: Sequence[int]) -> list:
    """(p(u) - p(1)) / (u - 1), exact polynomial quotient.

    Equals sum_j p_j (1 + u + ... + u^(j-1)); the remainder is zero by
    construction, which the implementation asserts by reconstruction.
    """
    if len(p) <= 1:
        return [0]
    out = [0] * (len(p) - 1)
    acc = 0
    for j in range(len(p) - 1, 0, -1):
        acc += p[j]
        out[j - 1] = acc
    return out


# ---------------------------------------------------------------------------
# Series3
# ---------------------------------------------------------------------------


@dataclass
class Series3:
    """Truncated series: coeffs[n][k] is the u-polynomial at z^n x^k."""

    cls: MapClass
    Nz: int
    Nx: int
    coeffs: list  # list[ list[ list[int] ] ]
    u_is_half: bool = False  # bipartite external form: u marks valency/2

    @staticmethod
    def zero(cls: MapClass, Nz: int, Nx: int, u_is_half: bool = False) -> "Series3":
        return Series3(cls, Nz, Nx, [[[0] for _ in range(Nx + 1)] for _ in range(Nz + 1)], u_is_half)

    def copy(self) -> "Series3":
        return Series3(self.cls, self.Nz, self.Nx, [[list(p) for p in row] for row in self.coeffs], self.u_is_half)

    def _compat(self, other: "Series3") -> None:
        if (self.Nz, self.Nx, self.u_is_half) != (other.Nz, other.Nx, other.u_is_half):
            raise SeriesError("mixed truncations or u conventions")

    def __add__(self, other: "Series3") -> "Series3":
        self._compat(other)
        out = Series3.zero(self.cls, self.Nz, self.Nx, self.u_is_half)
        for n in range(self.Nz + 1):
            for k in range(self.Nx + 1):
                out.coeffs[n][k] = padd(self.coeffs[n][k], other.coeffs[n][k])
        return out

    def __sub__(self, other: "Series3") -> "Series3":
        self._compat(other)
        out = Series3.zero(self.cls, self.Nz, self.Nx, self.u_is_half)
        for n in range(self.Nz + 1):
            for k in range(self.Nx + 1):
                out.coeffs[n][k] = psub(self.coeffs[n][k], other.coeffs[n][k])
        return out

    def __mul__(self, other: "Series3") -> "Series3":
        self._compat(other)
        out = Series3.zero(self.cls, self.Nz, self.Nx, self.u_is_half)
        for n1 in range(self.Nz + 1):
            row1 = self.coeffs[n1]
            for n2 in range(self.Nz + 1 - n1):
                row2 = other.coeffs[n2]
                tgt = out.coeffs[n1 + n2]
                for k1 in range(self.Nx + 1):
                    p1 = row1[k1]
                    if not any(p1):
                        continue
                    for k2 in range(self.Nx + 1 - k1):
                        p2 = row2[k2]
                        if not any(p2):
                            continue
                        tgt[k1 + k2] = padd(tgt[k1 + k2], pmul(p1, p2))
        return out

    def scalar_mul(self, c: int) -> "Series3":
        out = Series3.zero(self.cls, self.Nz, self.Nx, self.u_is_half)
        for n in range(self.Nz + 1):
            for k in range(self.Nx + 1):
                out.coeffs[n][k] = pscale(self.coeffs[n][k], c)
        return out

    def coeff_u(self, j: int) -> "Series3":
        """The u^j slice as a Series3 whose u-polynomials are constants."""
        out = Series3.zero(self.cls, self.Nz, self.Nx, self.u_is_half)
        for n in range(self.Nz + 1):
            for k in range(self.Nx + 1):
                p = self.coeffs[n][k]
                out.coeffs[n][k] = [p[j]] if j < len(p) else [0]
        return out

    def coeff_x(self, k: int) -> "Series3":
        out = Series3.zero(self.cls, self.Nz, 0, self.u_is_half)
        for n in range(self.Nz + 1):
            out.coeffs[n][0] = list(self.coeffs[n][k])
        return out

    def at_u1(self, k: int = 0) -> list:
        """Integer sequence [z^n x^k] F(z, 1, x), n = 0..Nz."""
        return [peval1(self.coeffs[n][k]) for n in range(self.Nz + 1)]

    def u_degree(self, n: int, k: int = 0) -> int:
        p = _trim(self.coeffs[n][k])
        return len(p) - 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series3):
            return NotImplemented
        if (self.Nz, self.Nx, self.u_is_half) != (other.Nz, other.Nx, other.u_is_half):
            return False
        for n in range(self.Nz + 1):
            for k in range(self.Nx + 1):
                if _trim(list(self.coeffs[n][k])) != _trim(list(other.coeffs[n][k])):
                    return False
        return True


def mul(a: Series3, b: Series3) -> Series3:
    return a * b


def add(a: Series3, b: Series3) -> Series3:
    return a + b


def scalar_mul(a: Series3, c: int) -> Series3:
    return a.scalar_mul(c)


def coeff_u(a: Series3, j: int) -> Series3:
    return a.coeff_u(j)


def coeff_x(a: Series3, k: int) -> Series3:
    return a.coeff_x(k)


def divided_difference_u(a: Series3) -> Series3:
    """(F(z,u,x) - F(z,1,x)) / (u - 1), exact in every coefficient."""
    out = Series3.zero(a.cls, a.Nz, a.Nx, a.u_is_half)
    for n in range(a.Nz + 1):
        for k in range(a.Nx + 1):
            q = pdd(a.coeffs[n][k])
            # remainder check: (u-1) q + p(1) must reconstruct p
            p = a.coeffs[n][k]
            rec = padd(psub(pushift(q, 1), q), [peval1(p)])
            if _trim(rec) != _trim(list(p)):
                raise SeriesError("divided difference left a remainder")
            out.coeffs[n][k] = q
    return out


# ---------------------------------------------------------------------------
# the streaming solver
# ---------------------------------------------------------------------------


@dataclass
class PatternEquation:
    """Constants of the pattern-marked functional equation for one class."""

    cls: MapClass
    e: int
    v: int
    r: int
    types: tuple  # (r_i, e_i, v_i, ((j, d_ij), ...)) per intersection type
    max_psb: int = field(init=False)
    z_headroom: int = field(init=False)

    def __post_init__(self):
        if self.v < 2:
            raise SeriesError("patterns with boundary length < 2 are not supported")
        if self.e - self.v + 1 < 0:
            raise SeriesError(
                "pattern boundary walk repeats edges (e < v - 1); "
                "the boundary gluing needs v - 1 distinct boundary edges"
            )
        for r_i, e_i, v_i, deep in self.types:
            if e_i - v_i + 1 < 0:
                raise SeriesError(f"type with e={e_i} v={v_i}: negative z-shift")
            if v_i < 2:
                raise SeriesError("intersection type with boundary length < 2")
        m = self.v - 1
        head = 0
        for _, e_i, v_i, deep in self.types:
            m = max(m, v_i - 1)
            for j, _ in deep:
                m = max(m, j - 1)
                # a fill map of z-order m+j may exceed the host order when the
                # deep face is larger than the type's z-shift
                head = max(head, j - (e_i - v_i + 1))
        self.max_psb = m
        self.z_headroom = max(0, head)


def build_pattern_equation(p, types, cls: MapClass) -> PatternEquation:
    """Assemble the equation constants from a Pattern and its type list."""
    tt = []
    for t in types:
        if t.e > 2 * p.e:
            raise SeriesError("intersection type larger than two pattern copies")
        tt.append((t.r, t.e, t.v, tuple(t.deep_faces)))
    return PatternEquation(cls=cls, e=p.e, v=p.v, r=p.r, types=tuple(tt))


class _Streamer:
    """Order-by-order evaluation of the unique formal fixed point.

    Coefficients are produced in (z, x)-graded dependency order, which is
    the stабilized limit of the textbook iteration F_{t+1} = RHS(F_t); a
    z^n coefficient is stable after n iterations because every term of the
    right-hand side carries at least one factor z past the constant term.
    """

    def __init__(self, cls: MapClass, Nz: int, Nx: int, eq: Optional[PatternEquation]):
        self.cls = cls
        self.Nz = Nz
        self.Nx = Nx
        self.eq = eq
        # fills can reference P at z-orders above the target truncation; each
        # extra x-degree buys one band of headroom (the x-degree of what a
        # fill can need strictly drops)
        self.head = eq.z_headroom if eq else 0
        self.Nmax = Nz + Nx * self.head
        K = Nx + 1
        self.F = [[[0] for _ in range(K)] for _ in range(self.Nmax + 1)]
        self.maxP = eq.max_psb if eq else 0
        # P[i][n][k]; P[0] aliases F
        self.P = [self.F] + [
            [[[0] for _ in range(K)] for _ in range(self.Nmax + 1)] for _ in range(self.maxP)
        ]
        if cls is MapClass.TWO_CONNECTED:
            # S = zu + (uN(1)-N(u))/(1-u); G = 1/(1-S); SG = S*G
            self.S = [[[0] for _ in range(K)] for _ in range(self.Nmax + 1)]
            self.G = [[[0] for _ in range(K)] for _ in range(self.Nmax + 1)]
            self.SG = [[[0] for _ in range(K)] for _ in range(self.Nmax + 1)]
            self.wmax = 0
            if eq:
                self.wmax = max([eq.v - 1] + [v_i - 1 for _, _, v_i, _ in eq.types])
                # SEQ[t][n][k] = [w^t] S~/(1-S~) with S~ = z u^2 w + sum n_m u^m (w+...+w^(m-1))
                self.SEQ = [
                    [[[0] for _ in range(K)] for _ in range(self.Nmax + 1)] for _ in range(self.wmax + 1)
                ]

    # -- plain building blocks --------------------------------------------

    def _conv(self, A, B, n, k):
        """[z^n x^k] of A*B for state arrays."""
        out = [0]
        for a in range(n + 1):
            rowA = A[a]
            rowB = B[n - a]
            for k1 in range(k + 1):
                p1 = rowA[k1]
                if not any(p1):
                    continue
                p2 = rowB[k - k1]
                if not any(p2):
                    continue
                out = padd(out, pmul(p1, p2))
        return out

    def _kernel_all(self, p):
        # z u (u F(u) - F(1))/(u - 1) at a single z-slice: u * (F + dd(F))
        return pushift(padd(p, pdd(p)), 1)

    def _kernel_bip(self, p):
        # z u^2 (F(1) - F(u))/(1 - u^2); exponents of p are even
        deg = len(p) - 1
        out = [0] * (deg + 3)
        acc = 0
        for j in range(deg, -1, -1):
            if j % 2 == 1 and p[j]:
                raise SeriesError("odd u-exponent in bipartite series")
        for t in range(deg // 2, 0, -1):
            acc += p[2 * t] if 2 * t <= deg else 0
            out[2 * (t - 1) + 2] = acc
        return out

    def _fill(self, j, m, k):
        """[z^m x^k] of the deep-face fill z^-j [u^j] P_(j-1), m >= 0."""
        if m + j > self.Nmax:
            raise SeriesError("fill reaches past the solver horizon")
        p = self.P[j - 1][m + j][k]
        return p[j] if j < len(p) else 0

    def _fill_2c(self, j, m, k):
        if m + j > self.Nmax:
            raise SeriesError("fill reaches past the solver horizon")
        p = self.F[m + j][k]
        return p[j] if j < len(p) else 0

    # -- per-order updates -------------------------------------------------

    def run(self) -> None:
        # x-degree major: each extra degree needs one less band of headroom,
        # so lower degrees are solved further in z than the target truncation
        for k in range(self.Nx + 1):
            horizon = self.Nz + (self.Nx - k) * self.head
            for n in range(horizon + 1):
                if self.cls is MapClass.TWO_CONNECTED:
                    self._update_2c(n, k)
                    self._update_seq_state(n, k)
                else:
                    self._update_mb(n, k)
                    self._update_psb(n, k)

    def _xterms(self, n, k, fill) -> list:
        eq = self.eq
        out = [0]
        if eq is None or k == 0:
            return out
        if k >= 1:
            zs = eq.e - eq.v + 1
            if n - zs >= 0:
                p = self._attach(eq.v - 1, n - zs, k - 1)
                out = padd(out, pscale(pushift(p, -(eq.v - 2)), eq.r))
        if k >= 2:
            for r_i, e_i, v_i, deep in eq.types:
                zs = e_i - v_i + 1
                if n - zs < 0:
                    continue
                # distribute z-orders between the boundary attachment and fills
                out = padd(out, pscale(self._type_term(v_i, deep, n - zs, k - 2, fill), r_i))
        return out

    def _type_term(self, v_i, deep, budget, k, fill) -> list:
        # sum over (z, x) compositions: boundary attachment * prod of fills
        slots = []
        for j, cnt in deep:
            slots.extend([j] * cnt)
        out = [0]

        def rec(idx, rem, kk, acc):
            nonlocal out
            if idx == len(slots):
                p = self._attach(v_i - 1, rem, kk)
                if any(p):
                    out = padd(out, pscale(pushift(p, -(v_i - 2)), acc))
                return
            j = slots[idx]
            for m in range(rem + 1):
                for kx in range(kk + 1):
                    c = fill(j, m, kx)
                    if c:
                        rec(idx + 1, rem - m, kk - kx, acc * c)

        rec(0, budget, k, 1)
        return out

    def _attach(self, i, n, k) -> list:
        """Boundary attachment series at [z^n x^k]: P_i for All/Bip, the
        non-empty block sequence [w^i] for 2-connected."""
        if self.cls is MapClass.TWO_CONNECTED:
            return list(self.SEQ[i][n][k])
        return list(self.P[i][n][k])

    def _update_mb(self, n, k) -> None:
        bip = self.cls is MapClass.BIPARTITE
        if n == 0:
            self.F[0][k] = [1] if k == 0 else [0]
            return
        out = [0]
        sq = self._conv(self.F, self.F, n - 1, k)
        out = padd(out, pushift(sq, 2))
        ker = self._kernel_bip(self.F[n - 1][k]) if bip else self._kernel_all(self.F[n - 1][k])
        out = padd(out, ker)
        out = padd(out, self._xterms(n, k, self._fill))
        self.F[n][k] = _trim(out)

    def _update_psb(self, n, k) -> None:
        if self.eq is None:
            return
        # P_1
        for i in range(1, self.maxP + 1):
            prev = self.P[i - 1][n][k]
            cur = list(prev)
            if i < len(prev) and prev[i]:
                sub = [0] * (i + 1)
                sub[i] = prev[i]
                cur = psub(cur, sub)
            if i == 1 and n == 0 and k == 0:
                cur = psub(cur, [1])  # the atomic map has root face valency 0
            # violations: sum_c Phat_c u^(i-c) [u^(i-c)] P_(i-c-1)
            for c in range(i):
                piece_idx = i - c - 1
                jj = i - c
                acc = [0]
                for a in range(n + 1):
                    for k1 in range(k + 1):
                        # piece factor: scalar [u^jj] P_(piece_idx) at (n-a, k-k1)
                        pp = self.P[piece_idx][n - a][k - k1]
                        cpp = pp[jj] if jj < len(pp) else 0
                        if not cpp:
                            continue
                        if c == 0:
                            host = list(self.F[a][k1])
                            if a == 0 and k1 == 0:
                                host = psub(host, [1])  # Phat_0 = F - 1
                        else:
                            host = self.P[c][a][k1]
                        if any(host):
                            acc = padd(acc, pscale(host, cpp))
                cur = psub(cur, pushift(acc, jj))
            self.P[i][n][k] = _trim(cur)

    # -- 2-connected -------------------------------------------------------

    def _update_2c(self, n, k) -> None:
        if n == 0:
            self.F[0][k] = [0]
            return
        # N[n][k] = u * [z^(n-1) x^k] S G + x-terms
        out = pushift(self.SG[n - 1][k], 1) if n >= 1 else [0]
        out = padd(out, self._xterms(n, k, self._fill_2c))
        self.F[n][k] = _trim(out)

    def _suffix_kernel_2c(self, p) -> list:
        # (u N(1) - N(u))/(1 - u) = sum_j n_j (u + ... + u^(j-1))
        deg = len(p) - 1
        out = [0] * max(deg, 1)
        acc = 0
        for t in range(deg - 1, 0, -1):
            acc += p[t + 1]
            out[t] = acc
        return out

    def _update_seq_state(self, n, k) -> None:
        # S = z u + D(N); uses N[n][k] just computed
        s = self._suffix_kernel_2c(self.F[n][k])
        if n == 1 and k == 0:
            s = padd(s, [0, 1])  # z u
        self.S[n][k] = _trim(s)
        # G = 1 + S G;  SG = S G
        g = [1] if (n == 0 and k == 0) else [0]
        sg = self._conv(self.S, self.G, n, k)
        self.G[n][k] = _trim(padd(g, sg))
        self.SG[n][k] = list(self.G[n][k])
        self.SG[n][k] = _trim(psub(self.G[n][k], [1] if (n == 0 and k == 0) else [0]))
        if self.eq:
            # SEQ[t] = [w^t] (S~ / (1 - S~)):  SEQ[0] = 0, and for t >= 1
            # SEQ[t] = S~_t + sum_(s=1)^(t-1) S~_s * SEQ[t-s]
            for t in range(1, self.wmax + 1):
                st = self._stilde(t, n, k)
                acc = st
                for s in range(1, t):
                    part = [0]
                    for a in range(n + 1):
                        for k1 in range(k + 1):
                            p1 = self._stilde_cached(s, a, k1)
                            if not any(p1):
                                continue
                            p2 = self.SEQ[t - s][n - a][k - k1]
                            if any(p2):
                                part = padd(part, pmul(p1, p2))
                    acc = padd(acc, part)
                self.SEQ[t][n][k] = _trim(acc)

    def _stilde(self, t, n, k) -> list:
        # [w^t] of z u^2 w + sum_m n_m u^m (w + ... + w^(m-1)) at [z^n x^k]
        p = self.F[n][k]
        out = [0] * len(p)
        for m_exp in range(t + 1, len(p)):
            out[m_exp] = p[m_exp]
        if t == 1 and n == 1 and k == 0:
            out = padd(out, [0, 0, 1])
        return _trim(out)

    def _stilde_cached(self, t, n, k) -> list:
        return self._stilde(t, n, k)


def _finalize(cls: MapClass, Nz: int, Nx: int, F) -> Series3:
    out = Series3.zero(cls, Nz, Nx, u_is_half=(cls is MapClass.BIPARTITE))
    for n in range(Nz + 1):
        for k in range(Nx + 1):
            p = _trim(list(F[n][k]))
            if cls is MapClass.BIPARTITE:
                if any(p[j] for j in range(1, len(p), 2)):
                    raise SeriesError("bipartite series has odd true valency")
                p = [p[j] for j in range(0, len(p), 2)]
            out.coeffs[n][k] = p
    return out


def solve_tutte(cls: MapClass, Nz: int) -> Series3:
    """Solve the plain (x = 0) class equation to order z^Nz."""
    if Nz < 0:
        raise SeriesError("Nz >= 0")
    st = _Streamer(cls, Nz, 0, None)
    st.run()
    return _finalize(cls, Nz, 0, st.F)


def solve_pattern_equation(eq: PatternEquation, Nz: int, Nx: int = 2) -> Series3:
    """Solve the pattern-marked equation; u kept polynomial, evaluate at
    u = 1 via Series3.at_u1.  A_n = [z^n x^0], B_n = [z^n x^1], and
    2 C_n = 2 [z^n x^2] is the two-labelled-occurrence count."""
    if Nx < 0:
        raise SeriesError("Nx >= 0")
    st = _Streamer(eq.cls, Nz, Nx, eq)
    st.run()
    return _finalize(eq.cls, Nz, Nx, st.F)


def partial_boundary_series(i: int, cls: MapClass, base: Series3) -> Series3:
    """P_i from a solved base series via the boundary recursion.

    The base must be the class solution (x-truncated as desired); for
    bipartite input the half-u convention is converted internally.
    """
    if i < 0:
        raise SeriesError("i >= 0")
    if cls is MapClass.TWO_CONNECTED:
        raise SeriesError("2-connected maps have simple boundaries; P_i is not defined")
    Nz, Nx = base.Nz, base.Nx
    work = base
    if base.u_is_half:
        work = Series3.zero(cls, Nz, Nx)
        for n in range(Nz + 1):
            for k in range(Nx + 1):
                p = base.coeffs[n][k]
                q = [0] * (2 * len(p) - 1) if len(p) else [0]
                for j, c in enumerate(p):
                    if c:
                        q[2 * j] = c
                work.coeffs[n][k] = _trim(q)
    chain = [work]
    for ii in range(1, i + 1):
        prev = chain[ii - 1]
        cur = prev - _u_slice_times_ui(prev, ii)
        if ii == 1:
            one = Series3.zero(cls, Nz, Nx)
            one.coeffs[0][0] = [1]
            cur = cur - one
        for c in range(ii):
            piece = chain[ii - c - 1].coeff_u(ii - c)
            host = chain[c]
            if c == 0:
                one = Series3.zero(cls, Nz, Nx)
                one.coeffs[0][0] = [1]
                host = host - one
            term = host * _shift_u(piece, ii - c)
            cur = cur - term
        chain.append(cur)
    out = chain[i]
    if base.u_is_half:
        return _halve_u(out)
    return out


def _u_slice_times_ui(s: Series3, j: int) -> Series3:
    out = Series3.zero(s.cls, s.Nz, s.Nx, s.u_is_half)
    for n in range(s.Nz + 1):
        for k in range(s.Nx + 1):
            p = s.coeffs[n][k]
            if j < len(p) and p[j]:
                q = [0] * (j + 1)
                q[j] = p[j]
                out.coeffs[n][k] = q
    return out


def _shift_u(s: Series3, t: int) -> Series3:
    out = Series3.zero(s.cls, s.Nz, s.Nx, s.u_is_half)
    for n in range(s.Nz + 1):
        for k in range(s.Nx + 1):
            out.coeffs[n][k] = pushift(s.coeffs[n][k], t)
    return out


def _halve_u(s: Series3) -> Series3:
    out = Series3.zero(s.cls, s.Nz, s.Nx, u_is_half=True)
    for n in range(s.Nz + 1):
        for k in range(s.Nx + 1):
            p = s.coeffs[n][k]
            if any(p[j] for j in range(1, len(p), 2)):
                raise SeriesError("odd true valency in bipartite series")
            out.coeffs[n][k] = _trim([p[j] for j in range(0, len(p), 2)])
    return out


def sequence_block_extract(N_series: Series3, b: int) -> Series3:
    """[w^(b-2)] of the 2-connected block-sequence expression.

    The auxiliary variable w marks boundary edges donated by the sequence
    (z u^2 w per single edge, u^m(w + ... + w^(m-1)) per 2-connected block
    of root valency m); the geometric series is truncated in w, which is
    exact because higher powers of the numerator cannot reach w^(b-2).
    [w^0] is zero: the empty sequence is excluded.
    """
    if b < 2:
        raise SeriesError("b >= 2")
    Nz, Nx = N_series.Nz, N_series.Nx
    t_target = b - 2
    if t_target == 0:
        return Series3.zero(MapClass.TWO_CONNECTED, Nz, Nx)
    # S~_t and the w-graded geometric sum
    def stilde(t):
        out = Series3.zero(MapClass.TWO_CONNECTED, Nz, Nx)
        for n in range(Nz + 1):
            for k in range(Nx + 1):
                p = N_series.coeffs[n][k]
                q = [0] * len(p)
                for m_exp in range(t + 1, len(p)):
                    q[m_exp] = p[m_exp]
                out.coeffs[n][k] = _trim(q)
        if t == 1 and Nz >= 1:
            out.coeffs[1][0] = padd(out.coeffs[1][0], [0, 0, 1])
        return out

    seq = [Series3.zero(MapClass.TWO_CONNECTED, Nz, Nx)]
    for t in range(1, t_target + 1):
        acc = stilde(t)
        for s in range(1, t):
            acc = acc + stilde(s) * seq[t - s]
        seq.append(acc)
    return seq[t_target]
