# Does the pattern equation hold as an identity on TRUE (brute-force) series?
# Build M(z,u,x), P_i(z,u,x) and the fills from enumeration, assemble the RHS,
# and compare with the brute LHS coefficient by coefficient.
import warnings

warnings.filterwarnings("ignore")
import sys
from itertools import combinations

sys.path.insert(0, "src")
import numpy as np

from planarmaps.maps import MapClass, fly_map
from planarmaps.patterns import Pattern, enumerate_intersection_types, find_occurrences, occurrences_intersect
from planarmaps.enumeration import generate

NZ = 6
NX = 2

fly = Pattern(fly_map())


def poly_add(a, b):
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return out


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def series_zero():
    return [[[0] for _ in range(NX + 1)] for _ in range(NZ + 1)]


# ---- true series from enumeration -----------------------------------------
M = series_zero()
P = [series_zero() for _ in range(8)]  # P_0..P_7
M[0][0] = [1]
for i in range(8):
    P[i][0][0] = [1] if i == 0 else [0]  # atomic: psb_i requires valency > i

for n in range(1, NZ + 1):
    run = generate(n, MapClass.ALL)
    for m in run.iter_maps():
        v = m.root_face_valency()
        occs = find_occurrences(m, fly)
        X = len(occs)
        # subsets of size k, with k=2 pairs automatically admissible
        weights = [1, X, X * (X - 1) // 2]
        # psb prefix
        psb = 0
        for i in range(1, v):
            if m.has_partial_simple_boundary(i):
                psb = i
            else:
                break
        for k in range(NX + 1):
            w = weights[k]
            if not w:
                continue
            for i in range(8):
                if i == 0 or (psb >= i and v > i):
                    p = P[i][n][k]
                    while len(p) <= v:
                        p.append(0)
                    p[v] += w
        for k in range(NX + 1):
            w = weights[k]
            if w:
                p = M[n][k]
                while len(p) <= v:
                    p.append(0)
                p[v] += w

types = enumerate_intersection_types(fly, MapClass.ALL)
print(f"{len(types)} types")


def coeff_u(S, j):
    out = [[0] * (NX + 1) for _ in range(NZ + 1)]
    for n in range(NZ + 1):
        for k in range(NX + 1):
            p = S[n][k]
            out[n][k] = p[j] if j < len(p) else 0
    return out


def rhs_coeff(n, k):
    """u-polynomial of the RHS at z^n x^k."""
    out = [0]
    if n == 0:
        return [1] if k == 0 else [0]
    # z u^2 M^2
    for a in range(n):
        b = n - 1 - a
        for k1 in range(k + 1):
            k2 = k - k1
            p = poly_mul(M[a][k1], M[b][k2])
            out = poly_add(out, [0, 0] + p)
    # z u (u M - M(1))/(u-1) = z * sum_j m_j (u + ... + u^{j+1})
    p = M[n - 1][k]
    deg = len(p) - 1
    ker = [0] * (deg + 2)
    for t in range(deg + 1):
        ker[t + 1] = sum(p[t:])
    out = poly_add(out, ker)
    # single-occurrence term: 2 z u^-2 P_3
    if k >= 1 and n >= 1:
        p = P[3][n - 1][k - 1]
        if any(p):
            assert not any(p[:2]), f"u-shift below zero in P3 term at n={n}"
            out = poly_add(out, [2 * x for x in p[2:]])
    # type terms
    if k >= 2:
        for t in types:
            shift = t.e - t.v + 1
            # fills: product over deep faces of z^{-j}([u^j]P_{j-1} - bridge)
            # as z-series (x degree 0 only since k=2)
            fill = [1] + [0] * NZ
            ok = True
            for j, mult in t.deep_faces:
                s = coeff_u(P[j - 1], j)
                f = [0] * (NZ + 1)
                for nn in range(j, NZ + 1):
                    f[nn - j] = s[nn][0]
                if j == 2:
                    f[1 - 2 + 2 - 1] = f[-1]  # no-op to keep indices clear
                    # subtract the bare bridge (z^1 u^2 x^0): appears at f index -1
                    # bridge has z=1, so normalized index 1-j = -1 -> handled:
                    # s[1][0] includes it; that's f[-1]: instead rebuild explicitly
                    f = [0] * (NZ + 1)
                    for nn in range(j, NZ + 1):
                        c = s[nn][0]
                        if nn == 1 + 1 and False:
                            pass
                        f[nn - j] = c
                    # remove nothing here: the bridge sits at s[1][0] (below z^j)
                    # -> it was never copied; contracted types are separate. noqa
                for _ in range(mult):
                    nf = [0] * (NZ + 1)
                    for a2 in range(NZ + 1):
                        if fill[a2]:
                            for b2 in range(NZ + 1 - a2):
                                nf[a2 + b2] += fill[a2] * f[b2]
                    fill = nf
            base = P[t.v - 1]
            for a in range(NZ + 1 - shift):
                c = fill[a]
                if not c:
                    continue
                zn = n - shift - a
                if zn < 0:
                    continue
                p = base[zn][k - 2]
                if any(p):
                    assert not any(p[: t.v - 2]), f"u-shift below zero in type term {t}"
                    out = poly_add(out, [t.r * c * x for x in p[t.v - 2 :]])
    return out


bad = 0
for n in range(NZ + 1):
    for k in range(NX + 1):
        lhs = M[n][k]
        rhs = rhs_coeff(n, k)
        la = lhs + [0] * (len(rhs) - len(lhs))
        ra = rhs + [0] * (len(lhs) - len(rhs))
        if la != ra:
            bad += 1
            diff = [a - b for a, b in zip(ra, la)]
            print(f"MISMATCH n={n} k={k}: rhs-lhs={diff}")
if not bad:
    print("equation holds exactly on true series for all n <=", NZ)
