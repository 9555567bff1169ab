"""Rooted planar maps as rotation systems on darts.

A map with m edges is encoded on 2m darts (half-edges) labelled 0..2m-1 by

* ``sigma`` -- the rotation permutation: counterclockwise successor of each
  dart around its vertex; vertices are the orbits of ``sigma``,
* ``alpha`` -- a fixed-point-free involution pairing the two darts of each
  edge,
* ``root`` -- the root dart (oriented root edge, pointing away from the root
  vertex).

Faces are the orbits of ``phi = sigma o alpha`` (``phi(d) = sigma[alpha[d]]``).
The root face is *declared* to be the phi-orbit of the root dart; this is the
left-face convention used consistently throughout the package.  The boundary
walk of the root face starts at the root vertex and its t-th step runs along
dart ``phi^(t-1)(root)``, so the visited vertices are ``vertex(root)``,
``vertex(alpha(root))``, ``vertex(alpha(phi(root)))``, ...

Planarity (genus 0) is enforced through the Euler relation
``V - E + F = 2`` with V = #orbits(sigma), E = darts/2, F = #orbits(phi).

The atomic map (one vertex, zero edges) is represented with zero darts and
``root == -1``; by convention it has one vertex and a single face of
valency 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class MapError(ValueError):
    """Raised when dart data does not describe a rooted planar map."""


class MapClass(Enum):
    ALL = "all"
    BIPARTITE = "bipartite"
    TWO_CONNECTED = "2conn"

    @staticmethod
    def from_str(s: str) -> "MapClass":
        key = s.strip().lower()
        aliases = {
            "all": MapClass.ALL,
            "bipartite": MapClass.BIPARTITE,
            "bip": MapClass.BIPARTITE,
            "2conn": MapClass.TWO_CONNECTED,
            "2-connected": MapClass.TWO_CONNECTED,
            "nonseparable": MapClass.TWO_CONNECTED,
        }
        if key not in aliases:
            raise MapError(f"unknown map class {s!r}")
        return aliases[key]


@dataclass(frozen=True)
class FaceInfo:
    """Faces of a map as phi-orbits.

    ``faces[i]`` is the dart cycle of face i in phi-order, ``valency[i]`` its
    length (bridges are counted twice since both darts of a bridge lie on the
    same orbit), ``root_face`` the index of the orbit containing the root
    dart and ``face_of[d]`` the face index of each dart.
    """

    faces: tuple[tuple[int, ...], ...]
    valency: tuple[int, ...]
    root_face: int
    face_of: tuple[int, ...]


class RootedMap:
    """Immutable rooted planar map.

    Instances validate all invariants on construction: alpha is a
    fixed-point-free involution, sigma and alpha act transitively (the map is
    connected) and the Euler relation forces genus 0.
    """

    __slots__ = ("sigma", "alpha", "root", "_faces", "_vid", "_nv")

    def __init__(self, sigma: Sequence[int], alpha: Sequence[int], root: int):
        sigma = tuple(sigma)
        alpha = tuple(alpha)
        n = len(sigma)
        if len(alpha) != n:
            raise MapError("sigma and alpha must have equal length")
        if n % 2 == 1:
            raise MapError("odd number of darts")
        if n == 0:
            if root != -1:
                raise MapError("atomic map must have root == -1")
            self_set = object.__setattr__
            self_set(self, "sigma", sigma)
            self_set(self, "alpha", alpha)
            self_set(self, "root", -1)
            self_set(self, "_faces", None)
            self_set(self, "_vid", ())
            self_set(self, "_nv", 1)
            return
        dartset = set(range(n))
        if set(sigma) != dartset or set(alpha) != dartset:
            raise MapError("sigma/alpha are not permutations of 0..2m-1")
        for d in range(n):
            if alpha[d] == d or alpha[alpha[d]] != d:
                raise MapError("alpha is not a fixed-point-free involution")
        if not (0 <= root < n):
            raise MapError(f"root dart {root} out of range")
        # connectedness: orbit of <sigma, alpha> through dart 0
        seen = [False] * n
        stack = [0]
        seen[0] = True
        cnt = 1
        while stack:
            d = stack.pop()
            for e in (sigma[d], alpha[d]):
                if not seen[e]:
                    seen[e] = True
                    cnt += 1
                    stack.append(e)
        if cnt != n:
            raise MapError("sigma and alpha do not act transitively (map not connected)")
        s = object.__setattr__
        s(self, "sigma", sigma)
        s(self, "alpha", alpha)
        s(self, "root", root)
        s(self, "_faces", None)
        vid = [-1] * n
        nv = 0
        for d in range(n):
            if vid[d] < 0:
                e = d
                while vid[e] < 0:
                    vid[e] = nv
                    e = sigma[e]
                nv += 1
        s(self, "_vid", tuple(vid))
        s(self, "_nv", nv)
        if nv - n // 2 + self._count_faces() != 2:
            raise MapError("Euler relation violated: not a genus-0 embedding")

    def __setattr__(self, *a):  # immutability
        raise AttributeError("RootedMap is immutable")

    # -- basic counts ------------------------------------------------------

    @property
    def n_darts(self) -> int:
        return len(self.sigma)

    @property
    def n_edges(self) -> int:
        return len(self.sigma) // 2

    @property
    def n_vertices(self) -> int:
        return self._nv

    @property
    def vertex_of(self) -> tuple[int, ...]:
        """Vertex index of each dart (sigma-orbit numbering)."""
        return self._vid

    def phi(self, d: int) -> int:
        return self.sigma[self.alpha[d]]

    def _count_faces(self) -> int:
        n = len(self.sigma)
        seen = [False] * n
        f = 0
        for d in range(n):
            if not seen[d]:
                f += 1
                e = d
                while not seen[e]:
                    seen[e] = True
                    e = self.sigma[self.alpha[e]]
        return f

    # -- equality / hashing -------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, RootedMap)
            and self.canonical_code() == other.canonical_code()
        )

    def __hash__(self):
        return hash(self.canonical_code())

    def __repr__(self):
        return f"RootedMap(E={self.n_edges}, V={self.n_vertices}, root={self.root})"

    # -- faces ---------------------------------------------------------------

    def faces(self) -> FaceInfo:
        """All phi-orbits with valencies; the root face is identified.

        The atomic map reports a single face of valency 0.
        """
        if self._faces is not None:
            return self._faces
        n = len(self.sigma)
        if n == 0:
            fi = FaceInfo(faces=((),), valency=(0,), root_face=0, face_of=())
            object.__setattr__(self, "_faces", fi)
            return fi
        face_of = [-1] * n
        faces = []
        for d in range(n):
            if face_of[d] < 0:
                cyc = []
                e = d
                while face_of[e] < 0:
                    face_of[e] = len(faces)
                    cyc.append(e)
                    e = self.sigma[self.alpha[e]]
                faces.append(tuple(cyc))
        fi = FaceInfo(
            faces=tuple(faces),
            valency=tuple(len(c) for c in faces),
            root_face=face_of[self.root],
            face_of=tuple(face_of),
        )
        object.__setattr__(self, "_faces", fi)
        return fi

    def root_face_valency(self) -> int:
        fi = self.faces()
        return fi.valency[fi.root_face]

    def boundary_walk(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Darts and visited vertices of the root-face walk.

        Returns ``(darts, vertices)`` where ``vertices`` has one more entry
        than ``darts`` (the walk returns to the root vertex, which is listed
        once at each visit, including the closing one).
        """
        if self.n_darts == 0:
            return (), (0,)
        darts = []
        d = self.root
        while True:
            darts.append(d)
            d = self.sigma[self.alpha[d]]
            if d == self.root:
                break
        verts = [self._vid[self.root]]
        for d in darts:
            verts.append(self._vid[self.alpha[d]])
        return tuple(darts), tuple(verts)

    def vertex_degrees(self) -> tuple[int, ...]:
        degs = [0] * self._nv
        for d in range(self.n_darts):
            degs[self._vid[d]] += 1
        return tuple(degs) if self.n_darts else (0,)

    # -- canonical code -----------------------------------------------------

    def canonical_code(self) -> tuple[int, ...]:
        """Deterministic BFS relabelling from the root dart.

        Two rooted maps have equal codes iff they are related by a
        root-preserving isomorphism (rooted maps are rigid, so the BFS
        first-visit numbering is unique).  The code is the concatenation of
        the relabelled sigma and alpha arrays and fully encodes the map;
        ``from_code`` inverts it.
        """
        n = len(self.sigma)
        if n == 0:
            return ()
        lab = [-1] * n
        order = [self.root]
        lab[self.root] = 0
        i = 0
        while i < len(order):
            d = order[i]
            i += 1
            for e in (self.sigma[d], self.alpha[d]):
                if lab[e] < 0:
                    lab[e] = len(order)
                    order.append(e)
        code = [0] * (2 * n)
        for d in range(n):
            code[lab[d]] = lab[self.sigma[d]]
            code[n + lab[d]] = lab[self.alpha[d]]
        return tuple(code)

    @staticmethod
    def from_code(code: Sequence[int]) -> "RootedMap":
        code = tuple(code)
        if not code:
            return RootedMap((), (), -1)
        n = len(code) // 2
        return RootedMap(code[:n], code[n:], 0)

    def relabel(self, perm: Sequence[int]) -> "RootedMap":
        """The same map with darts renamed by ``perm`` (dart d becomes perm[d])."""
        n = self.n_darts
        sig = [0] * n
        alf = [0] * n
        for d in range(n):
            sig[perm[d]] = perm[self.sigma[d]]
            alf[perm[d]] = perm[self.alpha[d]]
        return RootedMap(sig, alf, perm[self.root] if n else -1)

    def rerooted(self, root: int) -> "RootedMap":
        return RootedMap(self.sigma, self.alpha, root)

    # -- boundary predicates --------------------------------------------------

    def has_partial_simple_boundary(self, i: int) -> bool:
        """First ``i`` boundary steps use i distinct edges and reach i distinct
        new vertices.

        "Distinct vertices" is taken to include the starting root vertex: the
        walk ``v_0, ..., v_i`` must consist of i+1 pairwise distinct vertices.
        (This is the reading under which the boundary gluings used by the
        series engine are bijective; see README.)  Requires root face valency
        strictly greater than i.  The simple-boundary predicate is
        ``has_partial_simple_boundary(valency - 1)``.
        """
        if i < 0:
            raise MapError("boundary length must be >= 0")
        fi = self.faces()
        if fi.valency[fi.root_face] <= i:
            return False
        if i == 0:
            return True
        d = self.root
        edges = set()
        verts = {self._vid[self.root]}
        for _ in range(i):
            e = min(d, self.alpha[d])
            v = self._vid[self.alpha[d]]
            if e in edges or v in verts:
                return False
            edges.add(e)
            verts.add(v)
            d = self.sigma[self.alpha[d]]
        return True

    def has_simple_boundary(self) -> bool:
        return self.has_partial_simple_boundary(self.root_face_valency() - 1)

    # -- graph-level helpers ---------------------------------------------------

    def edge_endpoints(self) -> list[tuple[int, int]]:
        """(vertex, vertex) per edge, edges indexed by their smaller dart // 1."""
        out = []
        for d in range(self.n_darts):
            if d < self.alpha[d]:
                out.append((self._vid[d], self._vid[self.alpha[d]]))
        return out

    def has_loop(self) -> bool:
        return any(self._vid[d] == self._vid[self.alpha[d]] for d in range(self.n_darts))

    def cut_vertices(self) -> set[int]:
        """Cut vertices of the underlying multigraph via block decomposition.

        A loop forms a block by itself, so its vertex is a cut vertex as soon
        as any other edge is incident to it.
        """
        nv = self._nv
        if self.n_darts == 0:
            return set()
        adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
        for idx, (u, v) in enumerate(self.edge_endpoints()):
            if u == v:
                continue  # handled below
            adj[u].append((v, idx))
            adj[v].append((u, idx))
        loops_at = [0] * nv
        for u, v in self.edge_endpoints():
            if u == v:
                loops_at[u] += 1
        cuts = self._articulations_simple(adj, nv)
        # loops: a vertex with a loop plus any other incident edge spans >= 2 blocks
        deg = self.vertex_degrees()
        for v in range(nv):
            if loops_at[v] and deg[v] > 2 * loops_at[v]:
                cuts.add(v)
            if loops_at[v] >= 2:
                cuts.add(v)
        return cuts

    @staticmethod
    def _articulations_simple(adj, nv) -> set[int]:
        """Articulation vertices of a loopless multigraph (recursive-free DFS)."""
        disc = [-1] * nv
        low = [0] * nv
        parent_edge = [-1] * nv
        cuts: set[int] = set()
        timer = 0
        for s in range(nv):
            if disc[s] >= 0:
                continue
            root_children = 0
            stack = [(s, 0)]
            disc[s] = low[s] = timer
            timer += 1
            while stack:
                v, it = stack[-1]
                if it < len(adj[v]):
                    stack[-1] = (v, it + 1)
                    w, eidx = adj[v][it]
                    if eidx == parent_edge[v]:
                        continue
                    if disc[w] < 0:
                        parent_edge[w] = eidx
                        disc[w] = low[w] = timer
                        timer += 1
                        if v == s:
                            root_children += 1
                        stack.append((w, 0))
                    else:
                        if disc[w] < low[v]:
                            low[v] = disc[w]
                else:
                    stack.pop()
                    if stack:
                        p = stack[-1][0]
                        if low[v] < low[p]:
                            low[p] = low[v]
                        if p != s and low[v] >= disc[p]:
                            cuts.add(p)
            if root_children >= 2:
                cuts.add(s)
        return cuts

    def is_bipartite_map(self) -> bool:
        """Every face valency is even."""
        return all(v % 2 == 0 for v in self.faces().valency)

    def is_bipartite_graph(self) -> bool:
        """The underlying multigraph admits a proper 2-colouring.

        Independent of :meth:`is_bipartite_map`; on genus-0 maps the two
        notions coincide, which the test suite checks exhaustively.
        """
        nv = self._nv
        color = [-1] * nv
        adj: list[list[int]] = [[] for _ in range(nv)]
        for u, v in self.edge_endpoints():
            if u == v:
                return False
            adj[u].append(v)
            adj[v].append(u)
        for s in range(nv):
            if color[s] >= 0:
                continue
            color[s] = 0
            stack = [s]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if color[w] < 0:
                        color[w] = 1 - color[v]
                        stack.append(w)
                    elif color[w] == color[v]:
                        return False
        return True

    def is_two_connected(self) -> bool:
        """At least two edges and no cut vertex.

        The degenerate maps (atomic, single edge, single loop) are excluded so
        that the class agrees for every n with the solution of its root-edge
        functional equation, whose power series starts at z^2; see README for
        the convention discussion.
        """
        if self.n_edges < 2:
            return False
        if self.has_loop():
            return False  # a loop in a >=2-edge map always spans its own block
        return not self.cut_vertices()


def class_membership(m: RootedMap, cls: MapClass) -> bool:
    if cls is MapClass.ALL:
        return True
    if cls is MapClass.BIPARTITE:
        return m.is_bipartite_map()
    return m.is_two_connected()


def canonical_code(m: RootedMap) -> tuple[int, ...]:
    return m.canonical_code()


def faces(m: RootedMap) -> FaceInfo:
    return m.faces()


def has_partial_simple_boundary(m: RootedMap, i: int) -> bool:
    return m.has_partial_simple_boundary(i)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------
#
#   darts=<2m>
#   sigma=<cycles in (a b c) notation>
#   alpha=<pairs, same notation>
#   root=<dart id>
#
# Fixed points may be omitted from the cycle lists.  The atomic map is
# written as darts=0 with empty permutations and root=-1.

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def _parse_perm(text: str, n: int, what: str) -> list[int]:
    perm = list(range(n))
    seen: set[int] = set()
    rest = _CYCLE_RE.sub("", text).strip()
    if rest:
        raise MapError(f"{what}: stray characters {rest!r} outside cycles")
    for grp in _CYCLE_RE.findall(text):
        items = [p for p in re.split(r"[,\s]+", grp.strip()) if p]
        cyc = []
        for p in items:
            try:
                d = int(p)
            except ValueError:
                raise MapError(f"{what}: bad dart {p!r}") from None
            if not 0 <= d < n:
                raise MapError(f"{what}: dart {d} out of range 0..{n - 1}")
            if d in seen:
                raise MapError(f"{what}: dart {d} appears twice")
            seen.add(d)
            cyc.append(d)
        for i, d in enumerate(cyc):
            perm[d] = cyc[(i + 1) % len(cyc)]
    return perm


def _perm_cycles_str(perm: Sequence[int]) -> str:
    n = len(perm)
    seen = [False] * n
    out = []
    for d in range(n):
        if seen[d]:
            continue
        cyc = []
        e = d
        while not seen[e]:
            seen[e] = True
            cyc.append(e)
            e = perm[e]
        if len(cyc) > 1:
            out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out)


def to_text(m: RootedMap) -> str:
    return (
        f"darts={m.n_darts}\n"
        f"sigma={_perm_cycles_str(m.sigma)}\n"
        f"alpha={_perm_cycles_str(m.alpha)}\n"
        f"root={m.root}\n"
    )


def from_text(text: str) -> RootedMap:
    fields = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MapError(f"bad line {line!r}")
        k, v = line.split("=", 1)
        fields[k.strip()] = v.strip()
    for key in ("darts", "sigma", "alpha", "root"):
        if key not in fields:
            raise MapError(f"missing field {key!r}")
    n = int(fields["darts"])
    if n < 0 or n % 2:
        raise MapError(f"bad dart count {n}")
    sigma = _parse_perm(fields["sigma"], n, "sigma")
    alpha = _parse_perm(fields["alpha"], n, "alpha")
    return RootedMap(sigma, alpha, int(fields["root"]))


def load_map(path) -> RootedMap:
    with open(path, "r", encoding="utf-8") as fh:
        return from_text(fh.read())


def save_map(m: RootedMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_text(m))


# -- small builders used all over the tests ---------------------------------


def atomic_map() -> RootedMap:
    return RootedMap((), (), -1)


def loop_map() -> RootedMap:
    return RootedMap((1, 0), (1, 0), 0)


def bridge_map() -> RootedMap:
    return RootedMap((0, 1), (1, 0), 0)


def polygon_map(k: int) -> RootedMap:
    """The k-cycle, rooted on the face to the left of dart 0; k >= 1 (k=1 is the loop)."""
    if k < 1:
        raise MapError("k >= 1")
    if k == 1:
        return loop_map()
    # darts 2i (at vertex i, towards i+1) and 2i+1 (at vertex i+1, towards i)
    n = 2 * k
    sigma = [0] * n
    alpha = [0] * n
    for i in range(k):
        alpha[2 * i] = 2 * i + 1
        alpha[2 * i + 1] = 2 * i
        # vertex i carries darts 2i (outgoing) and 2(i-1)+1 (incoming back-dart)
        back = (2 * ((i - 1) % k)) + 1
        sigma[2 * i] = back
        sigma[back] = 2 * i
    return RootedMap(sigma, alpha, 0)


def parallel_edges_map(k: int) -> RootedMap:
    """k parallel edges between two vertices, rooted on an outer 2-gon side (k>=1)."""
    if k < 1:
        raise MapError("k >= 1")
    n = 2 * k
    # vertex a carries even darts in rotation order 0,2,4,..., vertex b odd darts
    # in the reverse order so that consecutive edges bound 2-gons.
    sigma = [0] * n
    alpha = [0] * n
    evens = [2 * i for i in range(k)]
    odds = [2 * i + 1 for i in range(k)]
    for i in range(k):
        sigma[evens[i]] = evens[(i + 1) % k]
        alpha[2 * i] = 2 * i + 1
        alpha[2 * i + 1] = 2 * i
    rev = list(reversed(odds))
    for i in range(k):
        sigma[rev[i]] = rev[(i + 1) % k]
    return RootedMap(sigma, alpha, 0)


def fly_map() -> RootedMap:
    """Two 2-gons meeting at a vertex, rooted in the exterior face.

    Vertices: centre c (pinch), outer l and r.  Edges 0/1 and 2/3 form the
    left 2-gon, 4/5 and 6/7 the right one.
    """
    # darts at c: 0, 2 (left lobe), 4, 6 (right lobe); at l: 1, 3; at r: 5, 7
    sigma = [0] * 8
    alpha = [1, 0, 3, 2, 5, 4, 7, 6]
    # rotation at c: (0 2 4 6) -- left lobe pair adjacent, right pair adjacent
    for a, b in (((0, 2)), (2, 4), (4, 6), (6, 0)):
        sigma[a] = b
    # rotation at l: (1 3), at r: (5 7)
    sigma[1] = 3
    sigma[3] = 1
    sigma[5] = 7
    sigma[7] = 5
    m = RootedMap(sigma, alpha, 0)
    # make sure dart 0 is rooted in the exterior (valency-4) face
    fi = m.faces()
    if fi.valency[fi.root_face] != 4:
        for d in range(8):
            if fi.valency[fi.face_of[d]] == 4:
                return RootedMap(sigma, alpha, d)
    return m
