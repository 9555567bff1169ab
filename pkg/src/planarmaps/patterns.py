"""Pattern occurrences, intersection detection and intersection types.

An occurrence of a pattern p in a host is an injective dart correspondence
that commutes with alpha, embeds each vertex rotation of p as a cyclic
subsequence of the host rotation (winding exactly once), maps distinct
pattern vertices to distinct host vertices, sends every interior face of p
onto a full host face, and avoids the host root face as an interior face.
Embeddings that differ by an exterior-preserving automorphism of p have the
same dart image and interior faces and are identified (deduplication key =
(dart image, interior faces)).

Two occurrences intersect iff they share an interior face, or some common
vertex carries their exclusive darts interleaved in the host rotation (the
cyclic sequence of exclusive darts needs more than two maximal runs; darts
on shared edges are free to join either side).  This generalises the
two-contiguous-blocks test to any number of components.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .maps import MapClass, MapError, RootedMap, from_text, to_text


class PatternError(MapError):
    pass


@dataclass(frozen=True)
class Pattern:
    """A rooted map read as a pattern; the root face is the exterior."""

    map: RootedMap

    def __post_init__(self):
        if self.map.n_edges == 0:
            raise PatternError("a pattern needs at least one edge")

    @property
    def e(self) -> int:
        return self.map.n_edges

    @property
    def v(self) -> int:
        """Boundary walk length (root face valency)."""
        return self.map.root_face_valency()

    @property
    def r(self) -> int:
        return rotations_of(self)

    @property
    def pinch_points(self) -> frozenset[int]:
        """Boundary vertices visited at least twice by the boundary walk."""
        _, verts = self.map.boundary_walk()
        verts = verts[:-1]
        seen: dict[int, int] = {}
        for v in verts:
            seen[v] = seen.get(v, 0) + 1
        return frozenset(v for v, c in seen.items() if c >= 2)

    def has_simple_boundary(self) -> bool:
        return len(self.pinch_points) == 0

    @staticmethod
    def from_file(path) -> "Pattern":
        from .maps import load_map

        return Pattern(load_map(path))


def rotations_of(p: Pattern) -> int:
    """Number of distinct re-rootings preserving the exterior face.

    Equals v divided by the cyclic symmetry order of the boundary walk.
    """
    m = p.map
    fi = m.faces()
    orbit = fi.faces[fi.root_face]
    codes = {m.rerooted(d).canonical_code() for d in orbit}
    return len(codes)


def rotation_maps(p: Pattern) -> list[RootedMap]:
    m = p.map
    fi = m.faces()
    orbit = fi.faces[fi.root_face]
    seen = {}
    for d in orbit:
        r = m.rerooted(d)
        seen.setdefault(r.canonical_code(), r)
    return list(seen.values())


@dataclass(frozen=True)
class Occurrence:
    """One equivalence class of embeddings of a pattern in a host."""

    host: RootedMap
    dart_image: frozenset[int]
    interior_faces: frozenset[int]
    embedding: tuple[int, ...]  # pattern dart d -> host dart embedding[d]

    def vertices(self) -> frozenset[int]:
        vid = self.host.vertex_of
        return frozenset(vid[d] for d in self.dart_image)

    def edges(self) -> frozenset[int]:
        alpha = self.host.alpha
        return frozenset(min(d, alpha[d]) for d in self.dart_image)


def _wedge_is_interior(p: RootedMap) -> list[bool]:
    """wedge after dart e (between e and sigma[e]) lies in a non-root face."""
    fi = p.faces()
    return [fi.face_of[p.sigma[e]] != fi.root_face for e in range(p.n_darts)]


def _sigma_distance(host: RootedMap, a: int, b: int) -> Optional[int]:
    """Steps t >= 0 with sigma^t(a) = b, None if different vertices."""
    d = a
    t = 0
    while True:
        if d == b:
            return t
        d = host.sigma[d]
        t += 1
        if d == a:
            return None


def find_occurrences(host: RootedMap, p: Pattern) -> list[Occurrence]:
    """All occurrences of p in host, deduplicated modulo pattern rotations."""
    pm = p.map
    np_ = pm.n_darts
    nh = host.n_darts
    if nh < np_:
        return []
    interior_wedge = _wedge_is_interior(pm)
    hfi = host.faces()
    pfi = pm.faces()
    host_root_face = hfi.root_face

    # derivation plan: cover all pattern darts from dart 0
    plan: list[tuple[str, int, int]] = []  # (kind, src, dst)
    known = [False] * np_
    known[0] = True
    frontier = [0]
    pending_sigma: list[int] = []
    covered_wedge = [False] * np_
    covered_alpha = [False] * np_
    while True:
        progressed = False
        i = 0
        while i < len(frontier):
            d = frontier[i]
            i += 1
            a = pm.alpha[d]
            if not covered_alpha[d]:
                covered_alpha[d] = covered_alpha[a] = True
                if known[a]:
                    plan.append(("acheck", d, a))
                else:
                    plan.append(("alpha", d, a))
                    known[a] = True
                    frontier.append(a)
                    progressed = True
            s = pm.sigma[d]
            if interior_wedge[d] and not covered_wedge[d]:
                covered_wedge[d] = True
                if known[s]:
                    plan.append(("scheck", d, s))
                else:
                    plan.append(("sigma", d, s))
                    known[s] = True
                    frontier.append(s)
                    progressed = True
        if all(known):
            break
        if not progressed:
            # open an exterior wedge from a known dart to an unknown one
            picked = False
            for d in range(np_):
                s = pm.sigma[d]
                if known[d] and not known[s] and not covered_wedge[d]:
                    covered_wedge[d] = True
                    plan.append(("sbranch", d, s))
                    known[s] = True
                    frontier.append(s)
                    picked = True
                    break
            if not picked:  # pragma: no cover - connectivity guarantees progress
                raise PatternError("disconnected pattern dart structure")

    results: list[Occurrence] = []
    seen_keys: set = set()
    emb = [-1] * np_
    used = [False] * nh

    def backtrack(step: int) -> None:
        if step == len(plan):
            finish()
            return
        kind, src, dst = plan[step]
        hs = emb[src]
        if kind == "alpha":
            hd = host.alpha[hs]
            if used[hd]:
                return
            emb[dst] = hd
            used[hd] = True
            backtrack(step + 1)
            used[hd] = False
            emb[dst] = -1
        elif kind == "acheck":
            if host.alpha[hs] == emb[dst]:
                backtrack(step + 1)
        elif kind == "sigma":
            hd = host.sigma[hs]
            if used[hd]:
                return
            emb[dst] = hd
            used[hd] = True
            backtrack(step + 1)
            used[hd] = False
            emb[dst] = -1
        elif kind == "scheck":
            if host.sigma[hs] == emb[dst]:
                backtrack(step + 1)
        else:  # sbranch: any strictly later dart around the same host vertex
            hd = host.sigma[hs]
            while hd != hs:
                if not used[hd]:
                    emb[dst] = hd
                    used[hd] = True
                    backtrack(step + 1)
                    used[hd] = False
                    emb[dst] = -1
                hd = host.sigma[hd]

    def finish() -> None:
        # vertex injectivity and winding exactly one per pattern vertex
        pvid = pm.vertex_of
        hvid = host.vertex_of
        vmap: dict[int, int] = {}
        for d in range(np_):
            pv = pvid[d]
            hv = hvid[emb[d]]
            if pv in vmap:
                if vmap[pv] != hv:
                    return
            else:
                vmap[pv] = hv
        if len(set(vmap.values())) != len(vmap):
            return
        # winding: sum of sigma-gaps around each pattern vertex equals degree
        degs: dict[int, int] = {}
        for d in range(nh):
            degs[hvid[d]] = degs.get(hvid[d], 0) + 1
        gap_sum: dict[int, int] = {}
        for d in range(np_):
            s = pm.sigma[d]
            t = _sigma_distance(host, emb[d], emb[s])
            if t is None:
                return
            if t == 0 and s != d:
                return
            if s == d:
                t = degs[hvid[emb[d]]]
            gap_sum[pvid[d]] = gap_sum.get(pvid[d], 0) + (t if t > 0 else degs[hvid[emb[d]]])
        for pv, tot in gap_sum.items():
            if tot != degs[vmap[pv]]:
                return
        # interior faces map onto full host faces, none of them the root face
        ifaces = set()
        for fidx, cyc in enumerate(pfi.faces):
            if fidx == pfi.root_face:
                continue
            hface = hfi.face_of[emb[cyc[0]]]
            if hfi.valency[hface] != len(cyc):
                return
            for d in cyc:
                if hfi.face_of[emb[d]] != hface:
                    return
            ifaces.add(hface)
        if host_root_face in ifaces:
            return
        key = (frozenset(emb), frozenset(ifaces))
        if key in seen_keys:
            return
        seen_keys.add(key)
        results.append(
            Occurrence(
                host=host,
                dart_image=frozenset(emb),
                interior_faces=frozenset(ifaces),
                embedding=tuple(emb),
            )
        )

    for h0 in range(nh):
        if used[h0]:
            continue
        emb[0] = h0
        used[h0] = True
        backtrack(0)
        used[h0] = False
        emb[0] = -1
    return results


def count_occurrences(host: RootedMap, p: Pattern) -> int:
    return len(find_occurrences(host, p))


def occurrences_intersect(o1: Occurrence, o2: Occurrence) -> bool:
    if o1.host is not o2.host and o1.host != o2.host:
        raise PatternError("occurrences live in different hosts")
    if o1.interior_faces & o2.interior_faces:
        return True
    host = o1.host
    vid = host.vertex_of
    darts1: dict[int, set[int]] = {}
    darts2: dict[int, set[int]] = {}
    for d in o1.dart_image:
        darts1.setdefault(vid[d], set()).add(d)
    for d in o2.dart_image:
        darts2.setdefault(vid[d], set()).add(d)
    for c in set(darts1) & set(darts2):
        s1 = darts1[c]
        s2 = darts2[c]
        ex1 = s1 - s2
        ex2 = s2 - s1
        if not ex1 or not ex2:
            continue
        # walk the rotation at c once; count maximal runs of exclusive marks
        d0 = next(iter(s1 | s2))
        marks = []
        d = d0
        while True:
            if d in ex1:
                marks.append(1)
            elif d in ex2:
                marks.append(2)
            d = host.sigma[d]
            if d == d0:
                break
        trans = 0
        for i, m in enumerate(marks):
            if m != marks[(i + 1) % len(marks)]:
                trans += 1
        if trans >= 4:
            return True
    return False


# ---------------------------------------------------------------------------
# intersection types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntersectionType:
    """A rotation class of rooted maps covered by two intersecting occurrences."""

    representative: RootedMap
    pair: tuple[frozenset[int], frozenset[int]]  # dart images in the representative
    r: int
    e: int
    v: int
    deep_faces: tuple[tuple[int, int], ...]  # (valency, multiplicity), sorted
    pair_interiors: tuple[tuple[frozenset[int], ...], tuple[frozenset[int], ...]] = ((), ())

    def deep_face_dict(self) -> dict[int, int]:
        return dict(self.deep_faces)


def _marked_key(m: RootedMap, o1: Occurrence, o2: Occurrence):
    """Canonical key of (rooted map, unordered occurrence pair)."""
    n = m.n_darts
    lab = [-1] * n
    order = [m.root]
    lab[m.root] = 0
    i = 0
    while i < len(order):
        d = order[i]
        i += 1
        for e in (m.sigma[d], m.alpha[d]):
            if lab[e] < 0:
                lab[e] = len(order)
                order.append(e)
    code = m.canonical_code()
    fi = m.faces()

    def occ_key(o: Occurrence):
        face_reprs = tuple(
            sorted(tuple(sorted(lab[d] for d in fi.faces[f])) for f in o.interior_faces)
        )
        return (tuple(sorted(lab[d] for d in o.dart_image)), face_reprs)

    pair = tuple(sorted([occ_key(o1), occ_key(o2)]))
    return (code, pair)


def enumerate_intersection_types(p: Pattern, cls: MapClass = MapClass.ALL, max_edges: int | None = None) -> list[IntersectionType]:
    """Brute-force enumeration of the intersection types of p.

    Scans every rooted map of the class with at most 2e edges (e = pattern
    edges), finds all unordered intersecting occurrence pairs covering the
    whole map, and groups them by their rotation class.  The group size is
    the number r_i of pairwise non-isomorphic rotations.
    """
    from .enumeration import _occurrence_counts, generate

    cap = 2 * p.e if max_edges is None else max_edges
    groups: dict = {}
    for n in range(1, cap + 1):
        run = generate(n, cls)
        counts = _occurrence_counts(n, cls, p)
        for idx in (counts >= 2).nonzero()[0]:
            m = run.map_at(int(idx))
            occs = find_occurrences(m, p)
            edge_sets = [o.edges() for o in occs]
            for i in range(len(occs)):
                for j in range(i + 1, len(occs)):
                    if len(edge_sets[i] | edge_sets[j]) != m.n_edges:
                        continue
                    if not occurrences_intersect(occs[i], occs[j]):
                        continue
                    _record_type(groups, m, occs[i], occs[j])
    out = []
    for key, info in sorted(groups.items(), key=lambda kv: (kv[1]["e"], kv[1]["v"], kv[0])):
        out.append(
            IntersectionType(
                representative=info["rep"],
                pair=info["pair"],
                r=len(info["rooted"]),
                e=info["e"],
                v=info["v"],
                deep_faces=info["deep"],
                pair_interiors=info["interiors"],
            )
        )
    return out


def _record_type(groups: dict, m: RootedMap, o1: Occurrence, o2: Occurrence) -> None:
    fi = m.faces()
    orbit = fi.faces[fi.root_face]
    rooted_keys = set()
    best = None
    for d in orbit:
        mm = m.rerooted(d)
        # occurrences carry over verbatim: interior faces keep their ids
        k = _marked_key(mm, o1, o2)
        rooted_keys.add(k)
        if best is None or k < best:
            best = k
    bucket = groups.get(best)
    if bucket is None:
        interior = o1.interior_faces | o2.interior_faces
        deep: dict[int, int] = {}
        for f in range(len(fi.faces)):
            if f == fi.root_face or f in interior:
                continue
            val = fi.valency[f]
            deep[val] = deep.get(val, 0) + 1
        groups[best] = {
            "rep": m,
            "pair": (o1.dart_image, o2.dart_image),
            "interiors": (
                tuple(frozenset(fi.faces[f]) for f in sorted(o1.interior_faces)),
                tuple(frozenset(fi.faces[f]) for f in sorted(o2.interior_faces)),
            ),
            "rooted": rooted_keys,
            "e": m.n_edges,
            "v": fi.valency[fi.root_face],
            "deep": tuple(sorted(deep.items())),
        }
    else:
        bucket["rooted"] |= rooted_keys


# ---------------------------------------------------------------------------
# contraction families (the paper-figure style merged listing)
# ---------------------------------------------------------------------------


def _contract_once(sigma: list, alpha: list, d1: int, d2: int, marks: list[set]):
    """Contract the 2-gon face (d1, d2); mutates copies and returns dense arrays.

    marks is a list of dart sets (occurrence darts and interior-face dart
    sets) rewritten in place to the new labelling.
    """
    a1, a2 = alpha[d1], alpha[d2]
    for gone in (d1, d2):
        prev = gone
        while sigma[prev] != gone:
            prev = sigma[prev]
        sigma[prev] = sigma[gone]
    alpha[a1] = a2
    alpha[a2] = a1
    drop = {d1, d2}
    remap = {}
    nxt = 0
    for d in range(len(sigma)):
        if d not in drop:
            remap[d] = nxt
            nxt += 1
    new_sigma = [0] * nxt
    new_alpha = [0] * nxt
    for d, nd in remap.items():
        new_sigma[nd] = remap[sigma[d]]
        new_alpha[nd] = remap[alpha[d]]
    for s in marks:
        updated = set()
        for d in s:
            if d == d1:
                updated.add(remap[a2])
            elif d == d2:
                updated.add(remap[a1])
            else:
                updated.add(remap[d])
        s.clear()
        s.update(updated)
    return new_sigma, new_alpha


def _contracted_union(t: IntersectionType):
    sigma = list(t.representative.sigma)
    alpha = list(t.representative.alpha)
    o1d = set(t.pair[0])
    o2d = set(t.pair[1])
    o1f = [set(f) for f in t.pair_interiors[0]]
    o2f = [set(f) for f in t.pair_interiors[1]]
    while True:
        mm = RootedMap(sigma, alpha, 0)
        fi = mm.faces()
        interior = set()
        for f in o1f + o2f:
            interior |= f
        target = None
        for cyc in fi.faces:
            if len(cyc) != 2:
                continue
            d1, d2 = cyc
            if d1 in interior or d2 in interior or alpha[d1] == d2:
                continue
            target = (d1, d2)
            break
        if target is None:
            return mm, frozenset(o1d), o1f, frozenset(o2d), o2f
        marks = [o1d, o2d] + o1f + o2f
        sigma, alpha = _contract_once(sigma, alpha, target[0], target[1], marks)


def _unrooted_pair_key(m: RootedMap, o1d, o1f, o2d, o2f):
    """Canonical key of the union with its marked pair, over all valid roots."""
    interior_darts = set()
    for f in list(o1f) + list(o2f):
        interior_darts |= set(f)
    best = None
    for d in range(m.n_darts):
        if d in interior_darts:
            continue  # rooting inside an interior face invalidates the pair
        mm = m.rerooted(d)
        lab = [-1] * mm.n_darts
        order = [d]
        lab[d] = 0
        i = 0
        while i < len(order):
            x = order[i]
            i += 1
            for e in (mm.sigma[x], mm.alpha[x]):
                if lab[e] < 0:
                    lab[e] = len(order)
                    order.append(e)
        code = mm.canonical_code()

        def okey(darts, faces):
            return (
                tuple(sorted(lab[t] for t in darts)),
                tuple(sorted(tuple(sorted(lab[t] for t in f)) for f in faces)),
            )

        key = (code, tuple(sorted([okey(o1d, o1f), okey(o2d, o2f)])))
        if best is None or key < best:
            best = key
    return best


def merge_type_families(types: list[IntersectionType]) -> list[tuple[int, ...]]:
    """Group intersection types under deep-2-gon contraction and re-rooting.

    Returns sorted index tuples into ``types``.  This merged view is the
    paper-figure style listing ("deep faces of valency 2 are allowed to
    contract to a single edge"), whereas the full rooted list is what the
    functional equation consumes.
    """
    fams: dict = {}
    for idx, t in enumerate(types):
        mm, o1d, o1f, o2d, o2f = _contracted_union(t)
        key = _unrooted_pair_key(mm, o1d, o1f, o2d, o2f)
        fams.setdefault(key, []).append(idx)
    return sorted(tuple(sorted(v)) for v in fams.values())


# ---------------------------------------------------------------------------
# serialization of type lists (types.json schema)
# ---------------------------------------------------------------------------


def types_to_json(types: list[IntersectionType]) -> list[dict]:
    return [
        {
            "representative": to_text(t.representative),
            "r": t.r,
            "e": t.e,
            "v": t.v,
            "deep_faces": [[val, mult] for val, mult in t.deep_faces],
        }
        for t in types
    ]


def types_from_json(data: list[dict]) -> list[IntersectionType]:
    out = []
    for d in data:
        out.append(
            IntersectionType(
                representative=from_text(d["representative"]),
                pair=(frozenset(), frozenset()),
                r=int(d["r"]),
                e=int(d["e"]),
                v=int(d["v"]),
                deep_faces=tuple((int(a), int(b)) for a, b in d["deep_faces"]),
            )
        )
    return out
