"""Hot loops behind the enumerator and the distribution pipeline.

Maps of n >= 1 edges travel through these kernels as uint8 rows of length
4n: the canonically relabelled sigma array followed by the alpha array (the
root dart is always 0).  Kernels are compiled with numba when available; set
``PLANARMAPS_NUMBA=0`` to run the identical source uncompiled (bit-identical
results, much slower -- the acceptance-scale runs want the JIT).

Generation uses the canonical-parent rule: a candidate child produced by
inserting an edge is kept iff the inserted edge is the child's canonical
deletion edge (the deletable non-root edge whose darts carry the largest BFS
label).  Rooted maps are rigid, so every child is kept exactly once and no
global dedup set is needed.
"""

from __future__ import annotations

import os

import numpy as np

_WANT_JIT = os.environ.get("PLANARMAPS_NUMBA", "1") != "0"

try:
    if not _WANT_JIT:
        raise ImportError
    from numba import njit, prange, set_num_threads  # noqa: F401

    USING_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag
    USING_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap

    def set_num_threads(n):  # noqa: ARG001
        return None


def threading_enabled() -> bool:
    return USING_NUMBA


# ---------------------------------------------------------------------------
# small per-map helpers (operate on int32 scratch arrays)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _face_of(sigma, alpha, D, face_of):
    """Label phi-orbits (phi(d) = sigma[alpha[d]]); returns face count."""
    for d in range(D):
        face_of[d] = -1
    nf = 0
    for d in range(D):
        if face_of[d] < 0:
            e = d
            while face_of[e] < 0:
                face_of[e] = nf
                e = sigma[alpha[e]]
            nf += 1
    return nf


@njit(cache=True)
def _vertex_of(sigma, D, vid):
    for d in range(D):
        vid[d] = -1
    nv = 0
    for d in range(D):
        if vid[d] < 0:
            e = d
            while vid[e] < 0:
                vid[e] = nv
                e = sigma[e]
            nv += 1
    return nv


@njit(cache=True)
def _canon_code(sigma, alpha, D, lab, order, out_row):
    """BFS relabelling from dart 0; writes sigma'||alpha' into out_row."""
    for d in range(D):
        lab[d] = -1
    lab[0] = 0
    order[0] = 0
    filled = 1
    i = 0
    while i < filled:
        d = order[i]
        i += 1
        e = sigma[d]
        if lab[e] < 0:
            lab[e] = filled
            order[filled] = e
            filled += 1
        e = alpha[d]
        if lab[e] < 0:
            lab[e] = filled
            order[filled] = e
            filled += 1
    for d in range(D):
        out_row[lab[d]] = lab[sigma[d]]
        out_row[D + lab[d]] = lab[alpha[d]]


@njit(cache=True)
def _build_csr(alpha, vid, nv, D, vdeg, vptr, vadj_dart):
    """CSR adjacency: per vertex the incident darts (loops appear twice)."""
    for v in range(nv):
        vdeg[v] = 0
    for d in range(D):
        vdeg[vid[d]] += 1
    acc = 0
    for v in range(nv):
        vptr[v] = acc
        acc += vdeg[v]
    vptr[nv] = acc
    fill = vptr[: nv + 1].copy()
    for d in range(D):
        v = vid[d]
        vadj_dart[fill[v]] = d
        fill[v] += 1


@njit(cache=True)
def _bridges(alpha, vid, nv, D, vptr, vadj_dart, disc, low, pe, stk_v, stk_i, is_bridge):
    """Mark bridge darts of a connected multigraph (loops are never bridges)."""
    for d in range(D):
        is_bridge[d] = False
    for v in range(nv):
        disc[v] = -1
    timer = 0
    v0 = vid[0]
    disc[v0] = 0
    low[v0] = 0
    pe[v0] = -1
    timer = 1
    sp = 0
    stk_v[0] = v0
    stk_i[0] = vptr[v0]
    while sp >= 0:
        v = stk_v[sp]
        i = stk_i[sp]
        if i < vptr[v + 1]:
            stk_i[sp] = i + 1
            d = vadj_dart[i]
            eid = d if d < alpha[d] else alpha[d]
            if eid == pe[v]:
                continue
            w = vid[alpha[d]]
            if w == v:
                continue  # loop
            if disc[w] < 0:
                disc[w] = timer
                low[w] = timer
                timer += 1
                pe[w] = eid
                sp += 1
                stk_v[sp] = w
                stk_i[sp] = vptr[w]
            else:
                if disc[w] < low[v]:
                    low[v] = disc[w]
        else:
            sp -= 1
            if sp >= 0:
                u = stk_v[sp]
                if low[v] < low[u]:
                    low[u] = low[v]
                if low[v] > disc[u]:
                    e = pe[v]
                    is_bridge[e] = True
                    is_bridge[alpha[e]] = True


@njit(cache=True)
def _two_connected_minus(alpha, vid, nv, D, vptr, vadj_dart, skip_eid, disc, low, pe, stk_v, stk_i):
    """True iff the (loopless, connected) graph minus edge ``skip_eid`` is
    connected with no cut vertex.  skip_eid = -1 tests the graph itself."""
    for v in range(nv):
        disc[v] = -1
    v0 = vid[0]
    if skip_eid >= 0:
        # start somewhere guaranteed to keep degree >= 1 (min degree 2 before)
        v0 = vid[0]
    disc[v0] = 0
    low[v0] = 0
    pe[v0] = -1
    timer = 1
    visited = 1
    root_children = 0
    sp = 0
    stk_v[0] = v0
    stk_i[0] = vptr[v0]
    ok = True
    while sp >= 0:
        v = stk_v[sp]
        i = stk_i[sp]
        if i < vptr[v + 1]:
            stk_i[sp] = i + 1
            d = vadj_dart[i]
            eid = d if d < alpha[d] else alpha[d]
            if eid == skip_eid or eid == pe[v]:
                continue
            w = vid[alpha[d]]
            if w == v:
                ok = False  # loop: never 2-connected here
                break
            if disc[w] < 0:
                disc[w] = timer
                low[w] = timer
                timer += 1
                visited += 1
                pe[w] = eid
                if v == v0:
                    root_children += 1
                sp += 1
                stk_v[sp] = w
                stk_i[sp] = vptr[w]
            else:
                if disc[w] < low[v]:
                    low[v] = disc[w]
        else:
            sp -= 1
            if sp >= 0:
                u = stk_v[sp]
                if low[v] < low[u]:
                    low[u] = low[v]
                if u != v0 and low[v] >= disc[u]:
                    ok = False
                    break
    if not ok:
        return False
    if visited != nv:
        return False
    if root_children >= 2:
        return False
    return True


@njit(cache=True)
def _is_bipartite_graph(alpha, vid, nv, D, vptr, vadj_dart, color, stk):
    for v in range(nv):
        color[v] = -1
    color[vid[0]] = 0
    sp = 0
    stk[0] = vid[0]
    while sp >= 0:
        v = stk[sp]
        sp -= 1
        for i in range(vptr[v], vptr[v + 1]):
            d = vadj_dart[i]
            w = vid[alpha[d]]
            if w == v:
                return False  # loop
            if color[w] < 0:
                color[w] = 1 - color[v]
                sp += 1
                stk[sp] = w
            elif color[w] == color[v]:
                return False
    return True


# ---------------------------------------------------------------------------
# generation: All / Bipartite
# ---------------------------------------------------------------------------


@njit(cache=True)
def _count_candidates(parents, counts):
    P = parents.shape[0]
    D = parents.shape[1] // 2
    sigma = np.empty(D, np.int32)
    alpha = np.empty(D, np.int32)
    face = np.empty(D, np.int32)
    fsize = np.empty(D + 2, np.int32)
    for p in range(P):
        for d in range(D):
            sigma[d] = parents[p, d]
            alpha[d] = parents[p, D + d]
        nf = _face_of(sigma, alpha, D, face)
        for f in range(nf):
            fsize[f] = 0
        for d in range(D):
            fsize[face[d]] += 1
        c = 2 * D  # pendants + trivial loops
        for f in range(nf):
            c += fsize[f] * (fsize[f] - 1) // 2
        counts[p] = c


@njit(cache=True)
def _accept_new_edge(sigma2, alpha2, Dc, lab, order, vid, vdeg, vptr, vadj, disc, low, pe, stk_v, stk_i, is_bridge, row):
    """Canonicalize the child and test the canonical-parent rule.

    Returns True iff the freshly inserted edge (darts Dc-2, Dc-1) is the
    deletable non-root edge with maximal canonical dart label.  Fills ``row``
    with the canonical code when accepted.
    """
    _canon_code(sigma2, alpha2, Dc, lab, order, row)
    nv = _vertex_of(sigma2, Dc, vid)
    _build_csr(alpha2, vid, nv, Dc, vdeg, vptr, vadj)
    _bridges(alpha2, vid, nv, Dc, vptr, vadj, disc, low, pe, stk_v, stk_i, is_bridge)
    A = Dc - 2
    key_new = lab[A] if lab[A] > lab[A + 1] else lab[A + 1]
    root_eid = 0 if 0 < alpha2[0] else alpha2[0]
    for d in range(Dc):
        a = alpha2[d]
        if d > a:
            continue
        if d == root_eid:
            continue
        key = lab[d] if lab[d] > lab[a] else lab[a]
        if key <= key_new:
            continue
        # deletable = non-bridge, or pendant (an endpoint of degree 1)
        if not is_bridge[d]:
            return False
        if vdeg[vid[d]] == 1 or vdeg[vid[a]] == 1:
            return False
    return True


@njit(cache=True, parallel=True)
def _gen_children(parents, offsets, out, keep, bip_prune):
    P = parents.shape[0]
    D = parents.shape[1] // 2
    Dc = D + 2
    for p in prange(P):
        sigma = np.empty(D, np.int32)
        alpha = np.empty(D, np.int32)
        face = np.empty(D, np.int32)
        sigma2 = np.empty(Dc, np.int32)
        alpha2 = np.empty(Dc, np.int32)
        lab = np.empty(Dc, np.int32)
        order = np.empty(Dc, np.int32)
        vid = np.empty(Dc, np.int32)
        vdeg = np.empty(Dc + 1, np.int32)
        vptr = np.empty(Dc + 2, np.int32)
        vadj = np.empty(Dc, np.int32)
        disc = np.empty(Dc + 1, np.int32)
        low = np.empty(Dc + 1, np.int32)
        pe = np.empty(Dc + 1, np.int32)
        stk_v = np.empty(Dc + 1, np.int32)
        stk_i = np.empty(Dc + 1, np.int32)
        is_bridge = np.empty(Dc, np.bool_)
        color = np.empty(Dc + 1, np.int32)
        row = np.empty(2 * Dc, np.int32)
        for d in range(D):
            sigma[d] = parents[p, d]
            alpha[d] = parents[p, D + d]
        _face_of(sigma, alpha, D, face)
        slot = offsets[p]
        A = D
        B = D + 1
        for d in range(D):
            alpha2[d] = alpha[d]
        alpha2[A] = B
        alpha2[B] = A
        # pendants
        for d1 in range(D):
            for d in range(D):
                sigma2[d] = sigma[d]
            sigma2[d1] = A
            sigma2[A] = sigma[d1]
            sigma2[B] = B
            ok = _accept_new_edge(sigma2, alpha2, Dc, lab, order, vid, vdeg, vptr, vadj, disc, low, pe, stk_v, stk_i, is_bridge, row)
            if ok and bip_prune:
                nv = _vertex_of(sigma2, Dc, vid)
                _build_csr(alpha2, vid, nv, Dc, vdeg, vptr, vadj)
                ok = _is_bipartite_graph(alpha2, vid, nv, Dc, vptr, vadj, color, stk_v)
            if ok:
                for t in range(2 * Dc):
                    out[slot, t] = row[t]
                keep[slot] = True
            slot += 1
        # trivial loops
        for d1 in range(D):
            for d in range(D):
                sigma2[d] = sigma[d]
            sigma2[d1] = A
            sigma2[A] = B
            sigma2[B] = sigma[d1]
            ok = False
            if not bip_prune:  # a loop is an odd cycle
                ok = _accept_new_edge(sigma2, alpha2, Dc, lab, order, vid, vdeg, vptr, vadj, disc, low, pe, stk_v, stk_i, is_bridge, row)
            if ok:
                for t in range(2 * Dc):
                    out[slot, t] = row[t]
                keep[slot] = True
            slot += 1
        # edges between two corners of a common face
        for d1 in range(D):
            for d2 in range(d1 + 1, D):
                if face[sigma[d1]] != face[sigma[d2]]:
                    continue
                for d in range(D):
                    sigma2[d] = sigma[d]
                sigma2[d1] = A
                sigma2[A] = sigma[d1]
                sigma2[d2] = B
                sigma2[B] = sigma[d2]
                ok = _accept_new_edge(sigma2, alpha2, Dc, lab, order, vid, vdeg, vptr, vadj, disc, low, pe, stk_v, stk_i, is_bridge, row)
                if ok and bip_prune:
                    nv = _vertex_of(sigma2, Dc, vid)
                    _build_csr(alpha2, vid, nv, Dc, vdeg, vptr, vadj)
                    ok = _is_bipartite_graph(alpha2, vid, nv, Dc, vptr, vadj, color, stk_v)
                if ok:
                    for t in range(2 * Dc):
                        out[slot, t] = row[t]
                    keep[slot] = True
                slot += 1


def gen_children(parents: np.ndarray, bip_prune: bool = False) -> np.ndarray:
    """All (n+1)-edge children of the given canonical n-edge parent rows."""
    P, W = parents.shape
    D = W // 2
    counts = np.empty(P, np.int64)
    _count_candidates(parents, counts)
    offsets = np.zeros(P, np.int64)
    if P > 1:
        offsets[1:] = np.cumsum(counts)[:-1]
    total = int(counts.sum())
    out = np.zeros((total, 2 * (D + 2)), np.uint8)
    keep = np.zeros(total, np.bool_)
    _gen_children(parents, offsets, out, keep, bip_prune)
    return out[keep]


# ---------------------------------------------------------------------------
# generation: 2-connected (insertions + subdivisions inside the class)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _count_candidates_2c(parents, counts):
    P = parents.shape[0]
    D = parents.shape[1] // 2
    sigma = np.empty(D, np.int32)
    alpha = np.empty(D, np.int32)
    face = np.empty(D, np.int32)
    fsize = np.empty(D + 2, np.int32)
    for p in range(P):
        for d in range(D):
            sigma[d] = parents[p, d]
            alpha[d] = parents[p, D + d]
        nf = _face_of(sigma, alpha, D, face)
        for f in range(nf):
            fsize[f] = 0
        for d in range(D):
            fsize[face[d]] += 1
        c = D // 2  # subdivisions
        for f in range(nf):
            c += fsize[f] * (fsize[f] - 1) // 2
        counts[p] = c


@njit(cache=True)
def _canonical_reduction_is(sigma2, alpha2, Dc, new_is_edge, marker, lab, order, vid, vdeg, vptr, vadj, disc, low, pe, stk_v, stk_i, row):
    """Canonical-parent test inside the 2-connected class.

    Reduction rule on a child with >= 3 edges: if some non-root edge e keeps
    the map 2-connected after deletion, remove the one with maximal canonical
    dart label (R1); otherwise contract an edge at the degree-2 vertex with
    maximal canonical dart label (R2).  ``new_is_edge`` selects which kind of
    candidate is being tested and ``marker`` is the inserted edge's smaller
    dart (R1) or the fresh vertex's dart (R2).
    """
    _canon_code(sigma2, alpha2, Dc, lab, order, row)
    nv = _vertex_of(sigma2, Dc, vid)
    _build_csr(alpha2, vid, nv, Dc, vdeg, vptr, vadj)
    root_eid = 0 if 0 < alpha2[0] else alpha2[0]
    best_key = -1
    best_eid = -1
    for d in range(Dc):
        a = alpha2[d]
        if d > a or d == root_eid:
            continue
        if _two_connected_minus(alpha2, vid, nv, Dc, vptr, vadj, d, disc, low, pe, stk_v, stk_i):
            key = lab[d] if lab[d] > lab[a] else lab[a]
            if key > best_key:
                best_key = key
                best_eid = d
    if new_is_edge:
        return best_eid == marker
    if best_eid >= 0:
        return False  # (R1) applies, subdivision candidates lose
    # (R2): degree-2 vertex with maximal canonical dart label
    best_key = -1
    best_v = -1
    for v in range(nv):
        if vptr[v + 1] - vptr[v] != 2:
            continue
        key = -1
        for i in range(vptr[v], vptr[v + 1]):
            d = vadj_d = vadj[i]
            if lab[vadj_d] > key:
                key = lab[vadj_d]
        if key > best_key:
            best_key = key
            best_v = v
    return best_v == vid[marker]


@njit(cache=True, parallel=True)
def _gen_children_2c(parents, offsets, out, keep):
    P = parents.shape[0]
    D = parents.shape[1] // 2
    Dc = D + 2
    for p in prange(P):
        sigma = np.empty(D, np.int32)
        alpha = np.empty(D, np.int32)
        face = np.empty(D, np.int32)
        vidp = np.empty(D, np.int32)
        sigma2 = np.empty(Dc, np.int32)
        alpha2 = np.empty(Dc, np.int32)
        lab = np.empty(Dc, np.int32)
        order = np.empty(Dc, np.int32)
        vid = np.empty(Dc, np.int32)
        vdeg = np.empty(Dc + 1, np.int32)
        vptr = np.empty(Dc + 2, np.int32)
        vadj = np.empty(Dc, np.int32)
        disc = np.empty(Dc + 1, np.int32)
        low = np.empty(Dc + 1, np.int32)
        pe = np.empty(Dc + 1, np.int32)
        stk_v = np.empty(Dc + 1, np.int32)
        stk_i = np.empty(Dc + 1, np.int32)
        row = np.empty(2 * Dc, np.int32)
        for d in range(D):
            sigma[d] = parents[p, d]
            alpha[d] = parents[p, D + d]
        _face_of(sigma, alpha, D, face)
        _vertex_of(sigma, D, vidp)
        slot = offsets[p]
        A = D
        B = D + 1
        # corner-pair insertions (loops excluded: same-vertex pairs skipped)
        for d1 in range(D):
            for d2 in range(d1 + 1, D):
                if face[sigma[d1]] != face[sigma[d2]] or vidp[d1] == vidp[d2]:
                    continue
                for d in range(D):
                    sigma2[d] = sigma[d]
                    alpha2[d] = alpha[d]
                sigma2[d1] = A
                sigma2[A] = sigma[d1]
                sigma2[d2] = B
                sigma2[B] = sigma[d2]
                alpha2[A] = B
                alpha2[B] = A
                if _canonical_reduction_is(sigma2, alpha2, Dc, True, A, lab, order, vid, vdeg, vptr, vadj, disc, low, pe, stk_v, stk_i, row):
                    for t in range(2 * Dc):
                        out[slot, t] = row[t]
                    keep[slot] = True
                slot += 1
        # subdivisions (root edge included; the root dart keeps its half)
        for e in range(D):
            if e > alpha[e]:
                continue
            eb = alpha[e]
            for d in range(D):
                sigma2[d] = sigma[d]
                alpha2[d] = alpha[d]
            sigma2[A] = B
            sigma2[B] = A
            alpha2[e] = A
            alpha2[A] = e
            alpha2[B] = eb
            alpha2[eb] = B
            if _canonical_reduction_is(sigma2, alpha2, Dc, False, A, lab, order, vid, vdeg, vptr, vadj, disc, low, pe, stk_v, stk_i, row):
                for t in range(2 * Dc):
                    out[slot, t] = row[t]
                keep[slot] = True
            slot += 1


def gen_children_2conn(parents: np.ndarray) -> np.ndarray:
    P, W = parents.shape
    D = W // 2
    counts = np.empty(P, np.int64)
    _count_candidates_2c(parents, counts)
    offsets = np.zeros(P, np.int64)
    if P > 1:
        offsets[1:] = np.cumsum(counts)[:-1]
    total = int(counts.sum())
    out = np.zeros((total, 2 * (D + 2)), np.uint8)
    keep = np.zeros(total, np.bool_)
    _gen_children_2c(parents, offsets, out, keep)
    return out[keep]


# ---------------------------------------------------------------------------
# per-map batch statistics
# ---------------------------------------------------------------------------


@njit(cache=True)
def _class_flags(rows, which, flags):
    """which: 0 = bipartite (all face valencies even), 1 = two-connected."""
    N = rows.shape[0]
    D = rows.shape[1] // 2
    sigma = np.empty(D, np.int32)
    alpha = np.empty(D, np.int32)
    face = np.empty(D, np.int32)
    fsize = np.empty(D + 2, np.int32)
    vid = np.empty(D, np.int32)
    vdeg = np.empty(D + 1, np.int32)
    vptr = np.empty(D + 2, np.int32)
    vadj = np.empty(D, np.int32)
    disc = np.empty(D + 1, np.int32)
    low = np.empty(D + 1, np.int32)
    pe = np.empty(D + 1, np.int32)
    stk_v = np.empty(D + 1, np.int32)
    stk_i = np.empty(D + 1, np.int32)
    for r in range(N):
        for d in range(D):
            sigma[d] = rows[r, d]
            alpha[d] = rows[r, D + d]
        if which == 0:
            nf = _face_of(sigma, alpha, D, face)
            for f in range(nf):
                fsize[f] = 0
            for d in range(D):
                fsize[face[d]] += 1
            ok = True
            for f in range(nf):
                if fsize[f] % 2 == 1:
                    ok = False
                    break
            flags[r] = ok
        else:
            if D < 4:
                flags[r] = False
                continue
            nv = _vertex_of(sigma, D, vid)
            _build_csr(alpha, vid, nv, D, vdeg, vptr, vadj)
            flags[r] = _two_connected_minus(alpha, vid, nv, D, vptr, vadj, -1, disc, low, pe, stk_v, stk_i)
    return flags


def class_flags(rows: np.ndarray, which: str) -> np.ndarray:
    flags = np.zeros(rows.shape[0], np.bool_)
    _class_flags(rows, 0 if which == "bipartite" else 1, flags)
    return flags


@njit(cache=True)
def _degree_stats(rows, maxdeg):
    N = rows.shape[0]
    D = rows.shape[1] // 2
    sigma = np.empty(D, np.int32)
    vid = np.empty(D, np.int32)
    cnt = np.empty(D + 1, np.int32)
    for r in range(N):
        for d in range(D):
            sigma[d] = rows[r, d]
        nv = _vertex_of(sigma, D, vid)
        for v in range(nv):
            cnt[v] = 0
        for d in range(D):
            cnt[vid[d]] += 1
        m = 0
        for v in range(nv):
            if cnt[v] > m:
                m = cnt[v]
        maxdeg[r] = m


def degree_stats_batch(rows: np.ndarray) -> np.ndarray:
    out = np.zeros(rows.shape[0], np.int32)
    _degree_stats(rows, out)
    return out


@njit(cache=True)
def _psb_profile(rows, valency_out, prefix_out):
    """Root-face valency and the largest i with a partial simple boundary."""
    N = rows.shape[0]
    D = rows.shape[1] // 2
    sigma = np.empty(D, np.int32)
    alpha = np.empty(D, np.int32)
    vid = np.empty(D, np.int32)
    used_edge = np.empty(D, np.bool_)
    used_vert = np.empty(D + 1, np.bool_)
    for r in range(N):
        for d in range(D):
            sigma[d] = rows[r, d]
            alpha[d] = rows[r, D + d]
        _vertex_of(sigma, D, vid)
        # root face valency
        val = 0
        d = 0
        while True:
            val += 1
            d = sigma[alpha[d]]
            if d == 0:
                break
        valency_out[r] = val
        for e in range(D):
            used_edge[e] = False
        for v in range(D + 1):
            used_vert[v] = False
        used_vert[vid[0]] = True
        d = 0
        steps = 0
        for _ in range(val):
            e = d if d < alpha[d] else alpha[d]
            w = vid[alpha[d]]
            if used_edge[e] or used_vert[w]:
                break
            used_edge[e] = True
            used_vert[w] = True
            steps += 1
            d = sigma[alpha[d]]
        prefix_out[r] = steps


def psb_profile(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    val = np.zeros(rows.shape[0], np.int32)
    pre = np.zeros(rows.shape[0], np.int32)
    _psb_profile(rows, val, pre)
    return val, pre


@njit(cache=True)
def _root_valency(rows, valency_out):
    N = rows.shape[0]
    D = rows.shape[1] // 2
    for r in range(N):
        val = 0
        d = 0
        while True:
            val += 1
            d = rows[r, rows[r, D + d]]
            if d == 0:
                break
        valency_out[r] = val


def root_valencies(rows: np.ndarray) -> np.ndarray:
    out = np.zeros(rows.shape[0], np.int64)
    _root_valency(rows, out)
    return out


# ---------------------------------------------------------------------------
# fly pattern statistics
# ---------------------------------------------------------------------------
#
# A fly occurrence in a host is an unordered pair of distinct 2-gon faces
# {F, G} such that F and G have disjoint edge sets, each has two distinct
# endpoints, exactly one vertex is shared, and neither is the root face.
# Two occurrences intersect iff they share a face or their (equal) pinch
# vertices carry interleaved exclusive darts; see patterns.occurrences_intersect
# for the reference implementation this kernel mirrors.

MAX_OCC = 128


@njit(cache=True)
def _fly_stats(rows, out_counts, out_pairs3, want_triples):
    """Per map: occurrence count X; if want_triples, also the number of
    3-subsets of occurrences whose induced intersection graph has <= 1 edge."""
    N = rows.shape[0]
    D = rows.shape[1] // 2
    sigma = np.empty(D, np.int32)
    alpha = np.empty(D, np.int32)
    face = np.empty(D, np.int32)
    fsize = np.empty(D + 2, np.int32)
    vid = np.empty(D, np.int32)
    # candidate lobes
    lf = np.empty(D + 2, np.int32)   # face id
    lva = np.empty(D + 2, np.int32)
    lvb = np.empty(D + 2, np.int32)
    le1 = np.empty(D + 2, np.int32)
    le2 = np.empty(D + 2, np.int32)
    ld = np.empty((D + 2, 2), np.int32)  # the two face darts
    occ_a = np.empty(MAX_OCC, np.int32)
    occ_b = np.empty(MAX_OCC, np.int32)
    occ_pinch = np.empty(MAX_OCC, np.int32)
    inter = np.empty((MAX_OCC, MAX_OCC), np.bool_)
    for r in range(N):
        for d in range(D):
            sigma[d] = rows[r, d]
            alpha[d] = rows[r, D + d]
        nf = _face_of(sigma, alpha, D, face)
        for f in range(nf):
            fsize[f] = 0
        for d in range(D):
            fsize[face[d]] += 1
        _vertex_of(sigma, D, vid)
        root_face = face[0]
        # collect lobes: valency-2 faces with 2 distinct edges and endpoints
        nl = 0
        for d in range(D):
            f = face[d]
            if fsize[f] != 2 or f == root_face:
                continue
            d2 = sigma[alpha[d]]
            if d > d2:
                continue  # visit each face once via its smaller first dart
            if alpha[d] == d2:
                continue  # same edge twice
            if vid[d] == vid[d2]:
                continue  # loop pair, endpoints coincide
            lf[nl] = f
            lva[nl] = vid[d]
            lvb[nl] = vid[d2]
            le1[nl] = d if d < alpha[d] else alpha[d]
            le2[nl] = d2 if d2 < alpha[d2] else alpha[d2]
            ld[nl, 0] = d
            ld[nl, 1] = d2
            nl += 1
        # occurrences = compatible lobe pairs
        nocc = 0
        for i in range(nl):
            for j in range(i + 1, nl):
                if le1[i] == le1[j] or le1[i] == le2[j] or le2[i] == le1[j] or le2[i] == le2[j]:
                    continue
                sa = 0
                pinch = -1
                if lva[i] == lva[j] or lva[i] == lvb[j]:
                    sa += 1
                    pinch = lva[i]
                if lvb[i] == lva[j] or lvb[i] == lvb[j]:
                    sa += 1
                    pinch = lvb[i]
                if sa != 1:
                    continue
                if nocc < MAX_OCC:
                    occ_a[nocc] = i
                    occ_b[nocc] = j
                    occ_pinch[nocc] = pinch
                nocc += 1
        out_counts[r] = nocc
        if not want_triples or nocc < 3 or nocc > MAX_OCC:
            out_pairs3[r] = nocc * (nocc - 1) * (nocc - 2) // 6 if nocc >= 3 else 0
            if want_triples and nocc > MAX_OCC:
                out_pairs3[r] = -1  # overflow sentinel; callers re-run in python
            continue
        # intersection graph
        for i in range(nocc):
            for j in range(i + 1, nocc):
                li1 = occ_a[i]
                li2 = occ_b[i]
                lj1 = occ_a[j]
                lj2 = occ_b[j]
                hit = False
                if lf[li1] == lf[lj1] or lf[li1] == lf[lj2] or lf[li2] == lf[lj1] or lf[li2] == lf[lj2]:
                    hit = True
                elif occ_pinch[i] == occ_pinch[j]:
                    c = occ_pinch[i]
                    # darts of each occurrence at c, in two small sets
                    # mark: 0 none, 1 only i, 2 only j, 3 both
                    trans = 0
                    prev = 0
                    first = 0
                    d0 = -1
                    for d in range(D):
                        if vid[d] == c:
                            d0 = d
                            break
                    d = d0
                    while True:
                        m = 0
                        for t in range(2):
                            for lob in (li1, li2):
                                dd = ld[lob, t]
                                if dd == d or alpha[dd] == d:
                                    if vid[d] == c:
                                        m |= 1
                            for lob in (lj1, lj2):
                                dd = ld[lob, t]
                                if dd == d or alpha[dd] == d:
                                    if vid[d] == c:
                                        m |= 2
                        if m == 1 or m == 2:
                            if prev == 0:
                                first = m
                                prev = m
                            elif m != prev:
                                trans += 1
                                prev = m
                        d = sigma[d]
                        if d == d0:
                            break
                    if prev != 0 and first != prev:
                        trans += 1
                    if trans >= 4:
                        hit = True
                inter[i, j] = hit
                inter[j, i] = hit
        good = 0
        for i in range(nocc):
            for j in range(i + 1, nocc):
                for k in range(j + 1, nocc):
                    e = 0
                    if inter[i, j]:
                        e += 1
                    if inter[i, k]:
                        e += 1
                    if inter[j, k]:
                        e += 1
                    if e <= 1:
                        good += 1
        out_pairs3[r] = good


def fly_stats(rows: np.ndarray, want_triples: bool = False):
    """Occurrence counts (and optionally pairwise-admissible 3-subset counts)."""
    counts = np.zeros(rows.shape[0], np.int64)
    good3 = np.zeros(rows.shape[0], np.int64)
    _fly_stats(rows, counts, good3, want_triples)
    return counts, good3
