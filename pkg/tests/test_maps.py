import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarmaps.maps import (
    MapClass,
    MapError,
    RootedMap,
    atomic_map,
    bridge_map,
    class_membership,
    fly_map,
    from_text,
    loop_map,
    parallel_edges_map,
    polygon_map,
    to_text,
)


def all_maps(n):
    from planarmaps.enumeration import generate

    return list(generate(n, MapClass.ALL).iter_maps())


# -- faces -------------------------------------------------------------------


def test_loop_two_faces_of_valency_one():
    fi = loop_map().faces()
    assert sorted(fi.valency) == [1, 1]


def test_bridge_single_face_of_valency_two():
    fi = bridge_map().faces()
    assert fi.valency == (2,)


def test_triple_edge_three_faces_of_valency_two():
    fi = parallel_edges_map(3).faces()
    assert sorted(fi.valency) == [2, 2, 2]


def test_atomic_map_has_one_face_of_valency_zero():
    fi = atomic_map().faces()
    assert fi.valency == (0,)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_euler_and_valency_sum(n):
    for m in all_maps(n):
        fi = m.faces()
        assert m.n_vertices - m.n_edges + len(fi.faces) == 2
        assert sum(fi.valency) == 2 * m.n_edges
        assert all(m.alpha[m.alpha[d]] == d and m.alpha[d] != d for d in range(m.n_darts))


def test_invalid_maps_rejected():
    with pytest.raises(MapError):
        RootedMap((0, 1), (0, 1), 0)  # alpha has fixed points
    with pytest.raises(MapError):
        RootedMap((1, 0, 3, 2), (1, 0, 3, 2), 0)  # not connected
    # genus 1: two interleaved loops at one vertex
    with pytest.raises(MapError):
        RootedMap((1, 2, 3, 0), (2, 3, 0, 1), 0)


# -- classes ------------------------------------------------------------------


def test_loop_not_bipartite_bridge_bipartite():
    assert not class_membership(loop_map(), MapClass.BIPARTITE)
    assert class_membership(bridge_map(), MapClass.BIPARTITE)


def test_two_loops_share_vertex_not_two_connected():
    # figure eight: one vertex, two loops; the vertex lies in two blocks
    m = RootedMap((1, 2, 3, 0), (1, 0, 3, 2), 0)
    assert not m.is_two_connected()


def test_degenerate_maps_excluded_from_two_connected():
    for m in (atomic_map(), loop_map(), bridge_map()):
        assert not class_membership(m, MapClass.TWO_CONNECTED)
    assert class_membership(parallel_edges_map(2), MapClass.TWO_CONNECTED)
    assert class_membership(polygon_map(3), MapClass.TWO_CONNECTED)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_bipartite_face_parity_agrees_with_two_coloring(n):
    for m in all_maps(n):
        assert m.is_bipartite_map() == m.is_bipartite_graph()


def naive_two_connected(m):
    """Loopless, >= 2 edges, and connected after deleting any single vertex."""
    if m.n_edges < 2 or m.has_loop():
        return False
    nv = m.n_vertices
    ends = m.edge_endpoints()
    for v in range(nv):
        keep = [e for e in ends if v not in e]
        verts = set(range(nv)) - {v}
        if not verts:
            return False
        adj = {w: set() for w in verts}
        for a, b in keep:
            adj[a].add(b)
            adj[b].add(a)
        start = next(iter(verts))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != verts:
            return False
    return True


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_two_connected_agrees_with_vertex_deletion(n):
    for m in all_maps(n):
        assert m.is_two_connected() == naive_two_connected(m)


@pytest.mark.slow
def test_class_predicates_exhaustive_n6():
    for m in all_maps(6):
        assert m.is_bipartite_map() == m.is_bipartite_graph()
        assert m.is_two_connected() == naive_two_connected(m)


# -- canonical codes -----------------------------------------------------------


def test_loop_and_bridge_have_distinct_codes():
    assert loop_map().canonical_code() != bridge_map().canonical_code()


def test_code_invariant_under_relabeling():
    rng = random.Random(7)
    for m in (fly_map(), parallel_edges_map(3), polygon_map(4)):
        for _ in range(10):
            perm = list(range(m.n_darts))
            rng.shuffle(perm)
            assert m.relabel(perm).canonical_code() == m.canonical_code()


def test_two_edge_maps_have_nine_distinct_codes():
    codes = {m.canonical_code() for m in all_maps(2)}
    assert len(codes) == 9


@given(st.integers(min_value=1, max_value=4), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_code_roundtrip_random_maps(n, rnd):
    ms = all_maps(n)
    m = ms[rnd.randrange(len(ms))]
    assert RootedMap.from_code(m.canonical_code()) == m


# -- partial simple boundaries ---------------------------------------------------


def test_psb_length_zero_needs_positive_valency():
    assert bridge_map().has_partial_simple_boundary(0)
    assert not atomic_map().has_partial_simple_boundary(0)


def test_loop_has_no_psb_of_length_one():
    assert not loop_map().has_partial_simple_boundary(1)
    assert bridge_map().has_partial_simple_boundary(1)


def test_fly_boundary_pinches():
    m = fly_map()  # rooted at the pinch vertex: walk c, l, c, r
    assert m.has_partial_simple_boundary(1)
    assert not m.has_partial_simple_boundary(2)
    assert not m.has_simple_boundary()
    darts, verts = m.boundary_walk()
    m2 = m.rerooted(darts[1])  # walk from an outer vertex: l, c, r, c
    assert m2.has_partial_simple_boundary(2)
    assert not m2.has_partial_simple_boundary(3)


# -- text format ------------------------------------------------------------------


def test_text_roundtrip():
    for m in (atomic_map(), loop_map(), bridge_map(), fly_map(), polygon_map(5)):
        assert from_text(to_text(m)) == m


def test_text_rejects_bad_input():
    with pytest.raises(MapError):
        from_text("darts=2\nsigma=(0 1)\nalpha=(0)(1)\nroot=0\n")  # alpha not involutive
    with pytest.raises(MapError):
        from_text("darts=4\nsigma=(0 1)(2 3)\nalpha=(0 1)(2 3)\nroot=0\n")  # not transitive
    with pytest.raises(MapError):
        from_text("darts=4\nsigma=(0 1 2 3)\nalpha=(0 2)(1 3)\nroot=0\n")  # genus 1
    with pytest.raises(MapError):
        from_text("sigma=\nalpha=\nroot=-1\n")  # missing darts field
