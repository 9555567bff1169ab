import pytest

from planarmaps.enumeration import generate
from planarmaps.maps import MapClass, RootedMap, fly_map, loop_map, parallel_edges_map, polygon_map
from planarmaps.patterns import (
    Pattern,
    PatternError,
    count_occurrences,
    enumerate_intersection_types,
    find_occurrences,
    merge_type_families,
    occurrences_intersect,
    rotations_of,
    types_from_json,
    types_to_json,
)


def test_fly_constants(fly):
    assert (fly.e, fly.v, fly.r) == (4, 4, 2)
    assert len(fly.pinch_points) == 1
    assert not fly.has_simple_boundary()


def test_twogon_constants(twogon):
    assert (twogon.e, twogon.v) == (2, 2)
    assert twogon.r == 1  # two boundary corners, cyclic symmetry of order two
    assert twogon.has_simple_boundary()


def test_simple_boundary_pattern_with_trivial_symmetry_has_r_equals_v():
    # triangle with a pendant edge hanging into its interior face: the
    # boundary stays a simple 3-cycle and the pendant kills all symmetry
    base = polygon_map(3)
    fi = base.faces()
    corner = None
    for d in range(base.n_darts):
        if base.vertex_of[d] == 0 and fi.face_of[base.sigma[d]] != fi.root_face:
            corner = d
            break
    assert corner is not None
    sigma = list(base.sigma) + [0, 0]
    alpha = list(base.alpha) + [7, 6]
    sigma[6] = sigma[corner]
    sigma[corner] = 6
    sigma[7] = 7
    p = Pattern(RootedMap(sigma, alpha, base.root))
    assert p.has_simple_boundary()
    assert p.v == 3
    assert p.r == p.v


def test_occurrences_of_twogon_in_triple_edge(twogon):
    host = parallel_edges_map(3)
    occs = find_occurrences(host, twogon)
    assert len(occs) == 2  # the two non-root 2-gon faces


def test_fly_host_too_small(fly):
    assert count_occurrences(loop_map(), fly) == 0


def test_fly_in_itself_single_class(fly):
    assert count_occurrences(fly_map(), fly) == 1


def test_count_on_atomic_is_zero(fly):
    from planarmaps.maps import atomic_map

    assert count_occurrences(atomic_map(), fly) == 0


def test_count_bounded_by_dart_choices(fly):
    import math

    for m in generate(5, MapClass.ALL).iter_maps():
        c = count_occurrences(m, fly)
        assert 0 <= c <= math.comb(m.n_darts, fly.map.n_darts)


def test_embedding_roundtrip_reconstructs_pattern(fly):
    # re-applying the correspondence gives a map isomorphic to the pattern
    hosts = [m for m in generate(5, MapClass.ALL).iter_maps()]
    checked = 0
    for host in hosts:
        for occ in find_occurrences(host, fly):
            emb = occ.embedding
            inv = {h: i for i, h in enumerate(emb)}
            pm = fly.map
            sigma = [0] * pm.n_darts
            alpha = [0] * pm.n_darts
            for d in range(pm.n_darts):
                alpha[d] = inv[host.alpha[emb[d]]]
                # sigma within the image: next image dart around the vertex
                h = host.sigma[emb[d]]
                while h not in inv:
                    h = host.sigma[h]
                sigma[d] = inv[h]
            rebuilt = RootedMap(sigma, alpha, 0)
            cands = {fly.map.rerooted(d).canonical_code() for d in range(pm.n_darts)}
            assert rebuilt.canonical_code() in cands
            checked += 1
        if checked > 50:
            break
    assert checked > 0


def test_intersection_symmetric_and_reflexive(fly):
    for m in generate(6, MapClass.ALL).iter_maps():
        occs = find_occurrences(m, fly)
        if len(occs) < 2:
            continue
        assert occurrences_intersect(occs[0], occs[0])
        got = occurrences_intersect(occs[0], occs[1])
        assert got == occurrences_intersect(occs[1], occs[0])
        break


def test_intersect_requires_same_host(fly):
    o1 = find_occurrences(fly_map(), fly)[0]
    host2 = parallel_edges_map(2)
    o2_list = find_occurrences(host2, Pattern(parallel_edges_map(2)))
    if o2_list:
        with pytest.raises(PatternError):
            occurrences_intersect(o1, o2_list[0])


def test_two_twogon_occurrences_do_not_intersect(twogon):
    occs = find_occurrences(parallel_edges_map(3), twogon)
    assert not occurrences_intersect(occs[0], occs[1])


def test_twogon_has_no_intersection_types(twogon):
    assert enumerate_intersection_types(twogon, MapClass.ALL) == []


def test_fly_rotations_value(fly):
    assert rotations_of(fly) == 2


# -- intersection types ---------------------------------------------------------


def test_fly_types_fixture(fly_types):
    # stable summary of the enumerator output; the full golden file lives in
    # the CLI test
    summary = sorted((t.e, t.v, t.r, t.deep_faces) for t in fly_types)
    assert len(fly_types) == 15
    assert summary == [
        (5, 4, 4, ()),
        (6, 2, 2, ((4, 1),)),
        (6, 3, 3, ((3, 1),)),
        (6, 4, 2, ()),
        (6, 4, 4, ((2, 1),)),
        (6, 6, 3, ()),
        (6, 6, 6, ()),
        (7, 2, 2, ((4, 1),)),
        (7, 4, 4, ((2, 1),)),
        (7, 6, 6, ()),
        (8, 2, 2, ((4, 1), (2, 1))[::-1]),
        (8, 2, 2, ((6, 1),)),
        (8, 4, 2, ((2, 2),)),
        (8, 6, 6, ((2, 1),)),
        (8, 8, 2, ()),
    ]


def test_fly_families_count_matches_paper_listing(fly_types):
    fams = merge_type_families(fly_types)
    assert len(fams) == 7


def test_type_invariants(fly_types, fly):
    for t in fly_types:
        m = t.representative
        fi = m.faces()
        assert t.e == m.n_edges
        assert t.v == fi.valency[fi.root_face]
        # coverage: the two occurrences carry every edge and vertex
        darts = t.pair[0] | t.pair[1]
        assert {min(d, m.alpha[d]) for d in darts} == set(range(0, m.n_darts, 1)) - {
            d for d in range(m.n_darts) if d > m.alpha[d]
        }
        vid = m.vertex_of
        assert {vid[d] for d in darts} == set(range(m.n_vertices))
        # deep faces are interior to neither occurrence and exclude the root face
        interiors = set()
        for fams in t.pair_interiors:
            for f in fams:
                interiors.add(frozenset(f))
        deep_count = sum(mult for _, mult in t.deep_faces)
        got = 0
        for idx, cyc in enumerate(fi.faces):
            if idx == fi.root_face or frozenset(cyc) in interiors:
                continue
            got += 1
        assert got == deep_count


def test_every_intersecting_pair_has_a_known_type(fly, fly_types):
    # hosts up to six edges: each covering intersecting pair canonicalizes to
    # one of the enumerated types
    from planarmaps.patterns import _marked_key, _record_type

    known = set()
    groups = {}
    for t in fly_types:
        pass
    for n in range(1, 7):
        for m in generate(n, MapClass.ALL).iter_maps():
            occs = find_occurrences(m, fly)
            for i in range(len(occs)):
                for j in range(i + 1, len(occs)):
                    if not occurrences_intersect(occs[i], occs[j]):
                        continue
                    union_edges = occs[i].edges() | occs[j].edges()
                    if len(union_edges) != m.n_edges:
                        continue
                    _record_type(groups, m, occs[i], occs[j])
    assert len(groups) <= 15
    summaries = sorted((g["e"], g["v"], g["deep"]) for g in groups.values())
    type_summaries = sorted((t.e, t.v, t.deep_faces) for t in fly_types if t.e <= 6)
    assert summaries == type_summaries


def test_types_json_roundtrip(fly_types):
    data = types_to_json(fly_types)
    back = types_from_json(data)
    assert [(t.e, t.v, t.r, t.deep_faces) for t in back] == [
        (t.e, t.v, t.r, t.deep_faces) for t in fly_types
    ]
