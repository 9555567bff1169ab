import numpy as np
import pytest

from planarmaps.enumeration import (
    DEFAULT_LIMITS,
    ResourceLimitError,
    clear_cache,
    degree_stats,
    exact_distribution,
    generate,
    generate_all_then_filter,
    labeled_config_counts,
    read_binary_cache,
    read_text_cache,
    write_binary_cache,
    write_text_cache,
)
from planarmaps.maps import MapClass


def test_atomic_level():
    assert generate(0, MapClass.ALL).total == 1
    assert generate(0, MapClass.BIPARTITE).total == 1
    assert generate(0, MapClass.TWO_CONNECTED).total == 0


def test_small_counts_all():
    # 1 atomic, loop+bridge, and the nine two-edge maps
    assert [generate(n, MapClass.ALL).total for n in range(4)] == [1, 2, 9, 54]


def test_no_duplicate_codes():
    for n in range(1, 6):
        rows = generate(n, MapClass.ALL).codes
        assert np.unique(rows, axis=0).shape[0] == rows.shape[0]


def test_stream_is_sorted_and_deterministic():
    rows = generate(5, MapClass.ALL).codes
    order = np.lexsort(np.flipud(rows.T))
    assert np.array_equal(order, np.arange(rows.shape[0]))


@pytest.mark.parametrize("cls", [MapClass.BIPARTITE, MapClass.TWO_CONNECTED])
def test_class_pipelines_agree_with_filter_route(cls):
    for n in range(0, 7):
        direct = generate(n, cls).codes
        ref = generate_all_then_filter(n, cls)
        assert direct.shape[0] == ref.shape[0]
        if direct.shape[0]:
            assert np.array_equal(direct, ref)


def test_limit_errors():
    with pytest.raises(ResourceLimitError):
        generate(DEFAULT_LIMITS[MapClass.ALL] + 1, MapClass.ALL)
    with pytest.raises(ResourceLimitError):
        generate(3, MapClass.ALL, limit=2)


def test_maps_valid_and_in_class():
    run = generate(5, MapClass.TWO_CONNECTED)
    for m in run.iter_maps():
        assert m.is_two_connected()
    run = generate(5, MapClass.BIPARTITE)
    for m in run.iter_maps():
        assert m.is_bipartite_map()


# -- distributions -----------------------------------------------------------


def test_distribution_below_pattern_size_is_zero(fly):
    d = exact_distribution(2, MapClass.ALL, fly)
    assert d.histogram == {0: 9}


def test_distribution_at_four_edges_two_rooted_flies(fly):
    d = exact_distribution(4, MapClass.ALL, fly)
    assert d.histogram[1] == 2
    assert d.histogram[0] == 376
    assert d.factorial_moment(1) * d.total == 2


def test_fly_fast_path_matches_reference_engine(fly):
    from planarmaps.patterns import find_occurrences

    for n in range(1, 6):
        run = generate(n, MapClass.ALL)
        d = exact_distribution(n, MapClass.ALL, fly)
        hist = {}
        for m in run.iter_maps():
            x = len(find_occurrences(m, fly))
            hist[x] = hist.get(x, 0) + 1
        assert d.histogram == hist


def test_labeled_counts_k0_is_map_count(fly):
    lc = labeled_config_counts(5, 0, MapClass.ALL, fly)
    assert lc.m_circ == lc.m_circ_cross == 2916


def test_labeled_counts_k2_equality(fly):
    lc = labeled_config_counts(6, 2, MapClass.ALL, fly, pairwise_only=True)
    assert lc.m_circ == lc.m_circ_cross  # two labels can only meet each other


def test_labeled_counts_fly_small_values(fly):
    assert labeled_config_counts(4, 1, MapClass.ALL, fly).m_circ == 2
    assert labeled_config_counts(5, 1, MapClass.ALL, fly).m_circ == 42
    assert labeled_config_counts(5, 2, MapClass.ALL, fly).m_circ == 8


def test_labeled_counts_k3_fast_path_matches_reference(fly):
    fast = labeled_config_counts(5, 3, MapClass.ALL, fly, pairwise_only=True)
    # reference path via the generic engine on the same maps
    from itertools import combinations

    from planarmaps.patterns import find_occurrences, occurrences_intersect

    run = generate(5, MapClass.ALL)
    m_circ = 0
    m_cross = 0
    for m in run.iter_maps():
        occs = find_occurrences(m, fly)
        x = len(occs)
        m_circ += x * (x - 1) * (x - 2)
        for sub in combinations(range(x), 3):
            pairs = [(a, b) for a, b in combinations(sub, 2) if occurrences_intersect(occs[a], occs[b])]
            degs = {}
            for a, b in pairs:
                degs[a] = degs.get(a, 0) + 1
                degs[b] = degs.get(b, 0) + 1
            if all(v <= 1 for v in degs.values()):
                m_cross += 6
    assert fast.m_circ == m_circ
    assert fast.m_circ_cross == m_cross


# -- degree statistics ----------------------------------------------------------


def test_degree_stats_one_edge():
    ds = degree_stats(1, MapClass.ALL)
    assert ds.histogram == {1: 1, 2: 1}  # bridge gives max degree 1, loop 2
    assert ds.mean() == 1.5


def test_degree_bound():
    for n in range(1, 6):
        ds = degree_stats(n, MapClass.ALL)
        assert ds.max_degree() <= 2 * n
        assert sum(ds.histogram.values()) == ds.total


def test_mean_degree_nondecreasing_small():
    means = [degree_stats(n, MapClass.ALL).mean() for n in range(1, 7)]
    assert all(a <= b for a, b in zip(means, means[1:]))


# -- caches ----------------------------------------------------------------------


def test_binary_cache_roundtrip(tmp_path):
    run = generate(3, MapClass.ALL)
    path = str(tmp_path / "all_3.maps.bin")
    write_binary_cache(path, run)
    rows = read_binary_cache(path, expect_n=3)
    assert np.array_equal(rows, run.codes)


def test_text_cache_roundtrip(tmp_path):
    run = generate(3, MapClass.BIPARTITE)
    path = str(tmp_path / "bip.maps.txt")
    write_text_cache(path, run)
    maps = read_text_cache(path)
    assert len(maps) == run.total
    assert {m.canonical_code() for m in maps} == {m.canonical_code() for m in run.iter_maps()}


def test_generate_uses_cache_dir(tmp_path):
    run = generate(4, MapClass.ALL, cache_dir=str(tmp_path))
    assert (tmp_path / "all_4.maps.bin").exists()
    again = generate(4, MapClass.ALL, cache_dir=str(tmp_path))
    assert np.array_equal(run.codes, again.codes)
