"""Acceptance suite: one criterion per test, one printed PASS/FAIL line each.

Run with  pytest tests/test_acceptance.py -v -s.

A3 and A7 contain an exactness requirement on the x^2 slice of the fly
equation that the implemented functional-equation machinery provably cannot
meet for patterns with boundary pinch points (marks straddling the pinched
boundary vertices are miscounted by the partial-simple-boundary recursion
and by the boundary gluing itself; the x^0 and x^1 slices are exact and the
discrepancy families are documented in the README).  Those two tests fail
honestly rather than loosening the stated tolerance.
"""

import json
import math
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from planarmaps import kernels
from planarmaps.asymptotics import (
    SaddleInput,
    contour_oracle,
    estimate_growth,
    gw_condition_check,
    ks_normality,
    moment_constants,
    saddle_factorial_moment,
)
from planarmaps.enumeration import exact_distribution, generate, labeled_config_counts
from planarmaps.maps import MapClass
from planarmaps.series import build_pattern_equation, solve_pattern_equation, solve_tutte

DATA = os.path.join(os.path.dirname(__file__), "data")

A1_LIMITS = {MapClass.ALL: 8, MapClass.BIPARTITE: 9, MapClass.TWO_CONNECTED: 10}


def _line(name, ok, detail=""):
    print(f"{name} {'PASS' if ok else 'FAIL'}: {detail}")
    return ok


@pytest.fixture(scope="module")
def fly_series_40(fly, fly_types):
    eq = build_pattern_equation(fly, fly_types, MapClass.ALL)
    return solve_pattern_equation(eq, 40, 2)


@pytest.fixture(scope="module")
def fly_distributions(fly):
    return {n: exact_distribution(n, MapClass.ALL, fly) for n in range(4, 10)}


@pytest.mark.slow
def test_A1_master_cross_validation():
    t0 = time.time()
    detail = []
    ok = True
    for cls, nmax in A1_LIMITS.items():
        series = solve_tutte(cls, nmax)
        series_counts = series.at_u1()
        enum_counts = [generate(n, cls).total for n in range(nmax + 1)]
        same = series_counts == enum_counts
        ok &= same
        detail.append(f"{cls.value}<= {nmax}: {'ok' if same else (series_counts, enum_counts)}")
    elapsed = time.time() - t0
    ok &= elapsed <= 1800
    assert _line("A1", ok, f"{'; '.join(detail)}; runtime {elapsed:.0f}s <= 1800s")


@pytest.mark.slow
def test_A2_growth_anchors():
    results = {}
    for cls, target in ((MapClass.BIPARTITE, 8.0), (MapClass.TWO_CONNECTED, 27 / 4)):
        s = solve_tutte(cls, 300)
        g = estimate_growth(s.at_u1())
        results[cls.value] = (g.rho0, target, abs(g.rho0 - target) / target)
    s = solve_tutte(MapClass.ALL, 300)
    A = s.at_u1()
    g = estimate_growth(A)
    raw = A[300] / A[299] * (300 / 299) ** 2.5
    results["all"] = (g.rho0, raw, abs(g.rho0 - raw) / raw)
    ok = all(rel <= 0.005 for _, _, rel in results.values())
    detail = "; ".join(f"{k}: est={a:.5f} ref={b:.5f} rel={r:.2e}" for k, (a, b, r) in results.items())
    assert _line("A2", ok, detail)


def test_A3_fly_calibration(fly, fly_types, fly_solution):
    assert fly.r == 2, "single-occurrence term must carry r = 2"
    B = fly_solution.at_u1(1)
    C2 = [2 * c for c in fly_solution.at_u1(2)]
    brute1 = [labeled_config_counts(n, 1, MapClass.ALL, fly).m_circ for n in range(8)]
    brute2 = [labeled_config_counts(n, 2, MapClass.ALL, fly).m_circ for n in range(8)]
    x1_ok = B[:8] == brute1
    x2_ok = C2[:8] == brute2
    detail = (
        f"r=2 ok; x^1 {'exact' if x1_ok else 'MISMATCH'} {B[:8]} vs {brute1}; "
        f"x^2 {'exact' if x2_ok else 'MISMATCH'} {C2[:8]} vs {brute2} "
        "(x^2 differs by the pinch-straddle families; see README and the ledger)"
    )
    ok = x1_ok and x2_ok
    _line("A3", ok, detail)
    assert x1_ok, "x^1 slice must match brute force exactly"
    assert x2_ok, (
        "x^2 slice of the solved fly equation does not equal brute-force "
        "two-labelled-occurrence counts; the pattern has a boundary pinch "
        "point and marks straddling it are not series-expressible "
        f"(difference {[c - b for c, b in zip(C2[:8], brute2)]})"
    )


def test_A4_intersection_type_fixture(fly, fly_types):
    from planarmaps.patterns import merge_type_families, types_to_json

    golden = json.load(open(os.path.join(DATA, "fly_types.json")))
    now = types_to_json(fly_types)
    stable = now == golden["types"]
    fams = merge_type_families(fly_types)
    fam_count = len(fams)
    cardinality_ok = fam_count in (6, 7)
    invariants_ok = True
    for t in fly_types:
        m = t.representative
        fi = m.faces()
        darts = t.pair[0] | t.pair[1]
        edges_cover = {min(d, m.alpha[d]) for d in darts} == {
            min(d, m.alpha[d]) for d in range(m.n_darts)
        }
        verts_cover = {m.vertex_of[d] for d in darts} == set(range(m.n_vertices))
        interiors = {frozenset(f) for fams_ in t.pair_interiors for f in fams_}
        deep = sum(mult for _, mult in t.deep_faces)
        got_deep = sum(
            1
            for idx, cyc in enumerate(fi.faces)
            if idx != fi.root_face and frozenset(cyc) not in interiors
        )
        invariants_ok &= edges_cover and verts_cover and deep == got_deep
    ok = stable and cardinality_ok and invariants_ok
    assert _line(
        "A4",
        ok,
        f"golden stable={stable}; {len(fly_types)} rooted types in {fam_count} families "
        "(paper text says six, figure caption seven; the merged family listing has 7); "
        f"coverage+deep-face invariants={invariants_ok}",
    )


@pytest.mark.slow
def test_A5_saddle_vs_contour():
    t0 = time.time()
    pairs = [
        ([0.30, 0.80, -0.20, 0.05], [0.10, 0.40, 0.10]),
        ([0.10, 0.50, 0.10, 0.00], [0.00, 0.20, 0.00]),
        ([1.20, 1.50, -0.40, 0.02], [0.30, -0.10, 0.05]),
    ]
    ok = True
    details = []
    for idx, (f, g) in enumerate(pairs):
        n, k = 10**6, 10**3
        closed = saddle_factorial_moment(SaddleInput(n=n, k=k, f0=f[0], f1=f[1], f2=2 * f[2], g0=g[0]))
        oracle = contour_oracle(f, g, n, k)
        rel = abs(math.exp(closed - oracle) - 1)
        ok &= rel <= 0.05
        details.append(f"pair{idx}: rel={rel:.2e}")
        errs = []
        for nn in (10**4, 10**5, 10**6):
            kk = int(math.isqrt(nn))
            c = saddle_factorial_moment(SaddleInput(n=nn, k=kk, f0=f[0], f1=f[1], f2=2 * f[2], g0=g[0]))
            o = contour_oracle(f, g, nn, kk)
            errs.append(abs(math.exp(c - o) - 1))
        mono = errs[0] > errs[1] > errs[2]
        ok &= mono
        details.append(f"pair{idx} sweep={['%.1e' % e for e in errs]} decreasing={mono}")
    elapsed = time.time() - t0
    ok &= elapsed <= 300
    assert _line("A5", ok, "; ".join(details) + f"; runtime {elapsed:.0f}s <= 300s")


@pytest.mark.slow
def test_A6_sandwich_inequality(fly):
    ok = True
    details = []
    for n in range(4, 8):
        for k in (1, 2, 3):
            lc = labeled_config_counts(n, k, MapClass.ALL, fly, pairwise_only=True)
            left = lc.m_circ_cross <= lc.m_circ
            eq = lc.m_circ_cross == lc.m_circ
            ok &= left
            if k <= 2:
                ok &= eq
            if k == 3 and n >= 6:
                details.append(f"n={n} k=3: {lc.m_circ_cross} <= {lc.m_circ}")
    assert _line("A6", ok, "; ".join(details) + "; equality at k <= 2")


@pytest.mark.slow
def test_A7_moment_consistency(fly, fly_series_40, fly_distributions):
    A = fly_series_40.at_u1(0)
    B = fly_series_40.at_u1(1)
    C = fly_series_40.at_u1(2)
    mean_ok = True
    var_ok = True
    for n in range(4, 8):
        d = fly_distributions[n]
        series_mean = Fraction(B[n], A[n])
        series_var = Fraction(2 * C[n], A[n]) + series_mean - series_mean**2
        mean_ok &= series_mean == d.mean()
        var_ok &= series_var == d.variance()
    g = estimate_growth(A, B, C)
    c1 = moment_constants(g).c1
    gaps = [abs(float(fly_distributions[n].mean()) / n - c1) for n in range(4, 9)]
    trend_ok = all(a > b for a, b in zip(gaps, gaps[1:]))
    detail = (
        f"series mean == enumeration mean for n<=7: {mean_ok}; "
        f"series variance == enumeration variance: {var_ok} "
        "(variance uses the x^2 slice; see A3); "
        f"|E[X_n]/n - c1| over n=4..8: {['%.2e' % v for v in gaps]} decreasing={trend_ok}"
    )
    ok = mean_ok and var_ok and trend_ok
    _line("A7", ok, detail)
    assert mean_ok and trend_ok
    assert var_ok, "exact variance equality fails through the x^2 slice (see A3)"


@pytest.mark.slow
def test_A8_clt_trend(fly, fly_distributions):
    ks = [ks_normality(fly_distributions[n]) for n in range(5, 10)]
    ks_ok = all(a > b for a, b in zip(ks, ks[1:]))
    ratios = []
    for n in range(5, 10):
        rows = gw_condition_check(fly_distributions[n], k_max=2)
        ratios.append(rows[2]["ratio"])
    gw_ok = all(abs(b - 1) < abs(a - 1) for a, b in zip(ratios, ratios[1:]))
    assert _line(
        "A8",
        ks_ok and gw_ok,
        f"KS n=5..9: {['%.4f' % v for v in ks]} strictly decreasing={ks_ok}; "
        f"GW k=2 ratios: {['%.4f' % v for v in ratios]} toward 1={gw_ok}",
    )


@pytest.mark.slow
def test_A9_thread_determinism(fly):
    from planarmaps.enumeration import clear_cache

    def pipeline():
        clear_cache()
        rows = generate(6, MapClass.ALL).codes
        counts, good3 = kernels.fly_stats(rows, want_triples=True)
        series = solve_tutte(MapClass.ALL, 12)
        return rows.tobytes(), counts.tobytes(), good3.tobytes(), series.at_u1()

    hi = 1
    if kernels.USING_NUMBA:
        import numba

        hi = min(8, numba.config.NUMBA_NUM_THREADS)
        kernels.set_num_threads(1)
    base = pipeline()
    if kernels.USING_NUMBA:
        kernels.set_num_threads(hi)
    again = pipeline()
    ok = all(a == b for a, b in zip(base, again))
    assert _line(
        "A9",
        ok,
        f"byte-identical outputs at thread counts 1 and {hi} "
        f"(numba={'on' if kernels.USING_NUMBA else 'off'}; 8 requested, "
        f"{hi} available on this host)",
    )
