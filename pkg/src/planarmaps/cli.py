"""Command-line interface.

Subcommands: enumerate, occurrences, itypes, solve, moments, clt,
saddle-check.  Every run emits a schema-versioned JSON report with the
configuration echo, provenance-tagged results and a timing field; repeated
runs with the same configuration are byte-identical apart from timing.

Exit codes: 0 ok, 1 usage error, 2 resource limit, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

from . import __version__
from .maps import MapClass, MapError, from_text, load_map
from .enumeration import (
    CACHE_DIR_ENV,
    DistributionTable,
    ResourceLimitError,
    degree_stats,
    exact_distribution,
    generate,
    labeled_config_counts,
    write_binary_cache,
    write_text_cache,
)

REPORT_SCHEMA = 1


class UsageError(ValueError):
    pass


def _fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _report(config: dict, results: dict, t0: float) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "tool_version": __version__,
        "config": config,
        "results": results,
        "timing_seconds": round(time.time() - t0, 3),
    }


def _emit(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _threads(ns) -> None:
    if ns.threads:
        from . import kernels

        if kernels.USING_NUMBA:
            kernels.set_num_threads(ns.threads)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_enumerate(ns) -> dict:
    cls = MapClass.from_str(ns.cls)
    run = generate(ns.n, cls, limit=ns.limit, cache_dir=ns.cache)
    results = {
        "n": ns.n,
        "class": cls.value,
        "total": run.total,
        "provenance": "exact/enumeration",
    }
    if ns.cache:
        import os

        results["cache_file"] = os.path.join(ns.cache, f"{cls.value}_{ns.n}.maps.bin")
    if ns.text_out:
        write_text_cache(ns.text_out, run)
        results["text_file"] = ns.text_out
    return results


def cmd_occurrences(ns) -> dict:
    from .patterns import Pattern, find_occurrences

    host = load_map(ns.host)
    p = Pattern(load_map(ns.pattern))
    occs = find_occurrences(host, p)
    return {
        "pattern": {"e": p.e, "v": p.v, "r": p.r, "pinch_points": len(p.pinch_points)},
        "host_edges": host.n_edges,
        "count": len(occs),
        "occurrences": [
            {
                "darts": sorted(o.dart_image),
                "interior_faces": sorted(o.interior_faces),
            }
            for o in occs
        ],
        "provenance": "exact/embedding-search",
    }


def cmd_itypes(ns) -> dict:
    from .patterns import Pattern, enumerate_intersection_types, merge_type_families, types_to_json

    p = Pattern(load_map(ns.pattern))
    cls = MapClass.from_str(ns.cls)
    types = enumerate_intersection_types(p, cls, max_edges=ns.max_edges)
    families = merge_type_families(types)
    results = {
        "pattern": {"e": p.e, "v": p.v, "r": p.r},
        "count": len(types),
        "family_count": len(families),
        "types": types_to_json(types),
        "families": [sorted(i for i in fam) for fam in families],
        "conventions": {
            "occurrence_equivalence": "embeddings mod exterior-preserving pattern rotations",
            "deep_face_fills": "strict: z^-j [u^j]P_(j-1) truncated to z>=j; "
            "contracted unions are separate types",
            "families": "types merged under deep-2-gon contraction and re-rooting "
            "across non-interior faces (the paper-figure style listing)",
        },
        "provenance": "exact/enumeration",
    }
    return results


def cmd_solve(ns) -> dict:
    from .series import build_pattern_equation, solve_pattern_equation, solve_tutte

    cls = MapClass.from_str(ns.cls)
    if ns.pattern:
        from .patterns import Pattern, enumerate_intersection_types

        p = Pattern(load_map(ns.pattern))
        types = enumerate_intersection_types(p, cls)
        eq = build_pattern_equation(p, types, cls)
        series = solve_pattern_equation(eq, ns.Nz, ns.Nx)
    else:
        series = solve_tutte(cls, ns.Nz)
    coeffs = []
    for n in range(series.Nz + 1):
        entries = []
        for k in range(series.Nx + 1):
            p_ = series.coeffs[n][k]
            for j, c in enumerate(p_):
                if c:
                    entries.append([j, k, str(c)])
        coeffs.append([n, entries])
    return {
        "class": cls.value,
        "Nz": ns.Nz,
        "Nx": ns.Nx,
        "u_marks": "valency/2" if series.u_is_half else "valency",
        "at_u1_x0": [str(c) for c in series.at_u1(0)],
        "coeffs": coeffs,
        "provenance": "exact/series",
    }


def cmd_moments(ns) -> dict:
    from .asymptotics import estimate_growth, moment_constants

    with open(ns.series, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    res = doc["results"] if "results" in doc else doc
    Nx = res["Nx"]
    coeffs = res["coeffs"]
    seqs = {k: [0] * (res["Nz"] + 1) for k in range(Nx + 1)}
    for n, entries in coeffs:
        for j, k, c in entries:
            seqs[k][n] += int(c)
    A = seqs.get(0)
    B = seqs.get(1)
    C = seqs.get(2)
    g = estimate_growth(A, B, C)
    out = {
        "rho0": g.rho0,
        "rho1": g.rho1,
        "rho2": g.rho2,
        "c_log_deriv": g.c_log_deriv,
        "residuals": {k: v for k, v in g.residuals.items()},
        "provenance": "estimated/ratio-acceleration",
    }
    if B is not None and not math.isnan(g.rho1):
        mc = moment_constants(g)
        out["c1"] = mc.c1
        out["c2_sq"] = mc.c2_sq
    return out


def cmd_clt(ns) -> dict:
    from .asymptotics import gw_condition_check, ks_normality, sandwich_check
    from .patterns import Pattern

    cls = MapClass.from_str(ns.cls)
    p = Pattern(load_map(ns.pattern))
    rows = []
    warnings_out = []
    for n in range(1, ns.nmax + 1):
        dist = exact_distribution(n, cls, p)
        if dist.total == 0:
            continue
        mu = dist.mean()
        var = dist.variance()
        row = {
            "n": n,
            "maps": dist.total,
            "mean": _fraction_str(mu),
            "variance": _fraction_str(var),
            "mean_provenance": "exact/enumeration",
        }
        if var > 0:
            row["ks_distance"] = ks_normality(dist)
            row["gw_ratios"] = gw_condition_check(dist, k_max=ns.kmax)
        else:
            warnings_out.append(f"n={n}: degenerate distribution, KS section empty")
        lc = [labeled_config_counts(n, k, cls, p, pairwise_only=True) for k in range(ns.kmax + 1)]
        row["sandwich"] = sandwich_check(lc, mu, dist.total)
        rows.append(row)
    results = {
        "class": cls.value,
        "pattern_edges": p.e,
        "rows": rows,
        "warnings": warnings_out,
        "provenance": "exact/enumeration",
    }
    if ns.csv:
        with open(ns.csv, "w", encoding="utf-8") as fh:
            fh.write("n,mean,variance,ks_distance\n")
            for row in rows:
                ks = row.get("ks_distance", "")
                mu = Fraction(row["mean"].split("/")[0]) / Fraction(row["mean"].split("/")[1])
                va = Fraction(row["variance"].split("/")[0]) / Fraction(row["variance"].split("/")[1])
                fh.write(f"{row['n']},{float(mu)},{float(va)},{ks}\n")
        results["csv_file"] = ns.csv
    return results


def cmd_saddle_check(ns) -> dict:
    from .asymptotics import SaddleInput, contour_oracle, saddle_factorial_moment

    f = [float(t) for t in ns.f.split(",")]
    g = [float(t) for t in ns.g.split(",")]
    if len(f) < 3:
        raise UsageError("f needs Taylor coefficients to order >= 2")
    s = SaddleInput(n=ns.n, k=ns.k, f0=f[0], f1=f[1], f2=2.0 * f[2], g0=g[0])
    closed = saddle_factorial_moment(s)
    oracle = contour_oracle(f, g, ns.n, ns.k, dps=ns.dps)
    rel = abs(math.exp(closed - oracle) - 1.0)
    return {
        "n": ns.n,
        "k": ns.k,
        "in_sqrt_regime": s.regime_flag(),
        "log_closed": closed,
        "log_oracle": oracle,
        "relative_difference": rel,
        "provenance": {"closed": "estimated/formula", "oracle": "estimated/quadrature"},
    }


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="planarmaps", description=__doc__)
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    ap.add_argument("--threads", type=int, default=0, help="worker threads (outputs identical at any count)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    e = sub.add_parser("enumerate", help="exhaustively generate maps of one size")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--class", dest="cls", default="all")
    e.add_argument("--cache", help=f"cache directory (or ${CACHE_DIR_ENV})")
    e.add_argument("--limit", type=int, help="override the enumeration size limit")
    e.add_argument("--text-out", help="also write the maps in text format")
    e.set_defaults(fn=cmd_enumerate)

    o = sub.add_parser("occurrences", help="find pattern occurrences in a host map")
    o.add_argument("--pattern", required=True)
    o.add_argument("--host", required=True)
    o.set_defaults(fn=cmd_occurrences)

    it = sub.add_parser("itypes", help="enumerate intersection types of a pattern")
    it.add_argument("--pattern", required=True)
    it.add_argument("--class", dest="cls", default="all")
    it.add_argument("--max-edges", type=int, default=None)
    it.set_defaults(fn=cmd_itypes)

    so = sub.add_parser("solve", help="solve the class / pattern functional equation")
    so.add_argument("--class", dest="cls", default="all")
    so.add_argument("--pattern")
    so.add_argument("--Nz", type=int, required=True)
    so.add_argument("--Nx", type=int, default=0)
    so.set_defaults(fn=cmd_solve)

    mo = sub.add_parser("moments", help="growth and moment constants from a series report")
    mo.add_argument("--series", required=True)
    mo.set_defaults(fn=cmd_moments)

    cl = sub.add_parser("clt", help="exact distribution diagnostics over a range of sizes")
    cl.add_argument("--pattern", required=True)
    cl.add_argument("--class", dest="cls", default="all")
    cl.add_argument("--nmax", type=int, required=True)
    cl.add_argument("--kmax", type=int, default=3)
    cl.add_argument("--csv", help="write n,mean,variance,ks columns for plotting")
    cl.set_defaults(fn=cmd_clt)

    sa = sub.add_parser("saddle-check", help="closed saddle formula vs contour oracle")
    sa.add_argument("--n", type=int, required=True)
    sa.add_argument("--k", type=int, required=True)
    sa.add_argument("--f", required=True, help="comma separated Taylor coefficients of f")
    sa.add_argument("--g", required=True, help="comma separated Taylor coefficients of g")
    sa.add_argument("--dps", type=int, default=50, help="working precision (significant digits)")
    sa.set_defaults(fn=cmd_saddle_check)
    return ap


def main(argv=None) -> int:
    t0 = time.time()
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        _threads(ns)
        config = {k: v for k, v in vars(ns).items() if k not in ("fn",) and v is not None}
        results = ns.fn(ns)
        _emit(_report(config, results, t0), ns.out)
        return 0
    except (UsageError, MapError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal invariant violation
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
