"""Exhaustive generation of rooted planar maps and exact statistics.

Maps are generated level by level: every (n+1)-edge map arises from an
n-edge map by inserting an edge into a corner pair of a common face, as a
trivial loop, or as a pendant edge, and the canonical-parent rule keeps each
child exactly once (see kernels).  Bipartite maps use the same growth
restricted to 2-colourable intermediates (a pure pruning: subgraphs of
bipartite graphs are bipartite); 2-connected maps grow inside their class by
corner-pair insertions and edge subdivisions.

The stream order is deterministic: rows are sorted by canonical code.
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterator

import numpy as np

from . import kernels
from .maps import MapClass, MapError, RootedMap, atomic_map

DEFAULT_LIMITS = {
    MapClass.ALL: 9,
    MapClass.BIPARTITE: 10,
    MapClass.TWO_CONNECTED: 11,
}

_CHUNK_PARENTS = 20000

CACHE_DIR_ENV = "PLANARMAPS_CACHE_DIR"


class ResourceLimitError(RuntimeError):
    """Enumeration size over the configured limit."""


def _sort_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] <= 1:
        return rows
    w = rows.shape[1]
    pad = (-w) % 8
    if pad:
        rows_p = np.zeros((rows.shape[0], w + pad), np.uint8)
        rows_p[:, :w] = rows
    else:
        rows_p = rows
    words = rows_p.view(">u8").reshape(rows.shape[0], -1)
    order = np.lexsort(words.T[::-1])
    return np.ascontiguousarray(rows[order])


def _loop_row() -> np.ndarray:
    return np.array([[1, 0, 1, 0]], np.uint8)


def _bridge_row() -> np.ndarray:
    return np.array([[0, 1, 1, 0]], np.uint8)


def _twogon_row() -> np.ndarray:
    from .maps import parallel_edges_map

    code = parallel_edges_map(2).canonical_code()
    return np.array([code], np.uint8)


@dataclass
class EnumerationRun:
    """One enumeration level: all rooted maps of class ``cls`` with n edges.

    ``codes`` holds one canonical code per row (sigma'||alpha' as uint8);
    n = 0 is the atomic map, represented by a zero-width row.
    """

    n: int
    cls: MapClass
    codes: np.ndarray
    total: int = field(init=False)

    def __post_init__(self):
        self.total = int(self.codes.shape[0])

    def iter_maps(self) -> Iterator[RootedMap]:
        if self.n == 0:
            for _ in range(self.total):
                yield atomic_map()
            return
        D = 2 * self.n
        for row in self.codes:
            yield RootedMap(tuple(int(x) for x in row[:D]), tuple(int(x) for x in row[D:]), 0)

    def map_at(self, i: int) -> RootedMap:
        if self.n == 0:
            return atomic_map()
        D = 2 * self.n
        row = self.codes[i]
        return RootedMap(tuple(int(x) for x in row[:D]), tuple(int(x) for x in row[D:]), 0)


_LEVEL_CACHE: dict[tuple[str, int], np.ndarray] = {}


def _grow_levels(cls: MapClass, n: int) -> np.ndarray:
    """Raw generation rows for level n (before any class filtering)."""
    key = (cls.value, n)
    if key in _LEVEL_CACHE:
        return _LEVEL_CACHE[key]
    if cls is MapClass.TWO_CONNECTED:
        if n < 2:
            rows = np.zeros((0, 4 * max(n, 1)), np.uint8)
        elif n == 2:
            rows = _twogon_row()
        else:
            parents = _grow_levels(cls, n - 1)
            chunks = []
            for lo in range(0, parents.shape[0], _CHUNK_PARENTS):
                chunk = parents[lo : lo + _CHUNK_PARENTS]
                chunks.append(kernels.gen_children_2conn(chunk))
            rows = _sort_rows(np.concatenate(chunks)) if chunks else np.zeros((0, 4 * n), np.uint8)
    else:
        bip = cls is MapClass.BIPARTITE
        if n == 0:
            rows = np.zeros((1, 0), np.uint8)
        elif n == 1:
            rows = _bridge_row() if bip else np.concatenate([_loop_row(), _bridge_row()])
            rows = _sort_rows(rows)
        else:
            parents = _grow_levels(cls, n - 1)
            chunks = []
            for lo in range(0, parents.shape[0], _CHUNK_PARENTS):
                chunk = parents[lo : lo + _CHUNK_PARENTS]
                chunks.append(kernels.gen_children(chunk, bip_prune=bip))
            rows = _sort_rows(np.concatenate(chunks)) if chunks else np.zeros((0, 4 * n), np.uint8)
    _LEVEL_CACHE[key] = rows
    return rows


def generate(n: int, cls: MapClass, limit: int | None = None, cache_dir: str | None = None) -> EnumerationRun:
    """Every rooted map of class ``cls`` with n edges, exactly once.

    Raises ResourceLimitError above the configured limit (defaults: 9 for
    All, 10 for Bipartite, 11 for TwoConnected).
    """
    if n < 0:
        raise MapError("n >= 0")
    lim = DEFAULT_LIMITS[cls] if limit is None else limit
    if n > lim:
        raise ResourceLimitError(f"n={n} exceeds enumeration limit {lim} for {cls.value}")
    cache_dir = cache_dir or os.environ.get(CACHE_DIR_ENV)
    if cache_dir:
        path = os.path.join(cache_dir, f"{cls.value}_{n}.maps.bin")
        if os.path.exists(path):
            return EnumerationRun(n=n, cls=cls, codes=read_binary_cache(path, expect_n=n))
    rows = _grow_levels(cls, n)
    if cls is MapClass.BIPARTITE and n >= 1:
        # growth already prunes to bipartite graphs; the map-level filter
        # (all face valencies even) must agree on genus 0 and is re-checked
        flags = kernels.class_flags(rows, "bipartite")
        rows = rows[flags]
    run = EnumerationRun(n=n, cls=cls, codes=rows)
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        write_binary_cache(os.path.join(cache_dir, f"{cls.value}_{n}.maps.bin"), run)
    return run


def generate_all_then_filter(n: int, cls: MapClass) -> np.ndarray:
    """Reference route: enumerate all maps and filter by class membership.

    Exists as the independent cross-check for the class-specific pipelines.
    """
    rows = _grow_levels(MapClass.ALL, n)
    if cls is MapClass.ALL:
        return rows
    if n == 0:
        # the atomic map is bipartite (no odd face) but not two-connected
        return rows if cls is MapClass.BIPARTITE else np.zeros((0, 0), np.uint8)
    flags = kernels.class_flags(rows, "bipartite" if cls is MapClass.BIPARTITE else "2conn")
    return rows[flags]


def clear_cache() -> None:
    _LEVEL_CACHE.clear()


# ---------------------------------------------------------------------------
# distributions and labelled configuration counts
# ---------------------------------------------------------------------------


@dataclass
class DistributionTable:
    """Exact distribution of the pattern count X_n over maps of size n."""

    n: int
    cls: MapClass
    histogram: dict[int, int]
    total: int

    def mean(self) -> Fraction:
        return Fraction(sum(l * c for l, c in self.histogram.items()), self.total)

    def variance(self) -> Fraction:
        mu = self.mean()
        ex2 = Fraction(sum(l * l * c for l, c in self.histogram.items()), self.total)
        return ex2 - mu * mu

    def factorial_moment(self, k: int) -> Fraction:
        num = 0
        for l, c in self.histogram.items():
            t = 1
            for j in range(k):
                t *= l - j
            num += t * c
        return Fraction(num, self.total)


@dataclass
class LabeledConfigCounts:
    n: int
    k: int
    m_circ: int
    m_circ_cross: int


@dataclass
class DegreeStats:
    n: int
    cls: MapClass
    histogram: dict[int, int]
    total: int

    def mean(self) -> Fraction:
        return Fraction(sum(d * c for d, c in self.histogram.items()), self.total)

    def max_degree(self) -> int:
        return max(self.histogram) if self.histogram else 0

    def tail_frequency(self, threshold: int) -> Fraction:
        num = sum(c for d, c in self.histogram.items() if d > threshold)
        return Fraction(num, self.total)


def _is_fly(p) -> bool:
    from .maps import fly_map

    return p.map.canonical_code() == fly_map().canonical_code()


def _occurrence_counts(n: int, cls: MapClass, p, limit=None) -> np.ndarray:
    run = generate(n, cls, limit=limit)
    if n == 0 or run.total == 0:
        return np.zeros(run.total, np.int64)
    if _is_fly(p):
        counts, _ = kernels.fly_stats(run.codes)
        return counts
    from .patterns import find_occurrences

    out = np.zeros(run.total, np.int64)
    for i, m in enumerate(run.iter_maps()):
        out[i] = len(find_occurrences(m, p))
    return out


def exact_distribution(n: int, cls: MapClass, p, limit=None) -> DistributionTable:
    run_total_counts = _occurrence_counts(n, cls, p, limit=limit)
    total = int(run_total_counts.shape[0])
    if total == 0:
        return DistributionTable(n=n, cls=cls, histogram={}, total=0)
    hist_arr = np.bincount(run_total_counts)
    hist = {int(l): int(c) for l, c in enumerate(hist_arr) if c}
    return DistributionTable(n=n, cls=cls, histogram=hist, total=total)


def labeled_config_counts(n: int, k: int, cls: MapClass, p, pairwise_only: bool = False, limit=None) -> LabeledConfigCounts:
    """Counts of maps with k labelled occurrences (falling-factorial
    semantics); with ``pairwise_only`` each labelled occurrence may intersect
    at most one other labelled occurrence."""
    if k < 0:
        raise MapError("k >= 0")
    run = generate(n, cls, limit=limit)
    if k == 0:
        return LabeledConfigCounts(n=n, k=0, m_circ=run.total, m_circ_cross=run.total)
    fly = _is_fly(p)
    if fly and k <= 2:
        counts, _ = kernels.fly_stats(run.codes)
        m = 0
        for x in counts.tolist():
            t = 1
            for j in range(k):
                t *= x - j
            m += t
        return LabeledConfigCounts(n=n, k=k, m_circ=m, m_circ_cross=m)
    if fly and k == 3:
        counts, good3 = kernels.fly_stats(run.codes, want_triples=True)
        if np.any(good3 < 0):  # occurrence overflow; fall through to python
            pass
        else:
            m = 0
            for x in counts.tolist():
                m += x * (x - 1) * (x - 2)
            mx = 6 * int(good3.sum())
            return LabeledConfigCounts(n=n, k=3, m_circ=m, m_circ_cross=mx if pairwise_only else mx)
    # general reference path
    from itertools import combinations

    from .patterns import find_occurrences, occurrences_intersect

    m_circ = 0
    m_cross = 0
    fact = 1
    for j in range(1, k + 1):
        fact *= j
    for m in run.iter_maps():
        occs = find_occurrences(m, p)
        x = len(occs)
        t = 1
        for j in range(k):
            t *= x - j
        m_circ += t
        if x < k:
            continue
        inter = [[False] * x for _ in range(x)]
        for i in range(x):
            for j in range(i + 1, x):
                hit = occurrences_intersect(occs[i], occs[j])
                inter[i][j] = inter[j][i] = hit
        for sub in combinations(range(x), k):
            ok = True
            for a in sub:
                deg = sum(1 for b in sub if b != a and inter[a][b])
                if deg > 1:
                    ok = False
                    break
            if ok:
                m_cross += fact
    return LabeledConfigCounts(n=n, k=k, m_circ=m_circ, m_circ_cross=m_cross)


def degree_stats(n: int, cls: MapClass, limit=None) -> DegreeStats:
    run = generate(n, cls, limit=limit)
    if n == 0:
        return DegreeStats(n=0, cls=cls, histogram={0: run.total}, total=run.total)
    degs = kernels.degree_stats_batch(run.codes)
    hist_arr = np.bincount(degs)
    hist = {int(d): int(c) for d, c in enumerate(hist_arr) if c}
    return DegreeStats(n=n, cls=cls, histogram=hist, total=run.total)


# ---------------------------------------------------------------------------
# cache files
# ---------------------------------------------------------------------------

_BIN_MAGIC = b"PMAPSBIN"
_BIN_VERSION = 1


def write_binary_cache(path: str, run: EnumerationRun) -> None:
    """Versioned binary records: u32 dart count, sigma, alpha (u32 each), u32 root."""
    with open(path, "wb") as fh:
        fh.write(_BIN_MAGIC)
        fh.write(struct.pack("<III", _BIN_VERSION, run.n, 0))
        fh.write(struct.pack("<Q", run.total))
        D = 2 * run.n
        for row in run.codes:
            fh.write(struct.pack("<I", D))
            if D:
                fh.write(np.asarray(row[:D], "<u4").tobytes())
                fh.write(np.asarray(row[D:], "<u4").tobytes())
            fh.write(struct.pack("<i", 0 if D else -1))


def read_binary_cache(path: str, expect_n: int | None = None) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(8) != _BIN_MAGIC:
            raise MapError(f"{path}: not a map cache file")
        version, n, _ = struct.unpack("<III", fh.read(12))
        if version != _BIN_VERSION:
            raise MapError(f"{path}: unsupported cache version {version}")
        if expect_n is not None and n != expect_n:
            raise MapError(f"{path}: cache holds n={n}, expected {expect_n}")
        (count,) = struct.unpack("<Q", fh.read(8))
        D = 2 * n
        rows = np.zeros((count, 2 * D), np.uint8)
        for i in range(count):
            (d,) = struct.unpack("<I", fh.read(4))
            if d != D:
                raise MapError(f"{path}: record {i} has dart count {d}, expected {D}")
            if D:
                buf = np.frombuffer(fh.read(8 * D), "<u4")
                rows[i, :D] = buf[:D]
                rows[i, D:] = buf[D:]
            fh.read(4)
        return rows


def write_text_cache(path: str, run: EnumerationRun) -> None:
    from .maps import to_text

    with open(path, "w", encoding="utf-8") as fh:
        for m in run.iter_maps():
            fh.write(to_text(m).replace("\n", ";")[:-1] + "\n")


def read_text_cache(path: str) -> list[RootedMap]:
    from .maps import from_text

    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(from_text(line.replace(";", "\n")))
    return out
