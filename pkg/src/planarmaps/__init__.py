"""Exact enumeration, pattern counting and series analysis for rooted planar maps."""

__version__ = "0.1.0"

from .maps import (  # noqa: F401
    FaceInfo,
    MapClass,
    MapError,
    RootedMap,
    atomic_map,
    bridge_map,
    canonical_code,
    class_membership,
    faces,
    fly_map,
    from_text,
    has_partial_simple_boundary,
    load_map,
    loop_map,
    parallel_edges_map,
    polygon_map,
    save_map,
    to_text,
)
