"""Passing-pattern analytics for soccer match data."""

from ._core import (
    brute_force_mine,
    covered_area,
    detect_patterns,
    formation_line_count,
    load_match,
    nmf_fit,
    prefixspan,
    pressure,
    spatial_region,
)

__all__ = [
    "brute_force_mine",
    "covered_area",
    "detect_patterns",
    "formation_line_count",
    "load_match",
    "nmf_fit",
    "prefixspan",
    "pressure",
    "spatial_region",
]
