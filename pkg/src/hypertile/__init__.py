"""Pseudo-homogeneous hyperbolic tilings by regular polygons."""

from .tuples import (
    INF,
    AngleSum,
    CyclicType,
    Geometry,
    VertexTuple,
    angle_sum,
    format_tuple,
    geometry_class,
    parse_tuple,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "AngleSum",
    "CyclicType",
    "Geometry",
    "VertexTuple",
    "angle_sum",
    "format_tuple",
    "geometry_class",
    "parse_tuple",
]
