"""Admissibility of vertex tuples and of regular-polygon tile sets.

:func:`classify` is a closed-form decision tree. Every branch returns a rule
identifier naming the clause that decided it and, for admissible tuples, a
hint telling the builder which construction applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .tuples import Geometry, VertexTuple, angle_sum, as_tuple, geometry_class

# construction hints
LAYERED = "LAYERED"
CONTRACTION = "CONTRACTION"
RECT_TRUNCATE = "RECT_TRUNCATE"
CANTELLATION = "CANTELLATION"
T_LAYER = "T_LAYER"
FACE_CYCLE = "FACE_CYCLE"
BACKTRACK = "BACKTRACK"
NONE = "NONE"

EXISTENCE_RULES = frozenset({
    "DEG5_ANGLE_SUM",
    "DEG4_TRIANGLE_FREE",
    "THM4_33_MULT3",
    "THM4_33_EQUAL",
    "THM4_344K_CONTRACT",
    "THM4_34PP",
    "THM4_345K",
    "THM4_34_CANTELLATE",
    "THM4_355P",
    "THM4_35PP",
    "THM4_35_K3K4",
    "THM4_T_LAYER",
    "DG3_ALL_EQUAL",
    "DG3_TWO_EVEN_EQUAL",
    "DG3_ALL_EVEN",
    "APEIRO_EXISTS",
})

NONEXISTENCE_RULES = frozenset({
    "ANGLE_SUM",
    "THM4_ITEM_1",
    "THM4_ITEM_2A",
    "THM4_ITEM_2B",
    "THM4_ITEM_3A",
    "THM4_ITEM_3B",
    "DG3_NO_CLAUSE",
    "APEIRO_ITEM_1",
    "APEIRO_ITEM_2",
    "APEIRO_ITEM_3",
    "APEIRO_ITEM_4",
})


@dataclass(frozen=True)
class Verdict:
    exists: bool
    geometry: Geometry
    rule: str
    hint: str = NONE

    def to_json(self) -> dict:
        return {
            "exists": self.exists,
            "geometry": self.geometry.value,
            "rule": self.rule,
            "hint": self.hint,
        }


def _yes(t, rule, hint):
    return Verdict(True, geometry_class(t), rule, hint)


def _no(t, rule):
    return Verdict(False, geometry_class(t), rule, NONE)


def classify(t) -> Verdict:
    """Decide whether a planar pseudo-homogeneous map of type ``t`` exists."""
    t = as_tuple(t)
    value = angle_sum(t).value
    if t.has_inf:
        if value <= 2:
            return _no(t, "ANGLE_SUM")
        return _classify_apeirogon(t)
    if value < 2:
        return _no(t, "ANGLE_SUM")
    d = t.degree
    if d >= 5:
        return _yes(t, "DEG5_ANGLE_SUM", LAYERED)
    if d == 4:
        return _classify_degree4(t)
    return _classify_degree3(t)


def _classify_degree4(t: VertexTuple) -> Verdict:
    k1, k2, k3, k4 = t.components
    if k1 != 3:
        return _yes(t, "DEG4_TRIANGLE_FREE", LAYERED)
    if k2 == 3:
        # [3,3,3,k] never reaches the angle bound, so k3 >= 4 here
        if k3 == k4:
            hint = RECT_TRUNCATE if k3 % 3 == 0 else BACKTRACK
            return _yes(t, "THM4_33_EQUAL", hint)
        if k3 % 3 or k4 % 3:
            return _no(t, "THM4_ITEM_1")
        return _yes(t, "THM4_33_MULT3", RECT_TRUNCATE)
    if k2 == 4:
        if k3 == 4:
            return _yes(t, "THM4_344K_CONTRACT", CONTRACTION)
        if k3 == 5 and k4 == 5:
            return _no(t, "THM4_ITEM_2A")
        if k3 == k4:
            return _yes(t, "THM4_34PP", T_LAYER)
        if k3 == 5:
            return _yes(t, "THM4_345K", BACKTRACK)
        if k3 % 4 or k4 % 4:
            return _no(t, "THM4_ITEM_2B")
        return _yes(t, "THM4_34_CANTELLATE", CANTELLATION)
    if k2 == 5:
        if k3 == 5:
            return _yes(t, "THM4_355P", FACE_CYCLE)
        if k3 == k4:
            return _yes(t, "THM4_35PP", FACE_CYCLE)
        if k3 in (6, 7, 8, 9):
            return _no(t, "THM4_ITEM_3A")
        if k3 == 11:
            return _no(t, "THM4_ITEM_3B")
        return _yes(t, "THM4_35_K3K4", FACE_CYCLE)
    return _yes(t, "THM4_T_LAYER", T_LAYER)


def _classify_degree3(t: VertexTuple) -> Verdict:
    a, b, c = t.components
    hyperbolic = angle_sum(t).value > 2
    if a == b == c:
        if a >= 7:
            return _yes(t, "DG3_ALL_EQUAL", LAYERED)
        return _no(t, "DG3_NO_CLAUSE")
    # exactly two equal entries
    if a == b or b == c:
        even = b
        q = c if a == b else a
        if even % 2 == 0 and Fraction(2, even) + Fraction(1, q) < Fraction(1, 2):
            return _yes(t, "DG3_TWO_EVEN_EQUAL", BACKTRACK)
        return _no(t, "DG3_NO_CLAUSE")
    if a % 2 == 0 and b % 2 == 0 and c % 2 == 0 and hyperbolic:
        return _yes(t, "DG3_ALL_EVEN", BACKTRACK)
    return _no(t, "DG3_NO_CLAUSE")


def _classify_apeirogon(t: VertexTuple) -> Verdict:
    fin = t.finite
    d = t.degree
    if d == 3 and len(fin) == 2 and fin[0] != fin[1]:
        return _no(t, "APEIRO_ITEM_1")
    if d == 4 and len(fin) == 3 and fin[0] == 3:
        k2, k3 = fin[1], fin[2]
        if k2 == 3 and k3 % 3:
            return _no(t, "APEIRO_ITEM_2")
        if k2 == 4 and k3 % 4:
            return _no(t, "APEIRO_ITEM_3")
        if k2 == 5 and k3 in (6, 8, 9):
            return _no(t, "APEIRO_ITEM_4")
    return _yes(t, "APEIRO_EXISTS", NONE)


# -- tile sets -----------------------------------------------------------


@dataclass(frozen=True)
class TileSetVerdict:
    is_tiling_system: bool
    witnesses: tuple = ()
    rejected: tuple = ()
    side_length: float = 0.0
    angle_tol: float = 1e-9

    def to_json(self) -> dict:
        return {
            "is_tiling_system": self.is_tiling_system,
            "witnesses": [t.to_json() for t in self.witnesses],
            "rejected": [t.to_json() for t in self.rejected],
            "side_length": self.side_length,
            "angle_tol": self.angle_tol,
        }


def fan_multisets(sizes, side_length: float, angle_tol: float = 1e-9) -> list:
    """All multisets over ``sizes`` (degree >= 3) whose inner angles at the
    given side length sum to 2*pi within ``angle_tol``."""
    from .geometry import inner_angle

    if side_length <= 0:
        raise ValueError("side_length must be positive")
    sizes = sorted(set(int(k) for k in sizes))
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if sizes[0] < 3:
        raise ValueError("polygon sizes must be >= 3")
    angles = [inner_angle(k, side_length) for k in sizes]
    found = []
    chosen: list = []
    full = 2 * math.pi

    def extend(start, total):
        if len(chosen) >= 3 and abs(total - full) <= angle_tol:
            found.append(VertexTuple.of(chosen))
        for i in range(start, len(sizes)):
            # angles decrease with size, so the smallest remaining one is angles[-1]
            if total + angles[i] > full + angle_tol:
                continue
            chosen.append(sizes[i])
            extend(i, total + angles[i])
            chosen.pop()

    extend(0, 0.0)
    return sorted(found, key=lambda t: t.components)


def classify_tile_set(sizes, side_length: float, angle_tol: float = 1e-9) -> TileSetVerdict:
    """Do regular polygons of the given sizes and common side length tile the
    hyperbolic plane? Yes iff some admissible tuple forms a fan."""
    witnesses, rejected = [], []
    for t in fan_multisets(sizes, side_length, angle_tol):
        (witnesses if classify(t).exists else rejected).append(t)
    return TileSetVerdict(bool(witnesses), tuple(witnesses), tuple(rejected), side_length, angle_tol)
