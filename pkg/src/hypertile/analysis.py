"""Local counting statistics on built patches.

A triangle meets a larger face either in a single vertex (NABLA) or along a
single edge (DELTA). All counts are taken over faces whose neighbourhoods lie
entirely inside the patch, so adding layers never changes a counted record.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .mapcore import CombMap, IncompleteError, face_cycle
from .tuples import CyclicType, as_tuple, kh_word

NABLA = "NABLA"
DELTA = "DELTA"

THIRTY_FIVE_K3K4 = "THIRTY_FIVE_K3K4"
KH = "KH"


class AnalysisError(ValueError):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


@dataclass(frozen=True)
class AttachmentRecord:
    triangle: int
    relations: tuple  # ((face, NABLA | DELTA), ...) over larger faces

    def faces_with(self, relation: str, size: Optional[int] = None, m: Optional[CombMap] = None) -> list:
        out = [f for f, r in self.relations if r == relation]
        if size is not None:
            out = [f for f in out if m.face_size[f] == size]
        return out


@dataclass
class StatsReport:
    kind: str
    counts: dict = field(default_factory=dict)
    histogram: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "pass": self.passed,
            "checks": dict(self.checks),
            "counts": dict(self.counts),
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


# -- basic relations -------------------------------------------------------------


def _edge_neighbours(m: CombMap, f: int) -> list:
    return [m.face[m.opp[d]] for d in m.face_darts(f)]


def relation(m: CombMap, t: int, f: int) -> Optional[str]:
    """NABLA, DELTA or None (disjoint) for triangle ``t`` and face ``f``."""
    shared_edges = sum(1 for g in _edge_neighbours(m, t) if g == f)
    shared_vertices = len(set(m.face_vertices(t)) & set(m.face_vertices(f)))
    if shared_edges == 0 and shared_vertices == 0:
        return None
    if shared_edges == 1 and shared_vertices == 2:
        return DELTA
    if shared_edges == 0 and shared_vertices == 1:
        return NABLA
    raise AnalysisError("MULTIPLE_CONTACT", f"triangle {t} meets face {f} in {shared_vertices} vertices")


def attachments(m: CombMap, t: int) -> AttachmentRecord:
    """Relations of triangle ``t`` to every larger face at its vertices."""
    if m.face_size[t] != 3:
        raise AnalysisError("NOT_TRIANGLE", f"face {t} has size {m.face_size[t]}")
    seen = []
    for v in m.face_vertices(t):
        for f in m.fan(v):
            if f >= 0 and f != t and m.face_size[f] > 3 and f not in seen:
                seen.append(f)
    return AttachmentRecord(t, tuple((f, relation(m, t, f)) for f in sorted(seen)))


def face_type_of(m: CombMap, f: int) -> int:
    """Number of triangles in the face-cycle of ``f``."""
    try:
        cyc = face_cycle(m, f)
    except IncompleteError:
        raise AnalysisError("INCOMPLETE", f"face {f} touches the patch boundary") from None
    return sum(1 for g in cyc if m.face_size[g] == 3)


def _is_complete(m: CombMap, f: int) -> bool:
    return not any(m.is_boundary(v) for v in m.face_vertices(f))


def _triangle_split(m: CombMap, f: int) -> tuple:
    """(nabla, delta) triangles in the face-cycle of a complete face."""
    edge = set(g for g in _edge_neighbours(m, f) if m.face_size[g] == 3)
    cyc = [g for g in face_cycle(m, f) if m.face_size[g] == 3]
    delta = sum(1 for g in cyc if g in edge)
    return len(cyc) - delta, delta


def _tuple_of(m: CombMap, t=None):
    c = t if t is not None else m.constraint
    if c is None:
        raise AnalysisError("WRONG_CLASS", "map carries no vertex type")
    return c


def _require_35(m: CombMap, t=None):
    c = _tuple_of(m, t)
    comps = as_tuple(c.word if isinstance(c, CyclicType) else c).components
    ok = len(comps) == 4 and comps[0] == 3 and comps[1] == 5 and 10 <= comps[2] < comps[3] and comps[2] != 11
    if not ok:
        raise AnalysisError("WRONG_CLASS", f"expected [3,5,k3,k4] with 10 <= k3 < k4, k3 != 11, got {list(comps)}")
    return comps


# -- [3,5,k3,k4] -------------------------------------------------------------------


def pentagon_stats(m: CombMap, t=None) -> StatsReport:
    """Face types and triangle splits of the complete pentagons."""
    _require_35(m, t)
    pentagons = [f for f in range(m.n_faces) if m.face_size[f] == 5 and _is_complete(m, f)]
    hist: Counter = Counter()
    splits: Counter = Counter()
    nabla = delta = 0
    for f in pentagons:
        hist[face_type_of(m, f)] += 1
        n, d = _triangle_split(m, f)
        splits[f"{n}:{d}"] += 1
        nabla += n
        delta += d
    rep = StatsReport("pentagon_stats", histogram=dict(hist))
    rep.counts = {
        "complete_pentagons": len(pentagons),
        "nabla": nabla,
        "delta": delta,
        "per_pentagon_splits": dict(sorted(splits.items())),
    }
    rep.checks = {
        "all_type_4": all(k == 4 for k in hist),
        "per_pentagon_nabla1_delta3": set(splits) <= {"1:3"},
        "aggregate_nabla_delta_1_3": 3 * nabla == delta,
    }
    return rep


def _interior_triangles(m: CombMap) -> list:
    return [f for f in range(m.n_faces) if m.face_size[f] == 3 and _is_complete(m, f)]


def triangle_pentagon_bijection(m: CombMap, t=None) -> StatsReport:
    """Each interior triangle has one NABLA and one DELTA pentagon."""
    _require_35(m, t)
    tris = _interior_triangles(m)
    bad = []
    for x in tris:
        rec = attachments(m, x)
        nab = rec.faces_with(NABLA, 5, m)
        dl = rec.faces_with(DELTA, 5, m)
        if len(nab) != 1 or len(dl) != 1:
            bad.append(x)
    rep = StatsReport("triangle_pentagon_bijection")
    rep.counts = {"interior_triangles": len(tris), "violations": len(bad)}
    rep.checks = {"one_nabla_one_delta_pentagon": not bad}
    return rep


# -- the degree-14 family -----------------------------------------------------------------


def _require_kh(m: CombMap, t=None):
    c = _tuple_of(m, t)
    if not isinstance(c, CyclicType) or len(c.word) != 14:
        raise AnalysisError("WRONG_CLASS", "expected a homogeneous map of the degree-14 family")
    w = c.canonical()
    for s in range(14):
        for r in (1, -1):
            rot = tuple(w[(s + r * j) % 14] for j in range(14))
            if rot[0] == 3:
                k, l, mm = rot[2], rot[4], rot[6]
                if CyclicType(kh_word(k, l, mm)).canonical() == w:
                    return k, l, mm
    raise AnalysisError("WRONG_CLASS", f"{list(c.word)} is not of the degree-14 family")


def kh_incidence(m: CombMap, t=None) -> StatsReport:
    _require_kh(m, t)
    tris = _interior_triangles(m)
    edge_counts: Counter = Counter()
    vertex_counts: Counter = Counter()
    per_vertex: Counter = Counter()
    for x in tris:
        edge_p = [g for g in _edge_neighbours(m, x) if m.face_size[g] == 5]
        total = 0
        for v in m.face_vertices(x):
            k = sum(1 for g in m.fan(v) if m.face_size[g] == 5 and g not in edge_p)
            per_vertex[k] += 1
            total += k
        edge_counts[len(edge_p)] += 1
        vertex_counts[total] += 1
    pentagons = [f for f in range(m.n_faces) if m.face_size[f] == 5 and _is_complete(m, f)]
    lonely = [f for f in pentagons
              if not any(m.face_size[g] == 3 for v in m.face_vertices(f) for g in m.fan(v))]
    rep = StatsReport("kh_incidence")
    rep.counts = {
        "interior_triangles": len(tris),
        "edge_pentagons_per_triangle": dict(sorted(edge_counts.items())),
        "vertex_pentagons_per_triangle": dict(sorted(vertex_counts.items())),
        "vertex_pentagons_per_corner": dict(sorted(per_vertex.items())),
        "complete_pentagons": len(pentagons),
        "pentagons_without_triangle": len(lonely),
    }
    rep.checks = {
        "three_edge_pentagons": set(edge_counts) <= {3},
        "fifteen_vertex_pentagons": set(vertex_counts) <= {15},
        "five_per_corner": set(per_vertex) <= {5},
        "pentagon_meets_triangle": not lonely,
    }
    return rep


# -- counting obstruction summary --------------------------------------------------


def _ratio(a: int, b: int):
    if a == 0 and b == 0:
        return "N/A"
    if b == 0:
        return "inf"
    r = Fraction(a, b)
    return f"{r.numerator}:{r.denominator}"


def periodicity_obstruction_report(m: CombMap, cls: str, t=None) -> dict:
    """Both sides of the counting argument, evaluated on the patch interior.

    Only local counts are asserted; the report says nothing about infinite
    tilings. ``boundary_*`` entries bound how many records the trimmed
    boundary could still add.
    """
    if cls == THIRTY_FIVE_K3K4:
        _require_35(m, t)
        ps = pentagon_stats(m, t)
        tp = triangle_pentagon_bijection(m, t)
        tris = _interior_triangles(m)
        n_tri = len(tris)
        incomplete_p = sum(1 for f in range(m.n_faces) if m.face_size[f] == 5 and not _is_complete(m, f))
        return {
            "class": cls,
            "triangle_side": {"nabla": n_tri, "delta": n_tri, "ratio": _ratio(n_tri, n_tri),
                              "bijection_holds": tp.passed},
            "pentagon_side": {"nabla": ps.counts["nabla"], "delta": ps.counts["delta"],
                              "ratio": _ratio(ps.counts["nabla"], ps.counts["delta"]),
                              "all_type_4": ps.checks["all_type_4"]},
            "expected_pentagon_ratio": "1:3",
            "pentagon_ratio_matches": ps.checks["aggregate_nabla_delta_1_3"] and ps.counts["complete_pentagons"] > 0,
            "boundary_pentagons": incomplete_p,
            "boundary_triangles": sum(1 for f in range(m.n_faces) if m.face_size[f] == 3) - n_tri,
        }
    if cls == KH:
        _require_kh(m, t)
        rep = kh_incidence(m, t)
        tris = _interior_triangles(m)
        e = 3 * len(tris) if rep.checks["three_edge_pentagons"] else None
        edge_total = sum(k * c for k, c in rep.counts["edge_pentagons_per_triangle"].items())
        vertex_total = sum(k * c for k, c in rep.counts["vertex_pentagons_per_triangle"].items())
        pentagons = [f for f in range(m.n_faces) if m.face_size[f] == 5 and _is_complete(m, f)]
        p_edge = p_vertex = 0
        for f in pentagons:
            edge_t = {g for g in _edge_neighbours(m, f) if m.face_size[g] == 3}
            p_edge += len(edge_t)
            p_vertex += len({g for v in m.face_vertices(f) for g in m.fan(v)
                             if m.face_size[g] == 3 and g not in edge_t})
        return {
            "class": cls,
            "triangle_side": {"edge": edge_total, "vertex": vertex_total,
                              "ratio": _ratio(edge_total, vertex_total), "expected": "1:5",
                              "consistent": e is not None and rep.passed},
            "pentagon_side": {"edge": p_edge, "vertex": p_vertex, "ratio": _ratio(p_edge, p_vertex),
                              "complete_pentagons": len(pentagons)},
            "boundary_triangles": sum(1 for f in range(m.n_faces) if m.face_size[f] == 3) - len(tris),
        }
    raise AnalysisError("WRONG_CLASS", f"unknown class {cls!r}")
