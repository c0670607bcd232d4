"""Hyperbolic metric layer (curvature -1).

A regular n-gon with side ``l`` and inner angle ``theta`` satisfies
``cos(pi/n) = cosh(l/2) sin(theta/2)``. Everything here is built on that
relation: side lengths of vertex tuples, apeirogon side bounds, the
``[3^l, 4^k]`` scan, and Poincare-disk coordinates for combinatorial patches.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import mpmath as mp
from scipy.optimize import bisect

from .tuples import Geometry, angle_sum, as_tuple, geometry_class

TWO_PI = 2.0 * math.pi
_XTOL = 1e-15
_RTOL = 1e-15


class GeometryError(ValueError):
    """Raised with ``kind`` in {NOT_HYPERBOLIC, EUCLIDEAN, INF_ENTRY,
    NO_INF_ENTRY, INCONSISTENT, OUT_OF_RANGE, REALIZATION}."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


@dataclass(frozen=True)
class HypLength:
    value: float

    def __post_init__(self):
        if not self.value >= 0:
            raise GeometryError("OUT_OF_RANGE", f"length must be >= 0, got {self.value}")

    def __float__(self):
        return float(self.value)

    @property
    def cosh_half(self) -> float:
        return math.cosh(self.value / 2)


def inner_angle(n: int, ell) -> float:
    """Inner angle of the regular n-gon with side length ``ell``."""
    ell = float(ell)
    if ell < 0:
        raise GeometryError("OUT_OF_RANGE", "side length must be >= 0")
    return 2.0 * math.asin(math.cos(math.pi / n) / math.cosh(ell / 2))


def _angle_excess(sizes, ell: float) -> float:
    return sum(inner_angle(k, ell) for k in sizes) - TWO_PI


def _bracket_decreasing(f, hi: float = 1.0) -> float:
    while f(hi) > 0:
        hi = 2 * hi
        if hi > 1e3:
            raise GeometryError("INCONSISTENT", "no sign change found")
    return hi


def _root(f, lo: float, hi: float) -> float:
    return bisect(f, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=500)


def side_length(t) -> HypLength:
    """The unique side length at which the tuple's polygons fit around a vertex."""
    t = as_tuple(t)
    if t.has_inf:
        raise GeometryError("INF_ENTRY", f"{t} has an apeirogon; use feasible_side_interval")
    g = geometry_class(t)
    if g is Geometry.EUCLIDEAN:
        raise GeometryError("EUCLIDEAN", f"{t} has angle-sum 2; side length would be 0")
    if g is Geometry.SPHERICAL:
        raise GeometryError("NOT_HYPERBOLIC", f"{t} has angle-sum < 2")
    sizes = t.components
    f = lambda x: _angle_excess(sizes, x)
    hi = _bracket_decreasing(f)
    return HypLength(_root(f, 0.0, hi))


def apeirogon_min_side(theta: float) -> HypLength:
    """Smallest side length an apeirogon with inner angle ``theta`` may have."""
    if not 0 < theta < math.pi:
        raise GeometryError("OUT_OF_RANGE", f"angle must lie in (0, pi), got {theta}")
    # 2 artanh(cos(theta/2)) written so that small angles do not round cos to 1
    return HypLength(-2.0 * math.log(math.tan(theta / 4)))


@dataclass(frozen=True)
class SideInterval:
    """Open interval (lo, hi) of admissible side lengths; hi may be inf."""

    lo: float
    hi: float

    def __contains__(self, ell) -> bool:
        return self.lo < float(ell) < self.hi

    @property
    def empty(self) -> bool:
        return not self.lo < self.hi

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": None if math.isinf(self.hi) else self.hi}


def apeirogon_angle(t, ell: float) -> float:
    """Angle left for each apeirogon at side length ``ell`` (equal split)."""
    t = as_tuple(t)
    residual = TWO_PI - sum(inner_angle(k, ell) for k in t.finite)
    return residual / t.n_inf


def feasible_side_interval(t) -> SideInterval:
    """Side lengths at which the tuple's finite polygons and apeirogons fit,
    splitting the residual angle equally among the apeirogons."""
    t = as_tuple(t)
    m = t.n_inf
    if m == 0:
        raise GeometryError("NO_INF_ENTRY", f"{t} has no apeirogon; use side_length")
    if angle_sum(t).value <= 2:
        raise GeometryError("NOT_HYPERBOLIC", f"{t} has angle-sum <= 2")

    def g(x):
        if x == 0:
            return apeirogon_angle(t, 0.0) - math.pi
        return apeirogon_angle(t, x) - 2.0 * math.acos(math.tanh(x / 2))

    # g increases from (2 - angle-sum) * pi / m < 0 to 2 pi / m > 0
    hi = 1.0
    while g(hi) <= 0:
        hi *= 2
        if hi > 1e3:
            raise GeometryError("INCONSISTENT", f"{t}: residual angle never exceeds the bound")
    lo = _root(g, 0.0, hi)
    upper = math.inf
    if m == 1:
        # the single apeirogon's angle must stay below pi
        h = lambda x: math.pi - apeirogon_angle(t, x)
        top = 1.0
        while h(top) > 0:
            top *= 2
        upper = _root(h, 0.0, top)
    interval = SideInterval(lo, upper)
    if interval.empty:
        raise GeometryError("INCONSISTENT", f"{t}: empty interval")
    return interval


def match_lengths(t1, t2) -> float:
    """Signed difference of the two tuples' side lengths."""
    t1, t2 = as_tuple(t1), as_tuple(t2)
    if t1 == t2:
        return 0.0
    return side_length(t1).value - side_length(t2).value


@dataclass
class Scan34Report:
    rows: list  # (l, k, ell, cosh_half, ratio)
    min_gap: float
    closest: Optional[tuple]
    collisions: list
    ratio_error: float
    tol: float = 1e-9

    @property
    def distinct(self) -> bool:
        return not self.collisions

    def to_csv(self) -> str:
        lines = ["l,k,side_length,cosh_half,sin_ratio"]
        for l, k, ell, ch, ratio in self.rows:
            lines.append(f"{l},{k},{ell:.15g},{ch:.15g},{ratio:.15g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "count": len(self.rows),
            "min_gap": self.min_gap,
            "closest": list(self.closest) if self.closest else None,
            "collisions": [list(c) for c in self.collisions],
            "ratio_error": self.ratio_error,
            "distinct": self.distinct,
            "tol": self.tol,
        }


def scan_34_family(l_max: int, k_max: int, l_min: int = 0, k_min: int = 0, tol: float = 1e-9) -> Scan34Report:
    """Side lengths of all hyperbolic [3^l, 4^k] and their minimal pairwise gap."""
    if l_max < 0 or k_max < 0:
        raise ValueError("bounds must be >= 0")
    rows = []
    ratio_error = 0.0
    for l in range(l_min, l_max + 1):
        for k in range(k_min, k_max + 1):
            if l + k < 3:
                continue
            t = as_tuple([3] * l + [4] * k)
            if geometry_class(t) is not Geometry.HYPERBOLIC:
                continue
            ell = side_length(t).value
            a = inner_angle(3, ell)
            b = inner_angle(4, ell)
            ratio = math.sin(b / 2) / math.sin(a / 2)
            ratio_error = max(ratio_error, abs(ratio - math.sqrt(2)))
            rows.append((l, k, ell, math.cosh(ell / 2), ratio))
    gap = math.inf
    closest = None
    collisions = []
    ordered = sorted(rows, key=lambda r: r[2])
    for r1, r2 in zip(ordered, ordered[1:]):
        d = r2[2] - r1[2]
        if d < gap:
            gap, closest = d, ((r1[0], r1[1]), (r2[0], r2[1]))
        if d <= tol:
            collisions.append(((r1[0], r1[1]), (r2[0], r2[1])))
    return Scan34Report(rows, gap, closest, collisions, ratio_error, tol)


def check_mixed_34_identities() -> dict:
    """Solve the [3^4, 4^2] angle system and compare with its closed forms.

    4 alpha + 2 beta = 2 pi together with sin(beta/2) = sqrt(2) sin(alpha/2)
    force cos(alpha) = (sqrt(5) - 1)/2, and the common side length equals
    that of [5^4].
    """
    ell = side_length([3, 3, 3, 3, 4, 4]).value
    ell5 = side_length([5, 5, 5, 5]).value
    alpha = inner_angle(3, ell)
    beta = inner_angle(4, ell)
    sin2 = math.sin(alpha / 2) ** 2
    sqrt5 = math.sqrt(5.0)
    report = {
        "side_length": ell,
        "side_length_5_4": ell5,
        "cosh_half": math.cosh(ell / 2),
        "cosh_half_5_4": math.cosh(ell5 / 2),
        "alpha": alpha,
        "beta": beta,
        "sin2_half_alpha": sin2,
        "sin2_expected": (3 - sqrt5) / 4,
        "cos_alpha": math.cos(alpha),
        "cos_alpha_expected": (sqrt5 - 1) / 2,
        "two_cos_alpha_minus_cos_beta": 2 * math.cos(alpha) - math.cos(beta),
        "pentagon_pair_angle": 2 * inner_angle(5, ell5),
        "triangle_pair_square_angle": 2 * alpha + beta,
    }
    report["checks"] = {
        "sin2_half_alpha": abs(sin2 - (3 - sqrt5) / 4) <= 1e-12,
        "cos_alpha": abs(math.cos(alpha) - (sqrt5 - 1) / 2) <= 1e-12,
        "two_cos_alpha_minus_cos_beta": abs(report["two_cos_alpha_minus_cos_beta"] - 1) <= 1e-12,
        "equal_side_lengths": abs(ell - ell5) <= 1e-9,
        "pentagon_pair_is_straight": abs(report["pentagon_pair_angle"] - math.pi) <= 1e-9,
        "triangle_pair_square_is_straight": abs(report["triangle_pair_square_angle"] - math.pi) <= 1e-9,
    }
    report["pass"] = all(report["checks"].values())
    return report


# -- disk model ------------------------------------------------------------


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving isometry z -> (a z + b) / (conj(b) z + conj(a))
    of the unit disk, normalized so that |a|^2 - |b|^2 = 1."""

    a: complex
    b: complex

    @staticmethod
    def identity() -> "Isometry":
        return Isometry(1 + 0j, 0j)

    @staticmethod
    def rotation(phi: float) -> "Isometry":
        return Isometry(cmath.exp(0.5j * phi), 0j)

    @staticmethod
    def translation(p: complex) -> "Isometry":
        """The transvection along the diameter through p taking 0 to p.

        Works for Python complex and for mpmath mpc points alike.
        """
        s = (1 - abs(p) ** 2) ** -0.5
        return Isometry(s * (1 + 0j), p * s)

    def __call__(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.b.conjugate() * z + self.a.conjugate())

    def __matmul__(self, other: "Isometry") -> "Isometry":
        # [[a, b], [b*, a*]] times [[c, d], [d*, c*]]
        a = self.a * other.a + self.b * other.b.conjugate()
        b = self.a * other.b + self.b * other.a.conjugate()
        return Isometry(a, b).normalized()

    def inverse(self) -> "Isometry":
        return Isometry(self.a.conjugate(), -self.b)

    def normalized(self) -> "Isometry":
        det = abs(self.a) ** 2 - abs(self.b) ** 2
        s = det ** -0.5
        return Isometry(self.a * s, self.b * s)

    def matrix(self) -> list:
        return [[self.a, self.b], [self.b.conjugate(), self.a.conjugate()]]


def distance(z: complex, w: complex) -> float:
    """Hyperbolic distance in the Poincare disk."""
    q = abs(z - w) / abs(1 - z.conjugate() * w)
    return 2.0 * math.atanh(min(q, 1.0))


def corner_angle(p: complex, a: complex, b: complex) -> float:
    """Angle at p between the geodesics towards a and b."""
    to0 = Isometry.translation(p).inverse()
    ua, ub = to0(a), to0(b)
    ang = abs(cmath.phase(ub / ua))
    return ang


@dataclass
class Realization:
    side_length: float
    positions: list  # vertex id -> complex (None if unplaced)
    face_frames: list  # face id -> Isometry taking the standard polygon onto the face
    max_edge_error: float = 0.0
    max_angle_error: float = 0.0
    meta: dict = field(default_factory=dict)
    faces: list = field(default_factory=list)  # vertex cycles, counterclockwise

    def to_json(self) -> dict:
        return {
            "side_length": self.side_length,
            "positions": [[p.real, p.imag] for p in self.positions],
            "max_edge_error": self.max_edge_error,
            "max_angle_error": self.max_angle_error,
            "pose": "root vertex at 0, root edge along the positive real axis",
        }


REALIZE_DPS = 30


def realize(m, ell=None, tol: float = 1e-9, dps: int = REALIZE_DPS) -> Realization:
    """Place every face of a patch in the Poincare disk.

    Faces are reached breadth first from the root dart's face. The root
    vertex sits at the origin with the root edge on the positive real axis.
    Frames are composed with ``dps`` significant digits (outer vertices of
    large patches lie within 1e-5 of the unit circle, where double precision
    alone cannot hold distances to 1e-9). Edge lengths and interior angle
    sums are measured from the placed points and must agree with ``ell`` and
    2 pi within ``tol``. ``positions`` holds the points rounded to complex.
    """
    from .mapcore import OUTER

    if ell is None:
        if m.constraint is None:
            raise GeometryError("REALIZATION", "map has no tuple; pass the side length")
        ell = side_length(as_tuple(m.constraint)).value
    ell = float(ell)
    with mp.workdps(dps):
        L = mp.mpf(ell)
        zero = mp.mpc(0)
        step = Isometry.translation(mp.mpc(mp.tanh(L / 2)))
        flip = Isometry(mp.expj(mp.pi / 2), zero)
        steps = {}

        def edge_frame_steps(n):
            # standard edge frames S_0 = id, S_{j+1} = S_j T R(pi - theta)
            if n not in steps:
                theta = 2 * mp.asin(mp.cos(mp.pi / n) / mp.cosh(L / 2))
                adv = step @ Isometry(mp.expj((mp.pi - theta) / 2), zero)
                frames = [Isometry(mp.mpc(1), zero)]
                for _ in range(n - 1):
                    frames.append(frames[-1] @ adv)
                steps[n] = frames
            return steps[n]

        nf = m.n_faces
        frames: list = [None] * nf
        pos_in_face = {}
        for f in range(nf):
            for i, d in enumerate(m.face_darts(f)):
                pos_in_face[d] = i
        exact: list = [None] * m.n_vertices
        if nf:
            d0 = m.root_dart
            f0 = m.face[d0]
            if f0 == OUTER:
                d0 = m.nxt[m.opp[d0]]
                f0 = m.face[d0]
            # frame of the root dart's edge is the identity
            frames[f0] = edge_frame_steps(m.face_size[f0])[pos_in_face[d0]].inverse()
            queue = [f0]
            head = 0
            while head < len(queue):
                f = queue[head]
                head += 1
                sf = edge_frame_steps(m.face_size[f])
                for i, d in enumerate(m.face_darts(f)):
                    g = m.face[m.opp[d]]
                    if g == OUTER or frames[g] is not None:
                        continue
                    edge = frames[f] @ sf[i] @ step @ flip
                    j = pos_in_face[m.opp[d]]
                    frames[g] = edge @ edge_frame_steps(m.face_size[g])[j].inverse()
                    queue.append(g)
            std = {}
            for f in range(nf):
                if frames[f] is None:
                    raise GeometryError("REALIZATION", f"face {f} unreachable")
                n = m.face_size[f]
                if n not in std:
                    std[n] = [fr(zero) for fr in edge_frame_steps(n)]
                for i, d in enumerate(m.face_darts(f)):
                    v = m.org[d]
                    if exact[v] is None:
                        exact[v] = frames[f](std[n][i])
        edge_err, angle_err = _measure(m, exact, L)
        positions = [complex(z) for z in exact]
        float_frames = [Isometry(complex(fr.a), complex(fr.b)) for fr in frames]
    real = Realization(ell, positions, float_frames, faces=[m.face_vertices(f) for f in range(nf)])
    real.max_edge_error, real.max_angle_error = edge_err, angle_err
    real.meta = {"tol": tol, "dps": dps}
    if real.max_edge_error > tol or real.max_angle_error > tol:
        raise GeometryError(
            "REALIZATION",
            f"edge error {real.max_edge_error:.3g}, angle error {real.max_angle_error:.3g} exceed {tol}",
        )
    return real


def _mp_distance(z, w):
    return 2 * mp.atanh(abs(z - w) / abs(1 - mp.conj(z) * w))


def _measure(m, pos: list, L) -> tuple:
    """Largest edge-length and angle-sum errors, in the working precision."""
    from .mapcore import OUTER

    edge_err = mp.mpf(0)
    for d in range(m.n_darts):
        e = m.opp[d]
        if d < e:
            edge_err = max(edge_err, abs(_mp_distance(pos[m.org[d]], pos[m.org[e]]) - L))
    angle_err = mp.mpf(0)
    for v in m.interior_vertices():
        to0 = Isometry.translation(pos[v]).inverse()
        total = mp.mpf(0)
        for d in m.out_darts(v):
            # corner of face[d] at v lies between d and the previous dart of the face
            if m.face[d] == OUTER:
                continue
            prev = d
            while m.nxt[prev] != d:
                prev = m.nxt[prev]
            ua, ub = to0(pos[m.head(d)]), to0(pos[m.org[prev]])
            total += abs(mp.arg(ub / ua))
        angle_err = max(angle_err, abs(total - 2 * mp.pi))
    return float(edge_err), float(angle_err)
