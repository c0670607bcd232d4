"""Dart-based combinatorial maps of disk patches.

Every edge is a pair of opposite darts. Inner faces are traversed
counterclockwise by ``next``; darts on the patch boundary belong to the
distinguished face :data:`OUTER`, and following ``next`` along them walks the
boundary cycle clockwise (patch on the right).

For a dart ``d`` leaving ``v``, ``rot(d) = next[opp[d]]`` is the next dart
leaving ``v`` in clockwise order, so the faces of consecutive ``rot`` darts
enumerate the fan around ``v``.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .tuples import INF, CyclicType, TupleError, VertexTuple, as_tuple

OUTER = -1

Constraint = Union[VertexTuple, CyclicType]


class MapError(ValueError):
    """Base class for combinatorial map errors."""


class MalformedError(MapError):
    """Serialized map cannot be parsed."""


class InvariantError(MapError):
    """Structural invariant of a disk patch fails."""


class IncompleteError(MapError):
    """Operation needs complete fans but a boundary vertex was found."""


class CombMap:
    """Half-edge combinatorial map of a disk patch.

    Parameters
    ----------
    opp, nxt, org, face : list of int
        Per-dart opposite dart, next dart in its face, origin vertex and face
        id (``OUTER`` for boundary darts).
    layer : list of int
        Per-vertex layer index (0 for the root).
    face_size : list of int
        Per inner face, its number of sides.
    constraint : VertexTuple or CyclicType, optional
        The type the patch is meant to realize.
    root_dart : int
        Dart anchoring canonical numbering; it leaves the root vertex.
    """

    def __init__(self, opp, nxt, org, face, layer, face_size, constraint=None, root_dart=0):
        self.opp = list(opp)
        self.nxt = list(nxt)
        self.org = list(org)
        self.face = list(face)
        self.layer = list(layer)
        self.face_size = list(face_size)
        self.constraint = constraint
        self.root_dart = root_dart
        self._index()

    def _index(self):
        nv = len(self.layer)
        self.vdart = [-1] * nv
        self.outer_dart = [-1] * nv
        self.fdart = [-1] * len(self.face_size)
        for d, v in enumerate(self.org):
            if not 0 <= v < nv:
                raise InvariantError(f"dart {d} has origin {v} outside vertex range")
            if self.vdart[v] < 0:
                self.vdart[v] = d
            f = self.face[d]
            if f == OUTER:
                if self.outer_dart[v] >= 0:
                    raise InvariantError(f"vertex {v} has two boundary darts (pinched patch)")
                self.outer_dart[v] = d
            else:
                if not 0 <= f < len(self.face_size):
                    raise InvariantError(f"dart {d} has face {f} outside face range")
                if self.fdart[f] < 0:
                    self.fdart[f] = d

    # -- construction -------------------------------------------------

    @classmethod
    def from_faces(cls, faces: Sequence[Sequence[int]], layer=None, constraint=None, root_vertex=0):
        """Build from counterclockwise vertex cycles of the inner faces."""
        opp: list = []
        nxt: list = []
        org: list = []
        fid: list = []
        by_edge = {}
        sizes = []
        nv = 1 + max(v for cyc in faces for v in cyc) if faces else 0
        for f, cyc in enumerate(faces):
            k = len(cyc)
            if k < 3:
                raise InvariantError(f"face {f} has size {k} < 3")
            sizes.append(k)
            base = len(org)
            for i in range(k):
                u, v = cyc[i], cyc[(i + 1) % k]
                if (u, v) in by_edge:
                    raise InvariantError(f"directed edge {u}->{v} used twice (faces are not consistently oriented)")
                by_edge[(u, v)] = base + i
                org.append(u)
                nxt.append(base + (i + 1) % k)
                fid.append(f)
                opp.append(-1)
        n_inner = len(org)
        for d in range(n_inner):
            u = org[d]
            v = org[nxt[d]]
            e = by_edge.get((v, u))
            if e is not None:
                opp[d] = e
        # boundary darts: reverse of every unmatched inner dart
        outer_from = {}
        for d in range(n_inner):
            if opp[d] < 0:
                u = org[d]
                v = org[nxt[d]]
                o = len(org)
                org.append(v)
                fid.append(OUTER)
                opp.append(d)
                nxt.append(-1)
                opp[d] = o
                if v in outer_from:
                    raise InvariantError(f"vertex {v} has two boundary darts (pinched patch)")
                outer_from[v] = o
        for o in range(n_inner, len(org)):
            end = org[opp[o]]
            nxt[o] = outer_from[end]
        if layer is None:
            layer = [0] * nv
        root_dart = 0
        for d in range(len(org)):
            if org[d] == root_vertex and fid[d] != OUTER:
                root_dart = d
                break
        return cls(opp, nxt, org, fid, layer, sizes, constraint, root_dart)

    # -- basic queries ------------------------------------------------

    @property
    def n_darts(self) -> int:
        return len(self.org)

    @property
    def n_vertices(self) -> int:
        return len(self.layer)

    @property
    def n_faces(self) -> int:
        return len(self.face_size)

    @property
    def n_edges(self) -> int:
        return len(self.org) // 2

    @property
    def root(self) -> int:
        return self.org[self.root_dart] if self.org else 0

    def head(self, d: int) -> int:
        return self.org[self.opp[d]]

    def rot(self, d: int) -> int:
        return self.nxt[self.opp[d]]

    def is_boundary(self, v: int) -> bool:
        return self.outer_dart[v] >= 0

    @property
    def boundary(self) -> list:
        return [self.outer_dart[v] >= 0 for v in range(self.n_vertices)]

    def out_darts(self, v: int) -> list:
        """Darts leaving ``v`` in clockwise order; for a boundary vertex the
        list starts with the dart after the boundary dart."""
        start = self.outer_dart[v]
        if start >= 0:
            start = self.rot(start)
        else:
            start = self.vdart[v]
        res = [start]
        d = self.rot(start)
        while d != start:
            res.append(d)
            d = self.rot(d)
            if len(res) > self.n_darts:
                raise InvariantError(f"rotation at vertex {v} does not close")
        return res

    def fan(self, v: int) -> list:
        """Inner faces around ``v`` in rotational order (partial fans are
        listed from one boundary edge to the other)."""
        return [self.face[d] for d in self.out_darts(v) if self.face[d] != OUTER]

    def fan_sizes(self, v: int) -> list:
        return [self.face_size[f] for f in self.fan(v)]

    def neighbors(self, v: int) -> list:
        return [self.head(d) for d in self.out_darts(v)]

    def face_darts(self, f: int) -> list:
        start = self.fdart[f]
        res = [start]
        d = self.nxt[start]
        while d != start:
            res.append(d)
            d = self.nxt[d]
        return res

    def face_vertices(self, f: int) -> list:
        return [self.org[d] for d in self.face_darts(f)]

    def faces(self) -> list:
        return [self.face_vertices(f) for f in range(self.n_faces)]

    def boundary_cycle(self) -> list:
        """Boundary vertices in clockwise order, from the smallest id."""
        bverts = [v for v in range(self.n_vertices) if self.outer_dart[v] >= 0]
        if not bverts:
            return []
        start = self.outer_dart[min(bverts)]
        res = [self.org[start]]
        d = self.nxt[start]
        while d != start:
            res.append(self.org[d])
            d = self.nxt[d]
        return res

    def interior_vertices(self) -> list:
        return [v for v in range(self.n_vertices) if self.outer_dart[v] < 0]

    def complete_faces(self) -> list:
        """Faces all of whose vertices are interior."""
        return [
            f for f in range(self.n_faces)
            if all(self.outer_dart[v] < 0 for v in self.face_vertices(f))
        ]

    def edge_faces(self, d: int) -> tuple:
        return self.face[d], self.face[self.opp[d]]

    def copy(self) -> "CombMap":
        return CombMap(self.opp, self.nxt, self.org, self.face, self.layer,
                       self.face_size, self.constraint, self.root_dart)

    def __repr__(self):
        return (f"CombMap(V={self.n_vertices}, E={self.n_edges}, F={self.n_faces}, "
                f"constraint={self.constraint!r})")


# -- constructors ------------------------------------------------------


def single_face(k: int) -> CombMap:
    """A lone k-gon; vertex 0 is the root."""
    if k < 3:
        raise InvariantError("face size must be >= 3")
    layer = [0] + [1] * (k - 1)
    return CombMap.from_faces([list(range(k))], layer=layer)


def new_fan(t, order: Optional[Sequence[int]] = None) -> CombMap:
    """One complete fan of type ``t`` around vertex 0.

    ``order`` is a permutation of ``range(degree)`` giving the cyclic order
    of the tuple's entries around the centre (identity by default).
    """
    t = as_tuple(t)
    if t.has_inf:
        raise TupleError("fans with apeirogons are not materialized")
    sizes = list(t.components)
    if order is None:
        order = range(len(sizes))
    order = list(order)
    if sorted(order) != list(range(len(sizes))):
        raise ValueError("order must be a permutation of range(degree)")
    word = [sizes[i] for i in order]
    return fan_from_word(word, constraint=t)


def fan_from_word(word: Sequence[int], constraint=None) -> CombMap:
    """Complete fan around vertex 0 with faces in the cyclic order ``word``."""
    d = len(word)
    # spoke vertex 1 + i separates face i - 1 from face i
    faces = []
    nv = d + 1
    for i, k in enumerate(word):
        extra = list(range(nv, nv + k - 3))
        nv += k - 3
        faces.append([0, 1 + i] + extra + [1 + (i + 1) % d])
    return CombMap.from_faces(faces, layer=[0] + [1] * (nv - 1), constraint=constraint)


# -- vertex types and face-cycles --------------------------------------


def vertex_type(m: CombMap, v: int, cyclic: bool = False):
    """Multiset (or cyclic word) of the face sizes around an interior vertex."""
    if m.is_boundary(v):
        raise IncompleteError(f"vertex {v} is on the boundary")
    sizes = m.fan_sizes(v)
    if cyclic:
        return CyclicType(tuple(sizes))
    return VertexTuple.of(sizes)


def face_cycle(m: CombMap, f: int) -> list:
    """Faces sharing an edge or a vertex with ``f``, in boundary-walk order.

    Each vertex ``q_i`` of ``f`` contributes the faces strictly between the
    neighbour across the previous edge and the neighbour across the next
    edge, followed by the latter; a face meeting ``f`` several times is
    listed with multiplicity.
    """
    darts = m.face_darts(f)
    for d in darts:
        if m.is_boundary(m.org[d]):
            raise IncompleteError(f"face {f} has boundary vertex {m.org[d]}")
    cycle = []
    for d in darts:
        # clockwise from d: f, N_i, middle..., N_{i-1}
        ring = []
        e = m.rot(d)
        while e != d:
            ring.append(m.face[e])
            e = m.rot(e)
        ring = ring[::-1]  # N_{i-1}, middle (ccw), N_i
        cycle.extend(ring[1:])
    return cycle


@dataclass(frozen=True)
class Frontier:
    """Boundary cycle of a patch, clockwise, with in-degrees."""

    entries: tuple  # ((vertex, in_degree), ...)

    def vertices(self) -> list:
        return [v for v, _ in self.entries]

    def __len__(self):
        return len(self.entries)


def frontier(m: CombMap) -> Frontier:
    entries = []
    for v in m.boundary_cycle():
        entries.append((v, len(m.out_darts(v)) - 2))
    return Frontier(tuple(entries))


def in_degree(fr: Frontier, v: int) -> int:
    """Number of edges from boundary vertex ``v`` into the patch interior."""
    for u, k in fr.entries:
        if u == v:
            return k
    raise KeyError(f"vertex {v} is not on the frontier")


# -- verification ---------------------------------------------------------


@dataclass
class VerifyReport:
    violations: list = field(default_factory=list)  # (item, kind, detail)

    @property
    def passed(self) -> bool:
        return not self.violations

    # `pass` is a keyword; expose both spellings
    def __bool__(self):
        return self.passed

    def kinds(self) -> set:
        return {k for _, k, _ in self.violations}

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "violations": [
                {"item": item, "kind": kind, "detail": detail}
                for item, kind, detail in self.violations
            ],
        }


def _structure_violations(m: CombMap) -> list:
    out = []
    n = m.n_darts
    if not (len(m.opp) == len(m.nxt) == len(m.face) == n):
        return [("map", "STRUCTURE", "dart arrays have different lengths")]
    for d in range(n):
        o = m.opp[d]
        if not 0 <= o < n or o == d or m.opp[o] != d:
            out.append((d, "STRUCTURE", "opposite is not a fixed-point-free involution"))
            continue
        nx = m.nxt[d]
        if not 0 <= nx < n:
            out.append((d, "STRUCTURE", "next dart out of range"))
            continue
        if m.org[nx] != m.org[o]:
            out.append((d, "STRUCTURE", "next dart does not start where the dart ends"))
        if m.face[nx] != m.face[d]:
            out.append((d, "STRUCTURE", "next dart lies in another face"))
        if m.face[d] == OUTER and m.face[o] == OUTER:
            out.append((d, "STRUCTURE", "edge with the outer face on both sides"))
    if out:
        return out
    if sorted(m.nxt) != list(range(n)):
        return [("map", "STRUCTURE", "next is not a permutation")]
    # face cycles
    seen = [False] * n
    for d in range(n):
        if seen[d]:
            continue
        cyc = 0
        e = d
        while not seen[e]:
            seen[e] = True
            cyc += 1
            e = m.nxt[e]
        f = m.face[d]
        if f != OUTER:
            if cyc != m.face_size[f]:
                out.append((f, "STRUCTURE", f"face cycle length {cyc} != size {m.face_size[f]}"))
            if m.face_size[f] < 3:
                out.append((f, "STRUCTURE", "face size < 3"))
    faces_seen = Counter(m.fdart[f] >= 0 for f in range(m.n_faces))
    if faces_seen[False]:
        out.append(("map", "STRUCTURE", "face without darts"))
    # vertex rotations are single cycles
    per_vertex = Counter(m.org)
    for v in range(m.n_vertices):
        if per_vertex[v] == 0:
            out.append((v, "STRUCTURE", "isolated vertex"))
            continue
        d0 = m.vdart[v]
        e = m.rot(d0)
        k = 1
        while e != d0 and k <= per_vertex[v]:
            e = m.rot(e)
            k += 1
        if k != per_vertex[v]:
            out.append((v, "STRUCTURE", "vertex rotation is not a single cycle"))
    # simple graph
    pairs = Counter()
    for d in range(n):
        u, w = m.org[d], m.org[m.opp[d]]
        if u == w:
            out.append((d, "STRUCTURE", "loop edge"))
        pairs[(u, w)] += 1
    for (u, w), c in pairs.items():
        if c > 1 and u < w:
            out.append(((u, w), "STRUCTURE", "multiple edge"))
    # boundary: one cycle of outer darts
    outer = [d for d in range(n) if m.face[d] == OUTER]
    if outer:
        e = m.nxt[outer[0]]
        k = 1
        while e != outer[0] and k <= len(outer):
            e = m.nxt[e]
            k += 1
        if k != len(outer):
            out.append(("boundary", "BOUNDARY", "outer darts form more than one cycle"))
    # Euler characteristic of a disk
    chi = m.n_vertices - m.n_edges + m.n_faces
    if chi != 1:
        out.append(("map", "EULER", f"V - E + F = {chi}, expected 1"))
    return out


def verify(m: CombMap, constraint=None) -> VerifyReport:
    """Check structure, interior vertex types and boundary partial fans.

    ``constraint`` is a VertexTuple (pseudo-homogeneous: multiset match) or a
    CyclicType (homogeneous: cyclic match, partial fans must be factors).
    Defaults to the map's own constraint.
    """
    if constraint is None:
        constraint = m.constraint
    elif not isinstance(constraint, CyclicType):
        constraint = as_tuple(constraint)
    report = VerifyReport()
    try:
        report.violations.extend(_structure_violations(m))
    except (IndexError, InvariantError) as exc:
        report.violations.append(("map", "STRUCTURE", str(exc)))
    if report.violations or constraint is None:
        return report
    if isinstance(constraint, CyclicType):
        d = constraint.degree
        for v in range(m.n_vertices):
            sizes = m.fan_sizes(v)
            if m.is_boundary(v):
                if len(sizes) >= d or not constraint.has_factor(sizes):
                    report.violations.append((v, "PARTIAL_FAN", f"{sizes} is not a factor of {constraint}"))
            elif not constraint.matches(sizes):
                report.violations.append((v, "VERTEX_TYPE", f"{sizes} != {constraint}"))
    else:
        target = Counter(constraint.components)
        d = constraint.degree
        for v in range(m.n_vertices):
            sizes = m.fan_sizes(v)
            have = Counter(sizes)
            if m.is_boundary(v):
                if len(sizes) >= d or any(have[k] > target[k] for k in have):
                    report.violations.append((v, "PARTIAL_FAN", f"{sorted(sizes)} not extendable to {constraint}"))
            elif have != target:
                report.violations.append((v, "VERTEX_TYPE", f"{sorted(sizes)} != {list(constraint)}"))
    return report


# -- serialization ----------------------------------------------------------


def _constraint_json(c):
    if c is None:
        return None, None
    if isinstance(c, CyclicType):
        return list(c.word), "homogeneous"
    return c.to_json(), "pseudo"


def canonical_order(m: CombMap) -> list:
    """Darts in BFS order from the root dart (via next, then opposite)."""
    if m.n_darts == 0:
        return []
    seen = [False] * m.n_darts
    order = []
    q = deque([m.root_dart])
    seen[m.root_dart] = True
    while q:
        d = q.popleft()
        order.append(d)
        for e in (m.nxt[d], m.opp[d]):
            if not seen[e]:
                seen[e] = True
                q.append(e)
    if len(order) != m.n_darts:
        raise InvariantError("map is not connected")
    return order


def canonicalize(m: CombMap) -> CombMap:
    order = canonical_order(m)
    dmap = {d: i for i, d in enumerate(order)}
    vmap: dict = {}
    fmap: dict = {}
    for d in order:
        v = m.org[d]
        if v not in vmap:
            vmap[v] = len(vmap)
        f = m.face[d]
        if f != OUTER and f not in fmap:
            fmap[f] = len(fmap)
    n = len(order)
    opp = [0] * n
    nxt = [0] * n
    org = [0] * n
    face = [0] * n
    for d, i in dmap.items():
        opp[i] = dmap[m.opp[d]]
        nxt[i] = dmap[m.nxt[d]]
        org[i] = vmap[m.org[d]]
        face[i] = OUTER if m.face[d] == OUTER else fmap[m.face[d]]
    layer = [0] * len(vmap)
    for v, i in vmap.items():
        layer[i] = m.layer[v]
    sizes = [0] * len(fmap)
    for f, i in fmap.items():
        sizes[i] = m.face_size[f]
    return CombMap(opp, nxt, org, face, layer, sizes, m.constraint, 0)


def to_json(m: CombMap) -> dict:
    c = canonicalize(m)
    tup, mode = _constraint_json(c.constraint)
    return {
        "tuple": tup,
        "mode": mode,
        "darts": [
            {"opp": c.opp[d], "next": c.nxt[d], "v": c.org[d], "f": c.face[d]}
            for d in range(c.n_darts)
        ],
        "faces": [{"size": s} for s in c.face_size],
        "vertices": [
            {"layer": c.layer[v], "boundary": c.outer_dart[v] >= 0}
            for v in range(c.n_vertices)
        ],
    }


def serialize(m: CombMap) -> bytes:
    """Canonical UTF-8 JSON, newline terminated."""
    return (json.dumps(to_json(m), separators=(",", ":")) + "\n").encode("utf-8")


def _want(cond, msg):
    if not cond:
        raise MalformedError(msg)


def deserialize(data: Union[bytes, str]) -> CombMap:
    try:
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
        obj = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedError(f"MALFORMED: {exc}") from None
    _want(isinstance(obj, dict), "MALFORMED: top level is not an object")
    for key in ("darts", "faces", "vertices"):
        _want(isinstance(obj.get(key), list), f"MALFORMED: missing list {key!r}")
    darts, faces, verts = obj["darts"], obj["faces"], obj["vertices"]
    n, nf, nv = len(darts), len(faces), len(verts)

    def _int(x, lo, hi, what):
        _want(isinstance(x, int) and not isinstance(x, bool) and lo <= x < hi,
              f"MALFORMED: bad {what} {x!r}")
        return x

    opp, nxt, org, face = [], [], [], []
    for rec in darts:
        _want(isinstance(rec, dict), "MALFORMED: dart record is not an object")
        opp.append(_int(rec.get("opp"), 0, n, "opp"))
        nxt.append(_int(rec.get("next"), 0, n, "next"))
        org.append(_int(rec.get("v"), 0, nv, "vertex"))
        face.append(_int(rec.get("f"), -1, nf, "face"))
    sizes = []
    for rec in faces:
        _want(isinstance(rec, dict), "MALFORMED: face record is not an object")
        sizes.append(_int(rec.get("size"), 3, 1 << 30, "face size"))
    layer = []
    for rec in verts:
        _want(isinstance(rec, dict), "MALFORMED: vertex record is not an object")
        layer.append(_int(rec.get("layer"), 0, 1 << 30, "layer"))
        _want(isinstance(rec.get("boundary"), bool), "MALFORMED: boundary flag")
    constraint = None
    tup, mode = obj.get("tuple"), obj.get("mode")
    if tup is not None:
        try:
            entries = [INF if x == "inf" else x for x in tup]
            constraint = CyclicType(tuple(entries)) if mode == "homogeneous" else VertexTuple.of(entries)
        except (TupleError, TypeError) as exc:
            raise MalformedError(f"MALFORMED: tuple: {exc}") from None
    try:
        m = CombMap(opp, nxt, org, face, layer, sizes, constraint, 0)
    except InvariantError as exc:
        raise InvariantError(f"invariant violation on load: {exc}") from None
    report = VerifyReport(_structure_violations(m))
    if not report.passed:
        raise InvariantError(f"invariant violation on load: {report.violations[:3]}")
    for v, rec in enumerate(verts):
        if rec["boundary"] != m.is_boundary(v):
            raise InvariantError(f"invariant violation on load: boundary flag of vertex {v}")
    return m
