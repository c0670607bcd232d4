"""Derived constructions that turn one map into another.

Each construction reads the interior of an input patch and emits a face
soup: consistently oriented vertex cycles over new vertex labels. Only output
faces whose every ingredient is fully determined by complete input vertices
are emitted. :func:`replay` then grows a layered disk patch inside the soup,
so the result carries layer indices exactly like a directly built patch.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

from .growth import OLDEST, FanAutomaton, Growth
from .mapcore import OUTER, CombMap
from .tuples import CyclicType, as_tuple


class ConstructionError(ValueError):
    """Input map does not have the structure a construction requires."""


class SoupBoundaryError(ConstructionError):
    """Replay walked off the emitted part of the soup."""


@dataclass
class Soup:
    faces: list  # vertex-label cycles, consistently oriented
    root: Hashable  # label of the preferred root vertex

    def relabel(self) -> "Soup":
        ids: dict = {}
        out = []
        for cyc in self.faces:
            out.append([ids.setdefault(v, len(ids)) for v in cyc])
        root = ids.get(self.root, 0)
        return Soup(out, root)


def orient_faces(faces: Sequence[Sequence[Hashable]]) -> list:
    """Reverse faces as needed so that every shared edge is traversed in
    opposite directions by its two faces. Raises on a non-orientable soup."""
    faces = [list(c) for c in faces]
    by_edge: dict = {}
    for f, cyc in enumerate(faces):
        for i in range(len(cyc)):
            key = frozenset((cyc[i], cyc[(i + 1) % len(cyc)]))
            by_edge.setdefault(key, []).append(f)
    for key, fs in by_edge.items():
        if len(fs) > 2:
            raise ConstructionError(f"edge {tuple(key)} lies on {len(fs)} faces")

    def directed(f):
        cyc = faces[f]
        return {(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))}

    done = [False] * len(faces)
    for s in range(len(faces)):
        if done[s]:
            continue
        done[s] = True
        q = deque([s])
        while q:
            f = q.popleft()
            df = directed(f)
            for u, v in df:
                for g in by_edge[frozenset((u, v))]:
                    if g == f:
                        continue
                    dg = directed(g)
                    if not done[g]:
                        if (u, v) in dg:
                            faces[g].reverse()
                        done[g] = True
                        q.append(g)
                    elif (u, v) in dg:
                        raise ConstructionError("face soup is not orientable")
    return faces


# -- input helpers ------------------------------------------------------------


def _interior_mask(m: CombMap) -> list:
    return [not m.is_boundary(v) for v in range(m.n_vertices)]


def _check_homogeneous(m: CombMap, word: CyclicType):
    for v in m.interior_vertices():
        if not word.matches(m.fan_sizes(v)):
            raise ConstructionError(f"vertex {v} has type {m.fan_sizes(v)}, expected {word}")


def _full_faces(m: CombMap, interior) -> list:
    return [f for f in range(m.n_faces) if all(interior[v] for v in m.face_vertices(f))]


# -- edge contraction -----------------------------------------------------------


def contract_even_pairs(m: CombMap, keep: Optional[int] = None) -> Soup:
    """[2p, 2q, 2s] -> [2p, q, 2p, s].

    At each vertex exactly one edge avoids the ``keep``-gon (default: the
    smallest size); contracting all those edges halves the other faces.
    """
    if m.constraint is None:
        raise ConstructionError("input map carries no vertex type")
    sizes = sorted(as_tuple(m.constraint).components)
    if len(sizes) != 3 or any(k % 2 for k in sizes):
        raise ConstructionError(f"expected a degree-3 tuple of even sizes, got {sizes}")
    keep = sizes[0] if keep is None else keep
    rest = list(sizes)
    if keep not in rest:
        raise ConstructionError(f"{keep} is not a face size of {sizes}")
    rest.remove(keep)
    if keep in rest or min(rest) < 6:
        raise ConstructionError(f"contraction of {sizes} keeping {keep} is not of type [2p,q,2p,s] with q, s >= 3")
    interior = _interior_mask(m)
    for v in range(m.n_vertices):
        if interior[v] and sorted(m.fan_sizes(v)) != sizes:
            raise ConstructionError(f"vertex {v} does not have type {sizes}")
    parent = list(range(m.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for d in range(m.n_darts):
        f1, f2 = m.face[d], m.face[m.opp[d]]
        if f1 == OUTER or f2 == OUTER:
            continue
        if m.face_size[f1] != keep and m.face_size[f2] != keep:
            parent[find(m.org[d])] = find(m.head(d))
    full = _full_faces(m, interior)
    faces = []
    for f in full:
        cyc = [find(v) for v in m.face_vertices(f)]
        out = [v for i, v in enumerate(cyc) if v != cyc[i - 1]]
        faces.append(out)
    return Soup(faces, find(m.root))


# -- rectification-truncation ------------------------------------------------------


def _prev_in_face(m: CombMap, d: int) -> int:
    p = d
    while m.nxt[p] != d:
        p = m.nxt[p]
    return p


def rect_truncate(m: CombMap) -> Soup:
    """[2p, 2q, 2p, 2q] -> [3, 3, 3p, 3q].

    Edges are 2-coloured dotted/smooth. A dotted edge keeps one point (its
    midpoint), a smooth edge keeps two (one near each end). Every input face
    becomes the polygon through the points on its edges; every input vertex
    becomes two triangles glued along the segment joining its smooth points.
    """
    if m.constraint is None:
        raise ConstructionError("input map carries no vertex type")
    sizes = sorted(as_tuple(m.constraint).components)
    if len(sizes) != 4 or sizes[0] != sizes[1] or sizes[2] != sizes[3] or sizes[0] % 2 or sizes[2] % 2:
        raise ConstructionError(f"expected [2p,2q,2p,2q], got {sizes}")
    interior = _interior_mask(m)
    for v in range(m.n_vertices):
        if interior[v]:
            fs = m.fan_sizes(v)
            if fs[0] != fs[2] or fs[1] != fs[3] or fs[0] == fs[1] and sizes[0] != sizes[2]:
                raise ConstructionError(f"vertex {v} does not alternate {sizes}")
    color = edge_two_coloring(m, interior)
    DOT = 0

    def near(d):
        # point on the edge of dart d next to its origin
        e = min(d, m.opp[d])
        return ("m", e) if color[e] == DOT else ("s", d)

    faces = []
    for v in range(m.n_vertices):
        if not interior[v]:
            continue
        darts = m.out_darts(v)
        cols = [color[min(d, m.opp[d])] for d in darts]
        if cols[0] != cols[2] or cols[1] != cols[3] or cols[0] == cols[1]:
            raise ConstructionError(f"colouring fails at vertex {v}")
        k = 0 if cols[0] == DOT else 1
        a, b, c, e = (darts[(k + i) % 4] for i in range(4))
        # a, c dotted; b, e smooth
        faces.append([near(a), near(b), near(e)])
        faces.append([near(b), near(c), near(e)])
    for f in _full_faces(m, interior):
        cyc = []
        for d in m.face_darts(f):
            e = min(d, m.opp[d])
            if color[e] == DOT:
                cyc.append(("m", e))
            else:
                cyc.append(("s", d))
                cyc.append(("s", m.opp[d]))
        faces.append(cyc)
    root_darts = [d for d in m.out_darts(m.root)] if interior[m.root] else []
    root = next((("s", d) for d in root_darts if color[min(d, m.opp[d])] != DOT), faces[0][0] if faces else None)
    return Soup(orient_faces(faces), root)


def edge_two_coloring(m: CombMap, interior=None) -> dict:
    """Colour edges 0/1 so that consecutive edges around every interior
    vertex differ. Keys are the smaller dart of each edge."""
    if interior is None:
        interior = _interior_mask(m)
    color: dict = {}
    for v0 in range(m.n_vertices):
        if not interior[v0]:
            continue
        d0 = m.out_darts(v0)[0]
        e0 = min(d0, m.opp[d0])
        if e0 in color:
            continue
        color[e0] = 0
        q = deque([e0])
        while q:
            e = q.popleft()
            for d in (e, m.opp[e]):
                if not interior[m.org[d]]:
                    continue
                for x in (m.rot(d), m.opp[_prev_in_face(m, d)]):
                    ex = min(x, m.opp[x])
                    want = 1 - color[e]
                    if ex in color:
                        if color[ex] != want:
                            raise ConstructionError("edges do not admit the alternating 2-colouring")
                    else:
                        color[ex] = want
                        q.append(ex)
    return color


# -- restricted cantellation ----------------------------------------------------------

CANTELLATION_ROLES = ("A", "B", "C", "D", "E")


def cantellation_input_word(k3: int, k4: int) -> CyclicType:
    return CyclicType((k3 // 2, 4, k4 // 2, k3, k4))


def _face_roles(m: CombMap, word: tuple) -> dict:
    """Role letter of every face touching an interior vertex, read from the
    unique placement of the word at each vertex."""
    roles: dict = {}
    d = len(word)
    for v in m.interior_vertices():
        fan = m.fan(v)
        sizes = [m.face_size[f] for f in fan]
        hits = []
        for s in range(d):
            for r in (1, -1):
                if all(sizes[j] == word[(s + r * j) % d] for j in range(d)):
                    hits.append((s, r))
        if len(hits) != 1:
            raise ConstructionError(f"vertex {v}: fan {sizes} does not fix the roles uniquely")
        s, r = hits[0]
        for j, f in enumerate(fan):
            role = CANTELLATION_ROLES[(s + r * j) % d]
            if roles.setdefault(f, role) != role:
                raise ConstructionError(f"face {f} plays roles {roles[f]} and {role}")
    return roles


def cantellate_restricted(m: CombMap, k3: int, k4: int, roles: Optional[dict] = None) -> Soup:
    """[k3/2, 4, k4/2, k3, k4] -> [3, 4, k3, k4] for k3 = 4p, k4 = 4q.

    The five faces at an input vertex v play roles A, B, C, D, E in cyclic
    order. v is replaced by a triangle with corners in B, D and E; corners
    lying in a common face are joined, which yields inner copies of the B, D
    and E faces, a quadrilateral across every D|E edge, and k3-/k4-gons in
    place of the A- and C-faces.
    """
    if k3 % 4 or k4 % 4 or k3 >= k4 or k3 <= 4:
        raise ConstructionError("need k3 = 4p < k4 = 4q with k3 > 4")
    word = cantellation_input_word(k3, k4).word
    if roles is None:
        roles = _face_roles(m, word)
    interior = _interior_mask(m)
    for v in m.interior_vertices():
        if sorted(m.fan_sizes(v)) != sorted(word):
            raise ConstructionError(f"vertex {v} does not have type {word}")

    def pt(v, f):
        return (roles[f], v)

    faces = []
    for v in m.interior_vertices():
        fan = m.fan(v)
        by_role = {roles[f]: f for f in fan}
        faces.append([pt(v, by_role["B"]), pt(v, by_role["D"]), pt(v, by_role["E"])])
    full = _full_faces(m, interior)
    for f in full:
        role = roles.get(f)
        verts = m.face_vertices(f)
        if role in ("B", "D", "E"):
            faces.append([pt(v, f) for v in verts])
        elif role in ("A", "C"):
            cyc = []
            darts = m.face_darts(f)
            for i, d in enumerate(darts):
                v = m.org[d]
                before = m.face[m.opp[darts[i - 1]]]
                after = m.face[m.opp[d]]
                cyc.append(pt(v, before))
                cyc.append(pt(v, after))
            faces.append(cyc)
    seen = set()
    for d in range(m.n_darts):
        u, w = m.org[d], m.head(d)
        e = min(d, m.opp[d])
        if e in seen or not (interior[u] and interior[w]):
            continue
        f1, f2 = m.face[d], m.face[m.opp[d]]
        if {roles.get(f1), roles.get(f2)} == {"D", "E"}:
            seen.add(e)
            fd = f1 if roles[f1] == "D" else f2
            fe = f2 if fd == f1 else f1
            faces.append([pt(u, fd), pt(w, fd), pt(w, fe), pt(u, fe)])
    root = m.root
    if not interior[root]:
        root = m.interior_vertices()[0]
    rb = next(f for f in m.fan(root) if roles[f] == "B")
    return Soup(orient_faces(faces), pt(root, rb))


# -- replay ------------------------------------------------------------------------------


def replay(soup: Soup, constraint, layers: int) -> CombMap:
    """Grow a disk patch with ``layers`` complete layers inside the soup.

    The growth engine picks boundary edges exactly as a direct build would;
    the soup decides which face goes there. Raises :class:`SoupBoundaryError`
    if the growth needs a face the soup does not contain.
    """
    g = Growth(FanAutomaton(constraint), layers)
    _replay_into(g, soup, strict=True)
    return g.to_map()


def replay_prefix(soup: Soup, constraint, layers: int, order: str = OLDEST) -> Growth:
    """Like :func:`replay` but stop quietly at the first face the soup lacks
    and return the live growth state, ready for a search to continue."""
    g = Growth(FanAutomaton(constraint), layers, order=order)
    _replay_into(g, soup, strict=False)
    return g


def _replay_into(g: Growth, soup: Soup, strict: bool):
    A = g.A
    of_edge: dict = {}
    for f, cyc in enumerate(soup.faces):
        for i in range(len(cyc)):
            of_edge[(cyc[i], cyc[(i + 1) % len(cyc)])] = f
    root = soup.root
    start = next((f for (u, _), f in sorted(of_edge.items(), key=lambda kv: kv[1]) if u == root), None)
    if start is None:
        raise SoupBoundaryError("root lies on no face")
    cyc = soup.faces[start]
    i0 = cyc.index(root)
    g.start_face(A.index[len(cyc)])
    to_soup = {i: cyc[(i0 + i) % len(cyc)] for i in range(len(cyc))}
    to_engine = {s: i for i, s in to_soup.items()}
    while g.sc[1] > 0:
        a = g.sc[2] if g.sc[2] < g.n_vertices and g.is_target(g.sc[2]) else _first_target(g)
        b = g.bn[a]
        f = of_edge.get((to_soup[a], to_soup[b]))
        if f is None:
            if strict:
                raise SoupBoundaryError(f"no soup face beyond edge ({to_soup[a]}, {to_soup[b]})")
            return
        scyc = soup.faces[f]
        plan = g.plan(a, b, A.index[len(scyc)])
        if plan is None:
            raise ConstructionError(f"soup face {f} does not fit the patch")
        fid = g.apply(plan)
        ecyc = g.fverts[fid]
        ia = ecyc.index(a)
        isa = scyc.index(to_soup[a])
        n = len(scyc)
        for j in range(n):
            ev = ecyc[(ia + j) % n]
            sv = scyc[(isa + j) % n]
            if ev in to_soup:
                if to_soup[ev] != sv:
                    raise ConstructionError("soup and patch disagree about a shared vertex")
            else:
                if sv in to_engine:
                    raise SoupBoundaryError(f"soup vertex {sv!r} reached twice (patch would overlap itself)")
                to_soup[ev] = sv
                to_engine[sv] = ev


def _first_target(g: Growth) -> int:
    for v in range(g.n_vertices):
        if g.is_target(v):
            return v
    raise RuntimeError("no open target")
