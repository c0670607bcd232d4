"""Incremental face-attachment engine with undo, shared by builder and oracle.

The state is a disk patch whose boundary is a circular doubly linked list
(``bn``/``bp``; walking ``bn`` keeps the patch on the right). Each vertex
carries a state of a :class:`FanAutomaton` describing its partial fan, read
from the face at its ``bp`` edge to the face at its ``bn`` edge.

Attaching an ``n``-gon at the boundary edge ``(a, b = bn[a])`` glues it along
the longest boundary path around that edge whose inner vertices would have
complete fans; the remaining sides become new boundary vertices. All
mutations are recorded on a trail so the search can undo them.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .tuples import CyclicType, TupleError, as_tuple

_EDGE = 1 << 32


class FanAutomaton:
    """Deterministic automaton over linear partial fans.

    State 0 is the empty fan. ``app[s][i]`` / ``pre[s][i]`` give the state
    after adding a face of size ``sizes[i]`` at the end / start of the fan,
    or -1 when the result does not extend to a valid vertex fan.

    With a :class:`VertexTuple` the constraint is the multiset (pseudo mode);
    with a :class:`CyclicType` the fan must read as a factor of the cyclic
    word in some direction (homogeneous mode).
    """

    def __init__(self, constraint, labels=None):
        if isinstance(constraint, CyclicType):
            self.homogeneous = True
            self.word = constraint.word
            entries = self.word
            # optional per-position labels split equal sizes into distinct letters
            self.labels = tuple(labels) if labels is not None else self.word
            if len(self.labels) != len(self.word):
                raise ValueError("one label per word position")
        else:
            if labels is not None:
                raise ValueError("labels need a cyclic constraint")
            constraint = as_tuple(constraint)
            if constraint.has_inf:
                raise TupleError("apeirogon faces are not materialized")
            self.homogeneous = False
            entries = constraint.components
            self.labels = entries
        size_of = {}
        for lab, k in zip(self.labels, entries):
            if size_of.setdefault(lab, k) != k:
                raise ValueError(f"label {lab!r} used for two sizes")
        letters = sorted(size_of, key=lambda lab: (size_of[lab], repr(lab)))
        self.constraint = constraint
        self.letter_labels = tuple(letters)
        self.sizes = tuple(size_of[lab] for lab in letters)
        self.index = {lab: i for i, lab in enumerate(letters)}
        self.d = len(entries)
        self._build(Counter(entries))

    def _build(self, target: Counter):
        L = len(self.sizes)
        d = self.d
        if self.homogeneous:
            word = [self.index[lab] for lab in self.labels]
            empty = (0, ())

            def step(key, i, at_end):
                c, places = key
                if c == d:
                    return None
                if c == 0:
                    new = tuple(sorted((p, r) for p in range(d) if word[p] == i for r in (1, -1)))
                elif at_end:
                    new = tuple(pl for pl in places if word[(pl[0] + pl[1] * c) % d] == i)
                else:
                    new = tuple(sorted(((s - r) % d, r) for s, r in places if word[(s - r) % d] == i))
                return (c + 1, new) if new else None

            count_of = lambda key: key[0]
        else:
            need = tuple(target[k] for k in self.sizes)
            assert len(set(self.sizes)) == len(self.sizes)
            empty = tuple(0 for _ in self.sizes)

            def step(key, i, at_end):
                if key[i] >= need[i]:
                    return None
                return key[:i] + (key[i] + 1,) + key[i + 1:]

            count_of = sum
        ids = {empty: 0}
        keys = [empty]
        app, pre = [], []
        head = 0
        while head < len(keys):
            key = keys[head]
            head += 1
            row_a, row_p = [], []
            for i in range(L):
                for at_end, row in ((True, row_a), (False, row_p)):
                    nk = step(key, i, at_end)
                    if nk is None:
                        row.append(-1)
                        continue
                    if nk not in ids:
                        ids[nk] = len(keys)
                        keys.append(nk)
                    row.append(ids[nk])
            app.append(row_a)
            pre.append(row_p)
        self.keys = keys
        self.app = app
        self.pre = pre
        self.count = [count_of(k) for k in keys]
        self.avail_end = [sum(1 << i for i in range(L) if row[i] >= 0) for row in app]
        self.avail_start = [sum(1 << i for i in range(L) if row[i] >= 0) for row in pre]
        self.first = [app[0][i] for i in range(L)]

    @property
    def n_states(self) -> int:
        return len(self.keys)

    def run(self, sizes) -> int:
        """State of a linear fan read start to end, or -1."""
        s = 0
        for k in sizes:
            i = self.index.get(k)
            if i is None:
                return -1
            s = self.app[s][i]
            if s < 0:
                return -1
        return s


# attach plan: (letter, back, fwd, m) where back/fwd are lists of
# (vertex, new_state) walking away from the edge and m is the number of
# new vertices


DONE, DEAD, BRANCH = 0, 1, 2

OLDEST = "OLDEST"
SWEEP = "SWEEP"


@dataclass
class SearchResult:
    found: bool
    exhausted: bool
    nodes: int
    backtracks: int
    max_depth: int = 0

    @property
    def status(self) -> str:
        if self.found:
            return "found"
        return "exhausted" if self.exhausted else "budget"


class Growth:
    """Mutable patch plus the depth-first completion search.

    ``layers`` is the number of shells to complete: every vertex whose layer
    index is below it is a target that must end up with a complete fan.
    """

    def __init__(self, automaton: FanAutomaton, layers: int, order: str = OLDEST, seed: Optional[int] = None):
        if layers < 1:
            raise ValueError("layers must be >= 1")
        self.A = automaton
        self.R = layers
        self.order = order
        self.rng = random.Random(seed) if seed else None
        self.layer: list = []
        self.state: list = []
        self.bn: list = []
        self.bp: list = []
        self.fverts: list = []
        self.fletter: list = []
        self.adj: set = set()
        self.trail: list = []
        # boundary length, open targets, oldest-open pointer, sweep cursor
        self.sc = [0, 0, 0, -1]
        self.last = None
        self.nodes = 0

    # -- bookkeeping -------------------------------------------------------

    def mark(self):
        return (len(self.trail), len(self.layer), len(self.fverts))

    def undo(self, mark):
        n, nv, nf = mark
        trail = self.trail
        adj = self.adj
        while len(trail) > n:
            e = trail.pop()
            if type(e) is int:
                adj.discard(e)
            else:
                e[0][e[1]] = e[2]
        del self.layer[nv:], self.state[nv:], self.bn[nv:], self.bp[nv:]
        del self.fverts[nf:], self.fletter[nf:]

    @property
    def n_vertices(self) -> int:
        return len(self.layer)

    @property
    def n_faces(self) -> int:
        return len(self.fverts)

    def is_open(self, v: int) -> bool:
        return self.bn[v] >= 0

    def is_target(self, v: int) -> bool:
        return self.bn[v] >= 0 and self.layer[v] < self.R

    def in_degree(self, v: int) -> int:
        return self.A.count[self.state[v]] - 1

    def boundary(self, start: Optional[int] = None) -> list:
        if start is None:
            start = next(v for v in range(len(self.bn)) if self.bn[v] >= 0)
        res = [start]
        v = self.bn[start]
        while v != start:
            res.append(v)
            v = self.bn[v]
        return res

    # -- creation ----------------------------------------------------------

    def start_face(self, letter: int):
        """Seed the patch with one face; vertex 0 is the root (layer 0)."""
        if self.layer:
            raise RuntimeError("patch already started")
        n = self.A.sizes[letter]
        s = self.A.first[letter]
        self.layer.extend([0] + [1] * (n - 1))
        self.state.extend([s] * n)
        # face cycle 0, 1, ..., n-1; boundary runs the other way
        self.bn.extend((i - 1) % n for i in range(n))
        self.bp.extend((i + 1) % n for i in range(n))
        self.fverts.append(list(range(n)))
        self.fletter.append(letter)
        for i in range(n):
            u, w = i, (i + 1) % n
            self.adj.add(min(u, w) * _EDGE + max(u, w))
        self.sc[0] = n
        self.sc[1] = sum(1 for v in range(n) if self.layer[v] < self.R)
        self.sc[2] = 0
        self.last = (0, 0)

    def start_fan(self, letters) -> bool:
        """Seed with a complete fan around the root, faces in the given order."""
        self.start_face(letters[0])
        for i in letters[1:]:
            p = self.plan(0, self.bn[0], i)
            if p is None:
                return False
            self.apply(p)
        return self.bn[0] < 0

    # -- attaching -----------------------------------------------------------

    def plan(self, a: int, b: int, letter: int):
        A = self.A
        app, pre, cnt, d = A.app, A.pre, A.count, A.d
        state = self.state
        nb = self.sc[0]
        s = app[state[a]][letter]
        if s < 0:
            return None
        back = [(a, s)]
        x = a
        while cnt[s] == d:
            x = self.bp[x]
            s = app[state[x]][letter]
            if s < 0 or len(back) >= nb:
                return None
            back.append((x, s))
        s = pre[state[b]][letter]
        if s < 0:
            return None
        fwd = [(b, s)]
        y = b
        while cnt[s] == d:
            y = self.bn[y]
            s = pre[state[y]][letter]
            if s < 0 or len(fwd) >= nb:
                return None
            fwd.append((y, s))
        total = len(back) + len(fwd)
        if total > nb:
            return None
        m = A.sizes[letter] - total
        if m < 0:
            return None
        if m == 0:
            p0, pj = back[-1][0], fwd[-1][0]
            if nb - total + 2 < 3 or min(p0, pj) * _EDGE + max(p0, pj) in self.adj:
                return None
        return (letter, back, fwd, m)

    def options(self, a: int, b: int) -> list:
        A = self.A
        mask = A.avail_end[self.state[a]] & A.avail_start[self.state[b]]
        res = []
        i = 0
        while mask:
            if mask & 1:
                p = self.plan(a, b, i)
                if p is not None:
                    res.append(p)
            mask >>= 1
            i += 1
        return res

    def apply(self, plan) -> int:
        letter, back, fwd, m = plan
        tr = self.trail
        layer, state, bn, bp = self.layer, self.state, self.bn, self.bp
        R = self.R
        sc = self.sc
        f = len(self.fverts)
        path = [v for v, _ in reversed(back)]
        path.extend(v for v, _ in fwd)
        lmin = min(layer[v] for v in path)
        opened = 0
        for v, s in back:
            tr.append((state, v, state[v]))
            state[v] = s
        for v, s in fwd:
            tr.append((state, v, state[v]))
            state[v] = s
        for chain in (back, fwd):
            for k in range(len(chain) - 1):
                v = chain[k][0]
                tr.append((bn, v, bn[v]))
                tr.append((bp, v, bp[v]))
                bn[v] = -1
                bp[v] = -1
                if layer[v] < R:
                    opened -= 1
        p0 = back[-1][0]
        pj = fwd[-1][0]
        base = len(layer)
        nl = lmin + 1
        s1 = self.A.first[letter]
        for _ in range(m):
            layer.append(nl)
            state.append(s1)
            bn.append(-1)
            bp.append(-1)
        if nl < R:
            opened += m
        chain = [p0]
        chain.extend(range(base, base + m))
        chain.append(pj)
        adj = self.adj
        for k in range(len(chain) - 1):
            u, w = chain[k], chain[k + 1]
            if u < base:
                tr.append((bn, u, bn[u]))
            bn[u] = w
            if w < base:
                tr.append((bp, w, bp[w]))
            bp[w] = u
            key = u * _EDGE + w if u < w else w * _EDGE + u
            if key not in adj:
                adj.add(key)
                tr.append(key)
        cyc = path
        cyc.extend(range(base + m - 1, base - 1, -1))
        self.fverts.append(cyc)
        self.fletter.append(letter)
        tr.append((sc, 0, sc[0]))
        sc[0] += m + 2 - (len(back) + len(fwd))
        if opened:
            tr.append((sc, 1, sc[1]))
            sc[1] += opened
        ptr = sc[2]
        n = len(layer)
        while ptr < n and (bn[ptr] < 0 or layer[ptr] >= R):
            ptr += 1
        if ptr != sc[2]:
            tr.append((sc, 2, sc[2]))
            sc[2] = ptr
        self.last = (p0, pj)
        return f

    # -- search --------------------------------------------------------------

    def _near_edges(self):
        bn, bp = self.bn, self.bp
        out = []
        p0, pj = self.last
        for v in (p0, pj):
            if bn[v] < 0:
                continue
            u = bp[v]
            w = bn[v]
            out.append((bp[u], u))
            out.append((u, v))
            out.append((v, w))
            out.append((w, bn[w]))
        return out

    def decide(self):
        """Return (DONE, None), (DEAD, None) or (BRANCH, plans)."""
        sc = self.sc
        if sc[1] == 0:
            return DONE, None
        bn, layer, R = self.bn, self.layer, self.R
        seen = set()
        for a, b in self._near_edges():
            if (a, b) in seen:
                continue
            seen.add((a, b))
            if layer[a] >= R and layer[b] >= R:
                continue
            if not self.options(a, b):
                return DEAD, None
        t = self._pick_vertex()
        e1 = (self.bp[t], t)
        e2 = (t, bn[t])
        o2 = self.options(*e2)
        if not o2:
            return DEAD, None
        if self.order == SWEEP:
            return BRANCH, self._order(o2)
        o1 = self.options(*e1)
        if not o1:
            return DEAD, None
        return BRANCH, self._order(o1 if len(o1) < len(o2) else o2)

    def _order(self, opts):
        if self.rng is not None and len(opts) > 1:
            opts = list(opts)
            self.rng.shuffle(opts)
        return opts

    def _pick_vertex(self) -> int:
        if self.order != SWEEP:
            return self.sc[2]
        bn, bp, layer, R = self.bn, self.bp, self.layer, self.R
        cnt, st = self.A.count, self.state
        cur = self.sc[3]
        lo = layer[self.sc[2]]
        if cur >= 0 and bn[cur] >= 0 and layer[cur] == lo:
            return cur
        # continue clockwise from the last attachment, staying in the lowest open layer
        start = self.last[1] if cur >= 0 else self.sc[2]
        if bn[start] < 0:
            start = self.sc[2]
        v = start
        pick = -1
        while True:
            if layer[v] == lo and layer[v] < R:
                if cur >= 0:
                    pick = v
                    break
                u = bp[v]
                # a layer starts after a free vertex or two consecutive in-degree-1 vertices
                if cnt[st[u]] == 1 or (cnt[st[u]] == 2 and cnt[st[v]] == 2):
                    pick = v
                    break
            v = bn[v]
            if v == start:
                break
        if pick < 0:
            pick = self.sc[2]
        self.trail.append((self.sc, 3, cur))
        self.sc[3] = pick
        return pick

    def search(self, budget: int) -> SearchResult:
        """Depth-first completion of all target vertices."""
        return DepthFirst(self).run(budget)

    # -- export --------------------------------------------------------------

    def faces(self) -> list:
        return [list(c) for c in self.fverts]

    def to_map(self):
        from .mapcore import CombMap

        return CombMap.from_faces(self.faces(), layer=list(self.layer),
                                  constraint=self.A.constraint, root_vertex=0)


class DepthFirst:
    """Resumable depth-first completion search over one :class:`Growth`.

    ``run(n)`` explores at most ``n`` more nodes and can be called again to
    continue where it stopped; the patch is left in the state of the current
    search node.
    """

    def __init__(self, g: Growth):
        self.g = g
        self.frames = None  # [mark, plans, next index]
        self.nodes = 0
        self.backtracks = 0
        self.max_depth = 0
        self.found = False
        self.exhausted = False
        self._paused = False

    def result(self) -> SearchResult:
        return SearchResult(self.found, self.exhausted, self.nodes, self.backtracks, self.max_depth)

    def run(self, budget: int) -> SearchResult:
        g = self.g
        if self.found or self.exhausted:
            return self.result()
        if self.frames is None:
            kind, plans = g.decide()
            if kind == DONE:
                self.found = True
                return self.result()
            if kind == DEAD:
                self.exhausted = True
                return self.result()
            self.frames = [[g.mark(), plans, 0]]
            self.max_depth = 1
        frames = self.frames
        used = 0
        nodes0 = self.nodes
        try:
            while frames:
                fr = frames[-1]
                if fr[2] > 0 and not self._paused:
                    g.undo(fr[0])
                    self.backtracks += 1
                self._paused = False
                if fr[2] >= len(fr[1]):
                    frames.pop()
                    continue
                if used >= budget:
                    self._paused = True
                    return self.result()
                plan = fr[1][fr[2]]
                fr[2] += 1
                g.apply(plan)
                used += 1
                self.nodes += 1
                kind, plans = g.decide()
                if kind == DONE:
                    self.found = True
                    return self.result()
                if kind == BRANCH:
                    frames.append([g.mark(), plans, 0])
                    if len(frames) > self.max_depth:
                        self.max_depth = len(frames)
            self.exhausted = True
            return self.result()
        finally:
            g.nodes += self.nodes - nodes0
