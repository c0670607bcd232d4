"""Exhaustive bounded refutation of vertex tuples.

``refute(t, radius)`` searches every way of completing fans outward from a
root vertex until all vertices within ``radius`` layers of it are complete.
Exhausting the tree proves that no map of type ``t`` exists at all, since
any such map would contain such a patch around each of its vertices.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .builder import DEFAULT_BUDGET, root_words
from .classify import classify
from .growth import OLDEST, SWEEP, DepthFirst, FanAutomaton, Growth
from .mapcore import CombMap, verify
from .tuples import angle_sum, as_tuple

REFUTED = "refuted"
WITNESS = "witness"
INCONCLUSIVE = "inconclusive"
NOT_RUN = "not_run"  # cross-check row skipped after the wall-clock deadline


@dataclass
class Certificate:
    outcome: str
    tuple: tuple
    radius: int
    nodes: int
    elapsed: float
    roots: int = 0
    root_word: Optional[tuple] = None
    map: Optional[CombMap] = field(default=None, repr=False)
    budget: int = 0
    timed_out: bool = False

    def to_json(self, with_map: bool = False, timing: bool = False) -> dict:
        out = {
            "outcome": self.outcome,
            "tuple": list(self.tuple),
            "radius": self.radius,
            "nodes": self.nodes,
            "roots": self.roots,
        }
        if timing:
            out["elapsed"] = round(self.elapsed, 6)
        if self.outcome == INCONCLUSIVE:
            out["budget"] = self.budget
            if self.timed_out:
                out["timed_out"] = True
        if self.root_word is not None:
            out["root_fan"] = list(self.root_word)
        if with_map and self.map is not None:
            from .mapcore import to_json

            out["map"] = to_json(self.map)
        return out


def shells(radius: int) -> int:
    """Number of growth shells for a radius: layers 0..radius complete."""
    return radius + 1


def all_root_words(t) -> list:
    """Every distinct cyclic arrangement of the root fan (no reduction)."""
    return sorted(set(itertools.permutations(as_tuple(t).components)))


PORTFOLIO = "PORTFOLIO"
# nodes a strand runs before the next one gets its turn
CHUNK = 2048
RESTART_UNIT = 256


class _CompleteStrand:
    """Complete depth-first search over every root fan in turn."""

    complete = True

    def __init__(self, A, words, shells_, order):
        self.A, self.R, self.order = A, shells_, order
        self.todo = list(words)
        self.cur = None
        self.roots = 0
        self.nodes = 0

    def _next_root(self) -> bool:
        while self.todo:
            word = self.todo.pop(0)
            g = Growth(self.A, self.R, order=self.order)
            if g.start_fan([self.A.index[k] for k in word]):
                self.roots += 1
                self.cur = (word, DepthFirst(g))
                return True
        self.cur = None
        return False

    def step(self, n: int):
        """Returns WITNESS, REFUTED or None (budget slice used up)."""
        while n > 0:
            if self.cur is None and not self._next_root():
                return REFUTED
            word, dfs = self.cur
            before = dfs.nodes
            res = dfs.run(n)
            used = res.nodes - before
            self.nodes += used
            n -= used
            if res.found:
                return WITNESS
            if res.exhausted:
                self.cur = None
        return None

    def witness(self):
        word, dfs = self.cur
        return word, dfs.g


class _RestartStrand:
    """Shuffled restarts in sweep order on a Luby schedule.

    Each restart is itself a complete search of one root, so a restart that
    exhausts its tree removes that root; when no root is left the tuple is
    refuted just as by the plain strands.
    """

    complete = True

    def __init__(self, A, words, shells_):
        self.A, self.R = A, shells_
        self.live = []
        for word in words:
            if Growth(A, shells_).start_fan([A.index[k] for k in word]):
                self.live.append(word)
        self.roots = len(self.live)
        self.attempt = 0
        self.pos = 0
        self.cur = None
        self.nodes = 0

    def _start(self):
        from .builder import luby

        word = self.live[self.pos]
        g = Growth(self.A, self.R, order=SWEEP, seed=1 + self.attempt * 7919 + self.pos)
        g.start_fan([self.A.index[k] for k in word])
        self.cur = (word, DepthFirst(g), RESTART_UNIT * luby(self.attempt + 1))

    def _advance(self):
        self.pos += 1
        if self.pos >= len(self.live):
            self.pos = 0
            self.attempt += 1
        self.cur = None

    def step(self, n: int):
        while n > 0:
            if not self.live:
                return REFUTED
            if self.cur is None:
                self._start()
            word, dfs, cap = self.cur
            before = dfs.nodes
            res = dfs.run(min(n, cap - dfs.nodes))
            used = res.nodes - before
            self.nodes += used
            n -= used
            if res.found:
                return WITNESS
            if res.exhausted:
                self.live.remove(word)
                if self.pos >= len(self.live):
                    self.pos = 0
                    self.attempt += 1
                self.cur = None
            elif dfs.nodes >= cap:
                self._advance()
        return None

    def witness(self):
        word, dfs, _ = self.cur
        return word, dfs.g


def _strands(A, words, shells_, order):
    if order == PORTFOLIO:
        return [_CompleteStrand(A, words, shells_, OLDEST), _CompleteStrand(A, words, shells_, SWEEP),
                _RestartStrand(A, words, shells_)]
    if order in (OLDEST, SWEEP):
        return [_CompleteStrand(A, words, shells_, order)]
    raise ValueError(f"unknown search order {order!r}")


def refute(t, radius: int = 3, budget: int = DEFAULT_BUDGET, reduce_symmetry: bool = True,
           materialize: bool = True, order: str = PORTFOLIO, chunk: int = CHUNK,
           time_limit: Optional[float] = None) -> Certificate:
    """Complete bounded search for a patch of the given radius.

    The default order runs three searches side by side in fixed slices of
    ``chunk`` nodes: oldest-vertex-first, layer sweep, and shuffled sweep
    restarts. Each is complete on its own, so whichever first exhausts its
    tree refutes the tuple and whichever first completes a patch is the
    witness. The slice schedule is fixed, so the outcome is deterministic.
    ``time_limit`` (seconds) stops the search between slices; the result is
    then inconclusive and marked ``timed_out``, and depends on timing.
    """
    t = as_tuple(t)
    if t.has_inf:
        raise ValueError("apeirogon entries cannot be searched")
    if radius < 1:
        raise ValueError("radius must be >= 1")
    t0 = time.perf_counter()
    A = FanAutomaton(t)
    words = root_words(t) if reduce_symmetry else all_root_words(t)
    strands = _strands(A, words, shells(radius), order)
    roots = max(s.roots for s in strands) if strands else 0
    nodes = 0
    outcome = None
    winner = None
    timed_out = False
    while outcome is None:
        for s in strands:
            left = budget - nodes
            if left <= 0:
                outcome = INCONCLUSIVE
                break
            if time_limit is not None and time.perf_counter() - t0 > time_limit:
                outcome, timed_out = INCONCLUSIVE, True
                break
            before = s.nodes
            r = s.step(min(chunk, left))
            nodes += s.nodes - before
            if r is not None:
                outcome, winner = r, s
                break
    elapsed = time.perf_counter() - t0
    roots = max(roots, max(s.roots for s in strands))
    if outcome == WITNESS:
        word, g = winner.witness()
        m = None
        if materialize:
            m = g.to_map()
            rep = verify(m, t)
            if not rep.passed:
                raise AssertionError(f"witness fails verification: {rep.violations[:3]}")
        return Certificate(WITNESS, t.components, radius, nodes, elapsed, roots, tuple(word), m)
    if outcome == INCONCLUSIVE:
        return Certificate(INCONCLUSIVE, t.components, radius, nodes, elapsed, roots, budget=budget,
                           timed_out=timed_out)
    return Certificate(REFUTED, t.components, radius, nodes, elapsed, roots)


def refute_each_root(t, radius: int, budget: int = DEFAULT_BUDGET, reduce_symmetry: bool = True) -> dict:
    """Outcome per root arrangement, without stopping at the first witness."""
    t = as_tuple(t)
    A = FanAutomaton(t)
    words = root_words(t) if reduce_symmetry else all_root_words(t)
    out = {}
    for word in words:
        g = Growth(A, shells(radius))
        if not g.start_fan([A.index[k] for k in word]):
            out[tuple(word)] = REFUTED
            continue
        res = g.search(budget)
        out[tuple(word)] = WITNESS if res.found else (REFUTED if res.exhausted else INCONCLUSIVE)
    return out


def canonical_word(word) -> tuple:
    n = len(word)
    imgs = [tuple(word[i:]) + tuple(word[:i]) for i in range(n)]
    imgs += [tuple(reversed(r)) for r in imgs]
    return min(imgs)


# -- cross-check -------------------------------------------------------------------

FATAL = "FATAL"          # classified No, yet a witness patch exists
WEAK = "WEAK"            # classified No, not refuted within radius/budget
REFUTED_YES = "REFUTED_YES"  # classified Yes, yet the search refutes it
OPEN_YES = "OPEN_YES"    # classified Yes, search inconclusive


@dataclass
class CrossCheckRow:
    tuple: tuple
    exists: bool
    rule: str
    outcome: str
    nodes: int
    elapsed: float
    flag: Optional[str] = None
    timed_out: bool = False

    def to_json(self, timing: bool = False) -> dict:
        out = {"tuple": list(self.tuple), "exists": self.exists, "rule": self.rule,
               "outcome": self.outcome, "nodes": self.nodes, "flag": self.flag}
        if self.timed_out:
            out["timed_out"] = True
        if timing:
            out["elapsed"] = round(self.elapsed, 6)
        return out


@dataclass
class CrossCheckReport:
    rows: list
    radius: int
    budget: int
    elapsed: float
    deadline: Optional[float] = None

    @property
    def completed(self) -> bool:
        return all(r.outcome != NOT_RUN and not r.timed_out for r in self.rows)

    def flagged(self, flag: str) -> list:
        return [r for r in self.rows if r.flag == flag]

    @property
    def n_fatal(self) -> int:
        return len(self.flagged(FATAL))

    def summary(self, timing: bool = False) -> dict:
        counts: dict = {}
        for r in self.rows:
            key = f"{'yes' if r.exists else 'no'}/{r.outcome}"
            counts[key] = counts.get(key, 0) + 1
        out = {
            "tuples": len(self.rows),
            "radius": self.radius,
            "budget": self.budget,
            "counts": dict(sorted(counts.items())),
            "flags": {f: [list(r.tuple) for r in self.flagged(f)] for f in (FATAL, WEAK, REFUTED_YES, OPEN_YES)},
            "completed": self.completed,
        }
        if timing:
            out["elapsed"] = round(self.elapsed, 3)
        return out

    def to_json(self, timing: bool = False) -> dict:
        out = self.summary(timing)
        out["rows"] = [r.to_json(timing) for r in self.rows]
        return out


def flag_for(exists: bool, outcome: str) -> Optional[str]:
    if outcome == NOT_RUN:
        return None
    if not exists:
        if outcome == WITNESS:
            return FATAL
        if outcome != REFUTED:
            return WEAK
        return None
    if outcome == REFUTED:
        return REFUTED_YES
    if outcome == INCONCLUSIVE:
        return OPEN_YES
    return None


def degree4_family(max_entry: int = 13, min_entry: int = 3) -> list:
    """Sorted 4-tuples with entries in range and angle sum at least 2."""
    out = []
    for c in itertools.combinations_with_replacement(range(min_entry, max_entry + 1), 4):
        t = as_tuple(list(c))
        if angle_sum(t).value >= 2:
            out.append(t)
    return out


def cross_check(family: Iterable, radius: int = 3, budget: int = DEFAULT_BUDGET, progress=None,
                deadline: Optional[float] = None) -> CrossCheckReport:
    """Compare the closed-form classification with exhaustive search.

    With ``deadline`` (seconds), the search running when it passes is cut
    short (inconclusive, ``timed_out``) and later tuples are recorded as
    NOT_RUN instead of searched.
    """
    t0 = time.perf_counter()
    rows = []
    for t in family:
        t = as_tuple(t)
        v = classify(t)
        left = None if deadline is None else deadline - (time.perf_counter() - t0)
        if left is not None and left <= 0:
            rows.append(CrossCheckRow(t.components, v.exists, v.rule, NOT_RUN, 0, 0.0))
            continue
        cert = refute(t, radius, budget, materialize=False, time_limit=left)
        row = CrossCheckRow(t.components, v.exists, v.rule, cert.outcome, cert.nodes, cert.elapsed,
                            flag_for(v.exists, cert.outcome), cert.timed_out)
        rows.append(row)
        if progress is not None:
            progress(row)
    return CrossCheckReport(rows, radius, budget, time.perf_counter() - t0, deadline)
