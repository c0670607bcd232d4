"""Layer-by-layer patch construction for admissible vertex types.

Direct builds run the growth search. Tuples whose existence comes from a
derived construction are built by first growing the homogeneous input map,
transforming it into a face soup and replaying the soup layer by layer.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Union

from . import constructions as C
from .classify import (
    CANTELLATION,
    CONTRACTION,
    RECT_TRUNCATE,
    classify,
)
from .growth import OLDEST, SWEEP, FanAutomaton, Growth
from .mapcore import CombMap, verify
from .tuples import CyclicType, VertexTuple, angle_sum, as_tuple, kh_word

PSEUDO = "PSEUDO"
HOMOGENEOUS = "HOMOGENEOUS"
PAPER_GUIDED = "PAPER_GUIDED"
BACKTRACK = "BACKTRACK"

DEFAULT_BUDGET = 10_000_000
# nodes in the first guided attempt; later attempts follow the Luby schedule
RESTART_BASE = 1000


def default_budget() -> int:
    raw = os.environ.get("HYPERTILE_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


class BuildError(RuntimeError):
    """Build failure with a machine-readable ``kind``."""

    def __init__(self, kind: str, message: str, stats: Optional[dict] = None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.stats = stats or {}


@dataclass(frozen=True)
class BuildSpec:
    tuple: Union[VertexTuple, CyclicType]
    layers: int = 3
    mode: str = PSEUDO
    strategy: str = PAPER_GUIDED
    budget: int = field(default_factory=default_budget)
    seed: Optional[int] = None
    force: bool = False

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.mode not in (PSEUDO, HOMOGENEOUS):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.strategy not in (PAPER_GUIDED, BACKTRACK):
            raise ValueError(f"unknown strategy {self.strategy!r}")

    @property
    def constraint(self):
        if self.mode == HOMOGENEOUS:
            t = self.tuple
            return t if isinstance(t, CyclicType) else CyclicType(tuple(as_tuple(t).components))
        t = self.tuple
        return as_tuple(t.word if isinstance(t, CyclicType) else t)


@dataclass
class BuildResult:
    map: CombMap
    layers_built: int
    strategy_used: str
    stats: dict

    def to_json(self) -> dict:
        return {"layers_built": self.layers_built, "strategy": self.strategy_used, "stats": dict(self.stats)}


def luby(i: int) -> int:
    """The i-th term (1-based) of the Luby restart sequence 1,1,2,1,1,2,4,..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


def grow(constraint, layers: int, budget: int, order: str = OLDEST, seed=None, root_word=None,
         labels=None, restart_base: int = 0):
    """Run the completion search from a root fan; returns (Growth, stats).

    Every cyclic order of the root fan is tried in turn (one per dihedral
    class), so a failure means no patch exists for any root. With
    ``restart_base`` > 0 each root is searched by a deterministic series of
    shuffled restarts (Luby schedule) before the next root is tried.
    """
    A = FanAutomaton(constraint, labels)
    total = {"nodes": 0, "backtracks": 0, "roots": 0, "restarts": 0}
    if root_word is None and labels is not None:
        root_word = tuple(labels)
    words = [root_word] if root_word is not None else root_words(constraint)
    base_seed = 0 if seed is None else int(seed) * 1_000_003
    live = []
    for word in words:
        letters = [A.index[x] for x in word]
        if Growth(A, layers, order=order).start_fan(letters):
            live.append(letters)
    total["roots"] = len(live)
    attempt = 0
    while live:
        cap_base = budget if not restart_base else restart_base * luby(attempt + 1)
        for letters in list(live):
            left = budget - total["nodes"]
            if left <= 0:
                raise BuildError("BUDGET_EXHAUSTED", f"{budget} search nodes used", total)
            rng_seed = base_seed + attempt if (attempt or seed) else None
            g = Growth(A, layers, order=order, seed=rng_seed)
            g.start_fan(letters)
            res = g.search(min(left, cap_base))
            total["nodes"] += res.nodes
            total["backtracks"] += res.backtracks
            if res.found:
                return g, total
            if res.exhausted:
                live.remove(letters)
        attempt += 1
        total["restarts"] = attempt
    raise BuildError("NO_VALID_FAN", "search exhausted without a valid completion", total)


def root_words(constraint) -> list:
    """One representative per rotation/reflection class of root fans."""
    if isinstance(constraint, CyclicType):
        return [tuple(constraint.word)]
    from itertools import permutations

    seen, out = set(), []
    for p in sorted(set(permutations(constraint.components))):
        n = len(p)
        imgs = [p[i:] + p[:i] for i in range(n)]
        imgs += [tuple(reversed(r)) for r in imgs]
        c = min(imgs)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def build(spec: BuildSpec) -> BuildResult:
    """Build a verified patch with ``spec.layers`` complete layers."""
    constraint = spec.constraint
    multiset = as_tuple(constraint.word if isinstance(constraint, CyclicType) else constraint)
    if multiset.has_inf:
        raise BuildError("INF_ENTRY", "apeirogons are not materialized")
    verdict = classify(multiset)
    if spec.mode == PSEUDO and not verdict.exists and not spec.force:
        raise BuildError("NOT_ADMISSIBLE", f"{multiset} is excluded by rule {verdict.rule}")
    if spec.mode == HOMOGENEOUS and angle_sum(multiset).value < 2 and not spec.force:
        raise BuildError("NOT_ADMISSIBLE", f"{multiset} has angle sum below 2")
    if spec.mode == PSEUDO and spec.strategy == PAPER_GUIDED and verdict.exists:
        derived = _derived(multiset, verdict.hint, spec)
        if derived is not None:
            return derived
    if spec.strategy == PAPER_GUIDED:
        g, stats = grow(constraint, spec.layers, spec.budget, order=SWEEP, seed=spec.seed,
                        restart_base=RESTART_BASE)
    else:
        g, stats = grow(constraint, spec.layers, spec.budget, order=OLDEST, seed=spec.seed)
    m = g.to_map()
    _check(m, constraint)
    return BuildResult(m, spec.layers, spec.strategy, stats)


def _check(m: CombMap, constraint):
    rep = verify(m, constraint)
    if not rep.passed:
        raise BuildError("INVARIANT", f"built map fails verification: {rep.violations[:3]}")


# -- derived constructions ------------------------------------------------------


def _derived(t: VertexTuple, hint: str, spec: BuildSpec) -> Optional[BuildResult]:
    k = t.components
    if hint == CONTRACTION:
        # [3,4,4,k] = [4,3,4,k] from [4,6,2k]
        word, make = (4, 6, 2 * k[3]), C.contract_even_pairs
    elif hint == RECT_TRUNCATE:
        # [3,3,3p,3q] from [2p,2q,2p,2q]
        p, q = k[2] // 3, k[3] // 3
        word, make = (2 * p, 2 * q, 2 * p, 2 * q), C.rect_truncate
    elif hint == CANTELLATION:
        k3, k4 = k[2], k[3]
        word = C.cantellation_input_word(k3, k4).word
        return derived_build(CyclicType(word), None, t, spec.layers, spec.budget,
                             strategy=f"{PAPER_GUIDED}:{hint}", labels=C.CANTELLATION_ROLES,
                             make_labelled=lambda m, roles: C.cantellate_restricted(m, k3, k4, roles))
    else:
        return None
    return derived_build(CyclicType(word), make, t, spec.layers, spec.budget,
                         strategy=f"{PAPER_GUIDED}:{hint}")


def derived_build(input_word: CyclicType, make, target, layers: int, budget: int,
                  strategy: str = PAPER_GUIDED, max_extra: int = 6, labels=None,
                  make_labelled=None) -> BuildResult:
    """Transform growing homogeneous inputs until the soup holds ``layers``
    complete layers around its root.

    With ``labels`` the input is grown over labelled letters and
    ``make_labelled(map, roles)`` receives the label of every face.
    """
    nodes = 0
    last_error = None
    for extra in range(1, max_extra + 1):
        g, stats = grow(input_word, layers + extra, budget - nodes, labels=labels)
        nodes += stats["nodes"]
        source = g.to_map()
        if labels is None:
            soup = make(source)
        else:
            roles = {f: g.A.letter_labels[x] for f, x in enumerate(g.fletter)}
            soup = make_labelled(source, roles)
        try:
            m = C.replay(soup, target, layers)
        except C.SoupBoundaryError as exc:
            last_error = exc
            continue
        _check(m, target)
        return BuildResult(m, layers, strategy, {"nodes": nodes, "input_layers": layers + extra,
                                                 "input_faces": source.n_faces})
    raise BuildError("BUDGET_EXHAUSTED", f"input patch too small after {max_extra} extra layers: {last_error}")


def contract_build(p: int, q: int, s: int, layers: int, budget: int = DEFAULT_BUDGET) -> BuildResult:
    """Map of type [2p, q, 2p, s] by contracting a grown [2p, 2q, 2s] map."""
    target = CyclicType((2 * p, q, 2 * p, s))
    return derived_build(CyclicType((2 * p, 2 * q, 2 * s)), lambda m: C.contract_even_pairs(m, 2 * p),
                         target, layers, budget, strategy=f"{PAPER_GUIDED}:{CONTRACTION}")


# -- layer extension ---------------------------------------------------------------


def extend_layer(m: CombMap, constraint=None, budget: int = DEFAULT_BUDGET, order: str = OLDEST) -> CombMap:
    """Complete one more layer around an already built patch.

    The patch is re-grown from its own faces and the search continues from
    the first point where those run out, so the result contains ``m``.
    """
    constraint = constraint if constraint is not None else m.constraint
    if constraint is None:
        raise BuildError("NO_CONSTRAINT", "map carries no vertex type")
    done = max(m.layer[v] for v in range(m.n_vertices) if not m.is_boundary(v)) + 1
    faces = [m.face_vertices(f) for f in range(m.n_faces)]
    soup = C.Soup(faces, m.root)
    g = C.replay_prefix(soup, constraint, done + 1, order=order)
    res = g.search(budget)
    if not res.found:
        kind = "NO_VALID_FAN" if res.exhausted else "BUDGET_EXHAUSTED"
        raise BuildError(kind, f"cannot complete layer {done}", {"nodes": res.nodes})
    out = g.to_map()
    _check(out, constraint)
    return out


# -- the degree-14 homogeneous family ------------------------------------------------------


def validate_kh(k: int, l: int, m: int, strict: bool = True):
    if len({k, l, m}) != 3:
        raise BuildError("PARAMETER", f"k, l, m must be pairwise distinct, got {(k, l, m)}")
    if strict:
        if any(x % 2 or x < 6 for x in (k, l, m)):
            raise BuildError("PARAMETER", "k, l, m must be even and >= 6 (pass strict=False for >= 4)")
    elif min(k, l, m) < 4:
        raise BuildError("PARAMETER", "k, l, m must be >= 4")


def build_kh(k: int, l: int, m: int, layers: int = 2, budget: int = DEFAULT_BUDGET,
             strict: bool = True) -> CombMap:
    """Homogeneous map of cyclic type [3,5,k,5,l,5,m,5,l,5,k,5,l,5]."""
    validate_kh(k, l, m, strict)
    word = CyclicType(kh_word(k, l, m))
    g, _ = grow(word, layers, budget)
    out = g.to_map()
    _check(out, word)
    return out
