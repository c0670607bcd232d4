"""Vertex tuples: canonical multisets of polygon sizes and their angle-sum.

A tuple entry is either a finite integer >= 3 or :data:`INF` (an apeirogon).
Text syntax is comma separated, with ``n^m`` for ``m`` repetitions of ``n``::

    >>> parse_tuple("5^2,3^2")
    VertexTuple(3, 3, 5, 5)
    >>> format_tuple(parse_tuple("3,inf,inf"))
    '3,inf^2'
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union


class _Infinity:
    """The apeirogon entry. A singleton; compare with ``is``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Entry = Union[int, _Infinity]


class TupleError(ValueError):
    """Malformed tuple text or an invalid entry."""


def _entry_key(k: Entry):
    return (1, 0) if k is INF else (0, k)


def _check_entry(k) -> Entry:
    if k is INF:
        return k
    if isinstance(k, bool) or not isinstance(k, int):
        raise TupleError(f"tuple entry must be an integer or INF, got {k!r}")
    if k < 3:
        raise TupleError(f"polygon size must be >= 3, got {k}")
    return k


@dataclass(frozen=True)
class VertexTuple:
    """Sorted multiset of polygon sizes (finite entries first, INF last)."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        for k in comps:
            _check_entry(k)
        if len(comps) < 3:
            raise TupleError(f"degree must be >= 3, got {len(comps)}")
        if list(comps) != sorted(comps, key=_entry_key):
            raise TupleError("components are not in canonical order; use VertexTuple.of")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, entries: Iterable[Entry]) -> "VertexTuple":
        """Canonicalize an arbitrary iterable of entries."""
        comps = [_check_entry(k) for k in entries]
        return cls(tuple(sorted(comps, key=_entry_key)))

    @property
    def degree(self) -> int:
        return len(self.components)

    @property
    def finite(self) -> tuple:
        return tuple(k for k in self.components if k is not INF)

    @property
    def n_inf(self) -> int:
        return sum(1 for k in self.components if k is INF)

    @property
    def has_inf(self) -> bool:
        return self.n_inf > 0

    def counts(self) -> Counter:
        return Counter(self.components)

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __repr__(self):
        return "VertexTuple(" + ", ".join(repr(k) for k in self.components) + ")"

    def __str__(self):
        return "[" + format_tuple(self) + "]"

    def to_json(self) -> list:
        return [("inf" if k is INF else k) for k in self.components]


_TOKEN = re.compile(r"^\s*(inf|\d+)\s*(?:\^\s*(\d+)\s*)?$", re.IGNORECASE)


def parse_tuple(text: str) -> VertexTuple:
    """Parse ``"3,5,4,4,5"``, ``"5^2,3^2"`` or ``"3,inf,inf"``."""
    if not isinstance(text, str):
        raise TupleError("tuple text must be a string")
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    if not body.strip():
        raise TupleError("empty tuple")
    entries: list = []
    for token in body.split(","):
        m = _TOKEN.match(token)
        if m is None:
            raise TupleError(f"malformed token {token.strip()!r}")
        base, rep = m.group(1), m.group(2)
        value = INF if base.lower() == "inf" else int(base)
        count = 1 if rep is None else int(rep)
        if count < 1:
            raise TupleError(f"repetition count must be >= 1 in {token.strip()!r}")
        entries.extend([value] * count)
    return VertexTuple.of(entries)


def format_tuple(t: VertexTuple) -> str:
    """Multiplicative form, e.g. ``3,5^2,inf``; inverse of :func:`parse_tuple`."""
    parts = []
    comps = t.components
    i = 0
    while i < len(comps):
        j = i
        while j < len(comps) and comps[j] == comps[i]:
            j += 1
        label = str(comps[i])
        parts.append(label if j - i == 1 else f"{label}^{j - i}")
        i = j
    return ",".join(parts)


def as_tuple(t) -> VertexTuple:
    """Coerce text, an iterable of entries or a VertexTuple."""
    if isinstance(t, VertexTuple):
        return t
    if isinstance(t, str):
        return parse_tuple(t)
    if isinstance(t, CyclicType):
        return VertexTuple.of(t.word)
    return VertexTuple.of(t)


@dataclass(frozen=True)
class AngleSum:
    """Exact angle-sum: each k-gon contributes (k-2)/k, an apeirogon 1."""

    value: Fraction

    def __float__(self):
        return float(self.value)

    @property
    def real(self) -> float:
        return float(self.value)


def theta(k: Entry) -> Fraction:
    return Fraction(1) if k is INF else Fraction(k - 2, k)


def angle_sum(t) -> AngleSum:
    t = as_tuple(t)
    return AngleSum(sum((theta(k) for k in t.components), Fraction(0)))


class Geometry(enum.Enum):
    SPHERICAL = "Spherical"
    EUCLIDEAN = "Euclidean"
    HYPERBOLIC = "Hyperbolic"


def geometry_class(t) -> Geometry:
    value = angle_sum(t).value
    if value < 2:
        return Geometry.SPHERICAL
    if value == 2:
        return Geometry.EUCLIDEAN
    return Geometry.HYPERBOLIC


def _dihedral_images(word: Sequence[int]):
    n = len(word)
    w = tuple(word)
    r = w[::-1]
    for i in range(n):
        yield w[i:] + w[:i]
        yield r[i:] + r[:i]


@dataclass(frozen=True, eq=False)
class CyclicType:
    """A cyclic word of face sizes; equal up to rotation and reflection."""

    word: tuple

    def __post_init__(self):
        word = tuple(self.word)
        for k in word:
            if k is INF:
                raise TupleError("cyclic vertex-types take finite entries only")
            _check_entry(k)
        if len(word) < 3:
            raise TupleError(f"degree must be >= 3, got {len(word)}")
        object.__setattr__(self, "word", word)

    @property
    def degree(self) -> int:
        return len(self.word)

    def canonical(self) -> tuple:
        return min(_dihedral_images(self.word))

    def multiset(self) -> VertexTuple:
        return VertexTuple.of(self.word)

    def __eq__(self, other):
        if not isinstance(other, CyclicType):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def matches(self, seq: Sequence[int]) -> bool:
        """True if ``seq`` (a full cyclic fan) equals this word up to symmetry."""
        return len(seq) == len(self.word) and min(_dihedral_images(seq)) == self.canonical()

    def has_factor(self, seq: Sequence[int]) -> bool:
        """True if the linear sequence occurs as a contiguous factor of the
        cyclic word read in either direction."""
        n = len(self.word)
        m = len(seq)
        if m > n:
            return False
        seq = tuple(seq)
        for image in (self.word, self.word[::-1]):
            doubled = image + image
            for i in range(n):
                if doubled[i:i + m] == seq:
                    return True
        return False

    def __repr__(self):
        return "CyclicType(" + ", ".join(map(str, self.word)) + ")"

    def __str__(self):
        return "(" + ",".join(map(str, self.word)) + ")"


def parse_cyclic(text: str) -> CyclicType:
    """Same token syntax as :func:`parse_tuple`, order preserved."""
    body = text.strip()
    if body.startswith(("[", "(")) and body.endswith(("]", ")")):
        body = body[1:-1]
    entries: list = []
    for token in body.split(","):
        m = _TOKEN.match(token)
        if m is None:
            raise TupleError(f"malformed token {token.strip()!r}")
        if m.group(1).lower() == "inf":
            raise TupleError("cyclic vertex-types take finite entries only")
        entries.extend([int(m.group(1))] * (1 if m.group(2) is None else int(m.group(2))))
    return CyclicType(tuple(entries))


def kh_word(k: int, l: int, m: int) -> tuple:
    """The degree-14 homogeneous word [3,5,k,5,l,5,m,5,l,5,k,5,l,5]."""
    return (3, 5, k, 5, l, 5, m, 5, l, 5, k, 5, l, 5)
