"""Finite permutations of the nonnegative integers.

A :class:`Permutation` stores only the points it moves, so it is an element of
the infinite symmetric group with every unlisted point fixed.  Products act
right to left: ``compose(p, q)(k) == p(q(k))``.  Words in generators are
evaluated with the same rule, so the word ``[i, j]`` means "apply the letter
``j`` first".

>>> p = Permutation.from_cycles((3, 5, 1, 10, 7), (4, 2))
>>> cycle_decompose(p)
[Cycle(points=(1, 10, 7, 3, 5)), Cycle(points=(2, 4))]
>>> cycle_type(p).counts
{2: 1, 5: 1}
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from math import factorial
from types import MappingProxyType
from typing import Literal

from .errors import ContractError, ResourceLimitError

__all__ = [
    "Alphabet", "Permutation", "Cycle", "GeneratorWord", "CycleType",
    "compose", "eval_word", "cycle_decompose", "cycle_type", "sign",
    "star_word_of_cycle", "word_of_permutation", "shift_m", "conjugate_cycle",
    "orbits", "orbit_count", "n_derivative", "excursion_length",
    "stirling_sum", "rising_factorial", "symmetric_group",
    "DEFAULT_ENUMERATION_BOUND",
]

Alphabet = Literal["coxeter", "star"]

#: largest n for which S_n is enumerated unless the caller raises the bound
DEFAULT_ENUMERATION_BOUND = 8


def _check_point(k: object) -> int:
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise ContractError(f"points must be nonnegative integers, got {k!r}")
    return k


class Permutation:
    """A bijection of the nonnegative integers moving finitely many points."""

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        moved: dict[int, int] = {}
        for k, v in items:
            k, v = _check_point(k), _check_point(v)
            if k in moved:
                raise ContractError(f"point {k} mapped twice")
            if k != v:
                moved[k] = v
        if set(moved) != set(moved.values()):
            raise ContractError("mapping is not a bijection on its support")
        self._map = dict(sorted(moved.items()))
        self._hash = hash(tuple(self._map.items()))

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls) -> Permutation:
        return cls()

    @classmethod
    def transposition(cls, i: int, j: int) -> Permutation:
        if i == j:
            raise ContractError("a transposition needs two distinct points")
        return cls({i: j, j: i})

    @classmethod
    def from_cycles(cls, *cycles: Sequence[int]) -> Permutation:
        """Product of the given cycles, the last one acting first.

        Cycles need not be disjoint; ``(n1, n2, ..., nk)`` sends each point to
        the next one and ``nk`` back to ``n1``.
        """
        result = cls()
        for points in reversed(cycles):
            if len(set(points)) != len(points):
                raise ContractError(f"cycle {tuple(points)} repeats a point")
            step = {points[i]: points[(i + 1) % len(points)] for i in range(len(points))}
            result = compose(cls(step), result)
        return result

    @classmethod
    def from_one_line(cls, images: Sequence[int]) -> Permutation:
        """Permutation of ``range(len(images))`` with ``k -> images[k]``."""
        if sorted(images) != list(range(len(images))):
            raise ContractError(f"{tuple(images)} is not a permutation of range({len(images)})")
        return cls(enumerate(images))

    # -- basic protocol -----------------------------------------------------

    def __call__(self, k: int) -> int:
        return self._map.get(k, k)

    @property
    def mapping(self) -> Mapping[int, int]:
        """Read-only view of the moved points and their images."""
        return MappingProxyType(self._map)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self._map)

    @property
    def degree(self) -> int:
        """Smallest ``d`` with the support inside ``range(d)``."""
        return max(self._map) + 1 if self._map else 0

    @property
    def is_identity(self) -> bool:
        return not self._map

    def inverse(self) -> Permutation:
        return Permutation((v, k) for k, v in self._map.items())

    def __mul__(self, other: Permutation) -> Permutation:
        if not isinstance(other, Permutation):
            return NotImplemented
        return compose(self, other)

    def __pow__(self, exponent: int) -> Permutation:
        base = self if exponent >= 0 else self.inverse()
        result = Permutation()
        for _ in range(abs(exponent)):
            result = compose(base, result)
        return result

    def one_line(self, n: int | None = None) -> tuple[int, ...]:
        n = self.degree if n is None else n
        if n < self.degree:
            raise ContractError(f"support does not fit in range({n})")
        return tuple(self(k) for k in range(n))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._map == other._map

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self) -> tuple:
        """Deterministic ordering key: canonical cycles, compared as tuples."""
        return tuple(c.points for c in cycle_decompose(self))

    def __repr__(self) -> str:
        if not self._map:
            return "Permutation.identity()"
        cycles = ", ".join(str(c.points) for c in cycle_decompose(self))
        return f"Permutation.from_cycles({cycles})"

    def __str__(self) -> str:
        if not self._map:
            return "()"
        return "".join("(" + ",".join(map(str, c.points)) + ")" for c in cycle_decompose(self))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {"cycles": [list(c.points) for c in cycle_decompose(self)]}

    @classmethod
    def from_json(cls, data: Mapping) -> Permutation:
        try:
            cycles = data["cycles"]
        except (KeyError, TypeError) as exc:
            raise ContractError("permutation JSON needs a 'cycles' list") from exc
        return cls.from_cycles(*[tuple(c) for c in cycles])


@dataclass(frozen=True)
class Cycle:
    """A cycle ``n1 -> n2 -> ... -> nk -> n1`` rotated to start at its minimum."""

    points: tuple[int, ...]

    def __post_init__(self):
        pts = tuple(_check_point(k) for k in self.points)
        if len(pts) < 2:
            raise ContractError("a cycle has at least two points")
        if len(set(pts)) != len(pts):
            raise ContractError(f"cycle {pts} repeats a point")
        start = pts.index(min(pts))
        object.__setattr__(self, "points", pts[start:] + pts[:start])

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[int]:
        return iter(self.points)

    def permutation(self) -> Permutation:
        return Permutation.from_cycles(self.points)


@dataclass(frozen=True)
class GeneratorWord:
    """A word in Coxeter letters ``(i-1, i)`` or star letters ``(0, i)``.

    The letter ``0`` stands for the identity in both alphabets.
    """

    alphabet: Alphabet
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.alphabet not in ("coxeter", "star"):
            raise ContractError(f"unknown alphabet {self.alphabet!r}")
        object.__setattr__(self, "letters", tuple(_check_point(i) for i in self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: GeneratorWord) -> GeneratorWord:
        if not isinstance(other, GeneratorWord) or other.alphabet != self.alphabet:
            return NotImplemented
        return GeneratorWord(self.alphabet, self.letters + other.letters)

    def generator(self, i: int) -> Permutation:
        if i == 0:
            return Permutation()
        if self.alphabet == "coxeter":
            return Permutation.transposition(i - 1, i)
        return Permutation.transposition(0, i)

    def to_json(self) -> dict:
        return {"alphabet": self.alphabet, "letters": list(self.letters)}

    @classmethod
    def from_json(cls, data: Mapping) -> GeneratorWord:
        try:
            return cls(data["alphabet"], tuple(data["letters"]))
        except (KeyError, TypeError) as exc:
            raise ContractError("word JSON needs 'alphabet' and 'letters'") from exc


@dataclass(frozen=True)
class CycleType:
    """Counts ``k -> m_k`` of the nontrivial cycles of a permutation."""

    parts: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        parts = tuple(sorted((int(k), int(m)) for k, m in self.parts))
        if any(k < 2 or m < 1 for k, m in parts) or len({k for k, _ in parts}) != len(parts):
            raise ContractError(f"invalid cycle type {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> CycleType:
        return cls(tuple((k, m) for k, m in counts.items() if m))

    @property
    def counts(self) -> dict[int, int]:
        return dict(self.parts)

    def count(self, k: int) -> int:
        return self.counts.get(k, 0)

    @property
    def moved(self) -> int:
        """Number of points moved, ``sum k * m_k``."""
        return sum(k * m for k, m in self.parts)

    def partition(self, n: int) -> tuple[int, ...]:
        """Cycle lengths in S_n as a descending partition of ``n``, fixed points included."""
        if self.moved > n:
            raise ContractError(f"cycle type moves {self.moved} points, more than {n}")
        lengths = [k for k, m in reversed(self.parts) for _ in range(m)]
        return tuple(lengths) + (1,) * (n - self.moved)

    def class_size(self, n: int) -> int:
        """Number of permutations of ``range(n)`` with this cycle type."""
        fixed = n - self.moved
        if fixed < 0:
            return 0
        denom = factorial(fixed)
        for k, m in self.parts:
            denom *= k**m * factorial(m)
        return factorial(n) // denom

    def __str__(self) -> str:
        return ",".join(f"{k}^{m}" for k, m in self.parts) or "1"


# -- operations --------------------------------------------------------------


def compose(p: Permutation, q: Permutation) -> Permutation:
    """The product ``pq``, acting as ``k -> p(q(k))``."""
    points = set(p.support) | set(q.support)
    return Permutation((k, p(q(k))) for k in points)


def eval_word(w: GeneratorWord) -> Permutation:
    """Evaluate a word, the rightmost letter acting first."""
    result = Permutation()
    for i in w.letters:
        result = compose(result, w.generator(i))
    return result


def cycle_decompose(p: Permutation) -> list[Cycle]:
    """Disjoint nontrivial cycles of ``p`` in canonical form, sorted by minimum."""
    seen: set[int] = set()
    cycles = []
    for start in p.support:
        if start in seen:
            continue
        points = [start]
        k = p(start)
        while k != start:
            points.append(k)
            k = p(k)
        seen.update(points)
        cycles.append(Cycle(tuple(points)))
    return cycles


def cycle_type(p: Permutation) -> CycleType:
    counts: dict[int, int] = {}
    for c in cycle_decompose(p):
        counts[len(c)] = counts.get(len(c), 0) + 1
    return CycleType.from_counts(counts)


def sign(p: Permutation) -> int:
    """``(-1)`` to the power ``sum (k-1) m_k``."""
    return -1 if sum(len(c) - 1 for c in cycle_decompose(p)) % 2 else 1


def star_word_of_cycle(c: Cycle) -> GeneratorWord:
    """A star word evaluating to ``c``.

    For the canonical cycle ``(n1, ..., nk)`` the word is
    ``[n1, nk, n(k-1), ..., n2, n1]``: the rightmost ``n1`` swaps ``n1`` into
    the hub ``0``, the middle letters carry it around the rim, and the outer
    ``n1`` restores the hub.  When ``n1 == 0`` both outer letters are the
    identity and are dropped, leaving a word of length ``k - 1``.
    """
    n1, *rest = c.points
    middle = tuple(reversed(rest))
    if n1 == 0:
        return GeneratorWord("star", middle)
    return GeneratorWord("star", (n1,) + middle + (n1,))


def word_of_permutation(p: Permutation) -> GeneratorWord:
    """Concatenated star words of the cycles of ``p``."""
    word = GeneratorWord("star")
    for c in cycle_decompose(p):
        word = word + star_word_of_cycle(c)
    return word


def _shift_map(m: int, k: int) -> int:
    return k if k < m else k + 1


def shift_m(p: Permutation, m: int) -> Permutation:
    """The partial shift: relabel every point ``k >= m`` as ``k + 1``, fixing ``m``.

    ``shift_m(p, 0)`` is the plain shift taking ``(i-1, i)`` to ``(i, i+1)``;
    for ``m >= 1`` the star generators with index below ``m`` are left alone.
    """
    _check_point(m)
    return Permutation((_shift_map(m, k), _shift_map(m, v)) for k, v in p.mapping.items())


def conjugate_cycle(p: Permutation, c: Cycle) -> Cycle:
    """The cycle of ``p c p^-1``, namely ``(p(n1), ..., p(nk))`` re-canonicalized."""
    return Cycle(tuple(p(k) for k in c.points))


def orbits(p: Permutation, window: int) -> list[tuple[int, ...]]:
    """Orbits of ``<p>`` intersected with ``range(window)``, each sorted."""
    seen: set[int] = set()
    blocks = []
    for start in range(window):
        if start in seen:
            continue
        block = {start}
        k = p(start)
        while k != start:
            block.add(k)
            k = p(k)
        seen.update(block)
        blocks.append(tuple(sorted(x for x in block if x < window)))
    return blocks


def orbit_count(p: Permutation, n: int) -> int:
    """Number of orbits of ``p`` on ``range(n)``, fixed points included."""
    if p.degree > n:
        raise ContractError(f"{p} does not act on range({n})")
    return len(orbits(p, n))


def n_derivative(p: Permutation, n: int) -> Permutation:
    """Delete every point above ``n`` from the cycles of ``p``.

    Each cycle keeps its points ``<= n`` in their cyclic order; cycles with no
    such point (and those reduced to a single point) disappear.
    """
    if n < -1:
        raise ContractError("n must be at least -1")
    kept = []
    for c in cycle_decompose(p):
        low = tuple(k for k in c.points if k <= n)
        if len(low) >= 2:
            kept.append(low)
    return Permutation.from_cycles(*kept)


def excursion_length(p: Permutation, n: int, k: int) -> int:
    """How many points above ``n`` the backward orbit of ``k`` visits before returning.

    Returns ``min{q >= 0 : p^-(q+1)(k) <= n}`` for ``k <= n`` and ``0`` otherwise.
    """
    if n < -1:
        raise ContractError("n must be at least -1")
    _check_point(k)
    if k > n:
        return 0
    inv = p.inverse()
    q, x = 0, inv(k)
    while x > n:
        q, x = q + 1, inv(x)
    return q


def symmetric_group(n: int, bound: int | None = None) -> Iterator[Permutation]:
    """All permutations of ``range(n)`` in lexicographic one-line order."""
    if bound is not None and n > bound:
        raise ResourceLimitError(f"S_{n} exceeds the enumeration bound {bound}")
    for images in itertools.permutations(range(n)):
        yield Permutation.from_one_line(images)


def rising_factorial(n: int) -> tuple[int, ...]:
    """Coefficients (lowest degree first) of ``x (x+1) ... (x+n-1)``."""
    coeffs = [1]
    for j in range(n):
        # multiply by (x + j)
        shifted = [0] + coeffs
        coeffs = [s + j * c for s, c in itertools.zip_longest(shifted, coeffs, fillvalue=0)]
    return tuple(coeffs)


def stirling_sum(n: int, bound: int = DEFAULT_ENUMERATION_BOUND) -> tuple[int, ...]:
    """Brute-force coefficients of ``sum over S_n of x ** (orbit count)``.

    Orbits are counted on ``range(n)`` with fixed points included.
    """
    if n < 1:
        raise ContractError("n must be positive")
    if n > bound:
        raise ResourceLimitError(f"S_{n} exceeds the enumeration bound {bound}")
    coeffs = [0] * (n + 1)
    for images in itertools.permutations(range(n)):
        coeffs[orbit_count(Permutation(enumerate(images)), n)] += 1
    return tuple(coeffs)
