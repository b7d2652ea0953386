"""Operators of the tensor model as sums of (permutation x diagonal) monomials.

A term ``(c, sigma, D)`` stands for ``c * pi(sigma) * D``: the diagonal
``D = prod_s d_s`` acts first, then the signed permutation ``pi(sigma)``.  A
slot diagonal ``d_s`` is a tuple with one value per label; slots whose
diagonal is identically one are not stored.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from ..errors import ContractError
from ..symgroup import Permutation, compose
from ..thoma import to_fraction
from .space import ModelSpace

__all__ = ["Term", "ModelOperator", "Diagonal"]

Diagonal = tuple[tuple[int, tuple[Fraction, ...]], ...]


def _clean_diagonal(space: ModelSpace, diag: Mapping[int, Iterable] | Iterable) -> Diagonal | None:
    """Canonical sorted diagonal, or ``None`` if some slot factor vanishes."""
    items = diag.items() if isinstance(diag, Mapping) else diag
    ones = (Fraction(1),) * space.label_count
    out: dict[int, tuple[Fraction, ...]] = {}
    for slot, values in items:
        space.check_slot(slot)
        vals = tuple(to_fraction(v) for v in values)
        if len(vals) != space.label_count:
            raise ContractError(f"slot {slot} diagonal needs {space.label_count} values")
        if slot in out:
            vals = tuple(x * y for x, y in zip(out[slot], vals))
        out[slot] = vals
    result = []
    for slot in sorted(out):
        vals = out[slot]
        if not any(vals):
            return None
        if vals != ones:
            result.append((slot, vals))
    return tuple(result)


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    perm: Permutation
    diag: Diagonal = ()

    @property
    def key(self) -> tuple:
        return (self.perm.sort_key(), self.diag)

    def slots(self) -> set[int]:
        return set(self.perm.support) | {s for s, _ in self.diag}

    def diag_value(self, slot: int, label: int) -> Fraction:
        for s, vals in self.diag:
            if s == slot:
                return vals[label]
        return Fraction(1)


class ModelOperator:
    """An element of the monomial algebra over a fixed :class:`ModelSpace`.

    Terms with equal permutation and diagonal are merged on construction.
    Equality is semantic: two operators are equal when they agree as linear
    maps, even if their diagonals are split differently across terms.
    """

    __slots__ = ("space", "terms")
    __hash__ = None  # mutable-looking algebra element; compare with ==

    def __init__(self, space: ModelSpace, terms: Iterable = ()):
        merged: dict[tuple, list] = {}
        for t in terms:
            coeff, perm, diag = (t.coeff, t.perm, t.diag) if isinstance(t, Term) else t
            coeff = to_fraction(coeff)
            if any(k >= space.slot_count for k in perm.support):
                raise ContractError(f"permutation {perm} leaves the {space.slot_count}-slot window")
            clean = _clean_diagonal(space, diag)
            if clean is None or coeff == 0:
                continue
            key = (perm.sort_key(), clean)
            if key in merged:
                merged[key][0] += coeff
            else:
                merged[key] = [coeff, perm, clean]
        self.space = space
        self.terms = tuple(
            Term(c, p, d) for key, (c, p, d) in sorted(merged.items(), key=lambda kv: kv[0]) if c != 0
        )

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, space: ModelSpace) -> ModelOperator:
        return cls(space)

    @classmethod
    def scalar(cls, space: ModelSpace, value) -> ModelOperator:
        return cls(space, [(value, Permutation(), ())])

    @classmethod
    def identity(cls, space: ModelSpace) -> ModelOperator:
        return cls.scalar(space, 1)

    @classmethod
    def diagonal(cls, space: ModelSpace, slot: int, values: Iterable) -> ModelOperator:
        return cls(space, [(1, Permutation(), {slot: tuple(values)})])

    @classmethod
    def permutation(cls, space: ModelSpace, p: Permutation) -> ModelOperator:
        return cls(space, [(1, p, ())])

    # -- algebra ------------------------------------------------------------

    def _same_space(self, other: ModelOperator) -> None:
        if other.space != self.space:
            raise ContractError("operators live on different model spaces")

    def _coerce(self, other) -> ModelOperator | None:
        if isinstance(other, ModelOperator):
            self._same_space(other)
            return other
        if isinstance(other, (int, Fraction, str)) and not isinstance(other, bool):
            return ModelOperator.scalar(self.space, other)
        return None

    def __add__(self, other) -> ModelOperator:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ModelOperator(self.space, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> ModelOperator:
        return ModelOperator(self.space, [Term(-t.coeff, t.perm, t.diag) for t in self.terms])

    def __sub__(self, other) -> ModelOperator:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> ModelOperator:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def scale(self, value) -> ModelOperator:
        value = to_fraction(value)
        return ModelOperator(self.space, [Term(value * t.coeff, t.perm, t.diag) for t in self.terms])

    def __mul__(self, other) -> ModelOperator:
        if isinstance(other, ModelOperator):
            self._same_space(other)
            return ModelOperator(self.space, [_term_product(s, t) for s in self.terms for t in other.terms])
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other) -> ModelOperator:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other) -> ModelOperator:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(1 / Fraction(other))
        return NotImplemented

    def __pow__(self, exponent: int) -> ModelOperator:
        if exponent < 0:
            raise ContractError("only nonnegative powers are defined")
        result = ModelOperator.identity(self.space)
        for _ in range(exponent):
            result = result * self
        return result

    def adjoint(self) -> ModelOperator:
        """Adjoint; ``(pi(s) D)* = D pi(s)^-1``, with the diagonal moved through."""
        out = []
        for t in self.terms:
            moved = tuple((t.perm(s), vals) for s, vals in t.diag)
            out.append(Term(t.coeff, t.perm.inverse(), moved))
        return ModelOperator(self.space, out)

    # -- inspection ---------------------------------------------------------

    def slots(self) -> set[int]:
        """Slots on which some term acts nontrivially."""
        return set().union(*(t.slots() for t in self.terms)) if self.terms else set()

    def scalar_value(self) -> Fraction | None:
        """The scalar if the operator is a multiple of the identity, else ``None``."""
        if not self.terms:
            return Fraction(0)
        collapsed = self._tables()
        if set(collapsed) != {Permutation()}:
            return None
        slots, table = collapsed[Permutation()]
        values = set(table.values())
        if len(table) == self.space.label_count ** len(slots) and len(values) == 1:
            return values.pop()
        return None

    def _tables(self, slots_for: Mapping[Permutation, tuple[int, ...]] | None = None) -> dict:
        """Expand each permutation's diagonals into a table over label configurations."""
        grouped: dict[Permutation, list[Term]] = {}
        for t in self.terms:
            grouped.setdefault(t.perm, []).append(t)
        out = {}
        for perm, terms in grouped.items():
            slots = slots_for[perm] if slots_for else tuple(sorted({s for t in terms for s, _ in t.diag}))
            table: dict[tuple[int, ...], Fraction] = {}
            for config in itertools.product(range(self.space.label_count), repeat=len(slots)):
                value = sum(
                    (t.coeff * prod((t.diag_value(s, lab) for s, lab in zip(slots, config)), start=Fraction(1))
                     for t in terms),
                    Fraction(0),
                )
                if value:
                    table[config] = value
            out[perm] = (slots, table)
        return out

    def __eq__(self, other) -> bool:
        other_op = self._coerce(other) if isinstance(other, (ModelOperator, int, Fraction)) else None
        if other_op is None:
            return NotImplemented
        perms = {t.perm for t in self.terms} | {t.perm for t in other_op.terms}
        slots_for = {
            p: tuple(sorted({s for t in self.terms + other_op.terms if t.perm == p for s, _ in t.diag}))
            for p in perms
        }
        mine = {p: v for p, v in self._tables(slots_for).items() if v[1]}
        theirs = {p: v for p, v in other_op._tables(slots_for).items() if v[1]}
        return mine == theirs

    def __repr__(self) -> str:
        if not self.terms:
            return "ModelOperator(0)"
        parts = []
        for t in self.terms:
            diag = "".join(f" d{s}[{','.join(map(str, v))}]" for s, v in t.diag)
            parts.append(f"{t.coeff}*pi{t.perm}{diag}")
        return "ModelOperator(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        return {
            "terms": [
                {
                    "coeff": str(t.coeff),
                    "permutation": t.perm.to_json(),
                    "diagonals": {str(s): [str(v) for v in vals] for s, vals in t.diag},
                }
                for t in self.terms
            ]
        }


def _term_product(s: Term, t: Term) -> Term:
    """``(pi(p) D)(pi(q) E) = pi(pq) (q^-1 D q) E``; slot ``k`` of ``D`` moves to ``q^-1(k)``."""
    qinv = t.perm.inverse()
    moved = {qinv(k): vals for k, vals in s.diag}
    diag = dict(t.diag)
    for k, vals in moved.items():
        diag[k] = tuple(x * y for x, y in zip(vals, diag[k])) if k in diag else vals
    return Term(s.coeff * t.coeff, compose(s.perm, t.perm), tuple(diag.items()))
