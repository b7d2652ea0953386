"""Brute-force matrix realization of the tensor model.

This is the independent check on every combinatorial fast path.  It never
looks at cycles: a permutation is bubble-sorted into adjacent transpositions
and each one is applied to basis vectors as the literal signed flip.  Traces
and conditional expectations are then plain sums over basis configurations.

Matrices are sparse :class:`sympy.polys.matrices.DomainMatrix` objects over
the rationals.  Basis vector ``delta_r`` for a configuration
``r = (r_0, ..., r_{S-1})`` has index ``sum r_j L^(S-1-j)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from ..errors import ContractError, ResourceLimitError
from ..symgroup import Permutation
from .operator import ModelOperator
from .space import LabelKind, ModelSpace

__all__ = [
    "DenseOracleConfig", "dense_oracle", "density_matrix", "dense_trace", "dense_conditional_E",
    "adjacent_factorization", "to_qq", "to_fraction_qq", "configurations",
]


@dataclass(frozen=True)
class DenseOracleConfig:
    """Refuse to materialize spaces whose dimension exceeds ``max_dim``."""

    max_dim: int = 4096

    def __post_init__(self):
        if self.max_dim < 1:
            raise ContractError("max_dim must be positive")


def to_qq(x: Fraction | int):
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def to_fraction_qq(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _check_space(space: ModelSpace, config: DenseOracleConfig) -> int:
    if not space.is_finite:
        raise ContractError("a diffuse label has no finite matrix realization")
    dim = space.label_count**space.slot_count
    if dim > config.max_dim:
        raise ResourceLimitError(f"dimension {dim} exceeds the dense cap {config.max_dim}")
    return dim


def configurations(space: ModelSpace) -> list[tuple[int, ...]]:
    """All basis configurations in index order."""
    return list(itertools.product(range(space.label_count), repeat=space.slot_count))


def _index(space: ModelSpace, config: tuple[int, ...]) -> int:
    idx = 0
    for lab in config:
        idx = idx * space.label_count + lab
    return idx


def adjacent_factorization(p: Permutation, n: int) -> list[int]:
    """Indices ``i`` with ``p = s_{i_1} s_{i_2} ... s_{i_m}``, ``s_i = (i-1, i)``.

    Found by bubble sort on the one-line notation, so it is independent of
    any cycle bookkeeping.
    """
    images = list(p.one_line(n))
    swaps = []
    done = False
    while not done:
        done = True
        for i in range(1, n):
            if images[i - 1] > images[i]:
                images[i - 1], images[i] = images[i], images[i - 1]
                swaps.append(i)
                done = False
    # p s_{j1} s_{j2} ... s_{jm} = id, hence p = s_{jm} ... s_{j1}
    return swaps[::-1]


def _apply_flip(space: ModelSpace, i: int, sign: int, config: list[int]) -> int:
    a, b = config[i - 1], config[i]
    minus = space.labels[a].kind is LabelKind.MINUS and space.labels[b].kind is LabelKind.MINUS
    config[i - 1], config[i] = b, a
    return -sign if minus else sign


def dense_oracle(space: ModelSpace, x: ModelOperator,
                 config: DenseOracleConfig = DenseOracleConfig()) -> DomainMatrix:
    """Exact sparse matrix of ``x`` on the full truncated tensor product."""
    dim = _check_space(space, config)
    entries: dict[int, dict[int, object]] = {}
    basis = configurations(space)
    for term in x.terms:
        letters = adjacent_factorization(term.perm, space.slot_count)
        diag = dict(term.diag)
        for r in basis:
            amp = term.coeff * prod((diag[s][r[s]] for s in diag), start=Fraction(1))
            if not amp:
                continue
            state, sgn = list(r), 1
            for i in reversed(letters):  # rightmost factor acts first
                sgn = _apply_flip(space, i, sgn, state)
            row, col = _index(space, tuple(state)), _index(space, r)
            entries.setdefault(row, {})
            entries[row][col] = entries[row].get(col, QQ(0)) + to_qq(sgn * amp)
    clean = {i: {j: v for j, v in row.items() if v} for i, row in entries.items()}
    return DomainMatrix({i: row for i, row in clean.items() if row}, (dim, dim), QQ)


def density_matrix(space: ModelSpace, config: DenseOracleConfig = DenseOracleConfig()) -> DomainMatrix:
    """Diagonal product density ``rho_r = prod_j w_{r_j}``."""
    dim = _check_space(space, config)
    w = space.weights
    rows = {_index(space, r): {_index(space, r): to_qq(prod((w[lab] for lab in r), start=Fraction(1)))}
            for r in configurations(space)}
    return DomainMatrix(rows, (dim, dim), QQ)


def dense_trace(space: ModelSpace, m: DomainMatrix) -> Fraction:
    """``Tr(rho m)`` summed entry by entry."""
    w = space.weights
    dok = m.to_dok()
    total = Fraction(0)
    for r in configurations(space):
        idx = _index(space, r)
        value = dok.get((idx, idx))
        if value:
            total += prod((w[lab] for lab in r), start=Fraction(1)) * to_fraction_qq(value)
    return total


def dense_conditional_E(space: ModelSpace, m: DomainMatrix, n: int) -> DomainMatrix:
    """Partial expectation over slots above ``n``, re-embedded as ``E(m) (x) 1``."""
    if n < -1:
        raise ContractError("n must be at least -1")
    low_count = min(n + 1, space.slot_count)
    w = space.weights
    dok = m.to_dok()
    reduced: dict[tuple[tuple, tuple], Fraction] = {}
    for (row, col), value in dok.items():
        r = _config_of(space, row)
        s = _config_of(space, col)
        if r[low_count:] != s[low_count:]:
            continue
        weight = prod((w[lab] for lab in r[low_count:]), start=Fraction(1))
        key = (r[:low_count], s[:low_count])
        reduced[key] = reduced.get(key, Fraction(0)) + weight * to_fraction_qq(value)
    dim = space.label_count**space.slot_count
    entries: dict[int, dict[int, object]] = {}
    highs = list(itertools.product(range(space.label_count), repeat=space.slot_count - low_count))
    for (lo_r, lo_s), value in reduced.items():
        if not value:
            continue
        for h in highs:
            i, j = _index(space, lo_r + h), _index(space, lo_s + h)
            entries.setdefault(i, {})[j] = to_qq(value)
    return DomainMatrix(entries, (dim, dim), QQ)


def _config_of(space: ModelSpace, idx: int) -> tuple[int, ...]:
    digits = []
    for _ in range(space.slot_count):
        idx, lab = divmod(idx, space.label_count)
        digits.append(lab)
    return tuple(reversed(digits))
