"""Combinatorial fast paths of the tensor model.

Slots are tensor positions ``0 .. slot_count - 1``.  The permutation ``sigma``
acts by ``pi(sigma) delta_r = sign * delta_{r o sigma^-1}``, so slot
``sigma(j)`` receives the label that sat at slot ``j``.  Adjacent
transpositions act as the flip that picks up ``-1`` exactly when both slots
carry a minus label; general permutations inherit their sign from any
factorization into adjacent flips.

Nothing here builds a matrix.  Traces and conditional expectations are
computed orbit by orbit: along a cycle of ``sigma`` a basis configuration
contributing to a trace carries one constant label, so each cycle contributes
an independent sum over labels.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from math import factorial, prod

from ..errors import ContractError, ResourceLimitError
from ..symgroup import (
    DEFAULT_ENUMERATION_BOUND, Permutation, cycle_decompose, shift_m, sign as perm_sign, symmetric_group,
)
from ..thoma import EnNormalForm, moment, to_fraction
from .operator import ModelOperator, Term
from .space import LabelKind, ModelSpace

__all__ = [
    "represent", "star", "coxeter", "multiply", "trace", "l2_norm_sq", "conditional_E",
    "limit_cycle_A", "spectral_projection", "limit_k_cycle", "realize_En", "cesaro_A",
    "shift_endo", "transition_R0", "antisymmetrizer", "antisymmetrizer_check", "signed_action",
]


def represent(space: ModelSpace, p: Permutation) -> ModelOperator:
    """The signed permutation operator ``pi(p)``."""
    for k in p.support:
        space.check_slot(k)
    return ModelOperator.permutation(space, p)


def star(space: ModelSpace, i: int) -> ModelOperator:
    """``v_i = pi((0, i))``; ``v_0`` is the identity."""
    return ModelOperator.identity(space) if i == 0 else represent(space, Permutation.transposition(0, i))


def coxeter(space: ModelSpace, i: int) -> ModelOperator:
    """``u_i = pi((i-1, i))``; ``u_0`` is the identity."""
    return ModelOperator.identity(space) if i == 0 else represent(space, Permutation.transposition(i - 1, i))


def multiply(x: ModelOperator, y: ModelOperator) -> ModelOperator:
    return x * y


def signed_action(space: ModelSpace, p: Permutation, config: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Image of the basis vector ``delta_config`` under ``pi(p)``.

    The sign is the parity of the inversions of ``p`` among the slots holding
    minus labels, which is the sign any adjacent-flip factorization produces.
    """
    if len(config) != space.slot_count:
        raise ContractError("configuration length must equal slot_count")
    out = [0] * space.slot_count
    for j, lab in enumerate(config):
        out[space.check_slot(p(j))] = lab
    odd = [j for j, lab in enumerate(config) if space.labels[lab].kind is LabelKind.MINUS]
    inversions = sum(1 for x, i in enumerate(odd) for j in odd[x + 1:] if p(i) > p(j))
    return (-1 if inversions % 2 else 1), tuple(out)


def _orbit_sum(space: ModelSpace, term: Term, points: Sequence[int]) -> Fraction:
    """Sum over labels of one orbit's contribution, diagonals included."""
    k = len(points)
    return sum(
        (lab.orbit_factor(k) * prod((term.diag_value(s, i) for s in points), start=Fraction(1))
         for i, lab in enumerate(space.labels)),
        Fraction(0),
    )


def _term_trace(space: ModelSpace, term: Term) -> Fraction:
    value = term.coeff
    for c in cycle_decompose(term.perm):
        value *= _orbit_sum(space, term, c.points)
        if not value:
            return value
    for s, _ in term.diag:
        if term.perm(s) == s:
            value *= _orbit_sum(space, term, (s,))
    return value


def trace(space: ModelSpace, x: ModelOperator) -> Fraction:
    """Product-state expectation of ``x``."""
    if x.space != space:
        raise ContractError("operator belongs to a different space")
    return sum((_term_trace(space, t) for t in x.terms), Fraction(0))


def l2_norm_sq(space: ModelSpace, x: ModelOperator) -> Fraction:
    """``trace(x* x)``, the squared state norm."""
    return trace(space, x.adjoint() * x)


def _term_expectation(space: ModelSpace, term: Term, n: int) -> Term:
    """Contract all slots above ``n`` of one monomial.

    A low slot ``k`` whose forward orbit runs through high slots ``h_1..h_q``
    before reaching the next low slot ``k'`` becomes ``k -> k'`` in the
    result, with a diagonal factor ``eigenvalue * d_h`` for every ``h``
    passed.  Cycles entirely above ``n`` and diagonals on fixed high slots
    turn into scalars.
    """
    labels = range(space.label_count)
    eig = space.eigenvalues
    coeff = term.coeff
    new_map: dict[int, int] = {}
    new_diag: dict[int, tuple[Fraction, ...]] = {}
    for c in cycle_decompose(term.perm):
        pts = c.points
        if pts[0] > n:
            coeff *= _orbit_sum(space, term, pts)
            continue
        low_positions = [i for i, k in enumerate(pts) if k <= n]
        for idx, i in enumerate(low_positions):
            k = pts[i]
            nxt = low_positions[(idx + 1) % len(low_positions)]
            highs = [pts[j % len(pts)] for j in range(i + 1, nxt if nxt > i else nxt + len(pts))]
            new_map[k] = pts[nxt]
            new_diag[k] = tuple(
                term.diag_value(k, lab) * prod((eig[lab] * term.diag_value(h, lab) for h in highs), start=Fraction(1))
                for lab in labels
            )
    for s, vals in term.diag:
        if term.perm(s) != s:
            continue
        if s <= n:
            new_diag[s] = vals
        else:
            coeff *= _orbit_sum(space, term, (s,))
    return Term(coeff, Permutation(new_map), tuple(new_diag.items()))


def conditional_E(space: ModelSpace, x: ModelOperator, n: int) -> ModelOperator:
    """Evaluate the product state on every slot above ``n``.

    ``n = -1`` gives the scalar ``trace(x)``; ``n >= slot_count - 1`` is the
    identity map.
    """
    if x.space != space:
        raise ContractError("operator belongs to a different space")
    if n < -1:
        raise ContractError("n must be at least -1")
    return ModelOperator(space, [_term_expectation(space, t, n) for t in x.terms])


def limit_cycle_A(space: ModelSpace, i: int) -> ModelOperator:
    """Diagonal at slot ``i`` with the eigenvalue of each label."""
    return ModelOperator.diagonal(space, space.check_slot(i), space.eigenvalues)


def spectral_projection(space: ModelSpace, i: int, t) -> ModelOperator:
    """Indicator diagonal of the labels whose limit-cycle eigenvalue is ``t``."""
    t = to_fraction(t)
    return ModelOperator.diagonal(space, space.check_slot(i), [Fraction(e == t) for e in space.eigenvalues])


def limit_k_cycle(space: ModelSpace, k: int) -> Fraction:
    """The central scalar ``C_k``, the moment of order ``k - 1`` of the model measure."""
    if k < 1:
        raise ContractError("limit cycles have length k >= 1")
    return moment(space.measure(), k - 1)


def realize_En(space: ModelSpace, form: EnNormalForm) -> ModelOperator:
    """``prod_k A_k^(a_k) * prod C_j^(e_j) * pi(derivative)`` as an operator."""
    scalar = prod((limit_k_cycle(space, k) ** e for k, e in form.c_exponents), start=Fraction(1))
    result = ModelOperator.scalar(space, scalar)
    for k, e in form.a_factors:
        result = result * limit_cycle_A(space, k) ** e
    return result * represent(space, form.derivative)


def cesaro_A(space: ModelSpace, i: int, N: int) -> ModelOperator:
    """``(1/N) sum_{j=1..N, j != i} pi((i, j))``, a finite average approaching ``A_i``."""
    if N < 1:
        raise ContractError("N must be positive")
    if i + N >= space.slot_count:
        raise ContractError(f"need i + N < slot_count, got {i} + {N} with {space.slot_count} slots")
    total = ModelOperator.zero(space)
    for j in range(1, N + 1):
        if j != i:
            total = total + represent(space, Permutation.transposition(i, j))
    return total / N


def shift_endo(space: ModelSpace, x: ModelOperator, n: int = 0) -> ModelOperator:
    """Relabel slots ``k >= n`` as ``k + 1`` and leave slot ``n`` empty.

    On permutations this is the partial shift of the symmetric group.  The
    result must still fit in the window.
    """
    if n < 0:
        raise ContractError("shift index must be nonnegative")
    terms = []
    for t in x.terms:
        moved = tuple((s if s < n else s + 1, vals) for s, vals in t.diag)
        perm = shift_m(t.perm, n)
        if perm.degree > space.slot_count or any(s >= space.slot_count for s, _ in moved):
            raise ResourceLimitError(f"shifted operator leaves the {space.slot_count}-slot window")
        terms.append(Term(t.coeff, perm, moved))
    return ModelOperator(space, terms)


def transition_R0(space: ModelSpace, x: ModelOperator) -> ModelOperator:
    """Expect onto slot 0, then shift up by one: the transition operator of the Markov shift."""
    if not x.slots() <= {0, 1}:
        raise ContractError("transition operator is defined on operators supported on slots 0 and 1")
    return shift_endo(space, conditional_E(space, x, 0), 0)


def antisymmetrizer(space: ModelSpace, n: int, signed: bool = True,
                    bound: int = DEFAULT_ENUMERATION_BOUND) -> ModelOperator:
    """``(1/n!) sum_{S_n} sgn(s)^signed pi(s)`` on slots ``0..n-1``."""
    if n > space.slot_count:
        raise ContractError(f"S_{n} does not fit in {space.slot_count} slots")
    terms = [Term(Fraction(perm_sign(p) if signed else 1, factorial(n)), p, ())
             for p in symmetric_group(n, bound)]
    return ModelOperator(space, terms)


def antisymmetrizer_check(space: ModelSpace, t, n: int,
                          bound: int = DEFAULT_ENUMERATION_BOUND) -> tuple[Fraction, Fraction]:
    """Both sides of the antisymmetrizer identity for the eigenvalue ``t``.

    The left side is ``trace(p * prod_{i<n} chi_t(A_i))`` with ``p`` the
    antisymmetrizer when ``t > 0`` and the symmetrizer when ``t < 0``.  The
    right side is ``(|t|^n / n!) nu (nu-1) ... (nu-n+1)`` with ``nu`` the
    multiplicity of ``t`` in the model's spectral measure.
    """
    t = to_fraction(t)
    if t == 0:
        raise ContractError("the identity concerns nonzero eigenvalues")
    if n < 1:
        raise ContractError("n must be positive")
    if n > bound:
        raise ResourceLimitError(f"S_{n} exceeds the enumeration bound {bound}")
    proj = ModelOperator.identity(space)
    for i in range(n):
        proj = proj * spectral_projection(space, i, t)
    lhs = trace(space, antisymmetrizer(space, n, signed=t > 0, bound=bound) * proj)
    nu = space.measure().multiplicity(t)
    rhs = abs(t) ** n / factorial(n) * prod((nu - j for j in range(n)), start=Fraction(1))
    return lhs, rhs
