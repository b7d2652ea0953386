"""Thoma parameters, their characters and spectral measures.

Everything here is exact: parameters are :class:`fractions.Fraction` values
and every function returns a ``Fraction`` (or structures of them).

>>> params = ThomaParams.parse(a=["1/2", "1/4"], b=["1/8"])
>>> params.c
Fraction(1, 8)
>>> character(params, Permutation.from_cycles((0, 1, 2)))
Fraction(73, 512)
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Literal

from .errors import ContractError
from .symgroup import (
    CycleType, Permutation, cycle_decompose, cycle_type, excursion_length, n_derivative,
)

__all__ = [
    "ThomaParams", "ThomaMeasure", "EnNormalForm", "MarkovWitness", "MeasureViolation",
    "MeasureReport", "to_fraction", "character", "character_of_type", "spectral_measure",
    "moment", "symbolic_En", "evaluate_En_trace", "is_markov_params", "check_thoma_measure",
]

Rational = Fraction | int | str


def to_fraction(x: Rational) -> Fraction:
    """Parse an exact rational; floats are refused so that no rounding sneaks in."""
    if isinstance(x, bool) or isinstance(x, float):
        raise ContractError(f"refusing inexact value {x!r}; pass a string like '1/3'")
    try:
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ContractError(f"not a rational number: {x!r}") from exc


def _descending(values: Iterable[Rational], name: str) -> tuple[Fraction, ...]:
    vals = tuple(to_fraction(v) for v in values)
    if any(v <= 0 for v in vals):
        raise ContractError(f"{name} entries must be positive, got {[str(v) for v in vals]}")
    return tuple(sorted(vals, reverse=True))


@dataclass(frozen=True)
class ThomaParams:
    """Two finite descending sequences with total mass at most one.

    Entries are sorted on construction; ``c`` is whatever mass is left over.
    """

    a: tuple[Fraction, ...] = ()
    b: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", _descending(self.a, "a"))
        object.__setattr__(self, "b", _descending(self.b, "b"))
        if sum(self.a) + sum(self.b) > 1:
            raise ContractError("sum of a and b exceeds 1")

    @classmethod
    def parse(cls, a: Sequence[Rational] = (), b: Sequence[Rational] = ()) -> ThomaParams:
        return cls(tuple(a), tuple(b))

    @classmethod
    def from_json(cls, data: Mapping) -> ThomaParams:
        if not isinstance(data, Mapping):
            raise ContractError("parameters must be an object with 'a' and 'b' lists")
        unknown = set(data) - {"a", "b", "c"}
        if unknown:
            raise ContractError(f"unknown parameter fields {sorted(unknown)}")
        params = cls(tuple(data.get("a", ())), tuple(data.get("b", ())))
        if "c" in data and to_fraction(data["c"]) != params.c:
            raise ContractError(f"stated c={data['c']} but 1 - sum(a) - sum(b) = {params.c}")
        return params

    def to_json(self) -> dict:
        return {"a": [str(x) for x in self.a], "b": [str(x) for x in self.b], "c": str(self.c)}

    @property
    def c(self) -> Fraction:
        return 1 - sum(self.a, Fraction(0)) - sum(self.b, Fraction(0))

    def power_sum(self, k: int) -> Fraction:
        """``sum a_i^k + (-1)^(k-1) sum b_j^k``, the value on a k-cycle."""
        sb = sum((x**k for x in self.b), Fraction(0))
        return sum((x**k for x in self.a), Fraction(0)) + (sb if k % 2 else -sb)

    def with_zero_atoms(self, ell: int) -> ThomaParams:
        """Replace the remainder ``c`` by ``ell`` equal entries ``c/ell`` in ``a``."""
        if self.c == 0:
            return self
        if ell < 1:
            raise ContractError("need at least one atom to carry a positive remainder")
        return ThomaParams(self.a + (self.c / ell,) * ell, self.b)

    def __str__(self) -> str:
        a = ",".join(map(str, self.a))
        b = ",".join(map(str, self.b))
        return f"a=({a}) b=({b}) c={self.c}"


def character_of_type(params: ThomaParams, ct: CycleType) -> Fraction:
    return prod((params.power_sum(k) ** m for k, m in ct.parts), start=Fraction(1))


def character(params: ThomaParams, p: Permutation) -> Fraction:
    """Thoma's product over cycle lengths, ``prod_k power_sum(k) ** m_k``."""
    return character_of_type(params, cycle_type(p))


@dataclass(frozen=True)
class ThomaMeasure:
    """An atomic probability measure on ``[-1, 1]``.

    ``atoms`` lists the nonzero points with their masses, ``zero_mass`` the
    mass at the origin.  Construction only checks the shape of the data; use
    :func:`check_thoma_measure` to test the integrality conditions, so that
    deliberately broken measures can be built and examined.
    """

    atoms: tuple[tuple[Fraction, Fraction], ...] = ()
    zero_mass: Fraction = Fraction(0)

    def __post_init__(self):
        if isinstance(self.atoms, Mapping):
            atoms = self.atoms.items()
        else:
            atoms = self.atoms
        clean = sorted(((to_fraction(t), to_fraction(m)) for t, m in atoms), reverse=True)
        points = [t for t, _ in clean]
        if len(set(points)) != len(points):
            raise ContractError("repeated atom")
        for t, m in clean:
            if t == 0 or abs(t) > 1:
                raise ContractError(f"atom {t} must be nonzero and inside [-1, 1]")
            if m <= 0:
                raise ContractError(f"atom {t} has nonpositive mass {m}")
        object.__setattr__(self, "atoms", tuple(clean))
        zero = to_fraction(self.zero_mass)
        if zero < 0:
            raise ContractError("negative mass at zero")
        object.__setattr__(self, "zero_mass", zero)

    def mass(self, t: Rational) -> Fraction:
        t = to_fraction(t)
        if t == 0:
            return self.zero_mass
        return dict(self.atoms).get(t, Fraction(0))

    def multiplicity(self, t: Rational) -> Fraction:
        """``mass(t) / |t|``; an integer for genuine Thoma measures."""
        t = to_fraction(t)
        return self.mass(t) / abs(t)

    @property
    def total_mass(self) -> Fraction:
        return self.zero_mass + sum((m for _, m in self.atoms), Fraction(0))

    def integrate(self, f) -> Fraction:
        """``sum f(t) mass(t)`` over all atoms including the origin."""
        total = sum((f(t) * m for t, m in self.atoms), Fraction(0))
        return total + (f(Fraction(0)) * self.zero_mass if self.zero_mass else 0)

    def to_json(self) -> dict:
        return {
            "atoms": [[str(t), str(m)] for t, m in self.atoms],
            "zero_mass": str(self.zero_mass),
        }


def spectral_measure(params: ThomaParams) -> ThomaMeasure:
    """Atoms ``a_i`` and ``-b_j`` weighted by the total parameter mass at each value."""
    masses: Counter[Fraction] = Counter()
    for x in params.a:
        masses[x] += x
    for x in params.b:
        masses[-x] += x
    return ThomaMeasure(tuple(masses.items()), params.c)


def moment(m: ThomaMeasure, k: int) -> Fraction:
    """``integral of t^k``; ``moment(m, 0)`` is the total mass."""
    if k < 0:
        raise ContractError("moments are indexed by k >= 0")
    value = sum((t**k * w for t, w in m.atoms), Fraction(0))
    return value + (m.zero_mass if k == 0 else 0)


@dataclass(frozen=True)
class EnNormalForm:
    """Symbolic value of the conditional expectation onto slots ``0..n``.

    ``derivative`` is the permutation left on the low slots, ``c_exponents``
    counts the cycles lying entirely above ``n`` by length, and ``a_factors``
    gives the power of the limit two-cycle at each low slot.
    """

    derivative: Permutation
    c_exponents: tuple[tuple[int, int], ...] = ()
    a_factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "c_exponents", tuple(sorted((k, e) for k, e in self.c_exponents if e)))
        object.__setattr__(self, "a_factors", tuple(sorted((k, e) for k, e in self.a_factors if e)))
        if any(e < 0 for _, e in self.c_exponents + self.a_factors):
            raise ContractError("exponents must be nonnegative")

    @property
    def is_scalar(self) -> bool:
        return self.derivative.is_identity and not self.a_factors

    def validate(self, n: int) -> None:
        if self.derivative.degree > n + 1:
            raise ContractError(f"derivative {self.derivative} is not supported on 0..{n}")
        if any(k > n for k, _ in self.a_factors):
            raise ContractError(f"limit two-cycle factor placed above slot {n}")

    def to_json(self) -> dict:
        return {
            "derivative": self.derivative.to_json(),
            "c_exponents": {str(k): e for k, e in self.c_exponents},
            "a_factors": {str(k): e for k, e in self.a_factors},
        }


def symbolic_En(p: Permutation, n: int) -> EnNormalForm:
    """Normal form of the expectation of ``p`` onto slots ``0..n``.

    Cycles entirely above ``n`` become scalar moments, the remaining cycles
    lose their high points, and each low slot ``k`` records the excursion
    length of its backward orbit as the exponent of ``A_k``.
    """
    if n < -1:
        raise ContractError("n must be at least -1")
    c_exp: Counter[int] = Counter()
    for c in cycle_decompose(p):
        if min(c.points) > n:
            c_exp[len(c)] += 1
    a_fac = {k: excursion_length(p, n, k) for k in p.support if k <= n}
    return EnNormalForm(n_derivative(p, n), tuple(c_exp.items()), tuple(a_fac.items()))


def evaluate_En_trace(params: ThomaParams, form: EnNormalForm, n: int) -> Fraction:
    """Trace of the realized normal form, computed from moments of the measure.

    Each cycle ``V`` of the derivative contributes the moment of order
    ``|V| - 1`` plus the limit two-cycle exponents sitting on ``V``.
    """
    form.validate(n)
    mu = spectral_measure(params)
    value = prod((moment(mu, k - 1) ** e for k, e in form.c_exponents), start=Fraction(1))
    a_exp = dict(form.a_factors)
    blocks = [c.points for c in cycle_decompose(form.derivative)]
    covered = {k for block in blocks for k in block}
    blocks += [(k,) for k in a_exp if k not in covered]
    for block in blocks:
        value *= moment(mu, len(block) - 1 + sum(a_exp.get(k, 0) for k in block))
    return value


@dataclass(frozen=True)
class MarkovWitness:
    """Outcome of the Markov-parameter classification.

    ``case`` names the family the parameters belong to and ``t`` is the common
    value of the trace on a transposition.
    """

    holds: bool
    case: Literal["regular", "uniform-a", "uniform-b"] | None = None
    t: Fraction | None = None

    def __bool__(self) -> bool:
        return self.holds


def is_markov_params(params: ThomaParams) -> MarkovWitness:
    a, b = params.a, params.b
    if not a and not b:
        return MarkovWitness(True, "regular", Fraction(0))
    if a and not b and len(set(a)) == 1 and a[0] == Fraction(1, len(a)):
        return MarkovWitness(True, "uniform-a", a[0])
    if b and not a and len(set(b)) == 1 and b[0] == Fraction(1, len(b)):
        return MarkovWitness(True, "uniform-b", -b[0])
    return MarkovWitness(False)


@dataclass(frozen=True)
class MeasureViolation:
    atom: Fraction | None
    kind: Literal["total-mass", "multiplicity", "discreteness"]
    detail: str


@dataclass(frozen=True)
class MeasureReport:
    passed: bool
    multiplicities: tuple[tuple[Fraction, Fraction], ...]
    violations: tuple[MeasureViolation, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.passed


def check_thoma_measure(m: ThomaMeasure) -> MeasureReport:
    """Check total mass one, integral multiplicities, and ``mass(t) >= t^2``."""
    violations = []
    if m.total_mass != 1:
        violations.append(MeasureViolation(None, "total-mass", f"total mass is {m.total_mass}"))
    mults = []
    for t, w in m.atoms:
        nu = w / abs(t)
        mults.append((t, nu))
        if nu.denominator != 1:
            violations.append(MeasureViolation(t, "multiplicity", f"mass/|t| = {nu} is not an integer"))
        if w < t * t:
            violations.append(MeasureViolation(t, "discreteness", f"mass {w} < t^2 = {t * t}"))
    return MeasureReport(not violations, tuple(mults), tuple(violations))
