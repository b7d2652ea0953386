"""Finite-dimensional tracial algebras, conditional expectations and commuting squares.

Algebras are spans of exact rational matrices (sympy ``DomainMatrix`` over
``QQ``) with a density matrix defining the state ``psi(x) = Tr(rho x)``.  The
conditional expectation onto a subalgebra is the orthogonal projection in the
inner product ``<a, b> = psi(a* b)``.  Only real rational entries are
supported, so the adjoint is the transpose.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from sympy import QQ, Poly, Symbol
from sympy.polys.matrices import DomainMatrix

from .errors import ContractError, ResourceLimitError
from .symgroup import DEFAULT_ENUMERATION_BOUND, Permutation, symmetric_group
from .tensor_model import ModelOperator, ModelSpace, dense_oracle, density_matrix
from .tensor_model.oracle import DenseOracleConfig, to_fraction_qq, to_qq
from .thoma import ThomaParams, character, is_markov_params, to_fraction

__all__ = [
    "as_matrix", "identity_matrix", "kron", "matrix_unit", "flip_matrix", "diagonal_matrix", "adjoint",
    "TracialAlgebra", "CommutingSquareReport", "DiscretenessAtom", "DiscretenessReport", "MarkovCheck",
    "conditional_expectation", "is_commuting_square", "discreteness_check", "independence_check",
    "markov_trace_check", "model_algebra", "flip_square_fixture", "max_abs_entry",
]

# -- matrix helpers ------------------------------------------------------------


def as_matrix(data) -> DomainMatrix:
    """Coerce nested lists of rationals (or a ``DomainMatrix``) to a ``QQ`` matrix."""
    if isinstance(data, DomainMatrix):
        return data.convert_to(QQ)
    rows = [list(r) for r in data]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ContractError("matrix rows must be nonempty and of equal length")
    entries = {i: {j: to_qq(to_fraction(v)) for j, v in enumerate(r) if to_fraction(v)} for i, r in enumerate(rows)}
    return DomainMatrix({i: r for i, r in entries.items() if r}, (len(rows), len(rows[0])), QQ)


def identity_matrix(d: int) -> DomainMatrix:
    return DomainMatrix.eye(d, QQ).to_sparse()


def zero_matrix(d: int) -> DomainMatrix:
    return DomainMatrix({}, (d, d), QQ)


def matrix_unit(d: int, i: int, j: int) -> DomainMatrix:
    return DomainMatrix({i: {j: QQ(1)}}, (d, d), QQ)


def diagonal_matrix(values: Sequence) -> DomainMatrix:
    d = len(values)
    return DomainMatrix({i: {i: to_qq(to_fraction(v))} for i, v in enumerate(values) if to_fraction(v)}, (d, d), QQ)


def kron(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    (ra, ca), (rb, cb) = a.shape, b.shape
    entries: dict[int, dict[int, object]] = {}
    bdok = b.to_dok()
    for (i, j), x in a.to_dok().items():
        for (k, l), y in bdok.items():
            entries.setdefault(i * rb + k, {})[j * cb + l] = x * y
    return DomainMatrix(entries, (ra * rb, ca * cb), QQ)


def flip_matrix(n: int) -> DomainMatrix:
    """The flip ``e_i (x) e_j -> e_j (x) e_i`` on ``C^n (x) C^n``."""
    return DomainMatrix({j * n + i: {i * n + j: QQ(1)} for i in range(n) for j in range(n)}, (n * n, n * n), QQ)


def adjoint(m: DomainMatrix) -> DomainMatrix:
    return m.transpose()


def max_abs_entry(m: DomainMatrix) -> Fraction:
    return max((abs(to_fraction_qq(v)) for v in m.to_dok().values()), default=Fraction(0))


def _trace_product(a: DomainMatrix, b: DomainMatrix) -> object:
    """``Tr(a b)`` without forming the product."""
    bdok = b.to_dok()
    return sum((x * bdok[(j, i)] for (i, j), x in a.to_dok().items() if (j, i) in bdok), QQ(0))


class _Echelon:
    """Incremental row-echelon form of flattened matrices, for span membership."""

    def __init__(self):
        self.rows: dict[int, dict[int, object]] = {}

    def reduce(self, vec: dict[int, object]) -> dict[int, object]:
        v = dict(vec)
        for p in sorted(self.rows):
            c = v.get(p)
            if c:
                for k, x in self.rows[p].items():
                    nv = v.get(k, QQ(0)) - c * x
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        return v

    def add(self, vec: dict[int, object]) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        p = min(v)
        inv = QQ(1) / v[p]
        self.rows[p] = {k: x * inv for k, x in v.items()}
        return True


def _flatten(m: DomainMatrix) -> dict[int, object]:
    cols = m.shape[1]
    return {i * cols + j: v for (i, j), v in m.to_dok().items() if v}


# -- algebras ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TracialAlgebra:
    """A unital ``*``-subalgebra of ``d x d`` matrices with a faithful state.

    Build one with :meth:`generated_by` (closure under products) or
    :meth:`full`.  ``basis`` is linearly independent and spans the algebra.
    """

    ambient_dim: int
    basis: tuple[DomainMatrix, ...]
    state_density: DomainMatrix
    name: str = ""

    def __post_init__(self):
        d = self.ambient_dim
        rho = self.state_density
        if rho.shape != (d, d) or any(b.shape != (d, d) for b in self.basis):
            raise ContractError("basis and density must be square of the ambient dimension")
        if rho != rho.transpose():
            raise ContractError("state density must be symmetric")
        if sum((v for (i, j), v in rho.to_dok().items() if i == j), QQ(0)) != 1:
            raise ContractError("state density must have trace 1")

    @classmethod
    def generated_by(cls, generators: Iterable, state_density, name: str = "",
                     max_dim: int | None = None) -> TracialAlgebra:
        """Smallest unital ``*``-algebra containing ``generators``."""
        rho = as_matrix(state_density)
        d = rho.shape[0]
        cap = max_dim if max_dim is not None else d * d
        echelon = _Echelon()
        basis: list[DomainMatrix] = []

        def offer(m: DomainMatrix) -> None:
            if echelon.add(_flatten(m)):
                if len(basis) >= cap:
                    raise ResourceLimitError(f"algebra closure exceeded {cap} dimensions")
                basis.append(m)

        offer(identity_matrix(d))
        for g in generators:
            g = as_matrix(g)
            offer(g)
            offer(g.transpose())
        i = 0
        while i < len(basis):
            for j in range(i + 1):
                offer(basis[i].matmul(basis[j]))
                offer(basis[j].matmul(basis[i]))
            i += 1
        return cls(d, tuple(basis), rho, name)

    @classmethod
    def full(cls, d: int, state_density, name: str = "") -> TracialAlgebra:
        basis = tuple(matrix_unit(d, i, j) for i in range(d) for j in range(d))
        return cls(d, basis, as_matrix(state_density), name)

    @classmethod
    def scalars(cls, d: int, state_density, name: str = "C") -> TracialAlgebra:
        return cls(d, (identity_matrix(d),), as_matrix(state_density), name)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def state(self, x: DomainMatrix) -> Fraction:
        return to_fraction_qq(_trace_product(self.state_density, x))

    def inner(self, a: DomainMatrix, b: DomainMatrix) -> object:
        """``psi(a* b)`` as a ``QQ`` element."""
        return _trace_product(self.state_density, a.transpose().matmul(b))

    @cached_property
    def _echelon(self) -> _Echelon:
        ech = _Echelon()
        for b in self.basis:
            ech.add(_flatten(b))
        return ech

    def contains(self, x: DomainMatrix) -> bool:
        return not self._echelon.reduce(_flatten(as_matrix(x)))

    @cached_property
    def gram(self) -> DomainMatrix:
        n = self.dim
        rows = [[self.inner(a, b) for b in self.basis] for a in self.basis]
        return DomainMatrix(rows, (n, n), QQ)

    @cached_property
    def _gram_inverse(self) -> DomainMatrix:
        g = self.gram.to_dense()
        if g.rank() < self.dim:
            raise ContractError(f"state is not faithful on {self.name or 'the algebra'} (singular Gram matrix)")
        return g.inv()

    def is_faithful(self) -> bool:
        return self.gram.to_dense().rank() == self.dim

    def is_closed(self) -> bool:
        """Check unit, adjoints and products of basis elements stay in the span."""
        if not self.contains(identity_matrix(self.ambient_dim)):
            return False
        if not all(self.contains(b.transpose()) for b in self.basis):
            return False
        return all(self.contains(a.matmul(b)) for a in self.basis for b in self.basis)

    def is_subalgebra_of(self, other: TracialAlgebra) -> bool:
        return all(other.contains(b) for b in self.basis)

    def expectation(self, x: DomainMatrix) -> DomainMatrix:
        """Orthogonal projection of ``x`` onto this algebra for ``<a, b> = psi(a* b)``."""
        x = as_matrix(x)
        h = DomainMatrix([[self.inner(b, x)] for b in self.basis], (self.dim, 1), QQ)
        coeffs = self._gram_inverse.matmul(h).to_dok()
        result = zero_matrix(self.ambient_dim)
        for (i, _), c in coeffs.items():
            if c:
                result = result + self.basis[i] * c
        return result


def conditional_expectation(alg: TracialAlgebra, sub: TracialAlgebra, x) -> DomainMatrix:
    """``E_sub(x)`` for ``x`` in ``alg``; the state is shared by both algebras."""
    if alg.state_density != sub.state_density:
        raise ContractError("algebra and subalgebra must share the state")
    if not sub.is_subalgebra_of(alg):
        raise ContractError("sub is not contained in alg")
    x = as_matrix(x)
    if not alg.contains(x):
        raise ContractError("x does not belong to the ambient algebra")
    return sub.expectation(x)


# -- commuting squares -------------------------------------------------------------


@dataclass(frozen=True)
class CommutingSquareReport:
    holds: bool
    checked_conditions: Mapping[str, bool]
    max_defect: Fraction
    triples_checked: int = 0

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "checked_conditions": dict(self.checked_conditions),
            "max_defect": str(self.max_defect),
            "triples_checked": self.triples_checked,
        }


def _intersection_dim(a: TracialAlgebra, b: TracialAlgebra) -> int:
    ech = _Echelon()
    span = sum(ech.add(_flatten(m)) for m in a.basis + b.basis)
    return a.dim + b.dim - span


def is_commuting_square(N: TracialAlgebra, B1: TracialAlgebra, B2: TracialAlgebra, M: TracialAlgebra,
                        max_triples: int = 4096, seed: int = 0) -> CommutingSquareReport:
    """Check the four equivalent commuting-square conditions independently.

    ``ii``: ``E_B1`` maps ``B2`` into ``N``.  ``iii``: ``E_B1 E_B2 = E_N`` on
    ``M``.  ``iv``: the two expectations commute and ``N = B1 & B2``.
    ``v``: ``E_N(x y z) = E_N(x E_N(y) z)`` for ``x, z`` in ``B1`` and ``y`` in
    ``B2``, over all basis triples or a seeded sample of ``max_triples``.
    """
    algebras = (N, B1, B2, M)
    if len({a.ambient_dim for a in algebras}) != 1 or any(a.state_density != M.state_density for a in algebras):
        raise ContractError("all four algebras must share the ambient space and state")
    if not (N.is_subalgebra_of(B1) and N.is_subalgebra_of(B2) and B1.is_subalgebra_of(M)
            and B2.is_subalgebra_of(M)):
        raise ContractError("need N inside B1 and B2, and both inside M")

    defect = Fraction(0)

    def residual(x: DomainMatrix, y: DomainMatrix) -> bool:
        nonlocal defect
        gap = max_abs_entry(x - y)
        defect = max(defect, gap)
        return gap == 0

    cond = {}
    cond["ii"] = all([residual(B1.expectation(y), N.expectation(y)) for y in B2.basis])
    cond["iii"] = all([residual(B1.expectation(B2.expectation(x)), N.expectation(x)) for x in M.basis])
    commute = all([residual(B1.expectation(B2.expectation(x)), B2.expectation(B1.expectation(x)))
                   for x in M.basis])
    cond["iv"] = commute and _intersection_dim(B1, B2) == N.dim
    triples = list(itertools.product(range(B1.dim), range(B2.dim), range(B1.dim)))
    if len(triples) > max_triples:
        triples = random.Random(seed).sample(triples, max_triples)
    ok_v = True
    for i, j, k in triples:
        x, y, z = B1.basis[i], B2.basis[j], B1.basis[k]
        lhs = N.expectation(x.matmul(y).matmul(z))
        rhs = N.expectation(x.matmul(N.expectation(y)).matmul(z))
        ok_v &= residual(lhs, rhs)
    cond["v"] = ok_v
    holds = all(cond.values()) and defect == 0
    return CommutingSquareReport(holds, cond, defect, len(triples))


# -- spectral discreteness ---------------------------------------------------------


@dataclass(frozen=True)
class DiscretenessAtom:
    t: Fraction
    mass: Fraction
    pairing: Fraction  # psi(chi_t u)
    lower_bound_ok: bool
    upper_bound_ok: bool
    gap_ok: bool  # mass >= t^2

    @property
    def multiplicity(self) -> Fraction | None:
        return None if self.t == 0 else self.mass / abs(self.t)


@dataclass(frozen=True)
class DiscretenessReport:
    passed: bool
    preconditions: Mapping[str, bool]
    normal: bool
    atoms: tuple[DiscretenessAtom, ...] = ()
    expectation: DomainMatrix | None = None
    notes: tuple[str, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.passed

    @property
    def integral_multiplicities(self) -> bool:
        return all(a.multiplicity is None or a.multiplicity.denominator == 1 for a in self.atoms)


def _rational_eigenvalues(m: DomainMatrix) -> tuple[list[Fraction], bool]:
    """Rational roots of the characteristic polynomial, and whether they exhaust it."""
    x = Symbol("x")
    poly = Poly(list(m.to_dense().charpoly()), x, domain=QQ)
    roots, complete = [], True
    for factor, _ in poly.factor_list()[1]:
        if factor.degree() == 1:
            a, b = (Fraction(int(c.p), int(c.q)) for c in factor.all_coeffs())
            roots.append(-b / a)
        else:
            complete = False
    return sorted(set(roots), reverse=True), complete


def discreteness_check(M: TracialAlgebra, M0: TracialAlgebra, u) -> DiscretenessReport:
    """Spectral estimates for ``E_M0(u)`` when ``M0`` and ``u M0 u*`` are independent.

    For each eigenvalue ``t != 0`` with spectral projection ``chi``, checks
    ``|t| psi(chi) <= |psi(chi u)|``, ``psi(chi u)^2 <= psi(chi)^3`` and the
    consequence ``psi(chi) >= t^2``.  Preconditions are reported, not raised:
    a failing hypothesis is a property of the fixture.
    """
    u = as_matrix(u)
    d = M.ambient_dim
    one = identity_matrix(d)
    pre = {
        "unitary": u.transpose().matmul(u) == one,
        "in_M": M.contains(u),
        "M0_in_M": M0.is_subalgebra_of(M),
        "centralizer": all(M.state(u.matmul(x)) == M.state(x.matmul(u)) for x in M.basis),
    }
    if not all(pre.values()):
        return DiscretenessReport(False, pre, False, notes=("preconditions failed",))
    conj = TracialAlgebra(d, tuple(u.matmul(b).matmul(u.transpose()) for b in M0.basis), M.state_density, "uM0u*")
    scalars = TracialAlgebra.scalars(d, M.state_density)
    pre["commuting_square"] = is_commuting_square(scalars, M0, conj, M).holds
    e = M0.expectation(u)
    normal = e.matmul(e.transpose()) == e.transpose().matmul(e)
    if not pre["commuting_square"] or not normal:
        notes = () if normal else ("E_M0(u) is not normal",)
        return DiscretenessReport(False, pre, normal, expectation=e, notes=notes)
    eigenvalues, complete = _rational_eigenvalues(e)
    if not complete:
        return DiscretenessReport(False, pre, normal, expectation=e, notes=("irrational eigenvalues",))
    atoms = []
    for t in eigenvalues:
        chi = one
        for s in eigenvalues:
            if s != t:
                chi = chi.matmul((e - one * to_qq(s)) * to_qq(1 / (t - s)))
        mass = M.state(chi)
        pairing = M.state(chi.matmul(u))
        if t == 0:
            atoms.append(DiscretenessAtom(t, mass, pairing, True, True, True))
            continue
        atoms.append(DiscretenessAtom(
            t, mass, pairing,
            lower_bound_ok=abs(t) * mass <= abs(pairing),
            upper_bound_ok=pairing * pairing <= mass**3,
            gap_ok=mass >= t * t,
        ))
    passed = all(a.lower_bound_ok and a.upper_bound_ok and a.gap_ok for a in atoms)
    return DiscretenessReport(passed, pre, normal, tuple(atoms), e)


# -- independence and Markov traces ----------------------------------------------


def independence_check(alg: TracialAlgebra, N: TracialAlgebra, families: Sequence[TracialAlgebra],
                       mode: str = "full") -> bool:
    """Test ``E_N(x y) = E_N(x) E_N(y)`` across index sets.

    ``x`` ranges over a basis of the algebra generated by ``N`` and the
    families in ``J``, ``y`` likewise for ``K``.  Full mode takes every
    splitting of the index set into disjoint ``J`` and ``K``; order mode only
    splittings into an initial and a final segment (in either order).  Larger
    index sets contain the smaller ones, so maximal splittings suffice.
    """
    if mode not in ("full", "order"):
        raise ContractError("mode must be 'full' or 'order'")
    idx = range(len(families))
    if len(families) < 2:
        return True
    if mode == "full":
        splits = [(J, tuple(i for i in idx if i not in J))
                  for r in range(1, len(families)) for J in itertools.combinations(idx, r)]
    else:
        splits = [(tuple(idx[:m]), tuple(idx[m:])) for m in range(1, len(families))]
        splits += [(K, J) for J, K in splits]
    cache: dict[tuple[int, ...], TracialAlgebra] = {}

    def generated(index_set: tuple[int, ...]) -> TracialAlgebra:
        if index_set not in cache:
            gens = list(N.basis) + [b for i in index_set for b in families[i].basis]
            cache[index_set] = TracialAlgebra.generated_by(gens, alg.state_density)
        return cache[index_set]

    for J, K in splits:
        for x in generated(J).basis:
            ex = N.expectation(x)
            for y in generated(K).basis:
                if N.expectation(x.matmul(y)) != ex.matmul(N.expectation(y)):
                    return False
    return True


@dataclass(frozen=True)
class MarkovCheck:
    holds: bool
    agrees_with_classification: bool
    witness: tuple[int, Permutation, Fraction, Fraction] | None = None

    def __bool__(self) -> bool:
        return self.holds


def markov_trace_check(params: ThomaParams, nmax: int = 6, bound: int = DEFAULT_ENUMERATION_BOUND) -> MarkovCheck:
    """Test ``chi(g s_n) = chi(g) chi(s_n)`` for all ``g`` in ``S_n``, ``n <= nmax``.

    Here ``s_n = (n-1, n)`` is the generator that first leaves ``S_n``.
    The first violation found is returned as ``(n, g, lhs, rhs)``.
    """
    if nmax > bound:
        raise ResourceLimitError(f"nmax={nmax} exceeds the enumeration bound {bound}")
    classified = bool(is_markov_params(params))
    for n in range(1, nmax + 1):
        s_n = Permutation.transposition(n - 1, n)
        chi_s = character(params, s_n)
        for g in symmetric_group(n):
            lhs, rhs = character(params, g * s_n), character(params, g) * chi_s
            if lhs != rhs:
                return MarkovCheck(False, not classified, (n, g, lhs, rhs))
    return MarkovCheck(True, classified)


# -- fixtures ----------------------------------------------------------------------


def model_algebra(space: ModelSpace, generators: Iterable[ModelOperator], name: str = "",
                  config: DenseOracleConfig = DenseOracleConfig()) -> TracialAlgebra:
    """Matrix algebra generated by tensor-model operators under the product state."""
    mats = [dense_oracle(space, g, config) for g in generators]
    return TracialAlgebra.generated_by(mats, density_matrix(space, config), name)


def flip_square_fixture(weights: Sequence) -> tuple[TracialAlgebra, TracialAlgebra, DomainMatrix]:
    """``M = M_n (x) M_n`` with state ``D (x) D``, ``M0 = M_n (x) 1`` and the flip ``u``."""
    weights = [to_fraction(w) for w in weights]
    if any(w <= 0 for w in weights) or sum(weights) != 1:
        raise ContractError("weights must be positive and sum to 1")
    n = len(weights)
    D = diagonal_matrix(weights)
    rho = kron(D, D)
    M = TracialAlgebra.full(n * n, rho, "M")
    M0 = TracialAlgebra(n * n, tuple(kron(matrix_unit(n, i, j), identity_matrix(n))
                                     for i in range(n) for j in range(n)), rho, "M0")
    return M, M0, flip_matrix(n)
