"""Verification suites run by the command-line tool.

Every suite is a plain function from an :class:`ExperimentConfig` to a list
of :class:`CheckRecord` objects.  A record stores both sides of an identity
as exact fraction strings, so a failing record can be replayed by hand.
"""

from __future__ import annotations

import itertools
import random
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra_lab import (
    TracialAlgebra, diagonal_matrix, discreteness_check, flip_square_fixture, identity_matrix, is_commuting_square,
    kron, markov_trace_check, model_algebra,
)
from .config import ExperimentConfig
from .symgroup import (
    GeneratorWord, Permutation, cycle_type, eval_word, excursion_length, n_derivative, rising_factorial,
    stirling_sum, symmetric_group,
)
from .tensor_model import (
    DenseOracleConfig, ModelOperator, ModelSpace, antisymmetrizer_check, cesaro_A, conditional_E, coxeter,
    dense_oracle, density_matrix, l2_norm_sq, limit_cycle_A, realize_En, represent, spectral_projection, star, trace,
    transition_R0,
)
from .thoma import ThomaParams, character, check_thoma_measure, evaluate_En_trace, is_markov_params, symbolic_En

__all__ = ["CheckRecord", "VerificationReport", "SUITE_FUNCTIONS", "run_suite", "MARKOV_SWEEP"]


@dataclass(frozen=True)
class CheckRecord:
    identity: str
    anchor: str
    passed: bool
    lhs: str = ""
    rhs: str = ""
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "anchor": self.anchor,
            "status": "pass" if self.passed else "fail",
            "lhs": self.lhs,
            "rhs": self.rhs,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class VerificationReport:
    suite: str
    records: tuple[CheckRecord, ...]
    seed: int
    wall_time: float | None = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json(self, timing: bool = False) -> dict:
        data = {
            "suite": self.suite,
            "status": "pass" if self.passed else "fail",
            "seed": self.seed,
            "record_count": len(self.records),
            "records": [r.to_json() for r in self.records],
        }
        if timing and self.wall_time is not None:
            data["wall_time_s"] = round(self.wall_time, 3)
        return data


def _record(identity: str, anchor: str, lhs, rhs, detail: str = "", passed: bool | None = None) -> CheckRecord:
    ok = (lhs == rhs) if passed is None else passed
    return CheckRecord(identity, anchor, bool(ok), str(lhs), str(rhs), detail)


def _space(config: ExperimentConfig, slots: int | None = None) -> ModelSpace:
    return ModelSpace.from_params(config.params, slots or config.slot_count, config.zero_labels)


# -- individual suites -----------------------------------------------------------


def suite_multiplicativity(config: ExperimentConfig) -> list[CheckRecord]:
    """Model trace against the character formula on every permutation, grouped by class."""
    n = min(config.enumeration_bound, config.slot_count)
    space = _space(config, n)
    by_type: dict = {}
    for p in symmetric_group(n, config.enumeration_bound):
        model, formula = trace(space, represent(space, p)), character(config.params, p)
        entry = by_type.setdefault(cycle_type(p), [0, 0, model, formula])
        entry[0] += 1
        if model != formula and entry[1] == 0:
            entry[2], entry[3] = model, formula
        entry[1] += model != formula
    records = [
        _record(f"trace = character on class {ct} of S_{n}", "Thoma character formula", model, formula,
                f"{count} permutations, {bad} mismatches", passed=bad == 0)
        for ct, (count, bad, model, formula) in sorted(by_type.items(), key=lambda kv: kv[0].parts)
    ]
    rng = random.Random(config.seed)
    words = _random_monomials(space, rng, count=20, length=4)
    for x, y in zip(words[::2], words[1::2]):
        records.append(_record("trace(xy) = trace(yx)", "traciality of the product state",
                               trace(space, x * y), trace(space, y * x)))
    records.extend(_c_part_records(config))
    return records


def _random_monomials(space: ModelSpace, rng: random.Random, count: int, length: int) -> list[ModelOperator]:
    out = []
    for _ in range(count):
        x = ModelOperator.identity(space)
        for _ in range(rng.randint(1, length)):
            i = rng.randrange(1, space.slot_count)
            x = x * (star(space, i) if rng.random() < 0.5 else limit_cycle_A(space, rng.randrange(space.slot_count)))
        out.append(x)
    return out


def _c_part_records(config: ExperimentConfig) -> list[CheckRecord]:
    """Finite models of the remainder ``c``: the excess over the a/b part shrinks like ``c^k / ell^(k-1)``."""
    params = config.params
    if params.c == 0:
        return []
    records = []
    for k in (2, 3, 4):
        cycle = Permutation.from_cycles(tuple(range(k)))
        previous = None
        for ell in config.ell_sequence:
            space = ModelSpace.from_params(params, k, zero_labels=ell)
            residual = trace(space, represent(space, cycle)) - params.power_sum(k)
            expected = ell * (params.c / ell) ** k
            records.append(_record(f"zero-label residual of a {k}-cycle at ell={ell}", "c-part vanishing",
                                   residual, expected))
            if previous is not None:
                records.append(_record(f"residual at ell={ell} at most half the previous ({k}-cycle)",
                                       "c-part vanishing", residual, previous / 2, passed=residual <= previous / 2))
            previous = residual
    return records


def suite_generalized_multiplicativity(config: ExperimentConfig) -> list[CheckRecord]:
    """Both routes to ``E_n(pi(sigma))``: operator equality and the measure-moment trace."""
    n = min(config.enumeration_bound, config.slot_count)
    space = _space(config, n)
    records = []
    perms = list(symmetric_group(n, config.enumeration_bound))
    for level in range(-1, n):
        bad_op = bad_trace = 0
        first = ("", "")
        for p in perms:
            form = symbolic_En(p, level)
            lhs = conditional_E(space, represent(space, p), level)
            if lhs != realize_En(space, form):
                bad_op += 1
                first = first if first[0] else (repr(lhs), repr(realize_En(space, form)))
            if evaluate_En_trace(space.params, form, level) != trace(space, represent(space, p)):
                bad_trace += 1
        records.append(_record(f"E_{level}(pi(sigma)) = realized normal form on S_{n}",
                               "generalized Thoma multiplicativity", *first,
                               detail=f"{len(perms)} permutations, {bad_op} mismatches", passed=bad_op == 0))
        records.append(_record(f"trace of the normal form at level {level} = model trace",
                               "measure-moment evaluation", bad_trace, 0, detail=f"{len(perms)} permutations"))
    sigma = Permutation.from_cycles((1, 8, 7, 4, 10, 5))
    for k, expected in ((4, 2), (9, 0), (3, 0)):
        records.append(_record(f"excursion length l_(6,{k}) of (1,8,7,4,10,5)", "excursion worked example",
                               excursion_length(sigma, 6, k), expected))
    wide = space.with_slots(11)
    records.append(_record("E_6 of the worked example = realized normal form", "excursion worked example",
                           conditional_E(wide, represent(wide, sigma), 6) == realize_En(wide, symbolic_En(sigma, 6)),
                           True, detail=f"derivative {n_derivative(sigma, 6)}"))
    return records


def _star_words(indices: Iterable[int], max_length: int) -> list[tuple[int, ...]]:
    idx = tuple(indices)
    return [w for L in range(1, max_length + 1) for w in itertools.product(idx, repeat=L)]


def suite_definetti(config: ExperimentConfig) -> list[CheckRecord]:
    """Exchangeability of the star generators and factorization of ``E_0`` over disjoint index sets."""
    m = config.star_indices
    space = _space(config, m + 1)
    cache: dict[Permutation, Fraction] = {}

    def moment(word: tuple[int, ...]) -> Fraction:
        p = eval_word(GeneratorWord("star", word))
        if p not in cache:
            cache[p] = trace(space, represent(space, p))
        return cache[p]

    words = _star_words(range(1, m + 1), config.word_length)
    relabellings = [dict(zip(range(1, m + 1), images)) for images in itertools.permutations(range(1, m + 1))]
    bad, witness = 0, ("", "")
    for w in words:
        base = moment(w)
        for tau in relabellings:
            moved = moment(tuple(tau[i] for i in w))
            if moved != base:
                bad += 1
                witness = witness if witness[0] else (str(moved), str(base))
    records = [_record(f"star-word moments invariant under S_{m} on indices (length <= {config.word_length})",
                       "exchangeability of the star generators", *witness,
                       detail=f"{len(words)} words x {len(relabellings)} relabellings", passed=bad == 0)]

    def operator(word: tuple[int, ...]) -> ModelOperator:
        x = ModelOperator.identity(space)
        for i in word:
            x = x * star(space, i)
        return x

    indices = range(1, m + 1)
    checked = bad = 0
    for labels in itertools.product((0, 1, 2), repeat=m):
        J = [i for i, lab in zip(indices, labels) if lab == 1]
        K = [i for i, lab in zip(indices, labels) if lab == 2]
        if not J or not K:
            continue
        xs = [(w, operator(w)) for w in _star_words(J, config.factor_length)]
        ys = [(w, operator(w)) for w in _star_words(K, config.factor_length)]
        ex = {w: conditional_E(space, x, 0) for w, x in xs}
        ey = {w: conditional_E(space, y, 0) for w, y in ys}
        for (wx, x), (wy, y) in itertools.product(xs, ys):
            checked += 1
            if conditional_E(space, x * y, 0) != ex[wx] * ey[wy]:
                bad += 1
    records.append(_record("E_0(xy) = E_0(x) E_0(y) for star words over disjoint index sets",
                           "independence over the limit-cycle algebra", bad, 0,
                           detail=f"{checked} pairs, words of length <= {config.factor_length}"))
    return records


def suite_limit_cycles(config: ExperimentConfig) -> list[CheckRecord]:
    """Relations among the limit cycles ``A_i`` and the Cesaro approximation of ``A_0``."""
    slots = max(config.slot_count, 5)
    space = _space(config, slots)
    A = [limit_cycle_A(space, i) for i in range(4)]
    v = [star(space, i) for i in range(4)]
    mu = space.measure()
    records = []

    def eq(identity: str, anchor: str, lhs: ModelOperator, rhs: ModelOperator) -> None:
        records.append(_record(identity, anchor, lhs == rhs, True, detail=f"{lhs!r} vs {rhs!r}"[:400]))

    for i in range(1, 4):
        eq(f"A_{i} = v_{i} A_0 v_{i}", "limit cycles conjugate by stars", A[i], v[i] * A[0] * v[i])
    for sigma in (Permutation.from_cycles((0, 1, 2)), Permutation.from_cycles((0, 3), (1, 2)),
                  Permutation.from_cycles((1, 3, 2))):
        p = represent(space, sigma)
        for i in range(4):
            eq(f"pi{sigma} A_{i} pi{sigma}^-1 = A_{sigma(i)}", "equivariance of limit cycles",
               p * A[i] * p.adjoint(), A[sigma(i)])
    for i, j in itertools.combinations(range(4), 2):
        eq(f"A_{i} A_{j} = A_{j} A_{i}", "limit cycles commute", A[i] * A[j], A[j] * A[i])
    for i, j in itertools.permutations(range(1, 4), 2):
        eq(f"A_{i} v_{j} = v_{j} A_{i}", "limit cycles commute with other stars", A[i] * v[j], v[j] * A[i])
    for i in range(1, 4):
        for k in range(1, 4):
            lhs = conditional_E(space, A[i] ** k, 0)
            eq(f"E_0(A_{i}^{k}) = C_{k + 1}", "expectation of a moved limit cycle", lhs,
               ModelOperator.scalar(space, mu.integrate(lambda t, k=k: t**k)))
    for exps in ((1, 2, 1), (2, 1, 3), (3, 3, 1)):
        x = A[1] ** exps[0] * A[2] ** exps[1] * A[3] ** exps[2]
        scalar = trace(space, x)
        expected = Fraction(1)
        for e in exps:
            expected *= trace(space, A[0] ** e)
        records.append(_record(f"E_-1(A_1^{exps[0]} A_2^{exps[1]} A_3^{exps[2]}) factorizes",
                               "independence of the limit cycles", scalar, expected))
        y = A[0] ** 2 * x
        factor = ModelOperator.identity(space)
        for i, e in zip((1, 2, 3), exps):
            factor = factor * conditional_E(space, A[i] ** e, 0)
        eq(f"E_0(A_0^2 A_1^{exps[0]} A_2^{exps[1]} A_3^{exps[2]}) factorizes", "independence of the limit cycles",
           conditional_E(space, y, 0), A[0] ** 2 * factor)
    for body in ((1, 2), (1, 3, 2), (2, 3), (0, 2, 1), (1, 4, 2, 3)):
        records.extend(_star_word_expectation(space, body))
    m2 = mu.integrate(lambda t: t * t)
    norms = []
    for N in config.cesaro_sizes:
        cs = space.with_slots(max(slots, N + 1))
        residual = l2_norm_sq(cs, cesaro_A(cs, 0, N) - limit_cycle_A(cs, 0))
        norms.append(residual)
        records.append(_record(f"||cesaro_A(0,{N}) - A_0||^2 = (1 - C_3)/N", "Cesaro approximation of A_0",
                               residual, (1 - m2) / N))
    records.append(_record("Cesaro residual strictly decreasing in N", "Cesaro approximation of A_0",
                           ",".join(map(str, norms)), "", passed=all(x > y for x, y in zip(norms, norms[1:]))
                           if m2 != 1 else all(x == 0 for x in norms)))
    return records


def _star_word_expectation(space: ModelSpace, body: tuple[int, ...]) -> list[CheckRecord]:
    """``E_n`` of the closed star word ``v_(n1) v_(n2) ... v_(nk) v_(n1)``, ``n1`` the least index.

    When ``n1 <= n`` the inner letters above ``n`` turn into ``A_0``; otherwise
    every letter is above ``n`` and the word collapses to ``C_k``.
    """
    A0 = limit_cycle_A(space, 0)
    word = body + body[:1]
    x = ModelOperator.identity(space)
    for i in word:
        x = x * star(space, i)
    records = []
    for n in range(-1, max(body) + 1):
        if body[0] <= n:
            expected = ModelOperator.identity(space)
            for pos, i in enumerate(word):
                inner = 0 < pos < len(word) - 1
                expected = expected * (A0 if inner and i > n else star(space, i))
        else:
            expected = ModelOperator.scalar(space, trace(space, A0 ** (len(body) - 1)))
        got = conditional_E(space, x, n)
        records.append(_record(f"E_{n}(v{word}) = substituted word", "limit cycles as star-word expectations",
                               got == expected, True, detail=repr(got)[:200]))
    return records


def suite_spectral(config: ExperimentConfig) -> list[CheckRecord]:
    """Atom-wise estimates for the spectral measure of ``A_0``."""
    space = _space(config, 2)
    mu = space.measure()
    u = represent(space, Permutation.transposition(0, 1))
    records = []
    for t, mass in mu.atoms:
        chi = spectral_projection(space, 0, t)
        pairing = trace(space, chi * u)
        first = abs(t) * mass
        records.append(_record(f"|t| mu({{t}}) <= |trace(chi u)| at t={t}", "spectral estimate, lower bound",
                               first, abs(pairing), passed=first <= abs(pairing)))
        records.append(_record(f"trace(chi u)^2 <= mu({{t}})^3 at t={t}", "spectral estimate, upper bound",
                               pairing * pairing, mass**3, passed=pairing * pairing <= mass**3))
        records.append(_record(f"mu({{t}}) >= t^2 at t={t}", "discreteness gap", mass, t * t, passed=mass >= t * t))
        records.append(_record(f"multiplicity of t={t} is an integer", "integral multiplicities",
                               mass / abs(t), (mass / abs(t)).denominator == 1, passed=(mass / abs(t)).denominator == 1))
    records.append(_record("spectral measure is a Thoma measure", "integral multiplicities",
                           bool(check_thoma_measure(mu)), True))
    cell = ModelSpace.from_params(config.cell_params, 2, zero_labels=1)
    M = model_algebra(cell, [limit_cycle_A(cell, 0), limit_cycle_A(cell, 1), star(cell, 1)], "M")
    M0 = model_algebra(cell, [limit_cycle_A(cell, 0)], "M0")
    report = discreteness_check(M, M0, dense_oracle(cell, star(cell, 1)))
    records.append(_record("finite tensor cell passes the discreteness check", "spectral discreteness",
                           report.passed, True, detail=str(report.preconditions)))
    records.append(_record("finite tensor cell has integral multiplicities", "integral multiplicities",
                           report.integral_multiplicities, True,
                           detail=", ".join(f"{a.t}:{a.mass}" for a in report.atoms)))
    weights = _flip_weights(config.params)
    FM, FM0, flip = flip_square_fixture(weights)
    report = discreteness_check(FM, FM0, flip)
    records.append(_record(f"flip fixture with weights {list(map(str, weights))} passes", "spectral discreteness",
                           report.passed and report.integral_multiplicities, True,
                           detail=", ".join(f"{a.t}:{a.multiplicity}" for a in report.atoms)))
    return records


def _flip_weights(params: ThomaParams) -> list[Fraction]:
    if params.a and not params.b and params.c == 0:
        return list(params.a)
    return [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]


def suite_commuting_squares(config: ExperimentConfig) -> list[CheckRecord]:
    records = []
    weights = _flip_weights(config.params)
    M, M0, u = flip_square_fixture(weights)
    n = len(weights)
    expected = kron(diagonal_matrix(weights), identity_matrix(n))
    records.append(_record("E_M0(flip) = sum a_i e_ii (x) 1", "flip square expectation",
                           M0.expectation(u) == expected, True))
    conj = TracialAlgebra(M.ambient_dim, tuple(u.matmul(b).matmul(u.transpose()) for b in M0.basis),
                          M.state_density, "uM0u*")
    scalars = TracialAlgebra.scalars(M.ambient_dim, M.state_density)
    records.append(_square_record("flip square over the scalars", scalars, M0, conj, M, config.seed))
    space = ModelSpace.from_params(config.cell_params, 3, zero_labels=1)
    gens = {
        "A0": limit_cycle_A(space, 0), "A1": limit_cycle_A(space, 1), "u1": coxeter(space, 1),
        "u2": coxeter(space, 2), "v1": star(space, 1), "v2": star(space, 2),
    }

    def alg(*names: str) -> TracialAlgebra:
        if not names:
            rho = density_matrix(space, DenseOracleConfig(config.max_dim))
            return TracialAlgebra.scalars(rho.shape[0], rho)
        return model_algebra(space, [gens[k] for k in names], "<" + ",".join(names) + ">",
                             DenseOracleConfig(config.max_dim))

    cells = [
        ("cell C < <A0>, <A1> < <A0,u1>", alg(), alg("A0"), alg("A1"), alg("A0", "u1")),
        ("cell <A1> < <A0,u1>, <A1,u2> < <A0,u1,u2>", alg("A1"), alg("A0", "u1"), alg("A1", "u2"),
         alg("A0", "u1", "u2")),
        ("cell <A0> < <A0,v1>, <A0,v2> < <A0,v1,v2>", alg("A0"), alg("A0", "v1"), alg("A0", "v2"),
         alg("A0", "v1", "v2")),
    ]
    for name, *square in cells:
        records.append(_square_record(name, *square, seed=config.seed))
    report = is_commuting_square(alg(), alg("v1"), alg("v2"), alg("v1", "v2"), seed=config.seed)
    records.append(_record("negative control: C < <v1>, <v2> is not a commuting square", "commuting square criteria",
                           report.holds, False, detail=str(dict(report.checked_conditions))))
    return records


def _square_record(name: str, N, B1, B2, M, seed: int) -> CheckRecord:
    report = is_commuting_square(N, B1, B2, M, seed=seed)
    conditions = dict(report.checked_conditions)
    agree = len(set(conditions.values())) == 1
    return _record(name, "commuting square criteria", report.max_defect, 0,
                   detail=f"conditions {conditions}", passed=report.holds and agree)


MARKOV_SWEEP: tuple[tuple[str, ThomaParams], ...] = (
    ("regular", ThomaParams()),
    ("uniform a=(1/2,1/2)", ThomaParams.parse(["1/2", "1/2"])),
    ("uniform a=(1/3,1/3,1/3)", ThomaParams.parse(["1/3"] * 3)),
    ("trivial a=(1)", ThomaParams.parse(["1"])),
    ("uniform b=(1/2,1/2)", ThomaParams.parse([], ["1/2", "1/2"])),
    ("sign b=(1)", ThomaParams.parse([], ["1"])),
    ("near-uniform a=(2/3,1/3)", ThomaParams.parse(["2/3", "1/3"])),
    ("near-uniform a=(1/2,1/2-1/100)", ThomaParams.parse(["1/2", "49/100"])),
    ("mixed a=(1/2), b=(1/2)", ThomaParams.parse(["1/2"], ["1/2"])),
    ("partial a=(1/2) with c=1/2", ThomaParams.parse(["1/2"])),
)


def suite_markov(config: ExperimentConfig) -> list[CheckRecord]:
    """The Markov identity agrees with the uniform-parameter classification."""
    nmax = min(6, config.enumeration_bound)
    records = []
    for name, params in (("configured parameters", config.params),) + MARKOV_SWEEP:
        check = markov_trace_check(params, nmax, config.enumeration_bound)
        classified = bool(is_markov_params(params))
        detail = "identity holds" if check.holds else (
            "witness n={0} g={1}: lhs={2} rhs={3}".format(*check.witness))
        records.append(_record(f"Markov identity up to S_{nmax} matches classification ({name})",
                               "Markov traces are the uniform ones", check.holds, classified, detail=detail))
    return records


def suite_stirling(config: ExperimentConfig) -> list[CheckRecord]:
    return [
        _record(f"sum over S_{n} of x^orbits = x(x+1)...(x+{n - 1})", "Stirling-type sum",
                list(stirling_sum(n, config.stirling_max)), list(rising_factorial(n)))
        for n in range(1, config.stirling_max + 1)
    ]


def suite_antisymmetrizer(config: ExperimentConfig) -> list[CheckRecord]:
    n_top = min(6, config.enumeration_bound)
    records = []
    for params in (config.params, ThomaParams.parse(["1/2", "1/2"])):
        space = ModelSpace.from_params(params, n_top, config.zero_labels)
        for t, _ in space.measure().atoms:
            for n in range(1, n_top + 1):
                lhs, rhs = antisymmetrizer_check(space, t, n, config.enumeration_bound)
                records.append(_record(f"antisymmetrizer trace at t={t}, n={n} ({params})",
                                       "antisymmetrizer identity", lhs, rhs))
    return records


def suite_transition(config: ExperimentConfig) -> list[CheckRecord]:
    space = _space(config, max(config.slot_count, 3))
    A0, A1, u1 = limit_cycle_A(space, 0), limit_cycle_A(space, 1), coxeter(space, 1)
    records = []
    for n in range(4):
        for eps in (0, 1):
            x = A0**n * (u1 if eps else ModelOperator.identity(space))
            got = transition_R0(space, x)
            records.append(_record(f"R_0(A_0^{n} u_1^{eps}) = A_1^{n + eps}", "transition operator of the shift",
                                   got == A1 ** (n + eps), True, detail=repr(got)))
    return records


SUITE_FUNCTIONS: dict[str, Callable[[ExperimentConfig], list[CheckRecord]]] = {
    "multiplicativity": suite_multiplicativity,
    "generalized-multiplicativity": suite_generalized_multiplicativity,
    "definetti": suite_definetti,
    "limit-cycles": suite_limit_cycles,
    "spectral": suite_spectral,
    "commuting-squares": suite_commuting_squares,
    "markov": suite_markov,
    "stirling": suite_stirling,
    "antisymmetrizer": suite_antisymmetrizer,
    "transition": suite_transition,
}


def run_suite(name: str, config: ExperimentConfig) -> VerificationReport:
    start = time.perf_counter()
    records = tuple(SUITE_FUNCTIONS[name](config))
    return VerificationReport(name, records, config.seed, time.perf_counter() - start)
