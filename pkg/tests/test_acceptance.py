"""The twelve acceptance criteria, each checked exactly.

Every test carries a ``criterion`` marker; the conftest prints one PASS/FAIL
line per criterion after the run.  Time budgets are asserted too.
"""

import itertools
import random
import time
from contextlib import contextmanager
from fractions import Fraction as F

import pytest

from thoma_lab.algebra_lab import (
    TracialAlgebra, diagonal_matrix, discreteness_check, flip_square_fixture, identity_matrix, is_commuting_square,
    kron, markov_trace_check, model_algebra,
)
from thoma_lab.suites import MARKOV_SWEEP
from thoma_lab.symgroup import (
    GeneratorWord, Permutation, eval_word, excursion_length, n_derivative, rising_factorial, stirling_sum,
    symmetric_group,
)
from thoma_lab.tensor_model import (
    Label, LabelKind, ModelOperator, ModelSpace, antisymmetrizer_check, cesaro_A, conditional_E, coxeter,
    dense_conditional_E, dense_oracle, dense_trace, density_matrix, l2_norm_sq, limit_cycle_A, realize_En,
    represent, signed_action, spectral_projection, star, trace, transition_R0,
)
from thoma_lab.tensor_model.oracle import configurations
from thoma_lab.thoma import ThomaParams, character, check_thoma_measure, is_markov_params, moment, symbolic_En

criterion = pytest.mark.criterion


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.1f}s, budget {seconds}s"


def report(number, text):
    print(f"criterion {number}: {text}")


S6 = list(symmetric_group(6))


# 1 --------------------------------------------------------------------------

FORMULA_SETS = {
    "uniform a": ThomaParams.parse(["1/3"] * 3),
    "uniform b": ThomaParams.parse([], ["1/2", "1/2"]),
    "mixed a+b": ThomaParams.parse(["1/2", "1/4"], ["1/8", "1/8"]),
    "single a": ThomaParams.parse(["1"]),
    # the regular character has every parameter zero, so c = 1 here; it is
    # modelled by the diffuse zero label, whose k-cycle orbits carry no weight
    "regular": ThomaParams(),
    "two atoms with multiplicity": ThomaParams.parse(["1/4", "1/4"], ["1/4", "1/4"]),
}


@criterion(1, "Thoma formula agreement on all of S_6 for six parameter sets")
def test_c01_thoma_formula():
    with budget(30):
        for name, params in FORMULA_SETS.items():
            sp = ModelSpace.from_params(params, 6)
            bad = [p for p in S6 if trace(sp, represent(sp, p)) != character(params, p)]
            assert not bad, (name, bad[:3])
            if name == "regular":
                assert all(character(params, p) == 0 for p in S6 if not p.is_identity)
            else:
                assert params.c == 0
    report(1, "trace(represent(s)) = character(params, s) for 6 x 720 permutations")


# 2 --------------------------------------------------------------------------


@criterion(2, "c-part convergence: residual l (c/l)^k halves or better per doubling of l")
def test_c02_c_part():
    params = ThomaParams.parse(["1/2"])
    c = params.c
    assert c == F(1, 2)
    with budget(5):
        for k in (2, 3, 4):
            cycle = Permutation.from_cycles(tuple(range(k)))
            residuals = []
            for ell in (1, 2, 4, 8, 16):
                sp = ModelSpace.from_params(params, k, zero_labels=ell)
                value = trace(sp, represent(sp, cycle))
                assert value == F(1, 2) ** k + ell * (c / ell) ** k
                residuals.append(value - F(1, 2) ** k)
            assert all(r2 <= r1 / 2 for r1, r2 in zip(residuals, residuals[1:])), residuals
    report(2, "exact residuals for l in 1..16, k in 2..4")


# 3 --------------------------------------------------------------------------


@criterion(3, "generalized multiplicativity on S_6 for n = -1..5, two parameter sets")
@pytest.mark.parametrize("params", [ThomaParams.parse(["1/2", "1/4"], ["1/8"]),
                                    ThomaParams.parse(["1/3", "1/3"], ["1/6", "1/6"])], ids=["mixed", "paired"])
def test_c03_generalized_multiplicativity(params):
    sp = ModelSpace.from_params(params, 6)
    with budget(60):
        for sigma in S6:
            for n in range(-1, 6):
                lhs = conditional_E(sp, represent(sp, sigma), n)
                rhs = realize_En(sp, symbolic_En(sigma, n))
                assert lhs.terms == rhs.terms, (sigma, n)
                assert lhs == rhs
    report(3, f"{len(S6) * 7} operator identities, term by term")


# 4 --------------------------------------------------------------------------


@criterion(4, "worked excursion example and its derivative")
def test_c04_worked_example():
    sigma = Permutation.from_cycles((1, 8, 7, 4, 10, 5))
    with budget(1):
        assert excursion_length(sigma, 6, 4) == 2
        assert excursion_length(sigma, 6, 9) == 0
        assert excursion_length(sigma, 6, 3) == 0
        derivative = n_derivative(sigma, 6)
        assert derivative == Permutation.from_cycles((1, 4, 5))
        sp = ModelSpace.from_params(ThomaParams.parse(["1/2", "1/4"], ["1/8"]), 11)
        form = symbolic_En(sigma, 6)
        assert form.derivative == derivative
        assert conditional_E(sp, represent(sp, sigma), 6) == realize_En(sp, form)
    report(4, "l_(6,4) = 2, l_(6,9) = 0, l_(6,3) = 0, derivative (1,4,5)")


# 5 --------------------------------------------------------------------------


def star_operator(sp, letters):
    x = ModelOperator.identity(sp)
    for i in letters:
        x = x * star(sp, i)
    return x


@criterion(5, "exchangeability of star-word moments and disjoint E_0 factorization")
def test_c05_exchangeability_and_independence():
    sp = ModelSpace.from_params(ThomaParams.parse(["1/2", "1/4"], ["1/8"]), 5)
    with budget(120):
        cache = {}

        def moment_of(letters):
            p = eval_word(GeneratorWord("star", letters))
            if p not in cache:
                cache[p] = trace(sp, represent(sp, p))
            return cache[p]

        relabel = [dict(zip((1, 2, 3, 4), images)) for images in itertools.permutations((1, 2, 3, 4))]
        words = [w for L in range(1, 6) for w in itertools.product((1, 2, 3, 4), repeat=L)]
        for w in words:
            base = moment_of(w)
            assert all(moment_of(tuple(t[i] for i in w)) == base for t in relabel), w
        pairs = 0
        for labels in itertools.product((0, 1, 2), repeat=4):
            J = [i + 1 for i, lab in enumerate(labels) if lab == 1]
            K = [i + 1 for i, lab in enumerate(labels) if lab == 2]
            if not J or not K:
                continue
            xs = [star_operator(sp, w) for L in (1, 2, 3) for w in itertools.product(J, repeat=L)]
            ys = [star_operator(sp, w) for L in (1, 2, 3) for w in itertools.product(K, repeat=L)]
            exs = [conditional_E(sp, x, 0) for x in xs]
            eys = [conditional_E(sp, y, 0) for y in ys]
            for (x, ex), (y, ey) in itertools.product(zip(xs, exs), zip(ys, eys)):
                assert conditional_E(sp, x * y, 0) == ex * ey
                pairs += 1
    report(5, f"{len(words)} words x 24 relabellings; {pairs} factorized pairs")


# 6 --------------------------------------------------------------------------


@criterion(6, "limit-cycle relations and strictly decreasing Cesaro residual")
def test_c06_limit_cycle_calculus():
    params = ThomaParams.parse(["1/2", "1/4"], ["1/8"])
    sp = ModelSpace.from_params(params, 6)
    A = [limit_cycle_A(sp, i) for i in range(6)]
    v = [star(sp, i) for i in range(6)]
    C = [None, F(1)] + [moment(sp.measure(), k - 1) for k in range(2, 8)]
    with budget(10):
        for i in range(1, 6):
            assert A[i] == v[i] * A[0] * v[i]
        for sigma in symmetric_group(5):
            p = represent(sp, sigma)
            assert all(p * A[i] * p.adjoint() == A[sigma(i)] for i in range(5))
        for i, j in itertools.combinations(range(6), 2):
            assert A[i] * A[j] == A[j] * A[i]
        for i, j in itertools.permutations(range(1, 6), 2):
            assert A[i] * v[j] == v[j] * A[i]
        for i in range(1, 6):
            for k in range(1, 5):
                assert conditional_E(sp, A[i] ** k, 0) == ModelOperator.scalar(sp, C[k + 1])
        for indices in itertools.permutations(range(1, 5), 3):
            for exps in itertools.product((1, 2, 3), repeat=3):
                x = ModelOperator.identity(sp)
                for i, e in zip(indices, exps):
                    x = x * A[i] ** e
                scalar = F(1)
                factor = ModelOperator.identity(sp)
                for i, e in zip(indices, exps):
                    scalar *= trace(sp, A[0] ** e)
                    factor = factor * conditional_E(sp, A[i] ** e, 0)
                assert conditional_E(sp, x, -1) == ModelOperator.scalar(sp, scalar)
                assert conditional_E(sp, A[0] * x, 0) == A[0] * factor
        wide = sp.with_slots(17)
        residuals = [l2_norm_sq(wide, cesaro_A(wide, 0, N) - limit_cycle_A(wide, 0)) for N in (1, 2, 4, 8, 16)]
        assert all(r1 > r2 for r1, r2 in zip(residuals, residuals[1:]))
        assert residuals == [(1 - C[3]) / N for N in (1, 2, 4, 8, 16)]
    report(6, f"Cesaro residuals {', '.join(map(str, residuals))}")


# 7 --------------------------------------------------------------------------

SPECTRAL_SETS = [
    ThomaParams.parse(["1/2", "1/4"], ["1/8"]),
    ThomaParams.parse(["1/2", "1/2"]),
    ThomaParams.parse(["1/6"] * 3, ["1/4", "1/4"]),
    ThomaParams.parse([], ["1/3"] * 3),
    ThomaParams.parse(["1/5", "1/10", "1/10"], ["1/5"]),
]


@criterion(7, "spectral estimates, discreteness gap and integral multiplicities")
def test_c07_spectral():
    with budget(5):
        atoms = 0
        for params in SPECTRAL_SETS:
            sp = ModelSpace.from_params(params, 2)
            u = represent(sp, Permutation.transposition(0, 1))
            mu = sp.measure()
            assert check_thoma_measure(mu)
            for t, mass in mu.atoms:
                pairing = trace(sp, spectral_projection(sp, 0, t) * u)
                eps = abs(t)
                assert eps * mass <= abs(pairing)
                assert pairing**2 <= mass**3
                assert mass >= t * t
                assert (mass / abs(t)).denominator == 1
                atoms += 1
        # the same estimates through the algebraic checker on finite fixtures
        for weights in ([F(1, 2), F(1, 3), F(1, 6)], [F(1, 4), F(1, 4), F(1, 2)]):
            M, M0, flip = flip_square_fixture(weights)
            result = discreteness_check(M, M0, flip)
            assert result.passed and result.integral_multiplicities
        cell = ModelSpace.from_params(ThomaParams.parse(["1/2"], ["1/4", "1/4"]), 2)
        M = model_algebra(cell, [limit_cycle_A(cell, 0), limit_cycle_A(cell, 1), star(cell, 1)])
        M0 = model_algebra(cell, [limit_cycle_A(cell, 0)])
        result = discreteness_check(M, M0, dense_oracle(cell, star(cell, 1)))
        assert result.passed and result.integral_multiplicities
        assert {a.t: a.multiplicity for a in result.atoms} == {F(1, 2): 1, F(-1, 4): 2}
    report(7, f"{atoms} atoms checked, plus three matrix fixtures")


# 8 --------------------------------------------------------------------------


@criterion(8, "antisymmetrizer identity for n <= 6, vanishing beyond the multiplicity")
@pytest.mark.parametrize("params", [ThomaParams.parse(["1/2", "1/2"]),
                                    ThomaParams.parse(["1/6"] * 3, ["1/4", "1/4"])], ids=["pair", "mixed"])
def test_c08_antisymmetrizer(params):
    sp = ModelSpace.from_params(params, 6)
    vanished = 0
    with budget(60):
        for t, _ in sp.measure().atoms:
            nu = sp.measure().multiplicity(t)
            for n in range(1, 7):
                lhs, rhs = antisymmetrizer_check(sp, t, n)
                assert lhs == rhs, (t, n, lhs, rhs)
                if n > nu:
                    assert lhs == 0
                    vanished += 1
                else:
                    assert lhs > 0
    assert vanished > 0
    report(8, f"{params}: {vanished} vanishing cases")


# 9 --------------------------------------------------------------------------


@criterion(9, "Stirling-type sum equals the rising factorial for n <= 7")
def test_c09_stirling():
    with budget(30):
        for n in range(1, 8):
            assert stirling_sum(n) == rising_factorial(n)
    report(9, "n = 1..7")


# 10 -------------------------------------------------------------------------


@criterion(10, "flip square expectation and three tensor-model tower cells")
def test_c10_commuting_squares():
    weights = [F(1, 2), F(1, 3), F(1, 6)]
    with budget(10):
        M, M0, u = flip_square_fixture(weights)
        assert M0.expectation(u) == kron(diagonal_matrix(weights), identity_matrix(3))
        conj = TracialAlgebra(9, tuple(u.matmul(b).matmul(u.transpose()) for b in M0.basis), M.state_density)
        assert is_commuting_square(TracialAlgebra.scalars(9, M.state_density), M0, conj, M).holds

        sp = ModelSpace.from_params(ThomaParams.parse(["2/3"], ["1/3"]), 3)
        rho = density_matrix(sp)
        A0, A1 = limit_cycle_A(sp, 0), limit_cycle_A(sp, 1)
        u1, u2, v1, v2 = coxeter(sp, 1), coxeter(sp, 2), star(sp, 1), star(sp, 2)

        def alg(*gens):
            return model_algebra(sp, gens) if gens else TracialAlgebra.scalars(rho.shape[0], rho)

        cells = [
            (alg(), alg(A0), alg(A1), alg(A0, u1)),
            (alg(A1), alg(A0, u1), alg(A1, u2), alg(A0, u1, u2)),
            (alg(A0), alg(A0, v1), alg(A0, v2), alg(A0, v1, v2)),
        ]
        for cell in cells:
            result = is_commuting_square(*cell)
            assert result.holds and result.max_defect == 0
            assert all(result.checked_conditions.values())
    report(10, "E_M0(flip) = sum a_i e_ii (x) 1; three cells hold with zero defect")


# 11 -------------------------------------------------------------------------


@criterion(11, "Markov identity matches the classification; transition operator identities")
def test_c11_markov_and_transition():
    assert len(MARKOV_SWEEP) == 10
    with budget(60):
        for name, params in MARKOV_SWEEP:
            check = markov_trace_check(params, 6)
            assert check.holds == bool(is_markov_params(params)), name
        sp = ModelSpace.from_params(ThomaParams.parse(["1/2", "1/4"], ["1/8"]), 4)
        A0, A1, u1 = limit_cycle_A(sp, 0), limit_cycle_A(sp, 1), coxeter(sp, 1)
        for n in range(4):
            for eps in (0, 1):
                assert transition_R0(sp, A0**n * u1**eps) == A1 ** (n + eps)
    report(11, "10-case sweep and 8 transition identities")


# 12 -------------------------------------------------------------------------

KINDS = {"+": LabelKind.PLUS, "-": LabelKind.MINUS, "0": LabelKind.ZERO}
BASE_WEIGHTS = (F(1, 2), F(1, 3), F(1, 6))


def spaces_up_to_243():
    """Every label-kind multiset with at most three labels, every slot count with L^S <= 243."""
    for L in (1, 2, 3):
        for kinds in itertools.combinations_with_replacement("+-0", L):
            weights = BASE_WEIGHTS[:L] if L < 3 else BASE_WEIGHTS
            if L == 1:
                weights = (F(1),)
            elif L == 2:
                weights = (F(2, 3), F(1, 3))
            zero = sum(w for w, k in zip(weights, kinds) if k == "0")
            zeros = kinds.count("0")
            labels = tuple(
                Label(KINDS[k], zero / zeros if k == "0" else w) for k, w in zip(kinds, weights)
            )
            max_slots = 6 if L == 1 else max(s for s in range(1, 9) if L**s <= 243)
            for slots in range(1, max_slots + 1):
                yield ModelSpace(labels, slots)


def random_operator(sp, rng):
    x = ModelOperator.identity(sp)
    for _ in range(rng.randint(1, 5)):
        i = rng.randrange(sp.slot_count)
        pick = rng.randrange(4)
        if pick == 0:
            x = x * star(sp, i)
        elif pick == 1:
            x = x * coxeter(sp, i)
        elif pick == 2:
            x = x * limit_cycle_A(sp, i)
        else:
            x = x * ModelOperator.diagonal(sp, i, [F(rng.randint(-3, 3), rng.randint(1, 3))
                                                   for _ in range(sp.label_count)])
    if rng.random() < 0.5:
        x = x + ModelOperator.scalar(sp, F(rng.randint(-2, 2)))
    return x


@criterion(12, "fast paths match the dense oracle on all small spaces, 200+ seeded words")
def test_c12_oracle_equivalence():
    rng = random.Random(20261014)
    words = spaces = 0
    with budget(120):
        for sp in spaces_up_to_243():
            spaces += 1
            rho = density_matrix(sp)
            for _ in range(3):
                x, y = random_operator(sp, rng), random_operator(sp, rng)
                X, Y = dense_oracle(sp, x), dense_oracle(sp, y)
                assert dense_oracle(sp, x * y) == X.matmul(Y)
                assert dense_oracle(sp, x.adjoint()) == X.transpose()
                assert trace(sp, x) == dense_trace(sp, X)
                assert trace(sp, x * y) == dense_trace(sp, X.matmul(Y))
                n = rng.randrange(-1, sp.slot_count)
                assert dense_oracle(sp, conditional_E(sp, x, n)) == dense_conditional_E(sp, X, n)
                words += 2
            configs = configurations(sp)
            p = Permutation.from_one_line(rng.sample(range(sp.slot_count), sp.slot_count))
            P = dense_oracle(sp, represent(sp, p)).to_dok()
            for col, config in enumerate(configs):
                sign, image = signed_action(sp, p, config)
                assert P.get((configs.index(image), col)) == sign
                assert sum(1 for (_, c) in P if c == col) == 1
            assert rho.shape[0] <= 243
    assert words >= 200
    report(12, f"{spaces} spaces, {words} random words")
