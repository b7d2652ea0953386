import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from conftest import permutations_of
from thoma_lab.errors import ContractError, ResourceLimitError
from thoma_lab.symgroup import Permutation
from thoma_lab.tensor_model import (
    DenseOracleConfig, ModelOperator, ModelSpace, adjacent_factorization, conditional_E, coxeter,
    dense_conditional_E, dense_oracle, dense_trace, density_matrix, limit_cycle_A, represent, signed_action, star,
    trace,
)
from thoma_lab.tensor_model.oracle import configurations
from thoma_lab.thoma import ThomaParams

PM = ModelSpace.from_params(ThomaParams.parse(["1/2"], ["1/2"]), 2)
MIXED3 = ModelSpace.from_params(ThomaParams.parse(["1/2", "1/4"], ["1/8"]), 3, zero_labels=1)


def test_identity_is_identity_matrix():
    assert dense_oracle(MIXED3, ModelOperator.identity(MIXED3)) == DomainMatrix.eye(64, QQ).to_sparse()


def test_signed_flip_matrix():
    m = dense_oracle(PM, represent(PM, Permutation.transposition(0, 1)))
    # basis order: (+,+), (+,-), (-,+), (-,-); a single -1 on the minus-minus vector
    expected = DomainMatrix([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, -1]], (4, 4), QQ)
    assert m.to_dense() == expected.convert_to(QQ)


def test_density_is_product():
    rho = density_matrix(PM)
    assert rho.to_dok() == {(i, i): QQ(1, 4) for i in range(4)}


def test_caps():
    with pytest.raises(ResourceLimitError):
        dense_oracle(MIXED3, ModelOperator.identity(MIXED3), DenseOracleConfig(max_dim=63))
    with pytest.raises(ContractError):
        DenseOracleConfig(max_dim=0)
    diffuse = ModelSpace.from_params(ThomaParams.parse(["1/2"]), 2)
    with pytest.raises(ContractError):
        dense_oracle(diffuse, ModelOperator.identity(diffuse))


@given(permutations_of(6))
def test_adjacent_factorization(p):
    letters = adjacent_factorization(p, 6)
    q = Permutation()
    for i in letters:
        q = q * Permutation.transposition(i - 1, i)
    assert q == p


@given(permutations_of(3))
def test_signed_action_matches_columns(p):
    m = dense_oracle(MIXED3, represent(MIXED3, p)).to_dok()
    L = MIXED3.label_count
    for config in configurations(MIXED3):
        col = sum(r * L ** (2 - j) for j, r in enumerate(config))
        sgn, image = signed_action(MIXED3, p, config)
        row = sum(r * L ** (2 - j) for j, r in enumerate(image))
        assert m[(row, col)] == sgn


def random_operator(space, rng, length):
    x = ModelOperator.identity(space)
    for _ in range(rng.randint(0, length)):
        i = rng.randrange(space.slot_count)
        x = x * rng.choice([star, coxeter, limit_cycle_A])(space, i)
    c = F(rng.randint(-3, 3), rng.randint(1, 4))
    return x * c + ModelOperator.scalar(space, F(rng.randint(0, 2)))


@pytest.mark.parametrize("seed", range(3))
def test_words_against_dense(seed):
    rng = random.Random(seed)
    sp = ModelSpace.from_params(ThomaParams.parse(["1/2"], ["1/3"]), 4, zero_labels=1)
    rho = density_matrix(sp)
    for _ in range(15):
        x, y = random_operator(sp, rng, 4), random_operator(sp, rng, 4)
        X, Y = dense_oracle(sp, x), dense_oracle(sp, y)
        assert dense_oracle(sp, x * y) == X.matmul(Y)
        assert dense_oracle(sp, x.adjoint()) == X.transpose()
        assert dense_trace(sp, X) == trace(sp, x)
        n = rng.randrange(-1, 4)
        assert dense_oracle(sp, conditional_E(sp, x, n)) == dense_conditional_E(sp, X, n)
        assert rho.shape == X.shape


def test_dense_expectation_bad_level():
    with pytest.raises(ContractError):
        dense_conditional_E(PM, density_matrix(PM), -2)


@given(st.integers(0, 3))
def test_expectation_at_top_is_identity_map(n):
    x = represent(MIXED3, Permutation.from_cycles((0, 2, 1))) * limit_cycle_A(MIXED3, 1)
    X = dense_oracle(MIXED3, x)
    if n >= 2:
        assert dense_conditional_E(MIXED3, X, n) == X
