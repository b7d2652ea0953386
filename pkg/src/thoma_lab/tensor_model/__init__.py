"""Finite truncation of the infinite tensor-product model.

The single-site space has one basis vector per parameter value: ``PLUS``
labels weighted by the ``a_i``, ``MINUS`` labels by the ``b_j`` (their flips
carry a sign) and ``ZERO`` labels sharing the remainder ``c``.  Operators are
kept as sums of permutation-times-diagonal monomials; :mod:`.oracle` gives a
brute-force matrix realization for cross-checking.
"""

from .model import (
    antisymmetrizer, antisymmetrizer_check, cesaro_A, conditional_E, coxeter, l2_norm_sq, limit_cycle_A,
    limit_k_cycle, multiply, realize_En, represent, shift_endo, signed_action, spectral_projection, star,
    trace, transition_R0,
)
from .operator import ModelOperator, Term
from .oracle import (
    DenseOracleConfig, adjacent_factorization, dense_conditional_E, dense_oracle, dense_trace, density_matrix,
)
from .space import Label, LabelKind, ModelSpace

__all__ = [
    "Label", "LabelKind", "ModelSpace", "ModelOperator", "Term", "DenseOracleConfig",
    "represent", "star", "coxeter", "multiply", "trace", "l2_norm_sq", "conditional_E", "limit_cycle_A",
    "spectral_projection", "limit_k_cycle", "realize_En", "cesaro_A", "shift_endo", "transition_R0",
    "antisymmetrizer", "antisymmetrizer_check", "signed_action",
    "dense_oracle", "density_matrix", "dense_trace", "dense_conditional_E", "adjacent_factorization",
]
