"""Operator orderings over free noncommutative algebras, with BCH and Magnus expansions."""

from .gotcore import (
    Decomposition,
    OrderingPair,
    VerificationReport,
    contraction_general,
    contraction_matrix,
    contraction_same,
    directional_derivative,
    got_verify,
    primed_product_eval,
    primed_product_eval_general,
    push_lemma_check,
    scalar_derivative,
)
from .ncalg import (
    Generator,
    GradedSeries,
    NCPoly,
    ad_power,
    commutator,
    exp_truncated,
    gen,
    log_truncated,
    truncate,
)
from .ordering import MonomialOrdering, apply_monomial, apply_monomial_poly, parse_rule, theta, weyl_symmetrize

__version__ = "0.1.0"
