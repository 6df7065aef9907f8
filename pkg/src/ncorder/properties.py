"""Randomized invariants across all modules, as run by ``ncorder suite``."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable

from . import exprparse, matrep
from .gotcore import (
    Decomposition,
    OrderingPair,
    contraction_general,
    contraction_matrix,
    directional_derivative,
    got_verify,
    primed_product_eval,
    push_lemma_check,
    scalar_derivative,
)
from .ncalg import (
    GradedSeries,
    NCPoly,
    add,
    commutator,
    exp_truncated,
    format_poly,
    gen,
    log_truncated,
    mul,
    substitute,
    truncate,
)
from .ordering import (
    MonomialOrdering,
    apply_monomial,
    perm_ordering,
    theta,
    weyl_symmetrize,
)
from .series import (
    BchConfig,
    MagnusConfig,
    X,
    Y,
    bch_classical_w,
    bch_log_oracle,
    bch_recursion,
    dyson_discrete,
    magnus_got,
    magnus_third_order,
    product_exp_series,
)

LETTERS = [gen(c) for c in "XYZ"]


# random generators ---------------------------------------------------------

def random_poly(rng: random.Random, gens=LETTERS, max_len: int = 3, max_terms: int = 4, constant: bool = True) -> NCPoly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        n = rng.randint(0 if constant else 1, max_len)
        w = tuple(rng.choice(gens) for _ in range(n))
        terms[w] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return NCPoly(terms)


def random_strict_order(rng: random.Random, gens) -> MonomialOrdering:
    ids = [g.id for g in gens]
    rng.shuffle(ids)
    return perm_ordering(ids)


def random_decomposition(rng: random.Random, omega, omega_prime) -> Decomposition:
    rows = {}
    for a in omega:
        row = {k: Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for k in omega_prime if rng.random() < 0.7}
        row = {k: v for k, v in row.items() if v}
        if not row:
            row = {rng.choice(omega_prime): Fraction(1)}
        rows[a] = row
    return Decomposition(rows)


@dataclass
class GotInstance:
    pair: OrderingPair
    decomposition: object  # Decomposition or None
    word: tuple


def random_got_instance(rng: random.Random, with_l: bool, max_omega: int = 4, max_len: int = 5) -> GotInstance:
    omega = [gen(f"x{i}") for i in range(1, rng.randint(1, max_omega) + 1)]
    w = tuple(rng.choice(omega) for _ in range(rng.randint(1, max_len)))
    if with_l:
        omega_p = [gen(f"v{i}") for i in range(1, rng.randint(1, max_omega) + 1)]
        d = random_decomposition(rng, omega, omega_p)
        pair = OrderingPair(random_strict_order(rng, omega), random_strict_order(rng, omega_p))
    else:
        d = None
        pair = OrderingPair(random_strict_order(rng, omega), random_strict_order(rng, omega))
    return GotInstance(pair, d, w)


# property bodies ------------------------------------------------------------

def p_associativity(rng, sign):
    p, q, r = (random_poly(rng) for _ in range(3))
    return mul(mul(p, q), r) == mul(p, mul(q, r))


def p_jacobi(rng, sign):
    p, q, r = (random_poly(rng) for _ in range(3))
    c = commutator
    return (c(c(p, q), r) + c(c(q, r), p) + c(c(r, p), q)).is_zero()


def p_exp_log(rng, sign):
    n = rng.randint(1, 6)
    p = random_poly(rng, LETTERS[:2], max_len=3, constant=False)
    return log_truncated(exp_truncated(p, n)) == GradedSeries.from_poly(truncate(p, n), n)


def p_grading(rng, sign):
    n = rng.randint(0, 5)
    p = random_poly(rng, LETTERS[:2], max_len=3, constant=False)
    s = log_truncated(exp_truncated(p, n))
    return all(c.is_homogeneous(d) for d, c in enumerate(exp_truncated(p, n).components)) and all(
        c.is_homogeneous(d) for d, c in enumerate(s.components)
    )


def _random_word(rng, gens, n_max=6):
    return tuple(rng.choice(gens) for _ in range(rng.randint(0, n_max)))


def p_order_idempotent(rng, sign):
    o = random_strict_order(rng, LETTERS)
    w = _random_word(rng, LETTERS)
    once = apply_monomial(o, w)
    return apply_monomial(o, once) == once and sorted(once) == sorted(w)


def p_theta_decomposition(rng, sign):
    # exhaustive over every strict order of a 3-element universe
    gens = LETTERS
    for ids in permutations([g.id for g in gens]):
        o = perm_ordering(ids)
        for a, b, g in permutations(gens, 3):
            lhs = theta(o, g, a) * theta(o, g, b)
            rhs = theta(o, g, b) * theta(o, b, a) + theta(o, g, a) * theta(o, a, b)
            if lhs != rhs:
                return False
    return True


def p_trichotomy(rng, sign):
    o = random_strict_order(rng, LETTERS)
    a, b = rng.sample(LETTERS, 2)
    return theta(o, a, b) + theta(o, b, a) == 1 and theta(o, a, a) == 0


def p_weyl_weights(rng, sign):
    n = rng.randint(1, 4)
    gens = [gen(f"w{i}") for i in range(n)]
    p = weyl_symmetrize(tuple(gens))
    return sum(c for _, c in p.items()) == 1 and len(p) == len(list(permutations(gens)))


def p_contraction_symmetry(rng, sign):
    inst = random_got_instance(rng, with_l=True)
    d = inst.decomposition
    omega = sorted(d.omega)
    return all(contraction_matrix(inst.pair, d, a, b) == contraction_matrix(inst.pair, d, b, a) for a in omega for b in omega)


def p_diagonal_vanishing(rng, sign):
    inst = random_got_instance(rng, with_l=True)
    d = inst.decomposition
    return all(
        contraction_general(inst.pair, k, k, a, b).is_zero()
        for k in d.omega_prime
        for a in d.omega
        for b in d.omega
    )


def p_leibniz(rng, sign):
    p, q, direction = (random_poly(rng) for _ in range(3))
    t = rng.choice(LETTERS)
    lhs = directional_derivative(direction, t, mul(p, q))
    rhs = mul(directional_derivative(direction, t, p), q) + mul(p, directional_derivative(direction, t, q))
    return lhs == rhs


def p_chain_rule(rng, sign):
    # F(G) with a placeholder symbol g standing for G
    g = gen("g")
    f = random_poly(rng, [g, LETTERS[2]], max_len=3)
    inner = random_poly(rng, LETTERS[:2], max_len=2)
    direction = random_poly(rng, LETTERS, max_len=2)
    t = LETTERS[0]
    lhs = directional_derivative(direction, t, substitute(f, {g: inner}))
    dg = directional_derivative(direction, t, inner)
    rhs = substitute(directional_derivative(dg, g, f), {g: inner})
    return lhs == rhs


def p_derivative_commutator(rng, sign):
    a, b = rng.choice(LETTERS), rng.choice(LETTERS)
    p = random_poly(rng)
    pb = NCPoly.word((b,))
    lhs = scalar_derivative(a, mul(pb, p)) - mul(pb, scalar_derivative(a, p))
    return lhs == (p if a == b else NCPoly.zero())


def p_got_identity(rng, sign):
    inst = random_got_instance(rng, with_l=rng.random() < 0.5)
    return got_verify(inst.pair, inst.decomposition, inst.word, sign=sign).equal


def p_push_lemma(rng, sign):
    omega = [gen(f"x{i}") for i in range(1, 5)]
    o = random_strict_order(rng, omega)
    w = tuple(rng.choice(omega) for _ in range(rng.randint(0, 4)))
    return push_lemma_check(o, rng.choice(omega), w)


def p_same_pair(rng, sign):
    omega = [gen(f"x{i}") for i in range(1, 4)]
    o = random_strict_order(rng, omega)
    w = tuple(rng.choice(omega) for _ in range(rng.randint(1, 5)))
    return primed_product_eval(OrderingPair(o, o), w, sign=sign) == NCPoly.word(apply_monomial(o, w))


def p_bch_got(rng, sign):
    return all(bch_recursion(BchConfig(n)) == product_exp_series(n) for n in range(1, 9))


def p_bch_oracles(rng, sign):
    ok = all(exp_truncated(bch_log_oracle(n).total(), n) == product_exp_series(n) for n in range(1, 7))
    return ok and all(
        bch_classical_w(BchConfig(n, "classical_w_series")) == bch_log_oracle(n) for n in range(1, 6)
    )


def p_bch_coefficients(rng, sign):
    x, y = NCPoly.word((X,)), NCPoly.word((Y,))
    z = bch_log_oracle(3)
    c = commutator
    return z[2] == c(x, y) / 2 and z[3] == c(x, c(x, y)) / 12 - c(y, c(x, y)) / 12


def p_magnus_got(rng, sign):
    return all(
        magnus_got(MagnusConfig(m, n)) == dyson_discrete(m, n) for m in range(1, 4) for n in range(1, 6)
    )


def p_magnus_third_order(rng, sign):
    r = magnus_third_order(3)
    return r["second_line"].is_zero() and r["first_line"] == dyson_discrete(3, 3)[3]


def _rep(rng, gens, d=4, eps=0.1):
    return matrep.random_representation(gens, d, seed=rng.randrange(2**31), eps=eps)


def p_homomorphism(rng, sign):
    p, q = random_poly(rng), random_poly(rng)
    r = _rep(rng, LETTERS)
    e = matrep.evaluate
    ok_mul = matrep.compare(e(mul(p, q), r), e(p, r) @ e(q, r), 1e-12).passed
    ok_add = matrep.compare(e(add(p, q), r), e(p, r) + e(q, r), 1e-12).passed
    return ok_mul and ok_add


def p_symbolic_numeric(rng, sign):
    inst = random_got_instance(rng, with_l=rng.random() < 0.5)
    rep = got_verify(inst.pair, inst.decomposition, inst.word, sign=sign)
    r = _rep(rng, rep.lhs.generators() | rep.rhs.generators(), d=rng.randint(2, 6))
    return matrep.compare(matrep.evaluate(rep.lhs, r), matrep.evaluate(rep.rhs, r), 1e-12).passed


def p_bch_scaling(rng, sign):
    n = 6
    z = bch_log_oracle(n).total()
    r = _rep(rng, [X, Y], eps=0.05)
    ratio = matrep.bch_residual(z, r, X, Y) / matrep.bch_residual(z, r.rescaled(0.025), X, Y)
    return 80 <= ratio <= 200


def p_parse_roundtrip(rng, sign):
    p = random_poly(rng, LETTERS + [gen("A", time=2)])
    return exprparse.evaluate_expr(format_poly(p)) == p


def p_parse_deterministic(rng, sign):
    src = format_poly(random_poly(rng)) + " + [X, Y*Z]"
    return exprparse.parse(src) == exprparse.parse(src)


def p_parse_error_positions(rng, sign):
    src = format_poly(random_poly(rng))
    bad = src + " " + rng.choice(["$", "* )", "+", "exp(X)", "[X Y]", "Q[X]"])
    try:
        exprparse.evaluate_expr(bad, exprparse.Environment())
    except exprparse.ParseError as exc:
        return exc.line >= 1 and exc.col >= 1
    return False


@dataclass(frozen=True)
class Property:
    module: str
    name: str
    check: Callable
    exhaustive: bool = False  # deterministic: one run covers it


PROPERTIES = [
    Property("ncalg", "associativity", p_associativity),
    Property("ncalg", "jacobi", p_jacobi),
    Property("ncalg", "exp_log_roundtrip", p_exp_log),
    Property("ncalg", "grading", p_grading),
    Property("ordering", "idempotence_multiset", p_order_idempotent),
    Property("ordering", "theta_decomposition", p_theta_decomposition, exhaustive=True),
    Property("ordering", "trichotomy", p_trichotomy),
    Property("ordering", "weyl_weights", p_weyl_weights),
    Property("gotcore", "contraction_symmetry", p_contraction_symmetry),
    Property("gotcore", "diagonal_vanishing", p_diagonal_vanishing),
    Property("gotcore", "leibniz", p_leibniz),
    Property("gotcore", "chain_rule", p_chain_rule),
    Property("gotcore", "derivative_commutator", p_derivative_commutator),
    Property("gotcore", "got_identity", p_got_identity),
    Property("gotcore", "push_lemma", p_push_lemma),
    Property("gotcore", "same_pair_degeneracy", p_same_pair),
    Property("series", "bch_got_equivalence", p_bch_got, exhaustive=True),
    Property("series", "bch_oracle_agreement", p_bch_oracles, exhaustive=True),
    Property("series", "bch_coefficients", p_bch_coefficients, exhaustive=True),
    Property("series", "magnus_got_equivalence", p_magnus_got, exhaustive=True),
    Property("series", "magnus_third_order_cancellation", p_magnus_third_order, exhaustive=True),
    Property("matrep", "homomorphism", p_homomorphism),
    Property("matrep", "symbolic_implies_numeric", p_symbolic_numeric),
    Property("matrep", "bch_truncation_scaling", p_bch_scaling),
    Property("exprparse", "roundtrip", p_parse_roundtrip),
    Property("exprparse", "determinism", p_parse_deterministic),
    Property("exprparse", "error_positions", p_parse_error_positions),
]


@dataclass
class PropertyResult:
    module: str
    name: str
    cases: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def run_suite(cases: int = 100, seed: int = 0, mutant: bool = False, only=None) -> list:
    """Run every property; each gets its own RNG seeded from (seed, name)."""
    sign = -1 if mutant else 1
    results = []
    for prop in PROPERTIES:
        if only and prop.name not in only and prop.module not in only:
            continue
        rng = random.Random(f"{seed}:{prop.module}.{prop.name}")
        n = 1 if prop.exhaustive else max(1, cases)
        failures = sum(0 if prop.check(rng, sign) else 1 for _ in range(n))
        results.append(PropertyResult(prop.module, prop.name, n, failures))
    return results


__all__ = ["PROPERTIES", "Property", "PropertyResult", "run_suite", "random_got_instance", "random_poly"]
