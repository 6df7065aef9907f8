import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LETTERS, polys
from ncorder.gotcore import (
    Decomposition,
    OrderingPair,
    contraction_general,
    contraction_matrix,
    contraction_same,
    directional_derivative,
    got_verify,
    primed_product_eval,
    push_lemma_check,
    scalar_derivative,
)
from ncorder.ncalg import NCPoly, commutator, gen, strip_tags, substitute
from ncorder.ordering import parse_rule
from ncorder.properties import random_got_instance

A, B, C = LETTERS
x1, x2, x3 = (gen(f"x{i}") for i in (1, 2, 3))
v1, v2 = gen("v1"), gen("v2")
TIME, ANTI, ALPHA = parse_rule("time"), parse_rule("antitime"), parse_rule("alpha")


def sym(g):
    return NCPoly.word((g,))


def test_time_vs_antitime_three_factors():
    r = got_verify(OrderingPair(TIME, ANTI), None, (x1, x2, x3))
    expected = NCPoly.word((x3, x2, x1))
    assert r.equal
    assert r.lhs == r.rhs == expected
    table = {(a, b): p for a, b, p in r.contractions}
    for a, b in [(x1, x2), (x1, x3), (x2, x3)]:
        assert table[a, b] == -commutator(sym(a), sym(b))


def test_same_ordering_needs_no_contractions():
    pair = OrderingPair(TIME, TIME)
    assert not contraction_same(pair, x1, x2)
    assert primed_product_eval(pair, (x2, x1, x3)) == NCPoly.word((x3, x2, x1))


def test_contraction_same_diagonal_and_domain():
    pair = OrderingPair(TIME, ANTI)
    assert not contraction_same(pair, x1, x1)
    with pytest.raises(ValueError):
        contraction_same(pair, x1, gen("x9"), omega={x1, x2})


def _alpha_time(la1, la2, lb1, lb2):
    d = Decomposition({A: {v1: la1, v2: la2}, B: {v1: lb1, v2: lb2}})
    return OrderingPair(ALPHA, TIME), d


def test_alpha_vs_time_hat_contractions():
    pair, d = _alpha_time(1, 1, 1, 1)
    # k=2, l=1, a=B, b=A: both steps vanish
    assert not contraction_general(pair, v2, v1, B, A, d)
    # k=2, l=1, a=A, b=B: theta_{B>A} = 1 survives
    assert contraction_general(pair, v2, v1, A, B, d) == commutator(sym(v1), sym(v2))
    assert not contraction_general(pair, v1, v1, A, B, d)


def test_contraction_general_domain_checks():
    pair, d = _alpha_time(1, 0, 0, 1)
    with pytest.raises(ValueError):
        contraction_general(pair, A, v1, A, B, d)
    with pytest.raises(ValueError):
        contraction_general(pair, v1, v2, v1, B, d)


def test_alpha_vs_time_branches():
    pair, d = _alpha_time(2, 3, 5, 7)
    r = got_verify(pair, d, (A, B), with_traces=True)
    assert r.equal
    assert r.lhs == d.substitute(NCPoly.word((B, A)))
    by_ks = {b.ks: b for b in r.branches}
    assert by_ks[(v1, v2)].contractions == []
    used = by_ks[(v2, v1)].contractions
    assert len(used) == 1
    assert (used[0].alpha, used[0].beta) == (A, B)
    assert used[0].poly == commutator(sym(v1), sym(v2))


def test_decomposition_validation():
    with pytest.raises(ValueError):
        Decomposition({A: {v1: 0}})
    d = Decomposition({A: {v1: "1/2"}})
    assert d.entry(A, v1) == Fraction(1, 2)
    assert d.entry(A, v2) == 0
    with pytest.raises(ValueError):
        d.row(B)
    assert Decomposition({A: {A: 1}}).is_identity


def test_contraction_matrix_symmetry():
    rng = random.Random(3)
    for _ in range(30):
        inst = random_got_instance(rng, with_l=True)
        labels = sorted(inst.decomposition.omega)
        for a in labels:
            for b in labels:
                cab = contraction_matrix(inst.pair, inst.decomposition, a, b)
                cba = contraction_matrix(inst.pair, inst.decomposition, b, a)
                assert cab == cba


@pytest.mark.parametrize("with_l", [False, True])
def test_random_instances(with_l):
    rng = random.Random(f"gotcore-{with_l}")
    for _ in range(150):
        inst = random_got_instance(rng, with_l=with_l)
        assert got_verify(inst.pair, inst.decomposition, inst.word).equal


def test_repeated_indices():
    for w in [(x1, x1, x2), (x2, x1, x2, x1), (x3, x3, x3)]:
        assert got_verify(OrderingPair(TIME, ANTI), None, w).equal
    pair, d = _alpha_time(1, -2, Fraction(1, 3), 4)
    assert got_verify(pair, d, (B, A, B, A, A)).equal


def test_wrong_sign_is_caught():
    r = got_verify(OrderingPair(TIME, ANTI), None, (x1, x2), sign=-1)
    assert not r.equal


def test_empty_word():
    r = got_verify(OrderingPair(TIME, ANTI), None, ())
    assert r.lhs == r.rhs == NCPoly.one()


# derivative calculus

@settings(max_examples=50, deadline=None)
@given(polys(), polys(), polys())
def test_directional_derivative_is_a_derivation(d, p, q):
    lhs = directional_derivative(d, A, p * q)
    rhs = directional_derivative(d, A, p) * q + p * directional_derivative(d, A, q)
    assert lhs == rhs


@settings(max_examples=50, deadline=None)
@given(polys(), polys(), polys(), st.integers(-3, 3))
def test_directional_derivative_is_linear(d, p, q, c):
    assert directional_derivative(d, A, p + q.scale(c)) == (
        directional_derivative(d, A, p) + directional_derivative(d, A, q).scale(c)
    )


@settings(max_examples=50, deadline=None)
@given(polys(gens=[A, B], max_len=3), polys(gens=[C], max_len=2))
def test_chain_rule(p, g):
    # d/dt p(A + t g) at t = 0, through the placeholder substitution A -> A + g*T
    T = gen("T")
    shifted = substitute(p, {A: sym(A) + g * sym(T)})
    first = NCPoly({w: c for w, c in shifted.items() if sum(1 for x in w if x == T) == 1})
    assert substitute(first, {T: NCPoly.one()}) == directional_derivative(g, A, p)


@settings(max_examples=50, deadline=None)
@given(polys())
def test_derivative_commutator(p):
    # [d_A, phi_B] = delta_AB
    for b in LETTERS:
        lhs = scalar_derivative(A, sym(b) * p) - sym(b) * scalar_derivative(A, p)
        assert lhs == (p if b == A else NCPoly.zero())


def test_derivative_counts_occurrences():
    p = NCPoly.word((A, B, A))
    assert scalar_derivative(A, p) == NCPoly.word((B, A)) + NCPoly.word((A, B))
    assert directional_derivative(sym(C), A, p) == NCPoly.word((C, B, A)) + NCPoly.word((A, B, C))


def test_push_lemma():
    rng = random.Random(11)
    gens = [x1, x2, x3]
    for _ in range(100):
        w = tuple(rng.choice(gens) for _ in range(rng.randint(0, 5)))
        for o in (TIME, ANTI):
            assert push_lemma_check(o, rng.choice(gens), w)


def test_tie_break_among_equal_symbols_is_immaterial():
    # identity case: equal symbols commute with themselves, any tie order gives the same word
    o = parse_rule("perm:2,1,3")
    w = (x1, x2, x1, x3, x2)
    tagged = tuple(g._replace(tag=str(i)) for i, g in enumerate(w))
    assert strip_tags(NCPoly.word(o.apply(tagged))) == NCPoly.word(o.apply(w))
    assert got_verify(OrderingPair(o, ANTI), None, w).equal


def test_equal_primed_operators_follow_parent_order(monkeypatch):
    # ordering equal theta_k copies by input position instead of by their parents breaks the identity
    import ncorder.gotcore as gc

    rng = random.Random("tie-break")
    cases = [random_got_instance(rng, with_l=True) for _ in range(300)]
    assert all(got_verify(c.pair, c.decomposition, c.word).equal for c in cases)

    def by_position(pair, parents, ks):
        okey = gc._occurrence_keys(pair.o, parents)
        return okey, [(pair.o_prime.rank(k), -i) for i, k in enumerate(ks)]

    monkeypatch.setattr(gc, "_branch_keys", by_position)
    assert not all(got_verify(c.pair, c.decomposition, c.word).equal for c in cases)
