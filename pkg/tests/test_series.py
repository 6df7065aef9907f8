from fractions import Fraction

import pytest

from ncorder.ncalg import NCPoly, commutator, truncate
from ncorder.series import (
    X,
    Y,
    BchConfig,
    MagnusConfig,
    bch,
    bch_classical_w,
    bch_log_oracle,
    bch_recursion,
    bernoulli,
    classical_w,
    dyson_discrete,
    magnus,
    magnus_generator,
    magnus_got,
    magnus_log_oracle,
    magnus_third_order,
    product_exp_series,
    strict_theta,
)

x, y = NCPoly.word((X,)), NCPoly.word((Y,))


def test_bernoulli_numbers():
    assert [bernoulli(n) for n in range(7)] == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30), 0, Fraction(1, 42)]


def test_recursion_low_orders():
    z = bch_recursion(BchConfig(3))
    s = x + y
    xy = commutator(x, y)
    assert z[1] == s
    assert z[2] * 2 == s * s + xy
    assert z[3] * 6 == s * s * s + xy * s + 2 * s * xy + commutator(xy, y)


@pytest.mark.parametrize("n", range(1, 9))
def test_recursion_matches_product_of_exponentials(n):
    assert bch_recursion(BchConfig(n)) == product_exp_series(n)


def test_top_degree_word_count():
    assert len(product_exp_series(8)[8]) == 9
    assert len(bch_recursion(BchConfig(8))[8]) == len(product_exp_series(8)[8])


def test_log_oracle_known_coefficients():
    z = bch_log_oracle(3)
    xy = commutator(x, y)
    assert z[1] == x + y
    assert z[2] == xy / 2
    assert z[3] == (commutator(x, xy) - commutator(y, xy)) / 12


@pytest.mark.parametrize("n", range(1, 6))
def test_classical_w_series_matches_log(n):
    assert bch_classical_w(BchConfig(n, "classical_w_series")) == bch_log_oracle(n)


def test_classical_w_leading_terms():
    w = classical_w(3)
    assert w == x - commutator(y, x) / 2 + commutator(y, commutator(y, x)) / 12


def test_bch_dispatch_and_caps():
    assert bch(BchConfig(2, "log_oracle")) == bch_log_oracle(2)
    with pytest.raises(ValueError):
        BchConfig(9)
    with pytest.raises(ValueError):
        BchConfig(0)
    with pytest.raises(ValueError):
        BchConfig(2, "magic")
    assert bch(BchConfig(10, cap=10))[10]


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("n", range(1, 6))
def test_magnus_closed_form_matches_dyson(m, n):
    assert magnus_got(MagnusConfig(m, n)) == dyson_discrete(m, n)


def test_dyson_order():
    a1, a2 = NCPoly.word((magnus_generator(1),)), NCPoly.word((magnus_generator(2),))
    assert dyson_discrete(2, 2)[2] == (a1 * a1 + a2 * a2) / 2 + a2 * a1


def test_magnus_second_order_term():
    a1, a2 = NCPoly.word((magnus_generator(1),)), NCPoly.word((magnus_generator(2),))
    assert magnus_log_oracle(2, 2)[2] == commutator(a2, a1) / 2


def test_magnus_config_limits():
    with pytest.raises(ValueError):
        MagnusConfig(4, 2)
    with pytest.raises(ValueError):
        MagnusConfig(2, 6)
    assert magnus(MagnusConfig(2, 3, "log_oracle")) == magnus_log_oracle(2, 3)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_third_order_grid_sums(m):
    t = magnus_third_order(m)
    v = magnus_log_oracle(m, 3)
    dyson3 = dyson_discrete(m, 3)[3]
    assert not t["second_line"]
    assert t["first_line"] == dyson3
    assert t["got"] == dyson3
    assert t["v1"] == v[1]
    assert t["v2"] == v[2]
    assert t["v3"] == v[3]


def test_third_order_strict_step_still_expands_dyson():
    t = magnus_third_order(3, step=strict_theta)
    assert t["got"] == dyson_discrete(3, 3)[3]


def test_exp_of_bch_reproduces_product():
    from ncorder.ncalg import exp_truncated

    z = bch_log_oracle(5).total()
    assert exp_truncated(z, 5) == product_exp_series(5)
