from fractions import Fraction

import pytest
from hypothesis import strategies as st

from ncorder.ncalg import NCPoly, gen

LETTERS = [gen(c) for c in "ABC"]


@st.composite
def polys(draw, gens=LETTERS, max_len=3, max_terms=4):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        w = tuple(draw(st.lists(st.sampled_from(gens), max_size=max_len)))
        c = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
        terms[w] = terms.get(w, 0) + c
    return NCPoly(terms)


@pytest.fixture
def xy():
    return NCPoly.symbol("X"), NCPoly.symbol("Y")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for r in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(r.line())
