"""BCH and Magnus expansions, in closed recursive form and from independent oracles.

Time is discrete: generator ``A@s`` is the piecewise-constant value on step s,
and the step function between two steps is ``u > s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .gotcore import directional_derivative
from .ncalg import (
    GradedSeries,
    Generator,
    NCPoly,
    ad_power,
    add,
    commutator,
    exp_truncated,
    gen,
    log_truncated,
    mul,
    series_product,
    truncate,
)

BCH_DEGREE_CAP = 8
MAGNUS_DEGREE_CAP = 5
MAGNUS_STEP_CAP = 3

BCH_METHODS = ("got_recursion", "log_oracle", "classical_w_series")
MAGNUS_METHODS = ("got_form", "log_oracle")

X = gen("X")
Y = gen("Y")


def _sym(g: Generator) -> NCPoly:
    return NCPoly.word((g,))


def magnus_generator(s: int, name: str = "A") -> Generator:
    return gen(name, time=s)


@dataclass(frozen=True)
class BchConfig:
    max_degree: int
    method: str = "got_recursion"
    cap: int = BCH_DEGREE_CAP

    def __post_init__(self):
        if self.method not in BCH_METHODS:
            raise ValueError(f"unknown BCH method {self.method!r}")
        if not 1 <= self.max_degree <= self.cap:
            raise ValueError(f"BCH degree {self.max_degree} outside 1..{self.cap}")


@dataclass(frozen=True)
class MagnusConfig:
    steps: int
    max_degree: int
    method: str = "got_form"
    degree_cap: int = MAGNUS_DEGREE_CAP
    step_cap: int = MAGNUS_STEP_CAP

    def __post_init__(self):
        if self.method not in MAGNUS_METHODS:
            raise ValueError(f"unknown Magnus method {self.method!r}")
        if not 1 <= self.steps <= self.step_cap:
            raise ValueError(f"Magnus steps {self.steps} outside 1..{self.step_cap}")
        if not 1 <= self.max_degree <= self.degree_cap:
            raise ValueError(f"Magnus degree {self.max_degree} outside 1..{self.degree_cap}")


# Bernoulli numbers --------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli_table(n: int) -> tuple:
    """B_0..B_n with B_1 = -1/2, from sum_{j<=m} C(m+1, j) B_j = 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(comb(m + 1, j) * b[j] for j in range(m)) / (m + 1))
    return tuple(b)


def bernoulli(n: int) -> Fraction:
    return bernoulli_table(n)[n]


# BCH ----------------------------------------------------------------------

def _grade(components) -> GradedSeries:
    return GradedSeries(components)


def bch_recursion(cfg: BchConfig) -> GradedSeries:
    """Components z_0..z_N of e^X e^Y from z_n = (X + Y + [X,Y].d_X) z_{n-1} / n."""
    xy = commutator(_sym(X), _sym(Y))
    step = _sym(X) + _sym(Y)
    z = [NCPoly.one()]
    for n in range(1, cfg.max_degree + 1):
        prev = z[-1]
        nxt = mul(step, prev) + directional_derivative(xy, X, prev)
        z.append(nxt / n)
    return _grade(z)


def product_exp_series(n: int, cap: int = BCH_DEGREE_CAP) -> GradedSeries:
    """Truncation of e^X e^Y: degree d is sum_{k+l=d} X^k Y^l / (k! l!)."""
    if not 0 <= n <= cap:
        raise ValueError(f"degree {n} outside 0..{cap}")
    comps = []
    for d in range(n + 1):
        terms = {(X,) * k + (Y,) * (d - k): Fraction(1, factorial(k) * factorial(d - k)) for k in range(d + 1)}
        comps.append(NCPoly(terms))
    return _grade(comps)


def bch_log_oracle(n: int, cap: int = BCH_DEGREE_CAP) -> GradedSeries:
    """The BCH exponent Z up to degree n, as log(e^X e^Y)."""
    return log_truncated(product_exp_series(n, cap))


def classical_w(n: int) -> NCPoly:
    """W(X, Y) = sum_k B_k / k! ad_Y^k X, truncated to degree n."""
    out = NCPoly.zero()
    x, y = _sym(X), _sym(Y)
    for k in range(n):
        out = out + ad_power(y, x, k).scale(bernoulli(k) / factorial(k))
    return truncate(out, n)


def bch_classical_w(cfg: BchConfig) -> GradedSeries:
    """Z = sum_k (W . d_Y)^k Y / k!, everything truncated at the configured degree."""
    n = cfg.max_degree
    w = classical_w(n)
    term = _sym(Y)
    z = term
    for k in range(1, n + 1):
        term = truncate(directional_derivative(w, Y, term), n)
        if not term:
            break
        z = z + term / factorial(k)
    return GradedSeries.from_poly(z, n)


def bch(cfg: BchConfig) -> GradedSeries:
    """Dispatch on ``cfg.method``.  got_recursion returns exp components, the others Z."""
    if cfg.method == "got_recursion":
        return bch_recursion(cfg)
    if cfg.method == "log_oracle":
        return bch_log_oracle(cfg.max_degree, cfg.cap)
    return bch_classical_w(cfg)


# Magnus -------------------------------------------------------------------

def dyson_discrete(m: int, n: int, cap: int = MAGNUS_DEGREE_CAP) -> GradedSeries:
    """Truncated e^{A_m} ... e^{A_1}, later steps to the left."""
    if m < 1:
        raise ValueError("need at least one time step")
    if not 0 <= n <= cap:
        raise ValueError(f"degree {n} outside 0..{cap}")
    out = exp_truncated(_sym(magnus_generator(m)), n)
    for s in range(m - 1, 0, -1):
        out = series_product(out, exp_truncated(_sym(magnus_generator(s)), n))
    return out


def magnus_got(cfg: MagnusConfig) -> GradedSeries:
    """Components of the time-ordered exponential from z_n = E z_{n-1} / n with
    E = sum_s A_s + sum_{u>s} [A_u, A_s] . d_{A_u}."""
    a = [magnus_generator(s) for s in range(1, cfg.steps + 1)]
    first = NCPoly.zero()
    for g in a:
        first = first + _sym(g)
    pairs = [
        (a[u], commutator(_sym(a[u]), _sym(a[s])))
        for s in range(cfg.steps)
        for u in range(s + 1, cfg.steps)
    ]
    z = [NCPoly.one()]
    for n in range(1, cfg.max_degree + 1):
        prev = z[-1]
        nxt = mul(first, prev)
        for target, direction in pairs:
            nxt = add(nxt, directional_derivative(direction, target, prev))
        z.append(nxt / n)
    return _grade(z)


def magnus_log_oracle(m: int, n: int, cap: int = MAGNUS_DEGREE_CAP) -> GradedSeries:
    """The Magnus exponent V up to degree n, as log of the Dyson product."""
    return log_truncated(dyson_discrete(m, n, cap))


def magnus(cfg: MagnusConfig) -> GradedSeries:
    if cfg.method == "got_form":
        return magnus_got(cfg)
    return magnus_log_oracle(cfg.steps, cfg.max_degree, cfg.degree_cap)


# third order on a grid ----------------------------------------------------

def cell_theta(u: int, s: int) -> Fraction:
    """Step function integrated over unit cells: 1 if u > s, 1/2 on the same cell."""
    if u > s:
        return Fraction(1)
    if u == s:
        return Fraction(1, 2)
    return Fraction(0)


def strict_theta(u: int, s: int) -> Fraction:
    return Fraction(1 if u > s else 0)


def magnus_third_order(m: int, step=cell_theta) -> dict:
    """Grid sums of the third-order Magnus bookkeeping.

    Returns a dict of degree-3 (and lower) polynomials:

    ``got``          expansion of the closed form, before rearrangement
    ``first_line``   the rearranged terms that survive
    ``second_line``  the rearranged terms that must cancel
    ``v1, v2, v3``   the classical Magnus terms
    """
    A = {s: _sym(magnus_generator(s)) for s in range(1, m + 1)}
    grid = range(1, m + 1)
    c = commutator
    got = NCPoly.zero()
    first = NCPoly.zero()
    second = NCPoly.zero()
    v3 = NCPoly.zero()
    for l in grid:
        for u in grid:
            for s in grid:
                t_su, t_sl, t_ul, t_lu = step(s, u), step(s, l), step(u, l), step(l, u)
                lus = mul(mul(A[l], A[u]), A[s])
                got += (
                    lus / 6
                    + mul(A[l], c(A[s], A[u])).scale(t_su / 3)
                    + mul(c(A[s], A[u]), A[l]).scale(t_su / 6)
                    + c(c(A[s], A[l]), A[u]).scale(t_su * t_sl / 6)
                    + c(A[s], c(A[u], A[l])).scale(t_su * t_ul / 6)
                )
                first += (
                    lus / 6
                    + mul(A[l], c(A[s], A[u])).scale(t_su / 4)
                    + mul(c(A[s], A[u]), A[l]).scale(t_su / 4)
                    + c(c(A[s], A[l]), A[u]).scale(t_sl * t_lu / 6)
                    + c(A[s], c(A[u], A[l])).scale(t_su * t_ul / 6)
                )
                second += (
                    c(c(A[s], A[l]), A[u]).scale(t_su * t_ul / 6)
                    + c(A[l], c(A[s], A[u])).scale(t_su / 12)
                )
                v3 += (
                    c(c(A[s], A[l]), A[u]).scale(t_sl * t_lu)
                    + c(A[s], c(A[u], A[l])).scale(t_su * t_ul)
                ) / 6
    v1 = NCPoly.zero()
    v2 = NCPoly.zero()
    for s in grid:
        v1 += A[s]
        for u in grid:
            v2 += c(A[s], A[u]).scale(step(s, u) / 2)
    return {"got": got, "first_line": first, "second_line": second, "v1": v1, "v2": v2, "v3": v3}
