"""Ordering superoperators.

A monomial ordering is a rank function on generators: higher-rank factors
are placed farther left, equal ranks keep their input order.  The Weyl
symmetrizer is the one concrete weighted (non-monomial) ordering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Any, Callable, Sequence

from .ncalg import Generator, NCPoly, Word

_TRAILING_INT = re.compile(r"(\d+)$")

WEYL_MAX_LENGTH = 8


@dataclass(frozen=True)
class MonomialOrdering:
    name: str
    rank: Callable[[Generator], Any]

    def apply(self, w: Word) -> Word:
        return apply_monomial(self, w)

    def __call__(self, p: NCPoly) -> NCPoly:
        return apply_monomial_poly(self, p)


def time_label(g: Generator) -> int:
    """The time of a generator: its ``time`` field, else a trailing integer in its id."""
    if g.time is not None:
        return g.time
    m = _TRAILING_INT.search(g.id)
    if m is None:
        raise ValueError(f"time ordering needs a numeric label, got generator {g}")
    return int(m.group(1))


def time_ordering() -> MonomialOrdering:
    """n > ... > 1: later times to the left."""
    return MonomialOrdering("time", lambda g: time_label(g))


def antitime_ordering() -> MonomialOrdering:
    return MonomialOrdering("antitime", lambda g: -time_label(g))


def alpha_ordering() -> MonomialOrdering:
    """Z > ... > A: alphabetically later ids to the left."""
    return MonomialOrdering(
        "alpha", lambda g: (g.id, g.time is not None, g.time if g.time is not None else 0)
    )


def _position_rank(name: str, keys: Sequence[str]) -> MonomialOrdering:
    keys = [k.strip() for k in keys]
    if not keys or any(not k for k in keys):
        raise ValueError(f"empty key in ordering rule {name!r}")
    if len(set(keys)) != len(keys):
        raise ValueError(f"repeated key in ordering rule {name!r}")
    pos = {k: i for i, k in enumerate(keys)}

    def rank(g: Generator) -> int:
        if g.id in pos:
            return -pos[g.id]
        m = _TRAILING_INT.search(g.id)
        if m is not None and m.group(1) in pos:
            return -pos[m.group(1)]
        raise ValueError(f"generator {g} is not ranked by ordering {name!r}")

    return MonomialOrdering(name, rank)


def nxy_ordering(classes: Sequence[str] = ("X", "Y")) -> MonomialOrdering:
    """Letter-class sort: every generator of class ``classes[0]`` left of ``classes[1]``, etc."""
    return _position_rank("nxy:" + ",".join(classes), classes)


def perm_ordering(keys: Sequence[str]) -> MonomialOrdering:
    """User rank list, leftmost key = highest rank.  Keys match ids or trailing integers."""
    return _position_rank("perm:" + ",".join(keys), keys)


def parse_rule(rule: str) -> MonomialOrdering:
    """Parse ``time``, ``antitime``, ``alpha``, ``nxy:X,Y`` or ``perm:k1,k2,...``."""
    rule = rule.strip()
    if rule == "time":
        return time_ordering()
    if rule == "antitime":
        return antitime_ordering()
    if rule == "alpha":
        return alpha_ordering()
    kind, sep, rest = rule.partition(":")
    if sep and kind == "nxy":
        return nxy_ordering(rest.split(","))
    if sep and kind == "perm":
        return perm_ordering(rest.split(","))
    raise ValueError(f"unknown ordering rule {rule!r}")


def apply_monomial(o: MonomialOrdering, w: Word) -> Word:
    # sorted() is stable under reverse=True
    return tuple(sorted(w, key=o.rank, reverse=True))


def apply_monomial_poly(o: MonomialOrdering, p: NCPoly) -> NCPoly:
    return p.map_words(lambda w: apply_monomial(o, w))


def theta(o: MonomialOrdering, b: Generator, a: Generator) -> int:
    """Step function: 1 iff ``b`` strictly outranks ``a``."""
    return 1 if o.rank(b) > o.rank(a) else 0


@dataclass(frozen=True)
class WeightedOrdering:
    """Ordering given, for each length n, by weighted permutations of positions."""

    name: str
    family: Callable[[int], list]  # n -> [(Fraction weight, tuple permutation)]

    def apply(self, w: Word) -> NCPoly:
        out: dict = {}
        for weight, perm in self.family(len(w)):
            nw = tuple(w[i] for i in perm)
            out[nw] = out.get(nw, 0) + weight
        return NCPoly(out)

    def __call__(self, p: NCPoly) -> NCPoly:
        out = NCPoly.zero()
        for w, c in p.items():
            out = out + self.apply(w).scale(c)
        return out


def _weyl_family(max_length: int):
    def family(n: int) -> list:
        if n > max_length:
            raise ValueError(f"Weyl symmetrization of length {n} exceeds cap {max_length}")
        weight = Fraction(1, factorial(n))
        return [(weight, perm) for perm in permutations(range(n))]

    return family


def weyl_ordering(max_length: int = WEYL_MAX_LENGTH) -> WeightedOrdering:
    return WeightedOrdering("weyl", _weyl_family(max_length))


def weyl_symmetrize(w: Word, max_length: int = WEYL_MAX_LENGTH) -> NCPoly:
    return weyl_ordering(max_length).apply(tuple(w))
