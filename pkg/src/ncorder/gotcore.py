"""Contractions, operator directional derivatives and primed-product evaluation.

The evaluator rewrites an ``o``-ordered product as an ``o_prime``-ordered
product of primed operators.  Operators are first sorted by ``o_prime`` and
the product is then built right to left; each newly prepended factor also
contributes its contraction, spliced into every occurrence to its right.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Mapping, Optional, Sequence

from .ncalg import (
    Generator,
    NCPoly,
    Word,
    add,
    as_scalar,
    commutator,
    format_word,
    mul,
    poly_to_dict,
    strip_tags,
    substitute,
)
from .ordering import MonomialOrdering, apply_monomial, theta


@dataclass(frozen=True)
class OrderingPair:
    o: MonomialOrdering
    o_prime: MonomialOrdering


class Decomposition:
    """Linear map ``phi_alpha = sum_k L[alpha][k] * theta_k``."""

    def __init__(self, rows: Mapping[Generator, Mapping[Generator, object]], identity: bool = False):
        clean = {}
        for a, row in rows.items():
            r = {k: as_scalar(v) for k, v in row.items()}
            r = {k: v for k, v in r.items() if v}
            if not r:
                raise ValueError(f"decomposition row {a} has no nonzero entry")
            clean[a] = r
        self._rows = clean
        self.is_identity = identity or all(r == {a: 1} for a, r in clean.items())

    @classmethod
    def identity(cls, omega: Iterable[Generator]) -> "Decomposition":
        return cls({a: {a: 1} for a in omega}, identity=True)

    @property
    def omega(self) -> frozenset:
        return frozenset(self._rows)

    @property
    def omega_prime(self) -> frozenset:
        return frozenset(k for r in self._rows.values() for k in r)

    def row(self, a: Generator) -> dict:
        try:
            return dict(self._rows[a])
        except KeyError:
            raise ValueError(f"index {a} is not in the decomposition domain") from None

    def entry(self, a: Generator, k: Generator) -> Fraction:
        return self.row(a).get(k, Fraction(0))

    def expand(self, a: Generator) -> NCPoly:
        return NCPoly({(k,): c for k, c in self.row(a).items()})

    def substitute(self, p: NCPoly) -> NCPoly:
        return substitute(p, {a: self.expand(a) for a in self._rows})

    def __repr__(self) -> str:
        rows = ", ".join(
            f"{a}: {{" + ", ".join(f"{k}: {v}" for k, v in r.items()) + "}" for a, r in self._rows.items()
        )
        return f"Decomposition({rows})"


def _g(x) -> NCPoly:
    return NCPoly.word((x,))


def _check_domain(d: Optional[Decomposition], labels: Sequence[Generator], prime: bool) -> None:
    if d is None:
        return
    dom = d.omega_prime if prime else d.omega
    for x in labels:
        if x not in dom:
            side = "Omega'" if prime else "Omega"
            raise ValueError(f"index {x} is outside {side}")


def contraction_same(pair: OrderingPair, a: Generator, b: Generator, omega=None) -> NCPoly:
    """``(theta_{b |> a} - theta_{b > a}) [phi_a, phi_b]`` for a shared index set."""
    if omega is not None:
        for x in (a, b):
            if x not in omega:
                raise ValueError(f"index {x} is outside Omega")
    s = theta(pair.o_prime, b, a) - theta(pair.o, b, a)
    if not s or a == b:
        return NCPoly.zero()
    return commutator(_g(a), _g(b)).scale(s)


def contraction_general(
    pair: OrderingPair,
    k: Generator,
    l: Generator,
    a: Generator,
    b: Generator,
    d: Optional[Decomposition] = None,
) -> NCPoly:
    """``(theta_{l |> k} - theta_{b > a}) [theta_k, theta_l]``; k, l in Omega', a, b in Omega."""
    _check_domain(d, (k, l), prime=True)
    _check_domain(d, (a, b), prime=False)
    if k == l:
        return NCPoly.zero()
    s = theta(pair.o_prime, l, k) - theta(pair.o, b, a)
    if not s:
        return NCPoly.zero()
    return commutator(_g(k), _g(l)).scale(s)


def contraction_matrix(pair: OrderingPair, d: Decomposition, a: Generator, b: Generator) -> NCPoly:
    """``C_ab = sum_{k,l} L_ak L_bl c_{klab}``."""
    ra, rb = d.row(a), d.row(b)
    out = NCPoly.zero()
    for k, lak in ra.items():
        for l, lbl in rb.items():
            c = contraction_general(pair, k, l, a, b)
            if c:
                out = add(out, c.scale(lak * lbl))
    return out


def directional_derivative(direction: NCPoly, target: Generator, operand: NCPoly) -> NCPoly:
    """``(direction . d/d target) operand``: splice ``direction`` into each occurrence of ``target``."""
    out: dict = {}
    dterms = direction.terms
    for w, c in operand.terms.items():
        for i, g in enumerate(w):
            if g != target:
                continue
            head, tail = w[:i], w[i + 1:]
            for dw, dc in dterms.items():
                nw = head + dw + tail
                out[nw] = out.get(nw, 0) + c * dc
    return NCPoly({nw: c for nw, c in out.items() if c})


def scalar_derivative(target: Generator, operand: NCPoly) -> NCPoly:
    """Occurrence removal: ``d/d target`` with the identity as direction."""
    return directional_derivative(NCPoly.one(), target, operand)


# primed-product evaluation ------------------------------------------------

@dataclass
class ContractionUse:
    k: Generator
    l: Generator
    alpha: Generator
    beta: Generator
    poly: NCPoly


@dataclass
class BranchTrace:
    """One term of the L expansion: ``ks[i]`` replaces the i-th factor."""

    ks: tuple
    coeff: Fraction
    sorted_ks: tuple
    result: NCPoly
    contractions: list = field(default_factory=list)


def _occurrence_keys(o: MonomialOrdering, labels: Sequence[Generator]) -> list:
    # ties keep input order, as in the stable sort
    return [(o.rank(x), -i) for i, x in enumerate(labels)]


def _branch_keys(pair: OrderingPair, parents: Sequence[Generator], ks: Sequence[Generator]):
    okey = _occurrence_keys(pair.o, parents)
    # equal Omega' operators are interchangeable; order them as o orders their parents
    pkey = [(pair.o_prime.rank(k), okey[i]) for i, k in enumerate(ks)]
    return okey, pkey


def _evaluate_branch(
    pair: OrderingPair,
    parents: Sequence[Generator],
    ks: Sequence[Generator],
    sign: int = 1,
    trace: Optional[list] = None,
) -> NCPoly:
    n = len(ks)
    okey, pkey = _branch_keys(pair, parents, ks)
    tagged = [k._replace(tag=str(i)) for i, k in enumerate(ks)]
    occ = {t: i for i, t in enumerate(tagged)}
    order = sorted(range(n), key=lambda i: pkey[i], reverse=True)

    P = _g(tagged[order[-1]])
    for i in reversed(order[:-1]):
        left = tagged[i]
        acc = mul(_g(left), P)
        for target in P.generators():
            j = occ[target]
            if ks[j] == ks[i]:
                continue
            s = (1 if pkey[j] > pkey[i] else 0) - (1 if okey[j] > okey[i] else 0)
            if not s:
                continue
            c = commutator(_g(left), _g(target)).scale(s * sign)
            dP = directional_derivative(c, target, P)
            if dP:
                acc = add(acc, dP)
                if trace is not None:
                    trace.append(ContractionUse(ks[i], ks[j], parents[i], parents[j], strip_tags(c)))
        P = acc
    return strip_tags(P)


def primed_product_eval(pair: OrderingPair, w: Word, *, sign: int = 1) -> NCPoly:
    """``O'[prod phi']`` for a shared index set (identity decomposition).

    ``sign=-1`` negates every contraction; it exists only to check that the
    verification machinery detects a wrong contraction.
    """
    w = tuple(w)
    if not w:
        return NCPoly.one()
    return _evaluate_branch(pair, w, w, sign=sign)


def primed_product_eval_general(
    pair: OrderingPair,
    d: Decomposition,
    w: Word,
    *,
    sign: int = 1,
    traces: Optional[list] = None,
) -> NCPoly:
    """``O'[prod phi']`` with each ``phi`` expanded over Omega'.

    Every theta occurrence remembers the factor it came from; the contraction
    applied between two occurrences uses their parents' ``o`` ranks.
    """
    w = tuple(w)
    if not w:
        return NCPoly.one()
    rows = [list(d.row(a).items()) for a in w]
    total = NCPoly.zero()
    for choice in cartesian(*rows):
        ks = tuple(k for k, _ in choice)
        coeff = Fraction(1)
        for _, c in choice:
            coeff *= c
        used = [] if traces is not None else None
        r = _evaluate_branch(pair, w, ks, sign=sign, trace=used)
        total = add(total, r.scale(coeff))
        if traces is not None:
            _, pkey = _branch_keys(pair, w, ks)
            order = sorted(range(len(ks)), key=lambda i: pkey[i], reverse=True)
            traces.append(BranchTrace(ks, coeff, tuple(ks[i] for i in order), r, used))
    return total


# verification -------------------------------------------------------------

@dataclass
class VerificationReport:
    word: tuple
    orderings: tuple
    lhs: NCPoly
    rhs: NCPoly
    equal: bool
    contractions: list  # [(alpha, beta, NCPoly)]
    branches: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "word": [str(g) for g in self.word],
            "orderings": {"o": self.orderings[0], "o_prime": self.orderings[1]},
            "lhs": poly_to_dict(self.lhs),
            "rhs": poly_to_dict(self.rhs),
            "equal": self.equal,
            "contractions": [
                {"alpha": str(a), "beta": str(b), "poly": poly_to_dict(p)} for a, b, p in self.contractions
            ],
        }


def ordered_lhs(pair: OrderingPair, d: Optional[Decomposition], w: Word) -> NCPoly:
    ordered = NCPoly.word(apply_monomial(pair.o, tuple(w)))
    if d is None or d.is_identity:
        return ordered
    return d.substitute(ordered)


def _labels(w: Word) -> list:
    return sorted(set(w), key=Generator.sort_key)


def got_verify(
    pair: OrderingPair,
    d: Optional[Decomposition],
    w: Word,
    *,
    sign: int = 1,
    with_traces: bool = False,
) -> VerificationReport:
    """Check ``O[w] == O'[w with primed factors]`` exactly."""
    w = tuple(w)
    lhs = ordered_lhs(pair, d, w)
    labels = _labels(w)
    traces: Optional[list] = [] if with_traces else None
    if d is None or d.is_identity:
        rhs = primed_product_eval(pair, w, sign=sign)
        table = [
            (a, b, contraction_same(pair, a, b))
            for i, a in enumerate(labels)
            for b in labels[i + 1:]
        ]
    else:
        rhs = primed_product_eval_general(pair, d, w, sign=sign, traces=traces)
        table = [
            (a, b, contraction_matrix(pair, d, a, b))
            for i, a in enumerate(labels)
            for b in labels[i:]
        ]
    return VerificationReport(
        word=w,
        orderings=(pair.o.name, pair.o_prime.name),
        lhs=lhs,
        rhs=rhs,
        equal=lhs == rhs,
        contractions=table,
        branches=traces or [],
    )


def push_lemma_check(o: MonomialOrdering, a: Generator, w: Word) -> bool:
    """``phi_a O[w] == O[phi_a w] + sum_b theta_{b > a} ([phi_a, phi_b] . d_b) O[w]``."""
    w = tuple(w)
    ow = NCPoly.word(apply_monomial(o, w))
    lhs = mul(_g(a), ow)
    rhs = NCPoly.word(apply_monomial(o, (a,) + w))
    for b in set(w):
        if b != a and theta(o, b, a):
            rhs = add(rhs, directional_derivative(commutator(_g(a), _g(b)), b, ow))
    return lhs == rhs


def describe_word(w: Word) -> str:
    return format_word(tuple(w))
