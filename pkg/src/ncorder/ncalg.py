"""Free noncommutative algebra with exact rational coefficients.

Polynomials are immutable maps from words (tuples of :class:`Generator`)
to :class:`fractions.Fraction`.  The empty word is the identity operator.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Union


class Generator(NamedTuple):
    """A free generator.  ``tag`` and ``time`` are optional annotations."""

    id: str
    tag: Optional[str] = None
    time: Optional[int] = None

    def sort_key(self):
        return (
            self.id,
            self.tag is not None,
            self.tag or "",
            self.time is not None,
            self.time if self.time is not None else 0,
        )

    def untagged(self) -> "Generator":
        return self._replace(tag=None) if self.tag is not None else self

    def __str__(self) -> str:
        s = self.id
        if self.tag is not None:
            s += "#" + self.tag
        if self.time is not None:
            s += "@" + str(self.time)
        return s


def gen(id: str, tag: Optional[str] = None, time: Optional[int] = None) -> Generator:
    if not id:
        raise ValueError("generator id must be nonempty")
    return Generator(id, tag, time)


Word = tuple  # tuple[Generator, ...]
Scalar = Fraction
Coefficient = Union[int, Fraction, str]


def as_scalar(c: Coefficient) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)) and not isinstance(c, bool):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


def word_key(w: Word):
    """Canonical term order: length, then generator keys left to right."""
    return (len(w), tuple(g.sort_key() for g in w))


class NCPoly:
    """Canonical linear combination of words.  Zero coefficients are never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Word, Coefficient]] = None):
        clean = {}
        if terms:
            for w, c in terms.items():
                c = as_scalar(c)
                if c:
                    w = tuple(w)
                    for g in w:
                        if not isinstance(g, Generator):
                            raise TypeError(f"word factor is not a Generator: {g!r}")
                    clean[w] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "NCPoly":
        # terms already canonical (no zeros, tuple keys)
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # constructors
    @classmethod
    def zero(cls) -> "NCPoly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "NCPoly":
        return cls._raw({(): Fraction(1)})

    @classmethod
    def const(cls, c: Coefficient) -> "NCPoly":
        return cls({(): c})

    @classmethod
    def word(cls, w: Iterable[Generator], coeff: Coefficient = 1) -> "NCPoly":
        return cls({tuple(w): coeff})

    @classmethod
    def symbol(cls, id: str, tag: Optional[str] = None, time: Optional[int] = None) -> "NCPoly":
        return cls._raw({(gen(id, tag, time),): Fraction(1)})

    # access
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> list:
        """Terms in canonical order."""
        return sorted(self._terms.items(), key=lambda kv: word_key(kv[0]))

    def coeff(self, w: Iterable[Generator]) -> Fraction:
        return self._terms.get(tuple(w), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Word]:
        return iter(w for w, _ in self.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Maximum word length; -1 for the zero polynomial."""
        return max((len(w) for w in self._terms), default=-1)

    def min_degree(self) -> int:
        return min((len(w) for w in self._terms), default=-1)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def homogeneous(self, d: int) -> "NCPoly":
        return NCPoly._raw({w: c for w, c in self._terms.items() if len(w) == d})

    def is_homogeneous(self, d: int) -> bool:
        return all(len(w) == d for w in self._terms)

    def generators(self) -> set:
        return {g for w in self._terms for g in w}

    # arithmetic
    def __eq__(self, other) -> bool:
        if isinstance(other, NCPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == NCPoly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "NCPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly._raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other) -> "NCPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other) -> "NCPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(other, -self)

    def __mul__(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            return mul(self, other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other) -> "NCPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other) -> "NCPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int) -> "NCPoly":
        if n < 0:
            raise ValueError("negative power")
        out = NCPoly.one()
        for _ in range(n):
            out = mul(out, self)
        return out

    def scale(self, c: Coefficient) -> "NCPoly":
        c = as_scalar(c)
        if not c:
            return NCPoly.zero()
        return NCPoly._raw({w: c * v for w, v in self._terms.items()})

    def map_words(self, fn) -> "NCPoly":
        """Apply ``fn`` to every word and re-canonicalize (merging collisions)."""
        out: dict = {}
        for w, c in self._terms.items():
            nw = tuple(fn(w))
            out[nw] = out.get(nw, 0) + c
        return NCPoly._raw({w: c for w, c in out.items() if c})

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"NCPoly({format_poly(self)!r})"


def _coerce(x) -> Optional[NCPoly]:
    if isinstance(x, NCPoly):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return NCPoly.const(x)
    return None


def add(p: NCPoly, q: NCPoly) -> NCPoly:
    out = dict(p._terms)
    for w, c in q._terms.items():
        v = out.get(w, 0) + c
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    return NCPoly._raw(out)


def mul(p: NCPoly, q: NCPoly, max_degree: Optional[int] = None) -> NCPoly:
    """Concatenation product; words longer than ``max_degree`` are dropped."""
    out: dict = {}
    for w1, c1 in p._terms.items():
        for w2, c2 in q._terms.items():
            if max_degree is not None and len(w1) + len(w2) > max_degree:
                continue
            w = w1 + w2
            out[w] = out.get(w, 0) + c1 * c2
    return NCPoly._raw({w: c for w, c in out.items() if c})


def commutator(p: NCPoly, q: NCPoly) -> NCPoly:
    return mul(p, q) - mul(q, p)


def ad_power(y: NCPoly, x: NCPoly, n: int) -> NCPoly:
    """``ad_y^n x``: n-fold nested commutator ``[y, [y, ... [y, x]]]``."""
    if n < 0:
        raise ValueError(f"ad_power needs n >= 0, got {n}")
    for _ in range(n):
        x = commutator(y, x)
    return x


def truncate(p: NCPoly, n: int) -> NCPoly:
    if n < 0:
        raise ValueError(f"truncation degree must be >= 0, got {n}")
    return NCPoly._raw({w: c for w, c in p._terms.items() if len(w) <= n})


def substitute(p: NCPoly, mapping: Mapping[Generator, NCPoly]) -> NCPoly:
    """Replace every occurrence of each mapped generator by its polynomial."""
    out = NCPoly.zero()
    for w, c in p._terms.items():
        term = NCPoly.const(c)
        for g in w:
            term = mul(term, mapping[g] if g in mapping else NCPoly.word((g,)))
        out = add(out, term)
    return out


def strip_tags(p: NCPoly) -> NCPoly:
    return p.map_words(lambda w: (g.untagged() for g in w))


class GradedSeries:
    """Truncated formal series: ``components[d]`` is homogeneous of degree d."""

    __slots__ = ("max_degree", "components")

    def __init__(self, components: Iterable[NCPoly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a graded series needs at least the degree-0 component")
        for d, c in enumerate(comps):
            if not c.is_homogeneous(d):
                raise ValueError(f"component {d} is not homogeneous of degree {d}")
        self.components = comps
        self.max_degree = len(comps) - 1

    @classmethod
    def from_poly(cls, p: NCPoly, max_degree: int) -> "GradedSeries":
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        return cls(p.homogeneous(d) for d in range(max_degree + 1))

    def __getitem__(self, d: int) -> NCPoly:
        return self.components[d]

    def __len__(self) -> int:
        return len(self.components)

    def total(self) -> NCPoly:
        out = NCPoly.zero()
        for c in self.components:
            out = add(out, c)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return f"GradedSeries(max_degree={self.max_degree}, {self.total()})"


def exp_truncated(p: NCPoly, n: int) -> GradedSeries:
    """``sum_{k<=n} p^k / k!`` truncated to degree n."""
    if n < 0:
        raise ValueError(f"truncation degree must be >= 0, got {n}")
    if p.constant_term():
        raise ValueError("exp_truncated needs a polynomial with zero constant term")
    p = truncate(p, n)
    total = NCPoly.one()
    power = NCPoly.one()
    for k in range(1, n + 1):
        power = mul(power, p, max_degree=n)
        if not power:
            break
        total = add(total, power.scale(Fraction(1, factorial(k))))
    return GradedSeries.from_poly(total, n)


def log_truncated(s: GradedSeries) -> GradedSeries:
    """``sum_{k=1}^{N} (-1)^{k+1} (s-1)^k / k``, N = ``s.max_degree``."""
    if s[0] != NCPoly.one():
        raise ValueError("log_truncated needs a series with degree-0 component 1")
    n = s.max_degree
    x = s.total() - NCPoly.one()
    total = NCPoly.zero()
    power = NCPoly.one()
    for k in range(1, n + 1):
        power = mul(power, x, max_degree=n)
        if not power:
            break
        total = add(total, power.scale(Fraction((-1) ** (k + 1), k)))
    return GradedSeries.from_poly(total, n)


def series_product(a: GradedSeries, b: GradedSeries) -> GradedSeries:
    n = min(a.max_degree, b.max_degree)
    return GradedSeries.from_poly(mul(a.total(), b.total(), max_degree=n), n)


# text rendering -----------------------------------------------------------

def format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_word(w: Word) -> str:
    return "*".join(str(g) for g in w)


def format_poly(p: NCPoly) -> str:
    """Canonical text form, re-parseable by :mod:`ncorder.exprparse` (untagged)."""
    if not p:
        return "0"
    parts = []
    for i, (w, c) in enumerate(p.items()):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not w:
            body = format_coeff(a)
        elif a == 1:
            body = format_word(w)
        else:
            body = format_coeff(a) + "*" + format_word(w)
        if i == 0:
            parts.append(("-" if sign == "-" else "") + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


# serialization ------------------------------------------------------------

def _gen_to_dict(g: Generator) -> dict:
    d = {"id": g.id}
    if g.tag is not None:
        d["tag"] = g.tag
    if g.time is not None:
        d["time"] = g.time
    return d


def poly_to_dict(p: NCPoly) -> dict:
    gens = sorted(p.generators(), key=Generator.sort_key)
    index = {g: i for i, g in enumerate(gens)}
    return {
        "generators": [_gen_to_dict(g) for g in gens],
        "terms": [
            {"coeff": {"num": c.numerator, "den": c.denominator}, "word": [index[g] for g in w]}
            for w, c in p.items()
        ],
    }


def poly_from_dict(doc: Mapping) -> NCPoly:
    try:
        gens = [gen(g["id"], g.get("tag"), g.get("time")) for g in doc["generators"]]
        terms: dict = {}
        for t in doc["terms"]:
            c = Fraction(int(t["coeff"]["num"]), int(t["coeff"]["den"]))
            w = tuple(gens[i] for i in t["word"])
            if w in terms:
                raise ValueError(f"duplicate word in serialized polynomial: {format_word(w)}")
            terms[w] = c
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed polynomial document: {exc!r}") from exc
    return NCPoly(terms)


def dumps(p: NCPoly) -> str:
    return json.dumps(poly_to_dict(p), sort_keys=True, separators=(",", ":"))


def loads(s: str) -> NCPoly:
    return poly_from_dict(json.loads(s))
