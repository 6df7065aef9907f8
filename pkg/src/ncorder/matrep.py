"""Numerical oracle: evaluate polynomials on random complex matrices."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np
import scipy.linalg

from .ncalg import Generator, NCPoly

log = logging.getLogger(__name__)

DEGENERACY_FACTOR = 1e-6
MAX_REDRAWS = 20


@dataclass(frozen=True)
class Representation:
    dim: int
    assignments: Mapping[Generator, np.ndarray]
    seed: int
    scale: float

    def __getitem__(self, g: Generator) -> np.ndarray:
        try:
            return self.assignments[g]
        except KeyError:
            raise KeyError(f"generator {g} has no matrix assigned") from None

    def rescaled(self, eps: float) -> "Representation":
        """Same matrices, norms multiplied by ``eps / scale``."""
        f = eps / self.scale
        return Representation(self.dim, {g: f * m for g, m in self.assignments.items()}, self.seed, eps)


def _draw(rng: np.random.Generator, d: int, eps: float) -> np.ndarray:
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return m * (eps / np.linalg.norm(m, 2))


def random_representation(
    generators: Iterable[Generator],
    d: int,
    seed: int = 0,
    eps: float = 0.1,
    *,
    allow_small: bool = False,
) -> Representation:
    """Seeded random matrices with spectral norm ``eps``.

    Draws in which some pair nearly commutes are redrawn with the next sub-seed.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if d < 2 and not (allow_small and d == 1):
        raise ValueError(f"dimension {d} < 2 makes every representation commutative")
    gens = sorted(set(generators), key=Generator.sort_key)
    for attempt in range(MAX_REDRAWS):
        rng = np.random.default_rng([seed, attempt])
        mats = {g: _draw(rng, d, eps) for g in gens}
        if d == 1 or _nondegenerate(mats, eps):
            return Representation(d, mats, seed, eps)
        log.info("seed %d attempt %d drew nearly commuting matrices, redrawing", seed, attempt)
    raise RuntimeError(f"no nondegenerate draw after {MAX_REDRAWS} attempts")


def _nondegenerate(mats: Mapping[Generator, np.ndarray], eps: float) -> bool:
    for a, b in combinations(mats.values(), 2):
        if np.linalg.norm(a @ b - b @ a, 2) < DEGENERACY_FACTOR * eps**2:
            return False
    return True


def evaluate(p: NCPoly, r: Representation) -> np.ndarray:
    out = np.zeros((r.dim, r.dim), dtype=complex)
    eye = np.eye(r.dim, dtype=complex)
    for w, c in p.items():
        m = eye
        for g in w:
            m = m @ r[g]
        out += float(c) * m
    return out


def evaluate_product(factors: Iterable[NCPoly], r: Representation) -> np.ndarray:
    """Product of the factors' matrices, multiplied left to right without expanding."""
    out = np.eye(r.dim, dtype=complex)
    for f in factors:
        out = out @ evaluate(f, r)
    return out


def matrix_exp(m: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(np.asarray(m, dtype=complex))


@dataclass(frozen=True)
class Comparison:
    difference: float
    relative: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.relative <= self.tol


def compare(a: np.ndarray, b: np.ndarray, tol: float) -> Comparison:
    """Frobenius difference relative to ``max(1, |a|_F)``."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = float(np.linalg.norm(a - b))
    return Comparison(diff, diff / max(1.0, float(np.linalg.norm(a))), tol)


def bch_residual(z: NCPoly, r: Representation, x: Generator, y: Generator) -> float:
    """``|e^X e^Y - e^Z|_F`` for a truncated BCH exponent Z."""
    lhs = matrix_exp(r[x]) @ matrix_exp(r[y])
    return float(np.linalg.norm(lhs - matrix_exp(evaluate(z, r))))
