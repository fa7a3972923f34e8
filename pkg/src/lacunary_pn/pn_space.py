"""Probabilistic normed spaces over R^d built from a crisp norm.

The only construction offered is the simple space: ``nu_x(t) = mu(t / |x|)``
for ``x != 0`` and ``nu_0`` the unit step at zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .algebra import (
    AxiomReport,
    AxiomResult,
    DistributionFunction,
    TNorm,
    is_eps0,
)


class SpaceError(ValueError):
    """Invalid probabilistic normed space construction."""


def as_point(x, dim: int | None = None) -> np.ndarray:
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1:
        raise SpaceError(f"a point must be a flat list of coordinates, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise SpaceError("point coordinates must be finite")
    if dim is not None and p.size != dim:
        raise SpaceError(f"expected a point of dimension {dim}, got {p.size}")
    return p


def euclidean(v: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.square(v), axis=-1))


@dataclass(frozen=True, eq=False)
class PNSpace:
    dim: int
    mu: DistributionFunction
    tnorm: TNorm
    norm: Callable[[np.ndarray], np.ndarray] = field(default=euclidean)
    label: str = ""

    def point(self, x) -> np.ndarray:
        return as_point(x, self.dim)

    def nu_from_norms(self, norms: np.ndarray, t: float) -> np.ndarray:
        """nu evaluated at ``t`` for vectors with the given crisp norms."""
        norms = np.asarray(norms, dtype=float)
        out = np.empty_like(norms)
        zero = norms == 0
        out[zero] = 1.0 if t > 0 else 0.0
        nz = ~zero
        if nz.any():
            out[nz] = self.mu(t / norms[nz])
        return out

    def nu(self, diffs: np.ndarray, t: float) -> np.ndarray:
        """nu_v(t) for each row v of ``diffs`` (shape (n, dim))."""
        return self.nu_from_norms(self.norm(np.asarray(diffs, dtype=float)), t)


def simple_space(dim: int, mu: DistributionFunction, tnorm: TNorm,
                 norm: Callable[[np.ndarray], np.ndarray] | None = None,
                 label: str = "") -> PNSpace:
    if not isinstance(dim, int) or dim < 1:
        raise SpaceError("dim must be a positive integer")
    if mu(0.0) != 0.0:
        raise SpaceError("mu(0) must be 0")
    if is_eps0(mu):
        raise SpaceError("mu must differ from the unit step eps0")
    return PNSpace(dim, mu, tnorm, norm or euclidean, label)


def nu_eval(space: PNSpace, x, t: float) -> float:
    p = space.point(x)
    n = float(space.norm(p))
    if n == 0.0:
        return 1.0 if t > 0 else 0.0
    return float(space.mu(t / n))


def open_ball_contains(space: PNSpace, center, r: float, t: float, y) -> bool:
    """Membership of ``y`` in the ball ``{y : nu_{y-center}(t) > 1 - r}``."""
    if not (0 < r < 1):
        raise SpaceError("radius r must lie in (0, 1)")
    if not t > 0:
        raise SpaceError("t must be positive")
    return nu_eval(space, space.point(y) - space.point(center), t) > 1 - r


class _Worst:
    def __init__(self, name):
        self.name = name
        self.dev = 0.0
        self.witness = None

    def see(self, dev, witness):
        if self.witness is None or dev > self.dev:
            self.dev, self.witness = float(dev), witness

    def result(self, tol):
        return AxiomResult(self.name, self.dev <= tol, self.dev, self.witness if self.dev > tol else None)


def _w(x):
    return tuple(float(c) for c in np.atleast_1d(x))


def check_pn_axioms(space: PNSpace, samples: Iterable[tuple],
                    scales: tuple[float, ...] = (-3.0, -1.0, -0.5, 0.25, 2.0),
                    tol: float = 1e-12) -> AxiomReport:
    """Sample the probabilistic-norm axioms on ``(x, y, s, t)`` tuples.

    Reports axioms ``i`` (nu_x(0) = 0), ``ii`` (nu_0(t) = 1 for t > 0; forward
    direction only), ``iii`` (scaling), ``iv`` (triangle inequality under the
    space's t-norm) and ``monotone`` (nu_x non-decreasing).
    """
    samples = list(samples)
    if not samples:
        raise ValueError("samples must be non-empty")
    zero = np.zeros(space.dim)
    w = {n: _Worst(n) for n in ("i", "ii", "iii", "iv", "monotone")}
    T = space.tnorm.fn
    for x, y, s, t in samples:
        x, y = space.point(x), space.point(y)
        s, t = float(s), float(t)
        for p in (x, y):
            w["i"].see(abs(nu_eval(space, p, 0.0)), (_w(p),))
        for u in (s, t):
            if u > 0:
                w["ii"].see(abs(1.0 - nu_eval(space, zero, u)), (u,))
        for a in scales:
            for p, u in ((x, s), (y, t)):
                lhs = nu_eval(space, a * p, u)
                rhs = nu_eval(space, p, u / abs(a))
                w["iii"].see(abs(lhs - rhs), (_w(p), a, u))
        lhs = nu_eval(space, x + y, s + t)
        rhs = T(nu_eval(space, x, s), nu_eval(space, y, t))
        w["iv"].see(max(0.0, rhs - lhs), (_w(x), _w(y), s, t))
        lo, hi = min(s, t), max(s, t)
        for p in (x, y):
            w["monotone"].see(max(0.0, nu_eval(space, p, lo) - nu_eval(space, p, hi)), (_w(p), lo, hi))
    return AxiomReport(tuple(v.result(tol) for v in w.values()))


def random_samples(space: PNSpace, n: int, rng: np.random.Generator,
                   coord_scale: float = 5.0, t_scale: float = 5.0) -> list[tuple]:
    """Random ``(x, y, s, t)`` tuples; about one x in ten is the zero vector."""
    out = []
    for _ in range(n):
        x = rng.uniform(-coord_scale, coord_scale, space.dim)
        y = rng.uniform(-coord_scale, coord_scale, space.dim)
        if rng.random() < 0.1:
            x = np.zeros(space.dim)
        s, t = rng.uniform(0, t_scale, 2)
        if rng.random() < 0.05:
            s = 0.0
        out.append((x, y, s, t))
    return out


def describe(space: PNSpace) -> str:
    return f"simple space dim={space.dim} mu={space.mu.label} T={space.tnorm.name}"


__all__ = [
    "SpaceError", "PNSpace", "as_point", "euclidean", "simple_space", "nu_eval",
    "open_ball_contains", "check_pn_axioms", "random_samples", "describe",
]
