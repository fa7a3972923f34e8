"""Distribution functions, t-norms and grid-based triangle functions.

Everything here is immutable and pure. Scalar entry points validate their
inputs; the vectorised helpers (``TNorm.apply``, ``DistributionFunction``
called on arrays) are the fast path used by the convergence checkers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the unit interval (or other declared domain)."""


class ShapeError(ValueError):
    """Two grid functions do not share a support grid."""


# ---------------------------------------------------------------------------
# t-norms
# ---------------------------------------------------------------------------


def _min_scalar(s, t):
    return s if s <= t else t


@dataclass(frozen=True)
class TNorm:
    """A binary operation on [0, 1].

    ``fn`` works on scalars (floats or Fractions); ``vfn`` optionally works on
    numpy arrays. User-defined operations without ``vfn`` are vectorised with
    ``np.vectorize``.
    """

    name: str
    fn: Callable
    vfn: Callable | None = field(default=None, compare=False)

    def __call__(self, s, t):
        return self.fn(s, t)

    def apply(self, s, t) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        if self.vfn is not None:
            return self.vfn(s, t)
        return np.vectorize(self.fn, otypes=[float])(s, t)

    def conorm(self, s, t):
        return 1 - self.fn(1 - s, 1 - t)


MIN = TNorm("min", _min_scalar, np.minimum)
PRODUCT = TNorm("product", lambda s, t: s * t, np.multiply)

_BUILTIN = {"min": MIN, "product": PRODUCT}


def tnorm_by_name(name: str) -> TNorm:
    try:
        return _BUILTIN[name]
    except KeyError:
        raise DomainError(f"unknown t-norm {name!r}; expected one of {sorted(_BUILTIN)}") from None


def _check_unit(*xs) -> None:
    for x in xs:
        if not (0 <= x <= 1):
            raise DomainError(f"{x!r} is not in [0, 1]")


def tnorm_eval(T: TNorm, s, t):
    _check_unit(s, t)
    return T.fn(s, t)


def tconorm_eval(T: TNorm, s, t):
    """Dual t-conorm ``1 - T(1 - s, 1 - t)``."""
    _check_unit(s, t)
    return 1 - T.fn(1 - s, 1 - t)


# ---------------------------------------------------------------------------
# t-norm axiom checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomResult:
    name: str
    passed: bool
    deviation: float
    witness: tuple | None = None


@dataclass(frozen=True)
class AxiomReport:
    results: tuple[AxiomResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def unit_grid(n: int = 21, exact: bool = True) -> list:
    """``n`` equally spaced points of [0, 1]; Fractions when ``exact``."""
    if n < 2:
        raise ValueError("need at least two grid points")
    if exact:
        return [Fraction(i, n - 1) for i in range(n)]
    return [i / (n - 1) for i in range(n)]


def grid_triples(n: int = 21, exact: bool = True) -> list[tuple]:
    g = unit_grid(n, exact)
    return [(s, t, u) for s in g for t in g for u in g]


class _Worst:
    def __init__(self, name):
        self.name = name
        self.dev = 0
        self.witness = None

    def see(self, dev, witness):
        if self.witness is None or dev > self.dev:
            self.dev = dev
            self.witness = witness

    def result(self, tol) -> AxiomResult:
        dev = self.dev
        return AxiomResult(self.name, dev <= tol, float(dev), self.witness if dev > tol else None)


def check_tnorm_axioms(T: TNorm, samples: Iterable[tuple], tol: float = 0.0) -> AxiomReport:
    """Check commutativity, associativity, monotonicity and the unit law.

    The operation is evaluated raw (no range validation) so that broken
    operations report a deviation instead of raising. Deviations are measured
    in the arithmetic of the samples: with Fraction samples the built-in norms
    deviate by exactly zero.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("samples must be non-empty")
    f = T.fn
    t1, t2, t3, t4 = (_Worst(n) for n in ("T1", "T2", "T3", "T4"))
    for s, t, u in samples:
        t1.see(abs(f(s, t) - f(t, s)), (s, t))
        t2.see(abs(f(f(s, t), u) - f(s, f(t, u))), (s, t, u))
        lo, hi = (s, u) if s <= u else (u, s)
        t3.see(max(0, f(lo, t) - f(hi, t)), (lo, hi, t))
        for x in (s, t, u):
            t4.see(abs(f(1, x) - x), (1, x))
    return AxiomReport(tuple(w.result(tol) for w in (t1, t2, t3, t4)))


# ---------------------------------------------------------------------------
# distribution functions
# ---------------------------------------------------------------------------

STEP_EPS0 = "step-eps0"
PARAMETRIC = "parametric"
GRID_SAMPLED = "grid-sampled"


@dataclass(frozen=True)
class DistributionFunction:
    """A non-decreasing map from the extended reals into [0, 1].

    ``fn`` receives a float ndarray of finite abscissae; the limits at
    +-infinity are fixed to 1 and 0 here. Left-continuity is a modelling
    assumption and is not checked.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    kind: str = PARAMETRIC
    label: str = ""

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = np.empty_like(arr)
        pos = np.isposinf(arr)
        neg = np.isneginf(arr)
        fin = ~(pos | neg)
        out[pos] = 1.0
        out[neg] = 0.0
        if fin.any():
            out[fin] = self.fn(arr[fin])
        if out.ndim == 0:
            return float(out)
        return out


def df_eval(F: DistributionFunction, t) -> float:
    return float(F(t))


def _eps0(t):
    return np.where(t > 0, 1.0, 0.0)


EPS0 = DistributionFunction(_eps0, STEP_EPS0, "eps0")


def ratio_df(scale: float = 1.0) -> DistributionFunction:
    """``mu(t) = t / (t + scale)`` for t > 0 and 0 otherwise.

    With ``scale = 1`` this generates the norm ``nu_x(t) = t / (t + |x|)``.
    """
    if scale <= 0:
        raise DomainError("scale must be positive")

    def fn(t):
        tp = np.where(t > 0, t, 0.0)
        return tp / (tp + scale)

    return DistributionFunction(fn, PARAMETRIC, f"t/(t+{scale:g})")


def is_eps0(F: DistributionFunction, probes: Sequence[float] = (1e-12, 1e-9, 1e-6, 1e-3, 1.0, 1e3)) -> bool:
    """True when F is tagged as the unit step or agrees with it on the probes."""
    if F.kind == STEP_EPS0:
        return True
    vals = F(np.asarray(probes, dtype=float))
    return bool(np.all(vals == 1.0)) and F(0.0) == 0.0


def check_monotone(F: DistributionFunction, ts: Sequence[float]) -> tuple[bool, tuple | None]:
    """Check non-decrease and range on a sample; returns (ok, witness)."""
    ts = np.sort(np.asarray(ts, dtype=float))
    v = F(ts)
    if np.any((v < 0) | (v > 1)):
        i = int(np.argmax((v < 0) | (v > 1)))
        return False, (float(ts[i]), float(v[i]))
    d = np.diff(v)
    if np.any(d < 0):
        i = int(np.argmin(d))
        return False, (float(ts[i]), float(ts[i + 1]))
    return True, None


# ---------------------------------------------------------------------------
# grid distribution functions and triangle functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridDF:
    """Distribution function sampled on a finite increasing grid starting at 0.

    ``repair`` records how much the monotone repair pass had to lift values
    when this object came out of :func:`triangle_eval`.
    """

    grid: np.ndarray
    values: np.ndarray
    repair: float = 0.0

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise ShapeError("grid and values must be 1-d arrays of equal length >= 2")
        if g[0] != 0.0 or np.any(np.diff(g) <= 0):
            raise ShapeError("grid must start at 0 and be strictly increasing")
        if np.any((v < 0) | (v > 1)):
            raise DomainError("values must lie in [0, 1]")
        if np.any(np.diff(v) < 0):
            raise DomainError("values must be non-decreasing")
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.grid.size

    def as_df(self) -> DistributionFunction:
        """Piecewise-linear interpolation, 0 for t <= 0, last value held past the grid.

        +inf still maps to 1.
        """
        g, v = self.grid, self.values

        def fn(t):
            return np.where(t <= 0, 0.0, np.interp(t, g, v))

        return DistributionFunction(fn, GRID_SAMPLED, "grid")


def uniform_grid(t_max: float, n: int = 256) -> np.ndarray:
    return np.linspace(0.0, float(t_max), n)


def sample_df(F: DistributionFunction, grid: np.ndarray) -> GridDF:
    return GridDF(np.asarray(grid, dtype=float), F(np.asarray(grid, dtype=float)))


def eps0_on(grid: np.ndarray) -> GridDF:
    return sample_df(EPS0, grid)


TAU_T = "tau_T"
TAU_TSTAR = "tau_Tstar"
PI_T = "Pi_T"


def _sum_index(grid: np.ndarray) -> np.ndarray:
    """Matrix of grid indices n with grid[i] + grid[j] == grid[n], else -1."""
    m = grid.size
    s = grid[:, None] + grid[None, :]
    hi = np.clip(np.searchsorted(grid, s), 0, m - 1)
    lo = np.clip(hi - 1, 0, m - 1)
    pick = np.where(np.abs(grid[lo] - s) < np.abs(grid[hi] - s), lo, hi)
    scale = max(grid[-1], 1.0)
    ok = np.abs(grid[pick] - s) <= 1e-9 * scale
    return np.where(ok, pick, -1)


def _forward_fill(raw: np.ndarray) -> np.ndarray:
    out = raw.copy()
    for i in range(1, out.size):
        if np.isnan(out[i]):
            out[i] = out[i - 1]
    return out


def triangle_eval(kind: str, F: GridDF, G: GridDF, T: TNorm) -> GridDF:
    """Evaluate tau_T, tau_{T*} or Pi_T on a shared grid.

    The sup/inf over ``u + v = x`` ranges over grid pairs whose sum lands on
    a grid point. Points with no such pair inherit the previous value. A
    running maximum then restores monotonicity; its largest lift is stored
    in ``repair``.
    """
    if F.grid.shape != G.grid.shape or not np.array_equal(F.grid, G.grid):
        raise ShapeError("F and G must share a support grid")
    grid = F.grid
    m = grid.size
    if kind == PI_T:
        raw = np.clip(T.apply(F.values, G.values), 0.0, 1.0)
    elif kind in (TAU_T, TAU_TSTAR):
        idx = _sum_index(grid)
        valid = idx >= 0
        fv = np.broadcast_to(F.values[:, None], (m, m))
        gv = np.broadcast_to(G.values[None, :], (m, m))
        if kind == TAU_T:
            vals = T.apply(fv, gv)
            acc = np.full(m, -np.inf)
            np.maximum.at(acc, idx[valid], vals[valid])
            acc[np.isneginf(acc)] = np.nan
        else:
            vals = 1.0 - T.apply(1.0 - fv, 1.0 - gv)
            acc = np.full(m, np.inf)
            np.minimum.at(acc, idx[valid], vals[valid])
            acc[np.isposinf(acc)] = np.nan
        raw = np.clip(_forward_fill(acc), 0.0, 1.0)
    else:
        raise ValueError(f"unknown triangle function {kind!r}")
    fixed = np.maximum.accumulate(raw)
    return GridDF(grid, fixed, float(np.max(fixed - raw)))


def grid_distance(F: GridDF, G: GridDF) -> float:
    return float(np.max(np.abs(F.values - G.values)))


def within_one_cell(result: GridDF, F: GridDF) -> bool:
    """``result[n]`` lies between ``F[n-1]`` and ``F[n]`` at every grid index."""
    r, f = result.values, F.values
    if r[0] != f[0]:
        return False
    return bool(np.all((r[1:] >= f[:-1]) & (r[1:] <= f[1:])))


__all__ = [
    "DomainError", "ShapeError", "TNorm", "MIN", "PRODUCT", "tnorm_by_name",
    "tnorm_eval", "tconorm_eval", "AxiomResult", "AxiomReport", "unit_grid",
    "grid_triples", "check_tnorm_axioms", "DistributionFunction", "df_eval",
    "EPS0", "ratio_df", "is_eps0", "check_monotone", "GridDF", "uniform_grid",
    "sample_df", "eps0_on", "TAU_T", "TAU_TSTAR", "PI_T", "triangle_eval",
    "grid_distance", "within_one_cell", "STEP_EPS0", "PARAMETRIC", "GRID_SAMPLED",
]
