"""nu-, theta- and I_theta-convergence in a probabilistic normed space.

"For every eps > 0 and alpha in (0, 1)" becomes a finite :class:`ParamGrid`.
Every check returns a :class:`ConvergenceReport` with one verdict per grid
point; the overall status is Fails if any point Fails, Holds if every point
Holds, and Inconclusive otherwise.

Existential tails ("there is an m" / "there is an r0") are bounded by half
the horizon, so at least half of the observed range witnesses the tail.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classical import real_I_theta_check
from .ideals import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    MIN_EVIDENCE_HORIZON,
    IdealOracle,
    IndexSet,
    Status,
    Verdict,
    filter_contains,
    ideal_contains,
)
from .lacunary import (
    LacunaryScheme,
    SequenceSource,
    block_averages,
    block_means,
    distance_norms,
    from_array,
    make_scheme,
    nu_sequence,
)
from .pn_space import PNSpace, SpaceError, as_point


@dataclass(frozen=True)
class ParamGrid:
    eps: tuple[float, ...] = (2.0, 1.0, 0.5, 0.1)
    alpha: tuple[float, ...] = (0.1, 0.25, 0.5, 0.75)
    R: int = 20

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if not self.eps or not self.alpha:
            raise ValueError("grid needs at least one eps and one alpha")
        if any(not e > 0 for e in self.eps):
            raise ValueError("every eps must be positive")
        if any(not 0 < a < 1 for a in self.alpha):
            raise ValueError("every alpha must lie in (0, 1)")
        if not isinstance(self.R, int) or self.R < 1:
            raise ValueError("block horizon R must be a positive integer")

    def points(self):
        for e in self.eps:
            for a in self.alpha:
                yield e, a

    def with_horizon(self, R: int) -> "ParamGrid":
        return ParamGrid(self.eps, self.alpha, R)


def combine_statuses(statuses) -> Status:
    statuses = list(statuses)
    if any(s is FAILS for s in statuses):
        return FAILS
    if statuses and all(s is HOLDS for s in statuses):
        return HOLDS
    return INCONCLUSIVE


@dataclass(frozen=True)
class GridPointResult:
    eps: float
    alpha: float
    verdict: Verdict
    averages: tuple[float, ...] = ()
    offending: tuple[int, ...] = ()

    @property
    def status(self) -> Status:
        return self.verdict.status


@dataclass(frozen=True)
class ConvergenceReport:
    mode: str
    target: tuple
    horizon: int
    rows: tuple[GridPointResult, ...]
    info: dict = field(default_factory=dict)

    @property
    def overall(self) -> Status:
        return combine_statuses(r.status for r in self.rows)

    def row(self, eps: float, alpha: float) -> GridPointResult:
        for r in self.rows:
            if r.eps == eps and r.alpha == alpha:
                return r
        raise KeyError((eps, alpha))

    def offending_sets(self) -> dict[tuple[float, float], tuple[int, ...]]:
        return {(r.eps, r.alpha): r.offending for r in self.rows}

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "target": list(self.target),
            "horizon": self.horizon,
            "overall": self.overall.value,
            "info": self.info,
            "grid": [
                {
                    "eps": r.eps,
                    "alpha": r.alpha,
                    "status": r.status.value,
                    "offending": list(r.offending),
                    "block_averages": list(r.averages),
                    "evidence": r.verdict.evidence,
                }
                for r in self.rows
            ],
        }


def _target(L) -> tuple:
    return tuple(float(c) for c in as_point(L))


def tail_rule(violations: np.ndarray, horizon: int, unit: str) -> Verdict:
    """Decide "eventually no violation" on ``violations[i]`` for i = 1..horizon.

    Holds when the first clean tail start ``v + 1`` (v = last violation) is at
    most ``floor(horizon / 2)``; Fails otherwise.
    """
    bad = np.flatnonzero(violations)
    last = int(bad[-1]) + 1 if bad.size else 0
    start = last + 1
    half = horizon // 2
    ev = {"last_violation": last or None, f"{unit}0": start, "half_horizon": half}
    if horizon < MIN_EVIDENCE_HORIZON:
        return Verdict(INCONCLUSIVE, {**ev, "rule": "horizon too short"}, horizon)
    if start <= half:
        return Verdict(HOLDS, {**ev, "rule": f"tail clean from {unit}={start}"}, horizon)
    return Verdict(FAILS, {**ev, "rule": "violations in the second half of the horizon"}, horizon)


def nu_convergence_check(seq: SequenceSource, space: PNSpace, L, grid: ParamGrid,
                         theta: LacunaryScheme | None = None) -> ConvergenceReport:
    """Ordinary convergence: ``nu_{x_k - L}(eps) > 1 - alpha`` for all k >= m.

    The index horizon is ``k_R`` of ``theta`` when given, else ``2^R``.
    """
    n = int(theta.k(grid.R)) if theta is not None else 2 ** grid.R
    if grid.R < MIN_EVIDENCE_HORIZON:
        n = min(n, MIN_EVIDENCE_HORIZON - 1)
    norms = distance_norms(seq, space, L, n)
    rows = []
    for eps, alpha in grid.points():
        v = tail_rule(space.nu_from_norms(norms, eps) <= 1 - alpha, n, "m")
        rows.append(GridPointResult(eps, alpha, v))
    return ConvergenceReport("nu", _target(L), n, tuple(rows))


def _block_table(seq, space, theta, L, grid):
    ks = theta.ks(grid.R)
    norms = distance_norms(seq, space, L, int(ks[-1]))
    for eps in grid.eps:
        avg = block_means(space.nu_from_norms(norms, eps), ks)
        for alpha in grid.alpha:
            yield eps, alpha, avg, avg <= 1 - alpha


def theta_convergence_check(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme, L,
                            grid: ParamGrid) -> ConvergenceReport:
    rows = []
    for eps, alpha, avg, off in _block_table(seq, space, theta, L, grid):
        v = tail_rule(off, grid.R, "r")
        rows.append(GridPointResult(eps, alpha, v, tuple(avg.tolist()),
                                    tuple((np.flatnonzero(off) + 1).tolist())))
    return ConvergenceReport("theta", _target(L), grid.R, tuple(rows))


def I_theta_convergence_check(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme,
                              oracle: IdealOracle, L, grid: ParamGrid) -> ConvergenceReport:
    """Oracle verdict on ``O(eps, alpha) = {r <= R : average <= 1 - alpha}`` per grid point."""
    rows = []
    for eps, alpha, avg, off in _block_table(seq, space, theta, L, grid):
        O = IndexSet.blocks_from_mask(off, "offending blocks")
        v = ideal_contains(oracle, O)
        rows.append(GridPointResult(eps, alpha, v, tuple(avg.tolist()), O.members))
    return ConvergenceReport("I_theta", _target(L), grid.R, tuple(rows),
                             {"oracle": oracle.describe()})


@dataclass(frozen=True)
class EquivalenceReport:
    """Three equivalent forms of I_theta-convergence at one ``(eps, alpha)``.

    ``offending_in_ideal``: the offending block set is in the ideal.
    ``good_in_filter``: its complement, the good block set, is in the filter.
    ``real_limit``: the real sequence ``u_k = nu_{x_k - L}(eps)`` is
    I_theta-convergent to 1, tested at tolerance ``alpha``.
    """

    offending_in_ideal: Verdict
    good_in_filter: Verdict
    real_limit: Verdict

    @property
    def statuses(self) -> dict[str, Status]:
        return {
            "offending_in_ideal": self.offending_in_ideal.status,
            "good_in_filter": self.good_in_filter.status,
            "real_limit": self.real_limit.status,
        }

    @property
    def consistent(self) -> bool:
        decided = {s for s in self.statuses.values() if s is not INCONCLUSIVE}
        return len(decided) <= 1


def equivalent_statements(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme,
                          oracle: IdealOracle, L, eps: float, alpha: float,
                          R: int) -> EquivalenceReport:
    avg = block_averages(seq, space, theta, L, eps, R)
    off = avg <= 1 - alpha
    O = IndexSet.blocks_from_mask(off, "offending blocks")
    G = IndexSet.blocks_from_mask(~off, "good blocks")
    u = from_array(nu_sequence(seq, space, L, eps, int(theta.k(R))), "nu values")
    return EquivalenceReport(
        ideal_contains(oracle, O),
        filter_contains(oracle, G),
        real_I_theta_check(u, 1.0, theta, alpha, oracle, R),
    )


def limit_scan(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme, oracle: IdealOracle,
               candidates, grid: ParamGrid) -> list:
    """Candidates whose I_theta-convergence check is overall Holds."""
    pts = [as_point(c, space.dim) for c in candidates]
    for i in range(len(pts)):
        for j in range(i):
            if np.array_equal(pts[i], pts[j]):
                raise ValueError(f"candidates {j} and {i} coincide")
    return [c for c, p in zip(candidates, pts)
            if I_theta_convergence_check(seq, space, theta, oracle, p, grid).overall is HOLDS]


def seq_combine(a: float, x: SequenceSource, b: float, y: SequenceSource) -> SequenceSource:
    """The sequence ``k -> a x_k + b y_k``."""
    if x.dim != y.dim:
        raise SpaceError(f"dimension mismatch: {x.dim} vs {y.dim}")
    a, b = float(a), float(b)

    def batch(ks):
        n = int(ks.max()) if len(ks) else 0
        return a * x.values(n)[ks - 1] + b * y.values(n)[ks - 1]

    return SequenceSource(batch=batch, dim=x.dim, label=f"{a:g}*({x.label}) + {b:g}*({y.label})")


def extract_convergent_subsequence(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme, L,
                                   eps: float, R: int) -> list[int]:
    """One index per block: the argmax of ``nu_{x_k - L}(eps)`` over J_r, ties to the smallest k."""
    ks = theta.ks(R)
    return argmax_per_block(nu_sequence(seq, space, L, eps, int(ks[-1])), ks)


def argmax_per_block(values: np.ndarray, ks: np.ndarray) -> list[int]:
    """1-based index of the first maximum of ``values`` inside each block."""
    return [int(lo) + 1 + int(np.argmax(values[lo:hi])) for lo, hi in zip(ks[:-1], ks[1:])]


# ---------------------------------------------------------------------------
# planted instances
# ---------------------------------------------------------------------------

PLANTED_SCHEMES = (
    ({"kind": "geometric", "rho": 2.0, "c": 1.0}, (14, 15, 16)),
    ({"kind": "geometric", "rho": 2.0, "c": 2.0}, (14, 15)),
    ({"kind": "polynomial", "p": 3}, (40, 48)),
)


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    """A sequence with a known limit.

    ``x_k = L + d_k`` with ``|d_k| <= amp / k`` off the perfect squares, and a
    spike at distance 4 to 6 from L on every square. Squares have density
    zero, so L is the I_theta-limit for the density ideal. ``decoys`` are
    points at distance 1 to 2.5 from L.
    """

    seq: SequenceSource
    L: np.ndarray
    theta: LacunaryScheme
    R: int
    decoys: tuple[np.ndarray, ...]
    params: dict

    @property
    def dim(self) -> int:
        return self.seq.dim

    def grid(self, base: ParamGrid | None = None) -> ParamGrid:
        return (base or ParamGrid()).with_horizon(self.R)


def _unit_vectors(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    v = rng.normal(size=(n, dim))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return v / norms


def planted_instance(rng: np.random.Generator, *, dim: int | None = None, scheme: dict | None = None,
                     R: int | None = None, L=None, spikes: bool = True, n_decoys: int = 2) -> PlantedInstance:
    from .lacunary import is_square

    if scheme is None or R is None:
        desc, horizons = PLANTED_SCHEMES[int(rng.integers(len(PLANTED_SCHEMES)))]
        scheme = scheme or desc
        R = R or int(rng.choice(horizons))
    dim = dim or int(rng.integers(1, 4))
    L = rng.uniform(-3, 3, dim) if L is None else as_point(L, dim)
    theta = make_scheme(scheme, R)
    n = int(theta.k(R))
    k = np.arange(1, n + 1)
    amp = float(rng.uniform(0.05, 0.5))
    x = L + _unit_vectors(rng, n, dim) * (amp * rng.uniform(0, 1, n) / k)[:, None]
    if spikes:
        sq = is_square(k)
        dist = rng.uniform(4, 6, int(sq.sum()))
        x[sq] = L + _unit_vectors(rng, int(sq.sum()), dim) * dist[:, None]
    decoys = tuple(L + u * rng.uniform(1, 2.5) for u in _unit_vectors(rng, n_decoys, dim))
    params = {"dim": dim, "amp": amp, "scheme": theta.describe(), "R": R, "spikes": spikes}
    return PlantedInstance(from_array(x, "planted"), L, theta, R, decoys, params)


__all__ = [
    "ParamGrid", "GridPointResult", "ConvergenceReport", "combine_statuses", "tail_rule",
    "nu_convergence_check", "theta_convergence_check", "I_theta_convergence_check",
    "EquivalenceReport", "equivalent_statements", "limit_scan", "seq_combine",
    "extract_convergent_subsequence", "PlantedInstance", "planted_instance", "PLANTED_SCHEMES",
]
