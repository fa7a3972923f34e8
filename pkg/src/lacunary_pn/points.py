"""Limit points, cluster points, decompositions and the three Cauchy notions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .algebra import DomainError
from .convergence import (
    ConvergenceReport,
    GridPointResult,
    ParamGrid,
    argmax_per_block,
    combine_statuses,
    extract_convergent_subsequence,
    tail_rule,
)
from .ideals import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    IdealOracle,
    IndexSet,
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
from .pn_space import PNSpace, as_point


@dataclass(frozen=True)
class PointSetEstimate:
    """Which candidates were accepted, with per-candidate, per-grid-point evidence."""

    candidates: tuple
    accepted: tuple[int, ...]
    evidence: tuple[dict, ...] = field(repr=False)

    @property
    def accepted_points(self) -> list:
        return [self.candidates[i] for i in self.accepted]


def cluster_points_scan(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme,
                        oracle: IdealOracle, candidates, grid: ParamGrid) -> PointSetEstimate:
    """Accept L when the good-block set ``{r : average > 1 - alpha}`` is not in
    the ideal (verdict Fails) at every grid point."""
    cands = tuple(candidates)
    accepted, evidence = [], []
    for i, c in enumerate(cands):
        L = as_point(c, space.dim)
        ks = theta.ks(grid.R)
        norms = distance_norms(seq, space, L, int(ks[-1]))
        per = {}
        for eps in grid.eps:
            avg = block_means(space.nu_from_norms(norms, eps), ks)
            for alpha in grid.alpha:
                G = IndexSet.blocks_from_mask(avg > 1 - alpha, "good blocks")
                per[(eps, alpha)] = {"good": G.members, "verdict": ideal_contains(oracle, G)}
        if all(p["verdict"].status is FAILS for p in per.values()):
            accepted.append(i)
        evidence.append(per)
    return PointSetEstimate(cands, tuple(accepted), tuple(evidence))


def limit_points_scan(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme,
                      oracle: IdealOracle, candidates, grid: ParamGrid) -> PointSetEstimate:
    """Accept L when, at every grid point, the per-block argmax subsequence
    toward L is theta-convergent to L and its touched-block set (every block)
    is not in the ideal."""
    cands = tuple(candidates)
    R = grid.R
    M_prime = IndexSet.blocks(range(1, R + 1), R, "touched blocks")
    touched = ideal_contains(oracle, M_prime)
    accepted, evidence = [], []
    for i, c in enumerate(cands):
        L = as_point(c, space.dim)
        ks = theta.ks(R)
        norms = distance_norms(seq, space, L, int(ks[-1]))
        ok = touched.status is FAILS
        per = {}
        for eps in grid.eps:
            nu = space.nu_from_norms(norms, eps)
            m = argmax_per_block(nu, ks)
            vals = nu[np.asarray(m) - 1]
            for alpha in grid.alpha:
                tail = tail_rule(vals <= 1 - alpha, R, "r")
                per[(eps, alpha)] = {"subsequence": m, "tail": tail, "touched": touched}
                ok = ok and tail.status is HOLDS
        if ok:
            accepted.append(i)
        evidence.append(per)
    return PointSetEstimate(cands, tuple(accepted), tuple(evidence))


def _block_ids(theta: LacunaryScheme, R: int) -> np.ndarray:
    """Block index of every k = 1..k_R."""
    return np.repeat(np.arange(1, R + 1), theta.widths(R))


def decompose(seq: SequenceSource, M_prime: Iterable[int], L, theta: LacunaryScheme,
              R: int | None = None) -> tuple[SequenceSource, SequenceSource]:
    """Split x into y + z: on blocks in M' y = x and z = 0, elsewhere y = L and z = x - L."""
    R = R or theta.cached_horizon
    Mp = set(int(r) for r in M_prime)
    if any(not 1 <= r <= R for r in Mp):
        raise ValueError(f"M' must be a subset of [1, {R}]")
    L = as_point(L, seq.dim)
    n = int(theta.k(R))
    x = seq.values(n)
    inside = np.isin(_block_ids(theta, R), list(Mp))[:, None]
    y = np.where(inside, x, L)
    z = np.where(inside, 0.0, x - L)
    return from_array(y, "y"), from_array(z, "z")


def modify_on_null_set(x: SequenceSource, y_values, E: IndexSet) -> SequenceSource:
    """The sequence equal to x off E and to ``y_values`` on E.

    ``y_values`` is a mapping ``k -> point``, a callable ``k -> point`` or a
    SequenceSource.
    """
    if isinstance(y_values, SequenceSource):
        def repl(ks):
            return y_values.values(int(ks.max()))[ks - 1]
    elif isinstance(y_values, Mapping):
        table = {int(k): as_point(v, x.dim) for k, v in y_values.items()}

        def repl(ks):
            missing = [int(k) for k in ks if int(k) not in table]
            if missing:
                raise KeyError(f"no replacement value for k={missing[0]}")
            return np.array([table[int(k)] for k in ks]).reshape(len(ks), x.dim)
    elif callable(y_values):
        def repl(ks):
            return np.array([as_point(y_values(int(k)), x.dim) for k in ks]).reshape(len(ks), x.dim)
    else:
        raise TypeError("y_values must be a mapping, a callable or a SequenceSource")

    def batch(ks):
        out = x.values(int(ks.max()))[ks - 1].copy() if len(ks) else np.empty((0, x.dim))
        hit = E.test(ks)
        if hit.any():
            out[hit] = repl(ks[hit])
        return out

    return SequenceSource(batch=batch, dim=x.dim, label=f"{x.label} modified on {E.label or 'E'}")


# ---------------------------------------------------------------------------
# Cauchy notions
# ---------------------------------------------------------------------------

MStrategy = Callable[[LacunaryScheme, int], Iterable[int]] | Iterable[int] | None


def default_m_candidates(theta: LacunaryScheme, R: int) -> list[int]:
    """First index of the second half of the horizon, the median index, and k_1."""
    ks = theta.ks(R)
    cands = [int(ks[R // 2]) + 1, -(-int(ks[R]) // 2), int(ks[1])]
    return list(dict.fromkeys(m for m in cands if 1 <= m <= ks[R]))


def _m_candidates(m_strategy: MStrategy, theta: LacunaryScheme, R: int) -> list[int]:
    if m_strategy is None:
        ms = default_m_candidates(theta, R)
    elif callable(m_strategy):
        ms = list(m_strategy(theta, R))
    else:
        ms = list(m_strategy)
    n = int(theta.k(R))
    ms = [int(m) for m in ms]
    if not ms or any(not 1 <= m <= n for m in ms):
        raise DomainError(f"reference indices m must be a non-empty subset of [1, {n}]")
    return ms


def cauchy_averages(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme, m: int,
                    eps: float, R: int) -> np.ndarray:
    """Block averages of ``nu_{x_k - x_m}(eps)``."""
    return block_averages(seq, space, theta, seq.values(m)[m - 1], eps, R)


class _CauchyTable:
    """Block averages of ``nu_{x_k - x_m}(eps)``, memoised per (m, eps)."""

    def __init__(self, seq, space, theta, R):
        self.seq, self.space, self.ks = seq, space, theta.ks(R)
        self._norms, self._avg = {}, {}

    def __call__(self, m: int, eps: float) -> np.ndarray:
        if (m, eps) not in self._avg:
            if m not in self._norms:
                n = int(self.ks[-1])
                self._norms[m] = distance_norms(self.seq, self.space, self.seq.values(m)[m - 1], n)
            self._avg[(m, eps)] = block_means(self.space.nu_from_norms(self._norms[m], eps), self.ks)
        return self._avg[(m, eps)]


def theta_cauchy_check(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme, grid: ParamGrid,
                       m_strategy: MStrategy = None) -> ConvergenceReport:
    ms = _m_candidates(m_strategy, theta, grid.R)
    table = _CauchyTable(seq, space, theta, grid.R)
    rows = []
    for eps, alpha in grid.points():
        tried = {}
        chosen = None
        for m in ms:
            avg = table(m, eps)
            v = tail_rule(avg <= 1 - alpha, grid.R, "r")
            tried[m] = (v, avg)
            if v.status is HOLDS:
                chosen = m
                break
        if chosen is not None:
            v, avg = tried[chosen]
            verdict = Verdict(HOLDS, {**v.evidence, "m": chosen}, grid.R)
        else:
            statuses = [t[0].status for t in tried.values()]
            status = FAILS if all(s is FAILS for s in statuses) else INCONCLUSIVE
            m0 = ms[0]
            v, avg = tried[m0]
            verdict = Verdict(status, {"tried_m": ms, "per_m": {m: t[0].evidence for m, t in tried.items()}},
                              grid.R)
        rows.append(GridPointResult(eps, alpha, verdict, tuple(avg.tolist()),
                                    tuple((np.flatnonzero(avg <= 1 - alpha) + 1).tolist())))
    return ConvergenceReport("theta_cauchy", (), grid.R, tuple(rows), {"m_candidates": ms})


def I_theta_cauchy_check(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme,
                         oracle: IdealOracle, grid: ParamGrid, m_strategy: MStrategy = None) -> ConvergenceReport:
    """Holds at a grid point when, for some m, the good-block set is in the filter."""
    ms = _m_candidates(m_strategy, theta, grid.R)
    table = _CauchyTable(seq, space, theta, grid.R)
    rows = []
    for eps, alpha in grid.points():
        tried = {}
        for m in ms:
            avg = table(m, eps)
            G = IndexSet.blocks_from_mask(avg > 1 - alpha, "good blocks")
            tried[m] = (filter_contains(oracle, G), avg)
            if tried[m][0].status is HOLDS:
                break
        hit = [m for m, t in tried.items() if t[0].status is HOLDS]
        m0 = hit[0] if hit else ms[0]
        v, avg = tried[m0]
        if hit:
            verdict = Verdict(HOLDS, {**v.evidence, "m": m0}, v.horizon)
        else:
            status = FAILS if all(t[0].status is FAILS for t in tried.values()) else INCONCLUSIVE
            verdict = Verdict(status, {"tried_m": ms,
                                       "per_m": {m: t[0].evidence for m, t in tried.items()}}, v.horizon)
        rows.append(GridPointResult(eps, alpha, verdict, tuple(avg.tolist()),
                                    tuple((np.flatnonzero(avg <= 1 - alpha) + 1).tolist())))
    return ConvergenceReport("I_theta_cauchy", (), grid.R, tuple(rows),
                             {"m_candidates": ms, "oracle": oracle.describe()})


def first_index_per_block(theta: LacunaryScheme, R: int) -> list[int]:
    return (theta.ks(R)[:-1] + 1).tolist()


def induced_scheme(theta: LacunaryScheme, M: list[int], R: int) -> tuple[list[int], LacunaryScheme]:
    """Touched blocks of M and the explicit scheme grouping the subsequence by them."""
    blocks = np.searchsorted(theta.ks(R), np.asarray(M), side="left")
    touched, counts = np.unique(blocks, return_counts=True)
    ks = [0] + np.cumsum(counts).tolist()
    return touched.tolist(), make_scheme({"kind": "explicit", "ks": [int(k) for k in ks]})


def I_star_theta_cauchy_check(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme,
                              oracle: IdealOracle, grid: ParamGrid,
                              M: Iterable[int] | None = None) -> ConvergenceReport:
    """Holds when the blocks touched by M form a filter set and the subsequence
    ``(x_m)_{m in M}`` is theta-Cauchy along the blocks it induces.

    M defaults to the first index of every block.
    """
    R = grid.R
    n = int(theta.k(R))
    M = sorted({int(m) for m in (first_index_per_block(theta, R) if M is None else M)})
    M = [m for m in M if m <= n]
    if not M or M[0] < 1:
        raise DomainError("M must contain at least one index in [1, k_R]")
    touched, sub_theta = induced_scheme(theta, M, R)
    Mp = IndexSet.blocks(touched, R, "touched blocks")
    filt = filter_contains(oracle, Mp)
    sub = from_array(seq.values(n)[np.asarray(M) - 1], "subsequence")
    R_sub = sub_theta.cached_horizon
    inner = theta_cauchy_check(sub, space, sub_theta, grid.with_horizon(R_sub))
    rows = []
    for row in inner.rows:
        status = combine_statuses([filt.status, row.status])
        ev = {"touched_blocks": touched, "filter": filt.status.value, "subsequence": row.verdict.evidence}
        rows.append(GridPointResult(row.eps, row.alpha, Verdict(status, ev, R), row.averages, row.offending))
    return ConvergenceReport("I_star_theta_cauchy", (), R, tuple(rows),
                             {"M_size": len(M), "induced_blocks": R_sub})


def pointwise_cauchy_tail(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme, m: int,
                          eps: float, alpha: float, R: int, r0: int) -> bool:
    """Per-block argmax subsequence toward x_m satisfies ``nu > 1 - alpha`` for r0 <= r <= R."""
    xm = seq.values(m)[m - 1]
    sel = extract_convergent_subsequence(seq, space, theta, xm, eps, R)
    vals = nu_sequence(seq, space, xm, eps, int(theta.k(R)))[np.asarray(sel) - 1]
    return bool(np.all(vals[r0 - 1:] > 1 - alpha))


__all__ = [
    "PointSetEstimate", "cluster_points_scan", "limit_points_scan", "decompose",
    "modify_on_null_set", "default_m_candidates", "cauchy_averages", "theta_cauchy_check",
    "I_theta_cauchy_check", "first_index_per_block", "induced_scheme",
    "I_star_theta_cauchy_check", "pointwise_cauchy_tail",
]
