"""Convergence modes for real sequences: statistical, ideal, N_theta and lacunary ideal."""

from __future__ import annotations

import numpy as np

from .ideals import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    MIN_EVIDENCE_HORIZON,
    DensityIdeal,
    IdealOracle,
    IndexSet,
    Verdict,
    ideal_contains,
)
from .lacunary import LacunaryScheme, SequenceSource, block_means

# A real sequence is a one-dimensional SequenceSource.
RealSequence = SequenceSource


def _exceedance_set(x: SequenceSource, L: float, eps: float) -> IndexSet:
    L = float(L)

    def pred(ks: np.ndarray) -> np.ndarray:
        n = int(ks.max()) if len(ks) else 0
        vals = x.scalar_values(n)[ks - 1]
        return np.abs(vals - L) >= eps

    return IndexSet.where(pred, f"|x_k - {L:g}| >= {eps:g}")


def real_I_convergence_check(x: SequenceSource, L: float, eps: float, oracle: IdealOracle) -> Verdict:
    """Oracle verdict on ``{k : |x_k - L| >= eps}``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    v = ideal_contains(oracle, _exceedance_set(x, L, eps))
    return Verdict(v.status, {**v.evidence, "eps": eps, "L": float(L)}, v.horizon,
                   f"I-lim x = {float(L):g} at eps={eps:g}")


def statistical_convergence_check(x: SequenceSource, L: float, eps: float,
                                  oracle: DensityIdeal | None = None) -> Verdict:
    return real_I_convergence_check(x, L, eps, oracle or DensityIdeal())


def abs_block_means(x: SequenceSource, L: float, theta: LacunaryScheme, R: int) -> np.ndarray:
    """Block means of ``|x_k - L|`` for r = 1..R."""
    ks = theta.ks(R)
    return block_means(np.abs(x.scalar_values(int(ks[-1])) - float(L)), ks)


def N_theta_check(x: SequenceSource, L: float, theta: LacunaryScheme, tol: float, R: int) -> Verdict:
    """Tail-window test for ``lim_r mean_{J_r} |x_k - L| = 0``.

    The window is the final quarter of blocks ``(floor(3R/4), R]``. Holds when
    every mean there is below ``tol`` and the means do not increase; Fails when
    every mean there is at least ``tol`` and they do not decrease.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    means = abs_block_means(x, L, theta, R)
    start = (3 * R) // 4
    window = means[start:]
    ev = {"window": [start + 1, R], "tail_means": window.tolist(), "tol": tol}
    if R < MIN_EVIDENCE_HORIZON:
        return Verdict(INCONCLUSIVE, {**ev, "rule": "horizon too short"}, R)
    d = np.diff(window)
    slack = tol / 10
    if np.all(window < tol) and np.all(d <= slack):
        return Verdict(HOLDS, {**ev, "rule": "tail below tol, non-increasing"}, R)
    if np.all(window >= tol) and np.all(d >= -slack):
        return Verdict(FAILS, {**ev, "rule": "tail bounded away from 0"}, R)
    return Verdict(INCONCLUSIVE, {**ev, "rule": "no clear trend"}, R)


def real_I_theta_check(x: SequenceSource, L: float, theta: LacunaryScheme, eps: float,
                       oracle: IdealOracle, R: int | None = None) -> Verdict:
    """Oracle verdict on ``{r <= R : mean_{J_r} |x_k - L| >= eps}``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    R = R or theta.cached_horizon
    means = abs_block_means(x, L, theta, R)
    O = IndexSet.blocks_from_mask(means >= eps, "offending blocks")
    v = ideal_contains(oracle, O)
    return Verdict(v.status, {**v.evidence, "offending": list(O.members), "eps": eps}, v.horizon,
                   f"I_theta-lim x = {float(L):g} at eps={eps:g}")


__all__ = [
    "RealSequence", "real_I_convergence_check", "statistical_convergence_check",
    "abs_block_means", "N_theta_check", "real_I_theta_check",
]
