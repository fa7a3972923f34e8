"""Lacunary schemes, memoised sequence sources and block averages.

Blocks are 1-based: block ``r`` is the integer range ``(k_{r-1}, k_r]`` with
``k_0 = 0``. Sequences are indexed from ``k = 1``.
"""

from __future__ import annotations

import math
import threading
from typing import Callable

import numpy as np

from .pn_space import PNSpace, as_point


class SchemeError(ValueError):
    """Invalid lacunary scheme or out-of-range block query."""


DEFAULT_HORIZON = 20


class LacunaryScheme:
    """The integer sequence ``k_0 = 0 < k_1 < k_2 < ...``.

    Closed-form schemes extend their cached prefix on demand. Explicit schemes
    only know their listed prefix, and their asymptotics (``h_r -> inf``) are
    taken on trust.
    """

    def __init__(self, kind: str, params: dict, ks: list[int], generator: Callable[[int], int] | None,
                 monotone_from: int = 1):
        self.kind = kind
        self.params = dict(params)
        self._gen = generator
        self.monotone_from = monotone_from
        self._ks = tuple(ks)
        self._lock = threading.Lock()
        self._validate(self._ks)

    # -- construction helpers ------------------------------------------------
    def _validate(self, ks):
        if not ks or ks[0] != 0:
            raise SchemeError("k_0 must be 0")
        for a, b in zip(ks, ks[1:]):
            if not b > a:
                raise SchemeError(f"k_r must be strictly increasing (got {a} then {b})")
        if self._gen is not None:
            h = np.diff(ks)
            start = max(self.monotone_from, 1) - 1
            tail = h[start:]
            if tail.size > 1 and np.any(np.diff(tail) < 0):
                bad = int(np.argmax(np.diff(tail) < 0)) + start + 2
                raise SchemeError(f"block widths must be non-decreasing from r={self.monotone_from}; "
                                  f"h_{bad} < h_{bad - 1}")

    @property
    def asymptotics(self) -> str:
        return "asserted by user" if self._gen is None else "closed form"

    @property
    def cached_horizon(self) -> int:
        return len(self._ks) - 1

    def ensure(self, R: int) -> None:
        if R <= self.cached_horizon:
            return
        if self._gen is None:
            raise SchemeError(f"explicit scheme only defines blocks up to r={self.cached_horizon}, asked for {R}")
        with self._lock:
            if R <= self.cached_horizon:
                return
            ks = [0] + [self._gen(r) for r in range(1, R + 1)]
            self._validate(ks)
            self._ks = tuple(ks)

    def ks(self, R: int) -> np.ndarray:
        """``k_0 .. k_R`` as an int64 array."""
        self.ensure(R)
        return np.asarray(self._ks[: R + 1], dtype=np.int64)

    def k(self, r: int) -> int:
        self.ensure(r)
        return self._ks[r]

    def widths(self, R: int) -> np.ndarray:
        return np.diff(self.ks(R))

    def growth_witnessed(self, R: int) -> bool:
        """Finite-horizon surrogate for ``h_r -> inf``: ``h_R > h_1``."""
        h = self.widths(R)
        return bool(h[-1] > h[0])

    def block_of(self, k: int, R: int) -> int:
        """Block index r with ``k in J_r`` (requires ``k <= k_R``)."""
        ks = self.ks(R)
        if not 1 <= k <= ks[-1]:
            raise SchemeError(f"index {k} outside (0, k_{R}]")
        return int(np.searchsorted(ks, k, side="left"))

    def describe(self) -> dict:
        return {"kind": self.kind, **self.params}

    def __repr__(self):
        return f"LacunaryScheme({self.kind}, {self.params})"


def _geometric(rho: float, c: float) -> Callable[[int], int]:
    def gen(r: int) -> int:
        # the rounding guard keeps exact powers such as 2**r from drifting up
        return int(math.ceil(round(c * rho ** r, 9)))
    return gen


def _polynomial(p: int) -> Callable[[int], int]:
    return lambda r: r ** p


def make_scheme(desc: dict, horizon: int = DEFAULT_HORIZON) -> LacunaryScheme:
    """Build a scheme from a descriptor.

    ``{"kind": "geometric", "rho": 2.0, "c": 1.0}`` gives ``k_r = ceil(c rho^r)``
    for r >= 1; ``{"kind": "polynomial", "p": 2}`` gives ``k_r = r^p``;
    ``{"kind": "explicit", "ks": [0, 2, 4, 8]}`` lists the prefix directly.
    An optional ``"monotone_from"`` declares where widths start growing.
    """
    kind = desc.get("kind")
    mono = int(desc.get("monotone_from", 1))
    if kind == "explicit":
        ks = desc.get("ks")
        if not isinstance(ks, (list, tuple)) or not all(isinstance(k, int) and k >= 0 for k in ks):
            raise SchemeError("explicit scheme needs 'ks': a list of non-negative integers")
        return LacunaryScheme("explicit", {"ks": list(ks)}, list(ks), None, mono)
    if kind == "geometric":
        rho = float(desc.get("rho", 2.0))
        c = float(desc.get("c", 1.0))
        if rho <= 1 or c <= 0:
            raise SchemeError("geometric scheme needs rho > 1 and c > 0")
        gen = _geometric(rho, c)
        params = {"rho": rho, "c": c}
    elif kind == "polynomial":
        p = desc.get("p", 2)
        if not isinstance(p, int) or p < 1:
            raise SchemeError("polynomial scheme needs an integer p >= 1")
        gen = _polynomial(p)
        params = {"p": p}
    else:
        raise SchemeError(f"unknown scheme kind {kind!r}")
    if mono != 1:
        params["monotone_from"] = mono
    ks = [0] + [gen(r) for r in range(1, horizon + 1)]
    return LacunaryScheme(kind, params, ks, gen, mono)


def block_range(theta: LacunaryScheme, r: int) -> tuple[int, int]:
    """``(k_{r-1}, k_r)``: block r holds the integers ``lo < k <= hi``."""
    if r < 1:
        raise SchemeError("block index r must be >= 1")
    theta.ensure(r)
    return theta.k(r - 1), theta.k(r)


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------


class SequenceSource:
    """A deterministic sequence ``k -> x_k`` in R^dim, indexed from 1.

    ``batch`` (optional) maps an int64 array of indices to an ``(n, dim)``
    array and is used for bulk evaluation; otherwise ``fn`` is called per
    index. Values are memoised as a growing prefix array.
    """

    def __init__(self, fn: Callable[[int], object] | None = None, *, dim: int = 1,
                 batch: Callable[[np.ndarray], np.ndarray] | None = None, label: str = ""):
        if fn is None and batch is None:
            raise ValueError("need fn or batch")
        self.fn = fn
        self.batch = batch
        self.dim = dim
        self.label = label
        self._cache = np.empty((0, dim))

    def _compute(self, ks: np.ndarray) -> np.ndarray:
        if self.batch is not None:
            out = np.asarray(self.batch(ks), dtype=float).reshape(len(ks), self.dim)
        else:
            out = np.array([as_point(self.fn(int(k)), self.dim) for k in ks]).reshape(len(ks), self.dim)
        return out

    def __call__(self, k: int) -> np.ndarray:
        if k < 1:
            raise IndexError("sequences are indexed from k = 1")
        if k <= len(self._cache):
            return self._cache[k - 1].copy()
        return self._compute(np.array([k], dtype=np.int64))[0]

    def values(self, n: int) -> np.ndarray:
        """``x_1 .. x_n`` as an ``(n, dim)`` read-only array."""
        cache = self._cache
        if n > len(cache):
            new = self._compute(np.arange(1, n + 1, dtype=np.int64))
            new.setflags(write=False)
            # whole-array swap: concurrent fills compute identical prefixes
            self._cache = cache = new
        return cache[:n]

    def block(self, lo: int, hi: int) -> np.ndarray:
        return self.values(hi)[lo:hi]

    def scalar_values(self, n: int) -> np.ndarray:
        if self.dim != 1:
            raise ValueError("scalar view needs a one-dimensional sequence")
        return self.values(n)[:, 0]

    def __repr__(self):
        return f"SequenceSource({self.label or '?'}, dim={self.dim})"


def is_square(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=np.int64)
    r = np.floor(np.sqrt(k.astype(float))).astype(np.int64)
    r = np.where(r * r > k, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= k, r + 1, r)
    return r * r == k


def squares_indicator(value: float = 1.0, base: float = 0.0) -> SequenceSource:
    """``x_k = value`` when k is a perfect square, ``base`` otherwise."""
    return SequenceSource(batch=lambda ks: np.where(is_square(ks), value, base)[:, None],
                          label="indicator-of-squares")


def constant(c) -> SequenceSource:
    p = as_point(c)
    return SequenceSource(batch=lambda ks: np.broadcast_to(p, (len(ks), p.size)).copy(),
                          dim=p.size, label=f"constant {p.tolist()}")


def alternating(amplitude: float = 1.0) -> SequenceSource:
    """``x_k = amplitude * (-1)^k``."""
    return SequenceSource(batch=lambda ks: (amplitude * np.where(ks % 2 == 0, 1.0, -1.0))[:, None],
                          label="alternating")


def reciprocal(scale: float = 1.0, dim: int = 1) -> SequenceSource:
    """``x_k = (scale / k, 0, ..., 0)``."""
    def batch(ks):
        out = np.zeros((len(ks), dim))
        out[:, 0] = scale / ks
        return out
    return SequenceSource(batch=batch, dim=dim, label="reciprocal")


def linear(slope: float = 1.0) -> SequenceSource:
    """``x_k = slope * k``; unbounded, handy as a non-Cauchy example."""
    return SequenceSource(batch=lambda ks: (slope * ks.astype(float))[:, None], label="linear")


def from_array(values: np.ndarray, label: str = "array") -> SequenceSource:
    """Sequence backed by a precomputed ``(n, dim)`` array; ``x_k = values[k-1]``."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    arr = arr.copy()
    arr.setflags(write=False)

    def batch(ks):
        if len(ks) and ks.max() > len(arr):
            raise IndexError(f"sequence {label!r} only defined up to k={len(arr)}")
        return arr[ks - 1]
    return SequenceSource(batch=batch, dim=arr.shape[1], label=label)


# ---------------------------------------------------------------------------
# block averages
# ---------------------------------------------------------------------------


def nu_sequence(seq: SequenceSource, space: PNSpace, L, eps: float, n: int) -> np.ndarray:
    """``nu_{x_k - L}(eps)`` for k = 1..n."""
    Lp = space.point(L)
    return space.nu(seq.values(n) - Lp, eps)


def distance_norms(seq: SequenceSource, space: PNSpace, L, n: int) -> np.ndarray:
    """Crisp norms ``|x_k - L|`` for k = 1..n; nu depends on x_k - L only through these."""
    return space.norm(seq.values(n) - space.point(L))


def block_means(values: np.ndarray, ks: np.ndarray) -> np.ndarray:
    """Mean of ``values`` (indexed from k = 1) over each block given by ``ks``."""
    sums = np.add.reduceat(values[: ks[-1]], ks[:-1])
    return sums / np.diff(ks)


def block_averages(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme, L, eps: float,
                   R: int) -> np.ndarray:
    """Block averages of ``nu_{x_k - L}(eps)`` for r = 1..R."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    ks = theta.ks(R)
    return block_means(nu_sequence(seq, space, L, eps, int(ks[-1])), ks)


def block_average(seq: SequenceSource, space: PNSpace, theta: LacunaryScheme, r: int, L,
                  eps: float) -> float:
    if not eps > 0:
        raise ValueError("eps must be positive")
    lo, hi = block_range(theta, r)
    vals = space.nu(seq.block(lo, hi) - space.point(L), eps)
    return float(np.sum(vals) / (hi - lo))


__all__ = [
    "SchemeError", "LacunaryScheme", "make_scheme", "block_range", "SequenceSource",
    "is_square", "squares_indicator", "constant", "alternating", "reciprocal", "linear",
    "from_array", "nu_sequence", "distance_norms", "block_means", "block_averages", "block_average",
    "DEFAULT_HORIZON",
]
