"""Index sets, three-valued verdicts and finite-horizon ideal oracles.

Membership of an infinite set in an ideal cannot be decided from a prefix,
so every oracle answers with a :class:`Verdict` whose status is ``Holds``
(member), ``Fails`` (not a member) or ``Inconclusive``, together with the
evidence that produced it.

All admissible oracles share two structural rules for sets observed up to a
horizon ``n >= 4``:

* finite evidence: no member in the final quarter ``(floor(3n/4), n]``. The
  set looks finite, and finite sets belong to every admissible ideal.
* cofinite evidence: every index of the final quarter is a member. The set
  looks cofinite, and no cofinite set belongs to a non-trivial admissible
  ideal.

Anything else is handed to the oracle-specific rule.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .algebra import AxiomReport, AxiomResult

MIN_EVIDENCE_HORIZON = 4

EXPLICIT = "explicit"
PREDICATE = "predicate"
BLOCKS = "blocks"


class Status(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


HOLDS, FAILS, INCONCLUSIVE = Status.HOLDS, Status.FAILS, Status.INCONCLUSIVE


@dataclass(frozen=True)
class Verdict:
    """A three-valued answer with its evidence trail.

    For membership queries ``Holds`` means "is a member".
    """

    status: Status
    evidence: dict
    horizon: int | None = None
    query: str = ""

    def __post_init__(self):
        if self.status is not INCONCLUSIVE and not self.evidence:
            raise ValueError("a decisive verdict must carry evidence")

    @property
    def member(self) -> bool:
        return self.status is HOLDS

    def with_query(self, query: str) -> "Verdict":
        return Verdict(self.status, self.evidence, self.horizon, query)


# ---------------------------------------------------------------------------
# index sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IndexSet:
    """A subset of the positive integers.

    ``explicit`` sets are finite and fully known. ``predicate`` sets are
    given by a vectorised rule (int64 array -> bool array) over all of N.
    ``blocks`` sets are observations of block indices r <= ``horizon``;
    nothing is known past the horizon.
    """

    kind: str
    members: tuple[int, ...] = ()
    predicate: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    horizon: int | None = None
    label: str = ""

    # -- constructors --------------------------------------------------------
    @classmethod
    def explicit(cls, items: Iterable[int], label: str = "") -> "IndexSet":
        m = tuple(sorted({int(i) for i in items}))
        if m and m[0] < 1:
            raise ValueError("index sets live in the positive integers")
        return cls(EXPLICIT, m, label=label)

    @classmethod
    def where(cls, predicate: Callable[[np.ndarray], np.ndarray], label: str = "") -> "IndexSet":
        return cls(PREDICATE, predicate=predicate, label=label)

    @classmethod
    def blocks(cls, rs: Iterable[int], R: int, label: str = "") -> "IndexSet":
        m = tuple(sorted({int(r) for r in rs}))
        if m and (m[0] < 1 or m[-1] > R):
            raise ValueError(f"block indices must lie in [1, {R}]")
        return cls(BLOCKS, m, horizon=int(R), label=label)

    @classmethod
    def blocks_from_mask(cls, mask: np.ndarray, label: str = "") -> "IndexSet":
        mask = np.asarray(mask, dtype=bool)
        return cls.blocks((np.flatnonzero(mask) + 1).tolist(), mask.size, label)

    # -- queries -------------------------------------------------------------
    @property
    def universe(self) -> str:
        return "block" if self.kind == BLOCKS else "index"

    def mask(self, n: int) -> np.ndarray:
        """Membership of 1..n as a bool array."""
        if self.kind == PREDICATE:
            return np.asarray(self.predicate(np.arange(1, n + 1, dtype=np.int64)), dtype=bool)
        if self.kind == BLOCKS and n > self.horizon:
            raise ValueError(f"block set observed only up to r={self.horizon}")
        out = np.zeros(n, dtype=bool)
        m = np.asarray([i for i in self.members if i <= n], dtype=np.int64)
        out[m - 1] = True
        return out

    def observed(self, n: int) -> np.ndarray:
        return np.flatnonzero(self.mask(n)) + 1

    def count(self, n: int) -> int:
        return int(np.count_nonzero(self.mask(n)))

    def test(self, ks: np.ndarray) -> np.ndarray:
        """Vectorised membership for an int64 array of indices."""
        return _member_mask(self, np.asarray(ks, dtype=np.int64))

    def contains(self, k: int) -> bool:
        if self.kind == PREDICATE:
            return bool(self.predicate(np.array([k], dtype=np.int64))[0])
        return k in self.members

    def complement(self) -> "IndexSet":
        label = f"N - {self.label}" if self.label else ""
        if self.kind == BLOCKS:
            rs = set(self.members)
            return IndexSet.blocks([r for r in range(1, self.horizon + 1) if r not in rs], self.horizon, label)
        if self.kind == PREDICATE:
            p = self.predicate
            return IndexSet.where(lambda k: ~np.asarray(p(k), dtype=bool), label)
        m = np.asarray(self.members, dtype=np.int64)
        return IndexSet.where(lambda k: ~np.isin(k, m), label)

    def union(self, other: "IndexSet") -> "IndexSet":
        if self.kind == other.kind == EXPLICIT:
            return IndexSet.explicit(set(self.members) | set(other.members))
        if self.kind == other.kind == BLOCKS and self.horizon == other.horizon:
            return IndexSet.blocks(set(self.members) | set(other.members), self.horizon)
        a, b = self, other
        return IndexSet.where(lambda k: _member_mask(a, k) | _member_mask(b, k))

    def __len__(self):
        if self.kind == PREDICATE:
            raise TypeError("predicate sets have no finite length")
        return len(self.members)


def _member_mask(E: IndexSet, k: np.ndarray) -> np.ndarray:
    if E.kind == PREDICATE:
        return np.asarray(E.predicate(k), dtype=bool)
    return np.isin(k, np.asarray(E.members, dtype=np.int64))


def squares() -> IndexSet:
    from .lacunary import is_square
    return IndexSet.where(is_square, "squares")


def evens() -> IndexSet:
    return IndexSet.where(lambda k: k % 2 == 0, "evens")


def naturals() -> IndexSet:
    return IndexSet.where(lambda k: np.ones(len(k), dtype=bool), "N")


def natural_density(E: IndexSet, n: int) -> Fraction:
    """``|E cap [1, n]| / n`` as an exact rational."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction(E.count(n), n)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def _tail_cut(n: int) -> int:
    return (3 * n) // 4


@dataclass(frozen=True)
class IdealOracle:
    """Base class: the structural finite/cofinite rules for admissible ideals."""

    horizon: int = 10**6
    kind = "abstract"

    def cut(self, n: int) -> int:
        return _tail_cut(n)

    def decide(self, E: IndexSet) -> Verdict:
        if E.kind == EXPLICIT:
            if not E.members:
                return Verdict(HOLDS, {"rule": "empty set"}, None)
            return Verdict(HOLDS, {"rule": "finite set", "size": len(E.members),
                                   "max": E.members[-1]}, None)
        n = E.horizon if E.kind == BLOCKS else self.horizon
        members = E.observed(n)
        ev = {"universe": E.universe, "horizon": n, "count": int(members.size)}
        if n < MIN_EVIDENCE_HORIZON:
            return Verdict(INCONCLUSIVE, {**ev, "rule": f"horizon below {MIN_EVIDENCE_HORIZON}"}, n)
        cut = self.cut(n)
        last = int(members[-1]) if members.size else None
        if last is None or last <= cut:
            return Verdict(HOLDS, {**ev, "rule": "finite evidence", "last_member": last, "cut": cut}, n)
        in_tail = int(np.count_nonzero(members > cut))
        if in_tail == n - cut:
            return Verdict(FAILS, {**ev, "rule": "cofinite evidence", "cut": cut}, n)
        return self.decide_observed(E, members, n, {**ev, "last_member": last, "cut": cut})

    def decide_observed(self, E: IndexSet, members: np.ndarray, n: int, ev: dict) -> Verdict:
        return Verdict(INCONCLUSIVE, {**ev, "rule": "no oracle-specific rule"}, n)

    def describe(self) -> dict:
        return {"kind": self.kind, "horizon": self.horizon}


@dataclass(frozen=True)
class FiniteIdeal(IdealOracle):
    """The ideal of finite sets.

    A predicate set is a member when it has no members in ``(bound, horizon]``.
    For short (block) horizons at or below the bound, the final-quarter rule
    is used instead.
    """

    bound: int = 100_000
    kind = "finite"

    def cut(self, n: int) -> int:
        return self.bound if self.bound < n else _tail_cut(n)

    def decide_observed(self, E, members, n, ev):
        return Verdict(INCONCLUSIVE, {**ev, "rule": "members beyond bound"}, n)

    def describe(self):
        return {"kind": self.kind, "bound": self.bound, "horizon": self.horizon}


def checkpoints(n: int, count: int = 3) -> list[int]:
    """Distinct prefix lengths ``ceil(n / 10^j)`` for j = count-1 .. 0."""
    return sorted({-(-n // 10**j) for j in range(count - 1, -1, -1)})


@dataclass(frozen=True)
class DensityIdeal(IdealOracle):
    """The ideal of natural-density-zero sets.

    Member: prefix densities at every checkpoint are at most ``tol``.
    Not a member: the final density exceeds ``2 * tol`` and densities over the
    last half of the checkpoints do not decrease by more than ``slack``
    (default ``tol / 2``). Densities in between are Inconclusive.
    """

    tol: float = 0.01
    n_checkpoints: int = 3
    slack: float | None = None
    kind = "density"

    def decide_observed(self, E, members, n, ev):
        cps = checkpoints(n, self.n_checkpoints)
        if len(cps) < self.n_checkpoints:
            return Verdict(INCONCLUSIVE, {**ev, "rule": "too few checkpoints", "checkpoints": cps}, n)
        dens = [Fraction(int(np.searchsorted(members, c, side="right")), c) for c in cps]
        tol = Fraction(str(self.tol))
        slack = tol / 2 if self.slack is None else Fraction(str(self.slack))
        ev = {**ev, "density_trace": [(c, float(d)) for c, d in zip(cps, dens)]}
        if all(d <= tol for d in dens):
            return Verdict(HOLDS, {**ev, "rule": "density below tol"}, n)
        tail = dens[len(dens) // 2:]
        steady = all(b >= a - slack for a, b in zip(tail, tail[1:]))
        if dens[-1] > 2 * tol and steady:
            return Verdict(FAILS, {**ev, "rule": "density above 2*tol"}, n)
        return Verdict(INCONCLUSIVE, {**ev, "rule": "separation band"}, n)

    def describe(self):
        return {"kind": self.kind, "horizon": self.horizon, "tol": self.tol}


@dataclass(frozen=True)
class CustomIdeal(IdealOracle):
    """A user-supplied rule on the observed members.

    ``rule`` maps a frozenset of members to True (member), False or None
    (undecided). No structural shortcuts are applied, which makes this the
    tool for building deliberately broken oracles.
    """

    rule: Callable[[frozenset], bool | None] = field(default=lambda s: None)
    kind = "custom"

    def decide(self, E: IndexSet) -> Verdict:
        if E.kind == EXPLICIT:
            items, n = frozenset(E.members), None
        else:
            n = E.horizon if E.kind == BLOCKS else self.horizon
            items = frozenset(E.observed(n).tolist())
        ans = self.rule(items)
        ev = {"rule": "custom", "size": len(items)}
        if ans is None:
            return Verdict(INCONCLUSIVE, ev, n)
        return Verdict(HOLDS if ans else FAILS, ev, n)


def ideal_contains(oracle: IdealOracle, E: IndexSet) -> Verdict:
    return oracle.decide(E).with_query(f"{E.label or 'E'} in I")


def filter_contains(oracle: IdealOracle, E: IndexSet) -> Verdict:
    """Membership in the dual filter, decided on the complement."""
    v = oracle.decide(E.complement())
    return v.with_query(f"{E.label or 'E'} in F(I)")


def oracle_from_descriptor(desc: dict) -> IdealOracle:
    kind = desc.get("kind")
    if kind == "density":
        return DensityIdeal(horizon=int(desc.get("horizon", 10**6)), tol=float(desc.get("tol", 0.01)))
    if kind == "finite":
        return FiniteIdeal(horizon=int(desc.get("horizon", 10**6)), bound=int(desc.get("bound", 100_000)))
    raise ValueError(f"unknown oracle kind {kind!r}")


# ---------------------------------------------------------------------------
# axiom checks on a finite universe
# ---------------------------------------------------------------------------


def _subsets(items: tuple[int, ...]):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _witness(bad: list):
    if not bad:
        return None
    w = bad[0]
    if isinstance(w, frozenset):
        return tuple(sorted(w))
    return tuple(tuple(sorted(x)) for x in w)


def random_pairs(universe: IndexSet, n: int = 200, seed: int = 0) -> list[tuple[frozenset, frozenset]]:
    rng = random.Random(seed)
    u = universe.members
    out = []
    for _ in range(n):
        a = frozenset(x for x in u if rng.random() < 0.4)
        b = frozenset(x for x in u if rng.random() < 0.4)
        out.append((a, b))
    return out


def check_ideal_axioms(oracle: IdealOracle, universe: IndexSet,
                       samples: Iterable[tuple[Iterable[int], Iterable[int]]] | None = None) -> AxiomReport:
    """Check empty-set membership, union closure, subset closure and
    admissibility (singletons) on subsets of a finite universe.

    Deviations count violations; witnesses are the first offending sets.
    """
    if universe.kind != EXPLICIT or len(universe.members) > 20:
        raise ValueError("universe must be an explicit set with at most 20 elements")
    u = set(universe.members)
    pairs = random_pairs(universe) if samples is None else [
        (frozenset(a) & u, frozenset(b) & u) for a, b in samples]

    cache: dict[frozenset, bool] = {}

    def member(s: frozenset) -> bool:
        if s not in cache:
            cache[s] = ideal_contains(oracle, IndexSet.explicit(s)).member
        return cache[s]

    def result(name, bad):
        return AxiomResult(name, not bad, float(len(bad)), _witness(bad))

    empty_bad = [] if member(frozenset()) else [frozenset()]
    union_bad, subset_bad = [], []
    for a, b in pairs:
        if member(a) and member(b) and not member(a | b):
            union_bad.append((a, b))
        for s in (a, b):
            if not member(s):
                continue
            subs = _subsets(tuple(sorted(s))) if len(s) <= 10 else \
                [tuple(sorted(s - {x})) for x in s] + [tuple(sorted(a & b))]
            for sub in subs:
                if not member(frozenset(sub)):
                    subset_bad.append(frozenset(sub))
                    break
    adm_bad = [frozenset({x}) for x in sorted(u) if not member(frozenset({x}))]
    return AxiomReport((
        result("empty", empty_bad),
        result("union", union_bad),
        result("subset", subset_bad),
        result("admissible", adm_bad),
    ))


__all__ = [
    "Status", "HOLDS", "FAILS", "INCONCLUSIVE", "Verdict", "IndexSet", "squares", "evens",
    "naturals", "natural_density", "IdealOracle", "FiniteIdeal", "DensityIdeal", "CustomIdeal",
    "ideal_contains", "filter_contains", "oracle_from_descriptor", "checkpoints",
    "check_ideal_axioms", "random_pairs", "MIN_EVIDENCE_HORIZON",
]
