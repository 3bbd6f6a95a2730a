"""Desk-scale online matrix completion: exploration, zero-padded completions,
and solution reduction.

No general rank minimizer lives here (that problem is NP-hard); the module
only constructs feasible completions, reduces arbitrary feasible solutions
onto their majority block, and verifies rank relations on matrices small
enough to check directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .matrix import GroupPartition, RatingsMatrix, numeric_rank_of


@dataclass(frozen=True)
class ObservedSet:
    """Set of (user, item) pairs whose ratings the learner has seen."""

    rows: int
    cols: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        pairs = frozenset((int(u), int(i)) for u, i in self.pairs)
        for u, i in pairs:
            if not (0 <= u < self.rows and 0 <= i < self.cols):
                raise ValueError(f"pair ({u}, {i}) outside a {self.rows}x{self.cols} grid")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class PartialMatrix:
    """Known entries on an observation mask; everything else is unknown."""

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        m = np.ascontiguousarray(self.mask, dtype=bool)
        if v.shape != m.shape or v.ndim != 2:
            raise ValueError("values and mask must be equal-shape 2-D arrays")
        v = v.copy()
        v[~m] = 0.0
        v.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_full(cls, R_star: RatingsMatrix, omega: ObservedSet) -> "PartialMatrix":
        if (omega.rows, omega.cols) != R_star.shape:
            raise ValueError("observation grid does not match the matrix")
        mask = np.zeros(R_star.shape, dtype=bool)
        for u, i in omega.pairs:
            mask[u, i] = True
        return cls(values=np.where(mask, R_star.entries, 0.0), mask=mask)

    @classmethod
    def from_triples(cls, rows: int, cols: int, triples) -> "PartialMatrix":
        values = np.zeros((rows, cols))
        mask = np.zeros((rows, cols), dtype=bool)
        for u, i, r in triples:
            u, i = int(u), int(i)
            if mask[u, i]:
                raise ValueError(f"duplicate observation at ({u}, {i})")
            mask[u, i] = True
            values[u, i] = float(r)
        return cls(values=values, mask=mask)

    @property
    def observed(self) -> ObservedSet:
        pairs = frozenset((int(u), int(i)) for u, i in zip(*np.nonzero(self.mask)))
        return ObservedSet(rows=self.mask.shape[0], cols=self.mask.shape[1], pairs=pairs)

    def feasible(self, X: RatingsMatrix) -> bool:
        """True when X matches every known entry exactly."""
        if X.shape != self.values.shape:
            return False
        return bool(np.all(X.entries[self.mask] == self.values[self.mask]))


def load_partial_json(path) -> PartialMatrix:
    """Read {"rows", "cols", "observed": [[u, i, value], ...]} into a PartialMatrix."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return PartialMatrix.from_triples(doc["rows"], doc["cols"], doc["observed"])


def save_partial_json(path, partial: PartialMatrix) -> None:
    rows, cols = partial.values.shape
    triples = [
        [int(u), int(i), float(partial.values[u, i])]
        for u, i in sorted(zip(*np.nonzero(partial.mask)))
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"rows": rows, "cols": cols, "observed": triples}, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Exploration
# ---------------------------------------------------------------------------

def explore(R_star: RatingsMatrix, rounds: int, per_round: int, seed: int) -> ObservedSet:
    """Query rounds*per_round distinct cells uniformly at random.

    The rounds/per_round split is a query budget only; draws are uniform
    without replacement over the whole grid and deterministic under seed.
    """
    m, n = R_star.shape
    total = rounds * per_round
    if total > m * n:
        raise ValueError(f"requested {total} cells from a grid of {m * n}")
    rng = np.random.default_rng(seed)
    flat = rng.choice(m * n, size=total, replace=False)
    pairs = frozenset((int(f // n), int(f % n)) for f in flat)
    return ObservedSet(rows=m, cols=n, pairs=pairs)


def explore_per_user(R_star: RatingsMatrix, per_user: int, seed: int) -> ObservedSet:
    """Query per_user distinct items for every user, uniformly per row."""
    m, n = R_star.shape
    if not 0 <= per_user <= n:
        raise ValueError(f"per_user must be in [0, {n}], got {per_user}")
    rng = np.random.default_rng(seed)
    pairs = set()
    for u in range(m):
        for i in rng.choice(n, size=per_user, replace=False):
            pairs.add((u, int(i)))
    return ObservedSet(rows=m, cols=n, pairs=frozenset(pairs))


# ---------------------------------------------------------------------------
# Completion and reduction
# ---------------------------------------------------------------------------

def observed_minority_block_zero(
    omega: ObservedSet, R_star: RatingsMatrix, p: GroupPartition
) -> bool:
    """True iff every observed minority-user x minority-item rating is zero.

    This is the hypothesis under which zero-padding the majority block is a
    sparsest completion; an empty observation set satisfies it vacuously.
    """
    if (omega.rows, omega.cols) != R_star.shape:
        raise ValueError("observation grid does not match the matrix")
    for u, i in omega.pairs:
        if u in p.minority_users and i in p.minority_items:
            if R_star.entries[u, i] != 0.0:
                return False
    return True


def sparsest_majority_completion(
    partial: PartialMatrix, p: GroupPartition
) -> RatingsMatrix:
    """Zero-fill completion: known entries kept, every unknown set to zero.

    Under the zero-observation hypothesis all minority columns (and minority
    rows) end up identically zero, so the result's numeric rank equals that
    of its completed majority block; this is asserted. Raises ValueError when
    an observed entry contradicts the hypothesis or the cross-block zeros.
    """
    m, n = partial.values.shape
    maj_u, min_u = sorted(p.majority_users), sorted(p.minority_users)
    maj_i, min_i = sorted(p.majority_items), sorted(p.minority_items)
    if set(maj_u) | set(min_u) != set(range(m)) or set(maj_i) | set(min_i) != set(range(n)):
        raise ValueError("partition does not cover the grid")
    mask, vals = partial.mask, partial.values
    for rows, cols, what in (
        (min_u, min_i, "minority-block"),
        (maj_u, min_i, "majority-user/minority-item"),
        (min_u, maj_i, "minority-user/majority-item"),
    ):
        if rows and cols:
            sub_m = mask[np.ix_(rows, cols)]
            sub_v = vals[np.ix_(rows, cols)]
            if np.any(sub_m & (sub_v != 0.0)):
                raise ValueError(f"observed nonzero {what} entry; zero-padding is infeasible")
    X = np.where(mask, vals, 0.0)
    out = RatingsMatrix(X, nonnegative=bool(np.all(X >= 0)))
    block = X[np.ix_(maj_u, maj_i)] if maj_u and maj_i else np.zeros((0, 0))
    if numeric_rank_of(X) != numeric_rank_of(block):
        raise AssertionError("completion rank differs from its majority block rank")
    return out


def reduce_solution(X: RatingsMatrix, p: GroupPartition) -> RatingsMatrix:
    """Zero every block except majority-user x majority-item.

    The surviving block is a submatrix of X, so the numeric rank can only
    stay or drop; feasibility is preserved whenever X was feasible for an
    observation set satisfying the zero-observation hypothesis.
    """
    out = X.entries.copy()
    min_u = sorted(p.minority_users)
    min_i = sorted(p.minority_items)
    if min_i:
        out[:, min_i] = 0.0
    if min_u:
        out[min_u, :] = 0.0
    return RatingsMatrix(out, nonnegative=bool(np.all(out >= 0)))


# ---------------------------------------------------------------------------
# Monte Carlo on per-user exploration
# ---------------------------------------------------------------------------

def miss_probability_mc(
    R_star: RatingsMatrix,
    p: GroupPartition,
    per_user: int,
    trials: int,
    seed: int,
) -> float:
    """Empirical probability that per-user exploration satisfies the
    zero-observation hypothesis.

    Each trial samples per_user items for every user (uniform subsets per
    row); the event holds iff no positive minority-block entry is queried.
    Vectorized with the random-key trick: a row's sampled subset is the
    per_user smallest of n iid uniform keys, which is a uniform subset.
    """
    m, n = R_star.shape
    if not 0 <= per_user <= n:
        raise ValueError(f"per_user must be in [0, {n}], got {per_user}")
    hot: list[tuple[int, int]] = [
        (u, i)
        for u in sorted(p.minority_users)
        for i in sorted(p.minority_items)
        if R_star.entries[u, i] != 0.0
    ]
    if not hot:
        return 1.0
    hot_users = sorted({u for u, _ in hot})
    row_of = {u: r for r, u in enumerate(hot_users)}
    rng = np.random.default_rng(seed)
    ok = np.ones(trials, dtype=bool)
    keys = rng.random((trials, len(hot_users), n))
    for u, i in hot:
        r = row_of[u]
        # rank of the key at column i within its row; sampled iff among the
        # per_user smallest
        rank = (keys[:, r, :] < keys[:, r, i : i + 1]).sum(axis=1)
        ok &= rank >= per_user
    return float(ok.mean())


__all__ = [
    "ObservedSet",
    "PartialMatrix",
    "load_partial_json",
    "save_partial_json",
    "explore",
    "explore_per_user",
    "observed_minority_block_zero",
    "sparsest_majority_completion",
    "reduce_solution",
    "miss_probability_mc",
]
