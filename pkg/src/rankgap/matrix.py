"""Dense ratings matrices, group partitions, and singular-value structure.

Everything in this module is a pure function of immutable inputs. Matrices
are dense float64 arrays; the scale in scope is at most a few thousand rows
and columns, so no sparse formats are used.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

# A singular value counts toward the numeric rank iff it exceeds this
# fraction of the largest singular value.
RANK_RTOL = 1e-10

# Two ratings tie iff |a - b| <= TIE_RTOL * max(1, scale); the scale is the
# top singular value of the matrix the ratings came from.
TIE_RTOL = 1e-9

# Maximum relative Frobenius error allowed when reconstructing a matrix
# from its retained decomposition factors.
RECONSTRUCTION_RTOL = 1e-9


class PartitionError(ValueError):
    """A group partition is malformed or does not match a matrix."""


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class RatingsMatrix:
    """Dense m x n grid of user-item ratings.

    ``nonnegative`` is True for personal and revealed ratings, which live in
    R_{>=0}. Truncated estimates can carry negative entries; they are held in
    the same type with the flag set to False.
    """

    entries: np.ndarray
    nonnegative: bool = True

    def __post_init__(self) -> None:
        a = np.asarray(self.entries, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError(f"ratings must be 2-D, got shape {a.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"ratings must be at least 1x1, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("ratings must be finite")
        if self.nonnegative and np.any(a < 0):
            raise ValueError("negative rating in a matrix declared nonnegative")
        object.__setattr__(self, "entries", _as_readonly(a))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def with_entries(self, entries: np.ndarray, nonnegative: bool | None = None) -> "RatingsMatrix":
        """New matrix with the same flag unless overridden."""
        flag = self.nonnegative if nonnegative is None else nonnegative
        return RatingsMatrix(entries, nonnegative=flag)


@dataclass(frozen=True)
class GroupPartition:
    """Majority/minority split of users and items.

    The split is valid for a matrix R when the user sets partition its rows,
    the item sets partition its columns, every cross-block entry is exactly
    zero, and no user row is entirely zero.
    """

    majority_users: frozenset[int]
    minority_users: frozenset[int]
    majority_items: frozenset[int]
    minority_items: frozenset[int]

    def __post_init__(self) -> None:
        for name in ("majority_users", "minority_users", "majority_items", "minority_items"):
            object.__setattr__(self, name, frozenset(int(i) for i in getattr(self, name)))
        if self.majority_users & self.minority_users:
            raise PartitionError("user groups overlap")
        if self.majority_items & self.minority_items:
            raise PartitionError("item groups overlap")
        for name in ("majority_users", "minority_users", "majority_items", "minority_items"):
            if any(i < 0 for i in getattr(self, name)):
                raise PartitionError(f"negative index in {name}")

    @property
    def m_bar(self) -> int:
        return len(self.majority_users)

    @property
    def n_bar(self) -> int:
        return len(self.majority_items)

    def validate_for(self, R: RatingsMatrix) -> None:
        """Raise PartitionError unless this split is valid for R.

        Cross-block zero checks use exact equality: the model defines those
        entries as identically zero, not approximately so.
        """
        m, n = R.shape
        if self.majority_users | self.minority_users != frozenset(range(m)):
            raise PartitionError(f"user sets do not partition range({m})")
        if self.majority_items | self.minority_items != frozenset(range(n)):
            raise PartitionError(f"item sets do not partition range({n})")
        a = R.entries
        mu = sorted(self.majority_users)
        nu = sorted(self.minority_users)
        mi = sorted(self.majority_items)
        ni = sorted(self.minority_items)
        if mu and ni and np.any(a[np.ix_(mu, ni)] != 0.0):
            raise PartitionError("majority user rates a minority item")
        if nu and mi and np.any(a[np.ix_(nu, mi)] != 0.0):
            raise PartitionError("minority user rates a majority item")
        if np.any(a.max(axis=1, initial=0.0) <= 0.0):
            raise PartitionError("a user has no positive rating")


def block_partition(m_bar: int, n_bar: int, m: int, n: int) -> GroupPartition:
    """Canonical partition for a block-ordered matrix: first rows/cols are majority."""
    if not (0 <= m_bar <= m and 0 <= n_bar <= n):
        raise PartitionError("block sizes exceed matrix shape")
    return GroupPartition(
        majority_users=frozenset(range(m_bar)),
        minority_users=frozenset(range(m_bar, m)),
        majority_items=frozenset(range(n_bar)),
        minority_items=frozenset(range(n_bar, n)),
    )


@dataclass(frozen=True)
class SpectralSummary:
    """Full singular value decomposition with a numeric-rank cutoff.

    Factors are retained so truncations reuse the same decomposition instead
    of recomputing it.
    """

    singular_values: np.ndarray
    numeric_rank: int
    left: np.ndarray = field(repr=False)
    right_t: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "singular_values", _as_readonly(self.singular_values))
        object.__setattr__(self, "left", _as_readonly(self.left))
        object.__setattr__(self, "right_t", _as_readonly(self.right_t))

    def sigma(self, k: int) -> float:
        """k-th largest singular value, 1-indexed; zero beyond the stored ones."""
        if k < 1:
            raise ValueError(f"singular value index must be >= 1, got {k}")
        s = self.singular_values
        return float(s[k - 1]) if k <= s.size else 0.0


def spectral(R: RatingsMatrix) -> SpectralSummary:
    """Full SVD of R with descending singular values.

    The reconstruction from the retained factors is checked against R to a
    relative Frobenius error of 1e-9; failure raises ArithmeticError.
    Decomposition failures from the backend propagate as numeric errors.
    """
    a = R.entries
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    recon = (u * s) @ vt
    scale = np.linalg.norm(a)
    err = np.linalg.norm(recon - a)
    if err > RECONSTRUCTION_RTOL * max(1.0, scale):
        raise ArithmeticError(f"decomposition reconstruction error {err:.3e} exceeds tolerance")
    rank = int(np.count_nonzero(s > RANK_RTOL * (s[0] if s.size else 0.0)))
    return SpectralSummary(singular_values=s, numeric_rank=rank, left=u, right_t=vt)


def singular_values_of(a: np.ndarray) -> np.ndarray:
    """Descending singular values of a raw array; empty input gives an empty vector."""
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def numeric_rank_of(a: np.ndarray) -> int:
    s = singular_values_of(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > RANK_RTOL * s[0]))


@dataclass(frozen=True)
class OpenInterval:
    """Open interval (lower, upper); empty when the endpoints do not satisfy lower < upper.

    An upper endpoint of NaN marks an interval whose defining expression had
    no real value (for example a negative radicand); such intervals are empty
    and contain nothing.
    """

    lower: float
    upper: float

    @property
    def is_empty(self) -> bool:
        return not (self.lower < self.upper)

    def contains(self, x: float) -> bool:
        return self.lower < x < self.upper

    @property
    def midpoint(self) -> float:
        if self.is_empty:
            raise ValueError("empty interval has no midpoint")
        return 0.5 * (self.lower + self.upper)


# ---------------------------------------------------------------------------
# Norms and gaps
# ---------------------------------------------------------------------------

def matrix_l1_norm(R: RatingsMatrix) -> float:
    """Maximum column sum of the raw entries (no absolute values)."""
    return float(R.entries.sum(axis=0).max())


def column_abs_sums(R: RatingsMatrix) -> np.ndarray:
    """Per-column sum of absolute entries; the popularity measure used on estimates."""
    return np.abs(R.entries).sum(axis=0)


def _majority_block(R: RatingsMatrix, p: GroupPartition) -> np.ndarray:
    return R.entries[np.ix_(sorted(p.majority_users), sorted(p.majority_items))]


def _minority_block(R: RatingsMatrix, p: GroupPartition) -> np.ndarray:
    return R.entries[np.ix_(sorted(p.minority_users), sorted(p.minority_items))]


def singular_value_gap(R: RatingsMatrix, p: GroupPartition) -> OpenInterval:
    """Open interval between the minority block's top singular value and the
    majority block's smallest nonzero one.

    Returns an empty interval when the endpoints cross. Raises PartitionError
    when p is not valid for R or the majority block carries no mass.
    """
    p.validate_for(R)
    maj = _majority_block(R, p)
    s_maj = singular_values_of(maj)
    k_maj = numeric_rank_of(maj)
    if k_maj == 0:
        raise PartitionError("majority block has numeric rank 0")
    minor = _minority_block(R, p)
    s_min = singular_values_of(minor)
    lower = float(s_min[0]) if s_min.size else 0.0
    upper = float(s_maj[k_maj - 1])
    return OpenInterval(lower, upper)


def reorder_to_blocks(
    R: RatingsMatrix, p: GroupPartition
) -> tuple[RatingsMatrix, tuple[int, ...], tuple[int, ...]]:
    """Permute rows and columns so the majority block sits top-left.

    Returns (reordered, row_perm, col_perm) with
    ``reordered[i, j] == R[row_perm[i], col_perm[j]]``. Applying the inverse
    permutations recovers R exactly.
    """
    p.validate_for(R)
    row_perm = tuple(sorted(p.majority_users) + sorted(p.minority_users))
    col_perm = tuple(sorted(p.majority_items) + sorted(p.minority_items))
    out = R.entries[np.ix_(row_perm, col_perm)]
    return R.with_entries(out), row_perm, col_perm


def invert_permutation(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for new, old in enumerate(perm):
        inv[old] = new
    return tuple(inv)


def find_picky_items(
    R: RatingsMatrix, p: GroupPartition
) -> list[tuple[int, frozenset[int]]]:
    """Minority items rated by exactly one user group that rates nothing else.

    An item qualifies when its raters form a nonempty set and each of those
    users has zero ratings everywhere else. Returned in item-index order.
    """
    p.validate_for(R)
    a = R.entries
    out: list[tuple[int, frozenset[int]]] = []
    for i in sorted(p.minority_items):
        raters = np.flatnonzero(a[:, i] > 0.0)
        if raters.size == 0:
            continue
        rest = a[raters, :].copy()
        rest[:, i] = 0.0
        if np.any(rest != 0.0):
            continue
        out.append((i, frozenset(int(u) for u in raters)))
    return out


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

CSV_HEADER = ("user", "item", "rating")


def load_ratings_csv(path) -> tuple[RatingsMatrix, list[str], list[str]]:
    """Read a `user,item,rating` CSV into a dense matrix.

    Unseen user and item identifiers get dense indices in first-seen order.
    Unlisted pairs are zero. Duplicate (user, item) pairs are an error.

    Returns (matrix, user_labels, item_labels).
    """
    users: dict[str, int] = {}
    items: dict[str, int] = {}
    triples: list[tuple[int, int, float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(f"expected header {','.join(CSV_HEADER)!r} in {path}")
        seen: set[tuple[int, int]] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            u = users.setdefault(row[0].strip(), len(users))
            i = items.setdefault(row[1].strip(), len(items))
            if (u, i) in seen:
                raise ValueError(f"{path}:{lineno}: duplicate pair ({row[0]!r}, {row[1]!r})")
            seen.add((u, i))
            triples.append((u, i, float(row[2])))
    if not users or not items:
        raise ValueError(f"{path}: no ratings rows")
    a = np.zeros((len(users), len(items)))
    for u, i, r in triples:
        a[u, i] = r
    return RatingsMatrix(a), list(users), list(items)


def save_ratings_csv(path, R: RatingsMatrix, user_labels=None, item_labels=None) -> None:
    """Write every entry of R in row-major order; floats use repr round-tripping."""
    m, n = R.shape
    ul = [str(u) for u in range(m)] if user_labels is None else list(user_labels)
    il = [str(i) for i in range(n)] if item_labels is None else list(item_labels)
    if len(ul) != m or len(il) != n:
        raise ValueError("label counts do not match matrix shape")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for u in range(m):
            for i in range(n):
                writer.writerow([ul[u], il[i], repr(float(R.entries[u, i]))])


def tie_tolerance(scale: float) -> float:
    """Absolute tie tolerance at a given magnitude scale."""
    return TIE_RTOL * max(1.0, scale)


__all__ = [
    "RANK_RTOL",
    "TIE_RTOL",
    "RECONSTRUCTION_RTOL",
    "PartitionError",
    "RatingsMatrix",
    "GroupPartition",
    "SpectralSummary",
    "OpenInterval",
    "block_partition",
    "spectral",
    "singular_values_of",
    "numeric_rank_of",
    "matrix_l1_norm",
    "column_abs_sums",
    "singular_value_gap",
    "reorder_to_blocks",
    "invert_permutation",
    "find_picky_items",
    "load_ratings_csv",
    "save_ratings_csv",
    "tie_tolerance",
]
