"""Generalized popularity model on [0,1]-valued ratings matrices.

The block model in :mod:`rankgap.matrix` demands exact zeros across groups.
Here group structure is softer: the first ``n_bar`` columns are declared
popular, users are classed by where their row maximum lands, and every
guarantee flows from a single ratings-gap scalar computed from the spectrum
of the popular column block.  All inequalities in this module are strict and
evaluated in plain double precision; reports carry margins so near-boundary
instances are visible instead of silently flipping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .matrix import (
    OpenInterval,
    RatingsMatrix,
    numeric_rank_of,
    singular_values_of,
    spectral,
)

__all__ = [
    "PopularitySplit",
    "UserClasses",
    "ClassMembershipReport",
    "SingularBounds",
    "DeltaWindow",
    "GeneralStrategy",
    "GeneralSufficiencyReport",
    "LargerSplitCheck",
    "popular_prefs",
    "classify_users",
    "top_items",
    "ratings_gap",
    "class_membership",
    "singular_bounds_check",
    "popularity_gap_interval",
    "projection_gap_check",
    "switch_users",
    "delta_interval",
    "sigma_hat",
    "collective_ratings_gap",
    "check_general_sufficiency",
    "no_larger_nbar_check",
]


@dataclass(frozen=True)
class PopularitySplit:
    """A ratings matrix in [0,1]^(m x n) whose first ``n_bar`` columns are popular."""

    matrix: RatingsMatrix
    n_bar: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_bar", int(self.n_bar))
        n = self.matrix.cols
        if not 0 < self.n_bar < n:
            raise ValueError(f"n_bar must satisfy 0 < n_bar < {n}, got {self.n_bar}")
        a = self.matrix.entries
        if a.min() < 0.0 or a.max() > 1.0:
            raise ValueError("popularity split requires entries in [0, 1]")

    @property
    def popular_block(self) -> np.ndarray:
        return self.matrix.entries[:, : self.n_bar]

    @property
    def unpopular_block(self) -> np.ndarray:
        return self.matrix.entries[:, self.n_bar :]

    @property
    def kappa(self) -> float:
        """Largest column sum among unpopular items."""
        return float(self.unpopular_block.sum(axis=0).max())

    @property
    def kappa_lower(self) -> float:
        """Smallest column sum among unpopular items."""
        return float(self.unpopular_block.sum(axis=0).min())

    @property
    def popular_rank(self) -> int:
        return numeric_rank_of(self.popular_block)

    @property
    def sigma_popular(self) -> float:
        """The n_bar-th singular value of the popular block (0 when absent)."""
        s = singular_values_of(self.popular_block)
        if self.n_bar > s.size:
            return 0.0
        return float(s[self.n_bar - 1])


def popular_prefs(matrix: RatingsMatrix, n_bar: int) -> RatingsMatrix:
    """Copy of ``matrix`` with every unpopular column zeroed, shape preserved."""
    split = PopularitySplit(matrix, n_bar)
    out = np.array(matrix.entries, dtype=float)
    out[:, split.n_bar :] = 0.0
    return RatingsMatrix(out, nonnegative=True)


def top_items(row: np.ndarray) -> np.ndarray:
    """Indices attaining the exact row maximum, ascending."""
    row = np.asarray(row, dtype=float)
    return np.flatnonzero(row == row.max())


@dataclass(frozen=True)
class UserClasses:
    """Per-user grouping induced by where each row maximum lands.

    A user whose tied top items straddle the popular boundary appears in both
    sets; exclusivity is an assumption to check, not a structural fact.
    """

    majority: frozenset[int]
    minority: frozenset[int]

    @property
    def dual(self) -> frozenset[int]:
        return self.majority & self.minority

    @property
    def exclusive(self) -> bool:
        return not self.dual

    @property
    def has_minority(self) -> bool:
        return bool(self.minority)


def classify_users(matrix: RatingsMatrix, n_bar: int) -> UserClasses:
    """Majority users top out on a popular column, minority on an unpopular one."""
    split = PopularitySplit(matrix, n_bar)
    majority: set[int] = set()
    minority: set[int] = set()
    for u in range(matrix.rows):
        tops = top_items(matrix.entries[u])
        if tops[0] < split.n_bar:
            majority.add(u)
        if tops[-1] >= split.n_bar:
            minority.add(u)
    return UserClasses(frozenset(majority), frozenset(minority))


def ratings_gap(matrix: RatingsMatrix, n_bar: int) -> float:
    """Gap scalar 2^(5/2) * kappa * n^(3/2) / sigma^2 driving every class check.

    ``sigma`` is the n_bar-th singular value of the popular block; a popular
    block with numeric rank below n_bar leaves the gap undefined.
    """
    split = PopularitySplit(matrix, n_bar)
    if split.popular_rank < split.n_bar:
        raise ValueError("popular block has numeric rank below n_bar; gap undefined")
    n = matrix.cols
    return 2.0**2.5 * split.kappa * n**1.5 / split.sigma_popular**2


@dataclass(frozen=True)
class ClassMembershipReport:
    """Outcome of the popularity-gap class checks for one (matrix, n_bar) pair.

    ``majority_gap_ok`` holds, per majority user, whether the top rating beats
    every other rating by more than ``delta_gap``; ``minority_support_ok``
    holds, per minority user, whether some popular rating exceeds
    ``delta_gap``.  Margins are positive exactly when the matching check
    passes.  ``in_class`` requires the gap to be defined and every per-user
    check to pass; the exclusivity flags are reported alongside but are a
    separate assumption.
    """

    n_bar: int
    kappa: float
    kappa_lower: float
    sigma_popular: float
    delta_gap: float | None
    classes: UserClasses
    majority_gap_ok: dict[int, bool] = field(default_factory=dict)
    minority_support_ok: dict[int, bool] = field(default_factory=dict)
    majority_margins: dict[int, float] = field(default_factory=dict)
    minority_margins: dict[int, float] = field(default_factory=dict)
    in_class: bool = False
    popularity_inequality: bool = False
    classes_exclusive: bool = True
    has_minority: bool = False
    reason: str | None = None


def class_membership(matrix: RatingsMatrix, n_bar: int) -> ClassMembershipReport:
    """Evaluate the popularity-gap class conditions with strict inequalities."""
    split = PopularitySplit(matrix, n_bar)
    classes = classify_users(matrix, n_bar)
    n = matrix.cols
    kappa = split.kappa
    sigma = split.sigma_popular
    inequality = 2.0**1.25 * n**0.75 * math.sqrt(kappa) < sigma

    common = dict(
        n_bar=split.n_bar,
        kappa=kappa,
        kappa_lower=split.kappa_lower,
        sigma_popular=sigma,
        classes=classes,
        popularity_inequality=inequality,
        classes_exclusive=classes.exclusive,
        has_minority=classes.has_minority,
    )
    if split.popular_rank < split.n_bar:
        return ClassMembershipReport(
            delta_gap=None,
            reason="popular block has numeric rank below n_bar; gap undefined",
            **common,
        )

    delta = 2.0**2.5 * kappa * n**1.5 / sigma**2
    entries = matrix.entries
    majority_ok: dict[int, bool] = {}
    majority_margins: dict[int, float] = {}
    for u in sorted(classes.majority):
        row = entries[u]
        tops = top_items(row)
        if tops.size == n:
            # no non-top item exists, so there is no gap to speak of
            majority_ok[u] = False
            majority_margins[u] = -math.inf
            continue
        off = np.delete(row, tops)
        margin = float((row.max() - delta) - off.max())
        majority_ok[u] = margin > 0.0
        majority_margins[u] = margin

    minority_ok: dict[int, bool] = {}
    minority_margins: dict[int, float] = {}
    for u in sorted(classes.minority):
        margin = float(entries[u, : split.n_bar].max() - delta)
        minority_ok[u] = margin > 0.0
        minority_margins[u] = margin

    in_class = all(majority_ok.values()) and all(minority_ok.values())
    return ClassMembershipReport(
        delta_gap=delta,
        majority_gap_ok=majority_ok,
        minority_support_ok=minority_ok,
        majority_margins=majority_margins,
        minority_margins=minority_margins,
        in_class=in_class,
        **common,
    )


@dataclass(frozen=True)
class SingularBounds:
    """Spectrum-level consequences of class membership (non-strict bounds)."""

    sigma_nbar: float
    sigma_next: float
    lower_bound: float
    upper_bound: float

    @property
    def lower_ok(self) -> bool:
        return self.sigma_nbar >= self.lower_bound

    @property
    def upper_ok(self) -> bool:
        return self.sigma_next <= self.upper_bound


def singular_bounds_check(matrix: RatingsMatrix, n_bar: int) -> SingularBounds:
    """sigma_nbar(R) >= 2^(5/4) n^(3/4) sqrt(kappa) and sigma_{nbar+1}(R) <= sqrt((n-nbar) kappa)."""
    split = PopularitySplit(matrix, n_bar)
    summary = spectral(matrix)
    n = matrix.cols
    return SingularBounds(
        sigma_nbar=summary.sigma(split.n_bar),
        sigma_next=summary.sigma(split.n_bar + 1),
        lower_bound=2.0**1.25 * n**0.75 * math.sqrt(split.kappa),
        upper_bound=math.sqrt((n - split.n_bar) * split.kappa),
    )


def popularity_gap_interval(matrix: RatingsMatrix, n_bar: int) -> OpenInterval:
    """Tolerance window (sqrt((n-nbar) kappa), 2^(5/4) n^(3/4) sqrt(kappa)).

    Any truncation tolerance inside the window selects rank exactly ``n_bar``
    for an in-class matrix.  ``kappa`` = 0 collapses the window to the empty
    interval (0, 0).
    """
    split = PopularitySplit(matrix, n_bar)
    kappa = split.kappa
    if kappa == 0.0:
        return OpenInterval(0.0, 0.0)
    n = matrix.cols
    return OpenInterval(
        math.sqrt((n - split.n_bar) * kappa),
        2.0**1.25 * n**0.75 * math.sqrt(kappa),
    )


def projection_gap_check(matrix: RatingsMatrix, n_bar: int) -> float:
    """Frobenius distance from the rank-n_bar projector to the popular-axis projector.

    The projector is built from the top n_bar right singular directions of the
    matrix; the reference is the diagonal 0/1 matrix selecting the popular
    columns.  Callers compare the distance against ratings_gap / (2 sqrt(n)).
    """
    split = PopularitySplit(matrix, n_bar)
    summary = spectral(matrix)
    if summary.numeric_rank < split.n_bar:
        raise ValueError("matrix numeric rank is below n_bar; projector ill-defined")
    vt = summary.right_t[: split.n_bar]
    projector = vt.T @ vt
    n = matrix.cols
    reference = np.zeros((n, n))
    reference[np.arange(split.n_bar), np.arange(split.n_bar)] = 1.0
    return float(np.linalg.norm(projector - reference, "fro"))


def switch_users(matrix: RatingsMatrix, n_bar: int) -> frozenset[int]:
    """Minority users whose row maximum is attained on the first unpopular column."""
    split = PopularitySplit(matrix, n_bar)
    classes = classify_users(matrix, n_bar)
    target = split.n_bar
    out = {
        u
        for u in classes.minority
        if matrix.entries[u, target] == matrix.entries[u].max()
    }
    return frozenset(out)


@dataclass(frozen=True)
class DeltaWindow:
    """Half-open window [lower, upper) of slack values making the target worthwhile.

    ``lower`` aggregates how much the non-switching minority could lose when
    the target column turns popular; ``upper`` aggregates how much the
    switching minority stands to gain.  The underlying requirement asks for a
    strictly positive slack, so it holds exactly when the window contains a
    positive point.
    """

    lower: float
    upper: float

    @property
    def has_positive_point(self) -> bool:
        return self.upper > self.lower

    @property
    def witness(self) -> float:
        """A positive point inside the window; meaningful only when one exists."""
        return 0.5 * (self.lower + self.upper)


def delta_interval(matrix: RatingsMatrix, n_bar: int) -> DeltaWindow:
    """Feasible slack window for the worthwhile-target requirement.

    Sums range over true ratings: non-switching minority users compare their
    best and worst ratings among the popular columns plus the target, while
    switching users compare the target rating against their best popular one.
    An empty switch set yields an upper endpoint of 0, so no positive point.
    """
    split = PopularitySplit(matrix, n_bar)
    classes = classify_users(matrix, n_bar)
    switching = switch_users(matrix, n_bar)
    residual = sorted(classes.minority - switching)
    entries = matrix.entries
    nb = split.n_bar

    head = entries[residual, : nb + 1] if residual else np.zeros((0, nb + 1))
    lower = max(0.0, float(head.max(axis=1).sum() - head.min(axis=1).sum()))

    sw = sorted(switching)
    if sw:
        gain = entries[sw, nb].sum() - entries[sw, :nb].max(axis=1).sum()
    else:
        gain = 0.0
    return DeltaWindow(lower=lower, upper=float(gain))


def _validate_replacement(matrix: RatingsMatrix, column: np.ndarray) -> np.ndarray:
    column = np.asarray(column, dtype=float)
    if column.shape != (matrix.rows,):
        raise ValueError(
            f"replacement column must have shape ({matrix.rows},), got {column.shape}"
        )
    if not np.isfinite(column).all():
        raise ValueError("replacement column must be finite")
    if column.min() < 0.0 or column.max() > 1.0:
        raise ValueError("replacement column entries must lie in [0, 1]")
    return column


@dataclass(frozen=True)
class GeneralStrategy:
    """Replacement of the first unpopular column by an arbitrary [0,1] vector.

    Only users outside the minority may have their entry changed; minority
    entries must be carried over verbatim.  The realistic variant additionally
    never lowers any entry.
    """

    replacement_column: np.ndarray

    def __post_init__(self) -> None:
        column = np.asarray(self.replacement_column, dtype=float).copy()
        column.setflags(write=False)
        object.__setattr__(self, "replacement_column", column)

    def validate_for(self, matrix: RatingsMatrix, n_bar: int) -> None:
        split = PopularitySplit(matrix, n_bar)
        column = _validate_replacement(matrix, self.replacement_column)
        classes = classify_users(matrix, n_bar)
        current = matrix.entries[:, split.n_bar]
        for u in sorted(classes.minority):
            if column[u] != current[u]:
                raise ValueError(
                    f"minority user {u} must keep rating {current[u]!r} on the target column"
                )

    def is_realistic(self, matrix: RatingsMatrix, n_bar: int) -> bool:
        """True when no entry drops below its true value."""
        split = PopularitySplit(matrix, n_bar)
        column = np.asarray(self.replacement_column, dtype=float)
        return bool((column >= matrix.entries[:, split.n_bar]).all())

    def apply(self, matrix: RatingsMatrix, n_bar: int) -> RatingsMatrix:
        self.validate_for(matrix, n_bar)
        out = np.array(matrix.entries, dtype=float)
        out[:, PopularitySplit(matrix, n_bar).n_bar] = self.replacement_column
        return RatingsMatrix(out, nonnegative=True)


def sigma_hat(matrix: RatingsMatrix, n_bar: int, r_tilde: np.ndarray) -> float:
    """Closed-form lower estimate of the post-replacement (n_bar+1)-th singular value.

    sqrt(min(r~.r~, sigma_popular^2) - ||r~^T A||_2) with A the popular block.
    The estimate never exceeds the true value; a negative radicand means the
    replacement is too correlated with the popular block to certify anything.
    """
    split = PopularitySplit(matrix, n_bar)
    column = _validate_replacement(matrix, r_tilde)
    radicand = _sigma_hat_radicand(split, column)
    if radicand < 0.0:
        raise ValueError(f"estimate radicand is negative ({radicand}); no certificate")
    return math.sqrt(radicand)


def _sigma_hat_radicand(split: PopularitySplit, column: np.ndarray) -> float:
    energy = float(column @ column)
    cross = float(np.linalg.norm(column @ split.popular_block))
    return min(energy, split.sigma_popular**2) - cross


def collective_ratings_gap(
    matrix: RatingsMatrix, n_bar: int, r_tilde: np.ndarray
) -> float:
    """Gap scalar for the replaced matrix, priced from the original one.

    Uses the sigma_hat estimate in place of the true singular value and the
    largest column sum among the columns past the target.
    """
    split = PopularitySplit(matrix, n_bar)
    estimate = sigma_hat(matrix, n_bar, r_tilde)
    if estimate == 0.0:
        raise ValueError("singular value estimate is zero; gap unbounded")
    n = matrix.cols
    return 2.0**2.5 * n**1.5 * _tail_kappa(split) / estimate**2


def _tail_kappa(split: PopularitySplit) -> float:
    """Largest column sum among columns strictly past the target column."""
    tail = split.matrix.entries[:, split.n_bar + 1 :]
    if tail.shape[1] == 0:
        return 0.0
    return float(tail.sum(axis=0).max())


@dataclass(frozen=True)
class GeneralSufficiencyReport:
    """Evaluation of the five sufficient conditions for a replacement strategy.

    ``preconditions`` cover the standing assumptions on the untouched matrix
    (class membership, exclusive nonempty classes, a worthwhile nonempty
    switch set, tolerance inside the selection window).  ``conditions`` are
    the five strategy checks; entries are None when the singular value
    estimate fails so they cannot be priced.  Margins are positive exactly
    when the matching check passes.  ``alpha_above_tail`` restates a bound the
    gap precondition already implies and never gates the verdict.
    """

    preconditions: dict[str, bool]
    conditions: dict[str, bool | None]
    margins: dict[str, float]
    sigma_hat: float | None
    ratings_gap: float | None
    alpha_above_tail: bool
    verdict: bool


def check_general_sufficiency(
    matrix: RatingsMatrix,
    n_bar: int,
    r_tilde: np.ndarray,
    alpha: float,
) -> GeneralSufficiencyReport:
    """Judge one replacement strategy; passing verdicts certify a welfare gain.

    Raises on malformed inputs (shape, range, or a changed minority entry);
    failed standing assumptions are reported, never silently ignored.
    """
    alpha = float(alpha)
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    split = PopularitySplit(matrix, n_bar)
    strategy = GeneralStrategy(r_tilde)
    strategy.validate_for(matrix, n_bar)
    column = np.asarray(strategy.replacement_column, dtype=float)

    membership = class_membership(matrix, n_bar)
    classes = membership.classes
    switching = switch_users(matrix, n_bar)
    window = delta_interval(matrix, n_bar)
    interval = popularity_gap_interval(matrix, n_bar)
    preconditions = {
        "in_class": membership.in_class,
        "classes_exclusive": membership.classes_exclusive,
        "has_minority": membership.has_minority,
        "switch_nonempty": bool(switching),
        "target_sufficiently_liked": window.has_positive_point,
        "alpha_in_gap": interval.contains(alpha),
    }

    n = matrix.cols
    nb = split.n_bar
    entries = matrix.entries
    tail = _tail_kappa(split)
    tail_bound = math.sqrt((n - nb - 1) * tail)

    margins: dict[str, float] = {}
    radicand = _sigma_hat_radicand(split, column)
    margins["sigma_hat_radicand"] = radicand
    if radicand >= 0.0:
        estimate: float | None = math.sqrt(radicand)
    else:
        estimate = None
    margins["alpha_below_sigma_hat"] = (
        estimate - alpha if estimate is not None else -math.inf
    )

    gap: float | None = None
    if estimate is not None and estimate > 0.0:
        gap = 2.0**2.5 * n**1.5 * tail / estimate**2

    conditions: dict[str, bool | None] = {
        "alpha_below_sigma_hat": estimate is not None and alpha < estimate,
        "uprating_below_majority_top": None,
        "majority_gap_preserved": None,
        "switch_users_promoted": None,
        "residual_minority_supported": None,
    }

    if gap is not None:
        maj = sorted(classes.majority)
        margin = math.inf
        for u in maj:
            margin = min(margin, float((entries[u].max() - gap) - column[u]))
        conditions["uprating_below_majority_top"] = margin > 0.0
        margins["uprating_below_majority_top"] = margin

        margin = math.inf
        for u in maj:
            row = entries[u]
            tops = top_items(row)
            if tops.size == n:
                margin = -math.inf
                break
            off = np.delete(row, tops)
            margin = min(margin, float((row.max() - gap) - off.max()))
        conditions["majority_gap_preserved"] = margin > 0.0
        margins["majority_gap_preserved"] = margin

        margin = math.inf
        for u in sorted(switching):
            row = entries[u]
            tops = top_items(row)
            if tops.size == n:
                margin = -math.inf
                break
            off = np.delete(row, tops)
            margin = min(margin, float((row[nb] - gap) - off.max()))
        conditions["switch_users_promoted"] = margin > 0.0
        margins["switch_users_promoted"] = margin

        margin = math.inf
        for u in sorted(classes.minority - switching):
            margin = min(margin, float(entries[u, : nb + 1].max() - gap))
        conditions["residual_minority_supported"] = margin > 0.0
        margins["residual_minority_supported"] = margin

    margins["alpha_above_tail"] = alpha - tail_bound
    alpha_above_tail = alpha > tail_bound

    verdict = all(preconditions.values()) and all(
        value is True for value in conditions.values()
    )
    return GeneralSufficiencyReport(
        preconditions=preconditions,
        conditions=conditions,
        margins=margins,
        sigma_hat=estimate,
        ratings_gap=gap,
        alpha_above_tail=alpha_above_tail,
        verdict=verdict,
    )


@dataclass(frozen=True)
class LargerSplitCheck:
    """Whether every split larger than the given one falls out of the class.

    ``confirmed`` is None when the premise (class membership plus a floor on
    the smallest unpopular column sum) does not hold, so nothing is claimed.
    ``checked`` maps each larger split to its membership result; the full-width
    split has no unpopular columns and counts as out of class by convention.
    """

    premise_holds: bool
    confirmed: bool | None
    checked: dict[int, bool] = field(default_factory=dict)


def no_larger_nbar_check(matrix: RatingsMatrix, n_bar: int) -> LargerSplitCheck:
    """Verify that no larger popular-column count keeps the matrix in class."""
    split = PopularitySplit(matrix, n_bar)
    membership = class_membership(matrix, n_bar)
    n = matrix.cols
    floor = (n - split.n_bar) * split.kappa / (2.0**2.5 * n**1.5)
    premise = membership.in_class and split.kappa_lower > floor
    if not premise:
        return LargerSplitCheck(premise_holds=False, confirmed=None)

    checked: dict[int, bool] = {}
    for wider in range(split.n_bar + 1, n):
        checked[wider] = class_membership(matrix, wider).in_class
    checked[n] = False
    return LargerSplitCheck(
        premise_holds=True,
        confirmed=not any(checked.values()),
        checked=checked,
    )
