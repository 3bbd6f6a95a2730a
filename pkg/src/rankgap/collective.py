"""Collective uprating: strategy application, sufficiency checks, eta finder.

A collective is a nonempty set of majority users who all report the same
positive value eta for one minority target item. The functions here decide
when such a strategy is guaranteed to improve welfare, search for a working
eta with closed-form arithmetic, and bound how much parameter misestimation
the guarantee survives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .matrix import (
    GroupPartition,
    OpenInterval,
    RatingsMatrix,
    numeric_rank_of,
    singular_values_of,
)


@dataclass(frozen=True)
class CollectiveStrategy:
    """Uniform uprating of one minority item by a set of majority users."""

    target_item: int
    collective: frozenset[int]
    eta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "collective", frozenset(int(u) for u in self.collective))
        if not self.collective:
            raise ValueError("collective must be nonempty")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")

    def validate_for(self, p: GroupPartition) -> None:
        if self.target_item not in p.minority_items:
            raise ValueError(f"target item {self.target_item} is not a minority item")
        if not self.collective <= p.majority_users:
            raise ValueError("collective is not a subset of the majority users")


@dataclass(frozen=True)
class FinderInputs:
    """Parameter vector consumed by the eta finder and the robustness margin.

    kappa is supplied rather than recomputed: a real collective may only
    estimate it. The alpha < sigma_kmaj requirement is the setting assumption
    under which the finder's guarantee is stated.
    """

    sigma_kmaj: float
    alpha: float
    n_bar: int
    picky_col_sq: float
    av: float
    kappa: float
    coll_size: int

    def __post_init__(self) -> None:
        for name in ("sigma_kmaj", "alpha", "picky_col_sq", "av", "kappa"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")
            object.__setattr__(self, name, v)
        if int(self.n_bar) < 1:
            raise ValueError(f"n_bar must be >= 1, got {self.n_bar}")
        if int(self.coll_size) < 1:
            raise ValueError(f"coll_size must be >= 1, got {self.coll_size}")
        object.__setattr__(self, "n_bar", int(self.n_bar))
        object.__setattr__(self, "coll_size", int(self.coll_size))
        if not self.alpha < self.sigma_kmaj:
            raise ValueError(
                f"alpha ({self.alpha}) must be below sigma_kmaj ({self.sigma_kmaj})"
            )

    def as_vector(self) -> np.ndarray:
        """The six perturbable parameters, in a fixed order (kappa is held known)."""
        return np.array(
            [
                self.sigma_kmaj,
                self.alpha,
                float(self.n_bar),
                self.picky_col_sq,
                self.av,
                float(self.coll_size),
            ]
        )


@dataclass(frozen=True)
class SufficiencyReport:
    """Named condition booleans with margins; welfare fields filled by runners."""

    conditions: dict[str, bool]
    margins: dict[str, float]
    verdict: bool
    gap_interval: OpenInterval | None = None
    sw_before: float | None = None
    sw_after: float | None = None
    ratio: float | None = None
    recommendation_diffs: tuple = field(default=())

    def with_welfare(self, sw_before: float, sw_after: float, diffs=()) -> "SufficiencyReport":
        ratio = sw_after / sw_before if sw_before > 0 else float("inf")
        return SufficiencyReport(
            conditions=self.conditions,
            margins=self.margins,
            verdict=self.verdict,
            gap_interval=self.gap_interval,
            sw_before=sw_before,
            sw_after=sw_after,
            ratio=ratio,
            recommendation_diffs=tuple(diffs),
        )


# ---------------------------------------------------------------------------
# Strategy application and aggregate value
# ---------------------------------------------------------------------------

def apply_uprating(
    R_star: RatingsMatrix, p: GroupPartition, s: CollectiveStrategy
) -> RatingsMatrix:
    """Revealed matrix: R_star with the collective's target entries set to eta."""
    p.validate_for(R_star)
    s.validate_for(p)
    out = R_star.entries.copy()
    out[sorted(s.collective), s.target_item] = s.eta
    return RatingsMatrix(out)


def aggregate_value(R: RatingsMatrix, coll: frozenset[int] | set[int], n_bar: int) -> float:
    """Largest popular-column rating mass held by the collective.

    Assumes block order: the popular items are the first n_bar columns.
    """
    if not coll:
        raise ValueError("collective must be nonempty")
    if not 1 <= n_bar <= R.cols:
        raise ValueError(f"n_bar must be in [1, {R.cols}], got {n_bar}")
    rows = sorted(int(u) for u in coll)
    return float(R.entries[rows, :n_bar].sum(axis=0).max())


def _aggregate_value_items(R: RatingsMatrix, coll, items: list[int]) -> float:
    rows = sorted(int(u) for u in coll)
    return float(R.entries[np.ix_(rows, items)].sum(axis=0).max())


# ---------------------------------------------------------------------------
# Sufficient conditions
# ---------------------------------------------------------------------------

def sufficient_gap(
    R_star: RatingsMatrix, p: GroupPartition, s: CollectiveStrategy
) -> OpenInterval:
    """Interval of exploration limits under which the uprating is effective.

    The right endpoint is sqrt(min(sigma_kmaj^2, eta^2 |coll| + ||target col||^2)
    - eta sqrt(n_bar) AV); a negative radicand gives an empty interval (NaN
    upper endpoint).
    """
    p.validate_for(R_star)
    s.validate_for(p)
    maj_items = sorted(p.majority_items)
    maj_block = R_star.entries[np.ix_(sorted(p.majority_users), maj_items)]
    s_maj = singular_values_of(maj_block)
    k_maj = numeric_rank_of(maj_block)
    if k_maj == 0:
        raise ValueError("majority block has numeric rank 0")
    sigma_kmaj = float(s_maj[k_maj - 1])
    min_block = R_star.entries[np.ix_(sorted(p.minority_users), sorted(p.minority_items))]
    s_min = singular_values_of(min_block)
    sigma1_min = float(s_min[0]) if s_min.size else 0.0
    col_sq = float((R_star.entries[:, s.target_item] ** 2).sum())
    av = _aggregate_value_items(R_star, s.collective, maj_items)
    radicand = (
        min(sigma_kmaj**2, s.eta**2 * len(s.collective) + col_sq)
        - s.eta * math.sqrt(len(maj_items)) * av
    )
    upper = math.sqrt(radicand) if radicand >= 0 else float("nan")
    return OpenInterval(sigma1_min, upper)


def check_sufficient_conditions(
    z: FinderInputs, sigma1_min: float, eta: float
) -> SufficiencyReport:
    """Evaluate the three closed-form conditions for an effective uprating.

    Conditions (all strict, exact floating comparisons):
      eta_below_kappa:      0 < eta < kappa
      alpha_in_new_gap:     alpha^2 < min(sigma_kmaj^2, eta^2 |coll| + picky_col_sq)
                            - eta sqrt(n_bar) AV
      alpha_above_minority: alpha > sigma1_min
    """
    min_term = min(z.sigma_kmaj**2, eta**2 * z.coll_size + z.picky_col_sq)
    radicand = min_term - eta * math.sqrt(z.n_bar) * z.av
    conditions = {
        "eta_below_kappa": 0.0 < eta < z.kappa,
        "alpha_in_new_gap": z.alpha**2 < radicand,
        "alpha_above_minority": z.alpha > sigma1_min,
    }
    margins = {
        "eta_below_kappa": z.kappa - eta,
        "alpha_in_new_gap": radicand - z.alpha**2,
        "alpha_above_minority": z.alpha - sigma1_min,
    }
    upper = math.sqrt(radicand) if radicand >= 0 else float("nan")
    return SufficiencyReport(
        conditions=conditions,
        margins=margins,
        verdict=all(conditions.values()),
        gap_interval=OpenInterval(sigma1_min, upper),
    )


# ---------------------------------------------------------------------------
# Closed-form eta finder
# ---------------------------------------------------------------------------

def find_eta(z: FinderInputs) -> float:
    """Return an uprating value meeting the sufficient conditions, or 0.

    Pure arithmetic: intersect the upper bounds (from the gap numerator and
    from kappa) with the feasible region of the quadratic condition, then
    return the midpoint of the surviving range. A return of 0 means no eta
    satisfies the sufficient conditions. Comparisons are exact; boundary
    equality conservatively routes to the "no" side, matching the open
    intervals in the guarantee.
    """
    if z.av <= 0:
        raise ValueError("aggregate value must be positive for the finder's divisions")
    root_av = math.sqrt(z.n_bar) * z.av
    n_up = min((z.sigma_kmaj**2 - z.alpha**2) / root_av, z.kappa)
    d = z.n_bar * z.av**2 + 4 * z.coll_size * (z.alpha**2 - z.picky_col_sq)
    if d < 0:
        # No real root: the quadratic lower bound does not bind. This branch
        # is unreachable when alpha exceeds the target column's norm, but it
        # is kept for defensive completeness.
        n_lo = n_up / 2
    else:
        n_lo = (root_av + math.sqrt(d)) / (2 * z.coll_size)
    if n_lo < n_up:
        return (n_lo + n_up) / 2
    if d >= 0:
        n_up = min((root_av - math.sqrt(d)) / (2 * z.coll_size), n_up)
    if n_up > 0:
        return n_up / 2
    return 0.0


def grid_feasible_eta(
    z: FinderInputs, sigma1_min: float = 0.0, steps: int = 10_000
) -> float | None:
    """Brute-force scan for a passing eta on a uniform grid over (0, kappa).

    Oracle companion to find_eta: returns the first passing grid point or
    None. Resolution is kappa/steps, so a None result rules out feasibility
    only up to that resolution.
    """
    if z.kappa <= 0:
        return None
    for j in range(1, steps):
        eta = z.kappa * j / steps
        if check_sufficient_conditions(z, sigma1_min, eta).verdict:
            return eta
    return None


# ---------------------------------------------------------------------------
# Robustness to parameter misspecification
# ---------------------------------------------------------------------------

def margin_numerator(z: FinderInputs, eta: float) -> float:
    """Slack of the gap condition at eta: positive iff eta passes it."""
    return (
        min(z.sigma_kmaj**2, eta**2 * z.coll_size + z.picky_col_sq)
        - eta * math.sqrt(z.n_bar) * z.av
        - z.alpha**2
    )


def lipschitz_bound(l1_norm: float, l2_norm: float, n: int, eta: float) -> float:
    """Growth bound for the gap-condition slack under parameter perturbation."""
    return math.sqrt(
        4 * l2_norm**2
        + eta * l1_norm**2 / 4
        + eta**2 * n
        + max(4 * l2_norm**2, 1 + eta**4)
    )


def robustness_margin(
    z_hat: FinderInputs, eta_hat: float, l1_norm: float, l2_norm: float, n: int
) -> float:
    """Estimation-error budget under which eta_hat stays effective.

    If the true parameter vector z* satisfies ||z_hat - z*||_2 < margin, an
    eta_hat that passed the sufficient conditions under z_hat still passes
    them under z*. The norms are those of the true matrix (max column sum
    and top singular value), assumed known; callers holding only estimates
    should label the margin heuristic.
    """
    if eta_hat <= 0:
        raise ValueError(f"eta_hat must be positive, got {eta_hat}")
    f = margin_numerator(z_hat, eta_hat)
    if f <= 0:
        raise ValueError("eta_hat does not satisfy the gap condition under z_hat")
    return f / lipschitz_bound(l1_norm, l2_norm, n, eta_hat)


__all__ = [
    "CollectiveStrategy",
    "FinderInputs",
    "SufficiencyReport",
    "apply_uprating",
    "aggregate_value",
    "sufficient_gap",
    "check_sufficient_conditions",
    "find_eta",
    "grid_feasible_eta",
    "margin_numerator",
    "lipschitz_bound",
    "robustness_margin",
]
