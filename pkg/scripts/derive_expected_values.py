#!/usr/bin/env python3
"""Independent derivation of the expected values frozen into the test suite.

Deliberately imports nothing from rankgap: singular values come from
scipy.linalg.svdvals (and an eigenvalue cross-route), feasibility regions
from brute-force scans, and welfare numbers from a from-scratch argmax
simulation. Run and compare against the constants in tests/.
"""

import math

import numpy as np
import scipy.linalg


def svals(a):
    return scipy.linalg.svdvals(np.asarray(a, dtype=float))


def svals_eig(a):
    """Second route: singular values via eigenvalues of A^T A."""
    a = np.asarray(a, dtype=float)
    w = np.linalg.eigvalsh(a.T @ a)
    return np.sqrt(np.clip(w, 0.0, None))[::-1]


def rank_of(a, rtol=1e-10):
    s = svals(a)
    return int((s > rtol * s[0]).sum()) if s.size and s[0] > 0 else 0


def indicator_blocks(popular_sizes, niche_sizes, rating=1.0):
    """Disjoint user groups, each rating exactly one item."""
    sizes = list(popular_sizes) + list(niche_sizes)
    m, n = sum(sizes), len(sizes)
    a = np.zeros((m, n))
    row = 0
    for j, g in enumerate(sizes):
        a[row : row + g, j] = rating
        row += g
    return a


def simulate_sw(r_star, r_tilde, alpha, n_items=1):
    """From-scratch learner simulation; returns (k_star, SW, chosen list)."""
    u, s, vt = scipy.linalg.svd(r_tilde, full_matrices=False)
    rank = rank_of(r_tilde)
    k = rank
    for j in range(1, rank):
        if s[j] <= alpha + 1e-9 * max(1.0, s[0]):
            k = j
            break
    r_hat = (u[:, :k] * s[:k]) @ vt[:k]
    pop = np.abs(r_hat).sum(axis=0)
    tol = 1e-9 * max(1.0, s[0])
    sw = 0.0
    chosen = []
    for urow, true_row in zip(r_hat, r_star):
        best = urow.max()
        ties = np.flatnonzero(urow >= best - tol)
        best_pop = pop[ties].max()
        pool = [int(i) for i in ties if pop[i] >= best_pop - tol]
        pick = pool[0]  # derandomized: smallest index
        chosen.append(pick)
        sw += true_row[pick]
    return k, sw, chosen


def main():
    print("== indicator-block example: popular (4,4), niche (1,1) ==")
    paired = indicator_blocks([4, 4], [1, 1])
    s = svals(paired)
    s2 = svals_eig(paired)
    assert np.allclose(s, s2[: s.size], atol=1e-9), "svd routes disagree"
    print("spectrum:", np.round(s, 12))
    print("gap: (sigma1(min block), sigma_kmaj(maj block)) =",
          (svals(paired[8:, 2:])[0], svals(paired[:8, :2])[rank_of(paired[:8, :2]) - 1]))
    print("tvr(2) =", s[:2].sum() / s.sum(), "(thirds:", 2 / 3, ")")

    print()
    print("== multigroup scenario: popular 4x100 ones, picky item 4 users, niche 1 user ==")
    multi = indicator_blocks([100, 100, 100, 100], [4, 1])
    maj = multi[:400, :4]
    minb = multi[400:, 4:]
    k_maj = rank_of(maj)
    sigma_kmaj = svals(maj)[k_maj - 1]
    sigma1_min = svals(minb)[0]
    print("m,n =", multi.shape, " k_maj =", k_maj)
    print("gap =", (sigma1_min, sigma_kmaj))

    alpha, n_bar, s_sq, av, kappa, ncoll = 2.1, 4, 4.0, 25.0, 1.0, 100
    # closed-form eta: upper bound from the gap numerator and kappa, lower
    # bound from the larger quadratic root
    n_up = min((sigma_kmaj**2 - alpha**2) / (math.sqrt(n_bar) * av), kappa)
    d = n_bar * av**2 + 4 * ncoll * (alpha**2 - s_sq)
    n_lo = (math.sqrt(n_bar) * av + math.sqrt(d)) / (2 * ncoll)
    eta = (n_lo + n_up) / 2
    print("N_up =", n_up, " d =", d, " N_lo =", repr(n_lo))
    print("eta  =", repr(eta))

    # brute-force check that eta is interior to the feasible region
    def gap_ok(e):
        rad = min(sigma_kmaj**2, e**2 * ncoll + s_sq) - e * math.sqrt(n_bar) * av
        return 0 < e < kappa and alpha**2 < rad

    assert gap_ok(eta)
    grid = np.linspace(1e-6, kappa - 1e-6, 200_001)
    feas = np.array([gap_ok(e) for e in grid])
    lo, hi = grid[feas][0], grid[feas][-1]
    print("feasible eta range by scan: [", lo, ",", hi, "]")
    assert lo < eta < hi

    rad = min(sigma_kmaj**2, eta**2 * ncoll + s_sq) - eta * math.sqrt(n_bar) * av
    print("sufficient-gap right endpoint at eta:", repr(math.sqrt(rad)))

    # infeasible variant
    a8 = 8.0
    n_up8 = min((sigma_kmaj**2 - a8**2) / (math.sqrt(n_bar) * av), kappa)
    d8 = n_bar * av**2 + 4 * ncoll * (a8**2 - s_sq)
    n_lo8 = (math.sqrt(n_bar) * av + math.sqrt(d8)) / (2 * ncoll)
    second8 = (math.sqrt(n_bar) * av - math.sqrt(d8)) / (2 * ncoll)
    feas8 = [e for e in grid if 0 < e < kappa
             and a8**2 < min(sigma_kmaj**2, e**2 * ncoll + s_sq) - e * math.sqrt(n_bar) * av]
    print("alpha=8: N_up =", n_up8, " d =", d8, " N_lo =", n_lo8,
          " second upper =", second8, " scan feasible count =", len(feas8))

    # defensive negative-discriminant inputs
    nd_up = min((10.0**2 - 1.0**2) / (math.sqrt(1) * 1.0), 1.0)
    nd = 1 * 1.0**2 + 4 * 1 * (1.0**2 - 2.0)
    print("defensive branch: N_up =", nd_up, " d =", nd, " return =", (nd_up / 2 + nd_up) / 2)

    # robustness margin
    eta_h = eta
    f = min(sigma_kmaj**2, eta_h**2 * ncoll + s_sq) - eta_h * math.sqrt(n_bar) * av - alpha**2
    l1, l2, n = 100.0, 10.0, 6
    L = math.sqrt(4 * l2**2 + eta_h * l1**2 / 4 + eta_h**2 * n + max(4 * l2**2, 1 + eta_h**4))
    print("f =", repr(f), " L =", repr(L), " margin =", repr(f / L))

    # end-to-end welfare
    k_t, sw_t, chosen_t = simulate_sw(multi, multi, alpha)
    multi_coll = multi.copy()
    coll_rows = [g * 100 + j for g in range(4) for j in range(25)]
    multi_coll[coll_rows, 4] = eta
    k_c, sw_c, chosen_c = simulate_sw(multi, multi_coll, alpha)
    print("truthful: k* =", k_t, " SW =", sw_t,
          " minority picks:", chosen_t[400:])
    print("collective: k* =", k_c, " SW =", sw_c, " delta =", sw_c - sw_t)
    print("sigma(R_tilde) head:", np.round(svals(multi_coll)[:7], 9))

    print()
    print("== 4x4 completion fixtures ==")
    r_true = np.array([[1, 0, 0, 4], [0, 1, 1, 2], [0, 1, 1, 2], [5, 0, 0, 20]], dtype=float)
    print("true rank:", rank_of(r_true))
    obs_t = {(0, 0): 1, (0, 1): 0, (1, 0): 0, (1, 1): 1, (1, 3): 2,
             (2, 1): 1, (2, 2): 1, (3, 1): 0, (3, 2): 0, (3, 3): 20}
    completed = np.array(
        [[1, 0, 0, 20], [0, 1, 1, 2], [0, 1, 1, 2], [1, 0, 0, 20]], dtype=float)
    assert all(completed[u, i] == v for (u, i), v in obs_t.items())
    print("worked completion rank:", rank_of(completed))
    zero_fill = np.zeros((4, 4))
    for (u, i), v in obs_t.items():
        zero_fill[u, i] = v
    print("zero-fill rank:", rank_of(zero_fill))
    print("observed 2x2 identity minor rows 0,1 cols 0,1 -> any completion has rank >= 2")

    print()
    print("== 6x6 completion fixtures ==")
    obs6 = [(0, 0, 1), (0, 2, 0), (0, 4, 0), (1, 0, 0), (1, 2, 0), (1, 3, 0),
            (2, 0, 1), (2, 1, 0), (2, 2, 1), (2, 4, 0), (2, 5, 0), (3, 1, 0),
            (4, 0, 0), (5, 0, 0), (5, 1, 0), (5, 4, 0)]
    obvious = np.zeros((6, 6))
    for u, i, v in obs6:
        obvious[u, i] = v
    print("zero-fill rank:", rank_of(obvious))
    less_sparse = obvious.copy()
    for u, i in [(2, 3), (3, 0), (3, 2), (3, 3)]:
        less_sparse[u, i] = 1.0
    assert all(less_sparse[u, i] == v for u, i, v in obs6)
    print("less-sparse completion rank:", rank_of(less_sparse))
    reduced = less_sparse.copy()
    reduced[:, 3:] = 0.0
    reduced[3:, :] = 0.0
    print("reduced equals zero-fill:", bool((reduced == obvious).all()))

    print()
    print("== 10x10 per-user exploration probabilities ==")
    for q in (2, 3, 5, 7):
        print(f"q={q}: P(miss both) = {((10 - q) / 10) ** 2}")

    print()
    print("== class-membership arithmetic example ==")
    # four 100-user indicator groups, two unpopular columns with L1 <= 1
    kappa_cls, nn = 1.0, 6
    delta = 2 ** 2.5 * kappa_cls * nn ** 1.5 / 100.0
    print("delta =", repr(delta))
    print("necessary bound 2^(5/4) n^(3/4) sqrt(kappa) =",
          repr(2 ** 1.25 * nn ** 0.75 * math.sqrt(kappa_cls)))
    print("selection-window interval (n=6, n_bar=4, kappa=1):",
          (math.sqrt(2 * 1.0), 2 ** 1.25 * 6 ** 0.75))


if __name__ == "__main__":
    main()
