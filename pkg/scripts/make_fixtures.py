#!/usr/bin/env python3
"""Regenerate the packaged completion fixtures under src/rankgap/data/."""

from pathlib import Path

import numpy as np

from rankgap.matrix import RatingsMatrix, save_ratings_csv
from rankgap.completion import PartialMatrix, save_partial_json

DATA = Path(__file__).resolve().parent.parent / "src" / "rankgap" / "data"


def main():
    DATA.mkdir(parents=True, exist_ok=True)

    r4 = np.array([[1, 0, 0, 4], [0, 1, 1, 2], [0, 1, 1, 2], [5, 0, 0, 20]], dtype=float)
    save_ratings_csv(DATA / "mc_4x4_true.csv", RatingsMatrix(r4))

    round1 = [(0, 1, 0), (1, 2, 1), (2, 2, 1), (3, 3, 20)]
    save_partial_json(DATA / "mc_4x4_round1.json", PartialMatrix.from_triples(4, 4, round1))

    round_t = [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1), (1, 3, 2),
               (2, 1, 1), (2, 2, 1), (3, 1, 0), (3, 2, 0), (3, 3, 20)]
    save_partial_json(DATA / "mc_4x4_round_t.json", PartialMatrix.from_triples(4, 4, round_t))

    completed = np.array(
        [[1, 0, 0, 20], [0, 1, 1, 2], [0, 1, 1, 2], [1, 0, 0, 20]], dtype=float)
    save_ratings_csv(DATA / "mc_4x4_completed.csv", RatingsMatrix(completed))

    block8 = np.array([
        [0.2, 0.7, 0.4, 0.9, 0.1, 0.6, 0.3, 0.8],
        [0.5, 0.1, 0.9, 0.2, 0.7, 0.4, 0.8, 0.3],
        [0.8, 0.3, 0.6, 0.1, 0.9, 0.2, 0.5, 0.7],
        [0.1, 0.9, 0.2, 0.5, 0.8, 0.3, 0.7, 0.4],
        [0.6, 0.4, 0.7, 0.3, 0.2, 0.9, 0.1, 0.8],
        [0.3, 0.8, 0.1, 0.7, 0.4, 0.5, 0.9, 0.2],
        [0.9, 0.2, 0.5, 0.4, 0.3, 0.8, 0.6, 0.1],
        [0.4, 0.5, 0.8, 0.6, 0.1, 0.7, 0.2, 0.9],
    ])
    r10 = np.zeros((10, 10))
    r10[:8, :8] = block8
    r10[8, 8] = 0.8
    r10[9, 9] = 0.9
    save_ratings_csv(DATA / "mc_10x10_true.csv", RatingsMatrix(r10))

    obs6 = [(0, 0, 1), (0, 2, 0), (0, 4, 0), (1, 0, 0), (1, 2, 0), (1, 3, 0),
            (2, 0, 1), (2, 1, 0), (2, 2, 1), (2, 4, 0), (2, 5, 0), (3, 1, 0),
            (4, 0, 0), (5, 0, 0), (5, 1, 0), (5, 4, 0)]
    save_partial_json(DATA / "mc_6x6_observed.json", PartialMatrix.from_triples(6, 6, obs6))

    less_sparse = np.zeros((6, 6))
    for u, i, v in obs6:
        less_sparse[u, i] = v
    for u, i in [(2, 3), (3, 0), (3, 2), (3, 3)]:
        less_sparse[u, i] = 1.0
    save_ratings_csv(DATA / "mc_6x6_less_sparse.csv", RatingsMatrix(less_sparse))

    print("fixtures written to", DATA)


if __name__ == "__main__":
    main()
