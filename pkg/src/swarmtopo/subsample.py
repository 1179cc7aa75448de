"""Outlier removal and maxmin subsampling of a distance-matrix point cloud."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SubsampleParams:
    k: int = 10
    q: float = 0.9
    target_size: int = 150

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0 < self.q < 1:
            raise ValueError("q must be in (0, 1)")
        if self.target_size < 1:
            raise ValueError("target_size must be >= 1")


def knn_filter(dist: np.ndarray, k: int, q: float) -> np.ndarray:
    """Keep points whose mean k-NN distance is below the q-quantile.

    The threshold is the linearly interpolated q-quantile of the mean k-NN
    distances; comparison is strict.  If that keeps nothing (all values
    tied) the minimal-density ties are kept instead.
    """
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    if k >= n:
        raise ValueError("k must be smaller than the number of points")
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")
    sorted_rows = np.sort(d, axis=1)
    mean_knn = sorted_rows[:, 1 : k + 1].mean(axis=1)  # column 0 is self
    threshold = np.quantile(mean_knn, q)
    kept = np.nonzero(mean_knn < threshold)[0]
    if len(kept) == 0:
        kept = np.nonzero(mean_knn == mean_knn.min())[0]
    return kept


def maxmin_subsample(
    dist: np.ndarray, kept: np.ndarray, target_size: int, seed: int
) -> np.ndarray:
    """Greedy farthest-point sample of `kept`, seeded first pick.

    Ties break toward the lowest index; the returned order is the greedy
    selection order.
    """
    kept = np.asarray(kept, dtype=int)
    if target_size > len(kept):
        raise ValueError("target_size exceeds the number of kept points")
    if target_size < 1:
        raise ValueError("target_size must be >= 1")
    rng = np.random.default_rng(seed)
    sub = np.asarray(dist, dtype=float)[np.ix_(kept, kept)]
    first = int(rng.integers(len(kept)))
    chosen = [first]
    min_d = sub[first].copy()
    while len(chosen) < target_size:
        min_d[chosen] = -np.inf
        nxt = int(np.argmax(min_d))
        chosen.append(nxt)
        np.minimum(min_d, sub[nxt], out=min_d)
    return kept[np.array(chosen, dtype=int)]


def covering_radius(dist: np.ndarray, kept: np.ndarray, sample: np.ndarray) -> float:
    """Max over kept points of the distance to the nearest sample point."""
    block = np.asarray(dist, dtype=float)[np.ix_(np.asarray(kept, int), np.asarray(sample, int))]
    return float(block.min(axis=1).max())
