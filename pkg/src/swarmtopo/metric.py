"""Encounter graph construction and the graph shortest-path metric.

Events sharing an agent are linked; the link weight is the speed-scaled gap
between event midpoint times, collapsed to zero when both events belong to
the same landmark community.  Shortest paths over this graph estimate
geodesic distances in meters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .simulate import EncounterEvent, LandmarkCommunity


@dataclass
class EncounterGraph:
    n_events: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    communities: list[LandmarkCommunity] = field(default_factory=list)

    def to_sparse(self) -> sp.csr_matrix:
        # explicit zeros are kept: zero-weight community edges are real edges
        return sp.csr_matrix(
            (self.weights, (self.rows, self.cols)), shape=(self.n_events, self.n_events)
        )

    @property
    def n_edges(self) -> int:
        return len(self.rows)


def build_encounter_graph(
    events: list[EncounterEvent],
    communities: list[LandmarkCommunity],
    speed: float,
) -> EncounterGraph:
    """Link events that share an agent; collapse shared-community pairs to 0.

    Weights are speed * |t_i - t_j| so the metric is in meters.
    """
    if speed <= 0:
        raise ValueError("speed must be positive")
    landmark_ids = set()
    for c in communities:
        for idx in c.event_indices:
            if not 0 <= idx < len(events):
                raise ValueError("community references an event index out of range")
            ev = events[idx]
            if c.landmark_id not in (ev.id_a, ev.id_b):
                raise ValueError(
                    f"event {idx} lacks landmark {c.landmark_id} but is in its community"
                )
        landmark_ids.add(c.landmark_id)

    by_agent: dict[int, list[int]] = {}
    for idx, ev in enumerate(events):
        by_agent.setdefault(ev.id_a, []).append(idx)
        by_agent.setdefault(ev.id_b, []).append(idx)

    t_mid = np.array([e.t_mid for e in events])
    pair_weight: dict[tuple[int, int], float] = {}
    for agent, idxs in by_agent.items():
        is_lm = agent in landmark_ids
        m = len(idxs)
        for a in range(m):
            ia = idxs[a]
            for b in range(a + 1, m):
                ib = idxs[b]
                key = (ia, ib) if ia < ib else (ib, ia)
                if is_lm:
                    pair_weight[key] = 0.0
                else:
                    w = speed * abs(t_mid[ia] - t_mid[ib])
                    prev = pair_weight.get(key)
                    if prev is None:
                        pair_weight[key] = w
                    elif prev > 0:
                        pair_weight[key] = min(prev, w)

    if pair_weight:
        keys = np.array(sorted(pair_weight), dtype=int)
        weights = np.array([pair_weight[tuple(k)] for k in keys])
        rows, cols = keys[:, 0], keys[:, 1]
    else:
        rows = cols = np.zeros(0, dtype=int)
        weights = np.zeros(0)
    return EncounterGraph(len(events), rows, cols, weights, list(communities))


def shortest_path_metric(graph: EncounterGraph) -> np.ndarray:
    """All-pairs shortest paths (per-source Dijkstra); inf across components."""
    if graph.n_events == 0:
        return np.zeros((0, 0))
    if len(graph.weights) and graph.weights.min() < 0:
        raise ValueError("edge weights must be non-negative")
    dist = dijkstra(graph.to_sparse(), directed=False)
    # float summation order may differ per direction; both are valid path
    # evaluations, so the elementwise min restores exact symmetry
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def community_distances(
    dist: np.ndarray, communities: list[LandmarkCommunity]
) -> np.ndarray:
    """Min event-to-event shortest-path distance between community pairs."""
    k = len(communities)
    out = np.zeros((k, k))
    idx_lists = []
    for c in communities:
        if not c.event_indices:
            raise ValueError(f"community {c.landmark_id} has no events")
        idx_lists.append(sorted(c.event_indices))
    for i in range(k):
        for j in range(i + 1, k):
            block = dist[np.ix_(idx_lists[i], idx_lists[j])]
            out[i, j] = out[j, i] = block.min()
    return out


@dataclass
class ConvergenceEstimate:
    lambda3_hat: float
    percentile_used: float
    pair_count: int
    relative_errors: np.ndarray


def estimate_lambda3(
    est: np.ndarray, truth: np.ndarray, percentile: float = 0.95
) -> ConvergenceEstimate:
    """Percentile of the relative overestimation of community distances.

    Pairs with zero or non-finite true distance are skipped, as are pairs
    whose estimated distance is infinite (disconnected encounter graph).
    """
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if est.shape != truth.shape:
        raise ValueError("matrices must have the same shape")
    if not 0 < percentile <= 1:
        raise ValueError("percentile must be in (0, 1]")
    iu, ju = np.triu_indices(len(est), 1)
    t = truth[iu, ju]
    e = est[iu, ju]
    valid = np.isfinite(t) & (t > 0) & np.isfinite(e)
    if not valid.any():
        raise ValueError("no valid community pairs for the estimate")
    errors = e[valid] / t[valid] - 1.0
    lam = float(np.quantile(np.maximum(errors, 0.0), percentile))
    return ConvergenceEstimate(lam, percentile, int(valid.sum()), errors)
