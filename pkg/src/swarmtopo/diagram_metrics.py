"""Bottleneck distance between persistence diagrams; Hausdorff distance.

The bottleneck solver is exact: it binary-searches the finite set of
candidate costs (pairwise L-infinity gaps and diagonal projections, at one
of which the optimum is always realized) and checks feasibility with a
maximum bipartite matching on the diagonal-augmented graph.  Points that
can reach the diagonal below the probed cost are pruned from the matching
instance unless they can serve as partners for a point that cannot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .persistence import PersistenceDiagram


@dataclass
class MatchingResult:
    """Bottleneck value and the realizing matching.

    Matching entries are (i, j) index pairs into the two diagrams'
    dim-restricted feature lists; None stands for the diagonal.
    """

    distance: float
    matching: list[tuple[int | None, int | None]]


def _linf(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    return np.abs(pa[:, None, :] - pb[None, :, :]).max(axis=-1)


class _HopcroftKarp:
    def __init__(self, n_left: int, n_right: int):
        self.adj: list[list[int]] = [[] for _ in range(n_left)]
        self.n_left = n_left
        self.n_right = n_right

    def add_edge(self, u: int, v: int) -> None:
        self.adj[u].append(v)

    def max_matching(self) -> tuple[int, list[int], list[int]]:
        inf = float("inf")
        match_l = [-1] * self.n_left
        match_r = [-1] * self.n_right
        size = 0
        while True:
            dist = [inf] * self.n_left
            queue = [u for u in range(self.n_left) if match_l[u] == -1]
            for u in queue:
                dist[u] = 0
            found = False
            qi = 0
            while qi < len(queue):
                u = queue[qi]
                qi += 1
                for v in self.adj[u]:
                    w = match_r[v]
                    if w == -1:
                        found = True
                    elif dist[w] == inf:
                        dist[w] = dist[u] + 1
                        queue.append(w)
            if not found:
                break

            def dfs(u: int) -> bool:
                for v in self.adj[u]:
                    w = match_r[v]
                    if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                        match_l[u] = v
                        match_r[v] = u
                        return True
                dist[u] = inf
                return False

            for u in range(self.n_left):
                if match_l[u] == -1 and dfs(u):
                    size += 1
        return size, match_l, match_r


def _feasible(pa, pb, pers_a, pers_b, c: float):
    """Perfect-matching test at cost c on the pruned augmented graph.

    Returns (ok, pairs) where pairs map pruned-instance nodes back to
    original finite-point indices, None marking a diagonal match.
    """
    long_a = pers_a > 2 * c
    long_b = pers_b > 2 * c

    help_a = np.zeros(len(pa), dtype=bool)
    help_b = np.zeros(len(pb), dtype=bool)
    if long_b.any() and len(pa):
        help_a = ~long_a & (_linf(pa, pb[long_b]).min(axis=1) <= c)
    if long_a.any() and len(pb):
        help_b = ~long_b & (_linf(pb, pa[long_a]).min(axis=1) <= c)

    ia = np.nonzero(long_a | help_a)[0]
    ib = np.nonzero(long_b | help_b)[0]
    na, nb = len(ia), len(ib)
    if na == 0 and nb == 0:
        return True, []
    la, lb = long_a[ia], long_b[ib]
    cost = _linf(pa[ia], pb[ib]) if na and nb else np.zeros((na, nb))

    # left: A reals then diagonal slots of B; right: B reals then slots of A
    hk = _HopcroftKarp(na + nb, nb + na)
    for u in range(na):
        for v in range(nb):
            if cost[u, v] <= c and (la[u] or lb[v]):
                hk.add_edge(u, v)
        if not la[u]:
            hk.add_edge(u, nb + u)
    for j in range(nb):
        if not lb[j]:
            hk.add_edge(na + j, j)
        for v in range(nb, nb + na):
            hk.add_edge(na + j, v)
    size, match_l, _ = hk.max_matching()
    if size != na + nb:
        return False, []

    pairs: list[tuple[int | None, int | None]] = []
    for u in range(na):
        v = match_l[u]
        pairs.append((int(ia[u]), int(ib[v]) if v < nb else None))
    for j in range(nb):
        v = match_l[na + j]
        if v < nb:
            pairs.append((None, int(ib[v])))
    return True, pairs


def _smallest_feasible(cands: np.ndarray, pa, pb, pers_a, pers_b) -> float:
    """Binary search for the smallest feasible candidate (monotone test)."""
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        ok, _ = _feasible(pa, pb, pers_a, pers_b, float(cands[mid]))
        if ok:
            hi = mid
        else:
            lo = mid + 1
    return float(cands[hi])


def _finite_bottleneck(pa: np.ndarray, pb: np.ndarray):
    """Exact bottleneck over finite points, with the realizing matching."""
    if len(pa) == 0 and len(pb) == 0:
        return 0.0, []
    pers_a = pa[:, 1] - pa[:, 0] if len(pa) else np.zeros(0)
    pers_b = pb[:, 1] - pb[:, 0] if len(pb) else np.zeros(0)

    base = np.unique(np.concatenate([[0.0], pers_a / 2.0, pers_b / 2.0]))
    c1 = _smallest_feasible(base, pa, pb, pers_a, pers_b)
    below = base[base < c1]
    lo_val = float(below[-1]) if len(below) else None

    if lo_val is None:
        value = c1
    else:
        # the optimum lies in (lo_val, c1]; collect cross costs in that range
        cands = [np.array([c1])]
        if len(pa) and len(pb):
            rel_a = pers_a > 2 * lo_val
            rel_b = pers_b > 2 * lo_val
            for start in range(0, len(pa), 512):
                block = _linf(pa[start : start + 512], pb)
                mask = (block > lo_val) & (block <= c1)
                mask &= rel_a[start : start + 512, None] | rel_b[None, :]
                cands.append(np.unique(block[mask]))
        cands = np.unique(np.concatenate(cands))
        value = _smallest_feasible(cands, pa, pb, pers_a, pers_b)

    _, pairs = _feasible(pa, pb, pers_a, pers_b, value)
    return value, pairs


def bottleneck_distance(
    a: PersistenceDiagram, b: PersistenceDiagram, dim: int
) -> MatchingResult:
    """Exact bottleneck distance between the dim-restricted diagrams.

    Diagrams with different counts of infinite features are at infinite
    distance (signaled in the result, not raised).  Infinite features match
    among themselves by birth order.
    """
    feats_a = [f for f in a.features if f[0] == dim]
    feats_b = [f for f in b.features if f[0] == dim]
    fin_a = [i for i, f in enumerate(feats_a) if math.isfinite(f[2])]
    fin_b = [i for i, f in enumerate(feats_b) if math.isfinite(f[2])]
    inf_a = [i for i, f in enumerate(feats_a) if not math.isfinite(f[2])]
    inf_b = [i for i, f in enumerate(feats_b) if not math.isfinite(f[2])]

    if len(inf_a) != len(inf_b):
        return MatchingResult(math.inf, [])

    matching: list[tuple[int | None, int | None]] = []
    inf_cost = 0.0
    if inf_a:
        order_a = sorted(inf_a, key=lambda i: feats_a[i][1])
        order_b = sorted(inf_b, key=lambda i: feats_b[i][1])
        for i, j in zip(order_a, order_b):
            inf_cost = max(inf_cost, abs(feats_a[i][1] - feats_b[j][1]))
            matching.append((i, j))

    pa = np.array([[feats_a[i][1], feats_a[i][2]] for i in fin_a], dtype=float).reshape(-1, 2)
    pb = np.array([[feats_b[i][1], feats_b[i][2]] for i in fin_b], dtype=float).reshape(-1, 2)
    fin_cost, pairs = _finite_bottleneck(pa, pb)

    seen_a: set[int] = set()
    seen_b: set[int] = set()
    for u, v in pairs:
        ia = fin_a[u] if u is not None else None
        ib = fin_b[v] if v is not None else None
        if ia is not None:
            seen_a.add(ia)
        if ib is not None:
            seen_b.add(ib)
        matching.append((ia, ib))
    for i in fin_a:
        if i not in seen_a:
            matching.append((i, None))
    for j in fin_b:
        if j not in seen_b:
            matching.append((None, j))

    return MatchingResult(max(inf_cost, fin_cost), matching)


def hausdorff_distance(x, y, metric=None) -> float:
    """Max over both sets of the distance to the nearest point of the other.

    `metric` may be a cross-distance matrix (len(x) by len(y)), a callable
    on point pairs, or None for Euclidean coordinates.
    """
    nx, ny = len(x), len(y)
    if nx == 0 or ny == 0:
        raise ValueError("hausdorff_distance needs non-empty sets")
    if metric is None:
        xa = np.atleast_2d(np.asarray(x, dtype=float))
        ya = np.atleast_2d(np.asarray(y, dtype=float))
        d = np.linalg.norm(xa[:, None, :] - ya[None, :, :], axis=-1)
    elif callable(metric):
        d = np.array([[metric(p, q) for q in y] for p in x], dtype=float)
    else:
        d = np.asarray(metric, dtype=float)
        if d.shape != (nx, ny):
            raise ValueError("cross-distance matrix shape must be (len(x), len(y))")
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
