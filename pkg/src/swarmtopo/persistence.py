"""Vietoris-Rips filtrations and persistent homology in dimensions 0 and 1.

The reduction is the standard boundary-matrix column algorithm over GF(2),
processed one dimension at a time from the top (twist/clearing).  Columns
are packed into Python integers so column addition is a single XOR and the
pivot is the highest set bit.  Zero-persistence pairs are omitted from the
diagrams; they never affect Betti counts or diagram distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Filtration:
    """Simplices of a filtered complex, dims 0-2.

    Edge and triangle arrays are index tuples into the vertex range; values
    are the filtration scales.  Vertices all enter at scale 0.
    """

    n_vertices: int
    edges: np.ndarray  # (E, 2) with i < j
    edge_values: np.ndarray
    triangles: np.ndarray  # (T, 3) with i < j < k
    tri_values: np.ndarray
    max_dim: int = 2

    def ordered_simplices(self):
        """Yield (vertex tuple, value) sorted by (value, dim, lex)."""
        items = [((int(v),), 0.0, 0) for v in range(self.n_vertices)]
        items += [
            (tuple(int(x) for x in e), float(val), 1)
            for e, val in zip(self.edges, self.edge_values)
        ]
        items += [
            (tuple(int(x) for x in t), float(val), 2)
            for t, val in zip(self.triangles, self.tri_values)
        ]
        items.sort(key=lambda s: (s[1], s[2], s[0]))
        return [(simplex, value) for simplex, value, _ in items]

    @property
    def n_simplices(self) -> int:
        return self.n_vertices + len(self.edges) + len(self.triangles)


@dataclass
class PersistenceDiagram:
    """Multiset of (dim, birth, death) features; death may be math.inf."""

    features: list[tuple[int, float, float]] = field(default_factory=list)

    def points(self, dim: int) -> np.ndarray:
        """Finite (birth, death) pairs of one dimension."""
        pts = [(b, d) for dd, b, d in self.features if dd == dim and math.isfinite(d)]
        return np.asarray(pts, dtype=float).reshape(-1, 2)

    def essential_births(self, dim: int) -> np.ndarray:
        return np.asarray(
            [b for dd, b, d in self.features if dd == dim and not math.isfinite(d)],
            dtype=float,
        )

    def interval_lengths(self, dim: int) -> np.ndarray:
        pts = self.points(dim)
        return pts[:, 1] - pts[:, 0] if len(pts) else np.zeros(0)

    def restricted(self, dim: int) -> "PersistenceDiagram":
        return PersistenceDiagram([f for f in self.features if f[0] == dim])


@dataclass
class BettiCounts:
    beta0: int
    beta1: int


def build_rips_filtration(
    dist: np.ndarray, max_scale: float, max_dim: int = 2
) -> Filtration:
    """All vertices, edges with d <= max_scale, triangles with max edge <= max_scale."""
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n):
        raise ValueError("distance matrix must be square")
    if max_scale <= 0:
        raise ValueError("max_scale must be positive")
    if not 0 <= max_dim <= 2:
        raise ValueError("max_dim must be 0, 1 or 2")
    if n and not np.array_equal(d, d.T):
        if not np.allclose(d, d.T, atol=1e-12 * (1 + np.nanmax(np.abs(d[np.isfinite(d)])))):
            raise ValueError("distance matrix must be symmetric")

    if max_dim >= 1 and n >= 2:
        iu, ju = np.triu_indices(n, 1)
        keep = d[iu, ju] <= max_scale
        edges = np.column_stack([iu[keep], ju[keep]]).astype(np.int64)
        edge_values = d[iu, ju][keep]
    else:
        edges = np.zeros((0, 2), dtype=np.int64)
        edge_values = np.zeros(0)

    if max_dim >= 2 and n >= 3:
        blocks = []
        for i in range(n - 2):
            rest = np.arange(i + 1, n)
            jj, kk = np.triu_indices(len(rest), 1)
            if len(jj) == 0:
                continue
            blocks.append(
                np.column_stack([np.full(len(jj), i, dtype=np.int64), rest[jj], rest[kk]])
            )
        tris = np.vstack(blocks) if blocks else np.zeros((0, 3), dtype=np.int64)
        tv = np.maximum(
            np.maximum(d[tris[:, 0], tris[:, 1]], d[tris[:, 0], tris[:, 2]]),
            d[tris[:, 1], tris[:, 2]],
        )
        keep = tv <= max_scale
        tris, tv = tris[keep], tv[keep]
    else:
        tris = np.zeros((0, 3), dtype=np.int64)
        tv = np.zeros(0)
    return Filtration(n, edges, edge_values, tris, tv, max_dim)


def compute_persistence(filtration: Filtration) -> PersistenceDiagram:
    """Column reduction over GF(2) with the twist/clearing optimization."""
    n = filtration.n_vertices
    edges, evals = filtration.edges, filtration.edge_values
    tris, tvals = filtration.triangles, filtration.tri_values

    if len(edges) and (edges.min() < 0 or edges.max() >= n):
        raise ValueError("edge endpoints out of vertex range")

    # edge ranks follow the global (value, dim, lex) order restricted to edges
    eorder = np.lexsort((edges[:, 1], edges[:, 0], evals)) if len(edges) else np.zeros(0, int)
    erank = np.empty(len(edges), dtype=np.int64)
    erank[eorder] = np.arange(len(edges))
    eval_by_rank = evals[eorder] if len(edges) else np.zeros(0)
    edge_by_rank = edges[eorder] if len(edges) else edges

    features: list[tuple[int, float, float]] = []
    cleared: set[int] = set()

    if len(tris):
        rank_mat = -np.ones((n, n), dtype=np.int64)
        if len(edges):
            rank_mat[edges[:, 0], edges[:, 1]] = erank
        torder = np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0], tvals))
        t_sorted = tris[torder]
        ra = rank_mat[t_sorted[:, 0], t_sorted[:, 1]]
        rb = rank_mat[t_sorted[:, 0], t_sorted[:, 2]]
        rc = rank_mat[t_sorted[:, 1], t_sorted[:, 2]]
        if (ra < 0).any() or (rb < 0).any() or (rc < 0).any():
            raise ValueError("triangle face missing from filtration")
        tv_sorted = tvals[torder]
        if len(edges) and np.any(
            tv_sorted
            < np.maximum(
                np.maximum(eval_by_rank[ra], eval_by_rank[rb]), eval_by_rank[rc]
            ) - 1e-12
        ):
            raise ValueError("triangle enters the filtration before one of its edges")
        pivot_col: dict[int, int] = {}
        for idx in range(len(torder)):
            col = (1 << int(ra[idx])) | (1 << int(rb[idx])) | (1 << int(rc[idx]))
            while col:
                p = col.bit_length() - 1
                other = pivot_col.get(p)
                if other is None:
                    pivot_col[p] = col
                    cleared.add(p)
                    birth = float(eval_by_rank[p])
                    death = float(tv_sorted[idx])
                    if death > birth:
                        features.append((1, birth, death))
                    break
                col ^= other

    # dimension-1 pass over edge columns (vertex rows)
    vertex_pivot: dict[int, int] = {}
    paired_vertices: set[int] = set()
    for rank in range(len(edge_by_rank)):
        if rank in cleared:
            continue
        u, v = int(edge_by_rank[rank][0]), int(edge_by_rank[rank][1])
        col = (1 << u) | (1 << v)
        while col:
            p = col.bit_length() - 1
            other = vertex_pivot.get(p)
            if other is None:
                vertex_pivot[p] = col
                paired_vertices.add(p)
                death = float(eval_by_rank[rank])
                if death > 0.0:
                    features.append((0, 0.0, death))
                break
            col ^= other
        else:
            if filtration.max_dim > 1:
                features.append((1, float(eval_by_rank[rank]), math.inf))

    for v in range(n):
        if v not in paired_vertices:
            features.append((0, 0.0, math.inf))

    features.sort(key=lambda f: (f[0], f[1], f[2]))
    return PersistenceDiagram(features)


def betti_at_scale(diagram: PersistenceDiagram, scale: float) -> BettiCounts:
    """Features alive at the scale: birth <= scale < death."""
    if scale < 0:
        raise ValueError("scale must be non-negative")
    beta = [0, 0]
    for dim, birth, death in diagram.features:
        if dim in (0, 1) and birth <= scale < death:
            beta[dim] += 1
    return BettiCounts(beta[0], beta[1])


def rips_diagram(dist: np.ndarray, max_scale: float | None = None, max_dim: int = 2) -> PersistenceDiagram:
    """Build the Rips filtration (default scale: cloud diameter) and reduce it."""
    d = np.asarray(dist, dtype=float)
    if max_scale is None:
        finite = d[np.isfinite(d)]
        max_scale = float(finite.max()) if len(finite) else 1.0
        if max_scale <= 0:
            max_scale = 1.0
    return compute_persistence(build_rips_filtration(d, max_scale, max_dim))
