"""Ground-truth geodesic distances in polygonal free space.

Shortest obstacle-avoiding paths in a polygonal domain only turn at
obstacle vertices, so pairwise geodesics are computed exactly on the
visibility graph over the query points plus all obstacle vertices.  A
grid-backed free-space graph supports covering-radius estimates and
connectivity queries; its resolution controls those, not the pairwise
distances, which are exact for any resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra, shortest_path

from .geometry import Domain
from .simulate import EncounterEvent, LandmarkCommunity


@dataclass(frozen=True)
class SpaceTimePoint:
    position: tuple[float, float]
    time: float


def default_resolution(domain: Domain) -> float:
    return min(domain.width, domain.height) / 200.0


def _visibility_csr(domain: Domain, nodes: np.ndarray) -> sp.csr_matrix:
    m = len(nodes)
    if m < 2:
        return sp.csr_matrix((m, m))
    iu, ju = np.triu_indices(m, 1)
    vis = domain.visible(nodes[iu], nodes[ju])
    rows, cols = iu[vis], ju[vis]
    w = np.linalg.norm(nodes[rows] - nodes[cols], axis=1)
    return sp.csr_matrix((w, (rows, cols)), shape=(m, m))


def pairwise_geodesics(domain: Domain, points: np.ndarray) -> np.ndarray:
    """Exact pairwise geodesic distance matrix for free-space points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if not domain.in_free_space(points).all():
        raise ValueError("all query points must lie in free space")
    uniq, inverse = np.unique(points, axis=0, return_inverse=True)
    corners = domain.obstacle_vertices()
    nodes = np.vstack([uniq, corners]) if len(corners) else uniq
    graph = _visibility_csr(domain, nodes)
    full = shortest_path(graph, method="D", directed=False, indices=np.arange(len(uniq)))
    dist = full[:, : len(uniq)][np.ix_(inverse, inverse)]
    np.fill_diagonal(dist, 0.0)
    return dist


def geodesic_distance(
    domain: Domain, p, q, resolution: float | None = None
) -> float:
    """Length of the shortest obstacle-avoiding path from p to q.

    Returns math.inf when q is unreachable from p.  Raises if either point
    lies inside an obstacle or outside the rectangle.
    """
    if resolution is not None and resolution <= 0:
        raise ValueError("resolution must be positive")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    for label, point in (("p", p), ("q", q)):
        if not domain.contains_point(point):
            raise ValueError(f"{label} is not in free space")
    d = pairwise_geodesics(domain, np.vstack([p, q]))[0, 1]
    return float(d) if np.isfinite(d) else math.inf


def space_time_distance(domain: Domain, a: SpaceTimePoint, b: SpaceTimePoint) -> float:
    """Shortest lifted trajectory length under the unit-speed convention.

    A constant-speed space curve padded with back-and-forth motion and a
    unit-rate time curve that may oscillate realize max(d_M, |dt|), and no
    admissible trajectory can beat either lower bound.
    """
    d_m = geodesic_distance(domain, a.position, b.position)
    return max(d_m, abs(a.time - b.time))


def reference_point_cloud(domain: Domain, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    """Free-space grid sampling plus its exact geodesic distance matrix."""
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    if spacing > max(domain.width, domain.height):
        raise ValueError("spacing larger than the domain")
    xs = np.arange(0.0, domain.width + spacing * 1e-9, spacing)
    ys = np.arange(0.0, domain.height + spacing * 1e-9, spacing)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    pts = pts[domain.in_free_space(pts)]
    return pts, pairwise_geodesics(domain, pts)


class FreeSpaceGraph:
    """Grid samples of free space plus obstacle vertices, visibility-linked.

    Grid nodes connect to their 8 neighbours; obstacle vertices connect to
    every node they can see, which removes the taxicab bias around corners.
    """

    def __init__(self, domain: Domain, resolution: float):
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        self.domain = domain
        self.resolution = resolution
        xs = np.arange(0.0, domain.width + resolution * 1e-9, resolution)
        ys = np.arange(0.0, domain.height + resolution * 1e-9, resolution)
        self._nx, self._ny = len(xs), len(ys)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        all_pts = np.column_stack([gx.ravel(), gy.ravel()])
        free = domain.in_free_space(all_pts)
        self.grid_points = all_pts[free]
        self._grid_index = -np.ones(len(all_pts), dtype=int)
        self._grid_index[free] = np.arange(free.sum())
        self.corners = domain.obstacle_vertices()
        self.nodes = (
            np.vstack([self.grid_points, self.corners])
            if len(self.corners)
            else self.grid_points
        )
        self._graph = self._build(free)

    def _build(self, free_mask: np.ndarray) -> sp.csr_matrix:
        nx, ny, h = self._nx, self._ny, self.resolution
        dom = self.domain
        rows, cols, weights = [], [], []
        flat = np.arange(nx * ny).reshape(nx, ny)
        for dx, dy in ((1, 0), (0, 1), (1, 1), (1, -1)):
            sx = slice(0, nx - dx)
            tx = slice(dx, nx)
            if dy >= 0:
                sy, ty = slice(0, ny - dy), slice(dy, ny)
            else:
                sy, ty = slice(-dy, ny), slice(0, ny + dy)
            a = flat[sx, sy].ravel()
            b = flat[tx, ty].ravel()
            ok = free_mask[a] & free_mask[b]
            a, b = a[ok], b[ok]
            pa = np.column_stack([a // ny * h, a % ny * h])
            pb = np.column_stack([b // ny * h, b % ny * h])
            if dom.obstacles:
                keep = ~dom.segments_blocked(pa, pb)
                a, b, pa, pb = a[keep], b[keep], pa[keep], pb[keep]
            rows.append(self._grid_index[a])
            cols.append(self._grid_index[b])
            weights.append(np.linalg.norm(pa - pb, axis=1))
        n_grid = len(self.grid_points)
        n_all = len(self.nodes)
        if len(self.corners):
            for ci, c in enumerate(self.corners):
                targets = self.nodes
                vis = dom.visible(np.repeat(c[None], len(targets), axis=0), targets)
                vis[n_grid + ci] = False
                t_idx = np.nonzero(vis)[0]
                rows.append(np.full(len(t_idx), n_grid + ci))
                cols.append(t_idx)
                weights.append(np.linalg.norm(targets[t_idx] - c, axis=1))
        rows = np.concatenate(rows) if rows else np.zeros(0, dtype=int)
        cols = np.concatenate(cols) if cols else np.zeros(0, dtype=int)
        weights = np.concatenate(weights) if weights else np.zeros(0)
        return sp.csr_matrix((weights, (rows, cols)), shape=(n_all, n_all))

    def distances_to_nearest(self, sources: np.ndarray) -> np.ndarray:
        """Geodesic distance from each grid node to its nearest source point.

        Sources get visibility edges to every node they can see, so the
        multi-source distances are exact obstacle-avoiding geodesics (any
        bend happens at an obstacle vertex already in the graph).
        """
        sources = np.atleast_2d(np.asarray(sources, dtype=float))
        n_all = len(self.nodes)
        rows, cols, weights = [], [], []
        for i, s in enumerate(sources):
            d = np.linalg.norm(self.nodes - s, axis=1)
            vis = self.domain.visible(np.repeat(s[None], n_all, axis=0), self.nodes)
            t_idx = np.nonzero(vis)[0]
            rows.append(np.full(len(t_idx), n_all + i))
            cols.append(t_idx)
            weights.append(d[t_idx])
        base = self._graph.tocoo()
        virtual = n_all + len(sources)
        all_rows = np.concatenate([base.row, *rows, np.full(len(sources), virtual)])
        all_cols = np.concatenate([base.col, *cols, np.arange(n_all, n_all + len(sources))])
        all_w = np.concatenate([base.data, *weights, np.zeros(len(sources))])
        g = sp.csr_matrix((all_w, (all_rows, all_cols)), shape=(virtual + 1, virtual + 1))
        dist = dijkstra(g, directed=False, indices=virtual)
        return dist[: len(self.grid_points)]

    def component_count(self) -> int:
        from scipy.sparse.csgraph import connected_components

        n, _ = connected_components(self._graph, directed=False)
        return int(n)


def estimate_deltas(
    events: list[EncounterEvent],
    communities: list[LandmarkCommunity],
    domain: Domain,
    spacing: float,
) -> tuple[float, float]:
    """Empirical density radii: event covering radius and landmark spacing.

    delta_e is the largest geodesic distance from a free-space grid point to
    the nearest event position; delta_l is the largest geodesic distance
    from a landmark community centroid to the nearest other centroid.
    """
    positions = [e.truth_position for e in events]
    if not positions or any(p is None for p in positions):
        raise ValueError("estimate_deltas needs events with truth positions")
    centroids = [c.centroid for c in communities if c.centroid is not None]
    if len(centroids) < 2:
        raise ValueError("need at least 2 landmark communities with centroids")

    fsg = FreeSpaceGraph(domain, spacing)
    near = fsg.distances_to_nearest(np.asarray(positions, dtype=float))
    delta_e = float(near.max()) if len(near) else math.inf

    cent = np.asarray(centroids, dtype=float)
    d = pairwise_geodesics(domain, cent)
    np.fill_diagonal(d, np.inf)
    delta_l = float(d.min(axis=1).max())
    return delta_e, delta_l
