"""Independent oracles used by the test suite.

Everything here is deliberately naive and separate from the package
implementations: brute-force enumeration, textbook algorithms, or direct
formulas.  Tests compare package output against these.
"""

from __future__ import annotations

import heapq
import itertools
import math

import numpy as np


# -- graph shortest paths -----------------------------------------------------


def floyd_warshall(weights: np.ndarray) -> np.ndarray:
    """Floyd-Warshall on a dense weight matrix (inf = no edge), one
    relaxation matrix per intermediate vertex."""
    d = np.asarray(weights, dtype=float).copy()
    n = d.shape[0]
    np.fill_diagonal(d, 0.0)
    for k in range(n):
        np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :], out=d)
    return d


# -- minimum spanning tree persistence ----------------------------------------


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def mst_dim0_bars(dist: np.ndarray) -> list[tuple[float, float]]:
    """Dim-0 bars via Kruskal: one (0, w) bar per MST edge with w > 0,
    one (0, inf) bar per connected component."""
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    edges = sorted(
        (d[i, j], i, j) for i in range(n) for j in range(i + 1, n) if math.isfinite(d[i, j])
    )
    uf = UnionFind(n)
    bars = []
    for w, i, j in edges:
        if uf.union(i, j) and w > 0:
            bars.append((0.0, float(w)))
    n_comp = len({uf.find(i) for i in range(n)})
    bars.extend([(0.0, math.inf)] * n_comp)
    return sorted(bars)


# -- naive persistence reduction ----------------------------------------------


def naive_persistence(dist: np.ndarray, max_scale: float, max_dim: int = 2):
    """Textbook dense boundary-matrix reduction, no optimizations.

    Returns a sorted list of (dim, birth, death) with zero-length bars
    dropped, matching the package diagram convention.
    """
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    simplices = [((v,), 0.0) for v in range(n)]
    if max_dim >= 1:
        for i, j in itertools.combinations(range(n), 2):
            if d[i, j] <= max_scale:
                simplices.append(((i, j), float(d[i, j])))
    if max_dim >= 2:
        for i, j, k in itertools.combinations(range(n), 3):
            val = max(d[i, j], d[i, k], d[j, k])
            if val <= max_scale:
                simplices.append(((i, j, k), float(val)))
    simplices.sort(key=lambda s: (s[1], len(s[0]), s[0]))
    index = {s: i for i, (s, _) in enumerate(simplices)}
    m = len(simplices)
    columns = []
    for simplex, _ in simplices:
        if len(simplex) == 1:
            columns.append(set())
        else:
            faces = itertools.combinations(simplex, len(simplex) - 1)
            columns.append({index[f] for f in faces})
    low_of = {}
    pairs = {}
    for j in range(m):
        col = columns[j]
        while col:
            low = max(col)
            if low not in low_of:
                low_of[low] = j
                pairs[low] = j
                break
            col ^= columns[low_of[low]]
        columns[j] = col
    features = []
    paired = set()
    for low, j in pairs.items():
        paired.add(low)
        paired.add(j)
        dim = len(simplices[low][0]) - 1
        birth, death = simplices[low][1], simplices[j][1]
        if death > birth:
            features.append((dim, birth, death))
    for i, (simplex, value) in enumerate(simplices):
        if i not in paired and len(simplex) - 1 < max_dim:
            features.append((len(simplex) - 1, value, math.inf))
    return sorted(features)


def gf2_betti(dist: np.ndarray, scale: float) -> tuple[int, int]:
    """beta0 and beta1 at one scale from GF(2) boundary ranks (small n)."""
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    edges = [
        (i, j) for i, j in itertools.combinations(range(n), 2) if d[i, j] <= scale
    ]
    tris = [
        (i, j, k)
        for i, j, k in itertools.combinations(range(n), 3)
        if max(d[i, j], d[i, k], d[j, k]) <= scale
    ]
    b1 = np.zeros((n, len(edges)), dtype=int)
    for col, (i, j) in enumerate(edges):
        b1[i, col] = b1[j, col] = 1
    edge_index = {e: c for c, e in enumerate(edges)}
    b2 = np.zeros((len(edges), len(tris)), dtype=int)
    for col, (i, j, k) in enumerate(tris):
        for f in ((i, j), (i, k), (j, k)):
            b2[edge_index[f], col] = 1
    r1 = gf2_rank(b1)
    r2 = gf2_rank(b2)
    beta0 = n - r1
    beta1 = len(edges) - r1 - r2
    return beta0, beta1


def gf2_rank(mat: np.ndarray) -> int:
    a = np.asarray(mat, dtype=int).copy() % 2
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        pivot = None
        for r in range(rank, rows):
            if a[r, c]:
                pivot = r
                break
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] = (a[r] + a[rank]) % 2
        rank += 1
    return rank


# -- bottleneck distance --------------------------------------------------------


def brute_force_bottleneck(points_a, points_b) -> float:
    """Minimum over all diagonal-augmented matchings of the max L-inf cost."""
    pa = [tuple(p) for p in points_a]
    pb = [tuple(p) for p in points_b]

    def diag_cost(p):
        return (p[1] - p[0]) / 2.0

    def linf(p, q):
        return max(abs(p[0] - q[0]), abs(p[1] - q[1]))

    best = math.inf
    nb = len(pb)
    for k in range(0, min(len(pa), nb) + 1):
        for subset_a in itertools.combinations(range(len(pa)), k):
            for subset_b in itertools.permutations(range(nb), k):
                cost = 0.0
                for ia, ib in zip(subset_a, subset_b):
                    cost = max(cost, linf(pa[ia], pb[ib]))
                matched_a = set(subset_a)
                matched_b = set(subset_b)
                for ia in range(len(pa)):
                    if ia not in matched_a:
                        cost = max(cost, diag_cost(pa[ia]))
                for ib in range(nb):
                    if ib not in matched_b:
                        cost = max(cost, diag_cost(pb[ib]))
                best = min(best, cost)
    return best


def brute_force_hausdorff(x, y) -> float:
    best_xy = 0.0
    for p in x:
        nearest = min(math.dist(p, q) for q in y)
        best_xy = max(best_xy, nearest)
    best_yx = 0.0
    for q in y:
        nearest = min(math.dist(p, q) for p in x)
        best_yx = max(best_yx, nearest)
    return max(best_xy, best_yx)


# -- fine-grid shortest-path oracle ---------------------------------------------


def fine_grid_distances(domain, sources, targets, resolution: float):
    """Shortest paths on a fine grid augmented with obstacle-corner links.

    A uniform grid at `resolution` with 8-neighbour moves would carry the
    octile direction bias, so obstacle vertices join the graph with
    visibility edges to every node, and the query points link to their
    surrounding grid cells, the visible corners, and each other.  Dijkstra
    (A* with a zero heuristic) then yields geodesics exact up to float
    noise.  Returns the (len(sources), len(targets)) distance array.
    """
    import scipy.sparse as sp
    from scipy.sparse.csgraph import dijkstra

    h = resolution
    xs = np.arange(0.0, domain.width + h * 1e-9, h)
    ys = np.arange(0.0, domain.height + h * 1e-9, h)
    nx, ny = len(xs), len(ys)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    free = domain.in_free_space(pts)

    flat = np.arange(nx * ny).reshape(nx, ny)
    rows, cols, weights = [], [], []
    for dx, dy in ((1, 0), (0, 1), (1, 1), (1, -1)):
        sxs = slice(0, nx - dx)
        txs = slice(dx, nx)
        if dy >= 0:
            sys_, tys = slice(0, ny - dy), slice(dy, ny)
        else:
            sys_, tys = slice(-dy, ny), slice(0, ny + dy)
        a = flat[sxs, sys_].ravel()
        b = flat[txs, tys].ravel()
        ok = free[a] & free[b]
        a, b = a[ok], b[ok]
        rows.append(a)
        cols.append(b)
        weights.append(np.full(len(a), math.hypot(dx * h, dy * h)))

    corners = domain.obstacle_vertices()
    n_grid = nx * ny
    extra = [np.asarray(s, dtype=float) for s in sources] + [
        np.asarray(t, dtype=float) for t in targets
    ]
    node_pts = np.vstack([pts, corners, np.asarray(extra)]) if len(corners) else np.vstack(
        [pts, np.asarray(extra)]
    )
    n_corner = len(corners)

    def link(idx: int, point: np.ndarray, candidates: np.ndarray, cand_idx: np.ndarray):
        vis = domain.visible(np.repeat(point[None], len(candidates), axis=0), candidates)
        good = cand_idx[vis]
        rows.append(np.full(len(good), idx))
        cols.append(good)
        weights.append(np.linalg.norm(candidates[vis] - point, axis=1))

    free_idx = np.nonzero(free)[0]
    for ci in range(n_corner):
        link(n_grid + ci, corners[ci], pts[free_idx], free_idx)
        others = np.arange(n_corner)
        others = others[others != ci]
        if len(others):
            link(n_grid + ci, corners[ci], corners[others], n_grid + others)

    for ei, point in enumerate(extra):
        idx = n_grid + n_corner + ei
        ix = int(round(point[0] / h))
        iy = int(round(point[1] / h))
        cand = []
        for ddx in (-1, 0, 1):
            for ddy in (-1, 0, 1):
                jx, jy = ix + ddx, iy + ddy
                if 0 <= jx < nx and 0 <= jy < ny and free[flat[jx, jy]]:
                    cand.append(flat[jx, jy])
        if cand:
            cand = np.asarray(cand)
            link(idx, point, pts[cand], cand)
        if n_corner:
            link(idx, point, corners, n_grid + np.arange(n_corner))
        for ej in range(ei + 1, len(extra)):
            other = extra[ej]
            if not domain.segment_blocked(point, other):
                rows.append(np.array([idx]))
                cols.append(np.array([n_grid + n_corner + ej]))
                weights.append(np.array([float(np.linalg.norm(point - other))]))

    n_all = len(node_pts)
    graph = sp.csr_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_all, n_all),
    )
    src_idx = n_grid + n_corner + np.arange(len(sources))
    dist = dijkstra(graph, directed=False, indices=src_idx)
    tgt_idx = n_grid + n_corner + len(sources) + np.arange(len(targets))
    return dist[:, tgt_idx]


def octile_grid_distance(domain, p, q, resolution: float) -> float:
    """Plain 8-neighbour grid Dijkstra (carries the known octile bias)."""
    import scipy.sparse as sp
    from scipy.sparse.csgraph import dijkstra

    h = resolution
    xs = np.arange(0.0, domain.width + h * 1e-9, h)
    ys = np.arange(0.0, domain.height + h * 1e-9, h)
    nx, ny = len(xs), len(ys)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    free = domain.in_free_space(pts)
    flat = np.arange(nx * ny).reshape(nx, ny)
    rows, cols, weights = [], [], []
    for dx, dy in ((1, 0), (0, 1), (1, 1), (1, -1)):
        sxs, txs = slice(0, nx - dx), slice(dx, nx)
        if dy >= 0:
            sys_, tys = slice(0, ny - dy), slice(dy, ny)
        else:
            sys_, tys = slice(-dy, ny), slice(0, ny + dy)
        a = flat[sxs, sys_].ravel()
        b = flat[txs, tys].ravel()
        ok = free[a] & free[b]
        rows.append(a[ok])
        cols.append(b[ok])
        weights.append(np.full(ok.sum(), math.hypot(dx * h, dy * h)))
    graph = sp.csr_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nx * ny, nx * ny),
    )
    si = flat[int(round(p[0] / h)), int(round(p[1] / h))]
    ti = flat[int(round(q[0] / h)), int(round(q[1] / h))]
    return float(dijkstra(graph, directed=False, indices=si)[ti])


# -- space-time lattice search ----------------------------------------------------


def lattice_space_time_distance(d_space: float, dt: float, h: float = 0.25) -> float:
    """BFS over a 1D space-time lattice with unit-rate moves in both axes.

    Discretizes trajectories with |dx| = |dtime| = h per step; the minimal
    number of steps times h approximates the lifted metric.
    """
    steps_space = int(round(d_space / h))
    steps_time = int(round(abs(dt) / h))
    start = (0, 0)
    goal = (steps_space, steps_time)
    best = {start: 0}
    frontier = [start]
    limit = 4 * (steps_space + steps_time + 4)
    for step in range(limit):
        nxt = []
        for x, t in frontier:
            if (x, t) == goal:
                return step * h
            for mx in (-1, 1):
                for mt in (-1, 1):
                    cand = (x + mx, t + mt)
                    if cand not in best and -2 <= cand[0] <= steps_space + 2 and -2 - steps_time <= cand[1] <= steps_time + 2:
                        best[cand] = step + 1
                        nxt.append(cand)
        frontier = nxt
        if not frontier:
            break
    return math.inf


# -- rigid alignment ---------------------------------------------------------------


def procrustes_rmse(reference: np.ndarray, estimate: np.ndarray) -> float:
    """RMSE after optimal rigid alignment (rotation/reflection + shift)."""
    x = np.asarray(reference, dtype=float)
    y = np.asarray(estimate, dtype=float)
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    u, _, vt = np.linalg.svd(yc.T @ xc)
    r = u @ vt
    aligned = yc @ r
    return float(np.sqrt(np.mean(np.sum((aligned - xc) ** 2, axis=1))))
