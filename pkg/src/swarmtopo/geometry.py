"""Planar geometry for rectangular domains with polygonal obstacles.

The free space is the closed rectangle [0, width] x [0, height] minus the
open interiors of the obstacle polygons.  Obstacle boundaries count as free
so that corner vertices can serve as path waypoints.
"""

from __future__ import annotations

import numpy as np

_EPS = 1e-12


def _as_polygon(vertices) -> np.ndarray:
    poly = np.asarray(vertices, dtype=float)
    if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
        raise ValueError("polygon needs at least 3 (x, y) vertices")
    return poly


def polygon_edges(poly: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Edge start/end arrays, closing the ring."""
    return poly, np.roll(poly, -1, axis=0)


def points_in_polygon(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Strict interior test: ray casting minus an epsilon boundary band.

    Points on (or within a relative epsilon of) the polygon boundary count
    as outside, so obstacle boundaries stay free for path endpoints.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y = pts[:, 0], pts[:, 1]
    a, b = polygon_edges(poly)
    inside = np.zeros(len(pts), dtype=bool)
    for (x1, y1), (x2, y2) in zip(a, b):
        cross = ((y1 > y) != (y2 > y)) & (
            x < (x2 - x1) * (y - y1) / (y2 - y1 + _EPS) + x1
        )
        inside ^= cross
    if inside.any():
        scale = max(1.0, float(np.abs(poly).max()))
        near = _distance_to_edges(pts[inside], poly) <= 1e-9 * scale
        idx = np.nonzero(inside)[0]
        inside[idx[near]] = False
    return inside


def _distance_to_edges(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Min distance from each point to the polygon boundary."""
    a, b = polygon_edges(poly)
    best = np.full(len(points), np.inf)
    for e1, e2 in zip(a, b):
        seg = e2 - e1
        seg_len2 = float(seg @ seg)
        rel = points - e1
        t = np.clip((rel @ seg) / (seg_len2 + _EPS), 0.0, 1.0)
        proj = e1 + t[:, None] * seg
        best = np.minimum(best, np.linalg.norm(points - proj, axis=1))
    return best


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def segments_properly_intersect(p1, p2, q1, q2) -> np.ndarray:
    """Proper crossing test for segment arrays against one segment (q1, q2).

    p1, p2: (k, 2) arrays; q1, q2: single points.  Collinear touching does
    not count as a crossing.
    """
    p1 = np.atleast_2d(p1)
    p2 = np.atleast_2d(p2)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    d1 = _orient(q1[0], q1[1], q2[0], q2[1], p1[:, 0], p1[:, 1])
    d2 = _orient(q1[0], q1[1], q2[0], q2[1], p2[:, 0], p2[:, 1])
    d3 = _orient(p1[:, 0], p1[:, 1], p2[:, 0], p2[:, 1], q1[0], q1[1])
    d4 = _orient(p1[:, 0], p1[:, 1], p2[:, 0], p2[:, 1], q2[0], q2[1])
    return (d1 * d2 < 0) & (d3 * d4 < 0)


class Domain:
    """Rectangle with disjoint simple polygonal obstacles strictly inside."""

    def __init__(self, width: float, height: float, obstacles=()):
        if width <= 0 or height <= 0:
            raise ValueError("domain sides must be positive")
        self.width = float(width)
        self.height = float(height)
        self.obstacles = [_as_polygon(p) for p in obstacles]
        self._validate()

    def _validate(self) -> None:
        for poly in self.obstacles:
            if not (
                np.all(poly[:, 0] > 0)
                and np.all(poly[:, 0] < self.width)
                and np.all(poly[:, 1] > 0)
                and np.all(poly[:, 1] < self.height)
            ):
                raise ValueError("obstacle vertices must lie strictly inside the rectangle")
            if _polygon_self_intersects(poly):
                raise ValueError("obstacle polygon is self-intersecting")
        for i in range(len(self.obstacles)):
            for j in range(i + 1, len(self.obstacles)):
                if _polygons_overlap(self.obstacles[i], self.obstacles[j]):
                    raise ValueError("obstacles must be pairwise disjoint")

    # -- point queries -------------------------------------------------

    def in_rectangle(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (
            (pts[:, 0] >= 0)
            & (pts[:, 0] <= self.width)
            & (pts[:, 1] >= 0)
            & (pts[:, 1] <= self.height)
        )

    def in_obstacle(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        hit = np.zeros(len(pts), dtype=bool)
        for poly in self.obstacles:
            hit |= points_in_polygon(pts, poly)
        return hit

    def in_free_space(self, points) -> np.ndarray:
        return self.in_rectangle(points) & ~self.in_obstacle(points)

    def contains_point(self, point) -> bool:
        return bool(self.in_free_space(np.asarray(point, dtype=float)[None, :])[0])

    # -- segment queries -----------------------------------------------

    def segments_blocked(self, starts, ends) -> np.ndarray:
        """True where the open segment crosses an obstacle interior.

        Grazing along an obstacle edge or touching a vertex is not blocked.
        """
        p1 = np.atleast_2d(np.asarray(starts, dtype=float))
        p2 = np.atleast_2d(np.asarray(ends, dtype=float))
        blocked = np.zeros(len(p1), dtype=bool)
        for poly in self.obstacles:
            a, b = polygon_edges(poly)
            lo = poly.min(axis=0)
            hi = poly.max(axis=0)
            near = ~(
                (np.maximum(p1, p2) < lo - _EPS).any(axis=1)
                | (np.minimum(p1, p2) > hi + _EPS).any(axis=1)
            )
            if not near.any():
                continue
            idx = np.nonzero(near)[0]
            s1, s2 = p1[idx], p2[idx]
            hit = np.zeros(len(idx), dtype=bool)
            for e1, e2 in zip(a, b):
                hit |= segments_properly_intersect(s1, s2, e1, e2)
            # segments that dip inside without a proper edge crossing
            # (fully contained, or passing through a vertex)
            for frac in (0.25, 0.5, 0.75):
                mids = s1 + frac * (s2 - s1)
                hit |= points_in_polygon(mids, poly)
            blocked[idx] |= hit
        return blocked

    def segment_blocked(self, start, end) -> bool:
        return bool(self.segments_blocked(np.asarray(start)[None], np.asarray(end)[None])[0])

    def visible(self, starts, ends) -> np.ndarray:
        """Mutual visibility inside free space (endpoints assumed free)."""
        return ~self.segments_blocked(starts, ends)

    # -- derived quantities ----------------------------------------------

    def obstacle_vertices(self) -> np.ndarray:
        if not self.obstacles:
            return np.zeros((0, 2))
        return np.vstack(self.obstacles)

    def free_area(self, resolution: float | None = None) -> float:
        rect = self.width * self.height
        holes = sum(abs(_signed_area(p)) for p in self.obstacles)
        return rect - holes

    def diameter_bound(self) -> float:
        return float(np.hypot(self.width, self.height))

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "obstacles": [p.tolist() for p in self.obstacles],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Domain":
        return cls(data["width"], data["height"], data.get("obstacles", []))


def _signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _polygon_self_intersects(poly: np.ndarray) -> bool:
    a, b = polygon_edges(poly)
    m = len(poly)
    for i in range(m):
        others = [j for j in range(m) if j != i and (i + 1) % m != j and (j + 1) % m != i]
        if not others:
            continue
        hits = segments_properly_intersect(a[others], b[others], a[i], b[i])
        if hits.any():
            return True
    return False


def _polygons_overlap(p: np.ndarray, q: np.ndarray) -> bool:
    if (p.max(axis=0) < q.min(axis=0)).any() or (q.max(axis=0) < p.min(axis=0)).any():
        return False
    a, b = polygon_edges(p)
    for e1, e2 in zip(*polygon_edges(q)):
        if segments_properly_intersect(a, b, e1, e2).any():
            return True
    return bool(points_in_polygon(p[:1], q)[0] or points_in_polygon(q[:1], p)[0])
