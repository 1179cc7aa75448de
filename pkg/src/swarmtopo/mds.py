"""Classical multidimensional scaling via double centering.

The symmetric eigendecomposition uses cyclic Jacobi rotations, which is
plenty for the few-hundred-point matrices this pipeline produces and keeps
the eigen residuals tiny.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Embedding2D:
    coordinates: np.ndarray  # (n, dim), centroid at the origin
    eigenvalues_used: np.ndarray  # top `dim` eigenvalues, clamped at 0
    stress: float


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-10, max_sweeps: int = 100):
    """Eigenvalues (descending) and eigenvectors of a symmetric matrix.

    Sweeps cyclic Jacobi rotations until the off-diagonal norm falls below
    tol relative to the input norm.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    v = np.eye(n)
    norm0 = np.linalg.norm(a)
    if norm0 == 0 or n == 1:
        vals = np.diag(a).copy()
        order = np.argsort(vals)[::-1]
        return vals[order], v[:, order]
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * norm0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-14 * norm0:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                elif theta == 0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    vals = np.diag(a).copy()
    order = np.argsort(vals)[::-1]
    return vals[order], v[:, order]


def classical_mds(dist: np.ndarray, dim: int = 2) -> Embedding2D:
    """Embed a distance matrix into `dim` coordinates by double centering.

    Negative eigenvalues (non-Euclidean input) are clamped to zero; the
    residual shows up in the stress value instead.
    """
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n):
        raise ValueError("distance matrix must be square")
    if not np.isfinite(d).all():
        raise ValueError("distance matrix must be finite; embed one component at a time")
    if not np.allclose(d, d.T, atol=1e-9 * (1 + np.abs(d).max())):
        raise ValueError("distance matrix must be symmetric")
    if n == 0:
        return Embedding2D(np.zeros((0, dim)), np.zeros(dim), 0.0)

    d2 = d * d
    row_mean = d2.mean(axis=1, keepdims=True)
    b = -0.5 * (d2 - row_mean - row_mean.T + d2.mean())
    vals, vecs = jacobi_eigh(b)
    used = np.maximum(vals[:dim], 0.0)
    coords = vecs[:, :dim] * np.sqrt(used)[None, :]
    coords = coords - coords.mean(axis=0, keepdims=True)

    emb = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=-1)
    iu, ju = np.triu_indices(n, 1)
    denom = float(np.sum(d[iu, ju] ** 2))
    if denom == 0:
        stress = 0.0
    else:
        stress = float(np.sqrt(np.sum((emb[iu, ju] - d[iu, ju]) ** 2) / denom))
    return Embedding2D(coords, used, stress)
