"""Seeded k-means with deterministic k-means++ initialization.

Shared by word clustering and the spectral partition step. Determinism for a
fixed seed matters more here than raw speed, hence a plain Lloyd loop.
"""

from __future__ import annotations

import numpy as np


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int,
    max_iters: int = 300,
    tol: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """Cluster rows of ``points`` into k groups; returns (labels, centroids).

    k-means++ seeding from ``numpy.random.default_rng(seed)``, then Lloyd
    updates until no centroid moves more than ``tol`` or ``max_iters``
    rounds pass. An emptied cluster is reseeded at the point farthest from
    its current centroid, so every returned label set is non-empty for
    distinct inputs.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError(f"points must be 2-D, got shape {points.shape}")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    rng = np.random.default_rng(seed)
    centroids = _plusplus_init(points, k, rng)
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iters):
        sq_dist = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = sq_dist.argmin(axis=1)
        moved = 0.0
        new_centroids = centroids.copy()
        for c in range(k):
            members = points[labels == c]
            if len(members):
                new_centroids[c] = members.mean(axis=0)
            else:
                farthest = int(sq_dist[np.arange(n), labels].argmax())
                new_centroids[c] = points[farthest]
            moved = max(moved, float(np.linalg.norm(new_centroids[c] - centroids[c])))
        centroids = new_centroids
        if moved < tol:
            break
    sq_dist = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = sq_dist.argmin(axis=1)
    return labels, centroids


def _plusplus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    first = int(rng.integers(n))
    chosen = [first]
    sq_dist = ((points - points[first]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = float(sq_dist.sum())
        if total <= 0.0:
            nxt = int(rng.integers(n))  # remaining points coincide with a centroid
        else:
            nxt = int(rng.choice(n, p=sq_dist / total))
        chosen.append(nxt)
        sq_dist = np.minimum(sq_dist, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[chosen].copy()
