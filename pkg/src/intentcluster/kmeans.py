"""k-means for the analyst-specified-k branch: k-means++ seeding, Lloyd iterations.

Deterministic for a fixed seed. Empty clusters are re-seeded with the point
farthest from its assigned centroid, so the result always has k non-empty
clusters. Inertia is checked to be non-increasing on every iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .community import Partition

DEFAULT_FIXED_K = 250  # service default when the analyst picks k-means without a k


@dataclass
class KmeansResult:
    partition: Partition
    centroids: np.ndarray
    inertia: float
    iterations: int
    inertia_history: list[float]


def _assigned_dists(x: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> np.ndarray:
    diff = x - centroids[labels]
    return np.einsum("ij,ij->i", diff, diff)


def _sq_dists(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d = (
        np.einsum("ij,ij->i", x, x)[:, None]
        + np.einsum("ij,ij->i", centroids, centroids)[None, :]
        - 2.0 * (x @ centroids.T)
    )
    np.maximum(d, 0.0, out=d)
    return d


def _kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = x[first]
    closest = np.einsum("ij,ij->i", x - centroids[0], x - centroids[0])
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            probs = closest / total
            pick = int(rng.choice(n, p=probs))
        else:
            pick = int(rng.integers(n))  # all points coincide with a centroid
        centroids[c] = x[pick]
        d = np.einsum("ij,ij->i", x - centroids[c], x - centroids[c])
        np.minimum(closest, d, out=closest)
    return centroids


def kmeans(
    matrix: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    n_init: int = 1,
) -> KmeansResult:
    """Cluster rows of ``matrix`` into exactly k non-empty clusters.

    Assignment ties go to the smaller centroid index. With ``n_init > 1`` the
    best of several seeded restarts (lowest inertia) is returned.
    """
    n = matrix.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k must be <= number of points ({k} > {n})")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    x = np.ascontiguousarray(matrix, dtype=np.float64)
    best: KmeansResult | None = None
    for run in range(n_init):
        rng = np.random.default_rng((seed, run))
        result = _kmeans_single(x, k, rng, max_iter)
        if best is None or result.inertia < best.inertia:
            best = result
    return best


def _kmeans_single(
    x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int
) -> KmeansResult:
    n = x.shape[0]
    centroids = _kmeanspp_init(x, k, rng)
    prev_labels: np.ndarray | None = None
    prev_inertia = np.inf
    history: list[float] = []
    iterations = 0

    for _ in range(max_iter):
        iterations += 1
        d = _sq_dists(x, centroids)
        labels = np.argmin(d, axis=1)  # first minimum -> smaller centroid index

        counts = np.bincount(labels, minlength=k)
        while (counts == 0).any():
            # Re-seed each empty cluster with the point farthest from its
            # centroid, drawn from multi-member clusters, then move only the
            # strictly-closer points across. The seeded point is pinned at
            # distance zero, so every pass permanently fills one cluster and
            # the loop is bounded even when points are duplicated.
            empty = int(np.flatnonzero(counts == 0)[0])
            point_d = _assigned_dists(x, centroids, labels)
            eligible = counts[labels] > 1
            farthest = int(np.argmax(np.where(eligible, point_d, -np.inf)))
            centroids[empty] = x[farthest]
            diff = x - centroids[empty]
            new_col = np.einsum("ij,ij->i", diff, diff)
            labels = np.where(new_col < point_d, empty, labels)
            labels[farthest] = empty
            counts = np.bincount(labels, minlength=k)

        # exact per-point form (not the expansion) so coincident points
        # contribute exactly zero
        inertia = float(_assigned_dists(x, centroids, labels).sum())
        if inertia > prev_inertia * (1.0 + 1e-12) + 1e-9:
            raise AssertionError(
                f"inertia increased: {prev_inertia} -> {inertia}"
            )
        history.append(inertia)
        prev_inertia = inertia

        if prev_labels is not None and np.array_equal(labels, prev_labels):
            break
        prev_labels = labels

        sums = np.zeros((k, x.shape[1]), dtype=np.float64)
        np.add.at(sums, labels, x)
        centroids = sums / counts[:, None]

    partition = Partition(assignment=labels.astype(np.int64), method="kmeans")
    return KmeansResult(
        partition=partition,
        centroids=centroids,
        inertia=history[-1],
        iterations=iterations,
        inertia_history=history,
    )
