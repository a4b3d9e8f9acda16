"""k-means decomposition of the customers into one group per vehicle.

The depot is left out of the clustering; every vehicle starts and ends there
anyway.  Lloyd iterations stop when the labels repeat, and the best of several
independently seeded restarts (lowest within-cluster sum of squares) is kept.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .instance import Instance
from .rng import derive_seed, make_rng


@dataclass(frozen=True)
class Centroid:
    x: float
    y: float


@dataclass
class ClusterAssignment:
    k: int
    labels: dict[int, int]
    centroids: list[Centroid]
    wcss: float
    iterations: int
    # wcss after each Lloyd iteration of the winning restart
    history: list[float] = field(default_factory=list)
    # final wcss of every restart, in restart order
    restart_wcss: list[float] = field(default_factory=list)
    restart: int = 0

    def clusters(self) -> list[list[int]]:
        """City ids of each cluster, in label order then city order."""
        out = [[] for _ in range(self.k)]
        for cid, lab in self.labels.items():
            out[lab].append(cid)
        return out

    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters()]


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidParameter("points must be an (m, 2) array")
    return pts


def _centroid_array(centroids) -> np.ndarray:
    if len(centroids) and isinstance(centroids[0], Centroid):
        return np.array([(c.x, c.y) for c in centroids], dtype=np.float64)
    return _as_points(centroids)


def init_centroids_farthest(points, k: int, seed: int) -> list[Centroid]:
    """Farthest-point seeding.

    The first centroid is a point chosen by ``seed``; each further one is the
    point whose distance to the nearest chosen centroid is largest (lowest
    index on ties).
    """
    pts = _as_points(points)
    if k < 1 or k > len(pts):
        raise InvalidParameter(f"need 1 <= k <= {len(pts)} points, got k={k}")
    rng = make_rng(seed)
    chosen = [int(rng.integers(len(pts)))]
    mind = ((pts - pts[chosen[0]]) ** 2).sum(axis=1)
    mind[chosen[0]] = -1.0
    while len(chosen) < k:
        nxt = int(np.argmax(mind))
        chosen.append(nxt)
        mind = np.minimum(mind, ((pts - pts[nxt]) ** 2).sum(axis=1))
        mind[chosen] = -1.0
    return [Centroid(float(pts[i, 0]), float(pts[i, 1])) for i in chosen]


def init_centroids_random(points, k: int, seed: int) -> list[Centroid]:
    pts = _as_points(points)
    if k < 1 or k > len(pts):
        raise InvalidParameter(f"need 1 <= k <= {len(pts)} points, got k={k}")
    idx = make_rng(seed).choice(len(pts), size=k, replace=False)
    return [Centroid(float(pts[i, 0]), float(pts[i, 1])) for i in idx]


def _sq_dists(pts: np.ndarray, cents: np.ndarray) -> np.ndarray:
    dx = pts[:, 0, None] - cents[None, :, 0]
    dy = pts[:, 1, None] - cents[None, :, 1]
    return dx * dx + dy * dy


def assign_points(points, centroids) -> np.ndarray:
    """Index of the nearest centroid for every point; ties go to the lowest index."""
    pts = _as_points(points)
    cents = _centroid_array(centroids)
    if len(cents) == 0:
        raise InvalidParameter("at least one centroid is required")
    return np.argmin(_sq_dists(pts, cents), axis=1)


def recompute_centroids(points, labels, k: int, previous=None) -> list[Centroid]:
    """Barycenter of each cluster.  An empty cluster keeps its ``previous`` centroid."""
    pts = _as_points(points)
    labels = np.asarray(labels)
    out = []
    for j in range(k):
        members = pts[labels == j]
        if len(members):
            m = members.mean(axis=0)
            out.append(Centroid(float(m[0]), float(m[1])))
        elif previous is not None:
            out.append(previous[j])
        else:
            raise InvalidParameter(f"cluster {j} is empty and has no previous centroid")
    return out


def within_cluster_ss(points, labels, centroids) -> float:
    pts = _as_points(points)
    cents = _centroid_array(centroids)
    diff = pts - cents[np.asarray(labels)]
    return float(np.sum(diff * diff))


def _repair_empty(pts, labels, cents, k):
    """Give each empty cluster one point so no vehicle is left without work.

    The empty cluster's centroid is matched to the nearest populated centroid,
    and the member of that cluster lying farthest from it is moved over (the
    point becomes the new centroid).  If the donor would be emptied, the donor
    is instead the populated cluster of size >= 2 holding the point farthest
    from its own centroid.
    """
    labels = labels.copy()
    cents = cents.copy()
    for j in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[j]:
            continue
        populated = np.flatnonzero(counts)
        d = ((cents[populated] - cents[j]) ** 2).sum(axis=1)
        donor = int(populated[np.argmin(d)])
        if counts[donor] < 2:
            sq = ((pts - cents[labels]) ** 2).sum(axis=1)
            sq[counts[labels] < 2] = -1.0
            pick = int(np.argmax(sq))
        else:
            members = np.flatnonzero(labels == donor)
            sq = ((pts[members] - cents[donor]) ** 2).sum(axis=1)
            pick = int(members[np.argmax(sq)])
        labels[pick] = j
        cents[j] = pts[pick]
    return labels, cents


def lloyd(points, initial, max_iter: int = 100):
    """Run Lloyd iterations from ``initial`` centroids.

    Returns ``(labels, centroids, wcss_history, iterations)``.
    """
    pts = _as_points(points)
    cents = _centroid_array(initial).copy()
    k = len(cents)
    labels = None
    history = []
    it = 0
    while it < max_iter:
        it += 1
        new = assign_points(pts, cents)
        new, cents = _repair_empty(pts, new, cents, k)
        cents = _centroid_array(recompute_centroids(pts, new, k, previous=[Centroid(*c) for c in cents]))
        history.append(within_cluster_ss(pts, new, cents))
        converged = labels is not None and np.array_equal(new, labels)
        labels = new
        if converged:
            break
    return labels, cents, history, it


def _canonical(labels, cents):
    # number clusters by first appearance in point order
    order = []
    for lab in labels:
        if lab not in order:
            order.append(int(lab))
    remap = {old: new for new, old in enumerate(order)}
    return np.array([remap[int(l)] for l in labels]), cents[order]


def kmeans(
    inst: Instance,
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    restarts: int = 10,
    init: str = "farthest",
) -> ClusterAssignment:
    """Cluster the non-depot cities of ``inst`` into ``k`` groups."""
    ids = inst.customer_ids
    if k < 1:
        raise InvalidParameter("k must be at least 1")
    if len(ids) < k:
        raise InvalidParameter(f"k={k} exceeds the {len(ids)} non-depot cities")
    if max_iter < 1 or restarts < 1:
        raise InvalidParameter("max_iter and restarts must be positive")
    if init not in ("farthest", "random"):
        raise InvalidParameter(f"unknown init mode {init!r}")
    seeder = init_centroids_farthest if init == "farthest" else init_centroids_random

    by_id = {c.id: c for c in inst.cities}
    pts = np.array([(by_id[i].x, by_id[i].y) for i in ids], dtype=np.float64)

    runs = []
    for r in range(restarts):
        start = seeder(pts, k, derive_seed(seed, "kmeans", r))
        labels, cents, history, it = lloyd(pts, start, max_iter)
        labels, cents = _canonical(labels, cents)
        runs.append((history[-1], r, labels, cents, history, it))

    wcss, best_r, labels, cents, history, it = min(runs, key=lambda run: (run[0], run[1]))
    return ClusterAssignment(
        k=k,
        labels={cid: int(lab) for cid, lab in zip(ids, labels)},
        centroids=[Centroid(float(x), float(y)) for x, y in cents],
        wcss=wcss,
        iterations=it,
        history=history,
        restart_wcss=[run[0] for run in runs],
        restart=best_r,
    )
