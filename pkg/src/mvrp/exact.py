"""Exhaustive enumeration of every visiting order of a small cluster."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ClusterTooLarge, InvalidParameter
from .instance import DistanceMatrix, LocalMetric

DEFAULT_CAP = 10
_CHUNK = 200_000


@dataclass(frozen=True)
class ExactResult:
    best_tour: list[int]
    best_length: float
    permutations_examined: int


def brute_force_tsp(
    cluster_city_ids: Sequence[int],
    dm: DistanceMatrix,
    depot_id: int,
    cap: int = DEFAULT_CAP,
) -> ExactResult:
    """Shortest depot-anchored tour over ``cluster_city_ids``.

    Among optimal tours the lexicographically smallest id sequence is
    returned.  Lengths are screened in bulk with numpy and the near-optimal
    candidates are re-measured exactly with ``math.fsum``.
    """
    ids = sorted(cluster_city_ids)
    m = len(ids)
    if m == 0:
        raise InvalidParameter("empty cluster")
    if m > cap:
        raise ClusterTooLarge(f"cluster of {m} cities exceeds the exact-search cap of {cap}")
    metric = LocalMetric(dm, depot_id, ids)
    d = metric.matrix

    best_len = math.inf
    best_perm = None
    examined = 0
    # permutations() over sorted ids yields lexicographic order
    perms = itertools.permutations(range(1, m + 1))
    while True:
        block = np.array(list(itertools.islice(perms, _CHUNK)), dtype=np.intp)
        if block.size == 0:
            break
        examined += len(block)
        path = np.hstack([np.zeros((len(block), 1), np.intp), block, np.zeros((len(block), 1), np.intp)])
        approx = d[path[:, :-1], path[:, 1:]].sum(axis=1)
        lo = approx.min()
        if lo > best_len + 1e-9 * max(1.0, best_len):
            continue
        for row in np.flatnonzero(approx <= lo + 1e-9 * max(1.0, lo)):
            length = metric.local_length(block[row].tolist())
            if length < best_len:
                best_len = length
                best_perm = block[row].tolist()
    return ExactResult([ids[k - 1] for k in best_perm], best_len, examined)
