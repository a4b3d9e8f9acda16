"""Simulated annealing and tabu search over the 2-opt neighborhood.

Both work on the depot-anchored path ``depot, c1, ..., cm, depot``.  The move
``(i, j)`` with ``0 <= i < j < m`` reverses tour positions ``i..j``; its
length change only involves the two edges entering and leaving the segment.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numba
import numpy as np

from .errors import InvalidParameter
from .ga import trace_to_csv
from .instance import DistanceMatrix, LocalMetric
from .rng import make_rng


@dataclass(frozen=True)
class AnnealParams:
    # None means "derive from the cluster": mean pairwise distance among the
    # depot and cluster cities, and 100 moves per city respectively
    initial_temp: float | None = None
    cooling_rate: float = 0.995
    steps_per_temp: int | None = None
    min_temp: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.cooling_rate < 1.0:
            raise InvalidParameter("cooling_rate must lie in (0, 1)")
        if not self.min_temp > 0.0:
            raise InvalidParameter("min_temp must be positive")
        if self.initial_temp is not None and not self.initial_temp > self.min_temp:
            raise InvalidParameter("initial_temp must exceed min_temp")
        if self.steps_per_temp is not None and self.steps_per_temp < 1:
            raise InvalidParameter("steps_per_temp must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class TabuParams:
    tenure: int | None = None  # None: ceil(cluster size / 2)
    max_iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.tenure is not None and self.tenure < 1:
            raise InvalidParameter("tenure must be at least 1")
        if self.max_iterations < 1:
            raise InvalidParameter("max_iterations must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass
class SearchTrace:
    """Per-step records ``(step, best_length, current_length)``.

    Written with the same CSV header as the GA trace; the third column holds
    the current tour length instead of a population mean.
    """

    records: list[tuple[int, float, float]] = field(default_factory=list)
    temperatures: list[float] = field(default_factory=list)
    # largest length increase of any accepted move
    max_accepted_increase: float = 0.0

    @property
    def best_lengths(self):
        return [r[1] for r in self.records]

    def __len__(self):
        return len(self.records)

    def to_csv(self) -> str:
        return trace_to_csv(self.records)


def two_opt_neighbor(tour: Sequence[int], i: int, j: int) -> list[int]:
    """``tour`` with positions ``i..j`` (inclusive) reversed."""
    tour = list(tour)
    if not 0 <= i < j < len(tour):
        raise InvalidParameter(f"need 0 <= i < j < {len(tour)}, got ({i}, {j})")
    tour[i : j + 1] = tour[i : j + 1][::-1]
    return tour


def _start(ids, rng):
    return [ids[k] for k in rng.permutation(len(ids))]


def _path(metric: LocalMetric, tour) -> np.ndarray:
    return np.array([0] + [metric.local[c] for c in tour] + [0], dtype=np.int64)


def _tour(metric: LocalMetric, path) -> list[int]:
    return [metric.ids[k - 1] for k in path[1:-1]]


@numba.njit(cache=True)
def _anneal_level(d, path, best_path, i_arr, j_arr, u_arr, temp, cur, best):
    max_up = 0.0
    for s in range(i_arr.shape[0]):
        a = i_arr[s]
        b = j_arr[s]
        p = path[a]
        q = path[a + 1]
        r = path[b + 1]
        t = path[b + 2]
        delta = d[p, r] + d[q, t] - d[p, q] - d[r, t]
        if delta < 0.0 or u_arr[s] < math.exp(-delta / temp):
            lo = a + 1
            hi = b + 1
            while lo < hi:
                tmp = path[lo]
                path[lo] = path[hi]
                path[hi] = tmp
                lo += 1
                hi -= 1
            cur += delta
            if delta > max_up:
                max_up = delta
            if cur < best:
                best = cur
                best_path[:] = path
    return cur, best, max_up


def _draw_pairs(m, size, rng):
    i = rng.integers(0, m, size=size)
    j = rng.integers(0, m - 1, size=size)
    j = j + (j >= i)
    return np.minimum(i, j), np.maximum(i, j)


def default_initial_temp(metric: LocalMetric) -> float:
    d = metric.matrix
    iu = np.triu_indices(len(d), k=1)
    return float(d[iu].mean()) if len(iu[0]) else 0.0


def simulated_annealing(
    cluster_city_ids: Sequence[int],
    params: AnnealParams,
    dm: DistanceMatrix,
    depot_id: int,
):
    """Metropolis search over random 2-opt moves with geometric cooling.

    Returns ``(best_tour, trace)``; the trace has one record per temperature
    level.
    """
    ids = list(cluster_city_ids)
    if not ids:
        raise InvalidParameter("cannot optimize an empty cluster")
    rng = make_rng(params.seed)
    metric = LocalMetric(dm, depot_id, ids)
    tour = _start(ids, rng)
    cur = metric.length(tour)
    trace = SearchTrace()
    m = len(ids)
    if m < 2:
        trace.records.append((0, cur, cur))
        return tour, trace

    temp = params.initial_temp
    if temp is None:
        temp = default_initial_temp(metric)
    temp = max(temp, params.min_temp)
    steps = params.steps_per_temp or 100 * m

    d = np.ascontiguousarray(metric.matrix)
    path = _path(metric, tour)
    best_path = path.copy()
    best = cur
    level = 0
    while True:
        i_arr, j_arr = _draw_pairs(m, steps, rng)
        u_arr = rng.random(steps)
        cur, best, up = _anneal_level(d, path, best_path, i_arr, j_arr, u_arr, temp, cur, best)
        trace.temperatures.append(temp)
        trace.max_accepted_increase = max(trace.max_accepted_increase, up)
        trace.records.append((level, best, cur))
        level += 1
        temp *= params.cooling_rate
        if temp < params.min_temp:
            break

    return _tour(metric, best_path), trace


def tabu_search(
    cluster_city_ids: Sequence[int],
    params: TabuParams,
    dm: DistanceMatrix,
    depot_id: int,
):
    """Steepest-descent tabu search over the full 2-opt neighborhood.

    After move ``(i, j)`` is applied, applying it again (which would undo it)
    is tabu for ``tenure`` iterations unless it yields a new best length.
    Ties between equally good moves go to the lowest ``(i, j)``.
    """
    ids = list(cluster_city_ids)
    if not ids:
        raise InvalidParameter("cannot optimize an empty cluster")
    rng = make_rng(params.seed)
    metric = LocalMetric(dm, depot_id, ids)
    tour = _start(ids, rng)
    cur = metric.length(tour)
    trace = SearchTrace()
    m = len(ids)
    if m < 2:
        trace.records.append((0, cur, cur))
        return tour, trace

    tenure = params.tenure or math.ceil(m / 2)
    d = metric.matrix
    ii, jj = np.triu_indices(m, k=1)
    tabu_until = np.zeros(len(ii), dtype=np.int64)
    path = _path(metric, tour)
    best, best_path = cur, path.copy()
    trace.records.append((0, best, cur))

    for it in range(1, params.max_iterations + 1):
        p, q, r, t = path[ii], path[ii + 1], path[jj + 1], path[jj + 2]
        delta = d[p, r] + d[q, t] - d[p, q] - d[r, t]
        allowed = (tabu_until < it) | (cur + delta < best)
        if allowed.any():
            k = int(np.argmin(np.where(allowed, delta, np.inf)))
            a, b = ii[k] + 1, jj[k] + 1
            path[a : b + 1] = path[a : b + 1][::-1]
            cur += float(delta[k])
            trace.max_accepted_increase = max(trace.max_accepted_increase, float(delta[k]))
            tabu_until[k] = it + tenure
            if cur < best:
                best, best_path = cur, path.copy()
        trace.records.append((it, best, cur))

    best_tour = _tour(metric, best_path)
    return best_tour, trace
