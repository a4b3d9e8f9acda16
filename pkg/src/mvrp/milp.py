"""Time-indexed 0/1 model of a single-vehicle tour.

Variables ``x[i, j, t]`` (1-based, ``i != j``) are 1 when the arc ``i -> j``
is travelled at step ``t`` of the route.  Rows:

* ``c2_t<t>``      one arc per step:               sum_ij x[i,j,t] = 1
* ``c3_i<i>``      every city is left once:         sum_jt x[i,j,t] = 1
* ``c4_j<j>``      every city is entered once:      sum_it x[i,j,t] = 1
* ``c5_j<j>_t<t>`` the city entered at step t is left at step t+1 (t+1 wraps
  to 1 after step n):  sum_i x[i,j,t] - sum_k x[j,k,t+1] = 0

The objective is ``sum d[i][j] x[i,j,t]`` over all ordered pairs ``i != j``.
The model is never solved here; it is exported in LP format and used to
check candidate solutions.  Rows are generated lazily because the variable
count grows as ``n^2 (n - 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from itertools import islice
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import IncompleteTour, InvalidParameter
from .instance import DistanceMatrix, Instance

Var = tuple[int, int, int]

LP_TERMS_PER_LINE = 6


@dataclass(frozen=True)
class Row:
    name: str
    terms: list[tuple[int, Var]]  # (coefficient, variable)
    rhs: int


class IlpModel:
    def __init__(self, n: int, d: np.ndarray, labels: Sequence[int] | None = None):
        if n < 2:
            raise InvalidParameter("the model needs at least 2 cities")
        self.n = n
        self.d = np.asarray(d, dtype=np.float64)
        # original city id of model index k+1
        self.labels = list(labels) if labels is not None else list(range(1, n + 1))

    @property
    def variable_count(self) -> int:
        return self.n * (self.n - 1) * self.n

    @property
    def row_count(self) -> int:
        return 3 * self.n + self.n * self.n

    def variables(self) -> Iterator[Var]:
        n = self.n
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    continue
                for t in range(1, n + 1):
                    yield (i, j, t)

    def cost(self, i: int, j: int) -> float:
        return float(self.d[i - 1, j - 1])

    def objective(self) -> Iterator[tuple[float, Var]]:
        for v in self.variables():
            yield self.cost(v[0], v[1]), v

    def rows(self) -> Iterator[Row]:
        n = self.n
        cities = range(1, n + 1)
        steps = range(1, n + 1)
        for t in steps:
            yield Row(f"c2_t{t}", [(1, (i, j, t)) for i in cities for j in cities if i != j], 1)
        for i in cities:
            yield Row(f"c3_i{i}", [(1, (i, j, t)) for j in cities if j != i for t in steps], 1)
        for j in cities:
            yield Row(f"c4_j{j}", [(1, (i, j, t)) for i in cities if i != j for t in steps], 1)
        for j in cities:
            for t in steps:
                nxt = t % n + 1
                terms = [(1, (i, j, t)) for i in cities if i != j]
                terms += [(-1, (j, k, nxt)) for k in cities if k != j]
                yield Row(f"c5_j{j}_t{t}", terms, 0)


def build_model(inst: Instance, dm: DistanceMatrix | None = None) -> IlpModel:
    """Model over all cities of ``inst``; model index k is the k-th city in file order."""
    if inst.n < 2:
        raise InvalidParameter("the model needs at least 2 cities")
    if dm is None:
        dm = DistanceMatrix(inst)
    return IlpModel(inst.n, dm.submatrix(inst.ids), labels=inst.ids)


def var_name(v: Var) -> str:
    return f"x_{v[0]}_{v[1]}_{v[2]}"


@dataclass(frozen=True)
class IndicatorSolution:
    """Values of the nonzero variables; absent variables are 0."""

    assignment: Mapping[Var, int]

    def ones(self) -> list[Var]:
        return sorted(v for v, val in self.assignment.items() if val == 1)


def tour_to_indicators(tour: Sequence[int], depot_id: int, inst: Instance) -> IndicatorSolution:
    """Encode the closed route ``depot -> tour -> depot``; step t uses the t-th arc."""
    index = {cid: k + 1 for k, cid in enumerate(inst.ids)}
    missing = set(inst.customer_ids) - set(tour)
    if missing:
        raise IncompleteTour(f"tour misses cities {sorted(missing)}")
    if len(tour) != len(set(tour)) or depot_id in tour or not set(tour) <= set(index):
        raise IncompleteTour("tour must visit every non-depot city exactly once")
    stops = [depot_id, *tour, depot_id]
    arcs = {}
    for t, (a, b) in enumerate(zip(stops, stops[1:]), start=1):
        arcs[(index[a], index[b], t)] = 1
    return IndicatorSolution(arcs)


@dataclass(frozen=True)
class Verdict:
    feasible: bool
    violated: str | None
    objective: float

    def __str__(self):
        if self.feasible:
            return f"FEASIBLE Z={self.objective!r}"
        return f"INFEASIBLE at {self.violated} (Z={self.objective!r})"


def check_feasibility(sol: IndicatorSolution, model: IlpModel) -> Verdict:
    """Evaluate every row and the 0/1 bounds; report the first violated row."""
    n = model.n
    x = {}
    for v, val in sol.assignment.items():
        i, j, t = v
        if not (1 <= i <= n and 1 <= j <= n and 1 <= t <= n) or i == j:
            raise InvalidParameter(f"{var_name(v)} is not a model variable")
        x[v] = val
    z = math.fsum(model.cost(i, j) * val for (i, j, _), val in x.items())

    for v in sorted(x):
        if x[v] not in (0, 1):
            return Verdict(False, f"bounds_{var_name(v)}", z)
    for row in model.rows():
        lhs = sum(coef * x.get(v, 0) for coef, v in row.terms)
        if lhs != row.rhs:
            return Verdict(False, row.name, z)
    return Verdict(True, None, z)


def _wrap_terms(terms: Iterable[str]) -> Iterator[str]:
    it = iter(terms)
    while chunk := list(islice(it, LP_TERMS_PER_LINE)):
        yield "   " + " ".join(chunk)


def _signed(coef, name, first):
    if isinstance(coef, float):
        mag = format(abs(coef), ".17g") + " "
    else:
        mag = "" if abs(coef) == 1 else f"{abs(coef)} "
    if coef < 0:
        return f"- {mag}{name}"
    return f"{mag}{name}" if first else f"+ {mag}{name}"


def _expr(pairs):
    return (_signed(c, var_name(v), k == 0) for k, (c, v) in enumerate(pairs))


def iter_lp_lines(model: IlpModel) -> Iterator[str]:
    yield f"\\ time-indexed tour model: n = {model.n}, {model.variable_count} binaries, {model.row_count} rows"
    yield "\\ objective sums d(i,j) over all ordered pairs i != j at every step; self-loops are excluded"
    yield "\\ step n is followed by step 1 in the c5 continuity rows"
    yield "Minimize"
    yield " obj:"
    yield from _wrap_terms(_expr(model.objective()))
    yield "Subject To"
    for row in model.rows():
        yield f" {row.name}:"
        lines = list(_wrap_terms(_expr(row.terms)))
        lines[-1] += f" = {row.rhs}"
        yield from lines
    yield "Binaries"
    yield from _wrap_terms(var_name(v) for v in model.variables())
    yield "End"


def export_lp(model: IlpModel, path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        for line in iter_lp_lines(model):
            fh.write(line)
            fh.write("\n")
