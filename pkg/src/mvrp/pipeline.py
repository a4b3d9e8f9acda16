"""Cluster-first route-second orchestration behind the command line.

``solve`` clusters an instance with k-means and optimizes every cluster's tour
with one algorithm; ``bench`` does this for several algorithms and seeds,
reusing one clustering per seed so every algorithm sees the same clusters.

Seeds: the k-means stage uses ``derive_seed(seed, "cluster")`` and cluster
``v`` (0-based) of algorithm ``alg`` uses ``derive_seed(seed, alg, v)``.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import baselines, exact, ga
from .clustering import ClusterAssignment, kmeans
from .errors import InvalidParameter, MvrpError, ParseError
from .instance import DistanceMatrix, Instance, format_instance, generate_random_instance, read_instance, tour_length
from .rng import derive_seed

SCHEMA_VERSION = 1
ALGORITHMS = ("ga", "sa", "tabu", "exact")


@dataclass
class RunConfig:
    instance: str | None = None  # path; when None an instance is generated
    n: int = 180
    side: float = 35.0
    depot: int = 100
    k: int = 6
    algorithm: str = "ga"
    seed: int = 0
    out_dir: str = "out"
    restarts: int = 10
    max_iter: int = 100
    init: str = "farthest"
    workers: int = 1
    exact_cap: int = exact.DEFAULT_CAP
    ga: ga.GaParams = field(default_factory=ga.GaParams)
    sa: baselines.AnnealParams = field(default_factory=baselines.AnnealParams)
    tabu: baselines.TabuParams = field(default_factory=baselines.TabuParams)

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParameter("k must be at least 1")
        if self.algorithm not in ALGORITHMS:
            raise InvalidParameter(f"algorithm must be one of {', '.join(ALGORITHMS)}")

    def load_instance(self, seed: int | None = None) -> Instance:
        if self.instance is not None:
            return read_instance(self.instance)
        return generate_random_instance(self.n, self.side, self.depot, self.seed if seed is None else seed)

    def algorithm_params(self, algorithm: str) -> dict:
        if algorithm == "exact":
            return {"cap": self.exact_cap}
        params = getattr(self, algorithm).to_dict()
        params.pop("seed")
        return params


def _coerce(value: str, current):
    if isinstance(current, bool):
        return value.lower() in ("1", "true", "yes")
    if isinstance(current, int):
        return int(value)
    if isinstance(current, float):
        return float(value)
    if current is None:
        if value.lower() == "none":
            return None
        for cast in (int, float):
            try:
                return cast(value)
            except ValueError:
                pass
    return value


def apply_overrides(config: RunConfig, overrides: dict[str, str]) -> RunConfig:
    """Apply ``key=value`` overrides; nested parameters use ``ga.mutation_prob`` style keys."""
    top = {}
    nested: dict[str, dict] = {}
    for key, value in overrides.items():
        if "." in key:
            group, name = key.split(".", 1)
            if group not in ("ga", "sa", "tabu"):
                raise InvalidParameter(f"unknown parameter group {group!r}")
            params = getattr(config, group)
            if name not in {f.name for f in dataclasses.fields(params)} or name == "seed":
                raise InvalidParameter(f"unknown parameter {key!r}")
            nested.setdefault(group, {})[name] = _coerce(value, getattr(params, name))
        else:
            names = {f.name for f in dataclasses.fields(config)} - {"ga", "sa", "tabu"}
            if key not in names:
                raise InvalidParameter(f"unknown setting {key!r}")
            top[key] = _coerce(value, getattr(config, key))
    for group, values in nested.items():
        top[group] = dataclasses.replace(getattr(config, group), **values)
    return dataclasses.replace(config, **top)


def read_config_file(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameter(f"{path}:{no}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def instance_digest(inst: Instance) -> str:
    return hashlib.sha256(format_instance(inst).encode()).hexdigest()


def assignment_digest(assignment: ClusterAssignment) -> str:
    payload = json.dumps(assignment.clusters(), separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class VehicleResult:
    vehicle: int
    cluster: list[int]
    tour: list[int]
    distance: float
    trace: list[tuple[int, float, float]]
    seconds: float


def optimize_cluster(algorithm, cluster, dm, depot_id, config: RunConfig, seed: int):
    """Run one algorithm on one cluster; returns ``(tour, trace_records)``."""
    if algorithm == "ga":
        tour, trace = ga.run_ga(cluster, dataclasses.replace(config.ga, seed=seed), dm, depot_id)
    elif algorithm == "sa":
        tour, trace = baselines.simulated_annealing(cluster, dataclasses.replace(config.sa, seed=seed), dm, depot_id)
    elif algorithm == "tabu":
        tour, trace = baselines.tabu_search(cluster, dataclasses.replace(config.tabu, seed=seed), dm, depot_id)
    elif algorithm == "exact":
        res = exact.brute_force_tsp(cluster, dm, depot_id, cap=config.exact_cap)
        return res.best_tour, [(0, res.best_length, res.best_length)]
    else:
        raise InvalidParameter(f"unknown algorithm {algorithm!r}")
    return tour, trace.records


def _solve_one(args):
    algorithm, v, cluster, inst, config, master_seed = args
    dm = DistanceMatrix(inst)
    start = time.perf_counter()
    tour, records = optimize_cluster(algorithm, cluster, dm, inst.depot_id, config, seed_for(master_seed, algorithm, v))
    return VehicleResult(
        vehicle=v + 1,
        cluster=list(cluster),
        tour=list(tour),
        distance=tour_length(tour, inst.depot_id, dm),
        trace=records,
        seconds=time.perf_counter() - start,
    )


def seed_for(master_seed: int, algorithm: str, cluster_index: int) -> int:
    return derive_seed(master_seed, algorithm, cluster_index)


def cluster_instance(inst: Instance, config: RunConfig, seed: int | None = None) -> ClusterAssignment:
    master = config.seed if seed is None else seed
    return kmeans(inst, config.k, derive_seed(master, "cluster"), config.max_iter, config.restarts, config.init)


def route_clusters(
    inst: Instance,
    assignment: ClusterAssignment,
    algorithm: str,
    config: RunConfig,
    master_seed: int,
) -> list[VehicleResult]:
    """Optimize every cluster; results are ordered by cluster index whatever the worker count."""
    jobs = [(algorithm, v, cl, inst, config, master_seed) for v, cl in enumerate(assignment.clusters())]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_solve_one, jobs))
    return [_solve_one(job) for job in jobs]


def trace_filename(vehicle: int) -> str:
    return f"trace_vehicle_{vehicle}.csv"


def solve(config: RunConfig, inst: Instance | None = None, write: bool = True) -> dict:
    """Cluster, route and (optionally) write ``report.json``, traces and ``instance.txt``."""
    t0 = time.perf_counter()
    if inst is None:
        inst = config.load_instance()
    if config.k > len(inst.customer_ids):
        raise InvalidParameter(f"k={config.k} exceeds the {len(inst.customer_ids)} non-depot cities")
    assignment = cluster_instance(inst, config)
    t1 = time.perf_counter()
    vehicles = route_clusters(inst, assignment, config.algorithm, config, config.seed)
    t2 = time.perf_counter()

    report = {
        "schema_version": SCHEMA_VERSION,
        "instance_digest": instance_digest(inst),
        "instance_file": "instance.txt",
        "depot_id": inst.depot_id,
        "k": config.k,
        "algorithm": config.algorithm,
        "params": config.algorithm_params(config.algorithm),
        "master_seed": config.seed,
        "clustering": {
            "init": config.init,
            "restarts": config.restarts,
            "max_iter": config.max_iter,
            "wcss": assignment.wcss,
            "iterations": assignment.iterations,
            "sizes": assignment.sizes(),
            "digest": assignment_digest(assignment),
        },
        "vehicles": [
            {
                "vehicle": r.vehicle,
                "cluster": r.cluster,
                "tour": r.tour,
                "distance": r.distance,
                "trace_file": trace_filename(r.vehicle),
            }
            for r in vehicles
        ],
        "total_distance": math.fsum(r.distance for r in vehicles),
        # the only field allowed to differ between identical runs
        "volatile": {
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "wall_clock_s": {
                "clustering": t1 - t0,
                "routing": t2 - t1,
                "per_vehicle": [r.seconds for r in vehicles],
            },
        },
    }
    if write:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "instance.txt").write_text(format_instance(inst), encoding="utf-8", newline="\n")
        for r in vehicles:
            (out / trace_filename(r.vehicle)).write_text(ga.trace_to_csv(r.trace), encoding="utf-8", newline="\n")
        write_report(report, out / "report.json")
    return report


def write_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8", newline="\n")


def read_report(path) -> dict:
    try:
        report = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid report JSON: {exc.msg}", exc.lineno, str(path)) from None
    if report.get("schema_version") != SCHEMA_VERSION or "vehicles" not in report:
        raise ParseError("not a solve report", path=str(path))
    return report


@dataclass
class BenchResult:
    algorithms: list[str]
    seeds: list[int]
    # (seed, algorithm) -> per-vehicle distances, or None when the run failed
    cells: dict[tuple[int, str], list[float] | None]
    errors: dict[tuple[int, str], str]
    cluster_digests: dict[int, str]
    k: int

    def total(self, seed, algorithm):
        dists = self.cells[(seed, algorithm)]
        return None if dists is None else math.fsum(dists)

    def totals(self, algorithm):
        return [t for s in self.seeds if (t := self.total(s, algorithm)) is not None]

    def to_csv(self) -> str:
        lines = ["seed,algorithm,vehicle,distance,clusters_digest"]
        for s in self.seeds:
            for alg in self.algorithms:
                dists = self.cells[(s, alg)]
                digest = self.cluster_digests[s]
                if dists is None:
                    lines.append(f"{s},{alg},total,FAILED,{digest}")
                    continue
                for v, d in enumerate(dists, 1):
                    lines.append(f"{s},{alg},{v},{d!r},{digest}")
                lines.append(f"{s},{alg},total,{math.fsum(dists)!r},{digest}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        out = []
        width = 12
        head = "Vehicle".ljust(8) + "".join(a.upper().rjust(width) for a in self.algorithms)
        for s in self.seeds:
            out.append(f"seed {s}")
            out.append(head)
            for v in range(self.k):
                row = str(v + 1).ljust(8)
                for alg in self.algorithms:
                    dists = self.cells[(s, alg)]
                    row += ("FAILED" if dists is None else f"{dists[v]:.4f}").rjust(width)
                out.append(row)
            row = "Total".ljust(8)
            for alg in self.algorithms:
                t = self.total(s, alg)
                row += ("FAILED" if t is None else f"{t:.4f}").rjust(width)
            out.append(row)
            out.append("")
        out.append("Algorithm".ljust(10) + "runs".rjust(6) + "mean total".rjust(14) + "min total".rjust(14) + "best on".rjust(9))
        for alg in self.algorithms:
            totals = self.totals(alg)
            wins = sum(
                1
                for s in self.seeds
                if (t := self.total(s, alg)) is not None
                and all(t <= o for a in self.algorithms if (o := self.total(s, a)) is not None)
            )
            mean = f"{math.fsum(totals) / len(totals):.4f}" if totals else "-"
            low = f"{min(totals):.4f}" if totals else "-"
            out.append(alg.ljust(10) + str(len(totals)).rjust(6) + mean.rjust(14) + low.rjust(14) + str(wins).rjust(9))
        return "\n".join(out) + "\n"


def bench(config: RunConfig, algorithms: Sequence[str], seeds: Sequence[int], write: bool = True) -> BenchResult:
    """Every algorithm on every seed; one shared clustering per seed.

    When no instance file is given each seed gets its own instance; with an instance
    file the seed only changes clustering and optimizer randomness.
    """
    if not algorithms or not seeds:
        raise InvalidParameter("bench needs at least one algorithm and one seed")
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise InvalidParameter(f"unknown algorithm {alg!r}")
    cells, errors, digests = {}, {}, {}
    for s in seeds:
        inst = config.load_instance(seed=s)
        assignment = cluster_instance(inst, config, seed=s)
        digests[s] = assignment_digest(assignment)
        for alg in algorithms:
            try:
                results = route_clusters(inst, assignment, alg, config, s)
                cells[(s, alg)] = [r.distance for r in results]
            except MvrpError as exc:
                cells[(s, alg)] = None
                errors[(s, alg)] = str(exc)
    result = BenchResult(list(algorithms), list(seeds), cells, errors, digests, config.k)
    if write:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.csv").write_text(result.to_csv(), encoding="utf-8", newline="\n")
        (out / "bench.txt").write_text(result.to_text(), encoding="utf-8", newline="\n")
    return result
