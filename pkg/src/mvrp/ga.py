"""Genetic algorithm for the tour of a single vehicle.

A chromosome is a permutation of the cluster's city ids; the depot is implied
at both ends.  Fitness is ``1 / length``.  Each generation:

1. the ``mating_pool_size`` fittest chromosomes form the mating pool;
2. every pool member is crossed (PMX) with the next fittest member with
   probability ``crossover_prob``; a child takes its parent's place only if it
   is strictly shorter;
3. every chromosome except the elite is mutated with probability
   ``mutation_prob``; a mutant is kept only if it is not longer;
4. the chromosomes outside the pool are carried over to the next generation,
   and any chromosome duplicating an earlier one is replaced by a fresh
   random permutation.

The search stops after ``max_generations`` or once the best length has not
improved for ``stall_generations`` generations.
"""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidParameter
from .instance import DistanceMatrix, LocalMetric
from .rng import make_rng

FITNESS_EPS = 1e-12


@dataclass(frozen=True)
class GaParams:
    population_size: int = 10
    mating_pool_size: int = 7
    crossover_prob: float = 0.8
    mutation_prob: float = 0.1
    max_generations: int = 300
    stall_generations: int = 50
    mutation: str = "swap"
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise InvalidParameter("population_size must be at least 2")
        if not 1 <= self.mating_pool_size <= self.population_size:
            raise InvalidParameter("mating_pool_size must lie in 1..population_size")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidParameter(f"{name} must lie in [0, 1]")
        if self.max_generations < 1 or self.stall_generations < 1:
            raise InvalidParameter("generation limits must be positive")
        if self.mutation not in MUTATIONS:
            raise InvalidParameter(f"unknown mutation operator {self.mutation!r}")

    def to_dict(self):
        return asdict(self)


def fitness(length: float) -> float:
    return 1.0 / max(length, FITNESS_EPS)


@dataclass(frozen=True)
class Chromosome:
    genes: tuple[int, ...]
    length: float

    @property
    def fitness(self) -> float:
        return fitness(self.length)


@dataclass
class GaTrace:
    records: list[tuple[int, float, float]] = field(default_factory=list)

    def add(self, generation, population):
        lengths = [c.length for c in population]
        self.records.append((generation, min(lengths), float(np.mean(lengths))))

    @property
    def best_lengths(self) -> list[float]:
        return [r[1] for r in self.records]

    def __len__(self):
        return len(self.records)

    def to_csv(self) -> str:
        return trace_to_csv(self.records)


def trace_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["generation", "best_length", "mean_length"])
    for gen, best, mean in records:
        w.writerow([gen, repr(float(best)), repr(float(mean))])
    return buf.getvalue()


def _evaluate(genes, metric: LocalMetric) -> Chromosome:
    genes = tuple(genes)
    return Chromosome(genes, metric.length(genes))


def init_population(
    cluster_city_ids: Sequence[int],
    params: GaParams,
    dm: DistanceMatrix,
    depot_id: int,
    rng: np.random.Generator | None = None,
    metric: LocalMetric | None = None,
) -> list[Chromosome]:
    """``population_size`` uniformly random permutations of the cluster."""
    ids = list(cluster_city_ids)
    if not ids:
        raise InvalidParameter("cannot build a population for an empty cluster")
    if rng is None:
        rng = make_rng(params.seed)
    if metric is None:
        metric = LocalMetric(dm, depot_id, ids)
    arr = np.array(ids)
    return [
        _evaluate(arr[rng.permutation(len(ids))].tolist(), metric)
        for _ in range(params.population_size)
    ]


def _ranking(population) -> list[int]:
    # fittest first, earlier index wins ties
    return sorted(range(len(population)), key=lambda i: (-population[i].fitness, i))


def select_mating_pool(population: Sequence[Chromosome], params: GaParams) -> list[Chromosome]:
    if not population:
        raise InvalidParameter("empty population")
    return [population[i] for i in _ranking(population)[: params.mating_pool_size]]


def pmx_crossover(parent_a, parent_b, cut1: int, cut2: int):
    """Partially matched crossover.

    ``child_a`` takes ``parent_b[cut1:cut2]`` and keeps ``parent_a``'s genes
    elsewhere; a gene outside the segment that already appears in it is
    replaced by following the position-wise mapping of the segment until a
    free gene is found.  ``child_b`` is built symmetrically.
    """
    a, b = list(parent_a), list(parent_b)
    n = len(a)
    if len(b) != n or sorted(a) != sorted(b) or len(set(a)) != n:
        raise InvalidParameter("parents must be permutations of the same genes")
    if not 0 <= cut1 < cut2 <= n:
        raise InvalidParameter(f"invalid cut points ({cut1}, {cut2}) for length {n}")
    return _pmx_child(a, b, cut1, cut2), _pmx_child(b, a, cut1, cut2)


def _pmx_child(base, donor, cut1, cut2):
    child = list(base)
    segment = donor[cut1:cut2]
    child[cut1:cut2] = segment
    # donor gene -> base gene at the same segment position
    mapping = dict(zip(segment, base[cut1:cut2]))
    for pos in list(range(cut1)) + list(range(cut2, len(base))):
        gene = base[pos]
        while gene in mapping:
            gene = mapping[gene]
        child[pos] = gene
    return child


def mutate_swap(genes, rng: np.random.Generator):
    """Exchange the genes at two distinct uniformly chosen positions."""
    out = list(genes)
    if len(out) < 2:
        return out
    i, j = rng.choice(len(out), size=2, replace=False)
    out[i], out[j] = out[j], out[i]
    return out


def mutate_inversion(genes, rng: np.random.Generator):
    """Reverse the segment between two distinct uniformly chosen positions."""
    out = list(genes)
    if len(out) < 2:
        return out
    i, j = sorted(rng.choice(len(out), size=2, replace=False))
    out[i : j + 1] = out[i : j + 1][::-1]
    return out


MUTATIONS = {"swap": mutate_swap, "inversion": mutate_inversion}


def draw_cuts(n: int, rng: np.random.Generator) -> tuple[int, int]:
    """Uniform ``0 <= cut1 < cut2 <= n``."""
    c1, c2 = sorted(rng.choice(n + 1, size=2, replace=False))
    return int(c1), int(c2)


def evolve_generation(
    population: Sequence[Chromosome],
    params: GaParams,
    dm: DistanceMatrix,
    depot_id: int,
    rng: np.random.Generator,
    metric: LocalMetric | None = None,
) -> list[Chromosome]:
    pop = list(population)
    if metric is None:
        metric = LocalMetric(dm, depot_id, pop[0].genes)
    ranking = _ranking(pop)
    elite = ranking[0]
    pool = ranking[: params.mating_pool_size]
    n = len(pop[0].genes)

    if n >= 2:
        for a, b in zip(pool, pool[1:]):
            if rng.random() >= params.crossover_prob:
                continue
            c1, c2 = draw_cuts(n, rng)
            child_a, child_b = pmx_crossover(pop[a].genes, pop[b].genes, c1, c2)
            child_a, child_b = _evaluate(child_a, metric), _evaluate(child_b, metric)
            if child_a.length < pop[a].length:
                pop[a] = child_a
            if child_b.length < pop[b].length:
                pop[b] = child_b

    mutate = MUTATIONS[params.mutation]
    for i in range(len(pop)):
        if i == elite or rng.random() >= params.mutation_prob:
            continue
        mutant = _evaluate(mutate(pop[i].genes, rng), metric)
        if mutant.length <= pop[i].length:
            pop[i] = mutant
    return _refill_duplicates(pop, rng, metric)


def _refill_duplicates(pop, rng, metric):
    seen = set()
    for i, c in enumerate(pop):
        if c.genes in seen:
            genes = np.array(c.genes)[rng.permutation(len(c.genes))].tolist()
            pop[i] = _evaluate(genes, metric)
        else:
            seen.add(c.genes)
    return pop


def run_ga(
    cluster_city_ids: Sequence[int],
    params: GaParams,
    dm: DistanceMatrix,
    depot_id: int,
):
    """Optimize one cluster's tour.  Returns ``(best_tour, trace)``."""
    ids = list(cluster_city_ids)
    if not ids:
        raise InvalidParameter("cannot optimize an empty cluster")
    rng = make_rng(params.seed)
    metric = LocalMetric(dm, depot_id, ids)
    pop = init_population(ids, params, dm, depot_id, rng=rng, metric=metric)
    trace = GaTrace()
    trace.add(0, pop)
    best = min(pop, key=lambda c: c.length)

    # one or two cities: every tour has the same length
    if len(ids) <= 2:
        return list(best.genes), trace

    stall = 0
    for gen in range(1, params.max_generations + 1):
        pop = evolve_generation(pop, params, dm, depot_id, rng, metric)
        trace.add(gen, pop)
        gen_best = min(pop, key=lambda c: c.length)
        if gen_best.length < best.length:
            best = gen_best
            stall = 0
        else:
            stall += 1
            if stall >= params.stall_generations:
                break
    return list(best.genes), trace
