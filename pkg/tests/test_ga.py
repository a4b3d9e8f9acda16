import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mvrp.errors import InvalidParameter
from mvrp.exact import brute_force_tsp
from mvrp.ga import (
    Chromosome,
    GaParams,
    evolve_generation,
    fitness,
    init_population,
    mutate_inversion,
    mutate_swap,
    pmx_crossover,
    run_ga,
    select_mating_pool,
)
from mvrp.instance import DistanceMatrix, LocalMetric, generate_random_instance, tour_length
from mvrp.rng import make_rng

from conftest import make_instance


def pmx_by_swaps(base, donor, cut1, cut2):
    """Goldberg's formulation: swap each donor segment gene into place."""
    child = list(base)
    for i in range(cut1, cut2):
        j = child.index(donor[i])
        child[i], child[j] = child[j], child[i]
    return child


class FixedChoice:
    def __init__(self, picks):
        self.picks = picks

    def choice(self, n, size, replace):
        return np.array(self.picks)


def test_fitness_examples():
    assert fitness(100.0) == 0.01
    assert fitness(2.0) == 0.5
    assert fitness(0.0) == 1e12


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_fitness_length_product(length):
    c = Chromosome((1,), length)
    assert abs(c.fitness * c.length - 1.0) <= 1e-12


def test_params_defaults_and_validation():
    p = GaParams()
    assert (p.population_size, p.mating_pool_size, p.crossover_prob, p.mutation_prob, p.max_generations) == (
        10, 7, 0.8, 0.1, 300,
    )
    for bad in [
        dict(population_size=1),
        dict(mating_pool_size=11),
        dict(mating_pool_size=0),
        dict(crossover_prob=1.5),
        dict(mutation_prob=-0.1),
        dict(max_generations=0),
        dict(mutation="scramble"),
    ]:
        with pytest.raises(InvalidParameter):
            GaParams(**bad)


@pytest.fixture
def cluster():
    inst = generate_random_instance(9, 35.0, 1, seed=8)
    return inst.customer_ids, DistanceMatrix(inst)


def test_init_population(cluster):
    ids, dm = cluster
    pop = init_population(ids, GaParams(seed=3), dm, 1)
    assert len(pop) == 10
    for c in pop:
        assert sorted(c.genes) == sorted(ids)
        assert c.length == tour_length(list(c.genes), 1, dm)
    assert pop == init_population(ids, GaParams(seed=3), dm, 1)
    assert pop != init_population(ids, GaParams(seed=4), dm, 1)


def test_init_population_small(cluster):
    ids, dm = cluster
    pop = init_population(ids[:1], GaParams(), dm, 1)
    assert all(c.genes == (ids[0],) for c in pop)
    pop = init_population(ids[:3], GaParams(), dm, 1)
    assert len(pop) == 10 and all(len(c.genes) == 3 for c in pop)
    with pytest.raises(InvalidParameter):
        init_population([], GaParams(), dm, 1)


def test_select_mating_pool():
    pop = [Chromosome((1, 2), 5.0), Chromosome((2, 1), 1.0), Chromosome((1, 2), 3.0)]
    params = GaParams(population_size=3, mating_pool_size=2)
    assert [c.length for c in select_mating_pool(pop, params)] == [1.0, 3.0]
    params = GaParams(population_size=3, mating_pool_size=3)
    assert [c.length for c in select_mating_pool(pop, params)] == [1.0, 3.0, 5.0]
    tied = [Chromosome((1,), 2.0), Chromosome((2,), 1.0), Chromosome((3,), 2.0)]
    pool = select_mating_pool(tied, GaParams(population_size=3, mating_pool_size=2))
    assert [c.genes for c in pool] == [(2,), (1,)]


def test_pmx_textbook_case():
    a = [1, 2, 3, 4, 5, 6, 7, 8, 9]
    b = [9, 3, 7, 8, 2, 6, 5, 1, 4]
    child_a, child_b = pmx_crossover(a, b, 3, 6)
    assert child_a == [1, 5, 3, 8, 2, 6, 7, 4, 9]
    assert child_b == pmx_by_swaps(b, a, 3, 6)


def test_pmx_identity_and_full_segment():
    a = [4, 1, 3, 2]
    assert pmx_crossover(a, a, 1, 3) == (a, a)
    b = [2, 3, 1, 4]
    assert pmx_crossover(a, b, 0, 4) == (b, a)


def test_pmx_rejects_bad_input():
    with pytest.raises(InvalidParameter):
        pmx_crossover([1, 2, 3], [1, 2, 4], 0, 2)
    with pytest.raises(InvalidParameter):
        pmx_crossover([1, 2, 3], [3, 2, 1], 2, 2)
    with pytest.raises(InvalidParameter):
        pmx_crossover([1, 2, 3], [3, 2, 1], 0, 4)


@st.composite
def parents_and_cuts(draw):
    n = draw(st.integers(1, 15))
    a = draw(st.permutations(list(range(n))))
    b = draw(st.permutations(list(range(n))))
    c1 = draw(st.integers(0, n - 1))
    c2 = draw(st.integers(c1 + 1, n))
    return a, b, c1, c2


@given(parents_and_cuts())
def test_pmx_agrees_with_swap_formulation(case):
    a, b, c1, c2 = case
    child_a, child_b = pmx_crossover(a, b, c1, c2)
    assert child_a == pmx_by_swaps(a, b, c1, c2)
    assert child_b == pmx_by_swaps(b, a, c1, c2)
    assert child_a[c1:c2] == b[c1:c2]


def test_pmx_1000_random_pairs():
    rnd = random.Random(2024)
    for _ in range(1000):
        n = rnd.randint(1, 20)
        a = rnd.sample(range(n), n)
        b = rnd.sample(range(n), n)
        c1, c2 = sorted(rnd.sample(range(n + 1), 2))
        for child in pmx_crossover(a, b, c1, c2):
            assert sorted(child) == list(range(n))
        assert pmx_crossover(a, a, c1, c2) == (a, a)


def test_mutate_swap_examples():
    assert mutate_swap([1, 2, 3], FixedChoice([0, 2])) == [3, 2, 1]
    assert mutate_swap([7], make_rng(0)) == [7]
    assert mutate_inversion([1, 2, 3, 4], FixedChoice([3, 1])) == [1, 4, 3, 2]


@given(st.permutations(list(range(12))), st.integers(0, 2**32))
def test_mutations_preserve_genes(genes, seed):
    rng = make_rng(seed)
    for op in (mutate_swap, mutate_inversion):
        out = op(genes, rng)
        assert sorted(out) == sorted(genes)
        if len(genes) > 1:
            assert out != list(genes)


def test_noop_generation_leaves_population_unchanged(cluster):
    ids, dm = cluster
    params = GaParams(crossover_prob=0.0, mutation_prob=0.0, seed=1)
    pop = init_population(ids, params, dm, 1)
    assert len({c.genes for c in pop}) == len(pop)
    assert evolve_generation(pop, params, dm, 1, make_rng(5)) == pop


@given(st.integers(0, 2**32), st.sampled_from(["swap", "inversion"]))
def test_generation_keeps_permutations_and_elite(seed, mutation):
    inst = generate_random_instance(12, 35.0, 1, seed=seed)
    ids, dm = inst.customer_ids, DistanceMatrix(inst)
    params = GaParams(seed=seed, mutation=mutation)
    rng = make_rng(seed)
    metric = LocalMetric(dm, 1, ids)
    pop = init_population(ids, params, dm, 1, rng=rng, metric=metric)
    for _ in range(10):
        best_before = min(c.length for c in pop)
        pop = evolve_generation(pop, params, dm, 1, rng, metric)
        assert len(pop) == params.population_size
        for c in pop:
            assert sorted(c.genes) == sorted(ids)
            assert c.length == metric.length(c.genes)
        assert min(c.length for c in pop) <= best_before


def test_two_city_cluster():
    inst = make_instance([(0, 0), (1, 0), (0, 2)])
    dm = DistanceMatrix(inst)
    tour, trace = run_ga([2, 3], GaParams(seed=0), dm, 1)
    assert sorted(tour) == [2, 3] and len(trace) == 1
    assert tour_length(tour, 1, dm) == brute_force_tsp([2, 3], dm, 1).best_length


def test_one_city_cluster():
    inst = make_instance([(0, 0), (3, 4)])
    dm = DistanceMatrix(inst)
    tour, trace = run_ga([2], GaParams(), dm, 1)
    assert tour == [2] and len(trace) == 1
    assert tour_length(tour, 1, dm) == 10.0


def test_unit_square_optimum():
    # depot next to the square's corner; 4 corners as customers
    inst = make_instance([(-0.5, 0.0), (0, 0), (1, 0), (1, 1), (0, 1)])
    dm = DistanceMatrix(inst)
    oracle = brute_force_tsp(inst.customer_ids, dm, 1)
    assert oracle.permutations_examined == 24
    for seed in range(5):
        tour, _ = run_ga(inst.customer_ids, GaParams(seed=seed), dm, 1)
        assert tour_length(tour, 1, dm) == oracle.best_length


def test_empty_cluster_rejected(cluster):
    _, dm = cluster
    with pytest.raises(InvalidParameter):
        run_ga([], GaParams(), dm, 1)


def test_seven_city_clusters_within_five_percent():
    ok = 0
    for seed in range(50):
        inst = generate_random_instance(8, 35.0, 1, seed=1000 + seed)
        dm = DistanceMatrix(inst)
        best = brute_force_tsp(inst.customer_ids, dm, 1).best_length
        tour, _ = run_ga(inst.customer_ids, GaParams(seed=seed), dm, 1)
        ok += tour_length(tour, 1, dm) <= 1.05 * best
    assert ok >= 45


@pytest.mark.parametrize("size", [1, 2, 3, 4])
def test_tiny_clusters_exact(size):
    for seed in range(10):
        inst = generate_random_instance(size + 1, 35.0, 1, seed=seed)
        dm = DistanceMatrix(inst)
        best = brute_force_tsp(inst.customer_ids, dm, 1).best_length
        tour, _ = run_ga(inst.customer_ids, GaParams(seed=seed), dm, 1)
        assert tour_length(tour, 1, dm) == best


def test_run_ga_deterministic_and_monotone(cluster):
    ids, dm = cluster
    t1, tr1 = run_ga(ids, GaParams(seed=77), dm, 1)
    t2, tr2 = run_ga(ids, GaParams(seed=77), dm, 1)
    assert t1 == t2 and tr1.records == tr2.records
    best = tr1.best_lengths
    assert all(b <= a for a, b in zip(best, best[1:]))
    assert tour_length(t1, 1, dm) == best[-1]
    assert len(tr1) <= GaParams().max_generations + 1


def test_stall_window_stops_early(cluster):
    ids, dm = cluster
    _, trace = run_ga(ids, GaParams(seed=1, stall_generations=5), dm, 1)
    best = trace.best_lengths
    assert len(trace) < 301
    assert best[-1] == best[-6]


def test_trace_csv(cluster):
    ids, dm = cluster
    _, trace = run_ga(ids, GaParams(seed=1, max_generations=3), dm, 1)
    lines = trace.to_csv().splitlines()
    assert lines[0] == "generation,best_length,mean_length"
    assert len(lines) == 1 + len(trace)
    assert lines[1].startswith("0,")
