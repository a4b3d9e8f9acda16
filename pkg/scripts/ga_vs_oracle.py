"""GA against the brute-force optimum on small sub-instances, for several stall limits.

    python scripts/ga_vs_oracle.py --runs 30
"""
import argparse
import time

from mvrp.exact import brute_force_tsp
from mvrp.ga import GaParams, run_ga
from mvrp.instance import DistanceMatrix, generate_random_instance, tour_length
from mvrp.rng import derive_seed, make_rng


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=30)
    ap.add_argument("--stalls", default="50,300")
    args = ap.parse_args()

    base = generate_random_instance(180, 35.0, 100, seed=42)
    print(f"{'stall':>6} {'exact':>6} {'<=5%':>6} {'worst ratio':>12} {'slowest s':>10}")
    for stall in map(int, args.stalls.split(",")):
        hits = within = 0
        worst = slowest = 0.0
        for s in range(args.runs):
            rng = make_rng(derive_seed(42, "subinstance", s))
            ids = sorted(int(i) for i in rng.choice(base.customer_ids, size=5 + s % 4, replace=False))
            sub = base.subinstance([base.depot_id, *ids])
            dm = DistanceMatrix(sub)
            optimum = brute_force_tsp(sub.customer_ids, dm, 1).best_length
            start = time.perf_counter()
            tour, _ = run_ga(sub.customer_ids, GaParams(seed=s, stall_generations=stall), dm, 1)
            slowest = max(slowest, time.perf_counter() - start)
            ratio = tour_length(tour, 1, dm) / optimum
            hits += ratio == 1.0
            within += ratio <= 1.05
            worst = max(worst, ratio)
        print(f"{stall:>6} {hits:>6} {within:>6} {worst:>12.4f} {slowest:>10.3f}")


if __name__ == "__main__":
    main()
