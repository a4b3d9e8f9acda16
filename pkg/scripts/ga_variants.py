"""Total GA distance on the 180-city bench for a few parameter variants, next to SA.

    python scripts/ga_variants.py --seeds 0-2
"""
import argparse
import dataclasses

from mvrp.cli import parse_seeds
from mvrp.pipeline import RunConfig, bench

VARIANTS = {
    "defaults": {},
    "stall 300": {"stall_generations": 300},
    "inversion, stall 300": {"stall_generations": 300, "mutation": "inversion"},
    "pop 200, pool 140, inversion": {"population_size": 200, "mating_pool_size": 140, "mutation": "inversion"},
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0-2")
    args = ap.parse_args()
    seeds = parse_seeds(args.seeds)

    base = RunConfig(n=180, side=35.0, depot=100, k=6)
    sa = bench(base, ["sa"], seeds, write=False).totals("sa")
    print(f"{'SA':<32} mean total {sum(sa) / len(sa):9.2f}")
    for name, overrides in VARIANTS.items():
        config = dataclasses.replace(base, ga=dataclasses.replace(base.ga, **overrides))
        totals = bench(config, ["ga"], seeds, write=False).totals("ga")
        print(f"{'GA ' + name:<32} mean total {sum(totals) / len(totals):9.2f}")


if __name__ == "__main__":
    main()
