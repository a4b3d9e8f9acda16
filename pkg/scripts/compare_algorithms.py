"""GA vs SA vs tabu per vehicle on seeded 180-city instances.

    python scripts/compare_algorithms.py --seeds 0-9 --out-dir results/compare
"""
import argparse
import time

from mvrp.cli import parse_seeds
from mvrp.pipeline import RunConfig, bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0-9")
    ap.add_argument("--algorithms", default="ga,sa,tabu")
    ap.add_argument("-k", type=int, default=6)
    ap.add_argument("--out-dir", default="results/compare")
    args = ap.parse_args()

    config = RunConfig(n=180, side=35.0, depot=100, k=args.k, out_dir=args.out_dir)
    start = time.perf_counter()
    result = bench(config, args.algorithms.split(","), parse_seeds(args.seeds))
    print(result.to_text(), end="")
    print(f"{time.perf_counter() - start:.1f}s; tables in {args.out_dir}/bench.csv and bench.txt")


if __name__ == "__main__":
    main()
