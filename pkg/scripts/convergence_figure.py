"""Solve one seeded 180-city instance with the GA and draw its convergence curves and route map.

    python scripts/convergence_figure.py --seed 42 --out-dir results/figures
"""
import argparse
from pathlib import Path

from mvrp.instance import generate_random_instance
from mvrp.pipeline import RunConfig, solve
from mvrp.plotting import convergence_svg, read_trace, route_svg, write_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("-k", type=int, default=6)
    ap.add_argument("--out-dir", default="results/figures")
    args = ap.parse_args()

    out = Path(args.out_dir)
    inst = generate_random_instance(180, 35.0, 100, seed=args.seed)
    report = solve(RunConfig(k=args.k, seed=args.seed, out_dir=str(out)), inst=inst)
    for v in report["vehicles"]:
        records = read_trace(out / v["trace_file"])
        write_svg(convergence_svg(records, f"GA vehicle {v['vehicle']}"), out / f"convergence_vehicle_{v['vehicle']}.svg")
        print(f"vehicle {v['vehicle']}: {len(v['tour'])} cities, {len(records)} generations, distance {v['distance']:.4f}")
    write_svg(route_svg(inst, [v["tour"] for v in report["vehicles"]]), out / "routes.svg")
    print(f"total {report['total_distance']:.4f}; SVGs in {out}")


if __name__ == "__main__":
    main()
