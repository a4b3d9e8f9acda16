"""Command line interface.

    mvrp gen       -n 180 --side 35 --depot 100 --seed 42 -o inst.txt
    mvrp solve     --instance inst.txt -k 6 --algorithm ga --out-dir run/
    mvrp bench     -k 6 --algorithms ga,sa,tabu --seeds 0-9 --out-dir bench/
    mvrp plot      --report run/report.json --out-dir run/
    mvrp export-lp --instance inst.txt --cluster 3,7,12 -o cluster.lp

Global flags (``--seed``, ``--out-dir``, ``--config``) may appear before or
after the subcommand.  ``--config`` names a file of ``key=value`` lines
(``k=6``, ``ga.mutation_prob=0.2``, ...); explicit flags win over it.

Exit status: 0 on success, 1 on usage errors, 2 on runtime errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import InvalidParameter, MvrpError
from .instance import DistanceMatrix, generate_random_instance, read_instance, write_instance
from .milp import build_model, export_lp
from .pipeline import (
    ALGORITHMS,
    RunConfig,
    apply_overrides,
    bench,
    instance_digest,
    read_config_file,
    read_report,
    solve,
)
from .plotting import convergence_svg, read_trace, route_svg, write_svg

EXIT_USAGE = 1
EXIT_RUNTIME = 2
# exports above this many binaries print a size warning
LP_WARN_VARIABLES = 1_000_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="master seed")
    parser.add_argument("--out-dir", default=default, help="output directory")
    parser.add_argument("--config", default=default, help="file of key=value overrides")


def _instance_flags(p):
    p.add_argument("--instance", help="instance file; omit to generate one")
    p.add_argument("-n", type=int, help="cities to generate (default 180)")
    p.add_argument("--side", type=float, help="side of the square (default 35)")
    p.add_argument("--depot", type=int, help="1-based depot index (default 100)")


def _routing_flags(p):
    p.add_argument("-k", type=int, help="number of vehicles (default 6)")
    p.add_argument("--restarts", type=int, help="k-means restarts (default 10)")
    p.add_argument("--init", choices=["farthest", "random"], help="k-means seeding")
    p.add_argument("--workers", type=int, help="processes for per-cluster solves")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvrp", description="k-means + GA solver for the multiple vehicle routing problem")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a random instance")
    _global_flags(p, suppress=True)
    p.add_argument("-n", type=int, default=180)
    p.add_argument("--side", type=float, default=35.0)
    p.add_argument("--depot", type=int, default=100)
    p.add_argument("-o", "--output", help="instance path (default <out-dir>/instance.txt)")

    p = sub.add_parser("solve", help="cluster and route one instance")
    _global_flags(p, suppress=True)
    _instance_flags(p)
    _routing_flags(p)
    p.add_argument("--algorithm", choices=ALGORITHMS)

    p = sub.add_parser("bench", help="compare algorithms over several seeds")
    _global_flags(p, suppress=True)
    _instance_flags(p)
    _routing_flags(p)
    p.add_argument("--algorithms", default="ga,sa,tabu", help="comma separated list")
    p.add_argument("--seeds", default="0-9", help="e.g. 0-9 or 1,5,7")

    p = sub.add_parser("plot", help="convergence and route-map SVGs")
    _global_flags(p, suppress=True)
    p.add_argument("--report", help="report.json written by solve")
    p.add_argument("--instance", help="instance file (default: the one next to the report)")
    p.add_argument("--trace", action="append", default=[], help="trace CSV (repeatable)")

    p = sub.add_parser("export-lp", help="write the time-indexed 0/1 model in LP format")
    _global_flags(p, suppress=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--cluster", help="comma separated city ids; default all cities")
    p.add_argument("--report", help="take the cluster of --vehicle from this report")
    p.add_argument("--vehicle", type=int)
    p.add_argument("-o", "--output", help="LP path (default <out-dir>/model.lp)")
    p.add_argument("--dry-run", action="store_true", help="print model size only")
    return parser


def parse_seeds(text: str) -> list[int]:
    seeds = []
    try:
        _seed_parts(text, seeds)
    except ValueError:
        raise UsageError(f"bad seed list {text!r}") from None
    if not seeds:
        raise UsageError("no seeds given")
    return seeds


def _seed_parts(text, seeds):
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))


def make_config(args) -> RunConfig:
    config = RunConfig()
    if args.config:
        config = apply_overrides(config, read_config_file(args.config))
    flags = {
        "instance": getattr(args, "instance", None),
        "n": getattr(args, "n", None),
        "side": getattr(args, "side", None),
        "depot": getattr(args, "depot", None),
        "k": getattr(args, "k", None),
        "algorithm": getattr(args, "algorithm", None),
        "seed": args.seed,
        "out_dir": args.out_dir,
        "restarts": getattr(args, "restarts", None),
        "init": getattr(args, "init", None),
        "workers": getattr(args, "workers", None),
    }
    return apply_overrides(config, {k: str(v) for k, v in flags.items() if v is not None})


def _out_dir(args) -> Path:
    return Path(args.out_dir or ".")


def cmd_gen(args) -> int:
    inst = generate_random_instance(args.n, args.side, args.depot, args.seed or 0)
    path = Path(args.output) if args.output else _out_dir(args) / "instance.txt"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_instance(inst, path)
    print(f"{path}  n={inst.n} depot={inst.depot_id} sha256={instance_digest(inst)}")
    return 0


def cmd_solve(args) -> int:
    config = make_config(args)
    report = solve(config)
    print(f"{'vehicle':>7} {'cities':>6} {'distance':>12}")
    for v in report["vehicles"]:
        print(f"{v['vehicle']:>7} {len(v['tour']):>6} {v['distance']:>12.4f}")
    print(f"{'total':>7} {'':>6} {report['total_distance']:>12.4f}")
    print(f"report: {Path(config.out_dir) / 'report.json'}")
    return 0


def cmd_bench(args) -> int:
    config = make_config(args)
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    result = bench(config, algorithms, parse_seeds(args.seeds))
    sys.stdout.write(result.to_text())
    for (s, alg), msg in sorted(result.errors.items()):
        print(f"seed {s} {alg}: FAILED: {msg}", file=sys.stderr)
    return 0


def cmd_plot(args) -> int:
    if not args.report and not args.trace:
        raise UsageError("plot needs --report and/or --trace")
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for path in args.trace:
        records = read_trace(path)
        target = out / (Path(path).stem + ".svg")
        write_svg(convergence_svg(records, Path(path).stem), target)
        written.append(target)
    if args.report:
        report_path = Path(args.report)
        report = read_report(report_path)
        inst_path = Path(args.instance) if args.instance else report_path.parent / report["instance_file"]
        inst = read_instance(inst_path)
        for v in report["vehicles"]:
            records = read_trace(report_path.parent / v["trace_file"])
            target = out / f"convergence_vehicle_{v['vehicle']}.svg"
            write_svg(convergence_svg(records, f"{report['algorithm']} vehicle {v['vehicle']}"), target)
            written.append(target)
        target = out / "routes.svg"
        write_svg(route_svg(inst, [v["tour"] for v in report["vehicles"]]), target)
        written.append(target)
    for path in written:
        print(path)
    return 0


def cmd_export_lp(args) -> int:
    inst = read_instance(args.instance)
    if args.report:
        if args.vehicle is None:
            raise UsageError("--report needs --vehicle")
        vehicles = {v["vehicle"]: v for v in read_report(args.report)["vehicles"]}
        if args.vehicle not in vehicles:
            raise InvalidParameter(f"report has no vehicle {args.vehicle}")
        cluster = vehicles[args.vehicle]["cluster"]
    elif args.cluster:
        cluster = [int(c) for c in args.cluster.split(",") if c.strip()]
    else:
        cluster = None
    if cluster is not None:
        if not cluster:
            raise InvalidParameter("empty cluster")
        inst = inst.subinstance(cluster)
    model = build_model(inst, DistanceMatrix(inst))
    if model.variable_count > LP_WARN_VARIABLES:
        print(
            f"warning: model has {model.variable_count:,} binaries and {model.row_count:,} rows; "
            "the LP file will be very large",
            file=sys.stderr,
        )
    print(f"n={model.n} binaries={model.variable_count} rows={model.row_count}")
    if args.dry_run:
        return 0
    path = Path(args.output) if args.output else _out_dir(args) / "model.lp"
    path.parent.mkdir(parents=True, exist_ok=True)
    export_lp(model, path)
    print(path)
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "bench": cmd_bench,
    "plot": cmd_plot,
    "export-lp": cmd_export_lp,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (MvrpError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
