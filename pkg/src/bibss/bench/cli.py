"""``bench`` command line: run experiment matrices, tune lambda, build PDBs."""
from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from typing import List, Optional

from ..policies import LAMBDA_PRESETS, Algorithm, BoundVariant, ConfigurationError, as_rational
from .experiment import (
    DEFAULT_WEIGHTS,
    ExperimentSpec,
    InstanceFormatError,
    emit_csv,
    emit_summary,
    read_csv,
    resolve_instances,
)
from .tuner import tune_lambda_trials

log = logging.getLogger("bench")


def _csv_list(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _weights(text: str) -> List[Fraction]:
    try:
        return [as_rational(w) for w in _csv_list(text)]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad weight list {text!r}: {exc}") from exc


def _add_domain_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", required=True, choices=["stp", "stp-heavy", "pancake", "toh", "grid"])
    p.add_argument("--heuristic", help="md|md-4 (stp), gap|gap-K (pancake), e.g. 10+2 (toh), octile (grid)")
    p.add_argument("--size", type=int, help="board width, pancakes, disks, or synthetic grid side")
    p.add_argument("--map", dest="map_path", help="octile map file for --domain grid")
    p.add_argument("--grid-density", type=float, default=0.25)
    p.add_argument("--map-seed", type=int, default=0)
    p.add_argument("--pdb-cache", help="directory for ToH pattern-database files")
    p.add_argument("--instances", default="gen:0:10", help="instance file or gen:SEED:COUNT[:HARDNESS]")
    p.add_argument("--timeout", type=float, default=60.0, help="seconds per run (0 = none)")
    p.add_argument("--memory-mb", type=int, default=4096, help="per-run memory budget (0 = none)")


def _spec(args, **extra) -> ExperimentSpec:
    return ExperimentSpec(
        domain=args.domain, heuristic=args.heuristic, size=args.size, instances=args.instances,
        timeout=args.timeout or None, memory_mb=args.memory_mb or None, map_path=args.map_path,
        grid_density=args.grid_density, map_seed=args.map_seed, pdb_cache=args.pdb_cache, **extra,
    )


def cmd_run(args) -> int:
    spec = _spec(
        args,
        algorithms=[Algorithm.parse(a) for a in _csv_list(args.alg)],
        weights=args.weights,
        lambdas=_csv_list(args.lambdas),
        bounds=[BoundVariant(b) for b in _csv_list(args.bound)],
        oracle=args.oracle == "on",
        oracle_budget=args.oracle_budget,
        jobs=args.jobs,
    )
    from .experiment import run_matrix

    records = run_matrix(spec)
    if args.out:
        emit_csv(records, args.out)
        log.info("wrote %d records to %s", len(records), args.out)
    if not args.quiet:
        print(emit_summary(records))
    return 0


def cmd_tune(args) -> int:
    spec = _spec(args)
    domain = spec.build_domain()
    instances = resolve_instances(domain, spec.instances)
    candidates = _csv_list(args.candidates) if args.candidates else []
    rows = []
    for W in args.weights:
        res = tune_lambda_trials(domain, W, instances, args.trials, args.seed,
                                 bound=BoundVariant(args.bound), candidates=candidates,
                                 limits=spec.limits())
        print(f"W={W} lambda*={res.best} ({float(res.best):.4f}) mean_expansions={res.best_mean:.1f}")
        rows.extend((W, lam, mean) for lam, mean in res.trials)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("W_num,W_den,lambda_num,lambda_den,mean_expansions\n")
            for W, lam, mean in rows:
                fh.write(f"{W.numerator},{W.denominator},{lam.numerator},{lam.denominator},{mean:.3f}\n")
    return 0


def cmd_pdb_build(args) -> int:
    from ..domains.hanoi import TowersOfHanoi, from_pegs, parse_partition

    partition = parse_partition(args.partition)
    dom = TowersOfHanoi(args.disks, partition, cache_dir=args.pdb_cache)
    anchor = dom.goal if args.anchor == "goal" else from_pegs([int(c) for c in args.anchor])
    from ..pdb import build_pdb

    for group in dom.groups:
        table = build_pdb(group, anchor, cache_dir=args.pdb_cache)
        print(f"group {list(group)}: {len(table.entries)} entries, max {max(table.entries)}")
    return 0


def cmd_summary(args) -> int:
    print(emit_summary(read_csv(args.csv)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment matrix and write CSV")
    _add_domain_args(run)
    run.add_argument("--alg", default=",".join(a.value for a in Algorithm),
                     help="comma list of WA*,BWA*,WBS*,WMM,WBAE*")
    run.add_argument("--weights", type=_weights, default=list(DEFAULT_WEIGHTS))
    run.add_argument("--lambda", dest="lambdas", default=",".join(LAMBDA_PRESETS),
                     help="comma list of presets (0,1/W^2,1/W,1,W) or rationals, WBAE* only")
    run.add_argument("--bound", default="gcd", help="comma list of base,gcd,alb,alb-gcd")
    run.add_argument("--oracle", choices=["on", "off"], default="off")
    run.add_argument("--oracle-budget", type=int, default=2_000_000)
    run.add_argument("--out", help="CSV output path")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--quiet", action="store_true", help="do not print the summary table")
    run.set_defaults(func=cmd_run)

    tune = sub.add_parser("tune", help="tune WBAE* lambda per weight")
    _add_domain_args(tune)
    tune.add_argument("--weights", type=_weights, default=[Fraction(6, 5)])
    tune.add_argument("--trials", type=int, default=50)
    tune.add_argument("--seed", type=int, default=0)
    tune.add_argument("--bound", default="gcd", choices=[b.value for b in BoundVariant])
    tune.add_argument("--candidates", help="comma list of lambdas tried first")
    tune.add_argument("--out", help="CSV of every trial")
    tune.set_defaults(func=cmd_tune)

    pdb = sub.add_parser("pdb-build", help="build and cache ToH pattern databases")
    pdb.add_argument("--disks", type=int, default=12)
    pdb.add_argument("--partition", default="10+2")
    pdb.add_argument("--anchor", default="goal", help="'goal' or a peg string, largest disk first")
    pdb.add_argument("--pdb-cache", required=True)
    pdb.set_defaults(func=cmd_pdb_build)

    summ = sub.add_parser("summary", help="print the summary table of a results CSV")
    summ.add_argument("csv")
    summ.set_defaults(func=cmd_summary)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, InstanceFormatError, ValueError, OSError) as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
