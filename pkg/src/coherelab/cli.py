"""
Command-line surface.

Exit codes: 0 success, 2 invalid input or an unreadable or unwritable
path, 3 solver failure, 4 monotonicity failure in a suite run. Violations
of measures with known counterexamples are reported but keep exit 0.
"""
from typing import List, Optional, Sequence
import argparse
import json
import sys

import numpy as np

from .base import get_logger
from .config import LabConfig, SuiteConfig
from .errors import InvalidInput, NumericalFailure, Unsupported
from .interferometer import PhaseGrid
from .lab import CoherenceLab
from .measures import MEASURES
from .states import TWO_PI, DensityMatrix, random_density
from .toolbox import (
    dump_json,
    format_number,
    parse_povm_spec,
    pattern_to_dataframe,
    read_state,
    state_to_dict,
    write_pattern_csv,
    write_state,
)


EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_MONOTONICITY = 4

logger = get_logger("coherelab.cli")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    with open(out, "w") as f:
        f.write(text if text.endswith("\n") else text + "\n")


def cmd_measure(args: argparse.Namespace, lab: CoherenceLab) -> int:
    rho = read_state(args.state)
    if args.only:
        names: Optional[List[str]] = [n.strip() for n in args.only.split(",") if n.strip()]
    else:
        names = None
    results = lab.measure(rho, names)
    if args.format == "csv":
        lines = ["measure,value"] + [f"{name},{format_number(res.value)}" for name, res in results.items()]
        _emit("\n".join(lines), args.out)
    else:
        payload = {
            name: {"value": res.value, "witness": res.witness, "diagnostics": res.diagnostics}
            for name, res in results.items()
        }
        _emit(dump_json(payload), args.out)
    return EXIT_OK


def _pattern_grid(d: int, points: Optional[int], sweep: bool) -> PhaseGrid:
    if sweep:
        n = points or 33
        return PhaseGrid.sweep(d, TWO_PI * np.arange(n) / n, axis=0)
    return PhaseGrid.uniform(d, points)


def cmd_pattern(args: argparse.Namespace, lab: CoherenceLab) -> int:
    rho = read_state(args.state)
    povm = parse_povm_spec(args.povm, rho.dim)
    grid = _pattern_grid(rho.dim, args.grid, args.sweep)
    pattern = lab.pattern(rho, povm, grid)
    if args.format == "json":
        df = pattern_to_dataframe(pattern)
        _emit(dump_json(df.to_dict(orient="list")), args.out)
    elif args.out is not None:
        write_pattern_csv(pattern, args.out)
    else:
        sys.stdout.write(pattern_to_dataframe(pattern).to_csv(index=False, float_format="%.12g"))
    return EXIT_OK


def cmd_suite(args: argparse.Namespace, lab: CoherenceLab) -> int:
    cfg = SuiteConfig.from_file(args.config)
    summary = lab.harness.run_suite(cfg)
    _emit(dump_json(summary.to_dict(include_timings=args.timings)), args.out)
    for report in summary.known_violations:
        print(
            f"KNOWN {report.measure} d={report.dim} slack={format_number(report.slack)} "
            f"state_seed={report.state_seed} channel_seed={report.channel_seed}",
            file=sys.stderr,
        )
    if summary.failures:
        for report in summary.failures:
            print(
                f"FAIL {report.measure} d={report.dim} slack={format_number(report.slack)} "
                f"state_seed={report.state_seed} channel_seed={report.channel_seed}",
                file=sys.stderr,
            )
        return EXIT_MONOTONICITY
    return EXIT_OK


def cmd_random_state(args: argparse.Namespace, lab: CoherenceLab) -> int:
    if args.maximally_coherent:
        rho = DensityMatrix.maximally_coherent(args.dim)
    else:
        rank = args.rank if args.rank is not None else args.dim
        seed = args.seed if args.seed is not None else lab.config.seed
        rho = random_density(args.dim, rank, seed)
    if args.out is None:
        _emit(json.dumps(state_to_dict(rho), indent=2), None)
    else:
        write_state(rho, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coherelab",
        description="Coherence measures from interferometric visibility.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="Evaluate coherence measures on a state file")
    p.add_argument("--state", required=True, help="State JSON file or bundled fixture name")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true", help="Every measure (default)")
    group.add_argument("--only", help=f"Comma separated subset of: {', '.join(MEASURES)}")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="Write to this file instead of stdout")
    p.set_defaults(handler=cmd_measure)

    p = sub.add_parser("pattern", help="Export an interference pattern")
    p.add_argument("--state", required=True)
    p.add_argument("--povm", default="fourier", help="fourier, computational, basis:<json> or a POVM file")
    p.add_argument("--grid", type=int, help="Points per free phase")
    p.add_argument("--sweep", action="store_true", help="Sweep alpha_1 only, other phases zero")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_pattern)

    p = sub.add_parser("suite", help="Run the monotonicity suite")
    p.add_argument("--config", required=True, help="Suite config JSON")
    p.add_argument("--out", help="Report JSON path")
    p.add_argument("--timings", action="store_true", help="Include wall times in the report")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(handler=cmd_suite)

    p = sub.add_parser("random-state", help="Write a random density matrix")
    p.add_argument("--dim", "-d", type=int, required=True)
    p.add_argument("--rank", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--maximally-coherent", action="store_true")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_random_state)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = LabConfig.from_env(progress=getattr(args, "progress", False))
        lab = CoherenceLab(config=config)
        return args.handler(args, lab)
    except (InvalidInput, Unsupported) as e:
        logger.error(str(e))
        return EXIT_INVALID
    except OSError as e:
        logger.error(f"Cannot access {e.filename}: {e.strerror}")
        return EXIT_INVALID
    except NumericalFailure as e:
        logger.error(f"{e} {e.diagnostics}")
        return EXIT_SOLVER
