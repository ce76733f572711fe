"""Command-line surface: run, inspect and verify compiled programs.

Exit codes:
    0  success
    2  usage or parse error
    3  contract violation (gates, gate bound, addressing, trace integrity)
    4  non-termination within --max-steps
    5  verify found a mismatch
    6  compile error
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path

from src.config import (
    DEFAULT_ALPHA,
    DEFAULT_GATE_BOUND,
    DEFAULT_MAX_STEPS,
    DEFAULT_TAU,
    VERIFY_DEFAULT_COUNT,
)
from src.errors import MNCError, NonTerminationError
from src.machine.engine import run
from src.machine.trace_io import write_trace
from src.network.relu_builder import network_stats
from src.network.serialize import network_to_dict
from src.programs.base import BaseProgram, format_value, parse_array
from src.programs.registry import get_program, program_names
from src.verify import run_verify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISMATCH = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mnc", description="Modular neural computer")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_machine_options(p: argparse.ArgumentParser) -> None:
        p.add_argument("program", choices=program_names())
        p.add_argument("--tau", type=float, default=DEFAULT_TAU)
        p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
        p.add_argument("--gate-bound", type=float, default=DEFAULT_GATE_BOUND)
        p.add_argument("--capacity", type=int, default=None, help="memory size S")
        p.add_argument("--strict-addresses", action="store_true")
        p.add_argument("--instance", default="canonical", help="A* instance file, or 'canonical'")

    run_p = sub.add_parser("run", help="compile, load and run one instance")
    add_machine_options(run_p)
    run_p.add_argument("--array", help="comma-separated array literal")
    run_p.add_argument("--array-file", type=Path)
    run_p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    run_p.add_argument("--trace", type=Path, help="write a JSON Lines trace here")
    run_p.add_argument("--snapshots", action="store_true")
    run_p.add_argument("--check", action="store_true")
    run_p.add_argument(
        "--control-via-attention",
        action="store_true",
        help="read control cells through the attention read instead of direct indexing",
    )

    inspect_p = sub.add_parser("inspect", help="report compiled network statistics")
    add_machine_options(inspect_p)
    inspect_p.add_argument("--dump", type=Path, help="write the networks as JSON")

    verify_p = sub.add_parser("verify", help="differential check against the reference implementations")
    add_machine_options(verify_p)
    verify_p.add_argument("--seed", type=int, default=0)
    verify_p.add_argument("--count", type=int, default=VERIFY_DEFAULT_COUNT)
    verify_p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    verify_p.add_argument("--threads", type=int, default=1)
    return parser


def _builder(args: argparse.Namespace) -> BaseProgram:
    return get_program(
        args.program,
        tau=args.tau,
        alpha=args.alpha,
        gate_bound=args.gate_bound,
        capacity=args.capacity,
        strict_addresses=args.strict_addresses,
    )


def _instance(builder: BaseProgram, args: argparse.Namespace):
    if builder.NAME == "astar":
        return builder.parse_input(args.instance)
    if getattr(args, "array_file", None) is not None:
        return parse_array(args.array_file.read_text(encoding="utf-8"))
    if getattr(args, "array", None):
        return builder.parse_input(args.array)
    raise ValueError(f"Program {builder.NAME} needs --array or --array-file")


def cmd_run(args: argparse.Namespace) -> int:
    builder = _builder(args)
    instance = _instance(builder, args)
    program = builder.program_for(instance)
    memory = builder.load(instance)
    try:
        trace = run(
            program,
            memory,
            args.max_steps,
            check=args.check,
            snapshots=args.snapshots,
            control_via_attention=args.control_via_attention,
        )
    except NonTerminationError as e:
        if args.trace:
            write_trace(e.trace, args.trace)
        raise

    if args.trace:
        write_trace(trace, args.trace)
        logger.info(f"Trace written to {args.trace}")
    result = builder.extract(trace, instance)
    print(builder.describe_result(result, trace, instance))
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    builder = _builder(args)
    instance = builder.parse_input(args.instance) if builder.NAME == "astar" else None
    program = builder.program_for(instance)

    print(f"program {program.name}: S={program.capacity} K={program.K} n_r={program.n_r} n_w={program.n_w}")
    print(f"modules: {', '.join(program.module_names)}")
    print(f"control reads: {list(program.control_read_addresses)}  halt cell: {program.halt_cell}")
    nets = {"controller": program.controller, **dict(zip(program.module_names, program.modules))}
    for name, net in nets.items():
        stats = network_stats(net)
        shapes = " ".join(f"{layer['shape'][0]}x{layer['shape'][1]}" for layer in stats["layers"])
        print(f"{name}: layers [{shapes}] hidden units={stats['hidden_units']} parameters={stats['parameters']}")
    for line in builder.inspect_extra(instance):
        print(line)
    if is_dataclass(program.layout):
        print("layout: " + " ".join(f"{k}={format_value(v)}" for k, v in asdict(program.layout).items()))

    if args.dump:
        dump = {name: network_to_dict(net) for name, net in nets.items()}
        args.dump.write_text(json.dumps(dump), encoding="utf-8")
        logger.info(f"Networks written to {args.dump}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    builder = _builder(args)
    summary = run_verify(builder, seed=args.seed, count=args.count, max_steps=args.max_steps, threads=args.threads)
    print(f"{summary['program']}: {summary['passed']}/{summary['total']} exact matches (seed {summary['seed']})")
    for failure in summary["failures"]:
        print(f"  case {failure['case']}: input {failure['instance']}")
        for problem in failure["problems"]:
            print(f"    - {problem}")
    return EXIT_MISMATCH if summary["failures"] else EXIT_OK


COMMANDS = {"run": cmd_run, "inspect": cmd_inspect, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except MNCError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except (ValueError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
