"""Command line front end.

``edd run`` executes one headless experiment and writes room files, CSV
logs, and PNG figures into the output directory. ``edd sweep`` repeats
the run for all ten dimension pairs and adds a comparison table.
``edd serve`` hosts the interactive session service.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .engine import EngineConfig
from .errors import EddError
from .experiment import (
    ExperimentSpec,
    default_target,
    render_figures,
    run_experiment,
    sweep_all_pairs,
)
from .metrics import DimensionDescriptor, DimensionKind
from .room import parse_room
from .service import SessionService

DEFAULT_DIMS = "spatial-patterns:5,symmetry:5"


def _parse_dims(text: str) -> tuple[DimensionDescriptor, ...]:
    dims = []
    for part in text.split(","):
        name, _, granularity = part.strip().partition(":")
        try:
            kind = DimensionKind(name)
        except ValueError:
            choices = ", ".join(k.value for k in DimensionKind)
            raise argparse.ArgumentTypeError(
                f"unknown dimension {name!r}; choose from {choices}") from None
        try:
            dims.append(DimensionDescriptor(kind, int(granularity) if granularity else 5))
        except (ValueError, EddError) as err:
            raise argparse.ArgumentTypeError(str(err)) from None
    return tuple(dims)


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--width", type=int, default=13, help="room width in tiles")
    parser.add_argument("--height", type=int, default=7, help="room height in tiles")
    parser.add_argument("--dims", type=_parse_dims, default=_parse_dims(DEFAULT_DIMS),
                        metavar="NAME:G,NAME:G", help=f"dimension pair (default {DEFAULT_DIMS})")
    parser.add_argument("--seed", type=int, default=0,
                        help="rng seed; the EDD_SEED environment variable wins")
    parser.add_argument("--pop-size", type=int, default=1000)
    parser.add_argument("--capacity", type=int, default=25,
                        help="individuals kept per population per cell")
    parser.add_argument("--publish-gen", type=int, default=100,
                        help="generations between elite broadcasts")
    parser.add_argument("--parents", type=int, default=5,
                        help="tournament parents per population per generation")
    parser.add_argument("--mutation-chance", type=float, default=0.30)


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    _add_engine_flags(parser)
    parser.add_argument("--generations", type=int, default=2000)
    parser.add_argument("--target", type=Path, metavar="ROOM_FILE",
                        help="room file used as the injected target")
    parser.add_argument("--out", type=Path, default=Path("edd-out"),
                        help="artifact directory")


def _seed(args: argparse.Namespace) -> int:
    env = os.environ.get("EDD_SEED")
    if env is None or env == "":
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise EddError(f"EDD_SEED must be an integer, got {env!r}") from None


def _engine_config(args: argparse.Namespace) -> EngineConfig:
    return EngineConfig(
        pop_size=args.pop_size,
        cell_capacity=args.capacity,
        publish_gen=args.publish_gen,
        parents_per_pop=args.parents,
        mutation_chance=args.mutation_chance,
        dims=args.dims,
        rng_seed=_seed(args),
    )


def _build_spec(args: argparse.Namespace) -> ExperimentSpec:
    target = None
    width, height = args.width, args.height
    if args.target is not None:
        target = parse_room(args.target.read_text(), id=args.target.stem)
        width, height = target.width, target.height
    return ExperimentSpec(
        out_dir=args.out,
        width=width,
        height=height,
        dims=args.dims,
        generations=args.generations,
        engine=_engine_config(args),
        target=target,
    )


def _print_summary(result, prefix: str = "") -> None:
    for row in result.summary:
        print(f"{prefix}gen {row.generation}: mean {row.mean_fitness:.3f} "
              f"max {row.max_fitness:.3f} empty {row.empty_cells}")


def _cmd_run(args: argparse.Namespace) -> int:
    result = run_experiment(_build_spec(args))
    heatmap, convergence = render_figures(result)
    _print_summary(result)
    print(f"wrote {args.out}: room files, fitness.csv, summary.csv, "
          f"{heatmap.name}, {convergence.name}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = _build_spec(args)
    if spec.target is None and args.default_target:
        # similarity pairs are part of the sweep and need a designer room
        spec = replace(spec, target=default_target(spec.width, spec.height))
    results = sweep_all_pairs(spec)
    for (kind_a, kind_b), result in results.items():
        _print_summary(result, prefix=f"{kind_a.value} x {kind_b.value}: ")
        render_figures(result)
    print(f"wrote {args.out}: one directory per pair, comparison.csv")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    service = SessionService(
        host=args.host, port=args.port,
        width=args.width, height=args.height,
        engine_cfg=_engine_config(args),
    ).start()
    print(f"listening {service.host}:{service.port}", flush=True)
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        return 0
    finally:
        service.close()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="edd",
        description="evolutionary dungeon design: headless experiments and a session service",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser(
        "run", help="one experiment; exports elite rooms, CSV logs and figures")
    _add_experiment_flags(run_parser)
    run_parser.set_defaults(handler=_cmd_run)

    sweep_parser = commands.add_parser(
        "sweep", help="experiments over all ten dimension pairs")
    _add_experiment_flags(sweep_parser)
    sweep_parser.add_argument(
        "--default-target", action="store_true",
        help="sweep with the generated starter canvas instead of requiring --target")
    sweep_parser.set_defaults(handler=_cmd_sweep)

    serve_parser = commands.add_parser("serve", help="interactive session service")
    _add_engine_flags(serve_parser)
    serve_parser.add_argument("--host", default="127.0.0.1")
    serve_parser.add_argument("--port", type=int, default=0,
                              help="0 picks a free port; the bound port is printed")
    serve_parser.set_defaults(handler=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except EddError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
