"""Command-line driver.

Three subcommands share one configuration format:

* ``continue``: build the branch from the trivial solution, writing the
  branch table, one snapshot per accepted point, and a run summary.
* ``single-solve``: one fixed-strength solve seeded by the origin tangent.
* ``validate``: the built-in invariant suite, one pass/fail line per check.

Exit codes: 0 success (including a branch that exhausts its step budget),
2 configuration error, 3 numerical failure or a failed validation, 4 a
guard-triggered branch termination.  Codes 3 and 4 still leave the files
written so far on disk; the table is flushed per point.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .config import RunConfig, load_config, load_config_file
from .continuation import Alternative, ContinuationEngine
from .errors import ConfigError, VortexWaveError
from .persistence import (
    BranchWriter,
    ensure_dir,
    snapshot_record,
    write_snapshot,
    write_summary,
)
from .system import WaveSystem
from .validation import run_validation

_TERMINATION_EXIT = {
    Alternative.MAX_STEPS_REACHED: 0,
    Alternative.NEWTON_FAILURE: 3,
    Alternative.UNBOUNDED: 4,
    Alternative.INTERFACE_TOUCHES_BOUNDARY: 4,
    Alternative.VORTEX_NEAR_INTERFACE: 4,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortexwave",
        description="Steady interfacial waves carried by a point-vortex pair.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    cont = sub.add_parser("continue", help="trace the branch from the origin")
    single = sub.add_parser("single-solve",
                            help="solve once at the configured strength")
    check = sub.add_parser("validate", help="run the built-in invariant suite")

    for p in (cont, single, check):
        p.add_argument("--config", metavar="PATH",
                       help="configuration file (defaults apply when omitted)")
    for p in (cont, single):
        p.add_argument("--out", metavar="DIR",
                       help="output directory (overrides the config)")
    cont.add_argument("--direction", choices=("+", "-"), default="+",
                      help="sign of the initial strength step")
    cont.add_argument("--max-steps", type=int, metavar="N",
                      help="override the configured step budget")
    check.add_argument("--seed", type=int, default=0, metavar="N",
                       help="seed for the randomized checks")
    return parser


def _load(args) -> RunConfig:
    if args.config is None:
        return load_config("")
    return load_config_file(args.config)


def _config_echo(config: RunConfig) -> dict:
    return dict(line.split("=", 1) for line in config.canonical().splitlines())


def _make_engine(config: RunConfig) -> ContinuationEngine:
    system = WaveSystem(config.params, config.n_modes, config.m_vertical,
                        dealias=config.dealias)
    return ContinuationEngine(system, config.settings)


def _run_continue(args) -> int:
    config = _load(args)
    if args.max_steps is not None:
        try:
            config = replace(
                config, settings=replace(config.settings,
                                         max_steps=args.max_steps)
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    direction = 1 if args.direction == "+" else -1
    out = args.out if args.out is not None else config.out_dir
    ensure_dir(out)

    engine = _make_engine(config)
    grid = engine.system.grid
    chash = config.config_hash()
    index = 0

    with BranchWriter(os.path.join(out, "branch.csv"), chash) as writer:
        def on_point(point):
            nonlocal index
            sup = float(
                np.abs(grid.even_values_half(point.state.elevation)).max()
            )
            writer.write(point, sup)
            record = snapshot_record(
                point, config.n_modes, config.m_vertical,
                config.params.half_period, config.params.depth, chash,
            )
            write_snapshot(
                os.path.join(out, f"snapshot_{index:04d}.json"), record
            )
            index += 1

        branch = engine.continue_branch(direction, on_point=on_point)

    termination = branch.termination
    code = _TERMINATION_EXIT[termination]
    final_strength = branch.points[-1].strength if branch.points else 0.0
    write_summary(
        os.path.join(out, "summary.json"),
        _config_echo(config), chash, "continue", direction,
        termination.value, len(branch.points), final_strength, code,
    )
    if code:
        print(f"terminated: {termination.value}", file=sys.stderr)
    else:
        print(f"branch complete: {len(branch.points)} points, "
              f"termination {termination.value}")
    return code


def _run_single(args) -> int:
    config = _load(args)
    out = args.out if args.out is not None else config.out_dir
    ensure_dir(out)

    engine = _make_engine(config)
    grid = engine.system.grid
    chash = config.config_hash()
    point = engine.solve_at(config.target_strength)

    with BranchWriter(os.path.join(out, "branch.csv"), chash) as writer:
        sup = float(np.abs(grid.even_values_half(point.state.elevation)).max())
        writer.write(point, sup)
    record = snapshot_record(
        point, config.n_modes, config.m_vertical,
        config.params.half_period, config.params.depth, chash,
    )
    write_snapshot(os.path.join(out, "snapshot_0000.json"), record)
    write_summary(
        os.path.join(out, "summary.json"),
        _config_echo(config), chash, "single_solve", None,
        None, 1, point.strength, 0,
    )
    print(f"solved at strength {point.strength!r} "
          f"in {point.newton_iterations} iterations")
    return 0


def _run_validate(args) -> int:
    config = _load(args)
    ok = run_validation(config.params, seed=args.seed)
    return 0 if ok else 3


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "continue": _run_continue,
        "single-solve": _run_single,
        "validate": _run_validate,
    }
    try:
        return handlers[args.mode](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except VortexWaveError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
