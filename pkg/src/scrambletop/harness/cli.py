"""Command line interface: run scenarios, validate, list what exists."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .. import __version__
from .config import SCENARIO_NAMES, ConfigError, parse_config
from .scenarios import run
from .validate import run_suite

_DESCRIPTIONS = {
    "fig2-divergence": "classical trajectories and pair/tangent separation series",
    "fig3a-lyapunov-map": "classical Lyapunov exponent map over initial directions",
    "fig3b-pr-map": "participation ratio of coherent states in the Floquet basis",
    "fig4-otoc-map": "OTOC snapshots and time-averaged map for one spin",
    "fig5-spin-compare": "snapshot and averaged OTOC maps across spin sizes",
    "fig5b-trajectories": "OTOC time series for selected coherent-state seeds",
    "fig6-epsilon-sweep": "probe-angle sweep reusing one measured population set",
    "validate": "oracle-equivalence suite; exits nonzero on failure",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scrambletop",
        description="Forward-only OTOC protocol simulator for the driven top.",
    )
    parser.add_argument("--version", action="version", version=f"scrambletop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario described by a config file")
    run_p.add_argument("config", help="path to a key = value configuration file")
    run_p.add_argument("--output-dir", help="override the configured output directory")
    run_p.add_argument("--threads", type=int, help="worker threads for grid sweeps")
    run_p.add_argument("--seed", type=int, help="override the random seed")

    val_p = sub.add_parser("validate", help="run the oracle-equivalence suite")
    val_p.add_argument("--quick", action="store_true", help="shorter durations, same checks")

    sub.add_parser("list-scenarios", help="print the available scenarios")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list-scenarios":
        for name in SCENARIO_NAMES:
            print(f"{name:22s} {_DESCRIPTIONS[name]}")
        return 0
    if args.command == "validate":
        report = run_suite(quick=args.quick)
        print(report.text())
        return 0 if report.ok else 1
    # run
    config_path = Path(args.config)
    try:
        text = config_path.read_text()
    except OSError as exc:
        print(f"error: cannot read config {config_path}: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"error: {config_path}: {exc}", file=sys.stderr)
        return 2
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    if args.threads is not None:
        cfg.threads = args.threads
    if args.seed is not None:
        cfg.rng_seed = args.seed
    try:
        manifest = run(cfg)
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{cfg.scenario}: {len(manifest.entries)} files in {cfg.output_dir} "
          f"({manifest.wall_clock:.1f}s); manifest at {manifest.manifest_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
