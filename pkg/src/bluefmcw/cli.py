"""Command line entry point: ``bluefmcw {simulate,campaign,sweep,design}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from . import __version__
from .analysis import design_report
from .errors import ConfigError
from .harness import (
    SWEEP_VARS,
    emit_outputs,
    emit_sweep_outputs,
    load_config,
    load_preset,
    preset_names,
    run_campaign,
    run_sweep,
    simulate_scene,
)
from .waveform import random_hopping_plan

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _add_common(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="campaign JSON file")
    src.add_argument("--preset", metavar="NAME", help=f"built-in preset ({', '.join(preset_names())})")
    p.add_argument("--seed", type=int, metavar="N", help="override master_seed")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides outputs.dir)")


def _build_parser():
    parser = argparse.ArgumentParser(prog="bluefmcw", description="Random frequency hopping FMCW radar simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="single scene: beat signals and range profiles as CSV")
    _add_common(p)
    p.add_argument("--run", type=int, default=0, metavar="I", help="run index whose scene to draw")

    for name, help_ in (("campaign", "Monte Carlo campaign: per-run CSV and summary JSON"),
                        ("sweep", "one campaign per value of a swept variable")):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
        p.add_argument("--runs", type=int, metavar="N", help="override runs per adversary count")
        if name == "sweep":
            p.add_argument("--var", choices=SWEEP_VARS, help="variable to sweep (default: preset's sweep)")
            p.add_argument("--values", help="comma-separated values")

    p = sub.add_parser("design", help="beat-frequency diversity report for a chirp configuration")
    _add_common(p)
    p.add_argument("--slope", type=float, help="override the chirp slope (Hz/s)")
    p.add_argument("--delta-f", type=float, default=0.0, help="adversary frequency gap (Hz)")
    return parser


def _load(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = load_preset(args.preset or "bvc")
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("must be >= 0", key="master_seed")
        cfg = replace(cfg, master_seed=args.seed)
    if getattr(args, "runs", None) is not None:
        if args.runs < 1:
            raise ConfigError("must be >= 1", key="runs")
        cfg = replace(cfg, runs=args.runs)
    return cfg


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _out_dir(args, cfg, default):
    return args.out or cfg.out_dir or default


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _load(args)
        if args.command == "simulate":
            report = simulate_scene(cfg, _out_dir(args, cfg, "out/simulate"), args.run)
            print(json.dumps(report, indent=2, sort_keys=True))
        elif args.command == "campaign":
            if args.jobs < 1:
                raise ConfigError("must be >= 1", key="jobs")
            table = run_campaign(cfg, jobs=args.jobs)
            emit_outputs(table, _out_dir(args, cfg, f"out/{cfg.name}"))
            print(json.dumps({k: v for k, v in (table.summary["metrics"]["sir_db"] or {}).items() if k != "cdf"},
                             sort_keys=True))
        elif args.command == "sweep":
            if args.jobs < 1:
                raise ConfigError("must be >= 1", key="jobs")
            var = args.var or (cfg.sweep or {}).get("var")
            if var is None:
                raise ConfigError("no sweep variable given (--var) and none in config", key="sweep.var")
            if args.values:
                values = [_parse_value(v.strip()) for v in args.values.split(",") if v.strip()]
            elif cfg.sweep and cfg.sweep["var"] == var:
                values = cfg.sweep["values"]
            else:
                raise ConfigError("no values given (--values)", key="sweep.values")
            tables = run_sweep(cfg, var, values, jobs=args.jobs)
            emit_sweep_outputs(tables, var, _out_dir(args, cfg, f"out/{cfg.name}-sweep"))
            for v, t in tables.items():
                sir = t.summary["metrics"]["sir_db"]
                print(f"{var}={v}\t{t.summary['scenario']}\tmedian SIR "
                      + ("undefined" if sir is None else f"{sir['p50']:.2f} dB"))
        elif args.command == "design":
            plan = cfg.chirp if args.slope is None else cfg.chirp.with_slope(args.slope)
            hop = random_hopping_plan(plan.n_sub, cfg.master_seed)
            report = design_report(plan, hop, args.delta_f)
            text = json.dumps(report, indent=2, sort_keys=True)
            print(text)
            if args.out:
                from pathlib import Path

                Path(args.out).mkdir(parents=True, exist_ok=True)
                (Path(args.out) / "design.json").write_text(text + "\n", encoding="utf-8")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
