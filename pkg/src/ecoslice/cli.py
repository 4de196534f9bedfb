"""Command line entry point: ``ecoslice {generate,run,ablate,report}``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .config import ConfigError, ExperimentConfig, load_config
from .traffic import TraceError, export_csv, generate_synthetic


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    over = {}
    if getattr(args, "out_dir", None):
        over["output_dir"] = args.out_dir
    if getattr(args, "seed", None) is not None:
        over["seeds"] = list(args.seed)
    if getattr(args, "agent", None):
        over["agents"] = list(args.agent)
    if getattr(args, "beta", None):
        over["betas"] = list(args.beta)
    if getattr(args, "workers", None):
        over["workers"] = args.workers
    return replace(cfg, **over) if over else cfg


def _print_summaries(rows) -> None:
    print(f"{'agent':<12} {'variant':<7} {'beta':>5} {'seed':>4} {'power_W':>9} "
          f"{'qos':>6} {'gain':>7} {'regret':>9}")
    for s in rows:
        print(f"{s.agent:<12} {s.variant:<7} {s.beta:>5g} {s.seed:>4d} {s.mean_power_watts:>9.2f} "
              f"{s.mean_qos:>6.3f} {s.energy_gain_vs_allactive:>7.3f} {s.cumulative_regret:>9.3f}")


def cmd_generate(args) -> int:
    cfg = _config(args)
    seed = args.seed[0] if args.seed else cfg.seeds[0]
    trace = generate_synthetic(seed, cfg.profile)
    export_csv(trace, args.out)
    print(f"wrote {trace.sadi_count} SADIs, {len(trace.sadi)} user rows to {args.out}")
    return 0


def cmd_run(args) -> int:
    cfg = _config(args)
    summaries, _ = harness.run_experiment(cfg)
    _print_summaries(summaries)
    print(f"outputs in {Path(cfg.output_dir).resolve()}")
    return 0


def cmd_ablate(args) -> int:
    cfg = _config(args)
    pairs = harness.eco_ablation(cfg)
    _print_summaries([s for p in pairs for s in p])
    print(f"outputs in {Path(cfg.output_dir).resolve()}")
    return 0


def cmd_report(args) -> int:
    rows = harness.report(args.out_dir, window=args.window, sadi_minutes=args.sadi_minutes)
    if not rows:
        print(f"no steps_*.csv logs in {args.out_dir}", file=sys.stderr)
        return 1
    _print_summaries(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ecoslice", description="Energy-aware slice activation bandits.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_dir=True):
        sp.add_argument("--config", help="YAML experiment config (defaults when omitted)")
        sp.add_argument("--seed", type=int, action="append", help="seed override; repeat for several")
        if out_dir:
            sp.add_argument("--out-dir", help="output directory override")

    g = sub.add_parser("generate", help="write a synthetic trace as CSV")
    common(g, out_dir=False)
    g.add_argument("--out", required=True, help="CSV file to write")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run the (agent x beta x seed) grid")
    common(r)
    r.add_argument("--agent", action="append", help="agent filter; repeat for several")
    r.add_argument("--beta", type=float, action="append", help="beta override; repeat for several")
    r.add_argument("--workers", type=int, help="worker processes")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("ablate", help="Thompson-C with and without the EcoSlice")
    common(a)
    a.add_argument("--beta", type=float, action="append", help="beta override; repeat for several")
    a.add_argument("--workers", type=int, help="worker processes")
    a.set_defaults(func=cmd_ablate)

    rep = sub.add_parser("report", help="summaries and smoothed curves from step logs")
    rep.add_argument("--out-dir", required=True, help="directory holding steps_*.csv")
    rep.add_argument("--window", type=int, default=50, help="rolling window (default 50)")
    rep.add_argument("--sadi-minutes", type=float, default=10.0, help="SADI length in minutes")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, TraceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
