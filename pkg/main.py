#!/usr/bin/env python3
"""
Repeated Stackelberg Game Simulator — Main Entry Point

Usage:
    # Run one configuration
    python main.py --config sample_data/table1_config.yaml --out results

    # Run a named experiment preset, 3 seeds, shorter horizon
    python main.py --preset table1-example --seeds 1,2,3 --horizon 20000

    # UCB-UCB non-convergence probe on the appendix_a1 game
    python main.py --probe 1000000

    # List presets
    python main.py --list-presets
"""

import argparse
import json
import logging
import os
import re
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from stacklab import (
    StackLabError, batch_run, export_excel, export_json, load_presets, nonconvergence_probe,
    parse_config, run_preset, write_summary_csv, write_trace_csv,
)

EXIT_OK = 0
EXIT_EXPECTATIONS_FAILED = 1
EXIT_ERROR = 2


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "run"


def _seed_list(text: str):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be a comma-separated integer list, got '{text}'")


def _out_dir(args) -> str:
    return os.environ.get("STACKLAB_OUT") or args.out


def _schedule(args):
    return "theorem" if args.theorem_schedule else None


def write_batch(report, directory: str, stem: str, xlsx: bool):
    trace_path = os.path.join(directory, f"{stem}.trace.csv")
    summary_path = os.path.join(directory, f"{stem}.summary.csv")
    write_trace_csv([report], trace_path)
    write_summary_csv(report.summary, summary_path)
    export_json(report.to_dict(), os.path.join(directory, f"{stem}.json"))
    print(f"Trace saved: {trace_path}")
    print(f"Summary saved: {summary_path}")
    if xlsx:
        xlsx_path = os.path.join(directory, f"{stem}.xlsx")
        export_excel({stem: report}, xlsx_path)
        print(f"Excel report saved: {xlsx_path}")


def cmd_list_presets(args):
    """Print preset names and descriptions."""
    presets = load_presets(args.presets)
    print(f"\n{'─'*60}")
    print("  EXPERIMENT PRESETS")
    print(f"{'─'*60}")
    for preset in presets.values():
        print(f"\n  {preset.name}  [{', '.join(preset.arms)}]")
        if preset.description:
            print(f"    {preset.description.strip()}")
    print(f"\n{'─'*60}\n")
    return EXIT_OK


def cmd_probe(args):
    """UCB-UCB against UCBE-UCB on appendix_a1."""
    out = _out_dir(args)
    results = {}
    for leader in ("ucb", "ucbe"):
        probe = nonconvergence_probe(args.probe, leader=leader)
        results[leader] = probe.to_dict()
        print(f"  {leader}-ucb  T={probe.horizon}: a2 fraction {probe.fraction_a2:.4f}  |  "
              f"avg regret {probe.average_regret:.4f}  |  trailing hit {probe.trailing_hit_rate:.3f}")
    export_json(results, os.path.join(out, "probe.json"))
    print(f"Probe report saved: {os.path.join(out, 'probe.json')}")
    return EXIT_OK


def cmd_run_config(args):
    """Single configuration run."""
    print(f"Parsing: {args.config}")
    config = parse_config(args.config).with_overrides(
        horizon=args.horizon, seeds=args.seeds, noiseless=args.noiseless, schedule=_schedule(args),
    )
    print(f"Loaded: {config.name} | game {config.game.describe()} | "
          f"{config.leader.algorithm} vs {config.follower.strategy} | T={config.horizon} | "
          f"{len(config.seeds)} seed(s)")
    report = batch_run(config, n_jobs=args.threads)
    if not args.quiet:
        report.print_summary()
    write_batch(report, _out_dir(args), _slug(config.name), args.xlsx)
    return EXIT_OK


def cmd_run_preset(args):
    """Run a preset and check its expectations."""
    presets = load_presets(args.presets)
    outcome = run_preset(
        args.preset, presets=presets, seeds=args.seeds, horizon=args.horizon,
        noiseless=args.noiseless, schedule=_schedule(args), n_jobs=args.threads,
    )
    if not args.quiet:
        outcome.print_summary()

    directory = os.path.join(_out_dir(args), _slug(args.preset))
    for arm, report in outcome.reports.items():
        write_batch(report, directory, _slug(arm), xlsx=False)
    export_json(outcome.to_dict(), os.path.join(directory, "report.json"))
    if args.xlsx:
        xlsx_path = os.path.join(directory, "report.xlsx")
        export_excel(outcome.reports, xlsx_path,
                     expectations=[r.to_dict() for r in outcome.results])
        print(f"Excel report saved: {xlsx_path}")

    if not outcome.passed:
        failed = [r.to_dict() for r in outcome.results if not r.passed]
        print(json.dumps({"error": "expectations", "preset": args.preset, "failed": failed},
                         indent=2, default=str), file=sys.stderr)
        return EXIT_EXPECTATIONS_FAILED
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Repeated Stackelberg game simulator with learning and manipulating followers",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s --config run.yaml                          # Single config
  %(prog)s --preset table1-example                    # Preset with expectations
  %(prog)s --preset fig-b-omniscient --threads 5      # Seeds in parallel
  %(prog)s --probe 1000000                            # Non-convergence probe
  %(prog)s --list-presets                             # Show presets
        """
    )
    source = parser.add_argument_group("Experiment")
    source.add_argument("--config", metavar="PATH", help="YAML/JSON simulation config")
    source.add_argument("--preset", metavar="NAME", help="Named experiment preset")
    source.add_argument("--presets", metavar="YAML", help="Alternative presets file")
    source.add_argument("--list-presets", action="store_true", help="List presets and exit")
    source.add_argument("--probe", metavar="T", type=int,
                        help="Run the UCB-UCB / UCBE-UCB non-convergence probe for T rounds")

    overrides = parser.add_argument_group("Overrides")
    overrides.add_argument("--seeds", type=_seed_list, metavar="CSV", help="Comma-separated seed list")
    overrides.add_argument("--horizon", type=int, metavar="N", help="Number of rounds T")
    overrides.add_argument("--noiseless", action="store_true", help="Players receive mean rewards")
    overrides.add_argument("--theorem-schedule", action="store_true",
                           help="Exp3 alpha = eta = T^(-1/3) instead of the literal values")

    output = parser.add_argument_group("Output")
    output.add_argument("--out", metavar="DIR", default="results",
                        help="Output directory (STACKLAB_OUT overrides)")
    output.add_argument("--xlsx", action="store_true", help="Also write an Excel workbook")
    output.add_argument("--threads", type=int, default=1, metavar="N", help="Parallel seeds")
    output.add_argument("--quiet", action="store_true", help="Suppress console summaries")
    output.add_argument("--verbose", action="store_true", help="Debug logging")

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        if args.list_presets:
            return cmd_list_presets(args)
        if args.probe is not None:
            return cmd_probe(args)
        if args.config and args.preset:
            parser.error("use either --config or --preset, not both")
        if args.config:
            return cmd_run_config(args)
        if args.preset:
            return cmd_run_preset(args)
        parser.error("one of --config, --preset, --probe or --list-presets is required")
    except StackLabError as e:
        report = e.to_dict() if hasattr(e, "to_dict") else {"error": type(e).__name__, "message": str(e)}
        print(json.dumps(report, indent=2), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
