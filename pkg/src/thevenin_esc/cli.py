"""Command-line entry point: ``thevenin-esc simulate`` and ``thevenin-esc summary``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .config import OutputOptions, load_config
from .csvio import MalformedCSVError, read_records, write_records
from .exceptions import ConfigurationError
from .simulation import DEFAULT_BANDS, ESTIMATORS, run_scenario, summarize

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2

_LABELS = {
    "alpha": "alpha (deg)",
    "vth_rwls": "Vth RWLS (V)",
    "zth_rwls": "Zth RWLS (ohm)",
    "vth_kf": "Vth KF (V)",
    "zth_kf": "Zth KF (ohm)",
}


def format_summary(metrics):
    lines = []
    for seg in metrics.segments:
        lines.append(f"segment {seg.index}: t = {seg.t_start:g} .. {seg.t_end:g} s")
        lines.append(
            f"  {'estimate':<16}{'truth':>10}{'band':>8}{'settled at':>12}"
            f"{'mean err':>12}{'std':>10}{'traj mean':>12}"
        )
        for name, est in seg.estimates.items():
            settled = "never" if est.settling_time is None else f"{est.settling_time:.2f}"
            lines.append(
                f"  {_LABELS[name]:<16}{est.truth:>10.4g}{est.band:>8.3g}{settled:>12}"
                f"{est.mean_error:>12.4g}{est.std:>10.3g}{est.trajectory_mean:>12.5g}"
            )
    lines.append(
        f"(steady-state stats over the last {metrics.settle_window:g} s of each segment; "
        f"settled = first time in band for {metrics.hold_time:g} s)"
    )
    return "\n".join(lines)


def _estimator_list(text):
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [n for n in names if n not in ESTIMATORS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown estimator(s) {bad}; choose from {list(ESTIMATORS)}")
    return frozenset(names)


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def cmd_simulate(args):
    try:
        scenario, output = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["noise_seed"] = args.seed
        if args.estimators is not None:
            overrides["estimators"] = args.estimators
        if overrides:
            scenario = replace(scenario, **overrides)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    records = []

    def tee():
        for rec in run_scenario(scenario):
            records.append(rec)
            yield rec

    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            n = write_records(tee(), fh)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO

    print(f"wrote {n} rows to {args.out} (seed {scenario.noise_seed})")
    try:
        metrics = summarize(records, output.settle_window, output.bands, output.hold_time)
    except ValueError as exc:
        print(f"summary skipped: {exc}", file=sys.stderr)
    else:
        print(format_summary(metrics))
    return EXIT_OK


def cmd_summary(args):
    try:
        with open(args.csv, encoding="utf-8", newline="") as fh:
            records = read_records(fh)
    except (OSError, MalformedCSVError) as exc:
        print(f"cannot read {args.csv}: {exc}", file=sys.stderr)
        return EXIT_IO
    bands = {"alpha": args.band_alpha, "z": args.band_z, "v": args.band_v}
    try:
        metrics = summarize(records, args.settle_window, bands, args.hold_time)
    except ValueError as exc:
        print(f"cannot summarize {args.csv}: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.json:
        print(json.dumps(metrics.to_dict(), indent=2))
    else:
        print(format_summary(metrics))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="thevenin-esc",
        description="Thevenin equivalent identification by extremum seeking and least squares.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write the per-sample CSV")
    sim.add_argument("--config", required=True, help="JSON scenario document")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.add_argument("--seed", type=_u64, help="override noise.seed")
    sim.add_argument(
        "--estimators", type=_estimator_list, help="comma-separated subset of esc,rwls,kalman"
    )
    sim.set_defaults(func=cmd_simulate)

    defaults = OutputOptions()
    summ = sub.add_parser("summary", help="settling times and steady-state errors of a run")
    summ.add_argument("--csv", required=True, help="CSV written by 'simulate'")
    summ.add_argument("--band-alpha", type=float, default=DEFAULT_BANDS["alpha"], help="degrees")
    summ.add_argument("--band-z", type=float, default=DEFAULT_BANDS["z"], help="ohms")
    summ.add_argument("--band-v", type=float, default=DEFAULT_BANDS["v"], help="volts")
    summ.add_argument("--settle-window", type=float, default=defaults.settle_window, help="seconds")
    summ.add_argument("--hold-time", type=float, default=defaults.hold_time, help="seconds")
    summ.add_argument("--json", action="store_true", help="machine-readable output")
    summ.set_defaults(func=cmd_summary)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
