"""Command line: train on retention series, export drift samples, evaluate.

Exit codes: 0 success, 1 runtime failure, 2 invalid input or configuration.
A seed is mandatory: it comes from the config file or --seed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ConfigError, load_config
from .data import load_bundled_series, load_series_dir
from .evaluate import evaluate_delay_consistency, long_delay_mean
from .export import export_samples
from .model import TrainedDriftModel
from .train import TrainingDiverged, train


def cmd_train(args) -> int:
    config = load_config(args.config, {"seed": args.seed, "epochs": args.epochs})
    series = load_series_dir(args.data_dir) if args.data_dir else load_bundled_series()
    model = train(series, config)
    model.save(args.out)
    print(args.out)
    print(f"data_hash={model.data_hash}")
    for key, value in model.final_losses.items():
        print(f"{key}={value}")
    return 0


def cmd_export(args) -> int:
    model = TrainedDriftModel.load(args.model)
    seed = args.seed if args.seed is not None else model.config["seed"]
    spacing = np.geomspace if args.log_spacing else np.linspace
    r_grid = spacing(args.r_lo, args.r_hi, args.r_count)
    delays = [float(d) for d in args.delays.split(",") if d.strip()]
    rows = export_samples(model, r_grid, delays, args.n, args.out, seed=seed)
    print(args.out)
    print(f"rows={rows}")
    return 0


def cmd_evaluate(args) -> int:
    model = TrainedDriftModel.load(args.model)
    seed = args.seed if args.seed is not None else model.config["seed"]
    probes = np.geomspace(args.r_lo, args.r_hi, args.probes)
    report = evaluate_delay_consistency(model, probes, args.delay, args.n, seed=seed)
    for r0, ks in zip(report.probes, report.ks_per_probe):
        print(f"probe_r={format(r0, '.6g')} ks={ks:.4f}")
    print(f"max_ks={report.max_ks:.4f}")
    mean = long_delay_mean(model, probes, args.long_delay, args.n, seed=seed)
    print(f"long_delay_mean_ohms={format(mean, '.6g')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="driftgan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on retention series (bundled stand-in by default)")
    p.add_argument("--config", help="INI file with a [gan] section")
    p.add_argument("--seed", type=int, help="training seed (overrides config)")
    p.add_argument("--epochs", type=int, help="epoch budget (overrides config)")
    p.add_argument("--data-dir", help="directory of t_min,r_ohms CSVs (default: bundled)")
    p.add_argument("--out", required=True, help="model output path (.pt)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("export", help="write drift samples in the interchange CSV format")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    # defaults reproduce the channel estimator's default input-grid centroids:
    # 100 equal-width bins on [100 kOhm, 1 MOhm]
    p.add_argument("--r-lo", type=float, default=104500.0)
    p.add_argument("--r-hi", type=float, default=995500.0)
    p.add_argument("--r-count", type=int, default=100)
    p.add_argument("--log-spacing", action="store_true", help="geometric instead of linear state grid")
    p.add_argument("--delays", default="10,50,100", help="comma-separated delays in minutes")
    p.add_argument("--n", type=int, default=1000, help="samples per (state, delay) cell")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("evaluate", help="delay-consistency and long-delay checks")
    p.add_argument("--model", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--r-lo", type=float, default=2e5)
    p.add_argument("--r-hi", type=float, default=5e7)
    p.add_argument("--probes", type=int, default=5)
    p.add_argument("--delay", type=float, default=5.0, help="base delay in time units")
    p.add_argument("--long-delay", type=float, default=400.0, help="units for the equilibrium check")
    p.add_argument("--n", type=int, default=2000)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TrainingDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
