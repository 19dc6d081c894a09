"""Command line entry point: ``levyadapt run|rates|oracle-check <config>``."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .harness import ExperimentAborted, run_experiment


def _fmt(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levyadapt", description="Monte Carlo experiments for <f, mu> estimation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "run the experiment and write all reports"),
                       ("rates", "fitted MSE slopes against the theoretical rate"),
                       ("oracle-check", "adaptive risk against the oracle criterion")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="flat key = value config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=None, help="worker threads (results do not depend on it)")
        p.add_argument("--out-dir", default=None, help="directory for CSV/JSON reports")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        over = {}
        if args.seed is not None:
            over["seed"] = args.seed
        if args.threads is not None:
            over["threads"] = args.threads
        if args.out_dir is not None:
            over["out_dir"] = args.out_dir
        if over:
            cfg = cfg.with_overrides(**over)
        report = run_experiment(cfg)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExperimentAborted as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 3

    if cfg.out_dir:
        for path in report.write(cfg.out_dir):
            print(f"wrote {path}")

    print(f"{report.name}: theta = {report.theta:.10g}")
    if args.command == "rates":
        for row in report.slopes:
            print(f"{row['quantity']}: slope {_fmt(row['slope'])} (se {_fmt(row['stderr'])}), "
                  f"theory {_fmt(row['theory_slope'])} [{row['theory_form'] or 'rate_a not set'}]")
    elif args.command == "oracle-check":
        for r in report.per_n:
            print(f"n={r['n']}: adaptive mse {_fmt(r['adaptive_mse'])}, oracle criterion {_fmt(r['oracle_criterion'])}, "
                  f"ratio {_fmt(r['ratio'])}, m* {r['m_star']}, mode m_hat {r['mhat_mode']} "
                  f"({r['mhat_mode_fraction']:.0%})")
    else:
        for r in report.per_n:
            print(f"n={r['n']}: oracle mse {_fmt(r['oracle_mse'])} at m={r['oracle_m']}, "
                  f"adaptive mse {_fmt(r['adaptive_mse'])}, failures {r['failures']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
