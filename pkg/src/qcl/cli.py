"""Command line: ``qcl run CONFIG``, ``qcl plot RUN_DIR``, ``qcl gradcheck``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import checks
from .experiments import ConfigError, RunAborted, SEED_NAMES, load_config, run
from .plots import PlotFormatError, emit_plots


def _seed_override(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep or name not in SEED_NAMES:
        raise argparse.ArgumentTypeError(f"expected NAME=INT with NAME in {SEED_NAMES}, got {text!r}")
    try:
        return name, int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed value must be an integer, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcl", description="Quantum circuit learning experiments.")
    parser.add_argument("--seed-override", type=_seed_override, action="append", default=[],
                        metavar="NAME=INT", help="replace one seed of the config (repeatable)")
    parser.add_argument("--out-dir", help="parent directory for run output (overrides output_dir)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--no-plots", action="store_true")
    p_plot = sub.add_parser("plot", help="(re)render SVG plots of a run directory")
    p_plot.add_argument("run_dir")
    p_grad = sub.add_parser("gradcheck", help="check parameter-shift gradients numerically")
    p_grad.add_argument("--instances", type=int, default=100)
    p_grad.add_argument("--seed", type=int, default=0)
    return parser


def _fail(kind: str, message: str, code: int, **extra) -> int:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            for name, value in args.seed_override:
                cfg["seeds"][name] = value
            artifacts = run(cfg, out_dir=args.out_dir, plots=not args.no_plots)
            print(json.dumps({"run_dir": str(artifacts.run_dir), "summary": artifacts.summary}, default=str))
        elif args.command == "plot":
            files = emit_plots(args.run_dir)
            print(json.dumps({k: str(v) for k, v in files.items()}))
        else:
            results = [
                checks.shift_vs_finite_difference(args.instances, seed=args.seed),
                checks.commutator_identity(args.instances, seed=args.seed),
            ]
            for r in results:
                print(json.dumps(r))
            if not all(r["passed"] for r in results):
                return _fail("gradcheck_failed", "one or more gradient checks failed", 1)
    except ConfigError as exc:
        return _fail("config", str(exc), 2, field=exc.field)
    except FileNotFoundError as exc:
        return _fail("file_not_found", str(exc), 2)
    except PlotFormatError as exc:
        return _fail("format", str(exc), 1)
    except RunAborted as exc:
        return _fail("aborted", str(exc), 1, run_dir=str(exc.run_dir))
    return 0


if __name__ == "__main__":
    sys.exit(main())
