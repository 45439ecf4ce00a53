"""Command-line interface.

Subcommands: ``sample``, ``fit``, ``gof``, ``study`` and ``oracle-check``.
Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

import argparse
import json
import logging
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, load_study
from .distributions import from_dict, sample
from .estimation import EstimationError
from .gof import (
    DEFAULT_B,
    BootstrapAbort,
    TestConfig,
    composite_test,
    get_family,
    simple_null_critical,
    simple_test,
)
from .io import DataError, read_csv, write_csv
from .kernels import parse_kernel
from .optim import RootBracketError
from .oracles import run_all
from .rng import GENERATOR_ID, SeedSpec
from .runner import run_study
from .svg import power_curve

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
CLI_MIN_M = 1000

log = logging.getLogger("ecfgof")


class UsageError(ValueError):
    pass


def version_string():
    """``git describe`` of the source tree when available, else ``v<version>``."""
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=here,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            desc = out.stdout.strip()
            # without tags git prints a bare hash
            return desc if desc.startswith("v") else f"v{__version__}-g{desc}"
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{__version__}"


def metadata(args, command, wall):
    return {
        "command": command,
        # study cells carry their own seeds unless --seed overrides them
        "seed": None if command == "study" and not args.seed_given else args.seed,
        "generator": GENERATOR_ID,
        "threads": args.threads,
        "wall_time": wall,
        "version": version_string(),
    }


def _load_json_arg(text, what):
    """JSON given inline or as a path to a file."""
    if text is None:
        return None
    if os.path.exists(text):
        try:
            text = Path(text).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {what} file: {exc.strerror}") from None
    try:
        return from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: invalid JSON ({exc.msg})") from None
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from None


def _emit(doc, out):
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc.strerror}") from None


def _columns(arg):
    return None if not arg else [c for c in arg.split(",") if c.strip()]


def _where(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--where expects COLUMN=VALUE, got {item!r}")
        out[key.strip()] = value
    return out


def _read(args):
    table = read_csv(args.input, _columns(args.columns), args.drop_missing, _where(args.where))
    if table.dropped:
        log.warning("dropped %d row(s) with missing values", len(table.dropped))
    return table


def _data_info(table):
    n, p = table.data.shape
    return {"n": n, "p": p, "columns": table.header, "dropped_rows": len(table.dropped), "dropped_lines": table.dropped}


# -- subcommands ---------------------------------------------------------------


def cmd_sample(args):
    params = _load_json_arg(args.spec, "spec")
    if args.n < 1:
        raise UsageError("--n must be positive")
    x = sample(params, args.n, SeedSpec(args.seed).stream())
    if args.out is None:
        sys.stdout.write("".join(",".join(f"{v:.17g}" for v in row) + "\n" for row in x))
    else:
        write_csv(args.out, x)
    return None


def cmd_fit(args):
    table = _read(args)
    fit = get_family(args.family).fit_free(table.data)
    for note in fit.notes:
        log.warning("fit: %s", note)
    return {"family": args.family, "data": _data_info(table), "fit": fit.to_dict()}


def _gof_config(args, n):
    lambda0 = _load_json_arg(args.lambda0, "lambda0")
    if args.mode == "simple" and lambda0 is None:
        raise UsageError("--mode simple needs --lambda0")
    if args.mode == "composite" and lambda0 is not None:
        raise UsageError("--lambda0 applies only to --mode simple")
    try:
        return TestConfig(
            family=args.family,
            mode=args.mode,
            lambda0=lambda0,
            n=n,
            m=args.m if args.m is not None else max(n, CLI_MIN_M),
            M=args.M,
            B=args.B,
            delta=args.delta,
            kernel=parse_kernel(args.kernel),
            seed=SeedSpec(args.seed),
            threads=args.threads,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_gof(args):
    table = _read(args)
    cfg = _gof_config(args, table.data.shape[0])
    if cfg.mode == "simple":
        outcome = simple_test(table.data, cfg, simple_null_critical(cfg))
    else:
        outcome = composite_test(table.data, cfg)
    return {"config": cfg.to_dict(), "data": _data_info(table), "outcome": outcome.to_dict()}


def cmd_study(args):
    study = load_study(args.config)
    for cell in study.cells:
        if args.M is not None:
            cell.M = cell.L = args.M
        if args.seed_given:
            cell.seed = args.seed
        if args.kernel_given:
            cell.kernel = parse_kernel(args.kernel)
    cells, failures = run_study(study, args.threads, args.keep_statistics)
    doc = {"study": study.label, "cells": cells, "failures": failures}
    stem = None if args.out is None else Path(args.out).with_suffix("")
    if stem is not None:
        _write_cells_csv(stem.with_suffix(".csv"), cells)
        if args.svg:
            series = {}
            for c in cells:
                if c["x"] is not None:
                    series.setdefault(c["series"], []).append((c["x"], c["rejection_rate"]))
            delta = cells[0]["config"]["delta"] if cells else 0.05
            svg = power_curve(series, delta, study.x_label, title=study.title or study.label)
            try:
                stem.with_suffix(".svg").write_text(svg, encoding="utf-8")
            except OSError as exc:
                raise DataError(f"cannot write plot: {exc.strerror}") from None
        args.out = str(stem.with_suffix(".json"))
    return doc


CELL_CSV = [
    "index", "label", "series", "x", "protocol", "family", "n", "m", "M",
    "rejection_rate", "rejections", "completed", "skipped", "critical_value",
]


def _write_cells_csv(path, cells):
    lines = [",".join(CELL_CSV)]
    for c in cells:
        cfg = c["config"]
        vals = [
            c["index"], c["label"], c["series"], c["x"], c["protocol"], cfg["family"], cfg["n"], cfg["m"],
            cfg["M"], c["rejection_rate"], c["rejections"], c["completed"], c["skipped"], c["critical_value"],
        ]
        lines.append(",".join(_csv_field(v) for v in vals))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def _csv_field(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    s = str(v)
    return '"' + s.replace('"', '""') + '"' if any(ch in s for ch in ',"\n') else s


def cmd_oracle_check(args):
    if args.instances < 1:
        raise UsageError("--instances must be positive")
    report = run_all(args.instances, SeedSpec(args.seed), args.draws, args.cf_draws)
    report["passed"] = report["statistic"]["passed"] and report["sampler_cf"]["passed"]
    return report


# -- argument parsing -------------------------------------------------------------


def _global_flags(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="master seed (default 0)")
    p.add_argument("--threads", type=int, default=d(1), help="worker processes (default 1)")
    p.add_argument("--kernel", default=d("gaussian"), help="gaussian, stable:<b> or genlaplace:<b>")
    p.add_argument("--out", default=d(None), help="output path (default: standard output)")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser():
    parser = argparse.ArgumentParser(prog="ecfgof", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        _global_flags(p, suppress=True)
        p.set_defaults(func=fn)
        return p

    def data_args(p):
        p.add_argument("input", help="CSV file (header row optional)")
        p.add_argument("--family", required=True, choices=["sn", "st", "sl", "gh", "as"])
        p.add_argument("--columns", help="comma-separated column names or 1-based positions")
        p.add_argument("--drop-missing", action="store_true", help="drop rows with missing values")
        p.add_argument("--where", action="append", metavar="COL=VALUE", help="keep rows whose COL equals VALUE")

    p = add("sample", cmd_sample, "draw a sample from a family spec")
    p.add_argument("--spec", required=True, help="family spec JSON, inline or a file path")
    p.add_argument("--n", type=int, required=True)

    p = add("fit", cmd_fit, "fit a family to a CSV sample")
    data_args(p)

    p = add("gof", cmd_gof, "goodness-of-fit test of a CSV sample")
    data_args(p)
    p.add_argument("--mode", choices=["composite", "simple"], default="composite")
    p.add_argument("--lambda0", help="canonical null spec JSON for --mode simple")
    p.add_argument("--m", type=int, help="size of the null sample (default max(n, 1000))")
    p.add_argument("--B", type=int, default=DEFAULT_B, help="bootstrap cycles (composite)")
    p.add_argument("--M", type=int, default=1000, help="Monte Carlo replications (simple)")
    p.add_argument("--delta", type=float, default=0.05)

    p = add("study", cmd_study, "run a size/power study configuration")
    p.add_argument("config", help="study file (INI)")
    p.add_argument("--M", type=int, help="override the replication count of every cell")
    p.add_argument("--svg", action="store_true", help="also write a power-curve SVG (needs --out)")
    p.add_argument("--keep-statistics", action="store_true", help="include per-replication statistics")

    p = add("oracle-check", cmd_oracle_check, "run the numerical oracles")
    p.add_argument("--instances", type=int, default=20, help="statistic-oracle instances")
    p.add_argument("--draws", type=int, default=10**6, help="Monte Carlo draws per instance")
    p.add_argument("--cf-draws", type=int, default=10**5, help="sample size per sampler CF check")
    return parser


def main(argv=None):
    parser = build_parser()
    raw = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(raw)
    args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in raw)
    args.kernel_given = any(a == "--kernel" or a.startswith("--kernel=") for a in raw)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be positive")
    if args.seed < 0:
        parser.error("--seed must be non-negative")
    t0 = time.perf_counter()
    try:
        doc = args.func(args)
        if doc is not None:
            doc = {"meta": metadata(args, args.command, time.perf_counter() - t0), **doc}
            _emit(doc, args.out)
    except (UsageError, ConfigError) as exc:
        print(f"ecfgof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"ecfgof: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (EstimationError, BootstrapAbort, RootBracketError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"ecfgof: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.command == "oracle-check" and not doc["passed"]:
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
