"""Command-line front end: ``run``, ``sweep`` and ``validate``.

Exit codes: 0 success, 1 validation failure (or failed run), 2 config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import config as config_mod
from .analysis import AnalysisError, format_number, run, scalar_results
from .postprocess import profile_csv
from .validation import SUITE_NAMES, validate_suite

log = logging.getLogger("cntplate")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_number(v) if v is not None else "" for v in row])
    return buf.getvalue()


def write_run_outputs(report, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    _write(os.path.join(out_dir, "report.json"), _json(report))
    flat = scalar_results(report)
    _write(os.path.join(out_dir, "results.csv"), _csv(["quantity", "value"], sorted(flat.items())))
    scheme = report["config"]["outputs"]["nondim"]
    for q, rows in report["profiles"].items():
        _write(os.path.join(out_dir, f"profile_{q}.csv"), profile_csv(rows, q, scheme))


def cmd_run(args):
    cfg = config_mod.load(args.config)
    report = run(cfg)
    write_run_outputs(report, args.out)
    log.info("wrote %s", args.out)
    return EXIT_OK


def parse_axes(specs):
    axes = []
    for spec in specs:
        if "=" not in spec:
            raise config_mod.ConfigError(f"axis {spec!r} must look like name=v1,v2")
        name, values = spec.split("=", 1)
        items = [v for v in values.split(",") if v]
        if not items:
            raise config_mod.ConfigError(f"axis {name!r} has no values")
        if name != "variant":
            try:
                items = [float(v) for v in items]
            except ValueError as exc:
                raise config_mod.ConfigError(f"axis {name!r}: {exc}") from exc
        if name not in config_mod.SWEEP_AXES:
            raise config_mod.ConfigError(
                f"unknown sweep axis {name!r}; choose from {sorted(config_mod.SWEEP_AXES)}")
        axes.append((name, items))
    return axes


def sweep_configs(base, axes):
    """Cartesian product of axis values in declaration order."""
    names = [n for n, _ in axes]
    cells = []
    for combo in itertools.product(*[vals for _, vals in axes]):
        cfg = base
        for n, v in zip(names, combo):
            cfg = config_mod.with_axis(cfg, n, v)
        cells.append((dict(zip(names, combo)), config_mod.validate(cfg)))
    return cells


def _sweep_cell(cfg):
    try:
        return scalar_results(run(cfg)), None
    except Exception as exc:
        return None, f"{type(exc).__name__}: {exc}"


def run_sweep(base, axes, workers=1):
    """Rows of (axis values, results or None, error or None)."""
    cells = sweep_configs(base, axes)
    cfgs = [c for _, c in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_sweep_cell, cfgs))
    else:
        outs = [_sweep_cell(c) for c in cfgs]
    return [(vals, res, err) for (vals, _), (res, err) in zip(cells, outs)]


def cmd_sweep(args):
    base = config_mod.load(args.config)
    axes = parse_axes(args.axis)
    rows = run_sweep(base, axes, args.workers)
    names = [n for n, _ in axes]
    keys = sorted({k for _, res, _ in rows if res for k in res})
    table = []
    for vals, res, err in rows:
        table.append([vals[n] for n in names] + [(res or {}).get(k) for k in keys] + [err or ""])
    os.makedirs(args.out, exist_ok=True)
    _write(os.path.join(args.out, "results.csv"), _csv(names + keys + ["error"], table))
    summary = {"config": base, "axes": [[n, v] for n, v in axes],
               "n_cells": len(rows), "n_errors": sum(1 for r in rows if r[2])}
    _write(os.path.join(args.out, "report.json"), _json(summary))
    for vals, _, err in rows:
        if err:
            log.warning("cell %s failed: %s", vals, err)
    return EXIT_FAIL if summary["n_errors"] else EXIT_OK


def cmd_validate(args):
    cells = validate_suite(args.suite, workers=args.workers)
    failed = [c for c in cells if c["status"] != "pass"]
    os.makedirs(args.out, exist_ok=True)
    report = {"suite": args.suite, "n_cells": len(cells), "n_failed": len(failed), "cells": cells}
    _write(os.path.join(args.out, "report.json"), _json(report))
    header = ["case", "quantity", "expected", "computed", "rel_error", "tolerance", "status"]
    _write(os.path.join(args.out, "results.csv"),
           _csv(header, [[c[k] for k in header] for c in cells]))
    for c in cells:
        level = logging.INFO if c["status"] == "pass" else logging.WARNING
        log.log(level, "%s %s %s", c["status"].upper(), c["case"], c["quantity"])
    print(f"{args.suite}: {len(cells) - len(failed)}/{len(cells)} cells pass")
    return EXIT_FAIL if failed else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="cntplate", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one analysis config")
    r.add_argument("config")
    r.add_argument("--out", default="out")
    r.set_defaults(func=cmd_run)
    s = sub.add_parser("sweep", help="Cartesian sweep over config axes")
    s.add_argument("config")
    s.add_argument("--axis", action="append", required=True,
                   help="name=v1,v2,... (a_h, core_to_face, v_star, temperature, variant)")
    s.add_argument("--out", default="out")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)
    v = sub.add_parser("validate", help="run a pinned validation suite")
    v.add_argument("suite", choices=SUITE_NAMES)
    v.add_argument("--out", default="out")
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except config_mod.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
