"""
Command-line interface.

    colwave run <scenario> [--config FILE] [--out DIR]
    colwave list
    colwave validate-config FILE

Exit codes: 0 all assertions pass, 2 assertion failure, 3 configuration
error, 4 resolution-guard refusal.  The output directory is --out, else
$COLWAVE_OUT, else the config's ``out`` key; each run writes report.json,
timings.json, fits.csv, cones.json and plotdata/.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .config import ESTIMATORS, SCENARIOS, ConfigError, load_config
from .spectral import ResolutionError

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_RESOLUTION = 0, 2, 3, 4

log = logging.getLogger("colwave")


def _clean(obj, nd=9):
    """JSON-ready copy with floats at nd significant digits (stable across runs)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v, nd) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v, nd) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist(), nd)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not np.isfinite(v):
            return str(v)
        return float(f"{v:.{nd}g}")
    return obj


def _dump(path, obj):
    Path(path).write_text(json.dumps(_clean(obj), indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow(_clean(list(r)))


def emit_plot_data(report, out: Path):
    """plotdata/<label>_cone.csv (polar samples) and plotdata/<label>_series.csv
    (lambda, eps, |FT|) per estimate; nothing is written for an empty report."""
    if not report.polar and not report.series:
        return []
    pd = Path(out) / "plotdata"
    pd.mkdir(parents=True, exist_ok=True)
    files = []
    for name, tab in sorted(report.polar.items()):
        p = pd / f"{name}_cone.csv"
        _write_csv(p, tab["columns"], tab["rows"])
        files.append(p)
    for name, tab in sorted(report.series.items()):
        p = pd / f"{name}_series.csv"
        _write_csv(p, tab["columns"], tab["rows"])
        files.append(p)
    return files


def write_report(report, out: Path):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    _dump(out / "report.json", report.to_dict())
    _dump(out / "timings.json", report.timings)
    _dump(out / "cones.json", report.cones)
    _write_csv(out / "fits.csv", ["estimate", "base_point", "direction", "angle_deg", "p_hat", "N_hat",
                                  "residual", "verdict"], report.fits)
    emit_plot_data(report, out)


def _out_dir(args, cfg):
    if args.out:
        return Path(args.out)
    if os.environ.get("COLWAVE_OUT"):
        return Path(os.environ["COLWAVE_OUT"])
    return Path(cfg["out"])


def cmd_run(args):
    from .scenarios import run_scenario
    try:
        cfg = load_config(args.config, args.scenario)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _out_dir(args, cfg)
    log.info("running %s, output in %s", args.scenario, out)
    try:
        report = run_scenario(args.scenario, cfg)
    except ResolutionError as exc:
        print(f"resolution guard: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_report(report, out)
    print(report.summary())
    for label, text in sorted(report.tables.items()):
        if isinstance(text, dict) and "witness_bins" in text:
            print(f"  {text['label']}: {'holds' if text['holds'] else 'VIOLATED'} "
                  f"({text['checked_bins']} irregular bins, {len(text['witness_bins'])} witnesses)")
    print(f"wrote {out}")
    return EXIT_OK if report.passed else EXIT_ASSERT


def cmd_list(args):
    from .scenarios import DESCRIPTIONS
    for s in SCENARIOS:
        blocks = ", ".join(ESTIMATORS[s]) or "-"
        print(f"{s:13s} {DESCRIPTIONS[s]}  [estimators: {blocks}]")
    return EXIT_OK


def cmd_validate(args):
    try:
        cfg = load_config(args.file)
    except ConfigError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"valid config for scenario {cfg['scenario']}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="colwave", description="Generalized wave front set experiments.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one scenario")
    r.add_argument("scenario", choices=SCENARIOS)
    r.add_argument("--config", help="YAML or JSON config file")
    r.add_argument("--out", help="output directory (overrides $COLWAVE_OUT and the config)")
    r.set_defaults(func=cmd_run)
    sub.add_parser("list", help="list scenarios").set_defaults(func=cmd_list)
    v = sub.add_parser("validate-config", help="check a config file")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; a bad scenario name is a configuration error
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
