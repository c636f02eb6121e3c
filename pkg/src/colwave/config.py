"""
Experiment configuration: defaults per scenario, YAML/JSON loading and validation.

A config file is one YAML document (JSON is accepted as well).  Every key is
optional; values given in the file are merged over the scenario defaults.
Unknown keys and out-of-range values raise :class:`ConfigError` (CLI exit
code 3).  Example::

    scenario: ex4_1
    mollifier: {d: 1.0, q: 0}
    thresholds: {p_threshold: 5.0, N_cap: 6.0}
    estimators:
      U:
        eps: {kmin: 8, kmax: 12}
        lambda: {min: 64, max: 8192}
        radii: [0.5, 0.25]
    out: results/ex4_1

Estimator blocks are named per scenario (``colwave list`` prints the names);
the "U" block of ex4_2 and ex5_1 also serves V.
"""
from __future__ import annotations

import copy
from pathlib import Path

import numpy as np
import yaml

from .wavefront import EstimatorParams

SCENARIOS = ("smoke", "cones_remark", "ex2_2", "ex4_1", "ex4_2", "ex5_1")


class ConfigError(ValueError):
    """Invalid configuration (CLI exit code 3)."""


def _est(kmin, kmax, lmin, lmax, radii, oversample=8, substeps=2, floor_rel=1e-9, max_points=2 ** 26,
         min_nodes=64):
    return {"eps": {"kmin": kmin, "kmax": kmax},
            "lambda": {"min": lmin, "max": lmax, "ratio": float(np.sqrt(2.0))},
            "radii": list(radii), "plateau": 0.25, "alpha": 1.5, "oversample": oversample,
            "substeps": substeps, "floor_rel": floor_rel, "window_decay": 1000.0,
            "max_points": max_points, "min_nodes": min_nodes}


# per-scenario estimator blocks; the rationale for each set is in the README
ESTIMATORS = {
    "smoke": {
        "delta": _est(4, 12, 4, 16384, (0.5, 0.25, 0.125), min_nodes=4096),
        "bump": _est(4, 12, 4, 2048, (0.5, 0.25, 0.125), min_nodes=4096),
        "delta_x_one": _est(6, 12, 64, 8192, (0.5, 0.25), min_nodes=512),
    },
    "cones_remark": {},
    "ex2_2": {
        "transport": _est(4, 11, 32, 2048, (0.5, 0.25, 0.125), oversample=16, substeps=8, min_nodes=512),
    },
    "ex4_1": {
        "U": _est(8, 12, 64, 8192, (0.5, 0.25), oversample=64, substeps=4),
        "B": _est(8, 11, 128, 32768, (0.125, 0.0625), oversample=40, floor_rel=1e-7, max_points=2 ** 27),
        "B_regular": _est(8, 11, 64, 4096, (0.125, 0.0625)),
        "BU": _est(9, 12, 64, 16384, (0.25, 0.125), oversample=64, floor_rel=1e-8),
    },
    "ex4_2": {
        "U": _est(8, 12, 64, 8192, (0.5, 0.25), oversample=64, substeps=4),
        "UV": _est(12, 16, 4, 64, (0.125, 0.0625)),
    },
    "ex5_1": {
        "T": _est(10, 14, 8, 1024, (0.5, 0.25), oversample=64),
        "U": _est(8, 12, 64, 8192, (0.5, 0.25), oversample=64, substeps=4),
        "UV": _est(12, 16, 4, 64, (0.125, 0.0625)),
    },
}

BASE = {
    "scenario": None,
    "mollifier": {"d": 1.0, "q": 0},
    "bins": 72,
    "thresholds": {"p_threshold": 5.0, "N_cap": 6.0, "residual_max": 0.5, "p_irregular": 1.0,
                   "delta": 0.02},
    "seed": 0,
    "cone_pairs": 200,
    "out": "colwave_out",
    "estimators": {},
}


def defaults(scenario) -> dict:
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    d = copy.deepcopy(BASE)
    d["scenario"] = scenario
    d["estimators"] = copy.deepcopy(ESTIMATORS[scenario])
    return d


def _merge(base, over, path):
    for k, v in over.items():
        where = f"{path}.{k}" if path else str(k)
        if k not in base:
            raise ConfigError(f"unknown key {where!r}")
        if isinstance(base[k], dict):
            if not isinstance(v, dict):
                raise ConfigError(f"{where!r} must be a mapping")
            _merge(base[k], v, where)
        else:
            base[k] = v


def _num(v, where, lo=None, hi=None, integer=False, lo_open=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where} must be a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"{where} must be an integer, got {v!r}")
    if not np.isfinite(v):
        raise ConfigError(f"{where} must be finite")
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise ConfigError(f"{where} = {v} below the valid range ({'>' if lo_open else '>='} {lo})")
    if hi is not None and v > hi:
        raise ConfigError(f"{where} = {v} above the valid range (<= {hi})")
    return int(v) if integer else float(v)


def _check_estimator(name, b):
    w = f"estimators.{name}"
    kmin = _num(b["eps"]["kmin"], f"{w}.eps.kmin", 1, 30)
    kmax = _num(b["eps"]["kmax"], f"{w}.eps.kmax", 1, 30)
    if kmax - kmin < 2:
        raise ConfigError(f"{w}.eps needs at least 3 levels (kmax >= kmin + 2)")
    lmin = _num(b["lambda"]["min"], f"{w}.lambda.min", 0, lo_open=True)
    lmax = _num(b["lambda"]["max"], f"{w}.lambda.max", 0, lo_open=True)
    ratio = _num(b["lambda"]["ratio"], f"{w}.lambda.ratio", 1.0, 4.0, lo_open=True)
    if lmax < lmin * ratio ** 3:
        raise ConfigError(f"{w}.lambda spans fewer than 4 ladder points")
    radii = b["radii"]
    if not isinstance(radii, list) or len(radii) < 2:
        raise ConfigError(f"{w}.radii must be a list of at least two radii")
    radii = [_num(r, f"{w}.radii", 0, 1.0, lo_open=True) for r in radii]
    if any(a <= c for a, c in zip(radii, radii[1:])):
        raise ConfigError(f"{w}.radii must be strictly decreasing")
    _num(b["plateau"], f"{w}.plateau", 0, 0.9)
    _num(b["alpha"], f"{w}.alpha", 0.25, 4.0)
    _num(b["oversample"], f"{w}.oversample", 8, 256)
    _num(b["substeps"], f"{w}.substeps", 1, 16, integer=True)
    _num(b["floor_rel"], f"{w}.floor_rel", 0, 1e-2, lo_open=True)
    _num(b["window_decay"], f"{w}.window_decay", 0, lo_open=True)
    _num(b["max_points"], f"{w}.max_points", 1024, 2 ** 31, integer=True)
    _num(b["min_nodes"], f"{w}.min_nodes", 2, 2 ** 20, integer=True)


def validate(cfg: dict) -> dict:
    """Range checks; returns cfg unchanged."""
    if cfg["scenario"] not in SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg['scenario']!r}")
    m = cfg["mollifier"]
    _num(m["d"], "mollifier.d", 0, 100, lo_open=True)
    _num(m["q"], "mollifier.q", 0, 8, integer=True)
    bins = _num(cfg["bins"], "bins", 8, 720, integer=True)
    if bins % 4:
        raise ConfigError("bins must be a multiple of 4 (axis directions are bin centres)")
    t = cfg["thresholds"]
    _num(t["p_threshold"], "thresholds.p_threshold", 0, lo_open=True)
    _num(t["N_cap"], "thresholds.N_cap", 0)
    _num(t["residual_max"], "thresholds.residual_max", 0, lo_open=True)
    _num(t["p_irregular"], "thresholds.p_irregular", 0)
    if t["p_irregular"] >= t["p_threshold"]:
        raise ConfigError("thresholds.p_irregular must be below thresholds.p_threshold")
    _num(t["delta"], "thresholds.delta", 0, 0.5, lo_open=True)
    _num(cfg["seed"], "seed", 0, 2 ** 32 - 1, integer=True)
    _num(cfg["cone_pairs"], "cone_pairs", 1, 100_000, integer=True)
    if not isinstance(cfg["out"], str) or not cfg["out"]:
        raise ConfigError("out must be a non-empty path string")
    for name, b in cfg["estimators"].items():
        _check_estimator(name, b)
    return cfg


def load_config(path=None, scenario=None) -> dict:
    """Scenario defaults merged with the file at ``path`` (if any), validated.

    The scenario comes from the argument, else from the file; when both are
    given they must agree.
    """
    over = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            over = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: not valid YAML/JSON: {exc}") from exc
        if not isinstance(over, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
    sc = over.get("scenario")
    if scenario is not None and sc is not None and sc != scenario:
        raise ConfigError(f"config is for scenario {sc!r}, not {scenario!r}")
    scenario = scenario or sc
    if scenario is None:
        raise ConfigError("no scenario given (argument or 'scenario' key)")
    cfg = defaults(scenario)
    _merge(cfg, over, "")
    return validate(cfg)


def estimator_params(cfg: dict, name: str) -> EstimatorParams:
    """EstimatorParams for the named block plus the shared thresholds."""
    try:
        b = cfg["estimators"][name]
    except KeyError:
        raise ConfigError(f"scenario {cfg['scenario']!r} has no estimator block {name!r}") from None
    t = cfg["thresholds"]
    return EstimatorParams(
        eps=tuple(2.0 ** -np.arange(b["eps"]["kmin"], b["eps"]["kmax"] + 1)),
        lambda_min=float(b["lambda"]["min"]), lambda_max=float(b["lambda"]["max"]),
        lambda_ratio=float(b["lambda"]["ratio"]), radii=tuple(float(r) for r in b["radii"]),
        plateau=float(b["plateau"]), window_alpha=float(b["alpha"]), bins=int(cfg["bins"]),
        p_threshold=float(t["p_threshold"]), N_cap=float(t["N_cap"]),
        residual_max=float(t["residual_max"]), p_irregular=float(t["p_irregular"]),
        oversample=float(b["oversample"]), window_decay=float(b["window_decay"]),
        substeps=int(b["substeps"]), floor_rel=float(b["floor_rel"]), max_points=int(b["max_points"]),
        min_nodes=int(b["min_nodes"]))
