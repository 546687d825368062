"""
Command-line front end.

    cfma {rates,region,check,sweep,coeffs} [--config PATH] [--out PATH]
         [--format csv|json] [--seed U64] [--method mc|quadrature|exact|auto]
         [--samples N] [--nodes N] [--section.key=value ...]

The configuration is one JSON document; any leaf can be overridden with a
dotted flag such as ``--channel.power=2``.  Exit codes: 0 ok, 2 config
error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import export
from .channel_stats import (
    DEFAULT_GH_NODES,
    DEFAULT_MC_SAMPLES,
    ChannelModel,
    Exact,
    GaussHermite,
    MonteCarlo,
    default_method,
    parse_gain,
)
from .conditions import (
    GammaGrid,
    check_sum_capacity,
    condition_iid_gaussian,
    condition_mean_ratio,
    sufficient_curve,
)
from .errors import CfmaError
from .explorer import coeff_comparison, gaussian_template, sweep_classify, trace_region
from .rates import CoefficientPair, Scaling, rate_pairs_over_gamma

COMMANDS = ("rates", "region", "check", "sweep", "coeffs")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    """Invalid or incomplete run configuration."""


# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxx Config handling xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(config: dict, overrides) -> dict:
    """Apply ``["--a.b=v", "--c.d", "w", ...]`` style overrides in place."""
    items = list(overrides)
    i = 0
    while i < len(items):
        tok = items[i]
        if not tok.startswith("--") or len(tok) <= 2:
            raise ConfigError(f"unexpected argument {tok!r}")
        key, eq, val = tok[2:].partition("=")
        if not eq:
            if i + 1 >= len(items):
                raise ConfigError(f"override {tok!r} has no value")
            val = items[i + 1]
            i += 1
        node = config
        parts = key.split(".")
        for part in parts[:-1]:
            nxt = node.setdefault(part, {})
            if not isinstance(nxt, dict):
                raise ConfigError(f"override {key!r}: {part!r} is not a section")
            node = nxt
        node[parts[-1]] = _parse_value(val)
        i += 1
    return config


def _get(config: dict, path: str, default=None, required=False):
    node = config
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(f"missing field '{path}'")
            return default
        node = node[part]
    return node


def _number(config, path, default=None, required=False, kind=float):
    val = _get(config, path, default, required)
    if val is None:
        return None
    try:
        out = kind(val)
    except (TypeError, ValueError):
        raise ConfigError(f"field '{path}': expected a number, got {val!r}") from None
    if kind is float and not math.isfinite(out):
        raise ConfigError(f"field '{path}': must be finite")
    return out


def load_channel(config: dict, base_dir=None) -> ChannelModel:
    try:
        g1 = parse_gain(str(_get(config, "channel.gain1", required=True)), base_dir)
        g2 = parse_gain(str(_get(config, "channel.gain2", required=True)), base_dir)
        power = _number(config, "channel.power", 1.0)
        return ChannelModel(g1, g2, power)
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(f"field 'channel': {exc}") from None


def load_method(config: dict):
    """Method from the ``method`` block; returns None for 'auto'."""
    kind = str(_get(config, "method.kind", "auto")).lower()
    if kind == "auto":
        return None
    if kind in ("quadrature", "gh", "gauss-hermite"):
        return GaussHermite(_number(config, "method.nodes", DEFAULT_GH_NODES, kind=int))
    if kind == "exact":
        return Exact()
    if kind in ("mc", "montecarlo", "monte-carlo"):
        seed = _number(config, "method.seed", None, kind=int)
        if seed is None:
            raise ConfigError("field 'method.seed': required when method is mc")
        samples = _number(config, "method.samples", DEFAULT_MC_SAMPLES, kind=int)
        try:
            return MonteCarlo(seed, samples)
        except ValueError as exc:
            raise ConfigError(f"field 'method': {exc}") from None
    raise ConfigError(f"field 'method.kind': unknown method {kind!r}")


def _grid(block: dict, path: str) -> GammaGrid:
    g = _get(block, path, {}) or {}
    if not isinstance(g, dict):
        raise ConfigError(f"field '{path}': expected an object")
    try:
        return GammaGrid(
            gamma_min=float(g.get("gamma_min", 1e-3)),
            gamma_max=float(g.get("gamma_max", 1e3)),
            n_points=int(g.get("n_points", 512)),
            positive=bool(g.get("positive", True)),
            negative=bool(g.get("negative", True)),
            spacing=str(g.get("spacing", "log")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{path}': {exc}") from None


def _gamma_values(block: dict, path: str):
    """Gamma list: a number, a list, or ``{start, stop, num, spacing}``."""
    g = _get(block, path)
    if g is None:
        return None
    if isinstance(g, (int, float)):
        return np.array([float(g)])
    if isinstance(g, list):
        try:
            return np.array([float(x) for x in g])
        except (TypeError, ValueError):
            raise ConfigError(f"field '{path}': expected numbers") from None
    if isinstance(g, dict):
        try:
            start, stop, num = float(g["start"]), float(g["stop"]), int(g["num"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"field '{path}': needs start, stop, num") from None
        if g.get("spacing", "log") == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"field '{path}': log spacing needs positive bounds")
            return np.geomspace(start, stop, num)
        return np.linspace(start, stop, num)
    raise ConfigError(f"field '{path}': unsupported value {g!r}")


def _coeffs(entry, path) -> CoefficientPair:
    try:
        return CoefficientPair(tuple(entry["a"]), tuple(entry["b"]))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"field '{path}': needs integer pairs 'a' and 'b' ({exc})") from None


def build_config(args, extra) -> dict:
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        if not isinstance(config, dict):
            raise ConfigError("config must be a JSON object")
    apply_overrides(config, extra)
    if args.method is not None:
        config.setdefault("method", {})["kind"] = args.method
    for flag, key in (("seed", "seed"), ("samples", "samples"), ("nodes", "nodes")):
        val = getattr(args, flag)
        if val is not None:
            config.setdefault("method", {})[key] = val
    if args.out is not None:
        config.setdefault("output", {})["path"] = args.out
    if args.format is not None:
        config.setdefault("output", {})["format"] = args.format
    present = [c for c in COMMANDS if c in config]
    others = [c for c in present if c != args.command]
    if others:
        raise ConfigError(f"config has blocks for other commands: {others}")
    config.setdefault(args.command, {})
    fmt = _get(config, "output.format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"field 'output.format': must be csv or json, got {fmt!r}")
    return config


# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxx Commands xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def _records(header, rows):
    return [dict(zip(header, row)) for row in rows]


def cmd_rates(config, base_dir=None) -> str:
    block = config["rates"]
    model = load_channel(config, base_dir)
    method = load_method(config)
    coeffs = _coeffs({"a": block.get("a", [1, 1]), "b": block.get("b", [0, 1])}, "rates")
    gammas = _gamma_values(config, "rates.gamma")
    betas = None
    if gammas is None:
        beta = block.get("beta", [1.0, 1.0])
        try:
            betas = Scaling(float(beta[0]), float(beta[1]))
        except (TypeError, ValueError, IndexError):
            raise ConfigError("field 'rates.beta': expected [beta1, beta2]") from None
        gammas = np.array([betas.gamma])
    pairs = rate_pairs_over_gamma(model, coeffs, gammas, method)
    header = export.COLUMNS["rates"]
    rows = []
    for g, rp in zip(gammas, pairs):
        b1, b2 = (betas.beta1, betas.beta2) if betas is not None else (float(g), 1.0)
        bd = rp.breakdown
        rows.append([float(g), b1, b2, rp.R1, rp.R2, bd.r_first[0], bd.r_first[1],
                     bd.r_second[0], bd.r_second[1], bd.se_first, bd.se_second, rp.valid])
    meta = {"coeffs": coeffs.label}
    if _get(config, "output.format", "csv") == "json":
        return export.to_json("rates", {"coeffs": coeffs.label, "rows": _records(header, rows)})
    return export.to_csv("rates", header, rows, meta)


def cmd_region(config, base_dir=None) -> str:
    block = config["region"]
    model = load_channel(config, base_dir)
    method = load_method(config)
    entries = block.get("coeffs", [{"a": [1, 1], "b": [0, 1]}, {"a": [1, 1], "b": [1, 0]}])
    coeff_sets = [_coeffs(e, f"region.coeffs[{i}]") for i, e in enumerate(entries)]
    gammas = _gamma_values(config, "region.gamma")
    if gammas is None:
        gammas = np.geomspace(0.1, 10.0, 201)
    trace = trace_region(model, coeff_sets, gammas, method,
                         include_sic_corners=bool(block.get("sic_corners", True)),
                         keep_invalid=bool(block.get("keep_invalid", False)))
    c1, c2, cs = trace.bounds
    header = export.COLUMNS["region"]
    rows = [[p.R1, p.R2, p.gamma, p.coeffs, p.valid] for p in trace.points]
    if _get(config, "output.format", "csv") == "json":
        return export.to_json("region", {"pentagon": {"C1": c1, "C2": c2, "Csum": cs},
                                         "points": _records(header, rows)})
    meta = {"pentagon": f"C1={export.fmt(c1)},C2={export.fmt(c2)},Csum={export.fmt(cs)}"}
    return export.to_csv("region", header, rows, meta)


def _interval_dicts(intervals):
    return [{"lo": iv.lo, "hi": iv.hi, "provenance": iv.provenance.value} for iv in intervals]


def cmd_check(config, base_dir=None) -> str:
    block = config["check"]
    model = load_channel(config, base_dir)
    method = load_method(config) or default_method(model)
    a = tuple(int(x) for x in block.get("a", [1, 1]))
    grid = _grid(config, "check.grid")
    report = check_sum_capacity(model, a, grid, method)
    n_grid = grid.points().size
    curve = report.checked_gammas[:n_grid]
    gammas = np.array([g for g, _ in curve])
    suff, suff_se = sufficient_curve(model, gammas, method, report.capacity)
    conditions = {}
    try:
        g0, cv = condition_mean_ratio(model, method, report.capacity)
        conditions["mean_ratio"] = {"gamma0": g0, "value": cv.value.value,
                                    "std_error": cv.value.std_error, "verdict": cv.verdict}
    except CfmaError as exc:
        conditions["mean_ratio"] = {"error": str(exc)}
    try:
        cv = condition_iid_gaussian(model, method, report.capacity)
        conditions["iid_gaussian"] = {"value": cv.value.value, "std_error": cv.value.std_error,
                                      "verdict": cv.verdict}
    except CfmaError as exc:
        conditions["iid_gaussian"] = {"error": str(exc)}
    header = export.COLUMNS["check"]
    rows = [[g, cv.value.value, cv.value.std_error, float(s), float(se)]
            for (g, cv), s, se in zip(curve, suff, suff_se)]
    if _get(config, "output.format", "json") == "csv":
        meta = {"verdict": report.verdict,
                "intervals": ";".join(f"[{export.fmt(iv.lo)},{export.fmt(iv.hi)}]"
                                      for iv in report.intervals)}
        return export.to_csv("check", header, rows, meta)
    payload = {
        "a": list(a),
        "verdict": report.verdict,
        "achievable": report.achievable,
        "capacity": {"value": report.capacity.value, "std_error": report.capacity.std_error},
        "intervals": _interval_dicts(report.intervals),
        "closed_form_intervals": _interval_dicts(report.closed_form_intervals),
        "conditions": conditions,
        "curves": {h: [r[i] for r in rows] for i, h in enumerate(header)},
    }
    return export.to_json("check", payload)


def _axis(spec, name):
    if isinstance(spec, list):
        return [float(x) for x in spec]
    if isinstance(spec, dict):
        try:
            return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"])).tolist()
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"field 'sweep.axes.{name}': needs start, stop, num") from None
    raise ConfigError(f"field 'sweep.axes.{name}': expected a list or range")


def cmd_sweep(config, base_dir=None):
    block = config["sweep"]
    template = block.get("template", "gaussian")
    if template != "gaussian":
        raise ConfigError(f"field 'sweep.template': unknown template {template!r}")
    axes = block.get("axes")
    if not isinstance(axes, dict) or not axes:
        raise ConfigError("field 'sweep.axes': needs at least one axis")
    param_grid = {name: _axis(spec, name) for name, spec in axes.items()}
    fixed = block.get("fixed", {})
    method = load_method(config)
    grid = _grid(config, "sweep.grid")
    cells = sweep_classify(param_grid, gaussian_template, grid, method, fixed=fixed,
                           workers=block.get("workers"))
    names = list(param_grid)
    header = names + export.COLUMNS["sweep"]
    rows = [[c.params.get(n) for n in names] +
            [c.label or "", c.achievable, c.indeterminate, c.best_gamma, c.best_value,
             c.gamma0, c.gamma0_value, c.error or ""] for c in cells]
    ok = any(c.error is None for c in cells)
    if _get(config, "output.format", "csv") == "json":
        text = export.to_json("sweep", {"axes": param_grid, "fixed": fixed,
                                        "cells": _records(header, rows)})
    else:
        text = export.to_csv("sweep", header, rows, {"template": template})
    return text, ok


def cmd_coeffs(config, base_dir=None) -> str:
    block = config["coeffs"]
    model = load_channel(config, base_dir)
    method = load_method(config)
    a_max = int(block.get("a_max", 2))
    grid = _grid(config, "coeffs.grid")
    scores = coeff_comparison(model, a_max, grid, method,
                              include_negative=bool(block.get("include_negative", False)))
    header = export.COLUMNS["coeffs"]
    rows = []
    for s in scores:
        if not s.intervals:
            rows.append([s.a[0], s.a[1], None, None, s.measure])
        for iv in s.intervals:
            rows.append([s.a[0], s.a[1], iv.lo, iv.hi, s.measure])
    if _get(config, "output.format", "csv") == "json":
        return export.to_json("coeffs", {"rows": _records(header, rows)})
    return export.to_csv("coeffs", header, rows)


HANDLERS = {
    "rates": cmd_rates,
    "region": cmd_region,
    "check": cmd_check,
    "sweep": cmd_sweep,
    "coeffs": cmd_coeffs,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=int, help="Monte Carlo master seed (unsigned 64-bit)")
    common.add_argument("--method", choices=("mc", "quadrature", "exact", "auto"))
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--nodes", type=int, help="Gauss-Hermite nodes per dimension")
    parser = argparse.ArgumentParser(
        prog="cfma",
        description="CFMA rates and sum-capacity conditions for two-user fading MACs.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "rates": "achievable rate pair for given coefficients and scaling(s)",
        "region": "trace achievable rate pairs against the capacity pentagon",
        "check": "sum-capacity achievability report and condition curves",
        "sweep": "classify a mesh of channel statistics into regions",
        "coeffs": "compare first-combination coefficients by achieving-gamma measure",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        config = build_config(args, extra)
        base_dir = Path(args.config).resolve().parent if args.config else None
        # check/JSON is the natural default for reports
        if args.command == "check":
            config.setdefault("output", {}).setdefault("format", "json")
        result = HANDLERS[args.command](config, base_dir)
        ok = True
        if isinstance(result, tuple):
            result, ok = result
    except ConfigError as exc:
        print(f"cfma: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CfmaError as exc:
        print(f"cfma: numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = _get(config, "output.path")
    if out:
        Path(out).write_text(result)
    else:
        sys.stdout.write(result)
    return EXIT_OK if ok else EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
