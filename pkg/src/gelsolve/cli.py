"""Command-line surface: configuration, solving, validation, emission.

Output is deterministic: identical configuration produces bit-identical CSV
and JSON.  All numbers are printed with 17 significant digits; non-finite
values appear as the literals inf / -inf / nan (JSON carries them as strings
since the format has no such numbers).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .characteristics import DEFAULT_CONFIG, SolverConfig, gel_time
from .errors import ConfigError, GelsolveError, UsageError
from .measures import (
    ArmMeasure,
    MassMeasure,
    arm_measure_from_config,
    mass_measure_from_config,
)
from .models import MODEL_NAMES, make_model
from .oracle import FLAVORS, compare, initial_arms, initial_classic, integrate
from .series import arms_concentrations, concentrations, limiting_concentrations

ARMS_MODELS = ("smoluchowski-arms", "flory-arms")


def fmt(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return format(float(value), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(obj[k]) for k in obj}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return fmt(v)
        return float(fmt(v))
    return obj


def emit_json(obj, stream) -> None:
    json.dump(_jsonable(obj), stream, indent=2, sort_keys=True)
    stream.write("\n")


def emit_csv(header, rows, stream) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


def _thread_count() -> int:
    raw = os.environ.get("GELSOLVE_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


# ---------------------------------------------------------------------------
# Configuration

def _load_config_file(path) -> dict:
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _measure_spec(args, cfg) -> dict:
    if getattr(args, "measure", None) is not None:
        try:
            return json.loads(args.measure)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--measure is not valid JSON: {exc}") from exc
    if "initial" in cfg:
        return cfg["initial"]
    raise ConfigError("no initial measure given (--measure or config 'initial')")


def _build_measure(args, cfg, model_name):
    spec = _measure_spec(args, cfg)
    try:
        if model_name in ARMS_MODELS:
            return arm_measure_from_config(spec)
        return mass_measure_from_config(spec)
    except GelsolveError as exc:
        raise ConfigError(str(exc)) from exc


def _model_name(args, cfg) -> str:
    name = getattr(args, "model", None) or cfg.get("model")
    if name is None:
        raise ConfigError("no model given (--model or config 'model')")
    if name not in MODEL_NAMES:
        raise ConfigError(
            f"unknown model {name!r}; choose from {sorted(MODEL_NAMES)}"
        )
    return name


def _solver_config(args, cfg) -> SolverConfig:
    solver = dict(cfg.get("solver", {}))
    if getattr(args, "root_tol", None) is not None:
        solver["root_tol"] = args.root_tol
    if getattr(args, "ode_dt", None) is not None:
        solver["ode_dt"] = args.ode_dt
    try:
        return SolverConfig(
            root_tol=float(solver.get("root_tol", DEFAULT_CONFIG.root_tol)),
            max_iter=int(solver.get("max_iter", DEFAULT_CONFIG.max_iter)),
            ode_dt=float(solver.get("ode_dt", DEFAULT_CONFIG.ode_dt)),
        )
    except (TypeError, ValueError, GelsolveError) as exc:
        raise ConfigError(f"bad solver settings: {exc}") from exc


def _time_grid(args, cfg):
    grid = dict(cfg.get("time_grid", {}))
    for key, flag in (
        ("start", "t_start"),
        ("end", "t_end"),
        ("count", "count"),
        ("spacing", "spacing"),
    ):
        v = getattr(args, flag, None)
        if v is not None:
            grid[key] = v
    try:
        start = float(grid.get("start", 0.0))
        end = float(grid["end"])
        count = int(grid.get("count", 81))
        spacing = grid.get("spacing", "linear")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad time grid: {exc}") from exc
    if count < 2:
        raise ConfigError("time grid needs count >= 2")
    if not end > start >= 0.0:
        raise ConfigError("time grid needs end > start >= 0")
    if spacing == "linear":
        return list(np.linspace(start, end, count))
    if spacing == "geometric":
        if start <= 0.0:
            raise ConfigError("geometric spacing needs start > 0")
        return list(np.geomspace(start, end, count))
    raise ConfigError(f"unknown spacing {spacing!r}")


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_moments(args, cfg, out) -> int:
    spec = _measure_spec(args, cfg)
    try:
        measure = mass_measure_from_config(spec)
    except GelsolveError:
        measure = None
    if measure is not None:
        mom = measure.moments()
        emit_json({"M0": mom.M0, "K": mom.K, "m0": mom.m0}, out)
        return 0
    try:
        arm = arm_measure_from_config(spec)
    except GelsolveError as exc:
        raise ConfigError(str(exc)) from exc
    emit_json(
        {"A0": arm.A0, "K": arm.K, "M0": arm.M0, "total": arm.total}, out
    )
    return 0


def _trajectory_row(model, t):
    st = model.state(t)
    sm = model.second_moment(t)
    return (st.t, st.M, st.A, st.ell, st.alpha, st.beta, sm)


def _cmd_trajectory(args, cfg, out) -> int:
    name = _model_name(args, cfg)
    config = _solver_config(args, cfg)
    measure = _build_measure(args, cfg, name)
    times = _time_grid(args, cfg)
    model = make_model(name, measure, config)
    if name in ARMS_MODELS:
        rows = [_trajectory_row(model, t) for t in times]  # sequential ODE
    else:
        workers = _thread_count()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(lambda t: _trajectory_row(model, t), times))
        else:
            rows = [_trajectory_row(model, t) for t in times]
    emit_csv(
        ("t", "M", "A", "ell", "alpha", "beta", "second_moment"), rows, out
    )
    return 0


def _cmd_concentrations(args, cfg, out) -> int:
    name = _model_name(args, cfg)
    config = _solver_config(args, cfg)
    measure = _build_measure(args, cfg, name)
    t = args.t if args.t is not None else cfg.get("t")
    if t is None:
        raise ConfigError("no time given (--t or config 't')")
    t = float(t)
    gel = name.startswith("flory")
    if name in ARMS_MODELS:
        a_max = int(args.amax or cfg.get("a_max", 40))
        m_max = int(args.mmax or cfg.get("m_max", 40))
        conc = arms_concentrations(
            measure, t, a_max, m_max, gel_interacting=gel, config=config
        )
        rows = [
            (a, m, conc.values[a, m])
            for a in range(a_max + 1)
            for m in range(1, m_max + 1)
        ]
        emit_csv(("a", "m", "c"), rows, out)
        return 0
    order = int(args.order or cfg.get("order", 64))
    c = concentrations(measure, t, order, gel_interacting=gel, config=config)
    emit_csv(("m", "c"), [(m, c[m]) for m in range(1, order + 1)], out)
    return 0


def _cmd_limits(args, cfg, out) -> int:
    name = _model_name(args, cfg)
    if name not in ARMS_MODELS:
        raise ConfigError("limits are defined for the arms models only")
    config = _solver_config(args, cfg)
    measure = _build_measure(args, cfg, name)
    m_max = int(args.mmax or cfg.get("m_max", 20))
    gel = name == "flory-arms"
    lim = limiting_concentrations(
        measure, m_max, gel_interacting=gel, config=config
    )
    emit_json(
        {
            "T_gel": gel_time(measure),
            "p_nu_or_c": lim.p_or_c,
            "beta_inf": lim.beta_inf,
            "M_inf": lim.M_inf,
            "degenerate": lim.degenerate,
            "c_inf": list(lim.c_inf[2:]),
        },
        out,
    )
    return 0


def _cmd_validate(args, cfg, out) -> int:
    name = _model_name(args, cfg)
    config = _solver_config(args, cfg)
    measure = _build_measure(args, cfg, name)
    flavor = args.flavor or cfg.get("flavor") or (
        "gel-interacting" if name.startswith("flory") else "no-big-coagulation"
    )
    if flavor not in FLAVORS:
        raise ConfigError(f"flavor must be one of {FLAVORS}")
    t_end = float(args.t_end if args.t_end is not None else cfg.get("t_end", 1.0))
    dt = float(args.dt or cfg.get("dt", 1e-3))
    tol = float(args.tol or cfg.get("tol", 1e-3))
    m_max = int(args.mmax or cfg.get("m_max", 200))
    times = list(np.linspace(0.0, t_end, 11))
    model = make_model(name, measure, config)
    if name in ARMS_MODELS:
        a_max = int(args.amax or cfg.get("a_max", 120))
        init = initial_arms(measure, a_max, m_max)
        traj = integrate(init, times, dt, flavor=flavor)
        oracle_vals = [st.arm_count for st in traj]
        analytic_vals = [model.arms_count(t) for t in times]
        quantity = "arms"
    else:
        init = initial_classic(measure, m_max)
        traj = integrate(init, times, dt, flavor=flavor)
        oracle_vals = [st.mass for st in traj]
        analytic_vals = [model.mass(t) for t in times]
        quantity = "mass"
    report = compare(
        times, analytic_vals, oracle_vals, quantity=quantity, tol=tol
    )
    rows = [
        (t, a, o, e)
        for t, a, o, e in zip(times, analytic_vals, oracle_vals, report.abs_errors)
    ]
    emit_csv(("t", "analytic", "oracle", "abs_error"), rows, out)
    return 0 if report.passed else 1


COMMANDS = {
    "moments": _cmd_moments,
    "trajectory": _cmd_trajectory,
    "concentrations": _cmd_concentrations,
    "limits": _cmd_limits,
    "validate": _cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gelsolve",
        description="Global solver for four coagulation models with gelation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--model", choices=sorted(MODEL_NAMES))
        p.add_argument("--measure", help="initial measure as inline JSON")
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--root-tol", type=float, dest="root_tol")
        p.add_argument("--ode-dt", type=float, dest="ode_dt")

    p = sub.add_parser("moments", help="moments of the initial measure")
    common(p)

    p = sub.add_parser("trajectory", help="solved quantities on a time grid")
    common(p)
    p.add_argument("--t-start", type=float, dest="t_start")
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--count", type=int)
    p.add_argument("--spacing", choices=("linear", "geometric"))

    p = sub.add_parser("concentrations", help="c_t(m) or c_t(a,m) at one time")
    common(p)
    p.add_argument("--t", type=float)
    p.add_argument("--order", type=int, help="series order (classic models)")
    p.add_argument("--amax", type=int)
    p.add_argument("--mmax", type=int)

    p = sub.add_parser("limits", help="long-time limits (arms models)")
    common(p)
    p.add_argument("--mmax", type=int)

    p = sub.add_parser("validate", help="compare against the ODE oracle")
    common(p)
    p.add_argument("--flavor", choices=FLAVORS)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--dt", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--mmax", type=int)
    p.add_argument("--amax", type=int)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config_file(args.config) if args.config else {}
        out = open(args.output, "w") if args.output else sys.stdout
        try:
            return COMMANDS[args.command](args, cfg, out)
        finally:
            if args.output:
                out.close()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except GelsolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
