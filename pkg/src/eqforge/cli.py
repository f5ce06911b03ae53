"""Command-line pipeline: generate benchmark data, discover equations,
sweep subsampling hyperparameters, and predict from discovered models.

Every subcommand accepts ``--config FILE`` (a JSON object whose keys mirror
the flag names, underscores for dashes); explicit flags override file
values, and unknown keys are rejected.  Exit codes: 0 success, 2 I/O or
configuration error, 3 empty discovered model, 4 discovered PDE outside
the supported solver family.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .datasets import (
    BlowUpError,
    DatasetError,
    NoiseSpec,
    _fish_rhs,
    _predator_prey_rhs,
    gen_fish_harvesting,
    gen_heat_random_ibc,
    gen_predator_prey,
    heat_bc_left,
    heat_bc_right,
    heat_initial,
    read_dataset_csv,
    rk4_integrate,
    save_dataset,
)
from .dictionary import DictionaryError, monomials_up_to_degree
from .heatsolver import HeatSolverError, solve_parabolic_1d
from .predict import (
    PredictError,
    UnsupportedFormError,
    DiscoveredEquation,
    integrate_fan,
    integrate_ode,
    load_model_json,
    mse_report,
    save_model_json,
    solve_discovered_heat,
)
from .rvm import RegressionProblem, RvmError
from .subtsbr import (
    InfeasibleError,
    SubsamplingConfig,
    SubtsbrError,
    adjusted_criterion,
    fit_subtsbr,
    subsamples_needed,
    sweep,
    winner_index,
)
from .tsbr import TsbrConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EMPTY_MODEL = 3
EXIT_UNSUPPORTED = 4

#: Columns never picked up when inferring dictionary variables from a CSV.
#: t is excluded by default (most targets are autonomous); pass --variables
#: explicitly to regress on it.
_BOOKKEEPING = {"curve", "realization", "deriv_valid", "t"}


class CliError(Exception):
    """Usage or configuration error; maps to exit code 2."""


def _merge_config(args, defaults: dict) -> dict:
    """Layer defaults <- config file <- explicitly provided flags."""
    merged = dict(defaults)
    path = getattr(args, "config", None)
    if path is not None:
        try:
            with open(path) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise CliError(f"cannot read config file {path}: {err}") from err
        if not isinstance(file_cfg, dict):
            raise CliError("config file must contain a JSON object")
        unknown = sorted(set(file_cfg) - set(defaults))
        if unknown:
            raise CliError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(file_cfg)
    for key in defaults:
        if hasattr(args, key):
            merged[key] = getattr(args, key)
    return merged


def _list_of(value, cast, what):
    if value is None:
        return None
    parts = (
        [p.strip() for p in value.split(",")] if isinstance(value, str) else list(value)
    )
    parts = [p for p in parts if p != ""]
    if not parts:
        raise CliError(f"empty {what} list")
    try:
        return [cast(p) for p in parts]
    except (TypeError, ValueError) as err:
        raise CliError(f"bad {what} list: {err}") from err


def _thread_count(value) -> int:
    if value is None:
        value = os.environ.get("EQFORGE_THREADS")
    if value is None:
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError as err:
        raise CliError(f"bad thread count: {value!r}") from err
    if n < 1:
        raise CliError("thread count must be >= 1")
    return n


def _read_table(path):
    try:
        return read_dataset_csv(path)
    except (OSError, ValueError) as err:
        raise CliError(f"cannot read dataset {path}: {err}") from err


def infer_variables(columns, target: str) -> tuple:
    """Dictionary variables from CSV columns: drop the target, derivative
    columns (d*dt), and bookkeeping columns."""
    out = tuple(
        c
        for c in columns
        if c != target
        and c not in _BOOKKEEPING
        and not (len(c) > 3 and c.startswith("d") and c.endswith("dt"))
    )
    if not out:
        raise CliError("no dictionary variables left after filtering; use --variables")
    return out


def build_problem(columns, table, target, variables=None, degree=3):
    """Design matrix + target vector from a dataset table.

    Rows with a missing value in any used column are dropped (derivative
    stencils leave NaN at curve edges).  Returns (problem, dictionary).
    """
    columns = tuple(columns)
    if target not in columns:
        raise CliError(f"target column {target!r} not among {list(columns)}")
    if variables is None:
        variables = infer_variables(columns, target)
    else:
        variables = tuple(variables)
        missing = [v for v in variables if v not in columns]
        if missing:
            raise CliError(f"variable columns not in dataset: {missing}")
    col_ix = {c: k for k, c in enumerate(columns)}
    var_ix = [col_ix[v] for v in variables]
    keep = np.isfinite(table[:, var_ix + [col_ix[target]]]).all(axis=1)
    if not keep.any():
        raise CliError("no usable rows: every row has a missing value")
    dictionary = monomials_up_to_degree(variables, int(degree))
    phi = dictionary.evaluate(table[np.ix_(keep, var_ix)])
    eta = table[keep, col_ix[target]]
    return RegressionProblem(eta, phi, dictionary.labels), dictionary


# ---------------------------------------------------------------------------
# generate

_GENERATE_DEFAULTS = {
    "out": None,
    "noise": 0.0,
    "outlier_frac": 0.0,
    "outlier_low": 0.5,
    "outlier_high": 1.0,
    "points": None,
    "curves": None,
    "realizations": None,
    "seed": None,
}


def cmd_generate(args) -> int:
    cfg = _merge_config(args, _GENERATE_DEFAULTS)
    name = args.generator
    noise = NoiseSpec(
        gaussian_sigma=float(cfg["noise"]),
        outlier_fraction=float(cfg["outlier_frac"]),
        outlier_law=(float(cfg["outlier_low"]), float(cfg["outlier_high"])),
        seed=None if cfg["seed"] is None else int(cfg["seed"]),
    )

    def reject(key, owner):
        if cfg[key] is not None:
            raise CliError(f"--{key.replace('_', '-')} only applies to {owner}")

    if name == "predator-prey":
        reject("curves", "fish")
        reject("realizations", "heat")
        data = gen_predator_prey(
            n_points=200 if cfg["points"] is None else int(cfg["points"]), noise=noise
        )
        n_rows = data.n
    elif name == "fish":
        reject("realizations", "heat")
        data = gen_fish_harvesting(
            n_curves=5 if cfg["curves"] is None else int(cfg["curves"]),
            n_points_per_curve=20 if cfg["points"] is None else int(cfg["points"]),
            noise=noise,
        )
        n_rows = sum(t.n for t in data)
    elif name == "heat":
        reject("points", "predator-prey/fish")
        reject("curves", "fish")
        data = gen_heat_random_ibc(
            n_realizations=20 if cfg["realizations"] is None else int(cfg["realizations"]),
            noise=noise,
        )
        n_rows = data.samples.shape[0]
    else:  # pragma: no cover - argparse choices guard this
        raise CliError(f"unknown generator {name!r}")

    out = cfg["out"] or f"{name.replace('-', '_')}.csv"
    try:
        path, sidecar = save_dataset(data, out, generator=name, noise=noise)
    except OSError as err:
        raise CliError(f"cannot write {out}: {err}") from err
    print(f"wrote {n_rows} rows to {path} (metadata in {sidecar})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# discover

_DISCOVER_DEFAULTS = {
    "data": None,
    "target": None,
    "variables": None,
    "degree": 3,
    "threshold": 0.1,
    "subsample": None,
    "n_sub": 30,
    "outlier_frac": None,
    "confidence": None,
    "seed": None,
    "out": "model.json",
    "threads": None,
}


def cmd_discover(args) -> int:
    cfg = _merge_config(args, _DISCOVER_DEFAULTS)
    for key in ("data", "target", "subsample"):
        if cfg[key] is None:
            raise CliError(f"--{key} is required")
    columns, table = _read_table(cfg["data"])
    problem, dictionary = build_problem(
        columns,
        table,
        cfg["target"],
        _list_of(cfg["variables"], str, "variable"),
        int(cfg["degree"]),
    )
    size = int(cfg["subsample"])
    n_sub = cfg["n_sub"]
    if isinstance(n_sub, str) and n_sub.strip().lower() == "auto":
        if cfg["outlier_frac"] is None or cfg["confidence"] is None:
            raise CliError("--n-sub auto requires --outlier-frac and --confidence")
        count = subsamples_needed(
            problem.n, float(cfg["outlier_frac"]), size, float(cfg["confidence"])
        )
        print(f"auto subsample count: L = {count} (N = {problem.n}, S = {size})")
    else:
        count = int(n_sub)
    seed = None if cfg["seed"] is None else int(cfg["seed"])
    sub_cfg = SubsamplingConfig(
        subsample_size=size,
        n_subsamples=count,
        seed=seed,
        n_threads=_thread_count(cfg["threads"]),
    )
    model, results = fit_subtsbr(
        problem, TsbrConfig(threshold=float(cfg["threshold"])), sub_cfg
    )
    win = winner_index(results)
    adjusted = adjusted_criterion(model.criterion, size)
    equation = DiscoveredEquation.from_model(model, dictionary, cfg["target"])
    try:
        save_model_json(
            cfg["out"],
            model,
            dictionary,
            cfg["target"],
            adjusted_criterion=adjusted,
            subsample={
                "size": size,
                "count": count,
                "winner_indices": list(results[win].indices),
            },
            seed=seed,
        )
    except OSError as err:
        raise CliError(f"cannot write {cfg['out']}: {err}") from err
    print(equation.text())
    print(
        f"criterion = {model.criterion:.6g} (adjusted {adjusted:.6g}), "
        f"winner subsample {win + 1}/{count}, rows available = {problem.n}"
    )
    print(f"wrote {cfg['out']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep

_SWEEP_DEFAULTS = {
    "data": None,
    "target": None,
    "variables": None,
    "degree": 3,
    "threshold": 0.1,
    "sizes": None,
    "counts": None,
    "trials": 50,
    "truth": None,
    "seed": None,
    "out": "sweep.csv",
    "threads": None,
}


def cmd_sweep(args) -> int:
    cfg = _merge_config(args, _SWEEP_DEFAULTS)
    for key in ("data", "target", "sizes", "counts"):
        if cfg[key] is None:
            raise CliError(f"--{key} is required")
    columns, table = _read_table(cfg["data"])
    problem, _ = build_problem(
        columns,
        table,
        cfg["target"],
        _list_of(cfg["variables"], str, "variable"),
        int(cfg["degree"]),
    )
    result = sweep(
        problem,
        TsbrConfig(threshold=float(cfg["threshold"])),
        _list_of(cfg["sizes"], int, "sizes"),
        _list_of(cfg["counts"], int, "counts"),
        trials=int(cfg["trials"]),
        truth=_list_of(cfg["truth"], str, "truth"),
        seed=None if cfg["seed"] is None else int(cfg["seed"]),
        n_threads=_thread_count(cfg["threads"]),
    )
    try:
        result.to_csv(cfg["out"])
    except OSError as err:
        raise CliError(f"cannot write {cfg['out']}: {err}") from err
    print(f"wrote {len(result.cells)} cells to {cfg['out']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# predict

_PREDICT_DEFAULTS = {
    "model": None,
    "pde": None,
    "ic": None,
    "bc_left": None,
    "bc_right": None,
    "xi": None,
    "initial": None,
    "fan": None,
    "t_end": None,
    "n_out": 200,
    "reference": None,
    "out": "prediction.csv",
}


def _load_equation(path):
    try:
        equation, doc = load_model_json(path)
    except OSError as err:
        raise CliError(f"cannot read model {path}: {err}") from err
    except (json.JSONDecodeError, PredictError, DictionaryError) as err:
        raise CliError(f"bad model file {path}: {err}") from err
    return equation, doc


def _rows_to_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as err:
        raise CliError(f"cannot write {path}: {err}") from err


def _fmt_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))
    return v


def _predict_heat(cfg) -> int:
    for key in ("pde", "ic", "bc_left", "bc_right"):
        if cfg[key] is None:
            raise CliError("heat prediction needs --pde, --ic, --bc-left and --bc-right")
    if cfg["model"]:
        raise CliError("--model and --pde/--ic/--bc-* are mutually exclusive")
    if cfg["xi"] is None:
        raise CliError("--xi is required for heat prediction (e.g. --xi 0.5,0.5,0.5)")
    xi = _list_of(cfg["xi"], float, "xi")
    if len(xi) != 3:
        raise CliError("--xi must supply three values")
    equations = {}
    for key in ("pde", "ic", "bc_left", "bc_right"):
        equation, _ = _load_equation(cfg[key])
        if equation.is_empty:
            print(f"error: model {cfg[key]} has no terms", file=sys.stderr)
            return EXIT_EMPTY_MODEL
        equations[key] = equation
    t_end = 15.0 if cfg["t_end"] is None else float(cfg["t_end"])
    field = solve_discovered_heat(
        equations["pde"],
        equations["ic"],
        (equations["bc_left"], equations["bc_right"]),
        xi,
        t_span=(0.0, t_end),
    )
    if cfg["reference"] is None:
        rows = [
            (_fmt_cell(float(t)), _fmt_cell(float(x)), _fmt_cell(float(v)))
            for i, t in enumerate(field.times)
            for x, v in zip(field.x, field.values[i])
        ]
        _rows_to_csv(cfg["out"], ["t", "x", "predicted"], rows)
        print(f"wrote {cfg['out']} (no reference; MSE not computed)")
        return EXIT_OK
    if cfg["reference"] != "heat":
        raise CliError("heat prediction supports only --reference heat")
    reference = solve_parabolic_1d(
        heat_initial(xi[0]),
        heat_bc_left(xi[1], xi[2]),
        heat_bc_right(xi[1], xi[2]),
        field.x,
        field.times,
        diffusion=0.5,
    )
    report = mse_report(field.values, reference, field.times, x=field.x)
    report.to_csv(cfg["out"])
    print("t      MSE")
    for t, m in report.mse_by_time:
        if round(2.0 * t) % 6 == 0:
            print(f"{t:<6g} {m:.3e}")
    print(f"overall MSE = {report.overall_mse:.3e}")
    print(f"wrote {cfg['out']}")
    return EXIT_OK


_REFERENCE_RHS = {"predator-prey": (_predator_prey_rhs, 2), "fish": (_fish_rhs, 1)}


def _predict_ode(cfg) -> int:
    equations = []
    for path in cfg["model"]:
        equation, _ = _load_equation(path)
        if equation.is_empty:
            print(f"error: model {path} has no terms", file=sys.stderr)
            return EXIT_EMPTY_MODEL
        equations.append(equation)
    t_end = 20.0 if cfg["t_end"] is None else float(cfg["t_end"])
    n_out = int(cfg["n_out"])

    if cfg["fan"] is not None:
        parts = str(cfg["fan"]).split(":")
        if len(parts) != 3:
            raise CliError("--fan takes low:high:count")
        if len(equations) != 1:
            raise CliError("--fan supports a single-equation model")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        branches = integrate_fan(
            equations, np.linspace(lo, hi, count), (0.0, t_end), n_out=n_out
        )
        rows = []
        for b in branches:
            terminal = None if b.terminal_state is None else float(b.terminal_state[0])
            rows.append(
                (
                    _fmt_cell(float(b.initial[0])),
                    _fmt_cell(terminal),
                    int(b.blew_up),
                    _fmt_cell(b.blow_up_time),
                )
            )
        _rows_to_csv(
            cfg["out"], ["initial", "terminal", "blew_up", "blow_up_time"], rows
        )
        exploded = sum(b.blew_up for b in branches)
        print(f"{len(branches)} branches to t = {t_end:g}; {exploded} blew up")
        print(f"wrote {cfg['out']}")
        return EXIT_OK

    if cfg["initial"] is None:
        raise CliError("--initial is required (or use --fan)")
    y0 = _list_of(cfg["initial"], float, "initial")
    try:
        trajectory = integrate_ode(equations, y0, (0.0, t_end), n_out=n_out)
    except BlowUpError as err:
        print(f"prediction blew up near t = {err.last_finite_time:g}")
        if err.times is not None and err.times.size:
            rows = [
                tuple(_fmt_cell(float(v)) for v in (t, *row))
                for t, row in zip(err.times, err.states)
            ]
            names = [eq.target for eq in equations]
            _rows_to_csv(cfg["out"], ["t"] + names, rows)
            print(f"wrote partial trajectory to {cfg['out']}")
        return EXIT_OK

    if cfg["reference"] is None:
        rows = [
            tuple(_fmt_cell(float(v)) for v in (t, *row))
            for t, row in zip(trajectory.times, trajectory.states)
        ]
        _rows_to_csv(cfg["out"], ["t"] + list(trajectory.state_names), rows)
        print(f"wrote {cfg['out']} (no reference; MSE not computed)")
        return EXIT_OK
    if cfg["reference"] not in _REFERENCE_RHS:
        raise CliError(
            "--reference must be one of: predator-prey, fish, heat"
        )
    rhs, n_states = _REFERENCE_RHS[cfg["reference"]]
    if len(equations) != n_states:
        raise CliError(
            f"reference {cfg['reference']} has {n_states} state(s), "
            f"got {len(equations)} model(s)"
        )
    reference = rk4_integrate(
        rhs, y0, trajectory.times, max_step=t_end / (50.0 * n_out)
    )
    report = mse_report(trajectory.states, reference, trajectory.times)
    report.to_csv(cfg["out"])
    print(f"overall MSE vs true {cfg['reference']} system = {report.overall_mse:.3e}")
    print(f"wrote {cfg['out']}")
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = _merge_config(args, _PREDICT_DEFAULTS)
    heat_mode = any(cfg[k] is not None for k in ("pde", "ic", "bc_left", "bc_right"))
    if heat_mode:
        return _predict_heat(cfg)
    if not cfg["model"]:
        raise CliError("provide --model (repeatable), or --pde/--ic/--bc-* for heat")
    return _predict_ode(cfg)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqforge",
        description="Discover governing equations from noisy data by "
        "subsampling-based threshold sparse Bayesian regression.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    S = {"default": argparse.SUPPRESS}

    g = sub.add_parser("generate", help="write a benchmark dataset CSV + JSON sidecar")
    g.add_argument(
        "generator",
        choices=("predator-prey", "fish", "heat"),
        help="which benchmark to generate",
    )
    g.add_argument("--out", help="output CSV path (default <generator>.csv)", **S)
    g.add_argument("--noise", type=float, help="gaussian noise sigma (default 0)", **S)
    g.add_argument(
        "--outlier-frac",
        type=float,
        dest="outlier_frac",
        help="fraction of rows corrupted by outliers (default 0)",
        **S,
    )
    g.add_argument(
        "--outlier-low",
        type=float,
        dest="outlier_low",
        help="outlier additive law lower bound (default 0.5)",
        **S,
    )
    g.add_argument(
        "--outlier-high",
        type=float,
        dest="outlier_high",
        help="outlier additive law upper bound (default 1)",
        **S,
    )
    g.add_argument(
        "--points",
        type=int,
        help="points per trajectory (predator-prey) or per curve (fish)",
        **S,
    )
    g.add_argument("--curves", type=int, help="fish: number of curves (default 5)", **S)
    g.add_argument(
        "--realizations",
        type=int,
        help="heat: number of random initial/boundary draws (default 20)",
        **S,
    )
    g.add_argument("--seed", type=int, help="RNG seed (runs are deterministic given it)", **S)
    g.add_argument("--config", help="JSON config file; flags override its keys", **S)
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("discover", help="fit a sparse model to a dataset CSV")
    d.add_argument("--data", help="input dataset CSV (from generate)", **S)
    d.add_argument("--target", help="target column, e.g. dxdt or u_t", **S)
    d.add_argument(
        "--variables",
        help="comma-separated dictionary variables (default: inferred from columns)",
        **S,
    )
    d.add_argument("--degree", type=int, help="max total monomial degree (default 3)", **S)
    d.add_argument(
        "--threshold", type=float, help="weight magnitude threshold (default 0.1)", **S
    )
    d.add_argument("--subsample", type=int, help="subsample size S", **S)
    d.add_argument(
        "--n-sub",
        dest="n_sub",
        help="number of subsamples L, or 'auto' to derive it from "
        "--outlier-frac and --confidence",
        **S,
    )
    d.add_argument(
        "--outlier-frac",
        type=float,
        dest="outlier_frac",
        help="assumed outlier fraction (used by --n-sub auto)",
        **S,
    )
    d.add_argument(
        "--confidence",
        type=float,
        help="probability that some subsample is outlier-free (--n-sub auto)",
        **S,
    )
    d.add_argument("--seed", type=int, help="RNG seed for subsample draws", **S)
    d.add_argument("--out", help="output model JSON path (default model.json)", **S)
    d.add_argument(
        "--threads",
        type=int,
        help="parallel subsample fits (default: EQFORGE_THREADS or all cores)",
        **S,
    )
    d.add_argument("--config", help="JSON config file; flags override its keys", **S)
    d.set_defaults(func=cmd_discover)

    w = sub.add_parser(
        "sweep", help="success-rate/criterion surface over (S, L) cells"
    )
    w.add_argument("--data", help="input dataset CSV", **S)
    w.add_argument("--target", help="target column", **S)
    w.add_argument("--variables", help="comma-separated dictionary variables", **S)
    w.add_argument("--degree", type=int, help="max total monomial degree (default 3)", **S)
    w.add_argument(
        "--threshold", type=float, help="weight magnitude threshold (default 0.1)", **S
    )
    w.add_argument("--sizes", help="comma-separated subsample sizes S", **S)
    w.add_argument("--counts", help="comma-separated subsample counts L", **S)
    w.add_argument("--trials", type=int, help="fits per cell (default 50)", **S)
    w.add_argument(
        "--truth",
        help="comma-separated true term labels (enables the success-rate column)",
        **S,
    )
    w.add_argument("--seed", type=int, help="RNG seed", **S)
    w.add_argument("--out", help="output CSV path (default sweep.csv)", **S)
    w.add_argument(
        "--threads",
        type=int,
        help="parallel subsample fits (default: EQFORGE_THREADS or all cores)",
        **S,
    )
    w.add_argument("--config", help="JSON config file; flags override its keys", **S)
    w.set_defaults(func=cmd_sweep)

    p = sub.add_parser("predict", help="run a discovered model forward")
    p.add_argument(
        "--model",
        action="append",
        help="model JSON from discover; repeat once per state equation",
        **S,
    )
    p.add_argument("--pde", help="heat mode: discovered PDE model JSON", **S)
    p.add_argument("--ic", help="heat mode: discovered initial-profile model JSON", **S)
    p.add_argument(
        "--bc-left", dest="bc_left", help="heat mode: left boundary model JSON", **S
    )
    p.add_argument(
        "--bc-right", dest="bc_right", help="heat mode: right boundary model JSON", **S
    )
    p.add_argument("--xi", help="heat mode: xi1,xi2,xi3 values", **S)
    p.add_argument("--initial", help="comma-separated initial state", **S)
    p.add_argument(
        "--fan",
        help="low:high:count fan of initial values (single-equation models)",
        **S,
    )
    p.add_argument(
        "--t-end",
        type=float,
        dest="t_end",
        help="prediction horizon (default 20 for ODEs, 15 for heat)",
        **S,
    )
    p.add_argument("--n-out", type=int, dest="n_out", help="output samples (default 200)", **S)
    p.add_argument(
        "--reference",
        help="compare against a built-in true system: predator-prey, fish, or heat",
        **S,
    )
    p.add_argument("--out", help="output report CSV (default prediction.csv)", **S)
    p.add_argument("--config", help="JSON config file; flags override its keys", **S)
    p.set_defaults(func=cmd_predict)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedFormError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except SubtsbrError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_EMPTY_MODEL
    except (
        DatasetError,
        DictionaryError,
        HeatSolverError,
        InfeasibleError,
        PredictError,
        RvmError,
        OSError,
        ValueError,
    ) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as err:
        print(f"error: solution blew up near t = {err.last_finite_time:g}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
