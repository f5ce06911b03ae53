"""Synthetic benchmark generation.

Forward-solves the benchmark systems (predator-prey ODE, logistic
fish-harvesting ODE, 1-D heat equation with random initial/boundary data),
injects Gaussian noise and uniform additive outliers, computes SNR, and
packages regression-ready datasets with CSV + sidecar-JSON serialization.

Conventions, per generator docstrings: predator-prey gradients are the
analytic right-hand sides evaluated on the clean trajectory, and noise then
corrupts states and gradients alike; fish and heat gradients are five-point
central differences of the CLEAN solution samples, with corruption applied
afterwards (all value columns for heat, the derivative channel for fish).
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .derivatives import central_diff_5pt, second_central_diff_5pt
from .heatsolver import solve_parabolic_1d


class DatasetError(ValueError):
    pass


class BlowUpError(RuntimeError):
    """Integration produced a non-finite state.

    Carries ``last_finite_time`` and the partial ``times``/``states`` output
    computed before the blow-up.
    """

    def __init__(self, message, last_finite_time, times=None, states=None):
        super().__init__(message)
        self.last_finite_time = last_finite_time
        self.times = times
        self.states = states


@dataclass(frozen=True)
class NoiseSpec:
    gaussian_sigma: float = 0.0
    outlier_fraction: float = 0.0
    outlier_law: tuple = (0.5, 1.0)
    seed: int | None = None

    def __post_init__(self):
        if self.gaussian_sigma < 0:
            raise DatasetError("gaussian_sigma must be >= 0")
        if not 0 <= self.outlier_fraction < 1:
            raise DatasetError("outlier_fraction must be in [0, 1)")
        low, high = self.outlier_law
        if low > high:
            raise DatasetError("outlier_law interval must have low <= high")

    def to_json_dict(self) -> dict:
        return {
            "gaussian_sigma": self.gaussian_sigma,
            "outlier_fraction": self.outlier_fraction,
            "outlier_law": list(self.outlier_law),
            "seed": self.seed,
        }


@dataclass
class Trajectory:
    """One solution curve: times, state columns, optional gradient columns.

    ``derivative_valid`` marks rows whose gradient entries are defined
    (finite-difference stencils do not reach the edges).  ``clean_states``
    and ``clean_gradients`` keep the pre-noise values for tests;
    ``corrupted_rows`` records outlier rows (ground truth, not available to
    discovery).
    """

    times: np.ndarray
    states: np.ndarray
    gradients: np.ndarray | None = None
    state_names: tuple = ("x",)
    gradient_names: tuple = ()
    derivative_valid: np.ndarray | None = None
    corrupted_rows: tuple = ()
    clean_states: np.ndarray | None = None
    clean_gradients: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.states.shape[0] != self.times.size and self.states.shape[1] == self.times.size:
            self.states = self.states.T
        if self.times.ndim != 1 or (np.diff(self.times) <= 0).any():
            raise DatasetError("times must be 1-D and strictly increasing")
        n = self.times.size
        if self.states.shape != (n, len(self.state_names)):
            raise DatasetError(
                f"states shape {self.states.shape} does not match "
                f"{n} times x {len(self.state_names)} names"
            )
        if self.gradients is not None:
            self.gradients = np.atleast_2d(np.asarray(self.gradients, dtype=float))
            if self.gradients.shape != (n, len(self.gradient_names)):
                raise DatasetError("gradients shape does not match names/times")
        if self.derivative_valid is None:
            self.derivative_valid = np.ones(n, dtype=bool)
        else:
            self.derivative_valid = np.asarray(self.derivative_valid, dtype=bool)
            if self.derivative_valid.shape != (n,):
                raise DatasetError("derivative_valid must have one flag per row")

    @property
    def n(self) -> int:
        return self.times.size


@dataclass
class FieldDataset:
    """Flattened space-time field samples across realizations.

    ``samples`` columns follow ``columns``; coordinate columns are listed in
    ``coordinate_columns`` and are never corrupted.  ``xi`` holds the random
    initial/boundary draws per realization.
    """

    samples: np.ndarray
    columns: tuple
    realization: np.ndarray
    xi: np.ndarray
    derivative_valid: np.ndarray
    coordinate_columns: tuple = ("x", "t")
    corrupted_rows: tuple = ()
    clean_samples: np.ndarray | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[1] != len(self.columns):
            raise DatasetError("samples must be 2-D with one column per name")
        self.realization = np.asarray(self.realization, dtype=int)
        self.derivative_valid = np.asarray(self.derivative_valid, dtype=bool)
        n = self.samples.shape[0]
        if self.realization.shape != (n,) or self.derivative_valid.shape != (n,):
            raise DatasetError("per-row metadata must match sample count")

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def value_columns(self) -> tuple:
        return tuple(c for c in self.columns if c not in self.coordinate_columns)

    def column(self, name: str) -> np.ndarray:
        return self.samples[:, self.columns.index(name)]


def rk4_integrate(rhs, y0, t_eval, max_step):
    """Classic fixed-step RK4 sampled at ``t_eval``.

    Each output interval is subdivided so no internal step exceeds
    ``max_step``.  Raises :class:`BlowUpError` (with the partial output)
    when the state leaves the finite range.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    y = np.asarray(y0, dtype=float).copy()
    out = np.empty((t_eval.size, y.size))
    out[0] = y
    if not np.isfinite(y).all():
        raise BlowUpError(
            "initial state is not finite", last_finite_time=None,
            times=t_eval[:0], states=out[:0],
        )
    for i in range(1, t_eval.size):
        t0, t1 = t_eval[i - 1], t_eval[i]
        substeps = max(1, math.ceil((t1 - t0) / max_step))
        h = (t1 - t0) / substeps
        t = t0
        for _ in range(substeps):
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
            y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.isfinite(y_new).all():
                raise BlowUpError(
                    f"state became non-finite near t = {t + h:.6g}",
                    last_finite_time=float(t),
                    times=t_eval[:i].copy(),
                    states=out[:i].copy(),
                )
            y = y_new
            t += h
        out[i] = y
    return out


def _predator_prey_rhs(t, s):
    x, y = s
    return np.array([0.5 * x - 1.5 * x * y, x * y - 0.5 * y])


def _fish_rhs(t, s):
    n = s[0]
    return np.array([n * (4.0 - n) - 3.0])


def _round_count(fraction, n):
    return int(round(fraction * n))


def _apply_noise_columns(rng, sigma, arrays):
    """Add N(0, sigma^2) draws to each array in order.

    Draws are made for every entry (including NaN cells) so the stream
    consumed does not depend on stencil validity; NaN cells stay NaN.
    """
    if sigma <= 0:
        return
    for arr in arrays:
        arr += rng.normal(0.0, sigma, arr.shape)


def _outlier_update(rng, fraction, law, arrays, n_rows):
    """Pick round(p*N) rows and add U(a, b) draws per value column."""
    k = _round_count(fraction, n_rows)
    if k == 0:
        return ()
    rows = np.sort(rng.choice(n_rows, size=k, replace=False))
    low, high = law
    for arr in arrays:
        arr[rows] += rng.uniform(low, high, (k,) + arr.shape[1:])
    return tuple(int(r) for r in rows)


def gen_predator_prey(
    x0=0.6, y0=0.2, t_end=20.0, n_points=200, noise: NoiseSpec | None = None
) -> Trajectory:
    """Predator-prey benchmark: dx/dt = x/2 - 3xy/2, dy/dt = xy - y/2.

    Gradients are the analytic right-hand sides on the clean trajectory;
    noise then corrupts states and gradients alike.
    """
    if n_points < 2:
        raise DatasetError("n_points must be >= 2")
    noise = noise or NoiseSpec()
    times = np.linspace(0.0, t_end, n_points)
    max_step = t_end / (50.0 * n_points)
    states = rk4_integrate(_predator_prey_rhs, (x0, y0), times, max_step)
    gradients = np.array([_predator_prey_rhs(t, s) for t, s in zip(times, states)])

    clean_states = states.copy()
    clean_gradients = gradients.copy()
    gauss_rng, outlier_rng = (
        np.random.default_rng(c) for c in np.random.SeedSequence(noise.seed).spawn(2)
    )
    cols = [states[:, 0], states[:, 1], gradients[:, 0], gradients[:, 1]]
    _apply_noise_columns(gauss_rng, noise.gaussian_sigma, cols)
    corrupted = _outlier_update(
        outlier_rng, noise.outlier_fraction, noise.outlier_law, cols, n_points
    )
    states = np.column_stack(cols[:2])
    gradients = np.column_stack(cols[2:])
    return Trajectory(
        times=times,
        states=states,
        gradients=gradients,
        state_names=("x", "y"),
        gradient_names=("dxdt", "dydt"),
        corrupted_rows=corrupted,
        clean_states=clean_states,
        clean_gradients=clean_gradients,
    )


def gen_fish_harvesting(
    n_curves=5,
    n_points_per_curve=20,
    t_end=2.0,
    init_law=(1.0, 3.0),
    noise: NoiseSpec | None = None,
) -> list:
    """Fish-harvesting benchmark: dN/dt = N(4 - N) - 3, random N0 ~ U(a, b).

    Derivatives are five-point central differences of the clean solution
    (undefined on the first two and last two points of each curve).
    Corruption convention for this generator: gaussian noise and outliers
    land on the derivative observations only; the sampled states are
    returned unchanged and double as the dictionary inputs.  Noise on the
    dictionary side turns into heteroscedastic model error through the
    high-degree columns and the benchmark stops being recoverable, so the
    derivative channel carries the whole observation error.
    """
    if n_points_per_curve < 5:
        raise DatasetError("n_points_per_curve must be >= 5 for the stencil")
    noise = noise or NoiseSpec()
    init_rng, gauss_rng, outlier_rng = (
        np.random.default_rng(c) for c in np.random.SeedSequence(noise.seed).spawn(3)
    )
    low, high = init_law
    inits = init_rng.uniform(low, high, n_curves)
    times = np.linspace(0.0, t_end, n_points_per_curve)
    dt = times[1] - times[0]
    max_step = t_end / (50.0 * n_points_per_curve)

    curves = []
    for n0 in inits:
        states = rk4_integrate(_fish_rhs, (n0,), times, max_step)
        deriv, mask = central_diff_5pt(states[:, 0], dt)
        curves.append((states, deriv[:, None], mask.valid.copy()))

    noisy_cols = []
    for _, deriv, _ in curves:
        # copy: _apply_noise_columns works in place and the original is
        # kept as the clean reference
        col = deriv[:, 0].copy()
        _apply_noise_columns(gauss_rng, noise.gaussian_sigma, [col])
        noisy_cols.append(col)

    total = n_curves * n_points_per_curve
    flat_d = np.concatenate(noisy_cols)
    corrupted = _outlier_update(
        outlier_rng, noise.outlier_fraction, noise.outlier_law, [flat_d], total
    )

    out = []
    for k, (states, deriv, valid) in enumerate(curves):
        sl = slice(k * n_points_per_curve, (k + 1) * n_points_per_curve)
        rows = tuple(
            r - k * n_points_per_curve
            for r in corrupted
            if k * n_points_per_curve <= r < (k + 1) * n_points_per_curve
        )
        noisy_d = flat_d[sl].copy()
        noisy_d[~valid] = np.nan
        out.append(
            Trajectory(
                times=times,
                states=states.copy(),
                gradients=noisy_d[:, None],
                state_names=("N",),
                gradient_names=("dNdt",),
                derivative_valid=valid,
                corrupted_rows=rows,
                clean_states=states.copy(),
                clean_gradients=deriv.copy(),
            )
        )
    return out


def heat_initial(xi1):
    return lambda x: -0.5 * xi1 * x * (x - 5.0)


def heat_bc_left(xi2, xi3):
    return lambda t: xi2 * np.sin(2.0 * t) - xi3**2 * np.cos(t) + xi3**2


def heat_bc_right(xi2, xi3):
    return lambda t: (
        xi2 * xi3 * np.sin(t)
        - xi3 * np.sin(t + np.pi / 4.0)
        + xi3 * np.sqrt(2.0) / 2.0
    )


def gen_heat_random_ibc(
    n_realizations=20,
    x_grid=None,
    t_grid=None,
    noise: NoiseSpec | None = None,
    x_refine=64,
    max_dt=0.005,
) -> FieldDataset:
    """Heat benchmark: u_t = u_xx / 2 with random initial/boundary data.

    Per realization, draw (xi1, xi2, xi3) with xi1, xi2 ~ U(0,1) and
    xi3 ~ N(0, 0.5^2), solve on an internally refined Crank-Nicolson grid,
    sample to the output grid, difference the clean samples (five-point
    stencils, interior points only), then corrupt all data columns.
    Row order: realization-major, then t, then x.
    """
    noise = noise or NoiseSpec()
    x_grid = np.linspace(0.0, 5.0, 11) if x_grid is None else np.asarray(x_grid, float)
    t_grid = np.linspace(0.0, 5.0, 11) if t_grid is None else np.asarray(t_grid, float)
    nx, nt = x_grid.size, t_grid.size
    dx = x_grid[1] - x_grid[0]
    dt = t_grid[1] - t_grid[0]

    xi_rng, gauss_rng, outlier_rng = (
        np.random.default_rng(c) for c in np.random.SeedSequence(noise.seed).spawn(3)
    )
    xi = np.empty((n_realizations, 3))
    for r in range(n_realizations):
        xi[r] = (xi_rng.uniform(), xi_rng.uniform(), xi_rng.normal(0.0, 0.5))

    rows = []
    realization = []
    valid = []
    for r in range(n_realizations):
        xi1, xi2, xi3 = xi[r]
        u = solve_parabolic_1d(
            heat_initial(xi1),
            heat_bc_left(xi2, xi3),
            heat_bc_right(xi2, xi3),
            x_grid,
            t_grid,
            diffusion=0.5,
            x_refine=x_refine,
            max_dt=max_dt,
        )
        u_t = np.full_like(u, np.nan)
        u_x = np.full_like(u, np.nan)
        u_xx = np.full_like(u, np.nan)
        t_ok = np.zeros(nt, dtype=bool)
        x_ok = np.zeros(nx, dtype=bool)
        for j in range(nx):
            col, mask = central_diff_5pt(u[:, j], dt)
            u_t[:, j] = col
            t_ok = mask.valid
        for i in range(nt):
            row, mask = central_diff_5pt(u[i, :], dx)
            u_x[i] = row
            row2, mask2 = second_central_diff_5pt(u[i, :], dx)
            u_xx[i] = row2
            x_ok = mask.valid & mask2.valid
        cell_valid = np.outer(t_ok, x_ok)
        # Derivatives are only kept at joint (t, x) interior points; a cell
        # with u_t but no u_xx (or vice versa) is useless for regression.
        for arr in (u_t, u_x, u_xx):
            arr[~cell_valid] = np.nan
        xs, ts = np.meshgrid(x_grid, t_grid)
        rows.append(
            np.column_stack(
                [
                    xs.ravel(),
                    ts.ravel(),
                    u.ravel(),
                    u_x.ravel(),
                    u_xx.ravel(),
                    u_t.ravel(),
                ]
            )
        )
        realization.append(np.full(nt * nx, r))
        valid.append(cell_valid.ravel())

    samples = np.vstack(rows)
    realization = np.concatenate(realization)
    valid = np.concatenate(valid)
    clean = samples.copy()

    value_ix = [2, 3, 4, 5]
    cols = [samples[:, j] for j in value_ix]
    _apply_noise_columns(gauss_rng, noise.gaussian_sigma, cols)
    corrupted = _outlier_update(
        outlier_rng, noise.outlier_fraction, noise.outlier_law, cols, samples.shape[0]
    )
    for j, col in zip(value_ix, cols):
        samples[:, j] = col
    # stencil-invalid cells stay undefined whatever noise was drawn for them
    samples[np.isnan(clean)] = np.nan

    return FieldDataset(
        samples=samples,
        columns=("x", "t", "u", "u_x", "u_xx", "u_t"),
        realization=realization,
        xi=xi,
        derivative_valid=valid,
        corrupted_rows=corrupted,
        clean_samples=clean,
    )


def snr_db(signal, noise) -> float:
    """10 log10(||signal||^2 / ||noise||^2); +inf when noise is all zeros."""
    signal = np.asarray(signal, dtype=float).ravel()
    noise = np.asarray(noise, dtype=float).ravel()
    if signal.size != noise.size:
        raise DatasetError("signal and noise must have equal lengths")
    power = float(noise @ noise)
    if power == 0.0:
        return math.inf
    return 10.0 * math.log10(float(signal @ signal) / power)


def inject_outliers(data, spec: NoiseSpec):
    """Additive U(a, b) corruption of round(p*N) uniformly chosen rows.

    Returns a new object of the same type with ``corrupted_rows`` extended;
    only value columns are touched (never coordinates), and only the
    outlier part of ``spec`` is applied.
    """
    rng = np.random.default_rng(spec.seed)
    if isinstance(data, Trajectory):
        states = data.states.copy()
        gradients = None if data.gradients is None else data.gradients.copy()
        arrays = [states] + ([] if gradients is None else [gradients])
        rows = _outlier_update(
            rng, spec.outlier_fraction, spec.outlier_law, arrays, data.n
        )
        return Trajectory(
            times=data.times,
            states=states,
            gradients=gradients,
            state_names=data.state_names,
            gradient_names=data.gradient_names,
            derivative_valid=data.derivative_valid.copy(),
            corrupted_rows=tuple(sorted(set(data.corrupted_rows) | set(rows))),
            clean_states=data.clean_states,
            clean_gradients=data.clean_gradients,
        )
    if isinstance(data, FieldDataset):
        samples = data.samples.copy()
        value_ix = [data.columns.index(c) for c in data.value_columns]
        cols = [samples[:, j] for j in value_ix]
        rows = _outlier_update(
            rng, spec.outlier_fraction, spec.outlier_law, cols, data.n
        )
        for j, col in zip(value_ix, cols):
            samples[:, j] = col
        samples[np.isnan(data.samples)] = np.nan
        return FieldDataset(
            samples=samples,
            columns=data.columns,
            realization=data.realization.copy(),
            xi=data.xi,
            derivative_valid=data.derivative_valid.copy(),
            coordinate_columns=data.coordinate_columns,
            corrupted_rows=tuple(sorted(set(data.corrupted_rows) | set(rows))),
            clean_samples=data.clean_samples,
        )
    raise DatasetError(f"unsupported dataset type {type(data).__name__}")


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(float(v))
    return str(v)


def dataset_table(data):
    """(header, rows) for CSV serialization.

    One row per sample.  A ``deriv_valid`` flag column is appended whenever
    any row lacks derivatives; undefined derivative cells serialize empty.
    Lists of trajectories gain a leading ``curve`` column.
    """
    if isinstance(data, Trajectory):
        header = ["t", *data.state_names, *data.gradient_names]
        flag = not data.derivative_valid.all()
        if flag:
            header.append("deriv_valid")
        rows = []
        for i in range(data.n):
            row = [data.times[i], *data.states[i]]
            if data.gradients is not None:
                row.extend(data.gradients[i])
            if flag:
                row.append(int(data.derivative_valid[i]))
            rows.append(row)
        return header, rows
    if isinstance(data, (list, tuple)):
        if not data or not all(isinstance(t, Trajectory) for t in data):
            raise DatasetError("expected a non-empty list of trajectories")
        header, _ = dataset_table(data[0])
        if "deriv_valid" not in header:
            header = header + ["deriv_valid"]
        header = ["curve"] + header
        rows = []
        for k, traj in enumerate(data):
            for i in range(traj.n):
                row = [k, traj.times[i], *traj.states[i]]
                if traj.gradients is not None:
                    row.extend(traj.gradients[i])
                row.append(int(traj.derivative_valid[i]))
                rows.append(row)
        return header, rows
    if isinstance(data, FieldDataset):
        header = ["realization", *data.columns, "deriv_valid"]
        rows = []
        for i in range(data.n):
            rows.append(
                [int(data.realization[i]), *data.samples[i], int(data.derivative_valid[i])]
            )
        return header, rows
    raise DatasetError(f"unsupported dataset type {type(data).__name__}")


def save_dataset(data, path, generator: str, noise: NoiseSpec, extra=None):
    """Write ``path`` (CSV) plus a same-stem ``.json`` sidecar.

    The sidecar records the generator name, seed, noise spec, and any
    generator-specific extras (e.g. per-realization xi draws).
    """
    path = Path(path)
    header, rows = dataset_table(data)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    meta = {
        "generator": generator,
        "seed": noise.seed,
        "noise": noise.to_json_dict(),
        "columns": header,
        "n_rows": len(rows),
    }
    if isinstance(data, FieldDataset):
        meta["xi"] = [list(map(float, row)) for row in data.xi]
    if extra:
        meta.update(extra)
    sidecar = path.with_suffix(".json")
    with open(sidecar, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return path, sidecar


def read_dataset_csv(path):
    """(columns, array) from a dataset CSV; empty cells become NaN."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty CSV") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetError(f"{path}:{lineno}: expected {len(header)} cells")
            rows.append([float(c) if c != "" else math.nan for c in row])
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return tuple(header), np.asarray(rows, dtype=float)
