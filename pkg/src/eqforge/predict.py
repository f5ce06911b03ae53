"""Run discovered equations forward and score the predictions.

A recovered model is a weighted sum of dictionary terms for one target: a
state derivative ("dxdt"), an initial profile ("u(x,0)"), a boundary value,
or a PDE right-hand side ("u_t").  This module evaluates such equations
numerically, integrates ODE systems (sharing the dataset generators'
integrator), re-solves a discovered heat-type PDE with discovered
initial/boundary data, and compares predictions against reference values.
"""
from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .datasets import BlowUpError, Trajectory, rk4_integrate
from .dictionary import (
    DIMENSIONLESS,
    BasisTerm,
    Dictionary,
    VariableSpec,
    dimensional_dictionary,
    monomials_up_to_degree,
)
from .heatsolver import solve_parabolic_1d
from .tsbr import SparseModel


class PredictError(ValueError):
    """Invalid prediction setup (unknown variables, shape mismatch, ...)."""


class UnsupportedFormError(PredictError):
    """Discovered PDE falls outside the solvable stencil family."""

    def __init__(self, message, terms=()):
        super().__init__(message)
        self.terms = tuple(terms)


def _require(value, name):
    if value is None:
        raise PredictError(f"variable {name!r} is not available in this context")
    return value


#: Feature variables the evaluator knows how to compute from (x, t, xi).
#: Dictionary variable names outside this table cannot be run forward.
_FEATURES = {
    "x": lambda x, t, xi: x,
    "t": lambda x, t, xi: t,
    "xi1": lambda x, t, xi: None if xi is None else xi[0],
    "xi2": lambda x, t, xi: None if xi is None else xi[1],
    "xi3": lambda x, t, xi: None if xi is None else xi[2],
    "sin_x": lambda x, t, xi: None if x is None else np.sin(x),
    "cos_x": lambda x, t, xi: None if x is None else np.cos(x),
    "sin_t": lambda x, t, xi: None if t is None else np.sin(t),
    "cos_t": lambda x, t, xi: None if t is None else np.cos(t),
}


def _feature_env(names, x=None, t=None, xi=None) -> dict:
    env = {}
    for name in names:
        fn = _FEATURES.get(name)
        if fn is None:
            raise PredictError(f"no rule to evaluate variable {name!r}")
        env[name] = _require(fn(x, t, xi), name)
    return env


@dataclass(frozen=True)
class DiscoveredEquation:
    """One recovered equation: ``target = sum_k weight_k * term_k``.

    ``terms`` holds ``(BasisTerm, weight, std)`` triples in dictionary
    order; ``dictionary_ref`` is the dictionary the model was fit against.
    An equation with no terms evaluates to zero everywhere.
    """

    target: str
    terms: tuple
    dictionary_ref: Dictionary

    def __post_init__(self):
        out = []
        for entry in self.terms:
            term, mean, std = entry
            if not isinstance(term, BasisTerm):
                raise PredictError("terms must be (BasisTerm, weight, std) triples")
            mean, std = float(mean), float(std)
            if not math.isfinite(mean):
                raise PredictError(f"non-finite weight for term {term.display!r}")
            out.append((term, mean, std))
        object.__setattr__(self, "terms", tuple(out))

    @classmethod
    def from_model(
        cls, model: SparseModel, dictionary: Dictionary, target: str
    ) -> "DiscoveredEquation":
        """Attach a sparse fit's surviving weights to their dictionary terms."""
        by_label = {t.display: t for t in dictionary.terms}
        missing = [label for label in model.weights if label not in by_label]
        if missing:
            raise PredictError(f"model terms not found in dictionary: {missing}")
        terms = tuple(
            (by_label[label], *model.weights[label])
            for label in dictionary.labels
            if label in model.weights
        )
        return cls(target=target, terms=terms, dictionary_ref=dictionary)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    @property
    def labels(self) -> tuple:
        return tuple(term.display for term, _, _ in self.terms)

    def weight_of(self, label: str) -> float:
        for term, mean, _ in self.terms:
            if term.display == label:
                return mean
        raise PredictError(f"no term {label!r} in equation for {self.target!r}")

    def used_variables(self) -> tuple:
        names = {name for term, _, _ in self.terms for name, _ in term.exponents}
        return tuple(n for n in self.dictionary_ref.variable_names if n in names)

    def evaluate_terms(self, env: dict):
        """Weighted term sum under a name -> value environment (broadcasts)."""
        total = 0.0
        for term, mean, _ in self.terms:
            value = mean
            for name, exp in term.exponents:
                if name not in env:
                    raise PredictError(
                        f"variable {name!r} missing from evaluation context"
                    )
                value = value * env[name] ** exp
            total = total + value
        return total

    def evaluate(self, x=None, t=None, xi=None):
        """Evaluate using the built-in feature rules (x, t, xi1..xi3, sin/cos)."""
        return self.evaluate_terms(_feature_env(self.used_variables(), x, t, xi))

    def text(self, digits: int = 4) -> str:
        """Human-readable form, e.g. ``dNdt = -2.818 + 3.837 N - 0.965 N^2``."""
        if not self.terms:
            return f"{self.target} = 0"
        parts = []
        for k, (term, mean, _) in enumerate(self.terms):
            mag = f"{abs(mean):.{digits}g}"
            body = mag if term.degree == 0 else f"{mag} {term.display}"
            sign = "-" if mean < 0 else "+"
            parts.append(body if k == 0 and mean >= 0 else f"{sign} {body}")
        if self.terms[0][1] < 0:
            parts[0] = "-" + parts[0][2:]
        return f"{self.target} = " + " ".join(parts)

    def __str__(self):
        return self.text()


_TARGET_RE = re.compile(r"^d([A-Za-z_]\w*)/?dt$")


def state_name_from_target(target: str) -> str:
    """``"dxdt"`` or ``"dx/dt"`` -> ``"x"``."""
    m = _TARGET_RE.match(target.replace(" ", ""))
    if not m:
        raise PredictError(f"cannot infer a state variable from target {target!r}")
    return m.group(1)


def integrate_ode(
    system, initial_state, t_span, n_out: int = 200, max_step=None
) -> Trajectory:
    """Integrate a discovered ODE system with RK4, sampled at n_out points.

    One equation per state variable; each equation may reference only the
    system's state variables and t.  Raises BlowUpError (carrying the
    partial trajectory) if the state leaves the finite range.
    """
    system = list(system)
    if not system:
        raise PredictError("system must contain at least one equation")
    names = tuple(state_name_from_target(eq.target) for eq in system)
    if len(set(names)) != len(names):
        raise PredictError(f"duplicate state variables in targets: {names}")
    allowed = set(names) | {"t"}
    for eq in system:
        extra = sorted(
            {n for term, _, _ in eq.terms for n, _ in term.exponents} - allowed
        )
        if extra:
            raise PredictError(
                f"equation for {eq.target!r} references non-state variables {extra}"
            )
    t0, t1 = (float(v) for v in t_span)
    if not t1 > t0:
        raise PredictError("t_span must be an increasing (t0, t1) pair")
    n_out = int(n_out)
    if n_out < 2:
        raise PredictError("n_out must be at least 2")
    y0 = np.asarray(initial_state, dtype=float).ravel()
    if y0.size != len(system):
        raise PredictError(
            f"initial_state has {y0.size} entries for {len(system)} equations"
        )
    times = np.linspace(t0, t1, n_out)
    if max_step is None:
        max_step = (t1 - t0) / (50.0 * n_out)

    def rhs(t, y):
        env = dict(zip(names, y))
        env["t"] = t
        return np.array([eq.evaluate_terms(env) for eq in system])

    # overflow on the way to a blow-up is expected; the integrator turns the
    # resulting non-finite state into BlowUpError
    with np.errstate(over="ignore", invalid="ignore"):
        states = rk4_integrate(rhs, y0, times, max_step)
    return Trajectory(times=times, states=states, state_names=names)


@dataclass(frozen=True)
class FanBranch:
    """Outcome of one initial value in a fan integration.

    ``trajectory`` is the full solution, or the partial one (possibly None)
    when the branch blew up before the horizon.
    """

    initial: tuple
    trajectory: Trajectory | None
    blew_up: bool = False
    blow_up_time: float | None = None

    @property
    def terminal_state(self):
        if self.trajectory is None:
            return None
        return self.trajectory.states[-1]


def integrate_fan(system, initial_values, t_span, n_out: int = 200, max_step=None):
    """Integrate a fan of initial values; blow-ups become flagged branches."""
    branches = []
    for y0 in initial_values:
        y0 = tuple(np.atleast_1d(np.asarray(y0, dtype=float)))
        try:
            tr = integrate_ode(system, y0, t_span, n_out, max_step)
            branches.append(FanBranch(initial=y0, trajectory=tr))
        except BlowUpError as err:
            partial = None
            if err.times is not None and err.times.size:
                partial = Trajectory(
                    times=err.times,
                    states=err.states,
                    state_names=tuple(state_name_from_target(e.target) for e in system),
                )
            branches.append(
                FanBranch(
                    initial=y0,
                    trajectory=partial,
                    blew_up=True,
                    blow_up_time=err.last_finite_time,
                )
            )
    return branches


def _pde_coefficients(pde: DiscoveredEquation):
    """Classify a discovered PDE as u_t = a u_xx + b u_x + c u + d."""
    a = b = c = d = 0.0
    offending = []
    for term, mean, _ in pde.terms:
        exps = term.exponents
        if not exps:
            d += mean
        elif exps == (("u_xx", 1),):
            a += mean
        elif exps == (("u_x", 1),):
            b += mean
        elif exps == (("u", 1),):
            c += mean
        else:
            offending.append(term.display)
    if offending:
        raise UnsupportedFormError(
            "discovered PDE is outside the supported "
            "u_t = a*u_xx + b*u_x + c*u + d family; offending terms: "
            + ", ".join(offending),
            terms=offending,
        )
    if a < 0:
        raise UnsupportedFormError(
            f"diffusion coefficient {a:.6g} is negative (backward heat equation)",
            terms=["u_xx"],
        )
    return a, b, c, d


@dataclass(frozen=True)
class HeatField:
    """A solved field sampled on (times, x): values has shape (nt, nx)."""

    times: np.ndarray
    x: np.ndarray
    values: np.ndarray

    def slice_at(self, t: float) -> np.ndarray:
        hits = np.flatnonzero(np.isclose(self.times, t, rtol=0.0, atol=1e-9))
        if hits.size != 1:
            raise PredictError(f"t = {t} is not on the output time grid")
        return self.values[hits[0]]


def solve_discovered_heat(
    pde: DiscoveredEquation,
    ic: DiscoveredEquation,
    bcs,
    xi,
    x_grid=None,
    t_span=(0.0, 15.0),
    n_t=None,
    x_refine: int = 64,
    max_dt: float = 0.005,
) -> HeatField:
    """Crank-Nicolson solve of a discovered PDE with discovered IC/BCs.

    ``bcs`` is the (left, right) pair; ``xi`` fixes the (xi1, xi2, xi3)
    values the IC/BC expressions were discovered over.  The default output
    grid steps by 0.5 in t so report times like t = 0, 3, ..., 15 land
    exactly on it.
    """
    a, b, c, d = _pde_coefficients(pde)
    xi = tuple(float(v) for v in xi)
    if len(xi) != 3:
        raise PredictError("xi must supply (xi1, xi2, xi3)")
    if x_grid is None:
        x_grid = np.linspace(0.0, 5.0, 11)
    x_grid = np.asarray(x_grid, dtype=float)
    t0, t1 = (float(v) for v in t_span)
    if not t1 > t0:
        raise PredictError("t_span must be an increasing (t0, t1) pair")
    if n_t is None:
        n_t = int(round((t1 - t0) / 0.5)) + 1
    t_grid = np.linspace(t0, t1, int(n_t))
    left, right = bcs

    def initial(xs):
        vals = np.asarray(ic.evaluate(x=xs, xi=xi), dtype=float)
        return np.broadcast_to(vals, xs.shape).copy()

    values = solve_parabolic_1d(
        initial,
        lambda t: float(left.evaluate(t=t, xi=xi)),
        lambda t: float(right.evaluate(t=t, xi=xi)),
        x_grid,
        t_grid,
        diffusion=a,
        advection=b,
        reaction=c,
        source=d,
        x_refine=x_refine,
        max_dt=max_dt,
    )
    return HeatField(times=t_grid, x=x_grid, values=values)


@dataclass(frozen=True)
class PredictionReport:
    """Predicted-vs-reference comparison with per-time-slice MSE."""

    times: np.ndarray
    predicted: np.ndarray
    reference: np.ndarray
    mse_by_time: tuple
    overall_mse: float
    x: np.ndarray | None = None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            if self.predicted.ndim == 1:
                w.writerow(["t", "predicted", "reference", "squared_error"])
                for t, p, r in zip(self.times, self.predicted, self.reference):
                    w.writerow([repr(float(t)), repr(float(p)), repr(float(r)),
                                repr(float((p - r) ** 2))])
                return
            xs = self.x if self.x is not None else np.arange(self.predicted.shape[1])
            w.writerow(["t", "x", "predicted", "reference", "squared_error"])
            for i, t in enumerate(self.times):
                for j, xv in enumerate(xs):
                    p = self.predicted[i, j]
                    r = self.reference[i, j]
                    w.writerow([repr(float(t)), repr(float(xv)), repr(float(p)),
                                repr(float(r)), repr(float((p - r) ** 2))])


def mse_report(predicted, reference, times, x=None) -> PredictionReport:
    """MSE per requested time slice (axis 0 indexes times) plus overall MSE."""
    p = np.asarray(predicted, dtype=float)
    r = np.asarray(reference, dtype=float)
    if p.shape != r.shape:
        raise PredictError(f"shape mismatch: predicted {p.shape} vs reference {r.shape}")
    times = np.asarray(times, dtype=float)
    if p.shape[0] != times.size:
        raise PredictError("need exactly one prediction slice per time")
    sq = (p - r) ** 2
    per_time = sq.reshape(times.size, -1).mean(axis=1)
    return PredictionReport(
        times=times,
        predicted=p,
        reference=r,
        mse_by_time=tuple((float(t), float(m)) for t, m in zip(times, per_time)),
        overall_mse=float(sq.mean()),
        x=None if x is None else np.asarray(x, dtype=float),
    )


def _json_number(value):
    value = float(value)
    return value if math.isfinite(value) else None


def model_json_dict(
    model: SparseModel,
    dictionary: Dictionary,
    target: str,
    adjusted_criterion=None,
    subsample: dict | None = None,
    seed=None,
) -> dict:
    """Serializable description of a discovery result.

    The dictionary is stored as its declaration (variables + degree, with
    target_dimension when dimensional filtering was used) and rebuilt on
    load, so the JSON stays small for large dictionaries.
    """
    variables = [
        v.name
        if v.dimension == DIMENSIONLESS
        else {"name": v.name, "dimension": list(v.dimension)}
        for v in dictionary.variables
    ]
    degree = max((t.degree for t in dictionary.terms), default=0)
    doc = {
        "target": target,
        "dictionary": {"variables": variables, "degree": degree},
        "terms": [
            {"label": label, "mean": float(mean), "std": float(std)}
            for label, (mean, std) in model.weights.items()
        ],
        "criterion": _json_number(model.criterion),
    }
    if dictionary.target_dimension is not None:
        doc["dictionary"]["target_dimension"] = list(dictionary.target_dimension)
    if adjusted_criterion is not None:
        doc["adjusted_criterion"] = _json_number(adjusted_criterion)
    if subsample is not None:
        doc["subsample"] = {
            "size": int(subsample["size"]),
            "count": int(subsample["count"]),
            "winner_indices": [int(i) for i in subsample["winner_indices"]],
        }
    if seed is not None:
        doc["seed"] = int(seed)
    return doc


def save_model_json(path, model, dictionary, target, **extra) -> None:
    with open(path, "w") as fh:
        json.dump(model_json_dict(model, dictionary, target, **extra), fh, indent=2)
        fh.write("\n")


def _dictionary_from_json(spec: dict) -> Dictionary:
    try:
        raw_vars = spec["variables"]
        degree = int(spec["degree"])
    except (KeyError, TypeError, ValueError) as err:
        raise PredictError(f"bad dictionary declaration in model file: {err}") from err
    variables = []
    for v in raw_vars:
        if isinstance(v, dict):
            variables.append(VariableSpec(v["name"], tuple(v.get("dimension") or ())))
        else:
            variables.append(VariableSpec(str(v)))
    target_dim = spec.get("target_dimension")
    if target_dim is not None:
        return dimensional_dictionary(variables, degree, tuple(target_dim))
    return monomials_up_to_degree(variables, degree)


def load_model_json(path):
    """Load a model file -> (DiscoveredEquation, full document dict)."""
    with open(path) as fh:
        doc = json.load(fh)
    for key in ("target", "dictionary", "terms"):
        if key not in doc:
            raise PredictError(f"model file missing {key!r}")
    dictionary = _dictionary_from_json(doc["dictionary"])
    by_label = {t.display: t for t in dictionary.terms}
    triples = []
    for entry in doc["terms"]:
        try:
            label, mean = entry["label"], float(entry["mean"])
            std = float(entry.get("std", 0.0))
        except (KeyError, TypeError, ValueError) as err:
            raise PredictError(f"bad term entry in model file: {err}") from err
        if label not in by_label:
            raise PredictError(f"term {label!r} is not in the declared dictionary")
        triples.append((by_label[label], mean, std))
    order = {t.display: k for k, t in enumerate(dictionary.terms)}
    triples.sort(key=lambda tr: order[tr[0].display])
    equation = DiscoveredEquation(
        target=str(doc["target"]), terms=tuple(triples), dictionary_ref=dictionary
    )
    return equation, doc
