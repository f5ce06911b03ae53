"""Subsampling-based threshold sparse Bayesian regression.

Runs TSBR on L random size-S row subsets of a regression problem and keeps
the model with the smallest model-selection criterion.  Low-noise subsets
fit well and advertise themselves through a small criterion, which is how
heavy noise and outliers get excluded without ever being identified.

Also provides the adjusted criterion (criterion * S^0.5) for comparing
results across subsampling sizes, the subsample-count formula for outlier
exclusion at a given confidence, and a success-rate/criterion sweep over
(S, L) grids.
"""
from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rvm import ConvergenceError
from .tsbr import SparseModel, TsbrConfig, fit_tsbr


class SubtsbrError(RuntimeError):
    """Every subsample produced an empty model (raise S or lower the threshold)."""


class InfeasibleError(ValueError):
    """No subsample of the requested size can avoid the outliers."""


@dataclass(frozen=True)
class AdaptiveRule:
    """Optional early stopping: quit when the running-minimum criterion drops
    below ``criterion_floor``, or after ``stall_patience`` consecutive
    subsamples without improvement."""

    criterion_floor: float | None = None
    stall_patience: int | None = None


@dataclass(frozen=True)
class SubsamplingConfig:
    subsample_size: int
    n_subsamples: int
    seed: int | None = None
    adaptive: AdaptiveRule | None = None
    n_threads: int = 1

    def __post_init__(self):
        if self.subsample_size < 1:
            raise ValueError("subsample_size must be >= 1")
        if self.n_subsamples < 1:
            raise ValueError("n_subsamples must be >= 1")


@dataclass(frozen=True)
class SubsampleResult:
    indices: tuple
    model: SparseModel
    criterion: float


def _as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def subsample_indices(n: int, size: int, seed, r: int) -> np.ndarray:
    """Row indices of subsample ``r``: a uniform size-``size`` subset without
    replacement, depending only on (seed, r) so any prefix of the subsample
    sequence is reproducible."""
    child = _as_seed_sequence(seed).spawn(r + 1)[r]
    rng = np.random.default_rng(child)
    return np.sort(rng.choice(n, size=size, replace=False))


def winner_index(results) -> int:
    """Index of the minimal-criterion result; ties break to the lowest index."""
    best = 0
    for r in range(1, len(results)):
        if results[r].criterion < results[best].criterion:
            best = r
    return best


def fit_subtsbr(problem, tsbr_config: TsbrConfig | None = None, sub_config=None):
    """Fit TSBR on random subsamples; return (winning model, all results).

    Deterministic given ``sub_config.seed``; subsample fits may run on a
    thread pool (``n_threads``), with the winner and the recorded result
    list independent of execution order.
    """
    if sub_config is None:
        raise ValueError("sub_config is required")
    tsbr_config = tsbr_config or TsbrConfig()
    n = problem.n
    size = sub_config.subsample_size
    if size > n:
        raise ValueError(f"subsample_size {size} exceeds problem size {n}")
    count = sub_config.n_subsamples
    children = _as_seed_sequence(sub_config.seed).spawn(count)

    def one(r):
        rng = np.random.default_rng(children[r])
        indices = np.sort(rng.choice(n, size=size, replace=False))
        try:
            model = fit_tsbr(problem.restrict_rows(indices), tsbr_config)
        except ConvergenceError:
            # A draw whose evidence maximization stalls is a failed draw,
            # not a failed run; it competes with criterion +inf.
            model = SparseModel(
                weights={},
                criterion=math.inf,
                n_samples_used=size,
                active_count=0,
                log=("convergence failure",),
            )
        return SubsampleResult(
            indices=tuple(int(i) for i in indices),
            model=model,
            criterion=model.criterion,
        )

    rule = sub_config.adaptive
    if rule is not None and (
        rule.criterion_floor is not None or rule.stall_patience is not None
    ):
        results = []
        best = math.inf
        stall = 0
        for r in range(count):
            res = one(r)
            results.append(res)
            if res.criterion < best:
                best = res.criterion
                stall = 0
            else:
                stall += 1
            if rule.criterion_floor is not None and best < rule.criterion_floor:
                break
            if rule.stall_patience is not None and stall >= rule.stall_patience:
                break
    elif sub_config.n_threads > 1:
        with ThreadPoolExecutor(max_workers=sub_config.n_threads) as pool:
            results = list(pool.map(one, range(count)))
    else:
        results = [one(r) for r in range(count)]

    best = winner_index(results)
    winner = results[best].model
    if winner.is_empty:
        raise SubtsbrError(
            "every subsample produced an empty model; "
            "increase subsample_size or lower the threshold"
        )
    return winner, results


def adjusted_criterion(criterion: float, subsample_size: int) -> float:
    """criterion * subsample_size**0.5, comparable across subsampling sizes."""
    if criterion < 0:
        raise ValueError("criterion must be non-negative")
    if subsample_size < 1:
        raise ValueError("subsample_size must be positive")
    return criterion * math.sqrt(subsample_size)


def _log_comb(a: float, b: float) -> float:
    return math.lgamma(a + 1.0) - math.lgamma(b + 1.0) - math.lgamma(a - b + 1.0)


def subsamples_needed(
    n: int, outlier_fraction: float, subsample_size: int, confidence: float
) -> int:
    """Subsamples needed so that, with the given confidence, at least one
    contains no outliers: ceil(log(1-q) / log(1 - C((1-p)N, S) / C(N, S))),
    computed in log space to stay finite for N in the thousands."""
    p, s, q = outlier_fraction, subsample_size, confidence
    if not 0 <= p < 1:
        raise ValueError("outlier_fraction must be in [0, 1)")
    if not 0 < q < 1:
        raise ValueError("confidence must be in (0, 1)")
    if not 1 <= s <= n:
        raise ValueError("subsample_size must be in [1, n]")
    clean = (1.0 - p) * n
    if s > clean:
        raise InfeasibleError(
            f"subsample_size {s} exceeds the {clean:.1f} expected clean rows; "
            "no subsample can avoid the outliers"
        )
    if p == 0:
        return 1
    p_clean = math.exp(_log_comb(clean, s) - _log_comb(n, s))
    if p_clean >= 1.0:
        return 1
    needed = math.log(1.0 - q) / math.log(1.0 - p_clean)
    return max(1, math.ceil(needed))


@dataclass(frozen=True)
class SweepCell:
    subsample_size: int
    n_subsamples: int
    success_rate: float
    median_criterion: float
    median_adjusted_criterion: float
    mean_seconds: float
    n_errors: int = 0


@dataclass(frozen=True)
class SweepTable:
    cells: tuple

    CSV_COLUMNS = (
        "S",
        "L",
        "success_rate",
        "median_criterion",
        "median_adjusted_criterion",
        "mean_seconds",
    )

    def to_csv(self, target) -> None:
        """Write contour-plot input: one row per (S, L) cell."""
        if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
            with open(target, "w", newline="") as fh:
                self.to_csv(fh)
            return
        writer = csv.writer(target, lineterminator="\n")
        writer.writerow(self.CSV_COLUMNS)
        for c in self.cells:
            writer.writerow(
                [
                    c.subsample_size,
                    c.n_subsamples,
                    repr(c.success_rate),
                    repr(c.median_criterion),
                    repr(c.median_adjusted_criterion),
                    repr(c.mean_seconds),
                ]
            )


def sweep(
    problem,
    tsbr_config,
    sizes,
    counts,
    trials: int,
    truth=None,
    seed=None,
    n_threads: int = 1,
) -> SweepTable:
    """Success-rate / criterion surface over subsampling sizes and counts.

    Every (S, L) cell runs ``trials`` independent SubTSBR fits.  When
    ``truth`` (an iterable of term labels) is given, the success rate is
    the fraction of trials recovering exactly that support; otherwise NaN.
    Fit errors are recorded per cell rather than raised.
    """
    truth_set = None if truth is None else frozenset(truth)
    sizes = tuple(sizes)
    counts = tuple(counts)
    grid = [(s, l) for s in sizes for l in counts]
    trial_seeds = np.random.SeedSequence(seed).spawn(len(grid) * trials)
    cells = []
    for ci, (size, count) in enumerate(grid):
        base = ci * trials
        succ = 0
        crits = []
        secs = []
        errors = 0
        for t in range(trials):
            cfg = SubsamplingConfig(
                subsample_size=size,
                n_subsamples=count,
                seed=trial_seeds[base + t],
                n_threads=n_threads,
            )
            t0 = time.perf_counter()
            try:
                model, _ = fit_subtsbr(problem, tsbr_config, cfg)
            except (SubtsbrError, ValueError):
                errors += 1
                secs.append(time.perf_counter() - t0)
                continue
            secs.append(time.perf_counter() - t0)
            crits.append(model.criterion)
            if truth_set is not None and frozenset(model.weights) == truth_set:
                succ += 1
        cells.append(
            SweepCell(
                subsample_size=size,
                n_subsamples=count,
                success_rate=(succ / trials) if truth_set is not None else math.nan,
                median_criterion=float(np.median(crits)) if crits else math.nan,
                median_adjusted_criterion=(
                    float(np.median([adjusted_criterion(c, size) for c in crits]))
                    if crits
                    else math.nan
                ),
                mean_seconds=float(np.mean(secs)) if secs else math.nan,
                n_errors=errors,
            )
        )
    return SweepTable(cells=tuple(cells))
