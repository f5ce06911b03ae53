"""Threshold sparse Bayesian regression.

Alternates evidence maximization with hard thresholding of the posterior
weight means: components with |mean| below the threshold are zeroed, their
columns dropped, and the posterior re-estimated on the survivors until the
zero pattern repeats (or everything is zeroed).  The model-selection
criterion sums the normalized posterior variances of the surviving weights;
smaller means higher posterior confidence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rvm import ConvergenceConfig, WeightPosterior, maximize_evidence


class TsbrError(RuntimeError):
    """Thresholding loop failed to terminate (signals an implementation bug)."""


@dataclass(frozen=True)
class TsbrConfig:
    threshold: float = 0.1
    rvm_config: ConvergenceConfig = field(default_factory=ConvergenceConfig)
    max_outer_iterations: int = 64

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")


@dataclass(frozen=True)
class SparseModel:
    """A thresholded sparse fit: surviving weights, criterion, and bookkeeping.

    ``weights`` maps term label -> (posterior mean, posterior std).  The
    criterion of an empty model is +infinity, so subsample selection never
    prefers a degenerate fit.  ``posterior`` is the final weight posterior
    embedded in the full dictionary index space (zeros outside the active
    set).
    """

    weights: dict
    criterion: float
    n_samples_used: int
    active_count: int
    log: tuple
    posterior: WeightPosterior | None = None
    term_labels: tuple = ()

    @property
    def is_empty(self) -> bool:
        return self.active_count == 0

    def to_json_dict(self) -> dict:
        return {
            "terms": [
                {"label": label, "mean": mean, "std": std}
                for label, (mean, std) in self.weights.items()
            ],
            "criterion": self.criterion,
            "n_samples_used": self.n_samples_used,
        }


def model_selection_criterion(post: WeightPosterior) -> float:
    """Sum of cov_jj / mean_j^2 over nonzero-mean terms; +inf for the empty sum."""
    nz = np.flatnonzero(post.mean)
    if nz.size == 0:
        return math.inf
    var = np.diag(post.covariance)[nz]
    return float(np.sum(var / post.mean[nz] ** 2))


def _embed(post: WeightPosterior, cols: np.ndarray, m: int) -> WeightPosterior:
    mean = np.zeros(m)
    cov = np.zeros((m, m))
    mean[cols] = post.mean
    cov[np.ix_(cols, cols)] = post.covariance
    return WeightPosterior(
        mean=mean,
        covariance=cov,
        active=tuple(int(cols[a]) for a in post.active),
        log_evidence=post.log_evidence,
    )


def fit_tsbr(problem, config: TsbrConfig | None = None) -> SparseModel:
    """Threshold sparse Bayesian regression on one regression problem.

    Returns a :class:`SparseModel` whose surviving weights all satisfy
    |mean| >= threshold; an all-pruned result is a valid empty model with
    criterion +infinity.
    """
    config = config or TsbrConfig()
    delta = config.threshold
    m = problem.m
    cols = np.arange(m)
    previous_pattern = None
    log = []

    def empty_model():
        return SparseModel(
            weights={},
            criterion=math.inf,
            n_samples_used=problem.n,
            active_count=0,
            log=tuple(log),
            posterior=None,
            term_labels=problem.term_labels,
        )

    for outer in range(config.max_outer_iterations):
        sub = problem.restrict_columns(cols)
        _, post = maximize_evidence(sub, config.rvm_config)
        mean = post.mean.copy()
        mean[np.abs(mean) < delta] = 0.0
        keep = np.flatnonzero(mean)
        log.append(f"iteration {outer}: {cols.size} columns, {keep.size} survive")
        if keep.size == 0:
            return empty_model()
        pattern = frozenset(cols[keep].tolist())
        if pattern == previous_pattern:
            embedded = _embed(post, cols, m)
            criterion = model_selection_criterion(embedded)
            weights = {
                problem.term_labels[cols[k]]: (
                    float(post.mean[k]),
                    float(np.sqrt(post.covariance[k, k])),
                )
                for k in keep
            }
            return SparseModel(
                weights=weights,
                criterion=criterion,
                n_samples_used=problem.n,
                active_count=len(weights),
                log=tuple(log),
                posterior=embedded,
                term_labels=problem.term_labels,
            )
        previous_pattern = pattern
        cols = cols[keep]

    raise TsbrError(
        f"thresholding loop exceeded {config.max_outer_iterations} iterations; "
        "the active set should shrink monotonically"
    )
