"""Sparse Bayesian linear regression (relevance vector machine core).

Model: eta = Phi w + eps with eps ~ N(0, sigma2 I) and an independent
zero-mean Gaussian prior N(w_j | 0, 1/alpha_j) on every weight.  The
hyperparameters (alpha, sigma2) are chosen by type-II maximum likelihood,
i.e. by maximizing the marginal likelihood ("evidence")

    p(eta | alpha, sigma2)
        = (2 pi)^(-N/2) |C|^(-1/2) exp(-eta^T C^-1 eta / 2),
    C = sigma2 I + Phi A^-1 Phi^T,   A = diag(alpha).

Weights with alpha_j = +inf are pruned (posterior a point mass at zero),
which is where the sparsity comes from: the optimal values of many
hyperparameters are infinite.

The default optimizer is the fast sequential algorithm that adds, deletes,
or re-estimates one basis function per step, choosing the move with the
largest marginal-likelihood gain; the noise variance is re-estimated after
every step, with each update guarded so the log evidence never decreases.
A full-vector fixed-point update is available as an alternative strategy.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


class RvmError(ValueError):
    """Invalid problem or hyperparameter input."""


class ConvergenceError(RuntimeError):
    """Evidence maximization did not converge; carries the last iterate."""

    def __init__(self, message, hyperparameters=None, posterior=None):
        super().__init__(message)
        self.hyperparameters = hyperparameters
        self.posterior = posterior


@dataclass(frozen=True)
class RegressionProblem:
    """Target vector eta (N) and design matrix phi (N x M) with term labels."""

    eta: np.ndarray
    phi: np.ndarray
    term_labels: tuple

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float).reshape(-1)
        phi = np.atleast_2d(np.asarray(self.phi, dtype=float))
        labels = tuple(str(l) for l in self.term_labels)
        if eta.size < 1 or phi.shape[1] < 1:
            raise RvmError("need N >= 1 samples and M >= 1 columns")
        if phi.shape[0] != eta.size:
            raise RvmError(f"phi has {phi.shape[0]} rows, eta has {eta.size}")
        if len(labels) != phi.shape[1]:
            raise RvmError(f"{len(labels)} labels for {phi.shape[1]} columns")
        if not np.isfinite(eta).all() or not np.isfinite(phi).all():
            raise RvmError("eta and phi must be finite")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "term_labels", labels)

    @property
    def n(self) -> int:
        return self.eta.size

    @property
    def m(self) -> int:
        return self.phi.shape[1]

    def restrict_rows(self, indices) -> "RegressionProblem":
        indices = np.asarray(indices, dtype=int)
        return RegressionProblem(self.eta[indices], self.phi[indices], self.term_labels)

    def restrict_columns(self, indices) -> "RegressionProblem":
        indices = np.asarray(indices, dtype=int)
        return RegressionProblem(
            self.eta, self.phi[:, indices], tuple(self.term_labels[i] for i in indices)
        )


@dataclass(frozen=True)
class Hyperparameters:
    """Per-weight prior precisions (alpha_j = +inf prunes term j) and noise variance."""

    alpha: np.ndarray
    sigma2: float

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        if (alpha <= 0).any() or np.isnan(alpha).any():
            raise RvmError("alpha must be positive (or +inf)")
        if not self.sigma2 > 0:
            raise RvmError("sigma2 must be positive")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "sigma2", float(self.sigma2))


@dataclass(frozen=True)
class WeightPosterior:
    """Gaussian weight posterior; entries outside the active set are exactly zero."""

    mean: np.ndarray
    covariance: np.ndarray
    active: tuple
    log_evidence: float

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance))


@dataclass(frozen=True)
class ConvergenceConfig:
    """Tolerances for evidence maximization.

    Iteration stops when no single-term update changes any log alpha by
    more than ``alpha_tol`` and the relative noise-variance change falls
    below ``sigma2_tol``.  Precisions above ``alpha_cap`` are treated as
    infinite (pruned).  ``evidence_floor`` is the relative log-evidence
    gain below which a candidate update counts as converged rather than
    as progress; near-collinear column pairs can otherwise trade
    vanishing gains past the iteration cap.  ``sigma2_floor`` bounds the
    noise variance from below at that fraction of the mean squared
    target: on noise-free data the evidence is unbounded in beta, and
    past roughly 1e8 the cancellation noise in the sequential statistics
    exceeds the evidence floor, so alpha updates fire on float noise
    forever.  The floor biases recovered weights by ~alpha/(beta *
    lambda_min(Phi^T Phi)), far below the stated tolerances.
    """

    max_iterations: int = 3000
    alpha_tol: float = 1e-6
    sigma2_tol: float = 1e-6
    alpha_cap: float = 1e12
    strategy: str = "sequential"  # or "fixed_point"
    evidence_floor: float = 1e-9
    sigma2_floor: float = 1e-6


def _chol_inverse(h):
    """Inverse and log-determinant of an SPD matrix via Cholesky.

    One round of jitter (1e-10 * mean diagonal scale) is added on failure
    before giving up, for near-collinear dictionaries.
    """
    if h.shape[0] == 0:
        return np.zeros((0, 0)), 0.0
    try:
        low = np.linalg.cholesky(h)
    except np.linalg.LinAlgError:
        jitter = 1e-10 * np.trace(h) / h.shape[0]
        low = np.linalg.cholesky(h + jitter * np.eye(h.shape[0]))
    inv_low = np.linalg.inv(low)
    return inv_low.T @ inv_low, 2.0 * float(np.sum(np.log(np.diag(low))))


def log_marginal_likelihood(problem, hyper, form="woodbury"):
    """Log evidence log p(eta | alpha, sigma2).

    ``form="direct"`` evaluates the N x N covariance C = sigma2 I +
    Phi A^-1 Phi^T literally; ``form="woodbury"`` uses the equivalent
    M x M expression through the posterior Hessian.  Pruned columns
    (alpha_j = +inf) contribute as if absent.
    """
    if not isinstance(hyper, Hyperparameters):
        hyper = Hyperparameters(*hyper)
    if hyper.alpha.size != problem.m:
        raise RvmError("alpha length does not match problem")
    eta, sigma2 = problem.eta, hyper.sigma2
    n = problem.n
    idx = np.flatnonzero(np.isfinite(hyper.alpha))
    if form == "direct":
        c = sigma2 * np.eye(n)
        if idx.size:
            phi_a = problem.phi[:, idx]
            c += (phi_a / hyper.alpha[idx]) @ phi_a.T
        sign, logdet = np.linalg.slogdet(c)
        if sign <= 0:
            raise RvmError("covariance not positive definite")
        quad = float(eta @ np.linalg.solve(c, eta))
        return -0.5 * (n * np.log(2.0 * np.pi) + logdet + quad)
    if form != "woodbury":
        raise RvmError(f"unknown form {form!r}")
    beta = 1.0 / sigma2
    if idx.size == 0:
        return -0.5 * (n * np.log(2.0 * np.pi * sigma2) + beta * float(eta @ eta))
    phi_a = problem.phi[:, idx]
    alpha_a = hyper.alpha[idx]
    h = beta * (phi_a.T @ phi_a) + np.diag(alpha_a)
    cov, logdet_h = _chol_inverse(h)
    pe = phi_a.T @ eta
    mu = beta * (cov @ pe)
    logdet_c = n * np.log(sigma2) - float(np.sum(np.log(alpha_a))) + logdet_h
    quad = beta * (float(eta @ eta) - float(pe @ mu))
    return -0.5 * (n * np.log(2.0 * np.pi) + logdet_c + quad)


def posterior(problem, hyper) -> WeightPosterior:
    """Closed-form Gaussian weight posterior for fixed hyperparameters.

    cov = [sigma2^-1 Phi^T Phi + diag(alpha)]^-1 and
    mean = sigma2^-1 cov Phi^T eta on the active set, embedded into M
    dimensions with exact zeros elsewhere.
    """
    if not isinstance(hyper, Hyperparameters):
        hyper = Hyperparameters(*hyper)
    if hyper.alpha.size != problem.m:
        raise RvmError("alpha length does not match problem")
    idx = np.flatnonzero(np.isfinite(hyper.alpha))
    mean = np.zeros(problem.m)
    cov = np.zeros((problem.m, problem.m))
    if idx.size:
        beta = 1.0 / hyper.sigma2
        phi_a = problem.phi[:, idx]
        h = beta * (phi_a.T @ phi_a) + np.diag(hyper.alpha[idx])
        cov_a, _ = _chol_inverse(h)
        cov_a = 0.5 * (cov_a + cov_a.T)
        mean[idx] = beta * (cov_a @ (phi_a.T @ problem.eta))
        cov[np.ix_(idx, idx)] = cov_a
    return WeightPosterior(
        mean=mean,
        covariance=cov,
        active=tuple(int(i) for i in idx),
        log_evidence=log_marginal_likelihood(problem, hyper),
    )


class _Workspace:
    """Cached Gram-matrix quantities shared by all updates of one fit."""

    def __init__(self, problem):
        self.phi = problem.phi
        self.eta = problem.eta
        self.n, self.m = problem.phi.shape
        self.pp = problem.phi.T @ problem.phi
        self.pe = problem.phi.T @ problem.eta
        self.ppd = np.diag(self.pp).copy()
        self.ee = float(problem.eta @ problem.eta)

    def active_posterior(self, alpha, beta):
        idx = np.flatnonzero(np.isfinite(alpha))
        if idx.size == 0:
            return idx, np.zeros(0), np.zeros((0, 0)), 0.0
        h = beta * self.pp[np.ix_(idx, idx)] + np.diag(alpha[idx])
        cov, logdet_h = _chol_inverse(h)
        mu = beta * (cov @ self.pe[idx])
        return idx, mu, cov, logdet_h

    def log_evidence(self, alpha, beta, idx=None, mu=None, logdet_h=None):
        n = self.n
        if idx is None or mu is None or logdet_h is None:
            idx, mu, _, logdet_h = self.active_posterior(alpha, beta)
        if idx.size == 0:
            return -0.5 * (n * np.log(2.0 * np.pi / beta) + beta * self.ee)
        logdet_c = -n * np.log(beta) - float(np.sum(np.log(alpha[idx]))) + logdet_h
        quad = beta * (self.ee - float(self.pe[idx] @ mu))
        return -0.5 * (n * np.log(2.0 * np.pi) + logdet_c + quad)

    def factors(self, alpha, beta, idx, cov):
        """Sparsity/quality factors (s_m, q_m, S_m, Q_m) for every column."""
        if idx.size:
            ppa = self.pp[:, idx]
            t = ppa @ cov
            big_s = beta * self.ppd - beta**2 * np.einsum("ij,ij->i", t, ppa)
            big_q = beta * self.pe - beta**2 * (t @ self.pe[idx])
        else:
            big_s = beta * self.ppd
            big_q = beta * self.pe
        s, q = big_s.copy(), big_q.copy()
        act = np.isfinite(alpha)
        denom = alpha[act] - big_s[act]
        with np.errstate(divide="ignore", invalid="ignore"):
            s[act] = alpha[act] * big_s[act] / denom
            q[act] = alpha[act] * big_q[act] / denom
        return s, q, big_s, big_q


def _beta_cap(ws, cfg) -> float:
    ms = float(ws.eta @ ws.eta) / ws.n
    if ms <= 0 or cfg.sigma2_floor <= 0:
        return np.inf
    return 1.0 / (cfg.sigma2_floor * ms)


def _sequential(ws, cfg, trace):
    n, m = ws.n, ws.m
    var_eta = float(np.var(ws.eta))
    sigma2 = 0.1 * var_eta if var_eta > 0 else 1e-6
    beta = 1.0 / sigma2
    beta_cap = _beta_cap(ws, cfg)
    alpha = np.full(m, np.inf)

    # Seed with the column of maximal normalized correlation with eta.
    ok = ws.ppd > 0
    proj = np.full(m, -np.inf)
    proj[ok] = ws.pe[ok] ** 2 / ws.ppd[ok]
    j0 = int(np.argmax(proj))
    if np.isfinite(proj[j0]):
        denom = proj[j0] - sigma2
        alpha[j0] = ws.ppd[j0] / denom if denom > 0 else 1.0
    if trace is not None:
        trace.append(ws.log_evidence(alpha, beta))

    def guarded_beta_step(alpha, beta):
        idx, mu, cov, logdet_h = ws.active_posterior(alpha, beta)
        if idx.size:
            resid = ws.eta - ws.phi[:, idx] @ mu
            gamma = 1.0 - alpha[idx] * np.diag(cov)
            denom = n - float(np.sum(gamma))
        else:
            resid = ws.eta
            denom = float(n)
        rss = float(resid @ resid)
        if denom <= 0 or rss <= 0:
            return beta, False
        candidate = min(denom / rss, beta_cap)
        if abs(np.log(candidate) - np.log(beta)) < cfg.sigma2_tol:
            return beta, False
        # Accept only strict improvement above the floor; a beta step that
        # merely ties keeps dithering and re-exciting alpha updates.
        old_ev = ws.log_evidence(alpha, beta)
        if ws.log_evidence(alpha, candidate) < old_ev + cfg.evidence_floor * (
            1.0 + abs(old_ev)
        ):
            return beta, False
        return candidate, True

    converged = False
    for _ in range(cfg.max_iterations):
        idx, mu, cov, logdet_h = ws.active_posterior(alpha, beta)
        evidence = ws.log_evidence(alpha, beta, idx, mu, logdet_h)
        gain_floor = cfg.evidence_floor * (1.0 + abs(evidence))
        s, q, big_s, big_q = ws.factors(alpha, beta, idx, cov)
        act = np.isfinite(alpha)
        theta = q * q - s

        delta_l = np.full(m, -np.inf)
        add = (theta > 0) & ~act
        rec = (theta > 0) & act
        dele = (theta <= 0) & act
        with np.errstate(divide="ignore", invalid="ignore"):
            if add.any():
                alpha_add = s[add] ** 2 / theta[add]
                gain = (big_q[add] ** 2 - big_s[add]) / big_s[add] + np.log(
                    big_s[add] / big_q[add] ** 2
                )
                gain[alpha_add > cfg.alpha_cap] = -np.inf
                delta_l[add] = gain
            if rec.any():
                alpha_new = s[rec] ** 2 / theta[rec]
                d_inv = 1.0 / alpha_new - 1.0 / alpha[rec]
                delta_l[rec] = big_q[rec] ** 2 / (big_s[rec] + 1.0 / d_inv) - np.log1p(
                    big_s[rec] * d_inv
                )
            if dele.any():
                delta_l[dele] = big_q[dele] ** 2 / (big_s[dele] - alpha[dele]) - np.log(
                    1.0 - big_s[dele] / alpha[dele]
                )
        delta_l[~np.isfinite(delta_l)] = -np.inf

        alpha_moved = False
        j = int(np.argmax(delta_l))
        if delta_l[j] > gain_floor:
            if theta[j] > 0:
                alpha_new = s[j] ** 2 / theta[j]
                if alpha_new > cfg.alpha_cap:
                    alpha_new = np.inf
                settled = (
                    np.isfinite(alpha[j])
                    and np.isfinite(alpha_new)
                    and abs(np.log(alpha_new) - np.log(alpha[j])) < cfg.alpha_tol
                )
                alpha[j] = alpha_new
                alpha_moved = not settled
            else:
                alpha[j] = np.inf
                alpha_moved = True
            if alpha_moved and trace is not None:
                trace.append(ws.log_evidence(alpha, beta))

        beta, beta_moved = guarded_beta_step(alpha, beta)
        if beta_moved and trace is not None:
            trace.append(ws.log_evidence(alpha, beta))

        if not alpha_moved and not beta_moved:
            converged = True
            break

    return alpha, beta, converged


def _fixed_point(ws, cfg, trace):
    n, m = ws.n, ws.m
    var_eta = float(np.var(ws.eta))
    sigma2 = 0.1 * var_eta if var_eta > 0 else 1e-6
    beta = 1.0 / sigma2
    beta_cap = _beta_cap(ws, cfg)
    alpha = np.ones(m)
    evidence = ws.log_evidence(alpha, beta)
    if trace is not None:
        trace.append(evidence)

    converged = False
    for _ in range(cfg.max_iterations):
        idx, mu, cov, _ = ws.active_posterior(alpha, beta)
        if idx.size == 0:
            converged = True
            break
        gamma = 1.0 - alpha[idx] * np.diag(cov)
        alpha_new = alpha.copy()
        with np.errstate(divide="ignore"):
            updated = np.where(mu != 0, gamma / mu**2, np.inf)
        updated[updated > cfg.alpha_cap] = np.inf
        updated[updated <= 0] = np.inf
        alpha_new[idx] = updated
        resid = ws.eta - ws.phi[:, idx] @ mu
        denom = n - float(np.sum(gamma))
        rss = float(resid @ resid)
        beta_new = min(denom / rss, beta_cap) if (denom > 0 and rss > 0) else beta

        candidate = ws.log_evidence(alpha_new, beta_new)
        if candidate < evidence - 1e-10:
            converged = True  # fixed-point overshoot: stop at the last good iterate
            break
        if candidate - evidence <= cfg.evidence_floor * (1.0 + abs(evidence)):
            alpha, beta = alpha_new, beta_new
            if trace is not None:
                trace.append(candidate)
            converged = True  # evidence stalled below the floor
            break
        both_finite = np.isfinite(alpha_new) & np.isfinite(alpha)
        delta_alpha = (
            np.max(np.abs(np.log(alpha_new[both_finite]) - np.log(alpha[both_finite])))
            if both_finite.any()
            else 0.0
        )
        same_support = bool((np.isfinite(alpha_new) == np.isfinite(alpha)).all())
        delta_beta = abs(np.log(beta_new) - np.log(beta))
        alpha, beta, evidence = alpha_new, beta_new, candidate
        if trace is not None:
            trace.append(evidence)
        if same_support and delta_alpha < cfg.alpha_tol and delta_beta < cfg.sigma2_tol:
            converged = True
            break

    return alpha, beta, converged


def maximize_evidence(problem, config=None, trace=None):
    """Maximize the evidence over (alpha, sigma2); return hyperparameters and posterior.

    ``trace``, if given a list, accumulates the log evidence after every
    accepted update (monotone non-decreasing by construction, up to
    round-off).  Raises :class:`ConvergenceError` carrying the last iterate
    when ``config.max_iterations`` is exhausted.
    """
    cfg = config or ConvergenceConfig()
    ws = _Workspace(problem)
    if cfg.strategy == "sequential":
        alpha, beta, converged = _sequential(ws, cfg, trace)
    elif cfg.strategy == "fixed_point":
        alpha, beta, converged = _fixed_point(ws, cfg, trace)
    else:
        raise RvmError(f"unknown strategy {cfg.strategy!r}")

    hyper = Hyperparameters(alpha=alpha, sigma2=1.0 / beta)
    post = posterior(problem, hyper)
    if not converged:
        raise ConvergenceError(
            f"evidence maximization did not converge in {cfg.max_iterations} iterations",
            hyperparameters=hyper,
            posterior=post,
        )
    return hyper, post
