"""Evidence evaluation, weight posterior, and hyperparameter optimization.

Closed-form oracles: every nontrivial number asserted here is either derived
from the dense textbook formulas evaluated inline (no shared code with the
implementation) or is an algebraic special case worked out by hand.
"""

import numpy as np
import pytest

from eqforge import (
    ConvergenceConfig,
    ConvergenceError,
    Hyperparameters,
    RegressionProblem,
    RvmError,
    log_marginal_likelihood,
    maximize_evidence,
    posterior,
)


def random_problem(seed, n=None, m=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(3, 9))
    m = m or int(rng.integers(1, 5))
    phi = rng.normal(size=(n, m))
    eta = rng.normal(size=n)
    return RegressionProblem(eta, phi, tuple(f"c{i}" for i in range(m)))


def dense_reference(problem, alpha, sigma2):
    """Textbook N-dimensional marginal plus M-dimensional posterior."""
    finite = np.isfinite(alpha)
    phi_a = problem.phi[:, finite]
    a_inv = np.diag(1.0 / alpha[finite])
    c = sigma2 * np.eye(problem.n) + phi_a @ a_inv @ phi_a.T
    sign, logdet = np.linalg.slogdet(c)
    assert sign > 0
    quad = problem.eta @ np.linalg.solve(c, problem.eta)
    log_ev = -0.5 * (problem.n * np.log(2.0 * np.pi) + logdet + quad)
    cov_a = np.linalg.inv(np.diag(alpha[finite]) + phi_a.T @ phi_a / sigma2)
    mean_a = cov_a @ phi_a.T @ problem.eta / sigma2
    mean = np.zeros(problem.m)
    cov = np.zeros((problem.m, problem.m))
    mean[finite] = mean_a
    cov[np.ix_(finite, finite)] = cov_a
    return log_ev, mean, cov


def test_rank_one_evidence_formula():
    n, alpha = 6, 2.3
    problem = RegressionProblem(np.zeros(n), np.ones((n, 1)), ("c",))
    expected = -0.5 * n * np.log(2.0 * np.pi) - 0.5 * np.log(1.0 + n / alpha)
    for form in ("woodbury", "direct"):
        got = log_marginal_likelihood(problem, (np.array([alpha]), 1.0), form=form)
        assert got == pytest.approx(expected, abs=1e-12)


def test_all_pruned_evidence_is_pure_noise_likelihood():
    rng = np.random.default_rng(11)
    eta = rng.normal(size=5)
    problem = RegressionProblem(eta, rng.normal(size=(5, 3)), ("a", "b", "c"))
    sigma2 = 0.7
    expected = -0.5 * 5 * np.log(2.0 * np.pi * sigma2) - eta @ eta / (2.0 * sigma2)
    hyper = (np.full(3, np.inf), sigma2)
    for form in ("woodbury", "direct"):
        assert log_marginal_likelihood(problem, hyper, form=form) == pytest.approx(
            expected, abs=1e-12
        )


def test_posterior_and_evidence_match_dense_formulas():
    for seed in range(60):
        problem = random_problem(500 + seed)
        rng = np.random.default_rng(seed)
        alpha = rng.uniform(0.1, 10.0, size=problem.m)
        if problem.m > 1 and seed % 3 == 0:
            alpha[0] = np.inf  # exercise pruned columns too
        sigma2 = float(rng.uniform(0.05, 2.0))
        ref_ev, ref_mean, ref_cov = dense_reference(problem, alpha, sigma2)
        post = posterior(problem, (alpha, sigma2))
        assert np.allclose(post.mean, ref_mean, atol=1e-10)
        assert np.allclose(post.covariance, ref_cov, atol=1e-10)
        assert post.log_evidence == pytest.approx(ref_ev, abs=1e-8)
        for form in ("woodbury", "direct"):
            got = log_marginal_likelihood(problem, (alpha, sigma2), form=form)
            assert got == pytest.approx(ref_ev, abs=1e-8)


def test_scalar_posterior_by_hand():
    # phi = ones(4,1), eta = ones(4), alpha = 1, sigma2 = 1:
    # Sigma = 1/(1 + 4) = 1/5, mu = Sigma * 4 = 4/5
    problem = RegressionProblem(np.ones(4), np.ones((4, 1)), ("c",))
    post = posterior(problem, (np.array([1.0]), 1.0))
    assert post.mean[0] == pytest.approx(0.8, abs=1e-12)
    assert post.covariance[0, 0] == pytest.approx(0.2, abs=1e-12)
    assert post.std[0] == pytest.approx(np.sqrt(0.2), abs=1e-12)
    assert post.active == (0,)


def test_tiny_alpha_recovers_least_squares():
    problem = random_problem(21, n=30, m=3)
    post = posterior(problem, (np.full(3, 1e-12), 0.5))
    ls, *_ = np.linalg.lstsq(problem.phi, problem.eta, rcond=None)
    assert np.allclose(post.mean, ls, atol=1e-6)


def test_square_phi_tiny_noise_inverts():
    rng = np.random.default_rng(5)
    phi = rng.normal(size=(4, 4)) + 4.0 * np.eye(4)
    eta = rng.normal(size=4)
    problem = RegressionProblem(eta, phi, ("a", "b", "c", "d"))
    post = posterior(problem, (np.full(4, 1e-10), 1e-10))
    assert np.allclose(post.mean, np.linalg.solve(phi, eta), atol=1e-6)


def test_covariance_symmetric_positive_definite():
    for seed in range(8):
        problem = random_problem(70 + seed)
        rng = np.random.default_rng(seed)
        alpha = rng.uniform(0.5, 5.0, size=problem.m)
        post = posterior(problem, (alpha, 0.3))
        assert np.allclose(post.covariance, post.covariance.T, atol=1e-12)
        np.linalg.cholesky(post.covariance[np.ix_(post.active, post.active)])


def test_maximize_recovers_clean_linear_term():
    rng = np.random.default_rng(42)
    x = rng.uniform(-1.0, 1.0, size=50)
    junk = rng.normal(size=50)
    problem = RegressionProblem(
        2.0 * x + rng.normal(0.0, 1e-4, size=50),
        np.column_stack([x, junk]),
        ("x", "junk"),
    )
    hyper, post = maximize_evidence(problem)
    assert abs(post.mean[0] - 2.0) < 1e-3
    assert abs(post.mean[1]) < 1e-3
    assert hyper.sigma2 < 1e-4


def test_zero_target_prunes_everything():
    rng = np.random.default_rng(9)
    problem = RegressionProblem(
        np.zeros(25), rng.normal(size=(25, 3)), ("a", "b", "c")
    )
    _, post = maximize_evidence(problem)
    assert np.abs(post.mean).max() < 1e-6


def test_evidence_trace_is_monotone():
    for seed in range(20):
        problem = random_problem(900 + seed, n=40)
        trace = []
        maximize_evidence(problem, trace=trace)
        assert len(trace) >= 1
        steps = np.diff(np.asarray(trace))
        assert (steps >= -1e-9).all()


def test_final_trace_value_matches_returned_evidence():
    problem = random_problem(31, n=35, m=4)
    trace = []
    _, post = maximize_evidence(problem, trace=trace)
    assert trace[-1] == pytest.approx(post.log_evidence, abs=1e-9)


def test_column_scaling_invariance():
    c = 3.7
    for seed in range(5):
        rng = np.random.default_rng(60 + seed)
        phi = rng.normal(size=(40, 4))
        w = np.array([1.5, -2.0, 0.0, 0.0])
        eta = phi @ w + rng.normal(0.0, 0.05, size=40)
        labels = ("a", "b", "c", "d")
        base = maximize_evidence(RegressionProblem(eta, phi, labels))[1]
        scaled_phi = phi.copy()
        scaled_phi[:, 1] *= c
        scaled = maximize_evidence(RegressionProblem(eta, scaled_phi, labels))[1]
        assert scaled.active == base.active
        assert np.allclose(scaled.mean[1] * c, base.mean[1], atol=1e-6)


def test_fixed_point_strategy_agrees_on_support():
    for seed in range(10):
        rng = np.random.default_rng(600 + seed)
        phi = rng.normal(size=(50, 6))
        w = np.zeros(6)
        w[[1, 4]] = [1.5, -1.0]
        eta = phi @ w + rng.normal(0.0, 0.05, size=50)
        problem = RegressionProblem(eta, phi, tuple("abcdef"))
        _, seq = maximize_evidence(problem)
        _, fp = maximize_evidence(problem, ConvergenceConfig(strategy="fixed_point"))
        assert np.array_equal(np.abs(seq.mean) > 0.1, np.abs(fp.mean) > 0.1)


def test_convergence_error_carries_last_iterate():
    problem = random_problem(77, n=40, m=4)
    with pytest.raises(ConvergenceError) as err:
        maximize_evidence(problem, ConvergenceConfig(max_iterations=1))
    assert err.value.hyperparameters is not None
    assert err.value.posterior is not None
    assert err.value.posterior.mean.shape == (4,)


def test_problem_validation():
    with pytest.raises(RvmError):
        RegressionProblem(np.ones(3), np.ones((4, 2)), ("a", "b"))
    with pytest.raises(RvmError):
        RegressionProblem(np.array([1.0, np.nan]), np.ones((2, 1)), ("a",))
    with pytest.raises(RvmError):
        RegressionProblem(np.ones(2), np.ones((2, 2)), ("a",))


def test_hyperparameter_validation():
    problem = RegressionProblem(np.ones(4), np.ones((4, 1)), ("c",))
    with pytest.raises(RvmError):
        posterior(problem, (np.array([1.0]), -1.0))
    with pytest.raises(RvmError):
        posterior(problem, (np.array([-2.0]), 1.0))
    with pytest.raises(RvmError):
        posterior(problem, (np.array([1.0, 2.0]), 1.0))
    with pytest.raises(RvmError):
        log_marginal_likelihood(problem, (np.array([1.0]), 1.0), form="banana")
    with pytest.raises(RvmError):
        maximize_evidence(problem, ConvergenceConfig(strategy="nope"))


def test_restrict_helpers():
    problem = random_problem(1, n=6, m=3)
    rows = problem.restrict_rows(np.array([0, 2, 4]))
    assert rows.n == 3 and rows.m == 3
    assert np.array_equal(rows.eta, problem.eta[[0, 2, 4]])
    cols = problem.restrict_columns(np.array([1]))
    assert cols.m == 1 and cols.term_labels == (problem.term_labels[1],)


def test_hyperparameters_accepts_tuple_or_dataclass():
    problem = RegressionProblem(np.ones(4), np.ones((4, 1)), ("c",))
    a = log_marginal_likelihood(problem, (np.array([1.0]), 1.0))
    b = log_marginal_likelihood(problem, Hyperparameters(np.array([1.0]), 1.0))
    assert a == b
