import numpy as np

from privlasso import (
    AmpOptions,
    ModelParams,
    apply_output_perturbation,
    generate_dataset,
    pairwise_sensitivity,
    run_amp,
    sample_privacy_noise,
    solve_lasso_tilted,
)
from privlasso.amp import perturbed_errors
from privlasso.cd import kkt_violation
from privlasso.model import make_one_point_mutant

PARAMS = ModelParams(alpha=0.5, rho=0.2, sigma_xi=0.1, lam=0.7, sigma_eta=0.1, p=500)


def test_fully_shrunk_at_huge_lam():
    d = generate_dataset(PARAMS, 0)
    fp = run_amp(d, None, 1e4)
    assert fp.converged
    assert np.all(fp.beta_hat == 0.0)
    assert fp.rho_hat == 0.0


def test_agrees_with_cd_untilted():
    d = generate_dataset(PARAMS, 1)
    fp = run_amp(d, None, PARAMS.lam)
    sol = solve_lasso_tilted(d, None, PARAMS.lam, tol=1e-12)
    assert fp.converged
    assert np.max(np.abs(fp.beta_hat - sol.beta_hat)) < 1e-6


def test_agrees_with_cd_tilted():
    d = generate_dataset(PARAMS, 2)
    eta = sample_privacy_noise(PARAMS, 3)
    fp = run_amp(d, eta, PARAMS.lam)
    sol = solve_lasso_tilted(d, eta, PARAMS.lam, tol=1e-12)
    assert np.max(np.abs(fp.beta_hat - sol.beta_hat)) < 1e-6


def test_fixed_point_satisfies_kkt():
    d = generate_dataset(PARAMS, 4)
    eta = sample_privacy_noise(PARAMS, 5)
    fp = run_amp(d, eta, PARAMS.lam)
    assert kkt_violation(fp.beta_hat, d, eta, PARAMS.lam) < 1e-6


def test_sigma_consistent_with_support():
    d = generate_dataset(PARAMS, 6)
    fp = run_amp(d, None, PARAMS.lam)
    # Sigma = (1 + s_theta)/alpha with s_theta = Sigma * ||beta||_0 / p,
    # up to the freeze applied near convergence
    alpha = PARAMS.alpha
    implied = 1.0 / (alpha - fp.rho_hat)
    assert abs(fp.state.Sigma - implied) / implied < 0.05


def test_init_independence():
    d = generate_dataset(PARAMS, 7)
    fp0 = run_amp(d, None, PARAMS.lam)
    rng = np.random.default_rng(8)
    fp1 = run_amp(d, None, PARAMS.lam, beta_init=rng.normal(0, 1, d.p))
    assert np.max(np.abs(fp0.beta_hat - fp1.beta_hat)) < 1e-6


def test_divergence_reported_not_raised():
    p = ModelParams(alpha=0.5, rho=0.5, sigma_xi=0.1, lam=0.05, sigma_eta=2.0, p=200)
    d = generate_dataset(p, 9)
    eta = sample_privacy_noise(p, 10)
    fp = run_amp(d, eta, p.lam, AmpOptions(max_iter=2000))
    assert not fp.converged


def test_output_perturbation_is_exact_addition():
    d = generate_dataset(PARAMS, 11)
    fp = run_amp(d, None, PARAMS.lam)
    eta = sample_privacy_noise(PARAMS, 12)
    pert = apply_output_perturbation(fp, eta)
    assert np.array_equal(pert, fp.beta_hat + eta.eta)
    E_gen, E_train = perturbed_errors(fp, d, eta)
    assert E_gen > fp.E_gen_estimate  # noise can only hurt on average at this size
    assert E_train > 0


def test_pairwise_sensitivity_positive_and_finite():
    d = generate_dataset(PARAMS, 13)
    dm = make_one_point_mutant(d, 0, 13)
    s = pairwise_sensitivity(d, dm, PARAMS.lam)
    assert np.isfinite(s) and s > 0
    # identical datasets have (numerically) zero sensitivity
    assert pairwise_sensitivity(d, d, PARAMS.lam) < 1e-12


def test_error_metrics_match_definitions():
    d = generate_dataset(PARAMS, 14)
    fp = run_amp(d, None, PARAMS.lam)
    resid = d.y - d.X @ fp.beta_hat
    assert abs(fp.E_train - resid @ resid / d.n) < 1e-12
    assert abs(fp.E_per_component - np.mean((fp.beta_hat - d.beta0) ** 2)) < 1e-12
    assert abs(fp.E_gen_estimate - fp.E_per_component - d.sigma_xi**2) < 1e-12
