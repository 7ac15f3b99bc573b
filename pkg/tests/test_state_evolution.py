import numpy as np
import pytest

from privlasso import (
    ModelParams,
    output_perturbation_asymptotics,
    replica_fixed_point,
    se_fixed_point,
    se_rho_hat,
    se_update,
)
from privlasso.state_evolution import (
    SeOptions,
    SeState,
    channel_active,
    channel_first_moment,
    channel_mse,
    gauss_hermite_standard,
    se_update_quadrature,
)

PARAMS = ModelParams(alpha=0.5, rho=0.1, sigma_xi=0.1, lam=1.0, sigma_eta=0.1)


def random_params(k, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(k):
        out.append(
            ModelParams(
                alpha=rng.uniform(0.3, 2.0),
                rho=rng.uniform(0.05, 0.6),
                sigma_xi=rng.uniform(0.01, 0.5),
                lam=rng.uniform(0.3, 2.5),
                sigma_eta=rng.uniform(0.0, 0.4),
            )
        )
    return out


# --- scalar channel moments ----------------------------------------------


def test_channel_moments_against_monte_carlo():
    rng = np.random.default_rng(0)
    g = rng.standard_normal(2_000_000)
    b, m0, s, thr = 0.7, 0.7, 0.9, 1.1
    x = m0 + s * g
    est = np.where(np.abs(x) > thr, x - np.sign(x) * thr, 0.0)
    assert channel_mse(b, m0, s, thr) == pytest.approx(np.mean((est - b) ** 2), rel=5e-3)
    assert channel_active(m0, s, thr) == pytest.approx(np.mean(est != 0.0), rel=5e-3)
    assert channel_first_moment(m0, s, thr) == pytest.approx(np.mean(est), rel=5e-3)


def test_gauss_hermite_moments():
    g, w = gauss_hermite_standard(61)
    assert np.sum(w) == pytest.approx(1.0, abs=1e-12)
    assert np.sum(w * g**2) == pytest.approx(1.0, abs=1e-10)
    assert np.sum(w * g**4) == pytest.approx(3.0, abs=1e-8)


# --- fixed point ----------------------------------------------------------


def test_huge_lam_limit():
    # lam -> inf: estimator identically zero, E_gen = rho sigma_beta^2 + sigma_xi^2
    fp = se_fixed_point(PARAMS.with_(lam=500.0))
    assert fp.converged
    assert fp.rho_hat == pytest.approx(0.0, abs=1e-12)
    assert fp.E_gen == pytest.approx(
        PARAMS.rho * PARAMS.sigma_beta**2 + PARAMS.sigma_xi**2, abs=1e-9
    )


def test_sparsity_identity_by_construction():
    # V (alpha - rho_hat) = rho_hat at the fixed point
    for params in random_params(30, 1):
        fp = se_fixed_point(params)
        if not (fp.converged and fp.stable):
            continue
        assert abs(fp.V * (params.alpha - fp.rho_hat) - fp.rho_hat) < 1e-8


def test_error_ratio_identity():
    for params in random_params(20, 2):
        fp = se_fixed_point(params)
        if not (fp.converged and fp.stable):
            continue
        assert fp.E_gen / fp.E_train == pytest.approx((1 + fp.V) ** 2, rel=1e-9)


def test_dual_path_updates_agree():
    # fast path collapses the Gaussian tilt into the field variance; the
    # validation path integrates over the tilt explicitly
    rng = np.random.default_rng(3)
    for params in random_params(100, 4):
        state = SeState(E=rng.uniform(0.01, 1.0), V=rng.uniform(0.0, 3.0))
        fast = se_update(state, params)
        slow = se_update_quadrature(state, params, adaptive_eta=True)
        assert fast.E == pytest.approx(slow.E, rel=1e-8, abs=1e-12)
        assert fast.V == pytest.approx(slow.V, rel=1e-8, abs=1e-12)


def test_rho_hat_bounds_and_densification():
    fp_small = se_fixed_point(PARAMS.with_(sigma_eta=0.0, lam=0.5))
    fp_big = se_fixed_point(PARAMS.with_(sigma_eta=0.5, lam=0.5))
    assert 0 < fp_small.rho_hat < 1
    # more privacy noise makes the estimator denser at small lam
    assert fp_big.rho_hat > fp_small.rho_hat


def test_gen_error_dip():
    # a finite tilt noise can lower the generalization error at lam = 1.5
    base = se_fixed_point(PARAMS.with_(lam=1.5, sigma_eta=0.0)).E_gen
    dipped = min(
        se_fixed_point(PARAMS.with_(lam=1.5, sigma_eta=s)).E_gen
        for s in np.linspace(0.05, 0.6, 12)
    )
    assert dipped < base


def test_instability_flagged():
    p = ModelParams(alpha=0.5, rho=0.5, sigma_xi=0.1, lam=0.05, sigma_eta=2.0)
    fp = se_fixed_point(p)
    assert not fp.stable
    assert fp.stability_margin > 1


def test_output_perturbation_shift():
    fp0 = se_fixed_point(PARAMS.with_(sigma_eta=0.0))
    E_gen, E_train = output_perturbation_asymptotics(fp0, 0.3)
    assert E_gen == pytest.approx(fp0.E_gen + 0.09, abs=1e-14)
    assert E_train == pytest.approx(fp0.E_train + 0.09, abs=1e-14)


def test_rho_hat_helper_matches_fixed_point():
    fp = se_fixed_point(PARAMS)
    state = SeState(E=fp.E, V=fp.V)
    assert se_rho_hat(state, PARAMS) == pytest.approx(fp.rho_hat, rel=1e-9)


# --- replica --------------------------------------------------------------


def test_replica_matches_state_evolution():
    for params in random_params(10, 5):
        fp = se_fixed_point(params)
        if not (fp.converged and fp.stable):
            continue
        rp = replica_fixed_point(params)
        if not rp.converged:
            continue
        E_replica = rp.Q - 2 * rp.m + params.rho * params.sigma_beta**2 + params.sigma_xi**2
        assert rp.chi == pytest.approx(fp.V, rel=1e-6, abs=1e-9)
        assert E_replica == pytest.approx(fp.E, rel=1e-6, abs=1e-9)


def test_se_options_tolerance_respected():
    fp_loose = se_fixed_point(PARAMS, SeOptions(tol=1e-4))
    fp_tight = se_fixed_point(PARAMS, SeOptions(tol=1e-12))
    assert fp_loose.iterations <= fp_tight.iterations
    assert fp_tight.E == pytest.approx(fp_loose.E, rel=1e-3)
