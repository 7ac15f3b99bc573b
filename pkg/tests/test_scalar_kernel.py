import numpy as np
import pytest
from scipy.integrate import quad

from privlasso import (
    active_probability,
    active_probability_derivs,
    kl_divergence,
    local_variance,
    se_cross_entropy,
    se_density,
    soft_threshold,
)
from privlasso.scalar_kernel import ScalarChannel, kl_divergence_same_sigma


def random_channels(k, seed, sigma_eta_lo=0.05):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(k):
        out.append(
            ScalarChannel(
                Sigma=rng.uniform(0.5, 5.0),
                lam=rng.uniform(0.1, 2.0),
                sigma_eta=rng.uniform(sigma_eta_lo, 1.0),
                m_hat=rng.normal(0, 2.0),
            )
        )
    return out


# --- soft threshold / local variance -------------------------------------


def test_soft_threshold_basics():
    assert soft_threshold(2.0, 5.0, 1.0) == 3.0
    assert soft_threshold(2.0, -5.0, 1.0) == -3.0
    assert soft_threshold(2.0, 1.5, 1.0) == 0.0
    assert soft_threshold(2.0, -2.0, 1.0) == 0.0  # boundary maps to zero
    h = np.array([-3.0, -0.5, 0.0, 0.5, 3.0])
    np.testing.assert_allclose(soft_threshold(1.0, h, 1.0), [-2.0, 0.0, 0.0, 0.0, 2.0])


def test_local_variance_is_indicator_times_sigma():
    h = np.array([-3.0, -0.5, 0.5, 3.0])
    np.testing.assert_allclose(local_variance(1.5, h, 1.0), [1.5, 0.0, 0.0, 1.5])


def test_soft_threshold_nonexpansive():
    rng = np.random.default_rng(0)
    h1, h2 = rng.normal(0, 3, 1000), rng.normal(0, 3, 1000)
    assert np.all(
        np.abs(soft_threshold(2.0, h1, 0.7) - soft_threshold(2.0, h2, 0.7)) <= np.abs(h1 - h2) + 1e-14
    )


# --- active probability and derivatives ----------------------------------


def test_active_probability_limits():
    # huge field -> surely active; zero noise scale forbidden
    assert active_probability(ScalarChannel(1.0, 1.0, 0.1, 50.0)) == pytest.approx(1.0)
    assert active_probability(ScalarChannel(1.0, 1.0, 0.1, 0.0)) < 1.0
    with pytest.raises(ValueError):
        active_probability(ScalarChannel(1.0, 1.0, 0.0, 1.0))


def test_active_probability_monte_carlo():
    ch = ScalarChannel(Sigma=2.0, lam=0.5, sigma_eta=0.3, m_hat=0.8)
    rng = np.random.default_rng(1)
    eta = rng.normal(0, ch.sigma_eta, 400_000)
    emp = np.mean(np.abs(ch.m_hat - eta * ch.Sigma) > ch.lam * ch.Sigma)
    assert active_probability(ch) == pytest.approx(emp, abs=3e-3)


def test_derivatives_match_finite_differences():
    # oracle: Richardson-extrapolated central differences in m_hat, step
    # scaled by the channel's noise width so the stencil resolves the erfc
    def r_at(ch, m):
        return active_probability(ScalarChannel(ch.Sigma, ch.lam, ch.sigma_eta, m))

    checked = 0
    for ch in random_channels(1000, 2):
        d1, d2 = active_probability_derivs(ch)
        w = ch.Sigma * ch.sigma_eta
        if abs(d1) * w < 1e-8 and abs(d2) * w * w < 1e-8:
            continue  # flat tail: nothing to resolve
        m = ch.m_hat

        def fd_pair(h):
            rp, rm = r_at(ch, m + h), r_at(ch, m - h)
            r0 = r_at(ch, m)
            return (rp - rm) / (2 * h), (rp - 2 * r0 + rm) / h**2

        h = 1e-2 * w
        g1, g2 = fd_pair(h)
        f1, f2 = fd_pair(h / 2)
        fd1 = (4 * f1 - g1) / 3
        fd2 = (4 * f2 - g2) / 3
        # the 1e-10 floors are the oracle's own roundoff limit at this step
        assert abs(d1 - fd1) <= 1e-6 * max(abs(fd1), abs(fd2) * w) + 1e-10 / w
        assert abs(d2 - fd2) <= 2e-6 * max(abs(fd2), abs(fd1) / w) + 1e-10 / w**2
        checked += 1
    assert checked > 500


# --- density --------------------------------------------------------------


def test_density_normalizes():
    for ch in random_channels(50, 3):
        atom = se_density(ch, np.array([0.0]))[1]
        mass = quad(
            lambda b: se_density(ch, np.array([b]))[0][0],
            -40,
            -1e-12,
            points=[-5, -1, -0.1],
            limit=200,
        )[0]
        mass += quad(
            lambda b: se_density(ch, np.array([b]))[0][0],
            1e-12,
            40,
            points=[0.1, 1, 5],
            limit=200,
        )[0]
        assert abs(mass + atom - 1.0) < 1e-8


def test_density_atom_equals_one_minus_rhat():
    for ch in random_channels(200, 4):
        _, atom = se_density(ch, np.array([0.0]))
        assert atom == pytest.approx(1.0 - active_probability(ch), abs=1e-12)


def test_degenerate_noise_density():
    # sigma_eta = 0: all mass at the soft-thresholded location
    ch = ScalarChannel(Sigma=2.0, lam=0.5, sigma_eta=0.0, m_hat=3.0)
    dens, atom = se_density(ch, np.array([0.0, 2.0]))
    assert atom == 0.0
    ch0 = ScalarChannel(Sigma=2.0, lam=0.5, sigma_eta=0.0, m_hat=0.5)
    _, atom0 = se_density(ch0, np.array([0.0]))
    assert atom0 == 1.0


# --- KL -------------------------------------------------------------------


def test_kl_nonnegative_and_zero_on_identical():
    channels = random_channels(10_000, 5)
    for ch in channels[:100]:
        assert kl_divergence(ch, ch) == pytest.approx(0.0, abs=1e-10)
    rng = np.random.default_rng(6)
    for ch in channels:
        ch2 = ScalarChannel(ch.Sigma, ch.lam, ch.sigma_eta, ch.m_hat + rng.normal(0, 0.5))
        assert kl_divergence(ch, ch2) >= -1e-12


def test_kl_requires_shared_lam_and_noise():
    a = ScalarChannel(1.0, 1.0, 0.3, 0.5)
    with pytest.raises(ValueError):
        kl_divergence(a, ScalarChannel(1.0, 2.0, 0.3, 0.5))
    with pytest.raises(ValueError):
        kl_divergence(a, ScalarChannel(1.0, 1.0, 0.4, 0.5))


def test_kl_against_direct_quadrature():
    # oracle: numerically integrate p1 log(p1/p2) plus the atom term
    rng = np.random.default_rng(7)
    for ch1 in random_channels(20, 8, sigma_eta_lo=0.2):
        ch2 = ScalarChannel(ch1.Sigma, ch1.lam, ch1.sigma_eta, ch1.m_hat + rng.normal(0, 0.3))
        analytic = kl_divergence(ch1, ch2)

        def integrand(b):
            p1 = se_density(ch1, np.array([b]))[0][0]
            p2 = se_density(ch2, np.array([b]))[0][0]
            if p1 <= 0:
                return 0.0
            return p1 * np.log(p1 / p2)

        # integrate only where both densities are far from underflow: the
        # two sign branches are Gaussians of width w around m_hat -+ lam*Sigma
        w = ch1.Sigma * ch1.sigma_eta
        thr = ch1.lam * ch1.Sigma
        hi = max(ch1.m_hat, ch2.m_hat) - thr + 12 * w
        lo = min(ch1.m_hat, ch2.m_hat) + thr - 12 * w
        val = 0.0
        if lo < 0:
            val += quad(integrand, lo, -1e-14, limit=400)[0]
        if hi > 0:
            val += quad(integrand, 1e-14, hi, limit=400)[0]
        a1 = se_density(ch1, np.array([0.0]))[1]
        a2 = se_density(ch2, np.array([0.0]))[1]
        if a1 > 0:
            val += a1 * np.log(a1 / a2)
        assert abs(analytic - val) / max(abs(val), 1e-8) < 1e-6


def test_same_sigma_kl_matches_scalar_version():
    chans = random_channels(300, 9)
    rng = np.random.default_rng(10)
    for ch in chans[:50]:
        d = rng.normal(0, 0.4)
        ch2 = ScalarChannel(ch.Sigma, ch.lam, ch.sigma_eta, ch.m_hat + d)
        vec = kl_divergence_same_sigma(
            np.array([ch.m_hat]), np.array([ch2.m_hat]), ch.Sigma, ch.lam, ch.sigma_eta
        )[0]
        assert vec == pytest.approx(kl_divergence(ch, ch2), rel=1e-10, abs=1e-13)


def test_cross_entropy_gibbs_inequality():
    # integral(P1 ln P2) is maximized at P2 = P1
    for ch in random_channels(20, 11, sigma_eta_lo=0.3):
        assert se_cross_entropy(ch, ch) >= se_cross_entropy(
            ch, ScalarChannel(ch.Sigma, ch.lam, ch.sigma_eta, ch.m_hat + 0.3)
        )
