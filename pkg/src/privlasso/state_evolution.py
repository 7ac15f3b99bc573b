"""Scalar state evolution and replica fixed points.

The recursion tracks E (per-component MSE plus observation-noise variance)
and V (rescaled local variance).  With Gaussian tilt noise the pair
(z, eta) collapses into a single Gaussian field of variance
sigma_z^2 + Sigma^2 sigma_eta^2 (fast path); a tensor-quadrature path over
eta is kept for validation.  The Bernoulli-Gaussian signal is handled as an
exact two-branch mixture; expectations over the nonzero branch use 61-node
Gauss-Hermite quadrature, while everything downstream of the threshold
indicator is reduced to closed erfc/Gaussian forms so no kink ever meets a
quadrature rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfc

from .model import ModelParams

_SQRT2 = np.sqrt(2.0)
_SQRT2PI = np.sqrt(2.0 * np.pi)


@lru_cache(maxsize=8)
def gauss_hermite_standard(n: int = 61) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for E[f(g)], g ~ N(0,1)."""
    x, w = np.polynomial.hermite.hermgauss(n)
    return x * _SQRT2, w / np.sqrt(np.pi)


def _Q(a):
    return 0.5 * erfc(a / _SQRT2)


def _phi(a):
    return np.exp(-0.5 * a * a) / _SQRT2PI


def channel_active(m0, s, thr):
    """P(|m0 + s g| > thr) for g ~ N(0,1)."""
    return _Q((thr - m0) / s) + _Q((thr + m0) / s)


def channel_mse(b, m0, s, thr):
    """E[(b - S(m0 + s g; thr))^2], S the soft threshold, g ~ N(0,1)."""
    ap = (thr - m0) / s
    am = (-thr - m0) / s
    cp = b - m0 + thr
    cm = b - m0 - thr
    Qp = _Q(ap)
    Pm = _Q(-am)
    php = _phi(ap)
    phm = _phi(am)
    upper = cp * cp * Qp - 2.0 * cp * s * php + s * s * (Qp + ap * php)
    lower = cm * cm * Pm + 2.0 * cm * s * phm + s * s * (Pm - am * phm)
    middle = b * b * np.clip(1.0 - Qp - Pm, 0.0, 1.0)
    return upper + lower + middle


def channel_first_moment(m0, s, thr):
    """E[S(m0 + s g; thr)] for g ~ N(0,1)."""
    ap = (thr - m0) / s
    am = (-thr - m0) / s
    return (
        (m0 - thr) * _Q(ap)
        + s * _phi(ap)
        + (m0 + thr) * _Q(-am)
        - s * _phi(am)
    )


@dataclass(frozen=True)
class SeOptions:
    damping: float = 0.5
    tol: float = 1e-10
    max_iter: int = 10_000
    v_cap: float = 1e8
    gh_nodes: int = 61


@dataclass(frozen=True)
class SeState:
    E: float
    V: float

    def sigma(self, alpha: float) -> float:
        return (1.0 + self.V) / alpha

    def sigma_z(self, alpha: float) -> float:
        return float(np.sqrt(self.E / alpha))


@dataclass(frozen=True)
class SeFixedPoint:
    E: float
    V: float
    Sigma: float
    sigma_z: float
    rho_hat: float
    E_gen: float
    E_train: float
    stability_margin: float
    stable: bool
    iterations: int
    converged: bool


@dataclass(frozen=True)
class ReplicaFixedPoint:
    Q: float
    chi: float
    m: float
    Theta_hat: float
    chi_hat: float
    mu_hat: float
    iterations: int
    converged: bool


def _effective_field_std(state: SeState, params: ModelParams) -> float:
    Sigma = state.sigma(params.alpha)
    sz2 = state.E / params.alpha
    return float(np.sqrt(sz2 + (Sigma * params.sigma_eta) ** 2))


def se_rho_hat(state: SeState, params: ModelParams) -> float:
    """Asymptotic active fraction, closed form per signal branch."""
    Sigma = state.sigma(params.alpha)
    thr = params.lam * Sigma
    s = _effective_field_std(state, params)
    zero = erfc(thr / (_SQRT2 * s))
    sig = erfc(thr / (_SQRT2 * np.sqrt(params.sigma_beta**2 + s * s)))
    return float((1.0 - params.rho) * zero + params.rho * sig)


def se_update(state: SeState, params: ModelParams, opts: SeOptions = SeOptions()) -> SeState:
    """One application of the (E, V) map, Gaussian noise collapsed analytically."""
    Sigma = state.sigma(params.alpha)
    thr = params.lam * Sigma
    s = _effective_field_std(state, params)
    g, w = gauss_hermite_standard(opts.gh_nodes)
    b = params.sigma_beta * g
    e_zero = channel_mse(0.0, 0.0, s, thr)
    e_sig = float(w @ channel_mse(b, b, s, thr))
    E_new = (1.0 - params.rho) * e_zero + params.rho * e_sig + params.sigma_xi**2
    V_new = Sigma * se_rho_hat(state, params)
    if not (np.isfinite(E_new) and np.isfinite(V_new)):
        raise FloatingPointError("state-evolution update produced non-finite values")
    return SeState(E=float(E_new), V=float(V_new))


def se_update_quadrature(
    state: SeState,
    params: ModelParams,
    opts: SeOptions = SeOptions(),
    adaptive_eta: bool = False,
) -> SeState:
    """Validation path: explicit quadrature over eta instead of the collapse.

    Gauss-Hermite in eta converges slowly when the channel transition is much
    narrower than the tilt scale (sigma_z << Sigma * sigma_eta); pass
    adaptive_eta=True to integrate eta adaptively instead.
    """
    Sigma = state.sigma(params.alpha)
    thr = params.lam * Sigma
    sz = state.sigma_z(params.alpha)
    g, w = gauss_hermite_standard(opts.gh_nodes)
    b = params.sigma_beta * g
    if params.sigma_eta == 0.0:
        eta_nodes, eta_w = np.array([0.0]), np.array([1.0])
        adaptive_eta = False
    else:
        eta_nodes, eta_w = params.sigma_eta * g, w
    if adaptive_eta:
        from scipy.integrate import quad_vec

        se = params.sigma_eta
        means = np.concatenate(([0.0], b))  # zero-signal node plus signal grid

        def integrand(eta):
            m0 = means - eta * Sigma
            dens = np.exp(-0.5 * (eta / se) ** 2) / (np.sqrt(2 * np.pi) * se)
            return dens * np.concatenate(
                [channel_mse(means, m0, sz, thr), np.atleast_1d(channel_active(m0[0], sz, thr))]
            )

        vals = quad_vec(integrand, -9 * se, 9 * se, epsabs=1e-14, epsrel=1e-12)[0]
        k = means.size
        e_zero, e_sig_nodes = vals[0], vals[1:k]
        r_zero = vals[k]
        e_sig = float(w @ e_sig_nodes)
        # signal-active probability: the Gaussian prior over b folds into the
        # field std exactly, mirroring the fast path
        s_sig = float(np.hypot(params.sigma_beta, sz))

        def r_sig_integrand(eta):
            dens = np.exp(-0.5 * (eta / se) ** 2) / (np.sqrt(2 * np.pi) * se)
            return dens * channel_active(-eta * Sigma, s_sig, thr)

        r_sig = quad_vec(r_sig_integrand, -9 * se, 9 * se, epsabs=1e-14, epsrel=1e-12)[0]
    else:
        shift = -eta_nodes * Sigma  # field mean contribution of the tilt
        e_zero = float(eta_w @ channel_mse(0.0, shift, sz, thr))
        r_zero = float(eta_w @ channel_active(shift, sz, thr))
        mse_grid = channel_mse(b[:, None], b[:, None] + shift[None, :], sz, thr)
        act_grid = channel_active(b[:, None] + shift[None, :], sz, thr)
        e_sig = float(w @ mse_grid @ eta_w)
        r_sig = float(w @ act_grid @ eta_w)
    E_new = (1.0 - params.rho) * e_zero + params.rho * e_sig + params.sigma_xi**2
    rho_hat = (1.0 - params.rho) * r_zero + params.rho * r_sig
    return SeState(E=float(E_new), V=float(Sigma * rho_hat))


def se_fixed_point(params: ModelParams, opts: SeOptions = SeOptions()) -> SeFixedPoint:
    """Damped iteration of the (E, V) map from the fully-shrunk start."""
    params.validate()
    state = SeState(E=params.rho * params.sigma_beta**2 + params.sigma_xi**2, V=0.0)
    converged = False
    it = 0
    capped = False
    for it in range(1, opts.max_iter + 1):
        new = se_update(state, params, opts)
        V_next = min(new.V, opts.v_cap)
        capped = capped or (new.V >= opts.v_cap)
        E_d = (1.0 - opts.damping) * new.E + opts.damping * state.E
        V_d = (1.0 - opts.damping) * V_next + opts.damping * state.V
        gap = abs(E_d - state.E) + abs(V_d - state.V)
        state = SeState(E=E_d, V=V_d)
        if gap < opts.tol and not capped:
            converged = True
            break
        if capped:
            break
    rho_hat = se_rho_hat(state, params)
    margin = rho_hat / params.alpha
    stable = (margin < 1.0) and not capped
    Sigma = state.sigma(params.alpha)
    return SeFixedPoint(
        E=state.E,
        V=state.V,
        Sigma=Sigma,
        sigma_z=state.sigma_z(params.alpha),
        rho_hat=rho_hat,
        E_gen=state.E,
        E_train=state.E / (1.0 + state.V) ** 2,
        stability_margin=margin,
        stable=stable and converged,
        iterations=it,
        converged=converged,
    )


def output_perturbation_asymptotics(fp0: SeFixedPoint, sigma_eta: float) -> tuple[float, float]:
    """(E_gen, E_train) after adding output noise to the noiseless estimator."""
    shift = sigma_eta**2
    return fp0.E_gen + shift, fp0.E_train + shift


def replica_fixed_point(params: ModelParams, opts: SeOptions = SeOptions()) -> ReplicaFixedPoint:
    """Solve the replica-symmetric (Q, chi, m) system with its conjugates."""
    params.validate()
    sb2 = params.sigma_beta**2
    base_err = params.rho * sb2 + params.sigma_xi**2
    Q, chi, m = 0.0, 0.0, 0.0
    g, w = gauss_hermite_standard(opts.gh_nodes)
    b = params.sigma_beta * g
    converged = False
    it = 0
    for it in range(1, opts.max_iter + 1):
        Theta_hat = params.alpha / (1.0 + chi)
        chi_hat = params.alpha * (Q - 2.0 * m + base_err) / (1.0 + chi) ** 2
        mu_hat = Theta_hat
        t = np.sqrt(chi_hat + params.sigma_eta**2)
        sm2_zero = channel_mse(0.0, 0.0, t, params.lam)
        sm2_sig = float(w @ channel_mse(0.0, mu_hat * b, t, params.lam))
        Q_new = ((1.0 - params.rho) * sm2_zero + params.rho * sm2_sig) / Theta_hat**2
        m_new = params.rho * float(
            w @ (b * channel_first_moment(mu_hat * b, t, params.lam))
        ) / Theta_hat
        r_zero = erfc(params.lam / (_SQRT2 * t))
        r_sig = erfc(params.lam / (_SQRT2 * np.sqrt(mu_hat**2 * sb2 + t * t)))
        rho_hat = (1.0 - params.rho) * r_zero + params.rho * r_sig
        chi_new = min(rho_hat / Theta_hat, opts.v_cap)

        gap = abs(Q_new - Q) + abs(chi_new - chi) + abs(m_new - m)
        Q = (1.0 - opts.damping) * Q_new + opts.damping * Q
        chi = (1.0 - opts.damping) * chi_new + opts.damping * chi
        m = (1.0 - opts.damping) * m_new + opts.damping * m
        if gap < opts.tol:
            converged = True
            break
    Theta_hat = params.alpha / (1.0 + chi)
    chi_hat = params.alpha * (Q - 2.0 * m + base_err) / (1.0 + chi) ** 2
    return ReplicaFixedPoint(
        Q=Q,
        chi=chi,
        m=m,
        Theta_hat=Theta_hat,
        chi_hat=chi_hat,
        mu_hat=Theta_hat,
        iterations=it,
        converged=converged,
    )
