"""Typical-case privacy metrics for output and objective perturbation.

The component-wise on-average KL divergence is computed analytically
(closed forms built on the active-probability kernels) and numerically
(direct quadrature of the KL between the two coupled scalar channels whose
fields share a common component and differ by an O(1/sqrt(n)) refresh).
Also provides the Gaussian reference scale, trade-off curves over the noise
strength, and optimal-noise selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import erfcx

from .model import Mechanism, ModelParams
from .scalar_kernel import _atom_weight, _r_hat, _r_hat_derivs, kl_divergence_same_sigma
from .state_evolution import SeFixedPoint, SeOptions, gauss_hermite_standard, se_fixed_point

_SQRT2PI = math.sqrt(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TradeoffPoint:
    sigma_eta: float
    E_gen: float
    cwonavekl: float
    distance_to_origin: float
    stable: bool


@dataclass(frozen=True)
class PrivacyReport:
    mechanism: Mechanism
    sigma_eta: float
    cwonavekl_analytic: float
    cwonavekl_numeric: Optional[float]
    R_factor: Optional[float]
    E_gen: float
    se: SeFixedPoint
    clamp_warnings: int = 0


def cwonavekl_output(E0: float, rho_hat0: float, alpha: float, sigma_eta: float) -> float:
    """p-summed KL rate for output perturbation: E0 * rho_hat0 / (alpha^2 sigma_eta^2)."""
    if sigma_eta <= 0:
        return float("inf")
    return E0 * rho_hat0 / (alpha**2 * sigma_eta**2)


def delta_coupling(se: SeFixedPoint, n: int) -> tuple[float, float]:
    """(Delta, sigma_z_without_Delta) for the one-point-mutant coupling."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    alpha = se.E / se.sigma_z**2  # E / sigma_z^2 = alpha by construction
    delta = se.E / (alpha * n)
    if delta > se.sigma_z**2:
        raise ValueError("coupling variance exceeds the field variance")
    return delta, float(np.sqrt(se.sigma_z**2 - delta))


def _d1sq_over_atom_saturated(m, Sigma, lam, sigma_eta):
    """(d r_hat/d m)^2 / (1 - r_hat) for |m| >> lam*Sigma, where both the
    numerator and the atom are Gaussian-tail small; erfcx keeps the ratio
    exact instead of 0/0."""
    w = Sigma * sigma_eta
    t1 = (abs(m) - lam * Sigma) / (w * _SQRT2)  # nearer tail
    t2 = (abs(m) + lam * Sigma) / (w * _SQRT2)  # farther tail
    if t1 > 26.0:
        return 0.0  # exp(-t1^2) underflows; the field density there is 0 too
    ratio_tail = math.exp(t1 * t1 - t2 * t2)
    denom = math.pi * w * w * (erfcx(t1) - erfcx(t2) * ratio_tail)
    return math.exp(-t1 * t1) * (1.0 - ratio_tail) ** 2 / denom


def _r_integrand(m, Sigma, lam, sigma_eta):
    r = _r_hat(m, Sigma, lam, sigma_eta)
    atom = _atom_weight(m, Sigma, lam, sigma_eta)
    d1, d2 = _r_hat_derivs(m, Sigma, lam, sigma_eta)
    if atom > 1e-8:
        head = d1 * d1 / atom
    else:
        head = _d1sq_over_atom_saturated(m, Sigma, lam, sigma_eta)
    return head + d2 + r / (Sigma * sigma_eta) ** 2


def r_factor(se: SeFixedPoint, params: ModelParams) -> tuple[float, int]:
    """Support-stability factor R of the objective-perturbation KL rate.

    Adaptive quadrature of the closed-form integrand against the Gaussian
    field density, per signal branch.  Returns (R, clamp_warning_count).
    """
    if params.sigma_eta <= 0:
        raise ValueError("r_factor requires sigma_eta > 0")
    Sigma, lam, s_eta = se.Sigma, params.lam, params.sigma_eta
    warnings = 0

    def branch(var: float) -> float:
        nonlocal warnings
        sd = math.sqrt(var)

        def f(m):
            nonlocal warnings
            dens = math.exp(-0.5 * (m / sd) ** 2) / (_SQRT2PI * sd)
            val = dens * _r_integrand(m, Sigma, lam, s_eta)
            if not math.isfinite(val):
                warnings += 1
                return 0.0
            return val

        lim = 9.0 * sd + lam * Sigma + 9.0 * Sigma * s_eta
        val, _ = quad(
            f, -lim, lim, points=[-lam * Sigma, 0.0, lam * Sigma], limit=400, epsabs=1e-12
        )
        return val

    sz2 = se.sigma_z**2
    R = s_eta**2 * (
        (1.0 - params.rho) * branch(sz2) + params.rho * branch(sz2 + params.sigma_beta**2)
    )
    return float(R), warnings


def cwonavekl_objective(se: SeFixedPoint, R: float, alpha: float, sigma_eta: float) -> float:
    """p-summed KL rate for objective perturbation: E * R / (alpha^2 sigma_eta^2)."""
    if sigma_eta <= 0:
        return float("inf")
    return se.E * R / (alpha**2 * sigma_eta**2)


def cwonavekl_numeric(
    se: SeFixedPoint,
    params: ModelParams,
    n: int,
    nodes_z: int = 61,
    nodes_refresh: int = 25,
    nodes_signal: int = 21,
) -> float:
    """Direct quadrature of the pre-expansion KL between coupled channels.

    Fields m1 = b + s z + sqrt(Delta) zeta and m2 = b + s z + sqrt(Delta) zeta'
    with s = sigma_z_without_Delta; the KL between the induced channel
    distributions is closed-form, so only smooth Gaussian expectations remain.
    Returns the p-summed value with p = n / alpha.
    """
    if params.sigma_eta <= 0:
        raise ValueError("cwonavekl_numeric requires sigma_eta > 0")
    delta, s_res = delta_coupling(se, n)
    sq_delta = math.sqrt(delta)
    z, wz = gauss_hermite_standard(nodes_z)
    u, wu = gauss_hermite_standard(nodes_refresh)
    gb, wb = gauss_hermite_standard(nodes_signal)

    base = s_res * z  # (nz,)
    zeta = sq_delta * u  # (nu,)

    def branch(b_vals: np.ndarray, b_weights: np.ndarray) -> float:
        m_base = b_vals[:, None] + base[None, :]  # (nb, nz)
        m1 = m_base[..., None, None] + zeta[None, None, :, None]
        m2 = m_base[..., None, None] + zeta[None, None, None, :]
        kl = kl_divergence_same_sigma(m1, m2, se.Sigma, params.lam, params.sigma_eta)
        kl_z = np.einsum("bzuv,u,v->bz", kl, wu, wu)
        return float(b_weights @ kl_z @ wz)

    zero = branch(np.array([0.0]), np.array([1.0]))
    sig = branch(params.sigma_beta * gb, wb)
    per_component = (1.0 - params.rho) * zero + params.rho * sig
    p_eff = n / params.alpha
    return p_eff * per_component


def gaussian_reference_mu(p: int, epsilon: float) -> float:
    """Component-wise Gaussian mean shift matching a p-summed divergence."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    return math.sqrt(2.0 * epsilon / p)


def privacy_report(
    params: ModelParams,
    se_opts: SeOptions = SeOptions(),
    n_numeric: Optional[int] = None,
) -> PrivacyReport:
    """Analytic (and optionally numeric) cwOnAveKL at one parameter point."""
    if params.mechanism is Mechanism.OUTPUT:
        fp0 = se_fixed_point(params.with_(sigma_eta=0.0), se_opts)
        kl = cwonavekl_output(fp0.E, fp0.rho_hat, params.alpha, params.sigma_eta)
        E_gen = fp0.E_gen + params.sigma_eta**2
        return PrivacyReport(
            mechanism=params.mechanism,
            sigma_eta=params.sigma_eta,
            cwonavekl_analytic=kl,
            cwonavekl_numeric=None,
            R_factor=None,
            E_gen=E_gen,
            se=fp0,
        )
    fp = se_fixed_point(params, se_opts)
    R, warnings = r_factor(fp, params)
    kl = cwonavekl_objective(fp, R, params.alpha, params.sigma_eta)
    kl_num = cwonavekl_numeric(fp, params, n_numeric) if n_numeric else None
    return PrivacyReport(
        mechanism=params.mechanism,
        sigma_eta=params.sigma_eta,
        cwonavekl_analytic=kl,
        cwonavekl_numeric=kl_num,
        R_factor=R,
        E_gen=fp.E_gen,
        se=fp,
        clamp_warnings=warnings,
    )


def tradeoff_curve(
    params: ModelParams,
    sigma_eta_grid: np.ndarray,
    se_opts: SeOptions = SeOptions(),
) -> list[TradeoffPoint]:
    """Accuracy-privacy curve parameterized by the noise strength."""
    grid = np.asarray(sigma_eta_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("sigma_eta grid must be strictly increasing and positive")
    points = []
    if params.mechanism is Mechanism.OUTPUT:
        fp0 = se_fixed_point(params.with_(sigma_eta=0.0), se_opts)
        for s in grid:
            E_gen = fp0.E_gen + s * s
            kl = cwonavekl_output(fp0.E, fp0.rho_hat, params.alpha, s)
            points.append(
                TradeoffPoint(
                    sigma_eta=float(s),
                    E_gen=E_gen,
                    cwonavekl=kl,
                    distance_to_origin=math.hypot(E_gen, kl),
                    stable=fp0.stable,
                )
            )
        return points
    for s in grid:
        pt_params = params.with_(sigma_eta=float(s))
        fp = se_fixed_point(pt_params, se_opts)
        if fp.stable:
            R, _ = r_factor(fp, pt_params)
            kl = cwonavekl_objective(fp, R, params.alpha, s)
        else:
            kl = float("inf")
        points.append(
            TradeoffPoint(
                sigma_eta=float(s),
                E_gen=fp.E_gen,
                cwonavekl=kl,
                distance_to_origin=math.hypot(fp.E_gen, kl),
                stable=fp.stable,
            )
        )
    return points


def optimal_noise(curve: list[TradeoffPoint]) -> Optional[TradeoffPoint]:
    """Stable point closest to the origin; ties break toward smaller noise.

    Returns None when the curve has no stable point.
    """
    stable = [pt for pt in curve if pt.stable and np.isfinite(pt.distance_to_origin)]
    if not stable:
        return None
    best = stable[0]
    for pt in stable[1:]:
        if pt.distance_to_origin < best.distance_to_origin:
            best = pt
    return best
