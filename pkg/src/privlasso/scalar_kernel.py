"""Scalar-channel kernels for the decoupled private LASSO.

All quantities refer to the effective one-dimensional channel with variance
scale Sigma, l1 strength lam, Gaussian tilt noise of std sigma_eta, and
effective field m_hat.  The estimator along this channel is the soft
threshold; with Gaussian tilt noise its distribution is a point mass at zero
of weight (1 - r_hat) plus a sign-split Gaussian with std Sigma*sigma_eta.

Everything here is a pure, reentrant function; array-valued fields broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc

_SQRT2 = np.sqrt(2.0)
_SQRT2PI = np.sqrt(2.0 * np.pi)

# floor applied to (1 - r_hat) inside logarithms; saturated atoms signal
# distinguishable supports (infinite KL) rather than NaN
ATOM_FLOOR = 1e-300


@dataclass(frozen=True)
class ScalarChannel:
    """Effective scalar channel (Sigma, lam, sigma_eta) at field m_hat."""

    Sigma: float
    lam: float
    sigma_eta: float
    m_hat: float

    def __post_init__(self):
        if not (self.Sigma > 0):
            raise ValueError(f"Sigma must be > 0, got {self.Sigma}")
        if not (self.lam > 0):
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if self.sigma_eta < 0:
            raise ValueError(f"sigma_eta must be >= 0, got {self.sigma_eta}")


def soft_threshold(Sigma, h, lam):
    """(h - sgn(h) * lam * Sigma) where |h| > lam * Sigma, else exactly 0."""
    h = np.asarray(h, dtype=float)
    thr = lam * Sigma
    out = np.where(np.abs(h) > thr, h - np.sign(h) * thr, 0.0)
    return out if out.ndim else float(out)


def local_variance(Sigma, h, lam):
    """Sigma on the active set |h| > lam * Sigma, else 0."""
    h = np.asarray(h, dtype=float)
    out = np.where(np.abs(h) > lam * Sigma, Sigma, 0.0)
    return out if out.ndim else float(out)


def _r_hat(m_hat, Sigma, lam, sigma_eta):
    """Probability over the tilt noise that the estimate is nonzero."""
    w = Sigma * sigma_eta
    a1 = (lam * Sigma - m_hat) / (_SQRT2 * w)
    a2 = (lam * Sigma + m_hat) / (_SQRT2 * w)
    return 0.5 * (erfc(a1) + erfc(a2))


def _atom_weight(m_hat, Sigma, lam, sigma_eta):
    """1 - r_hat, computed without cancellation for saturated channels."""
    w = Sigma * sigma_eta
    a1 = (lam * Sigma - m_hat) / (_SQRT2 * w)
    a2 = (lam * Sigma + m_hat) / (_SQRT2 * w)
    return np.clip(0.5 * (erf(a1) + erf(a2)), 0.0, 1.0)


def _r_hat_derivs(m_hat, Sigma, lam, sigma_eta):
    """First and second partials of r_hat with respect to m_hat."""
    w = Sigma * sigma_eta
    a1 = (lam * Sigma - m_hat) / w
    a2 = (lam * Sigma + m_hat) / w
    phi1 = np.exp(-0.5 * a1 * a1) / _SQRT2PI
    phi2 = np.exp(-0.5 * a2 * a2) / _SQRT2PI
    d1 = (phi1 - phi2) / w
    d2 = (a1 * phi1 + a2 * phi2) / (w * w)
    return d1, d2


def active_probability(ch: ScalarChannel) -> float:
    """r_hat: probability (over the tilt noise) of a nonzero estimate."""
    if ch.sigma_eta == 0:
        raise ValueError("sigma_eta = 0: use the indicator limit instead")
    return float(_r_hat(ch.m_hat, ch.Sigma, ch.lam, ch.sigma_eta))


def active_probability_derivs(ch: ScalarChannel) -> tuple[float, float]:
    """Closed-form (d r_hat / d m_hat, d^2 r_hat / d m_hat^2)."""
    if ch.sigma_eta == 0:
        raise ValueError("sigma_eta = 0: derivatives undefined at the indicator limit")
    d1, d2 = _r_hat_derivs(ch.m_hat, ch.Sigma, ch.lam, ch.sigma_eta)
    return float(d1), float(d2)


def degenerate_location(ch: ScalarChannel) -> float:
    """Point-mass location in the sigma_eta = 0 limit (soft threshold)."""
    return float(soft_threshold(ch.Sigma, ch.m_hat, ch.lam))


def se_density(ch: ScalarChannel, beta) -> tuple[np.ndarray | float, float]:
    """Continuous density at beta plus the atom weight at zero.

    For sigma_eta = 0 the distribution degenerates to a point mass at
    degenerate_location(ch): the continuous part is identically zero and the
    atom weight is 1 when that location is 0, else 0.
    """
    beta = np.asarray(beta, dtype=float)
    if ch.sigma_eta == 0:
        loc = degenerate_location(ch)
        dens = np.zeros_like(beta)
        atom = 1.0 if loc == 0.0 else 0.0
        return (dens if dens.ndim else float(dens)), atom
    w = ch.Sigma * ch.sigma_eta
    shift = np.sign(beta) * ch.lam * ch.Sigma
    dens = np.exp(-0.5 * ((beta - ch.m_hat + shift) / w) ** 2) / (_SQRT2PI * w)
    atom = float(_atom_weight(ch.m_hat, ch.Sigma, ch.lam, ch.sigma_eta))
    return (dens if dens.ndim else float(dens)), atom


def _cross_entropy_terms(m1, m2, Sigma1, Sigma2, lam, sigma_eta):
    """Vectorized cross entropy integral(P1 * ln P2) for two channels.

    Atom term, Gaussian log-normalization term, and the exact cross quadratic
    integral evaluated through truncated-Gaussian moments.
    """
    w1 = Sigma1 * sigma_eta
    w2 = Sigma2 * sigma_eta
    r1 = _r_hat(m1, Sigma1, lam, sigma_eta)
    atom1 = _atom_weight(m1, Sigma1, lam, sigma_eta)
    atom2 = _atom_weight(m2, Sigma2, lam, sigma_eta)

    # positive branch of P1: N(mu1p, w1^2) restricted to beta > 0
    mu1p = m1 - lam * Sigma1
    mu1m = m1 + lam * Sigma1
    mu2p = m2 - lam * Sigma2
    mu2m = m2 + lam * Sigma2

    ap = -mu1p / w1  # lower standardized cut for the positive branch
    am = -mu1m / w1  # upper standardized cut for the negative branch
    phi_ap = np.exp(-0.5 * ap * ap) / _SQRT2PI
    phi_am = np.exp(-0.5 * am * am) / _SQRT2PI
    Qp = 0.5 * erfc(ap / _SQRT2)  # mass of the positive branch
    Pm = 0.5 * erfc(-am / _SQRT2)  # mass of the negative branch

    dp = mu1p - mu2p
    dm = mu1m - mu2m
    # E[(x - c)^2; x > 0], x ~ N(mu1p, w1^2), c = mu2p
    Tp = w1 * w1 * (Qp + ap * phi_ap) + 2.0 * w1 * dp * phi_ap + dp * dp * Qp
    # E[(x - c)^2; x < 0], x ~ N(mu1m, w1^2), c = mu2m
    Tm = w1 * w1 * (Pm - am * phi_am) - 2.0 * w1 * dm * phi_am + dm * dm * Pm

    log_atom2 = np.log(np.maximum(atom2, ATOM_FLOOR))
    ce = atom1 * log_atom2 - 0.5 * r1 * np.log(2.0 * np.pi * w2 * w2) - (Tp + Tm) / (
        2.0 * w2 * w2
    )
    return ce, atom1, atom2


def se_cross_entropy(ch1: ScalarChannel, ch2: ScalarChannel) -> float:
    """integral(P1 ln P2), atoms matched with atoms, densities with densities."""
    if ch1.sigma_eta != ch2.sigma_eta:
        raise ValueError("channels must share sigma_eta")
    if ch1.sigma_eta == 0:
        raise ValueError("sigma_eta = 0: cross entropy undefined at the Dirac limit")
    if ch1.lam != ch2.lam:
        raise ValueError("channels must share lam")
    ce, _, _ = _cross_entropy_terms(
        ch1.m_hat, ch2.m_hat, ch1.Sigma, ch2.Sigma, ch1.lam, ch1.sigma_eta
    )
    return float(ce)


def kl_divergence(ch1: ScalarChannel, ch2: ScalarChannel) -> float:
    """KL(P1 || P2) between the two channel distributions; >= 0, inf when
    P2's atom vanishes while P1's does not."""
    if ch1.sigma_eta != ch2.sigma_eta or ch1.lam != ch2.lam:
        raise ValueError("channels must share lam and sigma_eta")
    if ch1.sigma_eta == 0:
        raise ValueError("sigma_eta = 0: KL undefined at the Dirac limit")
    ce12, atom1, atom2 = _cross_entropy_terms(
        ch1.m_hat, ch2.m_hat, ch1.Sigma, ch2.Sigma, ch1.lam, ch1.sigma_eta
    )
    if atom2 <= 0 < atom1:
        return float("inf")
    ce11, _, _ = _cross_entropy_terms(
        ch1.m_hat, ch1.m_hat, ch1.Sigma, ch1.Sigma, ch1.lam, ch1.sigma_eta
    )
    return float(max(ce11 - ce12, 0.0))


def kl_divergence_same_sigma(m1, m2, Sigma, lam, sigma_eta):
    """Vectorized KL between channels sharing Sigma, differing only in field.

    Closed form: with d = m1 - m2, w = Sigma * sigma_eta,
        KL = atom1 * ln(atom1 / atom2) + d^2 r1 / (2 w^2) + d * r1'.
    """
    w = Sigma * sigma_eta
    d = m1 - m2
    r1 = _r_hat(m1, Sigma, lam, sigma_eta)
    atom1 = _atom_weight(m1, Sigma, lam, sigma_eta)
    atom2 = _atom_weight(m2, Sigma, lam, sigma_eta)
    d1, _ = _r_hat_derivs(m1, Sigma, lam, sigma_eta)
    log_ratio = np.log(np.maximum(atom1, ATOM_FLOOR)) - np.log(np.maximum(atom2, ATOM_FLOOR))
    kl = atom1 * log_ratio + d * d * r1 / (2.0 * w * w) + d * d1
    return np.maximum(kl, 0.0)
