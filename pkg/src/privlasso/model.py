"""Synthetic data generation for the private-LASSO experiments.

The data model is y = X beta0 + xi with i.i.d. N(0, 1/p) design entries
(so rows have unit expected squared norm), a Bernoulli-Gaussian signal, and
Gaussian observation noise.  Privacy noise is an independent i.i.d. Gaussian
vector.  All generators are pure functions of (params, seed); separate
purposes draw from separate counter-derived seed streams so Monte Carlo
trials can run in parallel without shared state.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np


class ParameterError(ValueError):
    """Raised when a ModelParams tuple violates its domain constraints."""


class Mechanism(str, enum.Enum):
    OBJECTIVE = "objective"
    OUTPUT = "output"


# spawn-key prefixes: one stream family per purpose
_STREAM_DATASET = 0
_STREAM_MUTANT = 1
_STREAM_NOISE = 2


def _rng(seed: int, purpose: int, *index: int) -> np.random.Generator:
    """Deterministic per-purpose generator, safe under parallel scheduling."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(purpose, *index))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class ModelParams:
    """One experiment point: geometry, signal, noise, and mechanism."""

    alpha: float
    rho: float
    sigma_xi: float
    lam: float
    sigma_eta: float
    mechanism: Mechanism = Mechanism.OBJECTIVE
    sigma_beta: float = 1.0
    p: int = 1000
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not (self.alpha > 0):
            raise ParameterError(f"alpha must be > 0, got {self.alpha}")
        if not (0.0 <= self.rho <= 1.0):
            raise ParameterError(f"rho must be in [0, 1], got {self.rho}")
        if not (self.lam > 0):
            raise ParameterError(f"lam must be > 0, got {self.lam}")
        if self.sigma_eta < 0:
            raise ParameterError(f"sigma_eta must be >= 0, got {self.sigma_eta}")
        if self.sigma_xi < 0:
            raise ParameterError(f"sigma_xi must be >= 0, got {self.sigma_xi}")
        if self.sigma_beta < 0:
            raise ParameterError(f"sigma_beta must be >= 0, got {self.sigma_beta}")
        if not (isinstance(self.p, (int, np.integer)) and self.p >= 1):
            raise ParameterError(f"p must be a positive integer, got {self.p}")
        if self.n < 1:
            raise ParameterError(f"n = round(alpha * p) = {self.n} must be >= 1")

    @property
    def n(self) -> int:
        return int(round(self.alpha * self.p))

    def with_(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class Dataset:
    """A realized (X, y, beta0, xi) tuple with its provenance."""

    X: np.ndarray
    y: np.ndarray
    beta0: np.ndarray
    xi: np.ndarray
    sigma_xi: float
    seed: int
    mutant_index: Optional[int] = None

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class NoiseVector:
    """Privacy noise eta, drawn from a stream independent of the data."""

    eta: np.ndarray
    sigma_eta: float


def generate_dataset(params: ModelParams, seed: int) -> Dataset:
    """Draw a dataset per the data model; deterministic in (params, seed)."""
    params.validate()
    n, p = params.n, params.p
    rng = _rng(seed, _STREAM_DATASET)
    X = rng.standard_normal((n, p)) / np.sqrt(p)
    mask = rng.random(p) < params.rho
    beta0 = np.where(mask, rng.standard_normal(p) * params.sigma_beta, 0.0)
    xi = rng.standard_normal(n) * params.sigma_xi
    y = X @ beta0 + xi
    return Dataset(X=X, y=y, beta0=beta0, xi=xi, sigma_xi=params.sigma_xi, seed=int(seed))


def make_one_point_mutant(d: Dataset, mu: int, seed: int) -> Dataset:
    """Redraw the mu-th sample (row of X and its response); all else bit-equal."""
    if not (0 <= mu < d.n):
        raise IndexError(f"row index {mu} out of range for n={d.n}")
    rng = _rng(seed, _STREAM_MUTANT, mu)
    x_new = rng.standard_normal(d.p) / np.sqrt(d.p)
    xi_new = rng.standard_normal() * d.sigma_xi
    X = d.X.copy()
    y = d.y.copy()
    xi = d.xi.copy()
    X[mu] = x_new
    xi[mu] = xi_new
    y[mu] = x_new @ d.beta0 + xi_new
    return Dataset(
        X=X, y=y, beta0=d.beta0, xi=xi, sigma_xi=d.sigma_xi, seed=d.seed, mutant_index=mu
    )


def sample_privacy_noise(params: ModelParams, seed: int) -> NoiseVector:
    """i.i.d. N(0, sigma_eta^2) vector; sigma_eta = 0 yields exact zeros."""
    params.validate()
    if params.sigma_eta == 0.0:
        return NoiseVector(eta=np.zeros(params.p), sigma_eta=0.0)
    rng = _rng(seed, _STREAM_NOISE)
    eta = rng.standard_normal(params.p) * params.sigma_eta
    return NoiseVector(eta=eta, sigma_eta=params.sigma_eta)


def save_dataset(d: Dataset, params: ModelParams, path: str | Path) -> None:
    """Write <path>.npz (binary arrays) and <path>.json (params + seeds).

    The binary path round-trips bit-exactly.
    """
    path = Path(path)
    np.savez(path.with_suffix(".npz"), X=d.X, y=d.y, beta0=d.beta0, xi=d.xi)
    sidecar = {
        "params": {
            "alpha": params.alpha,
            "rho": params.rho,
            "sigma_beta": params.sigma_beta,
            "sigma_xi": params.sigma_xi,
            "lam": params.lam,
            "sigma_eta": params.sigma_eta,
            "mechanism": params.mechanism.value,
            "p": params.p,
            "seed": params.seed,
        },
        "sigma_xi": d.sigma_xi,
        "seed": d.seed,
        "mutant_index": d.mutant_index,
    }
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2))


def load_dataset(path: str | Path) -> tuple[Dataset, ModelParams]:
    path = Path(path)
    arrays = np.load(path.with_suffix(".npz"))
    sidecar = json.loads(path.with_suffix(".json").read_text())
    pr = sidecar["params"]
    params = ModelParams(
        alpha=pr["alpha"],
        rho=pr["rho"],
        sigma_beta=pr["sigma_beta"],
        sigma_xi=pr["sigma_xi"],
        lam=pr["lam"],
        sigma_eta=pr["sigma_eta"],
        mechanism=Mechanism(pr["mechanism"]),
        p=pr["p"],
        seed=pr["seed"],
    )
    d = Dataset(
        X=arrays["X"],
        y=arrays["y"],
        beta0=arrays["beta0"],
        xi=arrays["xi"],
        sigma_xi=sidecar["sigma_xi"],
        seed=sidecar["seed"],
        mutant_index=sidecar["mutant_index"],
    )
    return d, params
