"""Hyperparameter priors, truncation schemes, and end-to-end simulation of
the latent field plus noisy observations."""

import math
from dataclasses import dataclass

import numpy as np

from .covariance import (
    SUBFAMILY_CAUCHY,
    HyperparamVector,
    angular_spectrum,
    canonical_subfamily,
)
from .errors import ConfigError
from .measure import TemporalCovariance, keyed_rng, sample_noise_coeffs, sample_temporal
from .validation import check_positive_int, check_real

__all__ = [
    "TruncationScheme",
    "PriorSpec",
    "SimulationConfig",
    "truncation_order",
    "sample_prior",
    "simulate_replicates",
]

SCHEME_LOG = "log"
SCHEME_POWER = "power"


@dataclass(frozen=True)
class TruncationScheme:
    """Rule mapping the functional sample size T to the retained maximum
    harmonic degree: kind "log" -> round(ln T); kind "power" -> floor(T**rho)."""

    kind: str
    rho: float = None

    def __post_init__(self):
        if self.kind not in (SCHEME_LOG, SCHEME_POWER):
            raise ValueError(f"truncation kind must be 'log' or 'power', got {self.kind!r}")
        if self.kind == SCHEME_POWER:
            check_real(self.rho, "rho", low=0.0, high=1.0, low_open=True, high_open=True)
        elif self.rho is not None:
            raise ValueError("rho applies to the power scheme only")


def truncation_order(scheme, n_times):
    """Maximum retained degree for the given scheme and sample size (>= 1)."""
    n_times = check_positive_int(n_times, "T")
    if n_times < 2:
        raise ValueError("truncation_order requires T >= 2")
    if scheme.kind == SCHEME_LOG:
        order = int(np.rint(math.log(n_times)))
    else:
        order = int(math.floor(n_times ** scheme.rho))
    return max(order, 1)


@dataclass(frozen=True)
class PriorSpec:
    """Informative hyperparameter priors for one subfamily.

    Beta(shape1, shape2) for gamma, nu, alpha, beta; Normal(mean, variance)
    for varpi; Normal(mean, variance) truncated at 0 for sigma.
    """

    subfamily: str
    gamma: tuple = (5.0, 7.0)
    nu: tuple = (2.0, 8.0)
    alpha: tuple = (11.0, 5.0)
    beta: tuple = (8.0, 2.0)
    varpi: tuple = (1.3, 0.015)
    sigma: tuple = (0.25, 0.01)

    def __post_init__(self):
        object.__setattr__(self, "subfamily", canonical_subfamily(self.subfamily))
        for name in ("gamma", "nu", "alpha", "beta"):
            a, b = getattr(self, name)
            check_real(a, f"{name} shape1", low=0.0, low_open=True)
            check_real(b, f"{name} shape2", low=0.0, low_open=True)
        for name in ("varpi", "sigma"):
            mean, var = getattr(self, name)
            check_real(mean, f"{name} mean")
            check_real(var, f"{name} variance", low=0.0, low_open=True)

    def mode_hyperparams(self):
        """Hyperparameter vector at the prior modes (Beta modes require
        both shapes > 1; the normal modes are the means)."""
        def beta_mode(shapes):
            a, b = shapes
            if a <= 1.0 or b <= 1.0:
                raise ValueError("Beta mode requires both shapes > 1")
            return (a - 1.0) / (a + b - 2.0)

        common = dict(
            alpha=beta_mode(self.alpha),
            beta=beta_mode(self.beta),
            sigma=max(self.sigma[0], 0.0),
        )
        if self.subfamily == SUBFAMILY_CAUCHY:
            return HyperparamVector(
                self.subfamily,
                gamma=beta_mode(self.gamma),
                nu=beta_mode(self.nu),
                **common,
            )
        return HyperparamVector(self.subfamily, varpi=self.varpi[0], **common)


def _truncated_normal(rng, mean, std):
    """Rejection sampling of N(mean, std**2) truncated to [0, inf)."""
    while True:
        draw = mean + std * rng.standard_normal()
        if draw >= 0.0:
            return draw


def sample_prior(spec, n_draws, rng_seed):
    """Draw i.i.d. hyperparameter vectors from the prior."""
    n_draws = check_positive_int(n_draws, "n_draws")
    draws = []
    for m in range(n_draws):
        rng = keyed_rng(rng_seed, 2, m)
        common = dict(
            alpha=rng.beta(*spec.alpha),
            beta=rng.beta(*spec.beta),
            sigma=_truncated_normal(rng, spec.sigma[0], math.sqrt(spec.sigma[1])),
        )
        if spec.subfamily == SUBFAMILY_CAUCHY:
            draws.append(
                HyperparamVector(
                    spec.subfamily,
                    gamma=rng.beta(*spec.gamma),
                    nu=rng.beta(*spec.nu),
                    **common,
                )
            )
        else:
            varpi = spec.varpi[0] + math.sqrt(spec.varpi[1]) * rng.standard_normal()
            draws.append(HyperparamVector(spec.subfamily, varpi=varpi, **common))
    return draws


@dataclass(frozen=True)
class SimulationConfig:
    """Scenario parameters for one simulation run."""

    n_times: int
    n_lat: int
    n_lon: int
    n_candidates: int
    n_replicates: int
    scheme: TruncationScheme
    subfamily: str
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.n_times, "T")
        check_positive_int(self.n_lat, "N_lat")
        check_positive_int(self.n_lon, "N_lon")
        check_positive_int(self.n_candidates, "M")
        check_positive_int(self.n_replicates, "R")
        object.__setattr__(self, "subfamily", canonical_subfamily(self.subfamily))
        tr = truncation_order(self.scheme, self.n_times)
        if tr > self.n_lat - 1:
            raise ConfigError(
                f"truncation order {tr} exceeds grid capability "
                f"(n_lat - 1 = {self.n_lat - 1})"
            )

    @property
    def max_degree(self):
        return truncation_order(self.scheme, self.n_times)


def simulate_replicates(cfg, hp):
    """Simulate latent coefficient paths and noisy observations.

    The hyperparameters are held fixed across time and shared by all
    replicates of this call; all randomness is keyed by cfg.seed.  Returns
    (latent, observed) coefficient fields of shape (K, T, R).
    """
    if hp.subfamily != cfg.subfamily:
        raise ConfigError(
            f"hyperparameter subfamily {hp.subfamily!r} does not match the "
            f"configured subfamily {cfg.subfamily!r}"
        )
    max_degree = cfg.max_degree
    lags = np.arange(cfg.n_times, dtype=float)
    spectrum = angular_spectrum(hp, lags, max_degree)
    tc = TemporalCovariance.from_spectrum(spectrum)
    latent = sample_temporal(tc, cfg.n_replicates, cfg.seed)
    noise = sample_noise_coeffs(
        hp.sigma, max_degree, cfg.n_times, cfg.n_replicates, cfg.seed
    )
    observed = latent.values + noise.values
    from .sphere import CoefficientField

    return latent, CoefficientField(observed, max_degree)
