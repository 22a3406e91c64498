"""Scikit-learn style estimators wrapping the spectral pipeline.

Two composable pieces:

* :class:`SphericalHarmonicTransform` maps stacks of gridded fields to
  packed coefficient vectors and back (fit/transform/inverse_transform).
* :class:`EmpiricalBayesGPRegressor` runs the per-time ML-II candidate
  selection in ``fit`` and applies the conjugate posterior shrinkage in
  ``predict``.

Both inherit scikit-learn's parameter handling (``get_params`` /
``set_params``), so they clone and compose with the wider ecosystem.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .covariance import canonical_subfamily
from .empirical_bayes import EVALUATOR_CLOSED, EVALUATOR_MC, ml2_fit
from .model import PriorSpec, sample_prior
from .posterior import posterior_coeff_means, posterior_summary
from .sphere import (
    CoefficientField,
    basis_matrix,
    build_grid,
    check_resolution,
    n_coefficients,
)
from .validation import check_positive_int

__all__ = ["SphericalHarmonicTransform", "EmpiricalBayesGPRegressor"]


class SphericalHarmonicTransform(TransformerMixin, BaseEstimator):
    """Forward/inverse harmonic transform on a Gauss-Legendre grid.

    Parameters
    ----------
    n_lat, n_lon : grid resolution (colatitudes x longitudes)
    max_degree   : highest retained harmonic degree
    """

    def __init__(self, n_lat=16, n_lon=32, max_degree=10):
        self.n_lat = n_lat
        self.n_lon = n_lon
        self.max_degree = max_degree

    def fit(self, X=None, y=None):
        n_lat = check_positive_int(self.n_lat, "n_lat")
        n_lon = check_positive_int(self.n_lon, "n_lon")
        grid = build_grid(n_lat, n_lon)
        check_resolution(grid, self.max_degree)
        self.grid_ = grid
        self.basis_ = basis_matrix(grid, self.max_degree)
        self.n_coefficients_ = n_coefficients(self.max_degree)
        return self

    def transform(self, X):
        """Fields (n_samples, n_lat, n_lon) -> coefficients (n_samples, K)."""
        check_is_fitted(self, "grid_")
        X = np.asarray(X, dtype=float)
        squeeze = X.ndim == 2
        if squeeze:
            X = X[None]
        if X.shape[1:] != (self.grid_.n_lat, self.grid_.n_lon):
            raise ValueError(
                f"fields must have shape (*, {self.grid_.n_lat}, "
                f"{self.grid_.n_lon}), got {X.shape}"
            )
        weighted = self.grid_.weights[None] * X
        coeffs = np.tensordot(weighted, self.basis_, axes=([1, 2], [1, 2]))
        return coeffs[0] if squeeze else coeffs

    def inverse_transform(self, Xt):
        """Coefficients (n_samples, K) -> fields (n_samples, n_lat, n_lon)."""
        check_is_fitted(self, "grid_")
        Xt = np.asarray(Xt, dtype=float)
        squeeze = Xt.ndim == 1
        if squeeze:
            Xt = Xt[None]
        if Xt.shape[1] != self.n_coefficients_:
            raise ValueError(
                f"expected {self.n_coefficients_} coefficients, got {Xt.shape[1]}"
            )
        fields = np.tensordot(Xt, self.basis_, axes=(1, 0))
        return fields[0] if squeeze else fields


def _as_coefficient_field(X, max_degree=None):
    if isinstance(X, CoefficientField):
        return X
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(
            "observations must be a CoefficientField or an array of shape "
            "(K, T) or (K, T, R)"
        )
    if max_degree is None:
        max_degree = int(round(np.sqrt(arr.shape[0]))) - 1
    return CoefficientField(arr, max_degree)


class EmpiricalBayesGPRegressor(BaseEstimator):
    """Time-adaptive empirical-Bayes regression in the spectral domain.

    ``fit`` selects, per time step, the prior-candidate hyperparameters
    maximizing the marginal likelihood of the observed coefficients;
    ``predict`` returns the conjugate posterior coefficient means under
    the selected hyperparameters.

    Parameters
    ----------
    subfamily    : "cauchy" or "matern" covariance subfamily
    n_candidates : number of prior draws forming the ML-II search set
    candidates   : explicit candidate list (overrides prior sampling)
    priors       : PriorSpec (defaults to the informative priors)
    max_degree   : truncation; defaults to the degree carried by the data
    evaluator    : "closed" or "mc" marginal-likelihood evaluator
    mc_draws     : Monte-Carlo draws when evaluator="mc"
    pool_replicates : pool all replicates per time (single-replicate fits
                   are available through ``replicate``)
    replicate    : fit on one replicate index instead of pooling
    random_state : seed for candidate sampling and the MC evaluator
    """

    def __init__(
        self,
        subfamily="cauchy",
        n_candidates=50,
        candidates=None,
        priors=None,
        max_degree=None,
        evaluator=EVALUATOR_CLOSED,
        mc_draws=2000,
        pool_replicates=True,
        replicate=None,
        random_state=0,
    ):
        self.subfamily = subfamily
        self.n_candidates = n_candidates
        self.candidates = candidates
        self.priors = priors
        self.max_degree = max_degree
        self.evaluator = evaluator
        self.mc_draws = mc_draws
        self.pool_replicates = pool_replicates
        self.replicate = replicate
        self.random_state = random_state

    def _candidate_set(self):
        if self.candidates is not None:
            return list(self.candidates)
        priors = self.priors
        if priors is None:
            priors = PriorSpec(canonical_subfamily(self.subfamily))
        return sample_prior(priors, self.n_candidates, self.random_state)

    def fit(self, X, y=None):
        """X: CoefficientField or array (K, T[, R]) of observed coefficients."""
        if self.evaluator not in (EVALUATOR_CLOSED, EVALUATOR_MC):
            raise ValueError(f"unknown evaluator {self.evaluator!r}")
        obs = _as_coefficient_field(X, self.max_degree)
        max_degree = self.max_degree if self.max_degree is not None else obs.max_degree
        replicate = self.replicate
        if replicate is None and not self.pool_replicates:
            replicate = 0
        self.candidates_ = self._candidate_set()
        self.estimates_ = ml2_fit(
            obs,
            self.candidates_,
            max_degree=max_degree,
            evaluator=self.evaluator,
            mc_draws=self.mc_draws,
            rng_seed=self.random_state,
            replicate=replicate,
        )
        self.max_degree_ = max_degree
        self.n_times_ = obs.n_times
        return self

    def predict(self, X):
        """Posterior coefficient means for observations X, using the
        hyperparameters selected in ``fit``; returns a CoefficientField."""
        check_is_fitted(self, "estimates_")
        obs = _as_coefficient_field(X, None)
        if obs.n_times != self.n_times_:
            raise ValueError(
                f"prediction inputs carry {obs.n_times} time steps; the fit "
                f"used {self.n_times_}"
            )
        return posterior_coeff_means(obs, self.estimates_)

    def posterior_summary(self, X):
        """Full posterior summary (means, per-degree posterior eigenvalues,
        variance decomposition) for observations X."""
        check_is_fitted(self, "estimates_")
        obs = _as_coefficient_field(X, None)
        return posterior_summary(obs, self.estimates_)
