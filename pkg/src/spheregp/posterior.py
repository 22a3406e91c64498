"""Conjugate posterior per eigenspace, field reconstruction, and the
diagnostic battery: per-eigenspace mean quadratic errors, bias norms,
functional variance decomposition, and temporal-correlation curves.

With observed coefficient y, prior variance B and noise variance s2, the
posterior of the latent coefficient is Gaussian with

    mean     = y * B / (B + s2)
    variance = B * s2 / (B + s2),

independently across (degree, order) pairs.  All norms are computed in
coefficient space (Parseval under the orthonormal basis), which keeps
grid-quadrature error out of the diagnostics.
"""

from dataclasses import dataclass

import numpy as np

from .covariance import AngularSpectrum, HyperparamVector, angular_spectrum
from .errors import ValidityError
from .sphere import CoefficientField, n_coefficients, synthesis
from .validation import as_float_array, check_real

__all__ = [
    "PosteriorSummary",
    "BiasNorms",
    "posterior_mean_coeff",
    "posterior_eigenvalue",
    "shrinkage_factors",
    "posterior_coeff_means",
    "posterior_field",
    "posterior_summary",
    "variance_decomposition",
    "emqe",
    "bias_terms",
    "time_correlation",
    "estimates_spectrum",
]


def posterior_mean_coeff(y, prior_var, noise_var):
    """Posterior mean y * B / (B + s2); the noiseless limit returns y and
    a zero prior returns 0.  B = s2 = 0 is degenerate."""
    prior_var = check_real(prior_var, "prior_var", low=0.0)
    noise_var = check_real(noise_var, "noise_var", low=0.0)
    if prior_var + noise_var == 0.0:
        raise ValidityError("degenerate posterior: prior and noise variance both zero")
    return y * (prior_var / (prior_var + noise_var))


def posterior_eigenvalue(prior_var, noise_var):
    """Posterior variance B * s2 / (B + s2) (the algebraically equivalent,
    numerically stabler form of B - B (B + s2)^{-1} B)."""
    prior_var = check_real(prior_var, "prior_var", low=0.0)
    noise_var = check_real(noise_var, "noise_var", low=0.0)
    if prior_var + noise_var == 0.0:
        raise ValidityError("degenerate posterior: prior and noise variance both zero")
    return prior_var * noise_var / (prior_var + noise_var)


def _selected_variance_rows(estimates, quad_order=None):
    """Per-time prior-variance rows B_n(0) and noise variances under the
    selected candidates; spectra are computed once per distinct candidate.

    Returns (prior_rows (N+1, T), noise_var (T,)).
    """
    max_degree = estimates.max_degree
    n_times = estimates.n_times
    cache = {}
    prior_rows = np.empty((max_degree + 1, n_times))
    noise_var = np.empty(n_times)
    for t in range(n_times):
        idx = int(estimates.selected_index[t])
        if idx not in cache:
            hp = estimates.candidates[idx]
            sp = angular_spectrum(hp, [0.0], max_degree, quad_order=quad_order)
            cache[idx] = (sp.values[:, 0], hp.sigma ** 2)
        prior_rows[:, t], noise_var[t] = cache[idx]
    return prior_rows, noise_var


def shrinkage_factors(estimates, quad_order=None):
    """Packed per-coefficient shrinkage factors B / (B + s2), shape (K, T)."""
    prior_rows, noise_var = _selected_variance_rows(estimates, quad_order)
    mult = 2 * np.arange(estimates.max_degree + 1) + 1
    prior_packed = np.repeat(prior_rows, mult, axis=0)  # (K, T)
    denom = prior_packed + noise_var[None, :]
    if np.any(denom == 0.0):
        raise ValidityError("degenerate posterior at some time: B + s2 = 0")
    return prior_packed / denom


def posterior_coeff_means(obs, estimates, quad_order=None):
    """Shrink every observed coefficient toward zero by its posterior
    factor; returns a CoefficientField matching ``obs`` restricted to the
    estimates' truncation."""
    max_degree = estimates.max_degree
    if obs.max_degree < max_degree:
        raise ValueError("observations carry fewer degrees than the estimates")
    factors = shrinkage_factors(estimates, quad_order)
    values = obs.values[: n_coefficients(max_degree)] * factors[:, :, None]
    return CoefficientField(values, max_degree)


def posterior_field(estimates, obs, grid, times=None, replicate=0, quad_order=None):
    """Synthesize the posterior mean fields at the requested time indices
    for a single replicate."""
    means = posterior_coeff_means(obs, estimates, quad_order)
    if times is None:
        times = range(means.n_times)
    return [
        synthesis(means.values[:, t, replicate], grid) for t in times
    ]


@dataclass
class PosteriorSummary:
    """Posterior quantities per time: coefficient means, per-degree
    posterior eigenvalues, and the variance decomposition triple."""

    means: CoefficientField
    eigenvalues: np.ndarray        # (N+1, T)
    total_variance: np.ndarray     # (T,)
    residual_variance: np.ndarray  # (T,)
    explained_variance: np.ndarray # (T,)


def posterior_summary(obs, estimates, quad_order=None):
    means = posterior_coeff_means(obs, estimates, quad_order)
    prior_rows, noise_var = _selected_variance_rows(estimates, quad_order)
    n_times = estimates.n_times
    max_degree = estimates.max_degree
    eigenvalues = np.empty((max_degree + 1, n_times))
    totals = np.empty(n_times)
    residuals = np.empty(n_times)
    explained = np.empty(n_times)
    for t in range(n_times):
        totals[t], residuals[t], explained[t] = variance_decomposition(
            prior_rows[:, t], noise_var[t]
        )
        denom = prior_rows[:, t] + noise_var[t]
        eigenvalues[:, t] = np.where(
            denom > 0.0, prior_rows[:, t] * noise_var[t] / np.where(denom > 0, denom, 1.0), 0.0
        )
    return PosteriorSummary(means, eigenvalues, totals, residuals, explained)


def variance_decomposition(prior_row, noise_var):
    """Split the truncated total functional variance into residual and
    explained parts:

        total     = sum_n (2n+1) B_n
        residual  = sum_n (2n+1) B_n s2 / (B_n + s2)
        explained = sum_n (2n+1) B_n**2 / (B_n + s2)

    The identity total = residual + explained holds exactly because the
    per-degree split B = B*s2/(B+s2) + B**2/(B+s2) is exact.
    """
    prior_row = as_float_array(prior_row, "prior_row", ndim=1)
    noise_var = check_real(noise_var, "noise_var", low=0.0)
    if np.any(prior_row < 0.0):
        raise ValueError("prior variances must be nonnegative")
    mult = 2.0 * np.arange(prior_row.size) + 1.0
    denom = prior_row + noise_var
    safe = denom > 0.0
    residual_terms = np.zeros_like(prior_row)
    explained_terms = np.zeros_like(prior_row)
    residual_terms[safe] = prior_row[safe] * noise_var / denom[safe]
    explained_terms[safe] = prior_row[safe] ** 2 / denom[safe]
    total = float(mult @ prior_row)
    residual = float(mult @ residual_terms)
    explained = float(mult @ explained_terms)
    return total, residual, explained


def emqe(latent, predicted):
    """Empirical mean quadratic error per eigenspace and time:

        E[n, t] = mean over replicates of
                  sum_j (pred[n,j] - latent[n,j])**2 / (2n+1)

    (the per-eigenspace divisor 2n+1 averages over the orders; it is
    recorded in the CSV metadata written by the CLI).
    """
    if latent.values.shape != predicted.values.shape:
        raise ValueError(
            f"latent shape {latent.values.shape} does not match predictions "
            f"{predicted.values.shape}"
        )
    max_degree = latent.max_degree
    sq = (predicted.values - latent.values) ** 2  # (K, T, R)
    out = np.empty((max_degree + 1, latent.n_times))
    for n in range(max_degree + 1):
        block = sq[n * n:(n + 1) * (n + 1)]
        out[n] = block.sum(axis=0).mean(axis=1) / (2 * n + 1)
    return out


@dataclass
class BiasNorms:
    """Coefficient-space (Parseval) norms of the two error components of
    the posterior mean, per (time, replicate):

    bias_norm  : || latent - shrunk latent ||   (systematic shrinkage error)
    noise_norm : || shrunk (latent - observed) ||  (propagated noise)

    By the triangle inequality their sum bounds the posterior-mean error
    || latent - posterior mean ||.
    """

    bias_norm: np.ndarray   # (T, R)
    noise_norm: np.ndarray  # (T, R)

    def mean_over_replicates(self):
        return self.bias_norm.mean(axis=1), self.noise_norm.mean(axis=1)


def bias_terms(latent, observed, estimates, quad_order=None):
    """Decompose the posterior-mean error into shrinkage bias and
    propagated noise, in coefficient space."""
    max_degree = estimates.max_degree
    lat = latent.values[: n_coefficients(max_degree)]
    obs = observed.values[: n_coefficients(max_degree)]
    if lat.shape != obs.shape:
        raise ValueError("latent and observed fields must share shape")
    factors = shrinkage_factors(estimates, quad_order)[:, :, None]  # (K, T, 1)
    bias = np.sqrt((((1.0 - factors) * lat) ** 2).sum(axis=0))
    noise = np.sqrt(((factors * (lat - obs)) ** 2).sum(axis=0))
    return BiasNorms(bias, noise)


def time_correlation(spectrum_true, spectrum_est, degree):
    """Theoretical and estimated lag-correlation curves of the degree-n
    coefficient process: rho_n(l) = B[n, l] / B[n, 0]."""
    if spectrum_true.n_lags != spectrum_est.n_lags or not np.allclose(
        spectrum_true.lags, spectrum_est.lags
    ):
        raise ValueError("spectra must share the same lag grid")
    curves = []
    for sp in (spectrum_true, spectrum_est):
        row = sp.values[degree]
        if row[0] <= 0.0:
            raise ValidityError(
                f"degree {degree} has zero lag-0 variance: correlation undefined"
            )
        curves.append(row / row[0])
    return curves[0], curves[1]


def estimates_spectrum(
    estimates, lags, mode="hyperparameter-mean", quad_order=None
):
    """Angular spectrum implied by the fitted estimates.

    mode "hyperparameter-mean" (default): average the selected
    hyperparameters over time component-wise and project once.
    mode "spectrum-mean": project each distinct selected candidate and
    average the spectra over time, lag by lag.
    """
    max_degree = estimates.max_degree
    if mode == "hyperparameter-mean":
        selected = [estimates.selected(t) for t in range(estimates.n_times)]
        first = selected[0]
        fields = {"alpha", "beta", "sigma"}
        fields |= {"gamma", "nu"} if first.subfamily == "cauchy" else {"varpi"}
        averaged = {
            name: float(np.mean([getattr(hp, name) for hp in selected]))
            for name in fields
        }
        hp_mean = HyperparamVector(first.subfamily, **averaged)
        return angular_spectrum(hp_mean, lags, max_degree, quad_order=quad_order)
    if mode == "spectrum-mean":
        cache = {}
        total = np.zeros((max_degree + 1, np.atleast_1d(np.asarray(lags)).size))
        for t in range(estimates.n_times):
            idx = int(estimates.selected_index[t])
            if idx not in cache:
                cache[idx] = angular_spectrum(
                    estimates.candidates[idx], lags, max_degree,
                    quad_order=quad_order,
                ).values
            total += cache[idx]
        return AngularSpectrum(
            total / estimates.n_times, np.atleast_1d(np.asarray(lags, dtype=float))
        )
    raise ValueError(f"unknown mode {mode!r}")
