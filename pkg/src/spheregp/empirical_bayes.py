"""Time-adaptive ML-II hyperparameter selection in the spectral domain.

For each time step the marginal likelihood of the observed coefficients is
evaluated for every candidate hyperparameter vector, and the maximizing
candidate is selected.  In the spectral domain the observed coefficients
are independent zero-mean Gaussians with variance B_n(0) + sigma**2, so
the marginal likelihood is available in closed form; a Monte-Carlo
evaluator integrating the conditional likelihood over latent draws is
provided both because it extends to evaluations without a closed form and
as an independent cross-check.
"""

from dataclasses import dataclass

import numpy as np

from .covariance import angular_spectrum
from .errors import ValidityError
from .measure import keyed_rng
from .sphere import n_coefficients
from .validation import check_positive_int

__all__ = [
    "TimeVaryingEstimates",
    "candidate_marginal_variances",
    "marginal_loglik_closed",
    "marginal_loglik_mc",
    "ml2_fit",
]

EVALUATOR_CLOSED = "closed"
EVALUATOR_MC = "mc"


@dataclass
class TimeVaryingEstimates:
    """Per-time ML-II selections over a fixed candidate set.

    candidates     : list of HyperparamVector (length M)
    selected_index : (T,) index of the argmax candidate per time
    loglik         : (T,) attained marginal log-likelihood
    table          : (M, T) full log-likelihood table
    max_degree     : truncation used in the evaluation
    """

    candidates: list
    selected_index: np.ndarray
    loglik: np.ndarray
    table: np.ndarray
    max_degree: int

    def __post_init__(self):
        self.selected_index = np.asarray(self.selected_index, dtype=int)
        self.loglik = np.asarray(self.loglik, dtype=float)
        self.table = np.asarray(self.table, dtype=float)
        if self.table.shape != (len(self.candidates), self.selected_index.size):
            raise ValueError("log-likelihood table shape mismatch")
        attained = self.table[self.selected_index, np.arange(self.selected_index.size)]
        if not np.array_equal(attained, self.loglik):
            raise ValueError("attained log-likelihoods must match the table argmax")

    @property
    def n_times(self):
        return self.selected_index.size

    def selected(self, t):
        return self.candidates[self.selected_index[t]]

    def selected_sigma(self):
        return np.array([self.selected(t).sigma for t in range(self.n_times)])


def _marginal_variance_row(hp, max_degree, quad_order=None):
    """Per-degree observed-coefficient variances B_n(0) + sigma**2."""
    spectrum = angular_spectrum(hp, [0.0], max_degree, quad_order=quad_order)
    return spectrum.values[:, 0] + hp.sigma ** 2, spectrum.values[:, 0]


def candidate_marginal_variances(candidates, max_degree, quad_order=None):
    """Stack of per-candidate marginal variance rows, shape (M, N+1)."""
    rows = np.empty((len(candidates), max_degree + 1))
    for m, hp in enumerate(candidates):
        rows[m], _ = _marginal_variance_row(hp, max_degree, quad_order)
    return rows


def _expand_degrees(row, max_degree):
    """Repeat a per-degree row across its 2n+1 orders -> packed (K,) vector."""
    return np.repeat(row, 2 * np.arange(max_degree + 1) + 1)


def _loglik_from_variances(obs_t, variances_packed):
    """Gaussian log-likelihood of one time slice pooled over replicates.

    obs_t : (K, R); variances_packed : (K,).
    """
    if np.any(variances_packed <= 0.0):
        zero_rows = variances_packed <= 0.0
        if np.any(obs_t[zero_rows] != 0.0):
            raise ValidityError(
                "zero marginal variance with nonzero observed coefficients"
            )
        obs_t = obs_t[~zero_rows]
        variances_packed = variances_packed[~zero_rows]
    n_rep = obs_t.shape[1]
    log_norm = -0.5 * n_rep * np.sum(np.log(2.0 * np.pi * variances_packed))
    quad = -0.5 * float(np.sum((obs_t ** 2).sum(axis=1) / variances_packed))
    return log_norm + quad


def marginal_loglik_closed(obs_t, hp, max_degree, quad_order=None,
                           prior_variances=None):
    """Closed-form marginal log-likelihood of the time-t coefficient slice
    (shape (K, R), replicates pooled as independent draws).

    ``prior_variances`` overrides the per-degree lag-0 variances (length
    max_degree + 1), e.g. when the projection is already cached.
    """
    obs_t = np.asarray(obs_t, dtype=float)
    if obs_t.ndim == 1:
        obs_t = obs_t[:, None]
    if obs_t.shape[0] != n_coefficients(max_degree):
        raise ValueError(
            f"expected {n_coefficients(max_degree)} coefficient rows, "
            f"got {obs_t.shape[0]}"
        )
    if prior_variances is None:
        variances, _ = _marginal_variance_row(hp, max_degree, quad_order)
    else:
        variances = np.asarray(prior_variances, dtype=float) + hp.sigma ** 2
    return _loglik_from_variances(obs_t, _expand_degrees(variances, max_degree))


def marginal_loglik_mc(obs_t, hp, max_degree, n_draws, rng_seed, quad_order=None,
                       prior_variances=None):
    """Monte-Carlo marginal log-likelihood and its delta-method standard
    error on the log scale.

    For each replicate, latent coefficient draws z ~ N(0, B_n(0)) are
    plugged into the conditional Gaussian likelihood with variance
    sigma**2 and averaged with log-sum-exp stabilization.  sigma = 0 makes
    the conditional density singular; use the closed form instead.  With a
    single draw the spread is unobservable and the reported error is 0.
    """
    n_draws = check_positive_int(n_draws, "n_draws")
    obs_t = np.asarray(obs_t, dtype=float)
    if obs_t.ndim == 1:
        obs_t = obs_t[:, None]
    if hp.sigma == 0.0:
        raise ValueError(
            "Monte-Carlo evaluator is unsupported at sigma = 0 (singular "
            "conditional density); use the closed-form evaluator"
        )
    if prior_variances is None:
        _, prior_var = _marginal_variance_row(hp, max_degree, quad_order)
    else:
        prior_var = np.asarray(prior_variances, dtype=float)
    prior_std = np.sqrt(_expand_degrees(prior_var, max_degree))  # (K,)
    sigma2 = hp.sigma ** 2
    n_coeff, n_rep = obs_t.shape
    log_norm = -0.5 * n_coeff * np.log(2.0 * np.pi * sigma2)
    total = 0.0
    var_total = 0.0
    for r in range(n_rep):
        rng = keyed_rng(rng_seed, 3, r)
        z = prior_std[None, :] * rng.standard_normal((n_draws, n_coeff))
        log_w = log_norm - 0.5 * np.sum(
            (obs_t[:, r][None, :] - z) ** 2, axis=1
        ) / sigma2
        peak = log_w.max()
        w = np.exp(log_w - peak)
        mean_w = w.mean()
        total += peak + np.log(mean_w)
        if n_draws >= 2:
            var_total += w.var(ddof=1) / (n_draws * mean_w ** 2)
    return float(total), float(np.sqrt(var_total))


def ml2_fit(
    obs,
    candidates,
    max_degree=None,
    evaluator=EVALUATOR_CLOSED,
    mc_draws=2000,
    rng_seed=0,
    replicate=None,
    quad_order=None,
):
    """Select, independently for each time step, the candidate maximizing
    the marginal likelihood of the observed coefficients.

    obs        : CoefficientField of observations
    candidates : list of HyperparamVector (the discrete ML-II search set)
    replicate  : None pools all replicates; an integer restricts the fit
                 to that single replicate
    Ties break to the lowest candidate index.  A candidate that is invalid
    at some time contributes -inf there; if all candidates are invalid at
    a time, ValidityError names it.
    """
    if not candidates:
        raise ValueError("need at least one candidate")
    if evaluator not in (EVALUATOR_CLOSED, EVALUATOR_MC):
        raise ValueError(f"unknown evaluator {evaluator!r}")
    if max_degree is None:
        max_degree = obs.max_degree
    if max_degree > obs.max_degree:
        raise ValueError(
            f"max_degree {max_degree} exceeds the field's degree {obs.max_degree}"
        )
    values = obs.values[: n_coefficients(max_degree)]
    if replicate is not None:
        values = values[:, :, int(replicate):int(replicate) + 1]
    n_times = values.shape[1]
    table = np.full((len(candidates), n_times), -np.inf)
    if evaluator == EVALUATOR_CLOSED:
        sumsq = (values ** 2).sum(axis=2)  # (K, T)
        n_rep = values.shape[2]
        for m, hp in enumerate(candidates):
            variances, _ = _marginal_variance_row(hp, max_degree, quad_order)
            packed = _expand_degrees(variances, max_degree)
            if np.any(packed <= 0.0):
                bad = packed <= 0.0
                if np.any(sumsq[bad] != 0.0):
                    continue  # invalid candidate: leave -inf
                keep = ~bad
                log_norm = -0.5 * n_rep * np.sum(np.log(2.0 * np.pi * packed[keep]))
                table[m] = log_norm - 0.5 * (sumsq[keep] / packed[keep, None]).sum(axis=0)
            else:
                log_norm = -0.5 * n_rep * np.sum(np.log(2.0 * np.pi * packed))
                table[m] = log_norm - 0.5 * (sumsq / packed[:, None]).sum(axis=0)
    else:
        for m, hp in enumerate(candidates):
            for t in range(n_times):
                try:
                    est, _ = marginal_loglik_mc(
                        values[:, t, :], hp, max_degree, mc_draws,
                        keyed_rng(rng_seed, 4, m, t).integers(2 ** 63),
                        quad_order,
                    )
                except (ValidityError, ValueError):
                    continue
                table[m, t] = est
    bad_times = np.flatnonzero(~np.isfinite(table).any(axis=0))
    if bad_times.size:
        raise ValidityError(
            f"no valid candidate at time index {int(bad_times[0])}"
        )
    selected = table.argmax(axis=0)
    loglik = table[selected, np.arange(n_times)]
    return TimeVaryingEstimates(
        candidates=list(candidates),
        selected_index=selected,
        loglik=loglik,
        table=table,
        max_degree=max_degree,
    )
