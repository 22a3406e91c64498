"""Replicate-level k-fold cross-validation of the spectral pipeline.

Folds partition the replicates (time persistence stays intact within each
replicate).  Each fold fits the ML-II selection on the training
replicates, predicts the held-out replicates through the conjugate
posterior, and scores the per-eigenspace mean quadratic error against the
held-out truth coefficients.
"""

from dataclasses import dataclass

import numpy as np

from .empirical_bayes import ml2_fit
from .errors import ConfigError
from .measure import keyed_rng
from .posterior import emqe, posterior_coeff_means
from .sphere import CoefficientField, n_coefficients

__all__ = ["CvReport", "make_folds", "run_cv"]


@dataclass
class CvReport:
    """Per-fold EMQE matrices plus the cross-fold average and the
    in-sample reference fit."""

    fold_indices: list          # list of arrays of replicate indices
    fold_emqe: list             # list of (N+1, T) matrices
    average_emqe: np.ndarray    # (N+1, T)
    in_sample_emqe: np.ndarray  # (N+1, T)
    seed: int

    @property
    def n_folds(self):
        return len(self.fold_indices)

    def fold_sizes(self):
        return [len(idx) for idx in self.fold_indices]

    def validate_partition(self, n_replicates):
        """Folds must be disjoint, exhaustive, and balanced within 1."""
        merged = np.concatenate(self.fold_indices)
        if sorted(merged.tolist()) != list(range(n_replicates)):
            raise ValueError("folds do not partition the replicates")
        sizes = self.fold_sizes()
        if max(sizes) - min(sizes) > 1:
            raise ValueError(f"fold sizes differ by more than 1: {sizes}")
        return True


def make_folds(n_replicates, n_folds, seed):
    """Seeded random partition of replicate indices into n_folds groups of
    sizes differing by at most 1."""
    if n_replicates < n_folds:
        raise ConfigError(
            f"cross-validation needs at least {n_folds} replicates, "
            f"got {n_replicates}"
        )
    perm = keyed_rng(seed, 5).permutation(n_replicates)
    return [np.sort(part) for part in np.array_split(perm, n_folds)]


def run_cv(observed, truth, candidates, max_degree, n_folds=5, seed=0):
    """Cross-validate the ML-II fit + posterior predictor.

    observed, truth : CoefficientField with matching (T, R)
    candidates      : ML-II search set shared across folds
    """
    if observed.n_replicates != truth.n_replicates or observed.n_times != truth.n_times:
        raise ValueError("observed and truth fields must share (T, R)")
    n_rep = observed.n_replicates
    folds = make_folds(n_rep, n_folds, seed)
    truth_vals = truth.values[: n_coefficients(max_degree)]
    fold_emqes = []
    for held_out in folds:
        train = np.setdiff1d(np.arange(n_rep), held_out)
        train_obs = CoefficientField(observed.values[:, :, train], observed.max_degree)
        estimates = ml2_fit(train_obs, candidates, max_degree=max_degree)
        test_obs = CoefficientField(
            observed.values[:, :, held_out], observed.max_degree
        )
        predicted = posterior_coeff_means(test_obs, estimates)
        truth_fold = CoefficientField(truth_vals[:, :, held_out], max_degree)
        fold_emqes.append(emqe(truth_fold, predicted))
    average = np.mean(fold_emqes, axis=0)

    estimates_all = ml2_fit(observed, candidates, max_degree=max_degree)
    predicted_all = posterior_coeff_means(observed, estimates_all)
    in_sample = emqe(CoefficientField(truth_vals, max_degree), predicted_all)

    return CvReport(
        fold_indices=folds,
        fold_emqe=fold_emqes,
        average_emqe=average,
        in_sample_emqe=in_sample,
        seed=int(seed),
    )
