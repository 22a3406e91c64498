"""Truncated spectral representation of the Gaussian field measure:
diagonal log-densities, Fredholm determinants, and sampling of the
temporal coefficient processes.

In the orthonormal basis the field measure factorizes into independent
one-dimensional Gaussians, one per (degree, order) pair, with variance
equal to the degree's spectrum atom repeated over its 2n+1 orders.  Over
time each (degree, order) coefficient is a stationary Gaussian process
with Toeplitz covariance built from the spectrum row of that degree.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .errors import ValidityError
from .sphere import CoefficientField, n_coefficients
from .validation import as_float_array, check_positive_int, check_real

__all__ = [
    "TruncatedSpectrum",
    "TemporalCovariance",
    "keyed_rng",
    "log_density",
    "fredholm_determinant",
    "fredholm_determinant_series",
    "sample_temporal",
    "sample_noise_coeffs",
]

# diagonal jitter ladder for numerically semidefinite Toeplitz matrices,
# in units of trace/T
_JITTER_LADDER = (1.0e-12, 1.0e-10, 1.0e-8)


def keyed_rng(seed, *key):
    """Deterministic generator keyed by (seed, *key); independent streams
    for distinct keys, reproducible regardless of evaluation order."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, key)])


@dataclass(frozen=True)
class TruncatedSpectrum:
    """Eigenvalues lambda_n >= 0 of a zonal covariance operator, degree n
    carrying multiplicity 2n+1."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        vals = as_float_array(self.eigenvalues, "eigenvalues", ndim=1)
        if np.any(vals < 0.0):
            raise ValueError("spectrum eigenvalues must be nonnegative")
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def max_degree(self):
        return self.eigenvalues.size - 1

    @property
    def multiplicities(self):
        return 2 * np.arange(self.eigenvalues.size) + 1

    def trace(self):
        return float(self.multiplicities @ self.eigenvalues)


def log_density(coeffs, spectrum):
    """Log-density of one time slice of packed coefficients under the
    product-Gaussian measure with the given spectrum.

    Degrees with a zero eigenvalue are degenerate: their coefficients must
    be exactly zero and contribute nothing (the measure is supported on
    that subspace); a nonzero coefficient there raises ValidityError.
    """
    coeffs = as_float_array(coeffs, "coeffs", ndim=1)
    if coeffs.size != n_coefficients(spectrum.max_degree):
        raise ValueError(
            f"expected {n_coefficients(spectrum.max_degree)} coefficients, "
            f"got {coeffs.size}"
        )
    total = 0.0
    for n, lam in enumerate(spectrum.eigenvalues):
        block = coeffs[n * n:(n + 1) * (n + 1)]
        if lam == 0.0:
            if np.any(block != 0.0):
                raise ValidityError(
                    f"degenerate measure: degree {n} has zero eigenvalue but "
                    "nonzero coefficients"
                )
            continue
        total += -0.5 * block.size * np.log(2.0 * np.pi * lam)
        total += -0.5 * np.sum(block * block) / lam
    return float(total)


def fredholm_determinant(spectrum, omega):
    """det(I - omega * A) in product form: prod_n (1 - omega*lambda_n)**(2n+1).

    Computed through signed log-magnitudes so large truncations do not
    underflow.  omega*lambda_n = 1 is a singularity of the determinant's
    inverse normalization and raises ValidityError.
    """
    omega = check_real(omega, "omega")
    factors = 1.0 - omega * spectrum.eigenvalues
    if np.any(factors == 0.0):
        raise ValidityError("omega * lambda_n = 1: determinant factor vanishes")
    mult = spectrum.multiplicities
    sign = np.prod(np.where(factors < 0.0, -1.0, 1.0) ** (mult % 2))
    log_mag = float(mult @ np.log(np.abs(factors)))
    return float(sign * np.exp(log_mag))


def fredholm_determinant_series(spectrum, omega, tol=1.0e-15, max_terms=100000):
    """det(I - omega * A) through the trace-power series
    exp(-sum_k trace(A**k)/k * omega**k); valid for |omega|*trace(A) < 1."""
    omega = check_real(omega, "omega")
    trace = spectrum.trace()
    if abs(omega) * trace >= 1.0:
        raise ValidityError(
            f"series form requires |omega|*trace < 1, got {abs(omega) * trace:.6g}"
        )
    mult = spectrum.multiplicities.astype(float)
    lam_pow = spectrum.eigenvalues.copy()
    omega_pow = omega
    total = 0.0
    for k in range(1, max_terms + 1):
        term = (mult @ lam_pow) * omega_pow / k
        total -= term
        if abs(term) < tol:
            break
        lam_pow = lam_pow * spectrum.eigenvalues
        omega_pow *= omega
    return float(np.exp(total))


@dataclass(frozen=True)
class TemporalCovariance:
    """Per-degree T x T Toeplitz covariance matrices K_n[i, j] = B[n, |i-j|]."""

    matrices: tuple

    @classmethod
    def from_spectrum(cls, spectrum):
        """Build the Toeplitz family from an AngularSpectrum whose lags are
        0, 1, ..., T-1."""
        lags = spectrum.lags
        if lags[0] != 0.0 or not np.allclose(np.diff(lags), 1.0):
            raise ValueError("temporal covariance needs unit lags starting at 0")
        mats = tuple(toeplitz(row) for row in spectrum.values)
        return cls(mats)

    @property
    def max_degree(self):
        return len(self.matrices) - 1

    @property
    def n_times(self):
        return self.matrices[0].shape[0]


def _cholesky_with_jitter(matrix):
    """Lower Cholesky factor, climbing the jitter ladder if needed.

    A matrix that is exactly zero factors to zero.  Failure past the
    ladder raises ValidityError.
    """
    t = matrix.shape[0]
    trace = float(np.trace(matrix))
    if trace == 0.0 and not matrix.any():
        return np.zeros_like(matrix)
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        pass
    for jitter in _JITTER_LADDER:
        bumped = matrix + (jitter * trace / t) * np.eye(t)
        try:
            return np.linalg.cholesky(bumped)
        except np.linalg.LinAlgError:
            continue
    raise ValidityError(
        "temporal covariance is not positive semidefinite within the jitter "
        "budget"
    )


def sample_temporal(tc, n_replicates, rng_seed):
    """Draw coefficient paths: coeffs[n, j, :, r] = L_n @ g with
    L_n L_n^T = K_n and g standard normal, independently across orders and
    replicates.

    Streams are keyed by (seed, degree, order, replicate), so replicate r
    of a run with more replicates reproduces replicate r of a smaller run
    bit for bit.
    """
    n_replicates = check_positive_int(n_replicates, "n_replicates")
    max_degree = tc.max_degree
    n_times = tc.n_times
    values = np.empty((n_coefficients(max_degree), n_times, n_replicates))
    for n in range(max_degree + 1):
        chol = _cholesky_with_jitter(tc.matrices[n])
        for j in range(1, 2 * n + 2):
            row = n * n + j - 1
            for r in range(n_replicates):
                g = keyed_rng(rng_seed, 0, n, j, r).standard_normal(n_times)
                values[row, :, r] = chol @ g
    return CoefficientField(values, max_degree)


def sample_noise_coeffs(sigma, max_degree, n_times, n_replicates, rng_seed):
    """White-noise coefficients: i.i.d. N(0, sigma**2) per (degree, order,
    time, replicate).  Projection of spatial white noise onto the
    orthonormal basis has exactly this law."""
    sigma = check_real(sigma, "sigma", low=0.0)
    n_replicates = check_positive_int(n_replicates, "n_replicates")
    n_times = check_positive_int(n_times, "n_times")
    values = np.empty((n_coefficients(max_degree), n_times, n_replicates))
    if sigma == 0.0:
        values.fill(0.0)
        return CoefficientField(values, max_degree)
    for n in range(max_degree + 1):
        for j in range(1, 2 * n + 2):
            row = n * n + j - 1
            for r in range(n_replicates):
                g = keyed_rng(rng_seed, 1, n, j, r).standard_normal(n_times)
                values[row, :, r] = sigma * g
    return CoefficientField(values, max_degree)
