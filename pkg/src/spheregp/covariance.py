"""Gneiting-class space-time covariances restricted to the sphere, and the
projection of a zonal kernel onto its per-degree angular spectrum.

The kernel is evaluated in the chord parameterization

    C(theta, tau) = phi( [2 sin(theta/2)]**2 / psi(tau**2) ) / psi(tau**2),

with psi(u) = (1 + u**alpha)**beta and phi either a generalized Cauchy
function (subfamily "cauchy": long memory / rough paths) or a Matern
function (subfamily "matern": smooth paths).  The remaining scale
constants of the class are held at 1, so C(0, 0) = 1 is the latent field
variance.

The per-degree spectrum B[n, lag] diagonalizes the kernel in the
orthonormal basis of :mod:`spheregp.sphere`:

    C(theta, tau_l) = sum_n (2n+1) * B[n, l] * P_n(cos theta).
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .bessel import bessel_k
from .errors import ValidityError
from .sphere import legendre_table
from .validation import as_float_array, check_nonneg_int, check_real

__all__ = [
    "SUBFAMILY_CAUCHY",
    "SUBFAMILY_MATERN",
    "HyperparamVector",
    "AngularSpectrum",
    "psi",
    "phi_cauchy",
    "phi_matern",
    "bessel_k",
    "kernel",
    "angular_spectrum",
    "reconstruct_kernel",
]

SUBFAMILY_CAUCHY = "cauchy"
SUBFAMILY_MATERN = "matern"

_SUBFAMILY_ALIASES = {
    "cauchy": SUBFAMILY_CAUCHY,
    "s1": SUBFAMILY_CAUCHY,
    "1": SUBFAMILY_CAUCHY,
    "matern": SUBFAMILY_MATERN,
    "s2": SUBFAMILY_MATERN,
    "2": SUBFAMILY_MATERN,
}

# negative projection values of magnitude below this are quadrature noise
_NEGATIVE_CLAMP = 1.0e-12


def canonical_subfamily(name):
    key = str(name).strip().lower()
    if key not in _SUBFAMILY_ALIASES:
        raise ValueError(
            f"unknown subfamily {name!r}; expected one of "
            f"{sorted(set(_SUBFAMILY_ALIASES))}"
        )
    return _SUBFAMILY_ALIASES[key]


@dataclass(frozen=True)
class HyperparamVector:
    """Covariance hyperparameters plus the observation-noise scale sigma.

    cauchy subfamily: (gamma, nu) control spatial regularity, (alpha, beta)
    temporal memory.  matern subfamily: varpi controls spatial regularity.
    The latent field variance is fixed at 1; sigma scales the additive
    white observation noise.
    """

    subfamily: str
    alpha: float
    beta: float
    sigma: float
    gamma: float = None
    nu: float = None
    varpi: float = None

    def __post_init__(self):
        object.__setattr__(self, "subfamily", canonical_subfamily(self.subfamily))
        check_real(self.alpha, "alpha", low=0.0, high=1.0, low_open=True)
        check_real(self.beta, "beta", low=0.0, high=1.0, low_open=True)
        check_real(self.sigma, "sigma", low=0.0)
        if self.subfamily == SUBFAMILY_CAUCHY:
            check_real(self.gamma, "gamma", low=0.0, high=1.0, low_open=True)
            check_real(self.nu, "nu", low=0.0, low_open=True)
            if self.varpi is not None:
                raise ValueError("varpi is not a cauchy-subfamily parameter")
        else:
            check_real(self.varpi, "varpi", low=0.0, low_open=True)
            if self.gamma is not None or self.nu is not None:
                raise ValueError("gamma/nu are not matern-subfamily parameters")

    def spatial_phi(self, u):
        if self.subfamily == SUBFAMILY_CAUCHY:
            return phi_cauchy(u, self.gamma, self.nu)
        return phi_matern(u, self.varpi)

    def to_dict(self):
        out = {"subfamily": self.subfamily, "alpha": self.alpha,
               "beta": self.beta, "sigma": self.sigma}
        if self.subfamily == SUBFAMILY_CAUCHY:
            out.update(gamma=self.gamma, nu=self.nu)
        else:
            out.update(varpi=self.varpi)
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        subfamily = canonical_subfamily(data.pop("subfamily"))
        allowed = {"alpha", "beta", "sigma", "gamma", "nu", "varpi"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown hyperparameter fields: {sorted(unknown)}")
        return cls(subfamily=subfamily, **data)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# Component functions
# ---------------------------------------------------------------------------

def psi(u, alpha, beta):
    """Temporal-memory function (1 + u**alpha)**beta; psi(0) = 1."""
    u = np.asarray(u, dtype=float)
    out = (1.0 + np.power(u, alpha)) ** beta
    return float(out) if out.ndim == 0 else out


def phi_cauchy(u, gamma, nu):
    """Generalized Cauchy function (1 + u**gamma)**(-nu); completely
    monotone, phi(0) = 1, strictly decreasing."""
    u = np.asarray(u, dtype=float)
    out = (1.0 + np.power(u, gamma)) ** (-nu)
    return float(out) if out.ndim == 0 else out


def phi_matern(u, varpi):
    """Matern function of the squared argument:

        phi(u) = (2**(varpi-1) Gamma(varpi))**(-1) u**(varpi/2) K_varpi(sqrt(u))

    extended by continuity to phi(0) = 1.  varpi = 1/2 gives exp(-sqrt(u)).
    """
    check_real(varpi, "varpi", low=0.0, low_open=True)
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u_arr < 0.0):
        raise ValueError("phi_matern requires u >= 0")
    out = np.ones_like(u_arr)
    pos = u_arr > 0.0
    if np.any(pos):
        root = np.sqrt(u_arr[pos])
        norm = 1.0 / (2.0 ** (varpi - 1.0) * math.gamma(varpi))
        # K underflows for large arguments; the product is then 0.
        with np.errstate(under="ignore"):
            vals = norm * root ** varpi * bessel_k(varpi, root)
        out[pos] = vals
    if np.ndim(u) == 0:
        return float(out[0])
    return out.reshape(np.shape(u))


def kernel(theta, tau, hp):
    """Space-time covariance at angular separation theta in [0, pi] and
    temporal lag tau."""
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr < -1e-12) or np.any(theta_arr > np.pi + 1e-12):
        raise ValueError("theta must lie in [0, pi]")
    scale = psi(np.asarray(tau, dtype=float) ** 2, hp.alpha, hp.beta)
    chord2 = (2.0 * np.sin(theta_arr / 2.0)) ** 2
    out = hp.spatial_phi(chord2 / scale) / scale
    return float(out) if np.ndim(theta) == 0 and np.ndim(tau) == 0 else out


# ---------------------------------------------------------------------------
# Angular spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngularSpectrum:
    """Per-degree covariance values B[n, l] over temporal lags.

    values : (max_degree + 1, n_lags)
    lags   : (n_lags,) temporal lags in sampling-interval units
    """

    values: np.ndarray
    lags: np.ndarray

    def __post_init__(self):
        vals = as_float_array(self.values, "values", ndim=2)
        lags = as_float_array(self.lags, "lags", ndim=1)
        if vals.shape[1] != lags.size:
            raise ValueError("spectrum values and lags disagree on lag count")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "lags", lags)

    @property
    def max_degree(self):
        return self.values.shape[0] - 1

    @property
    def n_lags(self):
        return self.lags.size

    def marginal(self):
        """Lag-0 variances B[n, 0] (requires lag 0 to be present first)."""
        if self.lags[0] != 0.0:
            raise ValueError("spectrum does not start at lag 0")
        return self.values[:, 0]

    def trace(self):
        """sum_n (2n+1) * B[n, 0]: the truncated total field variance."""
        mult = 2 * np.arange(self.max_degree + 1) + 1
        return float(mult @ self.marginal())


def default_quad_order(max_degree):
    return 2 * max_degree + 32


def angular_spectrum(hp, lags, max_degree, quad_order=None):
    """Project the kernel onto Legendre polynomials:

        B[n, l] = 1/2 * integral_{-1}^{1} C(arccos u, lag_l) P_n(u) du

    by Gauss-Legendre quadrature.  Inverts the reconstruction formula
    C(theta, tau) = sum_n (2n+1) B[n, l] P_n(cos theta).

    Negative values within quadrature noise (1e-12) are clamped to zero; a
    lag-0 value below -1e-12 means the kernel is not positive definite on
    the sphere at these hyperparameters/precision and raises ValidityError.
    """
    max_degree = check_nonneg_int(max_degree, "max_degree")
    if quad_order is None:
        quad_order = default_quad_order(max_degree)
    if quad_order < max_degree + 2:
        raise ValueError(
            f"quad_order must be >= max_degree + 2 = {max_degree + 2}, "
            f"got {quad_order}"
        )
    lags = np.atleast_1d(np.asarray(lags, dtype=float))
    u, w = roots_legendre(quad_order)
    theta = np.arccos(u)
    p_table = legendre_table(max_degree, u)  # (N+1, Q)
    kernel_vals = np.empty((quad_order, lags.size))
    for idx, lag in enumerate(lags):
        kernel_vals[:, idx] = kernel(theta, lag, hp)
    b = 0.5 * (p_table * w) @ kernel_vals  # (N+1, n_lags)
    small_negative = (b < 0.0) & (b > -_NEGATIVE_CLAMP)
    b[small_negative] = 0.0
    lag0 = np.flatnonzero(lags == 0.0)
    if lag0.size:
        bad = b[:, lag0[0]] < -_NEGATIVE_CLAMP
        if np.any(bad):
            degrees = np.flatnonzero(bad)
            raise ValidityError(
                "negative lag-0 angular variance at degrees "
                f"{degrees.tolist()}: kernel not positive definite on the "
                "sphere at the given hyperparameters/precision"
            )
    return AngularSpectrum(b, lags)


def reconstruct_kernel(spectrum, theta, lag_index):
    """Evaluate sum_n (2n+1) B[n, lag_index] P_n(cos theta)."""
    lag_index = int(lag_index)
    if not 0 <= lag_index < spectrum.n_lags:
        raise ValueError(f"lag index {lag_index} outside 0..{spectrum.n_lags - 1}")
    theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
    u = np.cos(theta_arr)
    p_table = legendre_table(spectrum.max_degree, u)
    mult = 2 * np.arange(spectrum.max_degree + 1) + 1
    out = (mult * spectrum.values[:, lag_index]) @ p_table
    if np.ndim(theta) == 0:
        return float(out[0])
    return out.reshape(np.shape(theta))
