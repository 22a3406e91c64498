"""Real spherical harmonics, Gauss-Legendre grids and transforms on the
unit sphere.

Conventions used throughout the package:

* The sphere carries the *normalized* surface measure (total mass 1), so
  quadrature weights sum to 1 and the constant function 1 is the degree-0
  basis element.
* Basis functions are real and orthonormal with respect to that measure;
  they are sqrt(4*pi) times the real harmonics orthonormal under the plain
  surface measure.  The degree-n addition theorem then reads

      sum_j S[n,j](x) * S[n,j](y) = (2n+1) * P_n(cos gamma),

  with gamma the great-circle angle between x and y.
* Within degree n the order index j runs 1..2n+1.  The signed azimuthal
  order is m = j - (n + 1): negative m selects the sin(|m|*lon) component,
  m = 0 the zonal component, positive m the cos(m*lon) component.  The
  Condon-Shortley phase is omitted.
* Grids are Gauss-Legendre in colatitude (exact for zonal polynomials of
  degree <= 2*n_lat - 1) times uniform longitudes.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import ResolutionError
from .validation import as_float_array, check_nonneg_int, check_positive_int

__all__ = [
    "SphericalGrid",
    "FieldSample",
    "CoefficientField",
    "build_grid",
    "legendre",
    "legendre_table",
    "eval_harmonic",
    "harmonic_index",
    "degree_order_arrays",
    "basis_matrix",
    "analysis",
    "synthesis",
    "zonal_kernel",
    "cos_angle",
]


# ---------------------------------------------------------------------------
# Legendre polynomials
# ---------------------------------------------------------------------------

def legendre(n, u):
    """Legendre polynomial P_n(u) by the stable three-term recurrence.

    ``u`` may be a scalar or an array; values must lie in [-1, 1].
    P_n(1) = 1 exactly.
    """
    n = check_nonneg_int(n, "degree")
    u_arr = np.asarray(u, dtype=float)
    if np.any(np.abs(u_arr) > 1.0):
        raise ValueError("legendre argument must lie in [-1, 1]")
    table = legendre_table(n, np.atleast_1d(u_arr).ravel())
    out = table[n].reshape(u_arr.shape)
    return float(out) if np.isscalar(u) or u_arr.ndim == 0 else out


def legendre_table(max_degree, u):
    """All Legendre polynomials P_0..P_max at points ``u``; shape
    (max_degree + 1, len(u))."""
    u = np.asarray(u, dtype=float)
    table = np.empty((max_degree + 1, u.size))
    table[0] = 1.0
    if max_degree >= 1:
        table[1] = u
    for k in range(2, max_degree + 1):
        table[k] = ((2 * k - 1) * u * table[k - 1] - (k - 1) * table[k - 2]) / k
    return table


def _orthonormal_assoc_legendre(max_degree, u):
    """Associated Legendre functions normalized to unit L2([-1,1]) norm.

    Returns Q with shape (max_degree+1, max_degree+1, len(u)) where
    Q[n, m] = sqrt((2n+1)/2 * (n-m)!/(n+m)!) * P_n^m(u) for m <= n,
    Condon-Shortley phase omitted.  The normalized recurrence keeps every
    intermediate O(1), so it is stable far beyond degree 30.
    """
    u = np.asarray(u, dtype=float)
    s = np.sqrt(np.clip(1.0 - u * u, 0.0, None))  # sin(theta) >= 0
    nmax = max_degree
    q = np.zeros((nmax + 1, nmax + 1, u.size))
    q[0, 0] = 1.0 / np.sqrt(2.0)
    # diagonal: Q[m,m]
    for m in range(1, nmax + 1):
        q[m, m] = np.sqrt((2 * m + 1) / (2.0 * m)) * s * q[m - 1, m - 1]
    # first off-diagonal: Q[m+1, m]
    for m in range(0, nmax):
        q[m + 1, m] = np.sqrt(2 * m + 3.0) * u * q[m, m]
    # upward in degree
    for m in range(0, nmax + 1):
        for n in range(m + 2, nmax + 1):
            a = np.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
            b = np.sqrt(
                (2.0 * n + 1.0)
                * ((n - 1.0) ** 2 - m * m)
                / ((2.0 * n - 3.0) * (n * n - m * m))
            )
            q[n, m] = a * u * q[n - 1, m] - b * q[n - 2, m]
    return q


# ---------------------------------------------------------------------------
# Harmonic indexing
# ---------------------------------------------------------------------------

def harmonic_index(degree, order):
    """Flat index of (degree n, order j) in the packed coefficient layout.

    Degree n occupies positions n**2 .. (n+1)**2 - 1; within a degree the
    order j runs 1..2n+1.
    """
    n = check_nonneg_int(degree, "degree")
    j = check_positive_int(order, "order")
    if j > 2 * n + 1:
        raise ValueError(f"order must lie in 1..{2 * n + 1} for degree {n}, got {j}")
    return n * n + j - 1


def degree_order_arrays(max_degree):
    """Arrays (degrees, orders) of length (max_degree+1)**2 matching the
    packed coefficient layout."""
    degrees = np.concatenate(
        [np.full(2 * n + 1, n, dtype=int) for n in range(max_degree + 1)]
    )
    orders = np.concatenate(
        [np.arange(1, 2 * n + 2, dtype=int) for n in range(max_degree + 1)]
    )
    return degrees, orders


def n_coefficients(max_degree):
    return (max_degree + 1) ** 2


def eval_harmonic(degree, order, colat, lon):
    """Real spherical harmonic S[n,j] at (colat, lon), orthonormal under
    the normalized measure.  ``colat``/``lon`` may be scalars or arrays."""
    n = check_nonneg_int(degree, "degree")
    j = check_positive_int(order, "order")
    if j > 2 * n + 1:
        raise ValueError(f"order must lie in 1..{2 * n + 1} for degree {n}, got {j}")
    colat_arr = np.atleast_1d(np.asarray(colat, dtype=float))
    lon_arr = np.atleast_1d(np.asarray(lon, dtype=float))
    colat_arr, lon_arr = np.broadcast_arrays(colat_arr, lon_arr)
    u = np.cos(colat_arr.ravel())
    m = j - (n + 1)
    q = _orthonormal_assoc_legendre(n, u)[n, abs(m)]
    if m == 0:
        vals = np.sqrt(2.0) * q
    elif m > 0:
        vals = 2.0 * q * np.cos(m * lon_arr.ravel())
    else:
        vals = 2.0 * q * np.sin(-m * lon_arr.ravel())
    vals = vals.reshape(colat_arr.shape)
    if np.isscalar(colat) and np.isscalar(lon):
        return float(vals.reshape(-1)[0])
    return vals


# ---------------------------------------------------------------------------
# Grids and samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalGrid:
    """Quadrature grid on the sphere under the normalized measure.

    colatitudes : (n_lat,) strictly increasing in (0, pi)
    longitudes  : (n_lon,) strictly increasing in [0, 2*pi)
    weights     : (n_lat, n_lon) nonnegative, summing to 1
    """

    colatitudes: np.ndarray
    longitudes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        colat = as_float_array(self.colatitudes, "colatitudes", ndim=1)
        lon = as_float_array(self.longitudes, "longitudes", ndim=1)
        w = as_float_array(self.weights, "weights", shape=(colat.size, lon.size))
        if np.any(colat <= 0.0) or np.any(colat >= np.pi):
            raise ValueError("colatitudes must lie strictly inside (0, pi)")
        if np.any(np.diff(colat) <= 0.0):
            raise ValueError("colatitudes must be strictly increasing")
        if np.any(lon < 0.0) or np.any(lon >= 2.0 * np.pi):
            raise ValueError("longitudes must lie in [0, 2*pi)")
        if lon.size > 1 and np.any(np.diff(lon) <= 0.0):
            raise ValueError("longitudes must be strictly increasing")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("quadrature weights must sum to 1")
        object.__setattr__(self, "colatitudes", colat)
        object.__setattr__(self, "longitudes", lon)
        object.__setattr__(self, "weights", w)

    @property
    def n_lat(self):
        return self.colatitudes.size

    @property
    def n_lon(self):
        return self.longitudes.size

    @property
    def n_nodes(self):
        return self.n_lat * self.n_lon


def build_grid(n_lat, n_lon):
    """Gauss-Legendre colatitudes x uniform longitudes, weights normalized
    to total mass 1."""
    n_lat = check_positive_int(n_lat, "n_lat")
    n_lon = check_positive_int(n_lon, "n_lon")
    u, w = roots_legendre(n_lat)  # u ascending in (-1, 1), sum(w) = 2
    colat = np.arccos(u)[::-1].copy()  # ascending colatitudes
    lat_w = w[::-1].copy() / 2.0
    lon = 2.0 * np.pi * np.arange(n_lon) / n_lon
    weights = np.outer(lat_w, np.full(n_lon, 1.0 / n_lon))
    return SphericalGrid(colat, lon, weights)


@dataclass(frozen=True)
class FieldSample:
    """Real field sampled on a SphericalGrid: values[lat, lon]."""

    values: np.ndarray
    grid: SphericalGrid

    def __post_init__(self):
        vals = as_float_array(
            self.values, "values", shape=(self.grid.n_lat, self.grid.n_lon)
        )
        object.__setattr__(self, "values", vals)


@dataclass
class CoefficientField:
    """Packed spherical-harmonic coefficients over time and replicates.

    values : ((max_degree+1)**2, T, R); the flat axis follows the packed
    (degree, order) layout of :func:`harmonic_index`.
    """

    values: np.ndarray
    max_degree: int

    def __post_init__(self):
        self.max_degree = check_nonneg_int(self.max_degree, "max_degree")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 3:
            raise ValueError(
                f"coefficient values must be 3-d (coeff, time, replicate); "
                f"got shape {vals.shape}"
            )
        if vals.shape[0] != n_coefficients(self.max_degree):
            raise ValueError(
                f"coefficient axis must have length {n_coefficients(self.max_degree)} "
                f"for max_degree {self.max_degree}, got {vals.shape[0]}"
            )
        self.values = vals

    @property
    def n_times(self):
        return self.values.shape[1]

    @property
    def n_replicates(self):
        return self.values.shape[2]

    def coeff(self, degree, order):
        return self.values[harmonic_index(degree, order)]

    def degree_slice(self, degree):
        n = degree
        return self.values[n * n:(n + 1) * (n + 1)]

    def truncated(self, max_degree):
        """View of the coefficients restricted to degrees <= max_degree."""
        if max_degree > self.max_degree:
            raise ValueError("cannot truncate to a higher degree")
        return CoefficientField(
            self.values[: n_coefficients(max_degree)], max_degree
        )


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

_BASIS_CACHE = {}


def basis_matrix(grid, max_degree):
    """Basis values S[n,j] at all grid nodes; shape (K, n_lat, n_lon) with
    K = (max_degree+1)**2.  Cached per (grid nodes, max_degree)."""
    key = (
        max_degree,
        grid.colatitudes.tobytes(),
        grid.longitudes.tobytes(),
    )
    cached = _BASIS_CACHE.get(key)
    if cached is not None:
        return cached
    u = np.cos(grid.colatitudes)
    q = _orthonormal_assoc_legendre(max_degree, u)  # (N+1, N+1, n_lat)
    lon = grid.longitudes
    basis = np.empty((n_coefficients(max_degree), grid.n_lat, grid.n_lon))
    for n in range(max_degree + 1):
        for j in range(1, 2 * n + 2):
            m = j - (n + 1)
            if m == 0:
                block = np.sqrt(2.0) * q[n, 0][:, None] * np.ones(grid.n_lon)
            elif m > 0:
                block = 2.0 * q[n, m][:, None] * np.cos(m * lon)[None, :]
            else:
                block = 2.0 * q[n, -m][:, None] * np.sin(-m * lon)[None, :]
            basis[harmonic_index(n, j)] = block
    if len(_BASIS_CACHE) > 32:
        _BASIS_CACHE.clear()
    _BASIS_CACHE[key] = basis
    return basis


def check_resolution(grid, max_degree):
    """Grid must resolve degrees up to max_degree: n_lat >= max_degree + 1
    and n_lon >= 2*max_degree + 1."""
    if grid.n_lat < max_degree + 1 or grid.n_lon < 2 * max_degree + 1:
        raise ResolutionError(
            f"grid ({grid.n_lat}, {grid.n_lon}) cannot resolve degree "
            f"{max_degree}; need n_lat >= {max_degree + 1} and "
            f"n_lon >= {2 * max_degree + 1}"
        )


def analysis(fld, max_degree):
    """Project a field onto the basis: coeff[n,j] = sum w * field * S[n,j].

    Exact for bandlimited fields when the grid resolves max_degree.
    Returns the packed (K,) coefficient vector.
    """
    check_resolution(fld.grid, max_degree)
    basis = basis_matrix(fld.grid, max_degree)
    weighted = fld.grid.weights * fld.values
    return np.tensordot(basis, weighted, axes=([1, 2], [0, 1]))


def synthesis(coeffs, grid):
    """Pointwise sum of coefficients times basis values; inverse of
    :func:`analysis` on bandlimited fields."""
    coeffs = as_float_array(coeffs, "coeffs", ndim=1)
    max_degree = int(round(np.sqrt(coeffs.size))) - 1
    if n_coefficients(max_degree) != coeffs.size:
        raise ValueError(
            f"coefficient vector length {coeffs.size} is not a perfect square"
        )
    basis = basis_matrix(grid, max_degree)
    values = np.tensordot(coeffs, basis, axes=(0, 0))
    return FieldSample(values, grid)


# ---------------------------------------------------------------------------
# Zonal kernels
# ---------------------------------------------------------------------------

def cos_angle(point_a, point_b):
    """Cosine of the great-circle angle between (colat, lon) points."""
    ca, la = point_a
    cb, lb = point_b
    c = np.cos(ca) * np.cos(cb) + np.sin(ca) * np.sin(cb) * np.cos(
        np.asarray(la) - np.asarray(lb)
    )
    return np.clip(c, -1.0, 1.0)


def zonal_kernel(degree, point_a, point_b):
    """Degree-n reproducing kernel (2n+1) * P_n(cos gamma); equals the
    explicit order sum over the degree-n basis."""
    return (2 * degree + 1) * legendre(degree, cos_angle(point_a, point_b))
