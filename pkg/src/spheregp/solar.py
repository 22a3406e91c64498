"""Synthetic solar-irradiance data with an atmospheric-pressure regressor.

Deterministic physics on a polar x azimuthal meshgrid:

* declination (degrees):  23.45 * sin(2*pi*(t - 80)/183)
* zenith angle (radians), "printed" form (default):
      arccos(sin theta1) * (sin th2 + cos theta1 * cos th2 * cos th3),
  with th2 the declination in radians and th3 = pi*t/183.  The "standard"
  form applies arccos to the full trigonometric sum instead; both are
  exposed because the two differ and neither is privileged here.
* irradiance: SI = G0 * CSI * cos(ZA) / pi, clamped to 0 on the dark
  hemisphere (cos ZA < 0).
* pressure, inverted from the attenuation law
      SI = SItop * exp(-OI/(g cos ZA) * AP):
  AP = -g cos(ZA)/OI * ln(SI/SItop), masked where cos ZA <= 0 or
  SI > SItop; the spatiotemporal mean opacity index is used.
* opacity index: OI = -cos(ZA) * log(CSI)/grad(AP), with the gradient
  taken in the polar direction by central differences (one-sided at the
  boundary); masked where the gradient vanishes.

The regression dataset adds a structured long-memory random effect (unit
variance, Cauchy-subfamily covariance) and white observation noise to the
irradiance after resampling everything onto a quadrature grid.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .covariance import HyperparamVector, angular_spectrum
from .errors import ConfigError
from .measure import TemporalCovariance, sample_noise_coeffs, sample_temporal
from .sphere import (
    CoefficientField,
    FieldSample,
    analysis,
    basis_matrix,
    n_coefficients,
)
from .validation import check_positive_int, check_real

__all__ = [
    "SolarConfig",
    "SolarDataset",
    "ZENITH_PRINTED",
    "ZENITH_STANDARD",
    "declination",
    "zenith_angle",
    "solar_irradiance",
    "atmospheric_pressure",
    "opacity_index",
    "solar_maps",
    "generate_dataset",
]

ZENITH_PRINTED = "printed"
ZENITH_STANDARD = "standard"

SEASON_DAYS = 183.0


@dataclass(frozen=True)
class SolarConfig:
    """Physical constants and grids of the synthetic generator."""

    solar_constant: float = 1361.0        # W/m^2
    clear_sky_index: float = 0.8
    si_top: float = 829.5                 # W/m^2, mean flux at high-cloud top
    earth_radius: float = 6371000.0       # m
    oi_mean: float = 0.005                # spatiotemporal mean opacity index
    gravity: float = 9.80665              # m/s^2
    days: tuple = tuple(range(1, 11))     # day indices within [0, 183]
    n_polar: int = 180                    # meshgrid nodes in (0, pi)
    n_azimuth: int = 180                  # meshgrid nodes in (0, 2*pi)

    def __post_init__(self):
        check_real(self.solar_constant, "solar_constant", low=0.0, low_open=True)
        check_real(self.clear_sky_index, "clear_sky_index", low=0.0, high=1.0,
                   low_open=True, high_open=True)
        check_real(self.si_top, "si_top", low=0.0, low_open=True)
        check_real(self.earth_radius, "earth_radius", low=0.0, low_open=True)
        check_real(self.oi_mean, "oi_mean", low=0.0, low_open=True)
        check_real(self.gravity, "gravity", low=0.0, low_open=True)
        check_positive_int(self.n_polar, "n_polar")
        check_positive_int(self.n_azimuth, "n_azimuth")
        days = tuple(float(d) for d in self.days)
        if not days:
            raise ValueError("need at least one day")
        if any(d < 0.0 or d > SEASON_DAYS for d in days):
            raise ValueError(f"days must lie in [0, {SEASON_DAYS}]")
        object.__setattr__(self, "days", days)

    @property
    def si_max(self):
        return self.solar_constant * self.clear_sky_index / np.pi

    def polar_nodes(self):
        """Midpoint grid in the open interval (0, pi)."""
        n = self.n_polar
        return (np.arange(n) + 0.5) * np.pi / n

    def azimuth_nodes(self):
        """Midpoint grid in the open interval (0, 2*pi)."""
        n = self.n_azimuth
        return (np.arange(n) + 0.5) * 2.0 * np.pi / n

    def constants_dict(self):
        return {
            "solar_constant": self.solar_constant,
            "clear_sky_index": self.clear_sky_index,
            "si_top": self.si_top,
            "earth_radius": self.earth_radius,
            "oi_mean": self.oi_mean,
            "gravity": self.gravity,
            "n_polar": self.n_polar,
            "n_azimuth": self.n_azimuth,
            "days": list(self.days),
        }


def declination(t):
    """Declination angle in degrees at day t of the season."""
    t_arr = np.asarray(t, dtype=float)
    out = 23.45 * np.sin(2.0 * np.pi / SEASON_DAYS * (t_arr - 80.0))
    return float(out) if np.ndim(t) == 0 else out


def zenith_angle(t, theta1, form=ZENITH_PRINTED):
    """Zenith angle in radians at day t and polar angle theta1."""
    theta1_arr = np.asarray(theta1, dtype=float)
    th2 = np.deg2rad(declination(t))
    th3 = np.pi * np.asarray(t, dtype=float) / SEASON_DAYS
    trig = np.sin(th2) + np.cos(theta1_arr) * np.cos(th2) * np.cos(th3)
    if form == ZENITH_PRINTED:
        out = np.arccos(np.clip(np.sin(theta1_arr), -1.0, 1.0)) * trig
    elif form == ZENITH_STANDARD:
        out = np.arccos(np.clip(np.sin(theta1_arr) * trig, -1.0, 1.0))
    else:
        raise ValueError(f"unknown zenith-angle form {form!r}")
    return float(out) if np.ndim(t) == 0 and np.ndim(theta1) == 0 else out


def solar_irradiance(t, theta1, cfg, form=ZENITH_PRINTED):
    """Irradiance G0 * CSI * cos(ZA) / pi, clamped to 0 where cos ZA < 0."""
    za = zenith_angle(t, theta1, form)
    out = cfg.solar_constant * cfg.clear_sky_index * np.cos(za) / np.pi
    out = np.clip(out, 0.0, None)
    return float(out) if np.ndim(out) == 0 else out


def atmospheric_pressure(t, theta1, cfg, si, form=ZENITH_PRINTED):
    """Invert the attenuation law for the pressure regressor.

    Returns (ap, valid); entries with cos ZA <= 0 or si > si_top or
    si <= 0 are masked (valid = False, ap = nan).  si = si_top gives
    ap = 0 exactly.
    """
    si_arr = np.asarray(si, dtype=float)
    cos_za = np.cos(zenith_angle(t, theta1, form))
    cos_za, si_arr = np.broadcast_arrays(cos_za, si_arr)
    valid = (cos_za > 0.0) & (si_arr > 0.0) & (si_arr <= cfg.si_top)
    ap = np.full(si_arr.shape, np.nan)
    ratio = np.ones_like(ap)
    np.divide(si_arr, cfg.si_top, out=ratio, where=valid)
    ap[valid] = (
        -cfg.gravity * cos_za[valid] / cfg.oi_mean * np.log(ratio[valid])
    )
    if np.ndim(si) == 0 and np.ndim(t) == 0 and np.ndim(theta1) == 0:
        return float(ap.reshape(-1)[0]), bool(valid.reshape(-1)[0])
    return ap, valid


def opacity_index(t, theta1, ap_gradient, cfg, form=ZENITH_PRINTED):
    """OI = -cos(ZA) * log(CSI) / grad(AP); masked where the gradient is 0
    or undefined."""
    grad = np.asarray(ap_gradient, dtype=float)
    cos_za = np.cos(zenith_angle(t, theta1, form))
    cos_za, grad = np.broadcast_arrays(cos_za, grad)
    valid = np.isfinite(grad) & (grad != 0.0)
    oi = np.full(grad.shape, np.nan)
    oi[valid] = -cos_za[valid] * (np.log(cfg.clear_sky_index) / grad[valid])
    if np.ndim(ap_gradient) == 0:
        return float(oi.reshape(-1)[0]), bool(valid.reshape(-1)[0])
    return oi, valid


def solar_maps(cfg, form=ZENITH_PRINTED):
    """Deterministic per-day meshgrid maps.

    Returns dict with arrays of shape (n_days, n_polar, n_azimuth):
    si, ap, ap_valid, oi, oi_valid.  The physics depends on the polar
    angle only, so maps are constant along the azimuth.
    """
    theta1 = cfg.polar_nodes()
    n_az = cfg.n_azimuth
    n_days = len(cfg.days)
    shape = (n_days, cfg.n_polar, n_az)
    si = np.empty(shape)
    ap = np.empty(shape)
    ap_valid = np.empty(shape, dtype=bool)
    oi = np.empty(shape)
    oi_valid = np.empty(shape, dtype=bool)
    for d, day in enumerate(cfg.days):
        si_col = solar_irradiance(day, theta1, cfg, form)
        ap_col, valid_col = atmospheric_pressure(day, theta1, cfg, si_col, form)
        grad_col = np.gradient(ap_col, theta1)
        oi_col, oi_valid_col = opacity_index(day, theta1, grad_col, cfg, form)
        si[d] = si_col[:, None]
        ap[d] = ap_col[:, None]
        ap_valid[d] = valid_col[:, None]
        oi[d] = oi_col[:, None]
        oi_valid[d] = oi_valid_col[:, None]
    return {"si": si, "ap": ap, "ap_valid": ap_valid, "oi": oi,
            "oi_valid": oi_valid}


def _resample_to_grid(mesh_values, cfg, grid):
    """Bilinear (colat, lon) interpolation from the meshgrid onto a
    quadrature grid; longitudes are wrapped periodically."""
    polar = cfg.polar_nodes()
    azimuth = cfg.azimuth_nodes()
    step = 2.0 * np.pi / cfg.n_azimuth
    az_ext = np.concatenate(([azimuth[0] - step], azimuth, [azimuth[-1] + step]))
    vals_ext = np.concatenate(
        (mesh_values[:, -1:], mesh_values, mesh_values[:, :1]), axis=1
    )
    interp = RegularGridInterpolator(
        (polar, az_ext), vals_ext, method="linear", bounds_error=True
    )
    colat_mesh, lon_mesh = np.meshgrid(
        grid.colatitudes, grid.longitudes, indexing="ij"
    )
    pts = np.column_stack([colat_mesh.ravel(), lon_mesh.ravel()])
    return interp(pts).reshape(grid.n_lat, grid.n_lon)


@dataclass
class SolarDataset:
    """Synthetic regression dataset resampled onto a quadrature grid.

    Fields of shape (T, n_lat, n_lon): si_grid, ap_grid, ap_valid_grid;
    response has an extra replicate axis (T, n_lat, n_lon, R).  The
    coefficient fields follow the packed (K, T, R) layout: truth_coeffs
    holds the noiseless construction (irradiance plus structured effect),
    observed_coeffs adds the white-noise coefficients.
    """

    config: SolarConfig
    grid: object
    max_degree: int
    effect_hp: HyperparamVector
    noise_sigma: float
    seed: int
    si_grid: np.ndarray
    ap_grid: np.ndarray
    ap_valid_grid: np.ndarray
    response: np.ndarray
    truth_coeffs: CoefficientField
    observed_coeffs: CoefficientField
    maps: dict


def generate_dataset(
    cfg, grid, effect_hp, noise_sigma, n_replicates, seed,
    max_degree, form=ZENITH_PRINTED,
):
    """Build the regression dataset.

    response = irradiance + structured random effect + white noise, all
    living on the quadrature grid.  The structured effect and the noise
    are generated in coefficient space (degrees <= max_degree) and
    synthesized, so the observed coefficient field carries exactly the
    additive-noise law the spectral machinery assumes; the irradiance
    enters the truth through its band-limited projection.
    """
    noise_sigma = check_real(noise_sigma, "noise_sigma", low=0.0)
    n_replicates = check_positive_int(n_replicates, "n_replicates")
    if max_degree > grid.n_lat - 1:
        raise ConfigError(
            f"max_degree {max_degree} not resolvable on an n_lat={grid.n_lat} grid"
        )
    maps = solar_maps(cfg, form)
    n_days = len(cfg.days)
    si_grid = np.empty((n_days, grid.n_lat, grid.n_lon))
    ap_grid = np.empty_like(si_grid)
    ap_valid_grid = np.empty(si_grid.shape, dtype=bool)
    for d in range(n_days):
        si_grid[d] = _resample_to_grid(maps["si"][d], cfg, grid)
        ap_fill = np.where(maps["ap_valid"][d], maps["ap"][d], 0.0)
        ap_grid[d] = _resample_to_grid(ap_fill, cfg, grid)
        ap_valid_grid[d] = (
            _resample_to_grid(maps["ap_valid"][d].astype(float), cfg, grid) >= 1.0
        )

    # structured long-memory effect over the season days
    lags = np.arange(n_days, dtype=float)
    spectrum = angular_spectrum(effect_hp, lags, max_degree)
    effect = sample_temporal(
        TemporalCovariance.from_spectrum(spectrum), n_replicates, seed
    )
    noise = sample_noise_coeffs(noise_sigma, max_degree, n_days, n_replicates, seed)

    k = n_coefficients(max_degree)
    si_coeffs = np.empty((k, n_days))
    for d in range(n_days):
        si_coeffs[:, d] = analysis(FieldSample(si_grid[d], grid), max_degree)
    truth_vals = si_coeffs[:, :, None] + effect.values
    observed_vals = truth_vals + noise.values

    basis = basis_matrix(grid, max_degree)
    rand_part = np.tensordot(
        effect.values + noise.values, basis, axes=(0, 0)
    )  # (T, R, n_lat, n_lon)
    response = si_grid[:, None] + rand_part
    response = np.moveaxis(response, 1, -1)  # (T, n_lat, n_lon, R)

    return SolarDataset(
        config=cfg,
        grid=grid,
        max_degree=max_degree,
        effect_hp=effect_hp,
        noise_sigma=noise_sigma,
        seed=int(seed),
        si_grid=si_grid,
        ap_grid=ap_grid,
        ap_valid_grid=ap_valid_grid,
        response=response,
        truth_coeffs=CoefficientField(truth_vals, max_degree),
        observed_coeffs=CoefficientField(observed_vals, max_degree),
        maps=maps,
    )
