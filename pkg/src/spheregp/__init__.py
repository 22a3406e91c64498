"""Spectral empirical-Bayes Gaussian process regression for time-indexed
random fields on the unit sphere.

The pipeline: simulate time-correlated spherical fields from Gneiting-class
covariances, select hyperparameters per time step by maximizing the
spectral marginal likelihood over prior draws, shrink observed harmonic
coefficients through the conjugate posterior, and score the results with
per-eigenspace error, bias and variance diagnostics.
"""

__version__ = "0.1.0"

from .covariance import (
    AngularSpectrum,
    HyperparamVector,
    angular_spectrum,
    bessel_k,
    kernel,
    phi_cauchy,
    phi_matern,
    psi,
    reconstruct_kernel,
)
from .crossval import CvReport, make_folds, run_cv
from .empirical_bayes import (
    TimeVaryingEstimates,
    marginal_loglik_closed,
    marginal_loglik_mc,
    ml2_fit,
)
from .errors import ConfigError, ResolutionError, SphereGPError, ValidityError
from .estimator import EmpiricalBayesGPRegressor, SphericalHarmonicTransform
from .measure import (
    TemporalCovariance,
    TruncatedSpectrum,
    fredholm_determinant,
    fredholm_determinant_series,
    keyed_rng,
    log_density,
    sample_noise_coeffs,
    sample_temporal,
)
from .model import (
    PriorSpec,
    SimulationConfig,
    TruncationScheme,
    sample_prior,
    simulate_replicates,
    truncation_order,
)
from .posterior import (
    BiasNorms,
    PosteriorSummary,
    bias_terms,
    emqe,
    estimates_spectrum,
    posterior_coeff_means,
    posterior_eigenvalue,
    posterior_field,
    posterior_mean_coeff,
    posterior_summary,
    time_correlation,
    variance_decomposition,
)
from .solar import (
    SolarConfig,
    SolarDataset,
    atmospheric_pressure,
    declination,
    generate_dataset,
    opacity_index,
    solar_irradiance,
    solar_maps,
    zenith_angle,
)
from .sphere import (
    CoefficientField,
    FieldSample,
    SphericalGrid,
    analysis,
    build_grid,
    eval_harmonic,
    harmonic_index,
    legendre,
    synthesis,
    zonal_kernel,
)
