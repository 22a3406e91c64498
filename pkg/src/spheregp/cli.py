"""Configuration-driven command-line front end.

Subcommands: simulate, fit, predict, diagnose, solar, cv.  Every command
reads a flat JSON config, writes its outputs plus a manifest sufficient to
re-run it bit-identically into --out, and exits with 0 on success, 2 on
configuration errors, 3 on numerical-validity errors, 4 on I/O errors.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .covariance import HyperparamVector, angular_spectrum, canonical_subfamily
from .crossval import run_cv
from .empirical_bayes import EVALUATOR_CLOSED, EVALUATOR_MC, ml2_fit
from .errors import ConfigError, ValidityError
from .io import (
    read_coeffs_csv,
    read_estimates_csv,
    write_coeffs_csv,
    write_estimates_csv,
    write_field_csv,
    write_hyperparams_json,
    write_manifest,
    write_matrix_csv,
    write_spectrum_csv,
    write_table_csv,
)
from .measure import keyed_rng
from .model import (
    PriorSpec,
    SimulationConfig,
    TruncationScheme,
    sample_prior,
    simulate_replicates,
    truncation_order,
)
from .posterior import (
    bias_terms,
    emqe,
    estimates_spectrum,
    posterior_coeff_means,
    posterior_summary,
    time_correlation,
)
from .solar import SolarConfig, ZENITH_PRINTED, ZENITH_STANDARD, generate_dataset
from .sphere import build_grid, synthesis

_PROG = "spheregp"


# ---------------------------------------------------------------------------
# Config plumbing
# ---------------------------------------------------------------------------

def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: top level must be a JSON object")
    return data


def _get(cfg, key, kind, default=None, required=False):
    if key not in cfg:
        if required:
            raise ConfigError(f"config field '{key}' is required")
        return default
    value = cfg[key]
    try:
        if kind is int:
            if isinstance(value, bool) or int(value) != value:
                raise ValueError
            return int(value)
        if kind is float:
            return float(value)
        if kind is str:
            if not isinstance(value, str):
                raise ValueError
            return value
        if kind is list:
            if not isinstance(value, list):
                raise ValueError
            return value
        if kind is dict:
            if not isinstance(value, dict):
                raise ValueError
            return value
    except (TypeError, ValueError):
        pass
    raise ConfigError(f"config field '{key}' must be of type {kind.__name__}, got {value!r}")


def _scheme_from_config(cfg):
    kind = _get(cfg, "TR_scheme", str, default="log")
    if kind not in ("log", "power"):
        raise ConfigError("config field 'TR_scheme' must be 'log' or 'power'")
    rho = _get(cfg, "rho", float)
    try:
        return TruncationScheme(kind, rho)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _seed(cfg, args):
    if args.seed is not None:
        return int(args.seed)
    return _get(cfg, "seed", int, default=0)


def _hyperparams_from_config(cfg, key="hyperparameters"):
    raw = _get(cfg, key, dict)
    if raw is None:
        return None
    try:
        return HyperparamVector.from_dict(raw)
    except ValueError as exc:
        raise ConfigError(f"config field '{key}': {exc}") from exc


def _prior_from_config(cfg, subfamily):
    try:
        return PriorSpec(subfamily)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _out_dir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _manifest(args, cfg, extra=None):
    payload = {
        "package": _PROG,
        "version": __version__,
        "command": args.command,
        "config": cfg,
        "seed": None,
        "inputs": {},
    }
    if extra:
        payload.update(extra)
    return payload


def _metadata(cfg, seed, max_degree):
    return {
        "scheme": _get(cfg, "TR_scheme", str, default="log"),
        "TR": max_degree,
        "T": _get(cfg, "T", int, default=""),
        "N_lat": _get(cfg, "N_lat", int, default=""),
        "N_lon": _get(cfg, "N_lon", int, default=""),
        "M": _get(cfg, "M", int, default=""),
        "R": _get(cfg, "R", int, default=""),
        "seed": seed,
    }


def _check_pipeline_metadata(meta, cfg, max_degree):
    """Refuse inputs whose recorded truncation/grid disagree with the
    current config."""
    checks = {
        "TR": max_degree,
        "N_lat": _get(cfg, "N_lat", int),
        "N_lon": _get(cfg, "N_lon", int),
    }
    for key, expected in checks.items():
        if expected is None or key not in meta or meta[key] == "":
            continue
        if int(meta[key]) != int(expected):
            raise ConfigError(
                f"input metadata {key}={meta[key]} disagrees with the "
                f"config value {expected}"
            )


def _display_times(cfg, n_times):
    times = _get(cfg, "display_times", list, default=[])
    out = []
    for t in times:
        if not isinstance(t, int) or not 0 <= t < n_times:
            raise ConfigError(
                f"display_times entries must be integers in 0..{n_times - 1}"
            )
        out.append(t)
    return out


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_simulate(args):
    cfg = _load_config(args.config)
    seed = _seed(cfg, args)
    scheme = _scheme_from_config(cfg)
    subfamily = canonical_subfamily(_get(cfg, "subfamily", str, required=True))
    try:
        sim_cfg = SimulationConfig(
            n_times=_get(cfg, "T", int, required=True),
            n_lat=_get(cfg, "N_lat", int, required=True),
            n_lon=_get(cfg, "N_lon", int, required=True),
            n_candidates=_get(cfg, "M", int, default=1),
            n_replicates=_get(cfg, "R", int, required=True),
            scheme=scheme,
            subfamily=subfamily,
            seed=seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    hp = _hyperparams_from_config(cfg)
    if hp is None:
        prior = _prior_from_config(cfg, subfamily)
        gen_seed = int(keyed_rng(seed, 5).integers(2 ** 63))
        hp = sample_prior(prior, 1, gen_seed)[0]
    latent, observed = simulate_replicates(sim_cfg, hp)
    max_degree = sim_cfg.max_degree
    out = _out_dir(args)
    meta = _metadata(cfg, seed, max_degree)
    write_coeffs_csv(latent, os.path.join(out, "latent_coeffs.csv"), meta)
    write_coeffs_csv(observed, os.path.join(out, "observed_coeffs.csv"), meta)
    write_hyperparams_json(hp, os.path.join(out, "generating_hyperparams.json"))
    spectrum = angular_spectrum(hp, np.arange(sim_cfg.n_times, dtype=float), max_degree)
    write_spectrum_csv(spectrum, os.path.join(out, "true_spectrum.csv"), meta)
    grid = build_grid(sim_cfg.n_lat, sim_cfg.n_lon)
    for t in _display_times(cfg, sim_cfg.n_times):
        fld = synthesis(latent.values[:, t, 0], grid)
        write_field_csv(fld, os.path.join(out, f"latent_field_t{t}.csv"), meta)
    manifest = _manifest(args, cfg, {
        "seed": seed,
        "TR": max_degree,
        "generating_hyperparameters": hp.to_dict(),
    })
    write_manifest(os.path.join(out, "manifest.json"), manifest)
    print(f"simulate: wrote T={sim_cfg.n_times} R={sim_cfg.n_replicates} "
          f"TR={max_degree} to {out}")
    return 0


def _fit_candidates(cfg, subfamily, seed):
    n_candidates = _get(cfg, "M", int, required=True)
    prior = _prior_from_config(cfg, subfamily)
    try:
        return sample_prior(prior, n_candidates, seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_fit(args):
    cfg = _load_config(args.config)
    seed = _seed(cfg, args)
    observed, obs_meta = read_coeffs_csv(args.obs)
    scheme = _scheme_from_config(cfg)
    max_degree = truncation_order(scheme, observed.n_times)
    if max_degree > observed.max_degree:
        raise ConfigError(
            f"truncation order {max_degree} exceeds the degrees present in "
            f"{args.obs} (max {observed.max_degree})"
        )
    subfamily = canonical_subfamily(_get(cfg, "subfamily", str, required=True))
    candidates = _fit_candidates(cfg, subfamily, seed)
    evaluator = args.evaluator or _get(cfg, "evaluator", str, default=EVALUATOR_CLOSED)
    if evaluator not in (EVALUATOR_CLOSED, EVALUATOR_MC):
        raise ConfigError("evaluator must be 'closed' or 'mc'")
    mc_draws = args.mc_draws or _get(cfg, "mc_draws", int, default=2000)
    estimates = ml2_fit(
        observed, candidates, max_degree=max_degree,
        evaluator=evaluator, mc_draws=mc_draws, rng_seed=seed,
    )
    out = _out_dir(args)
    meta = _metadata(cfg, seed, max_degree)
    meta["T"] = observed.n_times
    meta["R"] = observed.n_replicates
    write_estimates_csv(estimates, os.path.join(out, "estimates.csv"), meta)
    write_table_csv(estimates.table, os.path.join(out, "loglik_table.csv"), meta)
    with open(os.path.join(out, "candidates.json"), "w", encoding="utf-8") as fh:
        json.dump([c.to_dict() for c in candidates], fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest = _manifest(args, cfg, {
        "seed": seed,
        "TR": max_degree,
        "evaluator": evaluator,
        "inputs": {"obs": os.path.abspath(args.obs)},
    })
    write_manifest(os.path.join(out, "manifest.json"), manifest)
    print(f"fit: selected candidates for T={observed.n_times} at TR={max_degree}")
    return 0


def cmd_predict(args):
    cfg = _load_config(args.config)
    seed = _seed(cfg, args)
    observed, obs_meta = read_coeffs_csv(args.obs)
    estimates, est_meta = read_estimates_csv(args.estimates)
    max_degree = estimates.max_degree
    _check_pipeline_metadata(obs_meta, cfg, max_degree)
    if observed.max_degree < max_degree:
        raise ConfigError(
            "observations carry fewer harmonic degrees than the estimates"
        )
    summary = posterior_summary(observed, estimates)
    out = _out_dir(args)
    meta = _metadata(cfg, seed, max_degree)
    meta["T"] = observed.n_times
    meta["R"] = observed.n_replicates
    write_coeffs_csv(summary.means, os.path.join(out, "posterior_coeffs.csv"), meta)
    write_matrix_csv(
        summary.eigenvalues, os.path.join(out, "posterior_eigenvalues.csv"),
        row_name="n", col_name="t", metadata=meta,
    )
    variance = np.vstack(
        [summary.total_variance, summary.residual_variance, summary.explained_variance]
    ).T
    with open(os.path.join(out, "variance_decomposition.csv"), "w",
              encoding="utf-8") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}={value}\n")
        fh.write("t,total,residual,explained\n")
        for t in range(variance.shape[0]):
            fh.write(f"{t},{variance[t,0]:.17g},{variance[t,1]:.17g},"
                     f"{variance[t,2]:.17g}\n")
    n_lat = _get(cfg, "N_lat", int)
    n_lon = _get(cfg, "N_lon", int)
    if n_lat and n_lon:
        grid = build_grid(n_lat, n_lon)
        for t in _display_times(cfg, observed.n_times):
            fld = synthesis(summary.means.values[:, t, 0], grid)
            write_field_csv(fld, os.path.join(out, f"posterior_field_t{t}.csv"), meta)
    manifest = _manifest(args, cfg, {
        "seed": seed,
        "TR": max_degree,
        "inputs": {
            "obs": os.path.abspath(args.obs),
            "estimates": os.path.abspath(args.estimates),
        },
    })
    write_manifest(os.path.join(out, "manifest.json"), manifest)
    print(f"predict: wrote posterior for T={observed.n_times} at TR={max_degree}")
    return 0


def cmd_diagnose(args):
    cfg = _load_config(args.config)
    seed = _seed(cfg, args)
    observed, obs_meta = read_coeffs_csv(args.obs)
    estimates, _ = read_estimates_csv(args.estimates)
    max_degree = estimates.max_degree
    _check_pipeline_metadata(obs_meta, cfg, max_degree)
    out = _out_dir(args)
    meta = _metadata(cfg, seed, max_degree)
    meta["T"] = observed.n_times
    meta["R"] = observed.n_replicates
    meta["emqe_order_divisor"] = "2n+1"

    predicted = posterior_coeff_means(observed, estimates)

    if args.latent:
        latent, _ = read_coeffs_csv(args.latent)
        latent_tr = latent.truncated(max_degree)
        errors = emqe(latent_tr, predicted)
        write_matrix_csv(errors, os.path.join(out, "emqe.csv"),
                         row_name="n", col_name="t", metadata=meta)
        norms = bias_terms(latent, observed, estimates)
        with open(os.path.join(out, "bias.csv"), "w", encoding="utf-8") as fh:
            for key, value in meta.items():
                fh.write(f"# {key}={value}\n")
            fh.write("t,r,bias_norm,noise_norm\n")
            for t in range(norms.bias_norm.shape[0]):
                for r in range(norms.bias_norm.shape[1]):
                    fh.write(f"{t},{r},{norms.bias_norm[t, r]:.17g},"
                             f"{norms.noise_norm[t, r]:.17g}\n")
        mean_bias, mean_noise = norms.mean_over_replicates()
        with open(os.path.join(out, "bias_mean.csv"), "w", encoding="utf-8") as fh:
            for key, value in meta.items():
                fh.write(f"# {key}={value}\n")
            fh.write("t,bias_norm_mean,noise_norm_mean\n")
            for t in range(mean_bias.size):
                fh.write(f"{t},{mean_bias[t]:.17g},{mean_noise[t]:.17g}\n")
    else:
        print("diagnose: no latent coefficients supplied; EMQE and bias "
              "norms are unavailable (simulation-only diagnostics)")

    summary = posterior_summary(observed, estimates)
    with open(os.path.join(out, "variance_decomposition.csv"), "w",
              encoding="utf-8") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}={value}\n")
        fh.write("t,total,residual,explained\n")
        for t in range(summary.total_variance.size):
            fh.write(f"{t},{summary.total_variance[t]:.17g},"
                     f"{summary.residual_variance[t]:.17g},"
                     f"{summary.explained_variance[t]:.17g}\n")

    hp_true = _hyperparams_from_config(cfg)
    if hp_true is not None:
        lags = np.arange(observed.n_times, dtype=float)
        sp_true = angular_spectrum(hp_true, lags, max_degree)
        mode = _get(cfg, "correlation_mode", str, default="hyperparameter-mean")
        sp_est = estimates_spectrum(estimates, lags, mode=mode)
        with open(os.path.join(out, "time_correlation.csv"), "w",
                  encoding="utf-8") as fh:
            for key, value in meta.items():
                fh.write(f"# {key}={value}\n")
            fh.write("n,lag,rho_true,rho_estimated\n")
            for n in range(max_degree + 1):
                rho_t, rho_e = time_correlation(sp_true, sp_est, n)
                for le, lag in enumerate(lags):
                    fh.write(f"{n},{lag:.17g},{rho_t[le]:.17g},{rho_e[le]:.17g}\n")
    else:
        print("diagnose: no generating hyperparameters in the config; "
              "time-correlation curves skipped")

    manifest = _manifest(args, cfg, {
        "seed": seed,
        "TR": max_degree,
        "inputs": {
            "obs": os.path.abspath(args.obs),
            "estimates": os.path.abspath(args.estimates),
            "latent": os.path.abspath(args.latent) if args.latent else None,
        },
    })
    write_manifest(os.path.join(out, "manifest.json"), manifest)
    print(f"diagnose: wrote diagnostics for T={observed.n_times}")
    return 0


def _solar_pieces(cfg, seed, za_form):
    days_raw = cfg.get("days", 10)
    if isinstance(days_raw, int) and not isinstance(days_raw, bool):
        days = tuple(range(1, days_raw + 1))
    elif isinstance(days_raw, list):
        days = tuple(days_raw)
    else:
        raise ConfigError("config field 'days' must be an int or a list of days")
    try:
        solar_cfg = SolarConfig(
            days=days,
            n_polar=_get(cfg, "n_polar", int, default=180),
            n_azimuth=_get(cfg, "n_azimuth", int, default=180),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    n_lat = _get(cfg, "N_lat", int, required=True)
    n_lon = _get(cfg, "N_lon", int, required=True)
    grid = build_grid(n_lat, n_lon)
    scheme = _scheme_from_config(cfg)
    max_degree = truncation_order(scheme, len(days))
    if max_degree > n_lat - 1:
        raise ConfigError(
            f"truncation order {max_degree} not resolvable on n_lat={n_lat}"
        )
    effect_hp = _hyperparams_from_config(cfg, "effect_hyperparameters")
    if effect_hp is None:
        effect_hp = PriorSpec("cauchy").mode_hyperparams()
        effect_hp = HyperparamVector(
            "cauchy", alpha=effect_hp.alpha, beta=effect_hp.beta, sigma=0.0,
            gamma=effect_hp.gamma, nu=effect_hp.nu,
        )
    sigma = _get(cfg, "noise_sigma", float, default=0.25)
    n_replicates = _get(cfg, "R", int, required=True)
    dataset = generate_dataset(
        solar_cfg, grid, effect_hp, sigma, n_replicates, seed, max_degree,
        form=za_form,
    )
    return dataset, solar_cfg, grid, max_degree


def _za_form(args, cfg):
    form = args.za_form or _get(cfg, "za_form", str, default=ZENITH_PRINTED)
    if form not in (ZENITH_PRINTED, ZENITH_STANDARD):
        raise ConfigError("za_form must be 'printed' or 'standard'")
    return form


def cmd_solar(args):
    cfg = _load_config(args.config)
    seed = _seed(cfg, args)
    form = _za_form(args, cfg)
    dataset, solar_cfg, grid, max_degree = _solar_pieces(cfg, seed, form)
    out = _out_dir(args)
    meta = _metadata(cfg, seed, max_degree)
    meta["T"] = len(solar_cfg.days)
    meta["R"] = dataset.response.shape[-1]
    for d, day in enumerate(solar_cfg.days):
        path = os.path.join(out, f"day_{int(day):03d}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            for key, value in meta.items():
                fh.write(f"# {key}={value}\n")
            fh.write("colat,lon,si,ap,response,mask\n")
            for i, colat in enumerate(grid.colatitudes):
                for k, lon in enumerate(grid.longitudes):
                    valid = dataset.ap_valid_grid[d, i, k]
                    ap = dataset.ap_grid[d, i, k] if valid else float("nan")
                    fh.write(
                        f"{colat:.17g},{lon:.17g},{dataset.si_grid[d, i, k]:.17g},"
                        f"{ap:.17g},{dataset.response[d, i, k, 0]:.17g},"
                        f"{int(valid)}\n"
                    )
    write_coeffs_csv(dataset.truth_coeffs,
                     os.path.join(out, "truth_coeffs.csv"), meta)
    write_coeffs_csv(dataset.observed_coeffs,
                     os.path.join(out, "observed_coeffs.csv"), meta)
    constants = dataset.config.constants_dict()
    constants.update({
        "noise_sigma": dataset.noise_sigma,
        "effect_hyperparameters": dataset.effect_hp.to_dict(),
        "zenith_form": form,
        "max_degree": max_degree,
    })
    write_manifest(os.path.join(out, "constants.json"), constants)
    manifest = _manifest(args, cfg, {
        "seed": seed, "TR": max_degree, "zenith_form": form,
        "constants": constants,
    })
    write_manifest(os.path.join(out, "manifest.json"), manifest)
    print(f"solar: wrote {len(solar_cfg.days)} days at TR={max_degree} to {out}")
    return 0


def cmd_cv(args):
    cfg = _load_config(args.config)
    seed = _seed(cfg, args)
    dataset_kind = _get(cfg, "dataset", str, default="solar")
    n_folds = _get(cfg, "folds", int, default=5)
    n_replicates = _get(cfg, "R", int, required=True)
    if n_replicates < n_folds:
        raise ConfigError(
            f"cross-validation needs R >= {n_folds}, got {n_replicates}"
        )
    if dataset_kind == "solar":
        form = _za_form(args, cfg)
        dataset, _, _, max_degree = _solar_pieces(cfg, seed, form)
        observed = dataset.observed_coeffs
        truth = dataset.truth_coeffs
        subfamily = canonical_subfamily(_get(cfg, "subfamily", str, default="cauchy"))
    elif dataset_kind == "simulation":
        scheme = _scheme_from_config(cfg)
        subfamily = canonical_subfamily(_get(cfg, "subfamily", str, required=True))
        try:
            sim_cfg = SimulationConfig(
                n_times=_get(cfg, "T", int, required=True),
                n_lat=_get(cfg, "N_lat", int, required=True),
                n_lon=_get(cfg, "N_lon", int, required=True),
                n_candidates=_get(cfg, "M", int, default=1),
                n_replicates=n_replicates,
                scheme=scheme,
                subfamily=subfamily,
                seed=seed,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        hp = _hyperparams_from_config(cfg)
        if hp is None:
            gen_seed = int(keyed_rng(seed, 5).integers(2 ** 63))
            hp = sample_prior(_prior_from_config(cfg, subfamily), 1, gen_seed)[0]
        truth, observed = simulate_replicates(sim_cfg, hp)
        max_degree = sim_cfg.max_degree
    else:
        raise ConfigError("config field 'dataset' must be 'solar' or 'simulation'")

    candidates = _fit_candidates(cfg, subfamily, seed)
    report = run_cv(observed, truth, candidates, max_degree,
                    n_folds=n_folds, seed=seed)
    report.validate_partition(n_replicates)
    out = _out_dir(args)
    meta = _metadata(cfg, seed, max_degree)
    meta["T"] = observed.n_times
    meta["R"] = n_replicates
    for k, fold in enumerate(report.fold_emqe):
        write_matrix_csv(fold, os.path.join(out, f"fold_{k}_emqe.csv"),
                         row_name="n", col_name="t", metadata=meta)
    write_matrix_csv(report.average_emqe, os.path.join(out, "cv_average_emqe.csv"),
                     row_name="n", col_name="t", metadata=meta)
    write_matrix_csv(report.in_sample_emqe,
                     os.path.join(out, "in_sample_emqe.csv"),
                     row_name="n", col_name="t", metadata=meta)
    payload = {
        "fold_seed": report.seed,
        "fold_sizes": report.fold_sizes(),
        "fold_indices": [idx.tolist() for idx in report.fold_indices],
        "cv_average_emqe_mean": float(report.average_emqe.mean()),
        "in_sample_emqe_mean": float(report.in_sample_emqe.mean()),
    }
    write_manifest(os.path.join(out, "cv_report.json"), payload)
    manifest = _manifest(args, cfg, {"seed": seed, "TR": max_degree,
                                     "dataset": dataset_kind})
    write_manifest(os.path.join(out, "manifest.json"), manifest)
    print(
        f"cv: average EMQE {payload['cv_average_emqe_mean']:.6g} vs in-sample "
        f"{payload['in_sample_emqe_mean']:.6g} over {n_folds} folds"
    )
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog=_PROG,
        description="Spectral empirical-Bayes Gaussian process regression "
                    "on the sphere",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_inputs=()):
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="overrides the config seed")
        p.add_argument("--evaluator", choices=(EVALUATOR_CLOSED, EVALUATOR_MC),
                       default=None, help="marginal-likelihood evaluator")
        p.add_argument("--mc-draws", type=int, default=None,
                       help="Monte-Carlo draws for the mc evaluator")
        p.add_argument("--za-form", choices=(ZENITH_PRINTED, ZENITH_STANDARD),
                       default=None, help="zenith-angle formula variant")
        for name in with_inputs:
            p.add_argument(f"--{name}", required=name != "latent",
                           help=f"path to the {name} CSV")

    common(sub.add_parser("simulate", help="simulate latent + observed fields"))
    common(sub.add_parser("fit", help="per-time ML-II estimation"),
           with_inputs=("obs",))
    common(sub.add_parser("predict", help="conjugate posterior prediction"),
           with_inputs=("obs", "estimates"))
    common(sub.add_parser("diagnose", help="error/bias/variance diagnostics"),
           with_inputs=("obs", "estimates", "latent"))
    common(sub.add_parser("solar", help="generate the synthetic solar dataset"))
    common(sub.add_parser("cv", help="replicate-level 5-fold cross-validation"))

    parser.set_defaults(func=None)
    for name, func in (
        ("simulate", cmd_simulate), ("fit", cmd_fit), ("predict", cmd_predict),
        ("diagnose", cmd_diagnose), ("solar", cmd_solar), ("cv", cmd_cv),
    ):
        sub.choices[name].set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"{_PROG}: config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"{_PROG}: config error: {exc}", file=sys.stderr)
        return 2
    except ValidityError as exc:
        print(f"{_PROG}: numerical-validity error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"{_PROG}: I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
