import numpy as np
import pytest
from scipy.optimize import brentq

from spheregp import (
    SolarConfig,
    atmospheric_pressure,
    declination,
    generate_dataset,
    opacity_index,
    solar_irradiance,
    solar_maps,
    zenith_angle,
)
from spheregp.sphere import FieldSample, analysis, build_grid

from conftest import ZonalStub

# frozen extended-precision evaluations of the closed-form expressions
DECLINATION_DAY0 = -9.020396588129178497
ZENITH_PRINTED_30_1 = 0.021825065886890306846


@pytest.fixture(scope="module")
def cfg():
    return SolarConfig(days=tuple(range(1, 11)))


class TestDeclination:
    def test_zero_crossing_at_day_80(self):
        assert declination(80.0) == 0.0

    def test_peak_a_quarter_period_later(self):
        assert declination(80.0 + 183.0 / 4.0) == pytest.approx(23.45, abs=1e-12)

    def test_day_zero_frozen_value(self):
        assert declination(0.0) == pytest.approx(DECLINATION_DAY0, abs=1e-12)

    def test_periodicity_of_the_formula(self):
        for t in (0.0, 33.3, 100.0):
            assert declination(t) == pytest.approx(declination(t + 183.0), abs=1e-12)


class TestZenithAngle:
    def test_equator_is_zero(self):
        # arccos(sin(pi/2)) = 0 kills the product for any day
        for t in (0.0, 30.0, 170.0):
            assert zenith_angle(t, np.pi / 2) == pytest.approx(0.0, abs=1e-7)

    def test_day_80_reduces_to_cosine_product(self):
        theta1 = 1.1
        expected = (
            np.arccos(np.sin(theta1))
            * np.cos(theta1)
            * np.cos(np.pi * 80.0 / 183.0)
        )
        assert zenith_angle(80.0, theta1) == pytest.approx(expected, abs=1e-12)

    def test_frozen_value(self):
        assert zenith_angle(30.0, 1.0) == pytest.approx(
            ZENITH_PRINTED_30_1, abs=1e-12
        )

    def test_standard_form_differs_and_is_bounded(self):
        za_std = zenith_angle(30.0, 1.0, form="standard")
        assert za_std != pytest.approx(ZENITH_PRINTED_30_1, abs=1e-6)
        theta = np.linspace(0.01, np.pi - 0.01, 50)
        assert np.all(zenith_angle(12.0, theta, form="standard") <= np.pi)

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            zenith_angle(1.0, 1.0, form="upside-down")


class TestIrradiance:
    def test_overhead_sun_value(self, cfg):
        # ZA = 0 at the equator node
        expected = 1361.0 * 0.8 / np.pi
        assert solar_irradiance(80.0, np.pi / 2, cfg) == pytest.approx(
            expected, rel=1e-12
        )

    def test_dark_hemisphere_clamps_to_zero(self, cfg):
        maps = solar_maps(cfg)
        dark = ~maps["ap_valid"]
        assert dark.any()
        assert np.all(maps["si"][dark] == 0.0)

    def test_bounds(self, cfg):
        maps = solar_maps(cfg)
        assert maps["si"].min() >= 0.0
        assert maps["si"].max() <= cfg.si_max + 1e-12


class TestPressure:
    def test_zero_at_top_flux(self, cfg):
        ap, valid = atmospheric_pressure(80.0, np.pi / 2, cfg, cfg.si_top)
        assert valid and ap == pytest.approx(0.0, abs=0.0)

    def test_log_unit_drop(self, cfg):
        # cos ZA = 1 at the equator node: AP = g / OI
        ap, valid = atmospheric_pressure(80.0, np.pi / 2, cfg, cfg.si_top / np.e)
        assert valid
        assert ap == pytest.approx(cfg.gravity / cfg.oi_mean, rel=1e-12)

    def test_round_trip_on_meshgrid(self, cfg):
        maps = solar_maps(cfg)
        theta1 = cfg.polar_nodes()
        worst = 0.0
        for d, day in enumerate(cfg.days):
            valid = maps["ap_valid"][d][:, 0]
            ap = maps["ap"][d][:, 0][valid]
            cos_za = np.cos(zenith_angle(day, theta1[valid]))
            si_back = cfg.si_top * np.exp(
                -cfg.oi_mean * ap / (cfg.gravity * cos_za)
            )
            si_true = maps["si"][d][:, 0][valid]
            worst = max(worst, np.abs((si_back - si_true) / si_true).max())
        assert worst < 1e-9

    def test_masking(self, cfg):
        ap, valid = atmospheric_pressure(80.0, np.pi / 2, cfg, cfg.si_top * 1.01)
        assert not valid and np.isnan(ap)
        # a dark node: si = 0 there
        maps = solar_maps(cfg)
        assert not maps["ap_valid"][0][-1, 0]


class TestOpacityIndex:
    def test_unit_value(self, cfg):
        # cos ZA = 1 and grad = -log(CSI) gives exactly 1
        oi, valid = opacity_index(80.0, np.pi / 2, -np.log(cfg.clear_sky_index), cfg)
        assert valid and oi == pytest.approx(1.0, rel=1e-12)

    def test_vanishing_zenith_cosine(self, cfg):
        # root-find the polar angle where cos(ZA) crosses zero (on the dark
        # southern branch); the index must vanish there regardless of the
        # gradient
        day = 5.0
        f = lambda th: np.cos(zenith_angle(day, th))
        theta_star = brentq(f, np.pi / 2 + 0.01, np.pi - 1e-6, xtol=1e-15)
        oi, valid = opacity_index(day, theta_star, 0.37, cfg)
        assert valid and abs(oi) < 1e-12

    def test_zero_gradient_masked(self, cfg):
        oi, valid = opacity_index(10.0, 1.0, 0.0, cfg)
        assert not valid and np.isnan(oi)

    def test_meshgrid_matches_pointwise_formula(self, cfg):
        maps = solar_maps(cfg)
        theta1 = cfg.polar_nodes()
        d, day = 3, cfg.days[3]
        ap_col = maps["ap"][d][:, 0]
        grad = np.gradient(ap_col, theta1)
        expected = -np.cos(zenith_angle(day, theta1)) * (
            np.log(cfg.clear_sky_index) / grad
        )
        got = maps["oi"][d][:, 0]
        valid = maps["oi_valid"][d][:, 0]
        assert np.allclose(got[valid], expected[valid], rtol=1e-12)


class TestDataset:
    def test_deterministic_si_when_effect_and_noise_vanish(self, cfg):
        grid = build_grid(8, 16)
        zero_effect = ZonalStub(lambda u: np.zeros_like(u), sigma=0.0)
        ds = generate_dataset(cfg, grid, zero_effect, 0.0, 3, seed=1,
                              max_degree=3)
        for r in range(3):
            assert np.allclose(ds.response[..., r], ds.si_grid, atol=1e-12)

    def test_random_part_centered(self, cfg, cauchy_hp):
        grid = build_grid(8, 16)
        n_rep = 400
        ds = generate_dataset(cfg, grid, cauchy_hp, 0.25, n_rep, seed=2,
                              max_degree=3)
        deviation = ds.response - ds.si_grid[..., None]
        mean = deviation.mean(axis=-1)
        sd = deviation.std(axis=-1, ddof=1) / np.sqrt(n_rep)
        assert np.all(np.abs(mean) < 4.5 * sd + 1e-12)

    def test_observed_coeffs_match_response_analysis(self, cfg, cauchy_hp):
        grid = build_grid(8, 16)
        ds = generate_dataset(cfg, grid, cauchy_hp, 0.2, 2, seed=3,
                              max_degree=3)
        got = analysis(FieldSample(ds.response[4, :, :, 1], grid), 3)
        assert np.abs(got - ds.observed_coeffs.values[:, 4, 1]).max() < 1e-10

    def test_truth_is_si_plus_effect(self, cfg, cauchy_hp):
        grid = build_grid(8, 16)
        ds_noisy = generate_dataset(cfg, grid, cauchy_hp, 0.5, 2, seed=4,
                                    max_degree=3)
        ds_clean = generate_dataset(cfg, grid, cauchy_hp, 0.0, 2, seed=4,
                                    max_degree=3)
        assert np.array_equal(ds_noisy.truth_coeffs.values,
                              ds_clean.truth_coeffs.values)
        assert np.array_equal(ds_clean.truth_coeffs.values,
                              ds_clean.observed_coeffs.values)

    def test_determinism(self, cfg, cauchy_hp):
        grid = build_grid(8, 16)
        a = generate_dataset(cfg, grid, cauchy_hp, 0.3, 2, seed=9, max_degree=3)
        b = generate_dataset(cfg, grid, cauchy_hp, 0.3, 2, seed=9, max_degree=3)
        assert np.array_equal(a.response, b.response)
        assert np.array_equal(a.observed_coeffs.values, b.observed_coeffs.values)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SolarConfig(days=(200.0,))
        with pytest.raises(ValueError):
            SolarConfig(clear_sky_index=1.5)
        with pytest.raises(ValueError):
            SolarConfig(days=())
