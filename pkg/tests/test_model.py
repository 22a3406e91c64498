import numpy as np
import pytest

from spheregp import (
    ConfigError,
    HyperparamVector,
    PriorSpec,
    SimulationConfig,
    TruncationScheme,
    angular_spectrum,
    sample_prior,
    simulate_replicates,
    truncation_order,
)


class TestTruncation:
    def test_reference_values(self):
        assert truncation_order(TruncationScheme("log"), 300) == 6
        assert truncation_order(TruncationScheme("log"), 50) == 4
        assert truncation_order(TruncationScheme("power", 1 / 2.45), 300) == 10

    def test_minimum_is_one(self):
        assert truncation_order(TruncationScheme("log"), 2) == 1
        assert truncation_order(TruncationScheme("power", 0.1), 2) == 1

    def test_nondecreasing_in_sample_size(self):
        for scheme in (TruncationScheme("log"), TruncationScheme("power", 1 / 2.45)):
            orders = [truncation_order(scheme, t) for t in range(2, 600, 7)]
            assert np.all(np.diff(orders) >= 0)

    def test_scheme_validation(self):
        with pytest.raises(ValueError):
            TruncationScheme("power", 1.0)
        with pytest.raises(ValueError):
            TruncationScheme("power")
        with pytest.raises(ValueError):
            TruncationScheme("log", 0.5)
        with pytest.raises(ValueError):
            TruncationScheme("cubic")
        with pytest.raises(ValueError):
            truncation_order(TruncationScheme("log"), 1)


class TestPriors:
    def test_beta_moments(self):
        draws = sample_prior(PriorSpec("cauchy"), 100000, rng_seed=0)
        gammas = np.array([d.gamma for d in draws])
        betas = np.array([d.beta for d in draws])
        # Beta(5,7): mean 5/12; s.e. of the sample mean = sd/sqrt(M)
        mean_target = 5.0 / 12.0
        sd = np.sqrt(5 * 7 / ((12.0**2) * 13.0))
        assert abs(gammas.mean() - mean_target) < 3 * sd / np.sqrt(gammas.size)
        # Beta(8,2): variance 16/1100; s.e. of a sample variance ~ sqrt(2/M)*var
        var_target = 8 * 2 / ((10.0**2) * 11.0)
        assert abs(betas.var() - var_target) < 3 * np.sqrt(2.0 / betas.size) * var_target

    def test_sigma_truncated_at_zero(self):
        draws = sample_prior(PriorSpec("matern"), 5000, rng_seed=1)
        sigmas = np.array([d.sigma for d in draws])
        assert np.all(sigmas >= 0.0)
        varpis = np.array([d.varpi for d in draws])
        assert abs(varpis.mean() - 1.3) < 3 * np.sqrt(0.015 / varpis.size)

    def test_subfamily_of_draws(self):
        assert all(d.subfamily == "cauchy"
                   for d in sample_prior(PriorSpec("cauchy"), 5, 2))
        assert all(d.subfamily == "matern"
                   for d in sample_prior(PriorSpec("matern"), 5, 2))

    def test_determinism(self):
        a = sample_prior(PriorSpec("cauchy"), 8, rng_seed=4)
        b = sample_prior(PriorSpec("cauchy"), 8, rng_seed=4)
        assert a == b

    def test_mode_hyperparams(self):
        hp = PriorSpec("cauchy").mode_hyperparams()
        assert hp.gamma == pytest.approx(4.0 / 10.0)
        assert hp.nu == pytest.approx(1.0 / 8.0)
        assert hp.alpha == pytest.approx(10.0 / 14.0)
        assert hp.beta == pytest.approx(7.0 / 8.0)


class TestSimulate:
    def _config(self, sigma_hp, seed=13, n_rep=4000):
        cfg = SimulationConfig(
            n_times=6, n_lat=8, n_lon=16, n_candidates=3, n_replicates=n_rep,
            scheme=TruncationScheme("log"), subfamily="cauchy", seed=seed,
        )
        hp = HyperparamVector("cauchy", alpha=0.6, beta=0.8, sigma=sigma_hp,
                              gamma=0.5, nu=0.4)
        return cfg, hp

    def test_zero_noise_means_observed_equals_latent(self):
        cfg, hp = self._config(0.0, n_rep=5)
        latent, observed = simulate_replicates(cfg, hp)
        assert np.array_equal(latent.values, observed.values)

    def test_observed_variance_is_signal_plus_noise(self):
        cfg, hp = self._config(0.4)
        latent, observed = simulate_replicates(cfg, hp)
        sp = angular_spectrum(hp, np.arange(6.0), cfg.max_degree)
        n_rep = cfg.n_replicates
        for n in (0, 1):
            target = sp.values[n, 0] + hp.sigma**2
            se = np.sqrt(2.0 / n_rep) * target
            assert abs(observed.values[n * n, 2, :].var() - target) < 3 * se

    def test_latent_and_noise_uncorrelated(self):
        cfg, hp = self._config(0.5)
        latent, observed = simulate_replicates(cfg, hp)
        noise = observed.values - latent.values
        x = latent.values[0, 1, :]
        y = noise[0, 1, :]
        corr = np.mean(x * y) / np.sqrt(np.mean(x * x) * np.mean(y * y))
        assert abs(corr) < 3 / np.sqrt(x.size)

    def test_bitwise_determinism(self):
        cfg, hp = self._config(0.3, n_rep=7)
        a = simulate_replicates(cfg, hp)
        b = simulate_replicates(cfg, hp)
        assert np.array_equal(a[0].values, b[0].values)
        assert np.array_equal(a[1].values, b[1].values)

    def test_subfamily_mismatch(self):
        cfg, _ = self._config(0.3, n_rep=2)
        other = HyperparamVector("matern", alpha=0.5, beta=0.5, sigma=0.1,
                                 varpi=1.0)
        with pytest.raises(ConfigError):
            simulate_replicates(cfg, other)

    def test_truncation_grid_compatibility(self):
        with pytest.raises(ConfigError):
            SimulationConfig(
                n_times=300, n_lat=5, n_lon=16, n_candidates=2,
                n_replicates=2, scheme=TruncationScheme("log"),
                subfamily="cauchy",
            )
