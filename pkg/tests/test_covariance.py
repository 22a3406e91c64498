import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from spheregp import (
    AngularSpectrum,
    HyperparamVector,
    PriorSpec,
    ValidityError,
    angular_spectrum,
    kernel,
    legendre,
    phi_cauchy,
    phi_matern,
    psi,
    reconstruct_kernel,
    sample_prior,
)

from conftest import ZonalStub

# (1 + 2**0.7)**0.8, evaluated at 40 significant digits
PSI_2_07_08 = 2.1639035338370133605


class TestComponents:
    def test_psi(self):
        assert psi(0.0, 0.3, 0.9) == 1.0
        assert psi(1.0, 1.0, 1.0) == 2.0
        assert psi(2.0, 0.7, 0.8) == pytest.approx(PSI_2_07_08, abs=1e-14)

    def test_phi_cauchy(self):
        assert phi_cauchy(0.0, 0.4, 2.0) == 1.0
        assert phi_cauchy(1.0, 1.0, 1.0) == 0.5
        assert phi_cauchy(3.0, 0.5, 2.0) == pytest.approx(
            (1.0 + np.sqrt(3.0)) ** -2, abs=1e-15
        )
        u = np.linspace(0, 10, 50)
        vals = phi_cauchy(u, 0.7, 1.3)
        assert np.all(np.diff(vals) < 0)

    def test_phi_matern_normalization_and_exponential_case(self):
        assert phi_matern(0.0, 1.3) == 1.0
        assert phi_matern(1.0, 0.5) == pytest.approx(np.exp(-1.0), abs=1e-14)
        u = np.linspace(0.0, 25.0, 101)
        assert np.abs(phi_matern(u, 0.5) - np.exp(-np.sqrt(u))).max() < 1e-12

    def test_phi_matern_against_integral_oracle(self):
        # compose the Matern normalization with the independent
        # integral-representation route for K
        varpi, u = 1.3, 2.0
        k_oracle, _ = quad(
            lambda t: np.exp(-np.sqrt(u) * np.cosh(t)) * np.cosh(varpi * t),
            0.0, 40.0, limit=200,
        )
        expected = (
            u ** (varpi / 2.0) * k_oracle / (2.0 ** (varpi - 1.0) * gamma_fn(varpi))
        )
        assert phi_matern(u, varpi) == pytest.approx(expected, rel=1e-9)


class TestHyperparamVector:
    def test_validation(self):
        with pytest.raises(ValueError):
            HyperparamVector("cauchy", alpha=0.0, beta=0.5, sigma=0.1,
                             gamma=0.5, nu=1.0)
        with pytest.raises(ValueError):
            HyperparamVector("cauchy", alpha=0.5, beta=1.2, sigma=0.1,
                             gamma=0.5, nu=1.0)
        with pytest.raises(ValueError):
            HyperparamVector("cauchy", alpha=0.5, beta=0.5, sigma=-0.1,
                             gamma=0.5, nu=1.0)
        with pytest.raises(ValueError):
            HyperparamVector("matern", alpha=0.5, beta=0.5, sigma=0.1, varpi=0.0)
        with pytest.raises(ValueError):
            HyperparamVector("matern", alpha=0.5, beta=0.5, sigma=0.1,
                             varpi=1.0, gamma=0.3)
        with pytest.raises(ValueError):
            HyperparamVector("weird", alpha=0.5, beta=0.5, sigma=0.1, varpi=1.0)

    def test_subfamily_aliases_and_json_round_trip(self, cauchy_hp):
        assert HyperparamVector("s1", alpha=0.5, beta=0.5, sigma=0.1,
                                gamma=0.5, nu=1.0).subfamily == "cauchy"
        assert HyperparamVector("S2", alpha=0.5, beta=0.5, sigma=0.1,
                                varpi=1.0).subfamily == "matern"
        back = HyperparamVector.from_dict(cauchy_hp.to_dict())
        assert back == cauchy_hp


class TestKernel:
    def test_origin_is_unit_scale(self, cauchy_hp, matern_hp):
        assert kernel(0.0, 0.0, cauchy_hp) == pytest.approx(1.0, abs=1e-14)
        assert kernel(0.0, 0.0, matern_hp) == pytest.approx(1.0, abs=1e-12)

    def test_antipodal_value(self):
        hp = HyperparamVector("cauchy", alpha=0.3, beta=0.4, sigma=0.0,
                              gamma=1.0, nu=1.0)
        assert kernel(np.pi, 0.0, hp) == pytest.approx(0.2, abs=1e-15)

    def test_unit_lag_value(self):
        hp = HyperparamVector("cauchy", alpha=1.0, beta=1.0, sigma=0.0,
                              gamma=1.0, nu=1.0)
        assert kernel(np.pi / 2, 1.0, hp) == pytest.approx(0.25, abs=1e-15)

    def test_angle_domain(self, cauchy_hp):
        with pytest.raises(ValueError):
            kernel(3.5, 0.0, cauchy_hp)


class TestAngularSpectrum:
    def test_constant_kernel_projects_to_degree_zero(self):
        stub = ZonalStub(lambda u: np.full_like(u, 0.7))
        sp = angular_spectrum(stub, [0.0], 6)
        assert sp.values[0, 0] == pytest.approx(0.7, abs=1e-12)
        assert np.abs(sp.values[1:, 0]).max() < 1e-12

    def test_low_degree_kernel_with_lag_dependence(self):
        # C(theta, tau) = 3*(1 - chord^2/(2*psi))/psi with psi = 1 + tau^2
        # decomposes exactly as B0 = 3*tau^2/(1+tau^2)^2 and
        # B1 = 1/(1+tau^2)^2 (P1 carries weight 2n+1 = 3), higher degrees 0.
        stub = ZonalStub(lambda u: 3.0 * (1.0 - u / 2.0), alpha=1.0, beta=1.0)
        lags = np.array([0.0, 1.0, 2.0])
        sp = angular_spectrum(stub, lags, 5)
        scale = 1.0 + lags**2
        assert np.abs(sp.values[0] - 3.0 * lags**2 / scale**2).max() < 1e-12
        assert np.abs(sp.values[1] - 1.0 / scale**2).max() < 1e-12
        assert np.abs(sp.values[2:]).max() < 1e-12

    def test_partial_sums_increase_to_kernel_value(self):
        hp = HyperparamVector("cauchy", alpha=0.7, beta=0.9, sigma=0.0,
                              gamma=0.5, nu=0.3)
        sp = angular_spectrum(hp, [0.0], 40)
        mult = 2 * np.arange(41) + 1
        partial = np.cumsum(mult * sp.values[:, 0])
        checkpoints = partial[[5, 10, 20, 40]]
        assert np.all(np.diff(checkpoints) > 0)
        assert np.all(checkpoints <= 1.0 + 1e-9)
        assert abs(partial[-1] - kernel(0.0, 0.0, hp)) < 0.05

    def test_indefinite_kernel_raises_validity_error(self):
        # spatial profile P2(1 - u/2) with a negative sign has a negative
        # degree-2 atom
        stub = ZonalStub(lambda u: -legendre(2, np.clip(1.0 - u / 2.0, -1, 1)))
        with pytest.raises(ValidityError):
            angular_spectrum(stub, [0.0], 4)

    def test_quadrature_order_validation(self, cauchy_hp):
        with pytest.raises(ValueError):
            angular_spectrum(cauchy_hp, [0.0], 10, quad_order=11)

    def test_temporal_decay_for_cauchy(self, cauchy_hp):
        sp = angular_spectrum(cauchy_hp, np.arange(12.0), 4)
        for n in range(5):
            assert np.all(np.diff(sp.values[n]) <= 1e-15)

    def test_cauchy_schwarz_and_positive_marginals(self, cauchy_hp, matern_hp):
        for hp in (cauchy_hp, matern_hp):
            sp = angular_spectrum(hp, np.arange(8.0), 10)
            assert np.all(sp.values[:, 0] >= 0.0)
            assert np.all(
                np.abs(sp.values) <= sp.values[:, [0]] + 1e-12
            )

    def test_trace_partial_sums_converge_for_matern(self):
        # the atoms decay polynomially with rate 2*varpi + 2, so the stated
        # tail tolerance needs a smooth member
        hp = HyperparamVector("matern", alpha=0.7, beta=0.9, sigma=0.0, varpi=2.0)
        sp = angular_spectrum(hp, [0.0], 80)
        mult = 2 * np.arange(81) + 1
        partial = np.cumsum(mult * sp.values[:, 0])
        assert abs(partial[80] - partial[60]) < 1e-6


class TestReconstruction:
    def test_trivial_spectra(self):
        sp = AngularSpectrum(np.zeros((4, 2)), np.array([0.0, 1.0]))
        assert reconstruct_kernel(sp, 1.0, 0) == 0.0
        single = np.zeros((4, 1))
        single[0, 0] = 0.42
        sp1 = AngularSpectrum(single, np.array([0.0]))
        for theta in (0.0, 1.2, np.pi):
            assert reconstruct_kernel(sp1, theta, 0) == pytest.approx(0.42)

    def test_round_trip_sup_error_decreases(self):
        rng = np.random.default_rng(21)
        thetas = np.linspace(0.0, np.pi, 181)
        for spec in (PriorSpec("cauchy"), PriorSpec("matern")):
            for hp in sample_prior(spec, 3, rng.integers(2**63)):
                sp = angular_spectrum(hp, [0.0], 40)
                exact = kernel(thetas, 0.0, hp)
                errors = []
                for max_degree in (5, 10, 20, 40):
                    truncated = AngularSpectrum(
                        sp.values[: max_degree + 1], sp.lags
                    )
                    rec = reconstruct_kernel(truncated, thetas, 0)
                    errors.append(np.abs(rec - exact).max())
                assert np.all(np.diff(errors) < 0)

    def test_lag_index_validation(self):
        sp = AngularSpectrum(np.ones((2, 2)), np.array([0.0, 1.0]))
        with pytest.raises(ValueError):
            reconstruct_kernel(sp, 0.5, 2)
