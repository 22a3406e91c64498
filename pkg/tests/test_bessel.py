import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import kv

from spheregp import bessel_k


def k_integral_oracle(order, x):
    """Independent route: K_v(x) = integral_0^inf exp(-x cosh t) cosh(v t) dt
    by adaptive quadrature."""
    val, err = quad(
        lambda t: np.exp(-x * np.cosh(t)) * np.cosh(order * t),
        0.0, 40.0, limit=400, epsabs=1e-14, epsrel=1e-13,
    )
    assert err < 1e-11 * max(val, 1e-30)
    return val


def closed_half_integer(order, x):
    base = np.sqrt(np.pi / (2.0 * x)) * np.exp(-x)
    if order == 0.5:
        return base
    if order == 1.5:
        return base * (1.0 + 1.0 / x)
    if order == 2.5:
        return base * (1.0 + 3.0 / x + 3.0 / x**2)
    raise AssertionError


@pytest.mark.parametrize("order", [0.5, 1.5, 2.5])
@pytest.mark.parametrize("x", [0.1, 1.0, 5.0, 20.0])
def test_half_integer_closed_forms(order, x):
    expected = closed_half_integer(order, x)
    assert abs(bessel_k(order, x) - expected) <= 1e-12 * expected


def test_named_closed_form_values():
    assert bessel_k(0.5, 1.0) == pytest.approx(
        np.sqrt(np.pi / 2.0) * np.exp(-1.0), rel=1e-13
    )
    # K_{3/2}(2) = sqrt(pi/4) e^{-2} (1 + 1/2)
    assert bessel_k(1.5, 2.0) == pytest.approx(
        np.sqrt(np.pi / 4.0) * np.exp(-2.0) * 1.5, rel=1e-13
    )


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_order_1_3_against_integral_oracle(x):
    oracle = k_integral_oracle(1.3, x)
    assert abs(bessel_k(1.3, x) - oracle) <= 1e-9 * oracle


def test_against_scipy_over_contract_envelope():
    worst = 0.0
    for order in np.linspace(0.05, 5.0, 34):
        x = np.geomspace(1e-6, 50.0, 40)
        ref = kv(order, x)
        ours = bessel_k(order, x)
        worst = max(worst, np.max(np.abs(ours - ref) / ref))
    assert worst < 1e-10


def test_integer_order_continuity():
    # the connection formula degenerates at integer orders; evaluation must
    # be continuous across them
    for x in (0.3, 1.7, 6.0):
        for n in (1.0, 2.0, 3.0):
            below = bessel_k(n - 1e-9, x)
            at = bessel_k(n, x)
            above = bessel_k(n + 1e-9, x)
            assert abs(below - at) < 1e-7 * at
            assert abs(above - at) < 1e-7 * at


def test_domain_error():
    with pytest.raises(ValueError):
        bessel_k(1.0, 0.0)
    with pytest.raises(ValueError):
        bessel_k(1.0, -2.0)
    with pytest.raises(ValueError):
        bessel_k(0.7, np.array([1.0, -1.0]))
