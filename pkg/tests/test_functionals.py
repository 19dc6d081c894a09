import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from levyadapt.functionals import (
    CompactBump,
    DiracDerivative,
    DiracPoint,
    Gaussian,
    PolynomialTaper,
    Sinc,
    functional_fourier,
    kernel_diff,
    kernel_ft,
    kernel_ft_limits,
)

REGULAR = [Gaussian(), Gaussian(center=0.7, width=0.4, amplitude=2.0), CompactBump(), CompactBump(-1.0, 2.5)]
ALL = REGULAR + [DiracPoint(0.3), DiracDerivative(1.0, 1), DiracDerivative(-0.5, 2)]
PROBES = np.concatenate([[0.0], np.linspace(0.37, 29.0, 19)])


@pytest.fixture(autouse=True)
def _quiet_quadrature():
    # quad reports roundoff near 1e-14 absolute on tiny transforms; the assertions bound the error
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        yield


def fourier_by_quadrature(f, u):
    lo, hi = f.support if f.support is not None else (f.center - 12 * f.width, f.center + 12 * f.width)
    pts = list(f.breakpoints) or None
    re = integrate.quad(lambda x: f.pointwise(x) * math.cos(u * x), lo, hi, points=pts, limit=800,
                        epsabs=1e-14, epsrel=1e-12)[0]
    im = integrate.quad(lambda x: f.pointwise(x) * math.sin(u * x), lo, hi, points=pts, limit=800,
                        epsabs=1e-14, epsrel=1e-12)[0]
    return re + 1j * im


# --- functional_fourier


def test_dirac_at_origin():
    assert np.all(functional_fourier(DiracPoint(0.0), np.linspace(-5, 5, 11)) == 1)


def test_gaussian_closed_form_against_quadrature():
    f = Gaussian()
    for u in (0.0, 1.0, 2.0):
        expected = math.sqrt(2 * math.pi) * math.exp(-u * u / 2)
        assert abs(fourier_by_quadrature(f, u) - expected) < 1e-12
        assert abs(functional_fourier(f, u) - expected) < 1e-14


def test_dirac_derivative_formula():
    assert abs(functional_fourier(DiracDerivative(1.0, 1), 2.0) - (-2j) * cmath.exp(2j)) < 1e-15


@pytest.mark.parametrize("f", REGULAR, ids=["gauss", "gauss2", "bump", "bump2"])
def test_regular_consistency(f):
    for u in PROBES:
        q = fourier_by_quadrature(f, u)
        v = complex(functional_fourier(f, u))
        assert abs(v - q) <= 1e-6 * abs(q) + 1e-14


def test_bump_at_removable_pole():
    f = CompactBump()
    a = math.pi / 0.5
    for u in (a, a * (1 + 1e-7), a * (1 - 3e-6)):
        q = fourier_by_quadrature(f, u)
        assert abs(complex(f.fourier(u)) - q) <= 1e-6 * abs(q)


@pytest.mark.parametrize("f", ALL, ids=["gauss", "gauss2", "bump", "bump2", "dirac", "dd1", "dd2"])
def test_hermitian(f):
    u = np.linspace(-40, 40, 801)
    assert np.max(np.abs(f.fourier(-u) - np.conj(f.fourier(u)))) <= 1e-12 * (1 + np.max(np.abs(f.fourier(u))))


@pytest.mark.parametrize("f", REGULAR, ids=["gauss", "gauss2", "bump", "bump2"])
def test_declared_decay(f):
    # |F f| (1+u^2)^s stays below its value range on a moderate window far out
    def ratio(u):
        return np.abs(f.fourier(u)) * (1 + u**2) ** f.s
    c_f = np.max(ratio(np.linspace(-200, 200, 20001)))
    assert np.isfinite(c_f)
    assert np.max(ratio(np.linspace(200, 5000, 100001))) <= c_f


def test_smoothness_indices():
    assert DiracPoint().s == 0
    assert DiracDerivative(order=3).s == -3
    with pytest.raises(ValueError):
        DiracDerivative(order=0)


# --- kernels


def test_sinc_values():
    assert kernel_ft(Sinc(), 0.5 * math.pi) == 1
    assert kernel_ft(Sinc(), 1.5 * math.pi) == 0
    assert kernel_ft(Sinc(), 0.0) == 1


def test_taper_value():
    assert kernel_ft(PolynomialTaper(2), math.pi / 2) == pytest.approx(0.75, abs=1e-15)
    assert kernel_ft(PolynomialTaper(3), 0.0) == 1


@pytest.mark.parametrize("K", [Sinc(), PolynomialTaper(1), PolynomialTaper(2), PolynomialTaper(4.5)],
                         ids=["sinc", "p1", "p2", "p4.5"])
def test_band_limit(K):
    v = np.random.default_rng(1).uniform(-50, 50, 1000)
    out = v[np.abs(v) > math.pi]
    assert np.all(kernel_ft(K, out) == 0)
    inner, outer = kernel_ft_limits(K, np.array([math.pi, -math.pi]))
    assert np.all(outer == 0)


def test_sinc_one_sided_limits():
    inner, outer = kernel_ft_limits(Sinc(), np.array([math.pi, 1.0, 4.0]))
    assert list(inner) == [1, 1, 0] and list(outer) == [0, 1, 0]


@settings(max_examples=200, deadline=None)
@given(st.floats(0.5, 6.0), st.floats(-math.pi, math.pi))
def test_taper_order(p, v):
    assert abs(1 - kernel_ft(PolynomialTaper(p), v)) <= (abs(v) / math.pi) ** p + 1e-15


# --- kernel_diff


def test_kernel_diff_examples():
    assert kernel_diff(Sinc(), 1, 2, 1.5 * math.pi) == 1
    assert kernel_diff(Sinc(), 1, 2, 0.9 * math.pi) == 0
    assert kernel_diff(Sinc(), 0, 3, math.pi) == 1


def test_kernel_diff_zero_convention():
    assert kernel_diff(Sinc(), 0, 2, 0.0) == 0
    assert kernel_diff(PolynomialTaper(2), 0, 2, 1.0) == pytest.approx(1 - (0.5 / math.pi) ** 2)


def test_kernel_diff_rejects_order():
    with pytest.raises(ValueError):
        kernel_diff(Sinc(), 2, 2, 0.0)
    with pytest.raises(ValueError):
        kernel_diff(Sinc(), 3, 1, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 30), st.integers(1, 30), st.floats(-200, 200))
def test_kernel_diff_sinc_is_band_indicator(m, d, u):
    k = m + d
    expected = 1.0 if math.pi * m < abs(u) <= math.pi * k else 0.0
    assert kernel_diff(Sinc(), m, k, u) == expected
