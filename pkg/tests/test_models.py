import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from levyadapt.functionals import DiracPoint, Gaussian, Regular
from levyadapt.models import (
    BilateralGamma,
    CompoundPoisson,
    ExponentialJump,
    GammaJump,
    GammaSubordinator,
    UniformJump,
    ZeroMeasure,
    char_exponent,
    char_fn,
    make_rng,
    mu_fourier,
    sample_increments,
    true_theta,
    variance_components,
    variance_constants,
)

CATALOG = [
    CompoundPoisson(1.0, ExponentialJump(1.0)),
    CompoundPoisson(2.0, GammaJump(2.0, 0.5), delta=0.5),
    CompoundPoisson(1.5, UniformJump(-1.0, 2.0)),
    GammaSubordinator(1.0, 1.0),
    GammaSubordinator(2.0, 0.5, delta=2.0),
    BilateralGamma(1.0, 1.0, 1.5, 0.5),
]
IDS = ["cp_exp", "cp_gamma", "cp_unif", "gamma", "gamma_2", "bilateral"]


def quad_complex(fun, a, b):
    re = integrate.quad(lambda x: fun(x).real, a, b, limit=400, epsabs=1e-13)[0]
    im = integrate.quad(lambda x: fun(x).imag, a, b, limit=400, epsabs=1e-13)[0]
    return re + 1j * im


# --- char_exponent


def test_psi_zero_measure():
    assert char_exponent(ZeroMeasure(), 3.7) == 0


@pytest.mark.parametrize("model", CATALOG, ids=IDS)
def test_psi_at_origin(model):
    assert char_exponent(model, 0.0) == 0


def test_psi_compound_poisson_exponential():
    oracle = quad_complex(lambda x: (cmath.exp(1j * x) - 1) * math.exp(-x), 0.0, 50.0)
    closed = 1j / (1 - 1j)
    assert abs(oracle - closed) < 1e-10
    assert abs(char_exponent(CATALOG[0], 1.0) - closed) < 1e-14
    assert abs(closed - (-0.5 + 0.5j)) < 1e-15


# --- char_fn


@pytest.mark.parametrize("model", CATALOG + [ZeroMeasure()], ids=IDS + ["zero"])
def test_char_fn_normalised(model):
    assert char_fn(model, 0.0) == 1


def test_char_fn_zero_measure():
    assert np.all(char_fn(ZeroMeasure(), np.linspace(-9, 9, 7)) == 1)


def test_char_fn_gamma():
    # closed-form gamma(2, 1) characteristic function (1 - i u)^-2
    expected = (1 - 1j) ** -2
    assert abs(char_fn(GammaSubordinator(2.0, 1.0), 1.0) - expected) < 1e-14
    assert abs(expected - 0.5j) < 1e-15


# --- sampling


def test_sample_zero_measure():
    s = sample_increments(ZeroMeasure(), 5, 123)
    assert np.array_equal(np.concatenate([s.ecf_half, s.deriv_half]), np.zeros(10))


def test_sample_mean_compound_poisson():
    model = CompoundPoisson(2.0, ExponentialJump(1.0))
    s = sample_increments(model, 50_000, 7)
    x = np.concatenate([s.ecf_half, s.deriv_half])
    assert x.size == 100_000
    assert abs(x.mean() - 2.0) <= 3 * x.std(ddof=1) / math.sqrt(x.size)


def test_sample_deterministic():
    model = CATALOG[5]
    a = sample_increments(model, 300, 42)
    b = sample_increments(model, 300, 42)
    assert a.ecf_half.tobytes() == b.ecf_half.tobytes()
    assert a.deriv_half.tobytes() == b.deriv_half.tobytes()
    c = sample_increments(model, 300, 43)
    assert not np.array_equal(a.ecf_half, c.ecf_half)


def test_sample_substreams_differ():
    a = make_rng((1, 100, 0)).random(4)
    b = make_rng((1, 100, 1)).random(4)
    assert not np.array_equal(a, b)


def test_sample_rejects_zero():
    with pytest.raises(ValueError):
        sample_increments(CATALOG[0], 0, 1)


@pytest.mark.parametrize("model", CATALOG, ids=IDS)
def test_sampler_law(model):
    s = sample_increments(model, 50_000, 11)
    x = np.concatenate([s.ecf_half, s.deriv_half])
    mean = model.delta * (model.psi_prime(0.0) / 1j).real
    var = model.delta * model.second_moment()
    se_mean = math.sqrt(var / x.size)
    assert abs(x.mean() - mean) <= 4 * se_mean
    # variance of the sample variance ~ (m4 - var^2) / N, estimated empirically
    c = x - x.mean()
    se_var = math.sqrt(np.var(c**2) / x.size)
    assert abs(np.var(x) - var) <= 4 * se_var


# --- mu_fourier


def test_mu_fourier_zero():
    assert mu_fourier(ZeroMeasure(), 2.5) == 0


@pytest.mark.parametrize("model", CATALOG, ids=IDS)
def test_mu_fourier_origin_is_first_moment(model):
    total = 0.0
    for p in model.mu_pieces():
        total += integrate.quad(lambda x: p.derivative(x, 0), p.lo, p.hi, limit=400)[0]
    v = mu_fourier(model, 0.0)
    assert abs(v.imag) < 1e-15
    assert abs(v.real - total) <= 1e-6 * abs(total)
    assert abs(v.real - model.first_moment()) <= 1e-12 * abs(total)


def test_mu_fourier_compound_poisson():
    oracle = quad_complex(lambda x: cmath.exp(1j * x) * x * math.exp(-x), 0.0, 60.0)
    assert abs(oracle - (1 - 1j) ** -2) < 1e-10
    assert abs(mu_fourier(CATALOG[0], 1.0) - oracle) < 1e-10


@pytest.mark.parametrize("model", CATALOG, ids=IDS)
def test_mu_fourier_from_char_fn(model):
    # F mu = (1/Delta) phi' / (i phi), phi' by central differences
    u, h = 0.7, 1e-5
    dphi = (char_fn(model, u + h) - char_fn(model, u - h)) / (2 * h)
    via_phi = dphi / (model.delta * 1j * char_fn(model, u))
    assert abs(via_phi - mu_fourier(model, u)) < 1e-8


# --- variance constants


def test_variance_constants_zero():
    assert variance_constants(ZeroMeasure()) == (0.0, 0.0)


def test_variance_components_compound_poisson():
    oracle = integrate.quad(lambda u: abs(1j * (1 - 1j * u) ** -2) ** 2, -np.inf, np.inf)[0]
    assert abs(oracle - math.pi / 2) < 1e-9
    comp = variance_components(CATALOG[0])
    assert abs(comp.psi1_l2sq - oracle) < 1e-6
    c1, c2 = variance_constants(CATALOG[0])
    assert math.isfinite(c1) and c1 > 0 and c2 > 0


def test_variance_components_scale_with_intensity():
    a = variance_components(CompoundPoisson(1.0, ExponentialJump(1.0)))
    b = variance_components(CompoundPoisson(2.0, ExponentialJump(1.0)))
    # sup |Psi''| scales by 2, sup |Psi'|^2 by 4
    assert b.psi2_sup == pytest.approx(2 * a.psi2_sup, rel=1e-9)
    assert b.psi1_sup**2 == pytest.approx(4 * a.psi1_sup**2, rel=1e-9)


def test_c1_infinite_for_uniform_jumps():
    model = CompoundPoisson(1.0, UniformJump(0.5, 2.0))
    # x^2 times the jump density jumps at the endpoints, so |Psi''| ~ 1/|u|:
    # the partial integrals keep growing like log U
    u = np.linspace(0.0, 1e4, 2_000_001)
    cum = integrate.cumulative_trapezoid(np.abs(model.psi_second(u)), u, initial=0.0)
    part = [cum[20_000], cum[200_000], cum[-1]]
    assert part[2] - part[1] > 0.5 * (part[1] - part[0]) > 0
    c1, c2 = variance_constants(model)
    assert c1 == math.inf and math.isfinite(c2)


def test_c1_finite_for_gamma():
    c1, _ = variance_constants(GammaSubordinator(1.0, 1.0))
    # int |Psi''| = int (1+u^2)^-1 = pi, int |Psi'|^2 = pi
    assert c1 == pytest.approx(3 * math.pi, rel=1e-6)


# --- invariants


@pytest.mark.parametrize("model", CATALOG, ids=IDS)
def test_finite_difference_consistency(model):
    u = np.linspace(-50, 50, 1000)
    h = 1e-4
    d1 = (model.psi(u + h) - model.psi(u - h)) / (2 * h)
    d2 = (model.psi_prime(u + h) - model.psi_prime(u - h)) / (2 * h)
    p1, p2 = model.psi_prime(u), model.psi_second(u)
    assert np.all(np.abs(p1 - d1) <= 1e-5 * (1 + np.abs(p1)))
    assert np.all(np.abs(p2 - d2) <= 1e-5 * (1 + np.abs(p2)))


@pytest.mark.parametrize("model", CATALOG, ids=IDS)
def test_char_fn_hermitian_and_bounded(model):
    u = np.linspace(-80, 80, 2001)
    phi = char_fn(model, u)
    assert np.max(np.abs(char_fn(model, -u) - np.conj(phi))) <= 1e-12
    assert np.all(np.abs(phi) <= 1 + 1e-15)


@pytest.mark.parametrize("model", CATALOG, ids=IDS)
def test_decay_profile_lower_bound(model):
    prof = model.decay_profile()
    u = np.linspace(-200, 200, 4001)
    # the profile bounds |phi_1|; |phi_Delta| = |phi_1|^Delta
    phi1 = np.abs(np.exp(model.psi(u)))
    assert np.all(phi1 >= prof.lower_bound(u) * (1 - 1e-12))


@settings(max_examples=60, deadline=None)
@given(st.floats(-100, 100), st.integers(0, len(CATALOG) - 1))
def test_psi_hermitian_property(u, i):
    m = CATALOG[i]
    assert abs(m.psi(-u) - np.conj(m.psi(u))) <= 1e-12 * (1 + abs(m.psi(u)))
    assert abs(np.exp(m.delta * m.psi(u))) <= 1 + 1e-15


# --- true_theta


def test_true_theta_zero():
    assert true_theta(ZeroMeasure(), Gaussian()) == 0


def test_true_theta_unit_on_half_line():
    # f = 1 on [0, inf): <f, mu> = int_0^inf x e^-x dx = 1
    one = Regular(lambda u: np.zeros_like(u, dtype=complex), pointwise=lambda x: 1.0 + 0.0 * x,
                  support=(0.0, math.inf))
    assert abs(true_theta(CATALOG[0], one) - 1.0) < 1e-10


def test_true_theta_dirac():
    assert abs(true_theta(CATALOG[0], DiracPoint(1.0)) - math.exp(-1)) < 1e-15


def test_true_theta_gaussian_against_quadrature():
    f = Gaussian(center=0.5, width=0.8)
    oracle = integrate.quad(lambda x: math.exp(-((x - 0.5) ** 2) / 1.28) * x * math.exp(-x), 0, 60,
                            epsabs=1e-14)[0]
    assert true_theta(CATALOG[0], f) == pytest.approx(oracle, rel=1e-8)


def test_true_theta_rejects_singular_point():
    with pytest.raises(ValueError):
        true_theta(GammaSubordinator(1.0, 1.0), DiracPoint(0.0))
