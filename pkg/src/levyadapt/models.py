"""Pure-jump, finite-variation Levy models with closed-form characteristics.

Every model carries the observation step ``delta`` and exposes the
characteristic exponent

    Psi(u) = int (e^{iux} - 1) nu(dx),

its first two derivatives, the density of the signed measure
mu(dx) = x nu(dx) (with derivatives of any order off the singular points),
and an exact increment sampler.  The Fourier transform of mu is
F mu(u) = Psi'(u) / i.

Catalog
-------
ZeroMeasure
    nu = 0.
CompoundPoisson(intensity, jump)
    jump in {ExponentialJump, GammaJump, UniformJump}.
GammaSubordinator(shape, scale)
    nu(dx) = shape * x^{-1} e^{-x/scale} dx on x > 0.
BilateralGamma(shape_pos, scale_pos, shape_neg, scale_neg)
    Difference of two independent gamma subordinators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, optimize, special

__all__ = [
    "DecayProfile",
    "ExponentialJump",
    "GammaJump",
    "UniformJump",
    "LevyModel",
    "ZeroMeasure",
    "CompoundPoisson",
    "GammaSubordinator",
    "BilateralGamma",
    "make_rng",
    "char_exponent",
    "char_fn",
    "mu_fourier",
    "sample_increments",
    "variance_components",
    "variance_constants",
    "true_theta",
]


def make_rng(seed: int | Sequence[int]) -> np.random.Generator:
    """Philox (counter-based, 64-bit) generator keyed by ``seed``.

    ``seed`` may be a single integer or a sequence such as
    ``(seed, n, replication)``; each distinct key gives an independent
    substream via :class:`numpy.random.SeedSequence`.
    """
    if isinstance(seed, (int, np.integer)):
        entropy: int | list[int] = int(seed)
    else:
        entropy = [int(s) for s in seed]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class DecayProfile:
    """Lower bound |phi_1(u)| >= C_phi (1+u^2)^{-beta/2} exp(-c_phi |u|^rho)."""

    beta: float
    rho: float
    c_phi: float
    C_phi: float

    def lower_bound(self, u):
        u = np.asarray(u, dtype=float)
        return self.C_phi * (1.0 + u**2) ** (-self.beta / 2) * np.exp(-self.c_phi * np.abs(u) ** self.rho)


@dataclass(frozen=True)
class _Piece:
    # coef * (side*x)^power * exp(-rate * side*x) on [lo, hi]
    coef: float
    power: float
    rate: float
    side: int
    lo: float
    hi: float

    def derivative(self, x: float, k: int) -> float:
        y = self.side * x
        total = 0.0
        for j in range(k + 1):
            falling = 1.0
            for i in range(j):
                falling *= self.power - i
            if falling == 0.0:
                continue
            total += math.comb(k, j) * falling * y ** (self.power - j) * (-self.rate) ** (k - j)
        return self.coef * self.side**k * total * math.exp(-self.rate * y)


# ---------------------------------------------------------------------------
# jump laws for compound Poisson models


@dataclass(frozen=True)
class ExponentialJump:
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("exponential jump scale must be positive")

    def cf(self, u):
        return 1.0 / (1.0 - 1j * self.scale * u)

    def cf1(self, u):
        return 1j * self.scale / (1.0 - 1j * self.scale * u) ** 2

    def cf2(self, u):
        return -2.0 * self.scale**2 / (1.0 - 1j * self.scale * u) ** 3

    def sample(self, rng, size):
        return rng.exponential(self.scale, size)

    def mean(self):
        return self.scale

    def abs_mean(self):
        return self.scale

    def second_moment(self):
        return 2.0 * self.scale**2

    def mu_pieces(self, intensity):
        return [_Piece(intensity / self.scale, 1.0, 1.0 / self.scale, 1, 0.0, math.inf)]

    def singular_points(self):
        return (0.0,)

    def eta(self):
        return 0.5 / self.scale

    def cf_lower(self):
        # Re cf >= 0
        return 0.0


@dataclass(frozen=True)
class GammaJump:
    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError("gamma jump shape and scale must be positive")

    def cf(self, u):
        return (1.0 - 1j * self.scale * u) ** (-self.shape)

    def cf1(self, u):
        k, s = self.shape, self.scale
        return 1j * k * s * (1.0 - 1j * s * u) ** (-k - 1)

    def cf2(self, u):
        k, s = self.shape, self.scale
        return -k * (k + 1) * s**2 * (1.0 - 1j * s * u) ** (-k - 2)

    def sample(self, rng, size):
        return rng.gamma(self.shape, self.scale, size)

    def mean(self):
        return self.shape * self.scale

    def abs_mean(self):
        return self.mean()

    def second_moment(self):
        return self.shape * (self.shape + 1) * self.scale**2

    def mu_pieces(self, intensity):
        coef = intensity / (special.gamma(self.shape) * self.scale**self.shape)
        return [_Piece(coef, self.shape, 1.0 / self.scale, 1, 0.0, math.inf)]

    def singular_points(self):
        return (0.0,)

    def eta(self):
        return 0.5 / self.scale

    def cf_lower(self):
        return -1.0


@dataclass(frozen=True)
class UniformJump:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("uniform jump requires lo < hi")

    def _moment_cf(self, u, p):
        # E[J^p e^{iuJ}] for p in {0, 1, 2}
        u = np.asarray(u, dtype=float)
        lo, hi = self.lo, self.hi
        width = hi - lo
        scale = max(abs(lo), abs(hi))
        small = np.abs(u) * scale < 1e-3
        us = np.where(small, 1.0, u)
        iu = 1j * us

        def antideriv(x):
            e = np.exp(iu * x)
            if p == 0:
                return e / iu
            if p == 1:
                return e * (x / iu - 1.0 / iu**2)
            return e * (x**2 / iu - 2.0 * x / iu**2 + 2.0 / iu**3)

        exact = (antideriv(hi) - antideriv(lo)) / width
        # Taylor series in u for small |u|: sum_r (iu)^r E[J^{p+r}] / r!
        series = np.zeros(u.shape, dtype=complex)
        for r in range(8):
            q = p + r
            moment = (hi ** (q + 1) - lo ** (q + 1)) / ((q + 1) * width)
            series = series + (1j * u) ** r * moment / math.factorial(r)
        return np.where(small, series, exact)

    def cf(self, u):
        return self._moment_cf(u, 0)

    def cf1(self, u):
        return 1j * self._moment_cf(u, 1)

    def cf2(self, u):
        return -self._moment_cf(u, 2)

    def sample(self, rng, size):
        return rng.uniform(self.lo, self.hi, size)

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def abs_mean(self):
        lo, hi = self.lo, self.hi
        if lo >= 0:
            return self.mean()
        if hi <= 0:
            return -self.mean()
        return (lo**2 + hi**2) / (2.0 * (hi - lo))

    def second_moment(self):
        return (self.hi**3 - self.lo**3) / (3.0 * (self.hi - self.lo))

    def mu_pieces(self, intensity):
        return [_Piece(intensity / (self.hi - self.lo), 1.0, 0.0, 1, self.lo, self.hi)]

    def singular_points(self):
        return (self.lo, self.hi)

    def eta(self):
        # bounded jumps: every eta works; fixed at the inverse jump range
        return 1.0 / max(abs(self.lo), abs(self.hi))

    def cf_lower(self):
        return -1.0


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class LevyModel:
    """Base class.  Subclasses supply the closed forms."""

    delta: float = field(default=1.0, kw_only=True)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("observation step delta must be positive")

    # -- characteristic exponent -------------------------------------------------
    def psi(self, u):
        raise NotImplementedError

    def psi_prime(self, u):
        raise NotImplementedError

    def psi_second(self, u):
        raise NotImplementedError

    # -- measure ---------------------------------------------------------------
    def mu_pieces(self) -> list[_Piece]:
        raise NotImplementedError

    def singular_points(self) -> tuple[float, ...]:
        return ()

    def first_moment(self) -> float:
        """int x nu(dx) = mu(R)."""
        raise NotImplementedError

    def second_moment(self) -> float:
        """int x^2 nu(dx)."""
        raise NotImplementedError

    # -- metadata ----------------------------------------------------------------
    c1_finite: bool = field(default=True, init=False, repr=False)

    def decay_profile(self) -> DecayProfile:
        raise NotImplementedError

    def default_eta(self) -> float:
        raise NotImplementedError

    def tail_exponents(self) -> tuple[float, float]:
        """Power-law decay of (|Psi''|, |Psi'|^2) used for analytic tails."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    # -- derived -------------------------------------------------------------------
    def char_fn(self, u):
        return np.exp(self.delta * self.psi(u))

    def mu_fourier(self, u):
        return self.psi_prime(u) / 1j

    def mu_density(self, x, k: int = 0):
        """k-th derivative of the density of mu at x (x off singular points)."""
        x = float(x)
        value = 0.0
        for piece in self.mu_pieces():
            if piece.lo < x < piece.hi:
                value += piece.derivative(x, k)
        return value

    def in_density_domain(self, x: float) -> bool:
        return all(abs(x - p) > 1e-12 for p in self.singular_points())


@dataclass(frozen=True)
class ZeroMeasure(LevyModel):
    def psi(self, u):
        return np.zeros_like(np.asarray(u, dtype=float), dtype=complex)

    psi_prime = psi
    psi_second = psi

    def mu_pieces(self):
        return []

    def first_moment(self):
        return 0.0

    def second_moment(self):
        return 0.0

    def decay_profile(self):
        return DecayProfile(0.0, 0.0, 0.0, 1.0)

    def default_eta(self):
        return 1.0

    def tail_exponents(self):
        return (2.0, 2.0)

    def sample(self, rng, size):
        return np.zeros(size)


@dataclass(frozen=True)
class CompoundPoisson(LevyModel):
    intensity: float = 1.0
    jump: ExponentialJump | GammaJump | UniformJump = ExponentialJump(1.0)

    def __post_init__(self):
        super().__post_init__()
        if not self.intensity > 0:
            raise ValueError("intensity must be positive")
        # int |Psi''| diverges when the jump density has jump discontinuities
        object.__setattr__(self, "c1_finite", not isinstance(self.jump, UniformJump))

    def psi(self, u):
        return self.intensity * (self.jump.cf(u) - 1.0)

    def psi_prime(self, u):
        return self.intensity * self.jump.cf1(u)

    def psi_second(self, u):
        return self.intensity * self.jump.cf2(u)

    def mu_pieces(self):
        return self.jump.mu_pieces(self.intensity)

    def singular_points(self):
        return self.jump.singular_points()

    def first_moment(self):
        return self.intensity * self.jump.mean()

    def second_moment(self):
        return self.intensity * self.jump.second_moment()

    def decay_profile(self):
        # |phi_1| = exp(intensity (Re cf - 1)) >= exp(intensity (cf_lower - 1))
        return DecayProfile(0.0, 0.0, 0.0, math.exp(self.intensity * (self.jump.cf_lower() - 1.0)))

    def default_eta(self):
        return self.jump.eta()

    def tail_exponents(self):
        if isinstance(self.jump, ExponentialJump):
            return (3.0, 4.0)
        if isinstance(self.jump, GammaJump):
            return (self.jump.shape + 2.0, 2.0 * self.jump.shape + 2.0)
        return (1.0, 2.0)

    def sample(self, rng, size):
        counts = rng.poisson(self.intensity * self.delta, size)
        jumps = self.jump.sample(rng, int(counts.sum()))
        owner = np.repeat(np.arange(size), counts)
        return np.bincount(owner, weights=jumps, minlength=size).astype(float)


@dataclass(frozen=True)
class GammaSubordinator(LevyModel):
    shape: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError("shape and scale must be positive")

    def psi(self, u):
        return -self.shape * np.log(1.0 - 1j * self.scale * np.asarray(u, dtype=float))

    def psi_prime(self, u):
        return 1j * self.shape * self.scale / (1.0 - 1j * self.scale * np.asarray(u, dtype=float))

    def psi_second(self, u):
        return -self.shape * self.scale**2 / (1.0 - 1j * self.scale * np.asarray(u, dtype=float)) ** 2

    def mu_pieces(self):
        return [_Piece(self.shape, 0.0, 1.0 / self.scale, 1, 0.0, math.inf)]

    def singular_points(self):
        return (0.0,)

    def first_moment(self):
        return self.shape * self.scale

    def second_moment(self):
        return self.shape * self.scale**2

    def decay_profile(self):
        # (1 + s^2 u^2)^{-a/2} >= max(1, s)^{-a} (1 + u^2)^{-a/2}
        return DecayProfile(self.shape, 0.0, 0.0, max(1.0, self.scale) ** (-self.shape))

    def default_eta(self):
        return 0.5 / self.scale

    def tail_exponents(self):
        return (2.0, 2.0)

    def sample(self, rng, size):
        return rng.gamma(self.shape * self.delta, self.scale, size)


@dataclass(frozen=True)
class BilateralGamma(LevyModel):
    shape_pos: float = 1.0
    scale_pos: float = 1.0
    shape_neg: float = 1.0
    scale_neg: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if min(self.shape_pos, self.scale_pos, self.shape_neg, self.scale_neg) <= 0:
            raise ValueError("bilateral gamma parameters must be positive")

    def psi(self, u):
        u = np.asarray(u, dtype=float)
        return (-self.shape_pos * np.log(1.0 - 1j * self.scale_pos * u)
                - self.shape_neg * np.log(1.0 + 1j * self.scale_neg * u))

    def psi_prime(self, u):
        u = np.asarray(u, dtype=float)
        return (1j * self.shape_pos * self.scale_pos / (1.0 - 1j * self.scale_pos * u)
                - 1j * self.shape_neg * self.scale_neg / (1.0 + 1j * self.scale_neg * u))

    def psi_second(self, u):
        u = np.asarray(u, dtype=float)
        return (-self.shape_pos * self.scale_pos**2 / (1.0 - 1j * self.scale_pos * u) ** 2
                - self.shape_neg * self.scale_neg**2 / (1.0 + 1j * self.scale_neg * u) ** 2)

    def mu_pieces(self):
        return [
            _Piece(self.shape_pos, 0.0, 1.0 / self.scale_pos, 1, 0.0, math.inf),
            _Piece(-self.shape_neg, 0.0, 1.0 / self.scale_neg, -1, -math.inf, 0.0),
        ]

    def singular_points(self):
        return (0.0,)

    def first_moment(self):
        return self.shape_pos * self.scale_pos - self.shape_neg * self.scale_neg

    def second_moment(self):
        return self.shape_pos * self.scale_pos**2 + self.shape_neg * self.scale_neg**2

    def decay_profile(self):
        a, b = self.shape_pos, self.shape_neg
        c = max(1.0, self.scale_pos) ** (-a) * max(1.0, self.scale_neg) ** (-b)
        return DecayProfile(a + b, 0.0, 0.0, c)

    def default_eta(self):
        return 0.5 / max(self.scale_pos, self.scale_neg)

    def tail_exponents(self):
        return (2.0, 2.0)

    def sample(self, rng, size):
        pos = rng.gamma(self.shape_pos * self.delta, self.scale_pos, size)
        neg = rng.gamma(self.shape_neg * self.delta, self.scale_neg, size)
        return pos - neg


# ---------------------------------------------------------------------------
# operations


def char_exponent(model: LevyModel, u):
    """Psi(u) in closed form."""
    return model.psi(u)


def char_fn(model: LevyModel, u):
    """phi_Delta(u) = exp(Delta * Psi(u))."""
    return model.char_fn(u)


def mu_fourier(model: LevyModel, u):
    """F mu(u) = Psi'(u) / i."""
    return model.mu_fourier(u)


def sample_increments(model: LevyModel, n: int, seed: int | Sequence[int]):
    """Draw 2n i.i.d. copies of X_Delta; the first n form the ECF half."""
    from .ecf import SplitSample

    if n < 1:
        raise ValueError("n must be at least 1")
    draws = np.asarray(model.sample(make_rng(seed), 2 * n), dtype=float)
    return SplitSample(draws[:n].copy(), draws[n:].copy(), model.delta)


@dataclass(frozen=True)
class VarianceComponents:
    psi2_l1: float       # int |Psi''|
    psi1_l2sq: float     # int |Psi'|^2
    psi2_sup: float      # sup |Psi''|
    psi1_sup: float      # sup |Psi'|


def _half_line_integral(fun, window: float, tail_power: float) -> float:
    # int_0^window fun + analytic power-law tail, doubled by evenness
    body, _ = integrate.quad(fun, 0.0, window, limit=500, epsabs=1e-13, epsrel=1e-11)
    tail = fun(window) * window / (tail_power - 1.0)
    return 2.0 * (body + tail)


def _grid_sup(fun, window: float) -> float:
    u = np.linspace(-window, window, 40001)
    vals = fun(u)
    i = int(np.argmax(vals))
    lo, hi = u[max(i - 1, 0)], u[min(i + 1, u.size - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(lambda x: -fun(np.array([x]))[0], bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        return float(max(vals[i], -res.fun))
    return float(vals[i])


def variance_components(model: LevyModel, window: float = 200.0) -> VarianceComponents:
    """The four norms of Psi' and Psi'' entering the variance constants."""
    if isinstance(model, ZeroMeasure):
        return VarianceComponents(0.0, 0.0, 0.0, 0.0)
    p2, p1sq = model.tail_exponents()
    abs2 = lambda u: np.abs(model.psi_second(u))
    sq1 = lambda u: np.abs(model.psi_prime(u)) ** 2
    l1 = _half_line_integral(lambda x: float(abs2(np.array([x]))[0]), window, p2) if model.c1_finite else math.inf
    l2 = _half_line_integral(lambda x: float(sq1(np.array([x]))[0]), window, p1sq)
    return VarianceComponents(l1, l2, _grid_sup(abs2, window), math.sqrt(_grid_sup(sq1, window)))


def variance_constants(model: LevyModel, C: float = 1.0, window: float = 200.0) -> tuple[float, float]:
    """(C1, C2) of the non-asymptotic risk bound; C1 is +inf when int |Psi''| diverges."""
    comp = variance_components(model, window)
    c1 = C * (comp.psi2_l1 + 2.0 * comp.psi1_l2sq)
    c2 = C * (comp.psi2_sup + 2.0 * comp.psi1_sup**2)
    return c1, c2


def true_theta(model: LevyModel, f) -> float:
    """<f, mu> by closed form (point functionals) or adaptive quadrature."""
    from .functionals import DiracDerivative, DiracPoint

    if isinstance(model, ZeroMeasure):
        return 0.0
    if isinstance(f, (DiracPoint, DiracDerivative)):
        if not model.in_density_domain(f.x0):
            raise ValueError(f"x0={f.x0} is a singular point of the jump measure density")
        k = f.order if isinstance(f, DiracDerivative) else 0
        return (-1) ** k * model.mu_density(f.x0, k)
    if f.pointwise is None:
        raise ValueError("functional has no pointwise form")
    total = 0.0
    for piece in model.mu_pieces():
        lo, hi = piece.lo, piece.hi
        if f.support is not None:
            lo, hi = max(lo, f.support[0]), min(hi, f.support[1])
            if lo >= hi:
                continue
        breaks = [b for b in (0.0, *(f.breakpoints or ())) if lo < b < hi]
        edges = [lo, *sorted(breaks), hi]
        for a, b in zip(edges[:-1], edges[1:]):
            val, _ = integrate.quad(lambda x: f.pointwise(x) * piece.derivative(x, 0), a, b,
                                    limit=1000, epsabs=1e-15, epsrel=1e-12)
            total += val
    return total
