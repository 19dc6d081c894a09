"""Test functionals f and band-limited kernels K, both given in the Fourier domain.

Fourier convention: F f(u) = int exp(iux) f(x) dx, extended to compactly
supported distributions by F f(u) = <f, exp(iu.)>.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Functional",
    "Regular",
    "Gaussian",
    "CompactBump",
    "DiracPoint",
    "DiracDerivative",
    "functional_fourier",
    "Kernel",
    "Sinc",
    "PolynomialTaper",
    "kernel_ft",
    "kernel_ft_limits",
    "kernel_diff",
]

# |F f| below this fraction of its peak is treated as exactly zero by the
# quadrature (sets Functional.freq_cutoff for super-polynomially decaying f).
NEGLIGIBLE = 1e-24


class FunctionalKind(str, enum.Enum):
    REGULAR = "regular"
    DIRAC_POINT = "dirac"
    DIRAC_DERIVATIVE = "dirac_deriv"
    COMPACT_BUMP = "bump"


class Functional:
    """Base class: ``fourier(u)`` plus metadata.

    Attributes
    ----------
    s : float
        Decay index, |F f(u)| <= C_f (1 + u^2)^{-s}.
    support : (lo, hi) or None
    pointwise : callable or None
        Point evaluation of f, used by the quadrature oracle for theta.
    freq_cutoff : float
        |F f| is negligible beyond this frequency (``inf`` when it is not).
    """

    kind: FunctionalKind = FunctionalKind.REGULAR
    s: float = 0.0
    support: Optional[tuple[float, float]] = None
    pointwise: Optional[Callable] = None
    breakpoints: tuple[float, ...] = ()
    freq_cutoff: float = math.inf

    def fourier(self, u):
        raise NotImplementedError

    def __call__(self, u):
        return self.fourier(u)


class Regular(Functional):
    """Any regular f supplied through callables."""

    def __init__(self, fourier: Callable, pointwise: Optional[Callable] = None, s: float = 0.0,
                 support=None, freq_cutoff: float = math.inf):
        self._fourier = fourier
        self.pointwise = pointwise
        self.s = s
        self.support = support
        self.freq_cutoff = freq_cutoff

    def fourier(self, u):
        return np.asarray(self._fourier(np.asarray(u, dtype=float)), dtype=complex)


@dataclass(frozen=True, eq=False)
class Gaussian(Functional):
    """f(x) = amplitude * exp(-(x - center)^2 / (2 width^2))."""

    center: float = 0.0
    width: float = 1.0
    amplitude: float = 1.0
    s: float = 4.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("width must be positive")

    @property
    def freq_cutoff(self) -> float:
        return math.sqrt(-2.0 * math.log(NEGLIGIBLE)) / self.width

    def fourier(self, u):
        u = np.asarray(u, dtype=float)
        return (self.amplitude * self.width * math.sqrt(2 * math.pi)
                * np.exp(-0.5 * (self.width * u) ** 2 + 1j * u * self.center))

    def pointwise(self, x):
        return self.amplitude * np.exp(-0.5 * ((x - self.center) / self.width) ** 2)


@dataclass(frozen=True, eq=False)
class CompactBump(Functional):
    """Raised-cosine bump on [lo, hi]: (1 + cos(pi (x - c) / r)) / 2.

    C^1 with F f = O(|u|^-3), so the decay index s = 1 holds.
    """

    lo: float = 0.5
    hi: float = 1.5
    s: float = 1.0
    kind = FunctionalKind.COMPACT_BUMP

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("bump needs lo < hi")

    @property
    def support(self):
        return (self.lo, self.hi)

    @property
    def breakpoints(self):
        return (self.lo, 0.5 * (self.lo + self.hi), self.hi)

    def pointwise(self, x):
        c, r = 0.5 * (self.lo + self.hi), 0.5 * (self.hi - self.lo)
        t = (np.asarray(x, dtype=float) - c) / r
        return np.where(np.abs(t) <= 1.0, 0.5 * (1.0 + np.cos(np.pi * t)), 0.0)

    def fourier(self, u):
        # e^{iuc} r sinc(ur) a^2 / (a^2 - u^2), a = pi / r; removable poles at u = +-a
        u = np.asarray(u, dtype=float)
        c, r = 0.5 * (self.lo + self.hi), 0.5 * (self.hi - self.lo)
        a = math.pi / r
        near = np.abs(np.abs(u) - a) < 1e-6 * a
        us = np.where(near, 0.0, u)
        main = r * np.sinc(us * r / math.pi) * a**2 / (a**2 - us**2)
        # at |u| = a the limit is r / 2; first-order correction is below 1e-6 relative
        val = np.where(near, 0.5 * r, main)
        return val * np.exp(1j * u * c)


@dataclass(frozen=True, eq=False)
class DiracPoint(Functional):
    """Point evaluation at x0."""

    x0: float = 1.0
    kind = FunctionalKind.DIRAC_POINT
    s = 0.0

    @property
    def support(self):
        return (self.x0, self.x0)

    def fourier(self, u):
        return np.exp(1j * np.asarray(u, dtype=float) * self.x0)


@dataclass(frozen=True, eq=False)
class DiracDerivative(Functional):
    """k-th distributional derivative of the Dirac mass at x0; F f = (-iu)^k e^{iux0}."""

    x0: float = 1.0
    order: int = 1
    kind = FunctionalKind.DIRAC_DERIVATIVE

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")

    @property
    def s(self):
        return -float(self.order)

    @property
    def support(self):
        return (self.x0, self.x0)

    def fourier(self, u):
        u = np.asarray(u, dtype=float)
        return (-1j * u) ** self.order * np.exp(1j * u * self.x0)


def functional_fourier(f: Functional, u):
    return f.fourier(u)


# ---------------------------------------------------------------------------
# kernels


class Kernel:
    """Band-limited kernel, F K supported on [-pi, pi] with F K(0) = 1."""

    order: float

    def ft(self, v):
        raise NotImplementedError

    def ft_limits(self, v):
        """(inner, outer) one-sided limits of F K at |v| approached from below / above."""
        val = self.ft(v)
        return val, val


@dataclass(frozen=True)
class Sinc(Kernel):
    order: float = math.inf

    def ft(self, v):
        return np.where(np.abs(np.asarray(v, dtype=float)) <= math.pi, 1.0, 0.0)

    def ft_limits(self, v):
        av = np.abs(np.asarray(v, dtype=float))
        return np.where(av <= math.pi, 1.0, 0.0), np.where(av < math.pi, 1.0, 0.0)


@dataclass(frozen=True)
class PolynomialTaper(Kernel):
    """F K(v) = 1 - (|v| / pi)^p on [-pi, pi].

    The Hoelder constants are recorded for reference and not enforced.
    """

    power: float = 2.0

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("taper power must be positive")

    @property
    def order(self) -> float:
        return float(self.power)

    @property
    def holder_constants(self) -> tuple[float, float]:
        # (L_K, R_K); R_K bounds |F K|
        return (self.power / math.pi, 1.0)

    def ft(self, v):
        av = np.abs(np.asarray(v, dtype=float))
        return np.where(av <= math.pi, 1.0 - np.minimum(av / math.pi, 1.0) ** self.power, 0.0)


def kernel_ft(K: Kernel, v):
    return K.ft(v)


def kernel_ft_limits(K: Kernel, v):
    return K.ft_limits(v)


def kernel_diff(K: Kernel, m: int, k: int, u):
    """F K(u/k) - F K(u/m), with F K(u/0) := 1 at u = 0 and 0 elsewhere."""
    if not k > m >= 0:
        raise ValueError("need k > m >= 0")
    u = np.asarray(u, dtype=float)
    coarse = np.where(u == 0.0, 1.0, 0.0) if m == 0 else K.ft(u / m)
    return K.ft(u / k) - coarse
