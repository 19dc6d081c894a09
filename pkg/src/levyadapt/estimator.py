"""Kernel estimator of theta = <f, mu>, its smoothed target, the
non-asymptotic risk bound, bias bounds and theoretical rates.

Integrals over u are evaluated with the piecewise trapezoid rule of
:mod:`levyadapt.quadrature`.  Every sum is compared with the same sum at
double spacing, and the grid is refined until the two agree.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .ecf import Inverse, SplitSample, TruncationConfig, ecf, ecf_deriv, ecf_on_grid, log_floor, neumann_threshold
from .functionals import Functional, Kernel
from .models import LevyModel, ZeroMeasure, true_theta, variance_constants
from .quadrature import HalfLineGrid, PiecewiseRule, half_line_grid, kernel_limits

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "NonIntegrableError",
    "EstimateRecord",
    "band_grid",
    "ecf_values",
    "EcfCache",
    "kernel_estimate",
    "kernel_estimates",
    "smoothed_target",
    "smoothed_targets",
    "variance_integrals",
    "risk_bound",
    "Regime",
    "RateSpec",
    "RateForm",
    "theoretical_rate",
    "BiasConstants",
    "bias_bound",
]


class QuadratureError(RuntimeError):
    """Trapezoid sums did not settle within the node cap."""


class NonIntegrableError(ValueError):
    """F f is not finite on the integration band."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Trapezoid settings.

    ``nodes`` is the interval count of a uniform grid on [-pi m s, pi m s]
    (s = ``support_scale``); each band segment gets that grid's spacing.
    Refinement doubles ``nodes`` up to ``max_nodes`` while the halved-rule
    difference exceeds tol * (1 + |value|).
    """

    nodes: int = 8192
    rule: str = "trapezoid"
    support_scale: float = 1.0
    tol: float = 1e-6
    max_nodes: int = 1 << 17

    def __post_init__(self):
        if self.nodes < 64 or self.nodes % 2:
            raise ValueError("nodes must be even and at least 64")
        if self.rule != "trapezoid":
            raise ValueError(f"unsupported quadrature rule {self.rule!r}")
        if not self.support_scale > 0:
            raise ValueError("support_scale must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.nodes, self.rule, self.support_scale, self.tol, self.max_nodes)


def band_grid(ms: Sequence[int], f: Functional, q: QuadratureSpec) -> HalfLineGrid:
    return half_line_grid(ms, q.nodes, q.support_scale, f.freq_cutoff)


def _check_ms(ms) -> list[int]:
    ms = [int(m) for m in ms]
    if not ms:
        raise ValueError("empty bandwidth grid")
    if min(ms) < 1:
        raise ValueError("m must be >= 1")
    return ms


def _fourier_pair(f: Functional, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # (F f(-p), F f(p))
    neg = np.asarray(f.fourier(-p), dtype=complex)
    pos = np.asarray(f.fourier(p), dtype=complex)
    if not (np.all(np.isfinite(neg)) and np.all(np.isfinite(pos))):
        raise NonIntegrableError("F f is not finite on the integration band")
    return neg, pos


def _fold(f_neg, f_pos, g):
    # g(u) F f(-u) + conj(g(u)) F f(u): the integrand at u plus its mirror at -u
    return f_neg * g + f_pos * np.conj(g)


def _settled(fine, coarse, tol) -> bool:
    return bool(np.all(np.abs(fine.real - coarse.real) <= tol * (1.0 + np.abs(fine.real))))


def ecf_values(sample: SplitSample, grid: HalfLineGrid) -> tuple[np.ndarray, np.ndarray]:
    """phi_hat and phi_hat' at the grid points (one kernel pass per segment)."""
    phi = [np.ones(1, dtype=complex)]
    dphi = [np.array([1j * sample.deriv_half.mean()])]
    for a, b, c in grid.segments:
        du = (b - a) / c
        phi.append(ecf_on_grid(sample, a + du, du, c, "ecf"))
        dphi.append(ecf_on_grid(sample, a + du, du, c, "deriv"))
    return np.concatenate(phi), np.concatenate(dphi)


class EcfCache:
    """Per-sample memo of ``ecf_values`` keyed by grid layout.

    Lets both inverse variants and the penalties share one ECF pass.  Not
    meant to be shared between threads.
    """

    def __init__(self, sample: SplitSample):
        self.sample = sample
        self._store: dict = {}

    def values(self, grid: HalfLineGrid) -> tuple[np.ndarray, np.ndarray]:
        key = grid.segments
        if key not in self._store:
            self._store[key] = ecf_values(self.sample, grid)
        return self._store[key]


class _Inverter:
    """Branch logic of the regularised inverse: keep 1/phi_hat or switch."""

    def __init__(self, sample: SplitSample, cfg: TruncationConfig):
        self.cfg = cfg
        self.n = sample.n
        self.delta = sample.delta
        if cfg.variant is Inverse.LOG_TRUNCATED and self.n < 2:
            raise ValueError("log truncation needs n >= 2")

    def threshold(self, u):
        if self.cfg.variant is Inverse.NEUMANN:
            return np.full(np.shape(u), neumann_threshold(self.n, self.delta))
        return log_floor(u, self.n, self.cfg)

    def keep(self, u, phi):
        return np.abs(phi) >= self.threshold(u)

    def factor(self, u, phi, dphi, keep):
        """(1/Delta) phi_hat' / (i inverse) on the chosen branch."""
        ratio = dphi / (1j * self.delta)
        safe = np.where(keep, phi, 1.0)
        if self.cfg.variant is Inverse.NEUMANN:
            return np.where(keep, ratio / safe, 0.0)
        return np.where(keep, ratio / safe, ratio / self.threshold(u))


def _switch_points(sample, inv: _Inverter, p, phi, keep):
    """Locate each branch switch between neighbouring nodes by root finding."""
    cells = np.flatnonzero(keep[:-1] != keep[1:])
    roots = np.empty(cells.size)

    def gap(x):
        return abs(complex(ecf(sample, np.array([x]))[0])) - float(inv.threshold(np.array([x]))[0])

    for i, j in enumerate(cells):
        a, b = p[j], p[j + 1]
        ga, gb = gap(a), gap(b)
        if ga == 0.0 or gb == 0.0 or (ga > 0) == (gb > 0):
            # rounding disagrees with the node test; split the cell evenly
            roots[i] = 0.5 * (a + b)
        else:
            roots[i] = optimize.brentq(gap, a, b, xtol=1e-14 * max(1.0, b), rtol=1e-14)
    return cells, roots


@dataclass(frozen=True)
class _Assembled:
    points: np.ndarray
    coarse: np.ndarray
    left: np.ndarray
    right: np.ndarray


def _estimator_integrand(sample: SplitSample, f: Functional, cfg: TruncationConfig,
                         grid: HalfLineGrid, cache: EcfCache | None = None) -> _Assembled:
    inv = _Inverter(sample, cfg)
    p = grid.points
    phi, dphi = (cache or EcfCache(sample)).values(grid)
    keep = inv.keep(p, phi)
    g = inv.factor(p, phi, dphi, keep)
    cells, roots = _switch_points(sample, inv, p, phi, keep)
    f_neg, f_pos = _fourier_pair(f, p)
    vals = _fold(f_neg, f_pos, g)
    if cells.size == 0:
        return _Assembled(p, grid.coarse, vals, vals)
    r_phi, r_dphi = ecf(sample, roots), ecf_deriv(sample, roots)
    left_keep, right_keep = keep[cells], keep[cells + 1]
    rf_neg, rf_pos = _fourier_pair(f, roots)
    r_left = _fold(rf_neg, rf_pos, inv.factor(roots, r_phi, r_dphi, left_keep))
    r_right = _fold(rf_neg, rf_pos, inv.factor(roots, r_phi, r_dphi, right_keep))
    at = cells + 1
    return _Assembled(
        np.insert(p, at, roots),
        np.insert(grid.coarse, at, True),
        np.insert(vals, at, r_left),
        np.insert(vals, at, r_right),
    )


def _integrate(K: Kernel, ms, data: _Assembled):
    rows_l, rows_r = kernel_limits(K, ms, data.points)
    fine = PiecewiseRule(data.points).apply(rows_l, rows_r, data.left, data.right)
    coarse = PiecewiseRule(data.points, data.coarse).apply(rows_l, rows_r, data.left, data.right)
    return fine / (2.0 * math.pi), coarse / (2.0 * math.pi)


@dataclass(frozen=True)
class EstimateRecord:
    m: int
    theta_hat: float
    imag_residual: float
    variant: Inverse
    nodes: int = 0


def kernel_estimates(sample: SplitSample, f: Functional, K: Kernel, ms: Sequence[int],
                     cfg: TruncationConfig = TruncationConfig(), q: QuadratureSpec = QuadratureSpec(),
                     cache: EcfCache | None = None) -> list[EstimateRecord]:
    """theta_hat_m for every m in ``ms``, sharing one ECF evaluation per refinement level."""
    ms = _check_ms(ms)
    if cache is None:
        cache = EcfCache(sample)
    spec = q
    while True:
        grid = band_grid(ms, f, spec)
        fine, coarse = _integrate(K, ms, _estimator_integrand(sample, f, cfg, grid, cache))
        if _settled(fine, coarse, spec.tol):
            break
        if spec.nodes * 2 > spec.max_nodes:
            raise QuadratureError(f"kernel estimate not settled at {spec.nodes} nodes")
        spec = spec.doubled()
    return [EstimateRecord(m, float(v.real), float(abs(v.imag)), cfg.variant, spec.nodes)
            for m, v in zip(ms, fine)]


def kernel_estimate(sample: SplitSample, f: Functional, K: Kernel, m: int,
                    cfg: TruncationConfig = TruncationConfig(), q: QuadratureSpec = QuadratureSpec(),
                    ) -> EstimateRecord:
    """Re (1/2pi) int F f(-u) F K(u/m) (1/Delta) phi_hat'(u) / (i inverse(u)) du."""
    return kernel_estimates(sample, f, K, [m], cfg, q)[0]


def smoothed_targets(model: LevyModel, f: Functional, K: Kernel, ms: Sequence[int],
                     q: QuadratureSpec = QuadratureSpec()) -> list[float]:
    """theta_m = Re (1/2pi) int F f(-u) F K(u/m) F mu(u) du for every m in ``ms``."""
    ms = _check_ms(ms)
    if isinstance(model, ZeroMeasure):
        return [0.0] * len(ms)
    spec = q
    while True:
        grid = band_grid(ms, f, spec)
        p = grid.points
        f_neg, f_pos = _fourier_pair(f, p)
        vals = _fold(f_neg, f_pos, np.asarray(model.mu_fourier(p), dtype=complex))
        fine, coarse = _integrate(K, ms, _Assembled(p, grid.coarse, vals, vals))
        if _settled(fine, coarse, spec.tol):
            return [float(v.real) for v in fine]
        if spec.nodes * 2 > spec.max_nodes:
            raise QuadratureError(f"smoothed target not settled at {spec.nodes} nodes")
        spec = spec.doubled()


def smoothed_target(model: LevyModel, f: Functional, K: Kernel, m: int,
                    q: QuadratureSpec = QuadratureSpec()) -> float:
    return smoothed_targets(model, f, K, [m], q)[0]


def variance_integrals(model: LevyModel, f: Functional, K: Kernel, m: int,
                       q: QuadratureSpec = QuadratureSpec()) -> tuple[float, float]:
    """(int |F K(u/m)|^2 |F f(-u)/phi(u)|^2 du, int |F K(u/m)| |F f(-u)/phi(u)| du)."""
    grid = band_grid([m], f, q)
    p = grid.points
    f_neg, f_pos = _fourier_pair(f, p)
    aphi = np.abs(model.char_fn(p))
    # both mirror halves: |F f(-u)| at u and |F f(u)| at -u
    lin = (np.abs(f_neg) + np.abs(f_pos)) / aphi
    sq = (np.abs(f_neg) ** 2 + np.abs(f_pos) ** 2) / aphi**2
    rows_l, rows_r = kernel_limits(K, [m], p)
    rule = PiecewiseRule(p)
    l2 = rule.apply(rows_l**2, rows_r**2, sq, sq)[0]
    l1 = rule.apply(np.abs(rows_l), np.abs(rows_r), lin, lin)[0]
    return float(l2), float(l1)


def risk_bound(model: LevyModel, f: Functional, K: Kernel, h: float, n: int,
               q: QuadratureSpec = QuadratureSpec(), C: float = 1.0,
               theta: float | None = None, constants: tuple[float, float] | None = None,
               ) -> tuple[float, float]:
    """(2 |theta - theta_{1/h}|^2, variance bound) with T = Delta n.

    h must be the reciprocal of a positive integer.  ``theta`` and
    ``constants`` = (C1, C2) may be passed to skip recomputation.
    """
    m = round(1.0 / h)
    if m < 1 or abs(m * h - 1.0) > 1e-9:
        raise ValueError("h must be 1/m for a positive integer m")
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(model, ZeroMeasure):
        return 0.0, 0.0
    if theta is None:
        theta = true_theta(model, f)
    c1, c2 = constants if constants is not None else variance_constants(model, C)
    bias2 = 2.0 * (theta - smoothed_target(model, f, K, m, q)) ** 2
    l2, l1 = variance_integrals(model, f, K, m, q)
    branch2 = c2 * l1**2
    branch1 = c1 * l2 if math.isfinite(c1) else math.inf
    # ties go to the sup-norm branch
    best = branch1 if branch1 < branch2 else branch2
    return bias2, best / (2.0 * math.pi**2 * model.delta * n)


# ---------------------------------------------------------------------------
# rates and bias bounds


class Regime(str, enum.Enum):
    SOBOLEV = "sobolev"
    HOELDER = "hoelder"


@dataclass(frozen=True)
class RateSpec:
    a: float
    s: float
    beta: float
    rho: float = 0.0
    delta: float = 1.0
    c1_finite: bool = True
    regime: Regime = Regime.SOBOLEV

    def __post_init__(self):
        if not self.a > -self.s:
            raise ValueError("need a > -s")
        if self.beta < 0 or self.rho < 0 or not self.delta > 0:
            raise ValueError("need beta, rho >= 0 and delta > 0")
        object.__setattr__(self, "regime", Regime(self.regime))


@dataclass(frozen=True)
class RateForm:
    """r(T) = (log T)^log_power * T^exponent, or ((log T)/Delta)^log_ratio_power when ``logarithmic``."""

    exponent: float = 0.0
    log_power: float = 0.0
    logarithmic: bool = False
    log_ratio_power: float = 0.0

    def value(self, T: float, delta: float = 1.0) -> float:
        if self.logarithmic:
            return (math.log(T) / delta) ** self.log_ratio_power
        return math.log(T) ** self.log_power * T**self.exponent

    def describe(self) -> str:
        if self.logarithmic:
            return f"((log T)/Delta)^{self.log_ratio_power:g}"
        head = "(log T) " if self.log_power else ""
        return f"{head}T^{self.exponent:g}"


def theoretical_rate(spec: RateSpec, T: float) -> tuple[RateForm, float]:
    """Rate r(T), T = Delta n, from the Sobolev or Hoelder rate table."""
    if not T > 1:
        raise ValueError("T must exceed 1")
    a, s, db = spec.a, spec.s, spec.delta * spec.beta
    if spec.rho > 0:
        form = RateForm(logarithmic=True, log_ratio_power=-(2 * a + 2 * s) / spec.rho)
        return form, form.value(T, spec.delta)
    if spec.regime is Regime.SOBOLEV:
        if spec.c1_finite:
            form = RateForm(-1.0) if s >= db else RateForm(-(2 * a + 2 * s) / (2 * a + 2 * db))
            return form, form.value(T)
        edge, denom_extra = db + 0.5, 1.0
    else:
        edge, denom_extra = (db + 0.5, 1.0) if spec.c1_finite else (db + 1.0, 2.0)
    if s > edge:
        form = RateForm(-1.0)
    elif s == edge:
        form = RateForm(-1.0, log_power=1.0)
    else:
        form = RateForm(-(2 * a + 2 * s) / (2 * a + 2 * db + denom_extra))
    return form, form.value(T)


@dataclass(frozen=True)
class BiasConstants:
    """M_f, M_mu (Sobolev norms), L_K (Hoelder constant of F K), C_B for the local regime."""

    M_f: float = 1.0
    M_mu: float = 1.0
    L_K: float = 0.0
    sinc: bool = True
    C_B: float = 1.0


def _floor_below(x: float) -> int:
    # largest integer strictly below x
    return math.ceil(x) - 1


def bias_bound(spec: RateSpec, h: float, constants: BiasConstants = BiasConstants()) -> float:
    """Squared-bias bound C h^{2a+2s}."""
    if not h > 0:
        raise ValueError("h must be positive")
    p = 2 * spec.a + 2 * spec.s
    if spec.regime is Regime.HOELDER:
        return constants.C_B * h**p
    mm = constants.M_f * constants.M_mu / (2 * math.pi) ** 2
    if constants.sinc:
        return mm * math.pi ** (-p) * h**p
    k = _floor_below(spec.a + spec.s)
    cb = (2.0 * math.pi ** (-spec.s - spec.a) + constants.L_K / math.factorial(max(k, 0))) ** 2
    return cb * mm * h**p
