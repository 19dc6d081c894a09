"""Penalised choice of the cutoff m.

For a pair k > m (m = 0 allowed, with F K(u/0) := 0) the correction is

    H2(m, k) = n^-1 [c_pen c1 lam^2 + 16 (5 kappa / 2)^2 log n] max(sig2, x^2)

with sig2, x built from |F f(-u) / phi_check(u)| |F K(u/k) - F K(u/m)| and the
weight w.  pen(m) = H2(0, m).  The deterministic variant replaces
1/phi_check by 1/phi.  The selected cutoff minimises

    sup_{k > m} { |theta_k - theta_m|^2 - H2(m, k) } + pen(m)

over the grid; an empty sup counts as 0 and ties go to the smallest m.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from ._kernels import pair_integrals
from .ecf import Inverse, SplitSample, TruncationConfig, log_truncate, weight
from .estimator import EcfCache, EstimateRecord, QuadratureSpec, band_grid, smoothed_targets
from .functionals import Functional, Kernel
from .models import LevyModel, variance_constants
from .quadrature import PiecewiseRule, kernel_limits

__all__ = [
    "PenaltyConfig",
    "PenaltyVariant",
    "PenaltyTable",
    "SelectionResult",
    "OracleResult",
    "sigma_x_tilde",
    "lambda_tilde",
    "correction_from_factors",
    "correction",
    "pen",
    "penalty_table",
    "select_m_hat",
    "oracle_m_star",
    "oracle_selection",
]


class PenaltyVariant(str, enum.Enum):
    STOCHASTIC = "stochastic"
    DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class PenaltyConfig:
    """Constants of the penalty.

    ``c_pen`` follows from c1 and gamma, and so does ``kappa`` unless given
    explicitly (the selection guarantees need kappa >= 2 (sqrt(4 c1) + gamma)).
    ``eta``, ``cbar1`` and ``cbar2`` left as None are filled in from the model
    by :meth:`resolved`.
    ``lambda_grouping`` is ``"product"`` (default) or ``"log_of_square"``.
    """

    c1: float = 1.0
    gamma: float = 0.1
    delta: float = 0.25
    eta: float | None = None
    cbar1: float | None = None
    cbar2: float | None = None
    positive_part: bool = False
    lambda_grouping: str = "product"
    kappa: float | None = None
    c_pen: float = field(init=False)

    def __post_init__(self):
        if min(self.c1, self.gamma, self.delta) <= 0:
            raise ValueError("c1, gamma and delta must be positive")
        if self.eta is not None and not self.eta > 0:
            raise ValueError("eta must be positive")
        for name in ("cbar1", "cbar2"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.lambda_grouping not in ("product", "log_of_square"):
            raise ValueError(f"unknown lambda grouping {self.lambda_grouping!r}")
        if self.kappa is None:
            object.__setattr__(self, "kappa", 2.0 * (math.sqrt(4.0 * self.c1) + self.gamma))
        elif not self.kappa > 0:
            raise ValueError("kappa must be positive")
        object.__setattr__(self, "c_pen", max(64.0, 16.0 * (2.0 * self.c1 + self.gamma)))

    def resolved(self, model: LevyModel, C: float = 1.0) -> "PenaltyConfig":
        eta = self.eta if self.eta is not None else model.default_eta()
        cb1, cb2 = self.cbar1, self.cbar2
        if cb1 is None or cb2 is None:
            c1_model, c2_model = variance_constants(model, C)
            cb1 = c1_model if cb1 is None else cb1
            cb2 = c2_model if cb2 is None else cb2
        return replace(self, eta=eta, cbar1=cb1, cbar2=cb2)

    def truncation(self) -> TruncationConfig:
        return TruncationConfig(kappa=self.kappa, delta=self.delta, gamma=self.gamma,
                                variant=Inverse.LOG_TRUNCATED)

    def _require_resolved(self):
        if self.eta is None or self.cbar1 is None or self.cbar2 is None:
            raise ValueError("penalty config needs eta, cbar1, cbar2 (call resolved(model))")


def _clog(z: float) -> float:
    # log clamped below at 1
    return math.log(max(z, math.e))


def lambda_tilde(x: float, sigma2: float, m: int, k: int, n: int, cfg: PenaltyConfig) -> float:
    """Weight lambda_{m,k}; every log argument is clamped below at e."""
    if not k > m:
        raise ValueError("need k > m")
    if n < 2:
        raise ValueError("need n >= 2")
    if cfg.eta is None:
        raise ValueError("eta is not set")
    d = k - m
    inner = _clog(n * x * d)
    if cfg.lambda_grouping == "product":
        lead = _clog(inner) ** 2
    else:
        lead = _clog(inner**2)
    first = (8.0 / cfg.eta) * lead * inner * _clog(x * x * d * d)
    return max(first, _clog(sigma2 * d * d))


def correction_from_factors(lam: float, sigma2: float, x: float, n: int, cfg: PenaltyConfig) -> float:
    return (cfg.c_pen * cfg.c1 * lam**2 + 16.0 * (2.5 * cfg.kappa) ** 2 * math.log(n)) * max(sigma2, x * x) / n


# ---------------------------------------------------------------------------
# integrals


@dataclass(frozen=True, eq=False)
class _PairIntegrals:
    index: dict          # m -> row
    l1: np.ndarray       # int |F f/psi| |Delta FK| w^-1
    l2: np.ndarray       # int |F f/psi|^2 |Delta FK|^2 w^-2

    def get(self, m: int, k: int) -> tuple[float, float]:
        i, j = self.index[m], self.index[k]
        return float(self.l1[i, j]), float(self.l2[i, j])


def _pair_integrals(f: Functional, K: Kernel, ms: Sequence[int], abs_inverse_on,
                    cfg: PenaltyConfig, q: QuadratureSpec) -> _PairIntegrals:
    """``abs_inverse_on(grid)`` returns |1/psi| at the grid points."""
    ms = sorted(set(int(m) for m in ms))
    grid = band_grid(ms, f, q)
    p = grid.points
    inv = abs_inverse_on(grid)
    a_neg = np.abs(np.asarray(f.fourier(-p), dtype=complex))
    a_pos = np.abs(np.asarray(f.fourier(p), dtype=complex))
    wi = 1.0 / weight(p, cfg.delta)
    # both mirror halves folded onto u >= 0 (|psi|, w and Delta FK are even)
    x1 = (a_neg + a_pos) * inv * wi
    x2 = (a_neg**2 + a_pos**2) * inv**2 * wi**2
    rows = [0, *ms]
    rows_l, rows_r = kernel_limits(K, rows, p)
    rule = PiecewiseRule(p)
    l1, l2 = pair_integrals(rows_l, rows_r, rule.left, rule.right, x1, x2)
    return _PairIntegrals({m: i for i, m in enumerate(rows)}, l1, l2)


def _stochastic_inverse(sample: SplitSample, cfg: PenaltyConfig, cache: EcfCache | None):
    trunc = cfg.truncation()
    cache = cache or EcfCache(sample)

    def on(grid):
        phi, _ = cache.values(grid)
        return 1.0 / np.abs(log_truncate(phi, grid.points, sample.n, trunc))

    return on


def _deterministic_inverse(model: LevyModel):
    def on(grid):
        return 1.0 / np.abs(model.char_fn(grid.points))

    return on


def _sigma_x(l1: float, l2: float, n: int, cfg: PenaltyConfig) -> tuple[float, float]:
    branch2 = cfg.cbar2 * l1 * l1
    branch1 = cfg.cbar1 * l2 if math.isfinite(cfg.cbar1) else math.inf
    sigma2 = min(branch1, branch2) / (2.0 * math.pi**2)
    return sigma2, l1 / (2.0 * math.pi * math.sqrt(n))


def sigma_x_tilde(sample: SplitSample, f: Functional, K: Kernel, m: int, k: int, cfg: PenaltyConfig,
                  q: QuadratureSpec = QuadratureSpec()) -> tuple[float, float]:
    """(sigma_tilde^2, x_tilde) for the pair (m, k), k > m >= 0."""
    if not k > m >= 0:
        raise ValueError("need k > m >= 0")
    cfg._require_resolved()
    ints = _pair_integrals(f, K, [x for x in (m, k) if x > 0], _stochastic_inverse(sample, cfg, None), cfg, q)
    l1, l2 = ints.get(m, k)
    return _sigma_x(l1, l2, sample.n, cfg)


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True, eq=False)
class PenaltyTable:
    m_grid: tuple[int, ...]
    n: int
    variant: PenaltyVariant
    config: PenaltyConfig
    sigma2: Mapping[tuple[int, int], float]
    x: Mapping[tuple[int, int], float]
    lam: Mapping[tuple[int, int], float]
    corr: Mapping[tuple[int, int], float]
    pen: Mapping[int, float]

    def recompute(self, m: int, k: int) -> float:
        """H2(m, k) from the stored factors."""
        return correction_from_factors(self.lam[m, k], self.sigma2[m, k], self.x[m, k], self.n, self.config)


def _table(ints: _PairIntegrals, ms: Sequence[int], n: int, cfg: PenaltyConfig,
           variant: PenaltyVariant) -> PenaltyTable:
    if n < 2:
        raise ValueError("penalties need n >= 2")
    grid = tuple(sorted(set(int(m) for m in ms)))
    sig, xs, lams, corr = {}, {}, {}, {}
    pairs = [(0, m) for m in grid] + [(m, k) for i, m in enumerate(grid) for k in grid[i + 1:]]
    for m, k in pairs:
        s2, xv = _sigma_x(*ints.get(m, k), n, cfg)
        lam = lambda_tilde(xv, s2, m, k, n, cfg)
        sig[m, k], xs[m, k], lams[m, k] = s2, xv, lam
        corr[m, k] = correction_from_factors(lam, s2, xv, n, cfg)
    pens = {m: corr[0, m] for m in grid}
    return PenaltyTable(grid, n, variant, cfg, sig, xs, lams, corr, pens)


def penalty_table(source: SplitSample | LevyModel, f: Functional, K: Kernel, ms: Sequence[int],
                  cfg: PenaltyConfig, q: QuadratureSpec = QuadratureSpec(), n: int | None = None,
                  cache: EcfCache | None = None) -> PenaltyTable:
    """All corrections over ``ms``: stochastic for a sample, deterministic for a model (needs n)."""
    if not ms:
        raise ValueError("empty bandwidth grid")
    if min(ms) < 1:
        raise ValueError("m must be >= 1")
    cfg._require_resolved()
    if isinstance(source, SplitSample):
        ints = _pair_integrals(f, K, ms, _stochastic_inverse(source, cfg, cache), cfg, q)
        return _table(ints, ms, source.n, cfg, PenaltyVariant.STOCHASTIC)
    if n is None:
        raise ValueError("the deterministic table needs n")
    ints = _pair_integrals(f, K, ms, _deterministic_inverse(source), cfg, q)
    return _table(ints, ms, n, cfg, PenaltyVariant.DETERMINISTIC)


def correction(m: int, k: int, sample: SplitSample, f: Functional, K: Kernel, cfg: PenaltyConfig,
               q: QuadratureSpec = QuadratureSpec()) -> float:
    """Stochastic H2(m, k)."""
    sigma2, x = sigma_x_tilde(sample, f, K, m, k, cfg, q)
    return correction_from_factors(lambda_tilde(x, sigma2, m, k, sample.n, cfg), sigma2, x, sample.n, cfg)


def pen(m: int, source: SplitSample | LevyModel, f: Functional, K: Kernel, cfg: PenaltyConfig,
        q: QuadratureSpec = QuadratureSpec(), n: int | None = None) -> float:
    """pen(m) = H2(0, m), stochastic for a sample, deterministic for a model."""
    return penalty_table(source, f, K, [m], cfg, q, n).pen[m]


# ---------------------------------------------------------------------------
# selection


@dataclass(frozen=True)
class SelectionResult:
    m_hat: int
    criterion: dict
    theta_hat: float


def _argmin_smallest(ms, crit) -> int:
    best = ms[0]
    for m in ms[1:]:
        if crit[m] < crit[best]:
            best = m
    return best


def select_m_hat(estimates: Mapping[int, EstimateRecord | float] | Sequence[EstimateRecord],
                 table: PenaltyTable) -> SelectionResult:
    """Minimise sup_{k>m} {|theta_k - theta_m|^2 - H2(m,k)} + pen(m) over the grid."""
    if not isinstance(estimates, Mapping):
        estimates = {r.m: r for r in estimates}
    theta = {m: (v.theta_hat if isinstance(v, EstimateRecord) else float(v)) for m, v in estimates.items()}
    ms = sorted(theta)
    if not ms:
        raise ValueError("empty bandwidth grid")
    if tuple(ms) != tuple(table.m_grid):
        raise ValueError("estimates and penalty table cover different grids")
    crit = {}
    for i, m in enumerate(ms):
        terms = [(theta[k] - theta[m]) ** 2 - table.corr[m, k] for k in ms[i + 1:]]
        sup = max(terms) if terms else 0.0
        if table.config.positive_part:
            sup = max(sup, 0.0)
        crit[m] = sup + table.pen[m]
    m_hat = _argmin_smallest(ms, crit)
    return SelectionResult(m_hat, crit, theta[m_hat])


@dataclass(frozen=True)
class OracleResult:
    m_star: int
    criterion: dict          # m -> sup_{k>=m} |theta_k - theta_m|^2 + pen(m)
    theta_m: dict            # m -> smoothed target
    pen: dict                # m -> deterministic penalty


def oracle_from_values(theta_m: Mapping[int, float], pens: Mapping[int, float]) -> OracleResult:
    ms = sorted(theta_m)
    if not ms:
        raise ValueError("empty bandwidth grid")
    crit = {}
    for i, m in enumerate(ms):
        crit[m] = max((theta_m[k] - theta_m[m]) ** 2 for k in ms[i:]) + pens[m]
    return OracleResult(_argmin_smallest(ms, crit), crit, dict(theta_m), dict(pens))


def oracle_selection(model: LevyModel, f: Functional, K: Kernel, ms: Sequence[int], cfg: PenaltyConfig,
                     n: int, q: QuadratureSpec = QuadratureSpec()) -> OracleResult:
    if not ms:
        raise ValueError("empty bandwidth grid")
    ms = sorted(set(int(m) for m in ms))
    cfg = cfg if cfg.eta is not None and cfg.cbar1 is not None and cfg.cbar2 is not None else cfg.resolved(model)
    table = penalty_table(model, f, K, ms, cfg, q, n=n)
    return oracle_from_values(dict(zip(ms, smoothed_targets(model, f, K, ms, q))), table.pen)


def oracle_m_star(model: LevyModel, f: Functional, K: Kernel, ms: Sequence[int], cfg: PenaltyConfig,
                  n: int, q: QuadratureSpec = QuadratureSpec()) -> int:
    """argmin over the grid of sup_{k>=m} |theta_k - theta_m|^2 + pen(m), deterministic quantities."""
    return oracle_selection(model, f, K, ms, cfg, n, q).m_star
