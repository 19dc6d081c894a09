"""Empirical characteristic functions from a split sample and their inverses.

The ECF phi_hat is built from the first half of the increments, the ECF
derivative phi_hat' from the second half, so the two are independent.
Two regularised inverses of phi_hat are provided:

* the Neumann inverse 1(|phi_hat| >= (Delta n)^{-1/2}) / phi_hat, and
* the log-truncated phi_check, which replaces phi_hat by the real floor
  kappa (log n)^{1/2} w(u)^{-1} n^{-1/2} wherever |phi_hat| drops below it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import exp_sum_uniform

__all__ = [
    "SplitSample",
    "Inverse",
    "TruncationConfig",
    "FrequencyGrid",
    "ecf",
    "ecf_deriv",
    "ecf_on_grid",
    "weight",
    "neumann_inverse",
    "log_truncated_cf",
    "log_truncate",
    "uniform_deviation_stat",
    "inverse_deviation_stat",
]

_CHUNK = 1 << 22


@dataclass(frozen=True, eq=False)
class SplitSample:
    """2n increments: ``ecf_half`` feeds phi_hat, ``deriv_half`` feeds phi_hat'."""

    ecf_half: np.ndarray
    deriv_half: np.ndarray
    delta: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.ecf_half, dtype=float)
        b = np.asarray(self.deriv_half, dtype=float)
        if a.ndim != 1 or b.ndim != 1 or a.size != b.size or a.size < 1:
            raise ValueError("both halves must be 1-d with equal length n >= 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        object.__setattr__(self, "ecf_half", a)
        object.__setattr__(self, "deriv_half", b)

    @property
    def n(self) -> int:
        return self.ecf_half.size

    @classmethod
    def from_increments(cls, increments, delta: float = 1.0) -> "SplitSample":
        x = np.asarray(increments, dtype=float)
        if x.size % 2:
            raise ValueError("need an even number of increments")
        half = x.size // 2
        return cls(x[:half], x[half:], delta)


class Inverse(str, enum.Enum):
    NEUMANN = "neumann"
    LOG_TRUNCATED = "log_truncated"


@dataclass(frozen=True)
class TruncationConfig:
    """Constants of the log-truncated inverse.

    The default kappa = 2 (sqrt(4 c1) + gamma) with c1 = 1, gamma = 0.1.
    """

    kappa: float = 4.2
    delta: float = 0.25
    gamma: float = 0.1
    variant: Inverse = Inverse.LOG_TRUNCATED

    def __post_init__(self):
        if min(self.kappa, self.delta, self.gamma) <= 0:
            raise ValueError("kappa, delta and gamma must be positive")
        object.__setattr__(self, "variant", Inverse(self.variant))

    def admissible_for_selection(self, c1: float) -> bool:
        return self.kappa >= 2.0 * (math.sqrt(4.0 * c1) + self.gamma) - 1e-12


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of ``count`` nodes from ``lo`` to ``hi``."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2 or not self.hi > self.lo:
            raise ValueError("grid needs count >= 2 and hi > lo")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.lo + self.step * np.arange(self.count)

    @property
    def symmetric(self) -> bool:
        return abs(self.lo + self.hi) <= 1e-12 * max(1.0, self.hi)

    @classmethod
    def symmetric_with_spacing(cls, half_width: float, spacing: float) -> "FrequencyGrid":
        half = int(math.ceil(half_width / spacing))
        return cls(-half * spacing, half * spacing, 2 * half + 1)


def _direct_sum(z, wts, u):
    u = np.asarray(u, dtype=float)
    flat = u.ravel()
    out = np.empty(flat.size, dtype=complex)
    rows = max(1, _CHUNK // max(z.size, 1))
    for start in range(0, flat.size, rows):
        block = flat[start:start + rows]
        out[start:start + rows] = np.sum(np.exp(1j * np.multiply.outer(block, z)) * wts, axis=1)
    return out.reshape(u.shape)


# sums are formed first and divided by n afterwards, so phi_hat(0) = 1 exactly


def ecf(sample: SplitSample, u):
    """phi_hat(u) = (1/n) sum_{k<=n} exp(i u Z_k) over the ECF half."""
    z = sample.ecf_half
    return _direct_sum(z, np.ones(z.size), u) / z.size


def ecf_deriv(sample: SplitSample, u):
    """phi_hat'(u) = (1/n) sum_{k>n} i Z_k exp(i u Z_k) over the derivative half."""
    z = sample.deriv_half
    return 1j * _direct_sum(z, z, u) / z.size


def ecf_on_grid(sample: SplitSample, u0: float, du: float, count: int, which: str = "ecf") -> np.ndarray:
    """phi_hat or phi_hat' at u0 + j du, j < count, via the compiled kernel."""
    if which == "ecf":
        z = sample.ecf_half
        return exp_sum_uniform(z, np.ones(z.size), u0, du, count) / z.size
    if which == "deriv":
        z = sample.deriv_half
        return 1j * exp_sum_uniform(z, z, u0, du, count) / z.size
    raise ValueError(f"unknown ECF kind {which!r}")


def weight(u, delta: float = 0.25):
    """w(u) = log(e + |u|)^{-1/2 - delta}."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    return np.log(math.e + np.abs(np.asarray(u, dtype=float))) ** (-0.5 - delta)


def neumann_threshold(n: int, delta: float) -> float:
    return (delta * n) ** -0.5


def neumann_invert(phi_hat, n: int, delta: float):
    """1(|phi_hat| >= (Delta n)^{-1/2}) / phi_hat for precomputed values."""
    phi_hat = np.asarray(phi_hat, dtype=complex)
    keep = np.abs(phi_hat) >= neumann_threshold(n, delta)
    safe = np.where(keep, phi_hat, 1.0)
    return np.where(keep, 1.0 / safe, 0.0)


def neumann_inverse(sample: SplitSample, u):
    return neumann_invert(ecf(sample, u), sample.n, sample.delta)


def log_floor(u, n: int, cfg: TruncationConfig):
    """kappa (log n)^{1/2} w(u)^{-1} n^{-1/2}."""
    if n < 2:
        raise ValueError("log truncation needs n >= 2")
    return cfg.kappa * math.sqrt(math.log(n)) / (weight(u, cfg.delta) * math.sqrt(n))


def log_truncate(phi_hat, u, n: int, cfg: TruncationConfig):
    """phi_check from precomputed phi_hat values on nodes u."""
    floor = log_floor(u, n, cfg)
    phi_hat = np.asarray(phi_hat, dtype=complex)
    return np.where(np.abs(phi_hat) >= floor, phi_hat, floor + 0j)


def log_truncated_cf(sample: SplitSample, u, cfg: TruncationConfig = TruncationConfig()):
    """phi_check_n(u); the floor branch returns the real floor itself."""
    if sample.n < 2:
        raise ValueError("log truncation needs n >= 2")
    return log_truncate(ecf(sample, u), u, sample.n, cfg)


def _grid_values(sample, grid):
    # phi_hat on a symmetric uniform grid: evaluate u >= 0, mirror by conjugation
    if isinstance(grid, FrequencyGrid):
        if not grid.symmetric:
            raise ValueError("grid must be symmetric about 0")
        half = (grid.count - 1) // 2
        pos = ecf_on_grid(sample, 0.0 if grid.count % 2 else grid.step / 2, grid.step,
                          half + 1 if grid.count % 2 else grid.count // 2)
        if grid.count % 2:
            vals = np.concatenate([np.conj(pos[:0:-1]), pos])
        else:
            vals = np.concatenate([np.conj(pos[::-1]), pos])
        return grid.nodes, vals
    u = np.asarray(grid, dtype=float)
    if not np.allclose(np.sort(u), np.sort(-u)):
        raise ValueError("grid must be symmetric about 0")
    return u, ecf(sample, u)


def uniform_deviation_stat(sample: SplitSample, model, grid, delta: float = 0.25) -> float:
    """max_u w(u) |phi_hat(u) - phi_Delta(u)| over a symmetric grid."""
    u, phi_hat = _grid_values(sample, grid)
    return float(np.max(weight(u, delta) * np.abs(phi_hat - model.char_fn(u))))


def inverse_deviation_stat(sample: SplitSample, model, grid, cfg: TruncationConfig = TruncationConfig()) -> float:
    """sup_u |1/phi_check - 1/phi|^2 / min((log n) w^-2 n^-1 |phi|^-4, |phi|^-2) on the grid."""
    u, phi_hat = _grid_values(sample, grid)
    n = sample.n
    phi = model.char_fn(u)
    check = log_truncate(phi_hat, u, n, cfg)
    num = np.abs(1.0 / check - 1.0 / phi) ** 2
    aphi = np.abs(phi)
    scale = np.minimum(math.log(n) * weight(u, cfg.delta) ** -2 / (n * aphi**4), aphi**-2)
    return float(np.max(num / scale))
