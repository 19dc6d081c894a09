"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment.  Unknown keys are an
error.  Lists are comma separated; ``a..b`` is an integer range and
``2^a..2^b`` a range of powers of two.

``delta`` is the observation step.  The exponent in the weight function w
is ``weight_delta``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .adaptive import PenaltyConfig
from .ecf import Inverse
from .estimator import QuadratureSpec, RateSpec, Regime
from .functionals import CompactBump, DiracDerivative, DiracPoint, Functional, Gaussian, Kernel, PolynomialTaper, Sinc
from .models import (
    BilateralGamma,
    CompoundPoisson,
    ExponentialJump,
    GammaJump,
    GammaSubordinator,
    LevyModel,
    UniformJump,
    ZeroMeasure,
)

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config", "parse_int_list"]


class ConfigError(ValueError):
    pass


KNOWN_KEYS = {
    "name",
    # model
    "model", "intensity", "jump", "jump_scale", "jump_shape", "jump_lo", "jump_hi",
    "shape", "scale", "shape_pos", "scale_pos", "shape_neg", "scale_neg", "delta",
    # functional and kernel
    "functional", "center", "width", "amplitude", "supp_lo", "supp_hi", "x0", "order", "decay_index",
    "kernel", "taper_power",
    # quadrature and estimator
    "quad_nodes", "quad_rule", "quad_tol", "support_scale", "m_grid", "inverse",
    # penalty
    "kappa", "gamma", "weight_delta", "eta", "c1", "cbar1", "cbar2", "positive_part", "lambda_grouping",
    # experiment
    "n_list", "replications", "seed", "threads", "out_dir",
    # theoretical rate
    "rate_a", "rate_regime",
}


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    model: LevyModel
    functional: Functional
    kernel: Kernel
    n_list: tuple[int, ...]
    m_grid: tuple[int, ...]
    replications: int = 200
    seed: int = 0
    penalty: PenaltyConfig = field(default_factory=PenaltyConfig)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    inverse: Inverse = Inverse.LOG_TRUNCATED
    threads: int = 1
    out_dir: str | None = None
    name: str = "experiment"
    rate_a: float | None = None
    rate_regime: Regime | None = None
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.n_list:
            raise ConfigError("n_list must be nonempty")
        if list(self.n_list) != sorted(set(self.n_list)):
            raise ConfigError("n_list must be strictly ascending")
        if min(self.n_list) < 2:
            raise ConfigError("every n must be >= 2")
        if not self.m_grid or min(self.m_grid) < 1:
            raise ConfigError("m_grid must be nonempty positive integers")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def rate_spec(self) -> RateSpec:
        """Theoretical-rate inputs; needs ``rate_a``."""
        if self.rate_a is None:
            raise ConfigError("rate_a is required for theoretical rates")
        prof = self.model.decay_profile()
        regime = self.rate_regime
        if regime is None:
            regime = Regime.SOBOLEV if isinstance(self.functional, Gaussian) else Regime.HOELDER
        return RateSpec(self.rate_a, float(self.functional.s), prof.beta, prof.rho, self.model.delta,
                        self.model.c1_finite, regime)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        vals = {k: getattr(self, k) for k in self.__dataclass_fields__}
        vals.update(kw)
        return ExperimentConfig(**vals)


def parse_int_list(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        pw = re.fullmatch(r"2\^(\d+)\s*\.\.\s*2\^(\d+)", part)
        rg = re.fullmatch(r"(\d+)\s*\.\.\s*(\d+)", part)
        if pw:
            out.extend(2**e for e in range(int(pw.group(1)), int(pw.group(2)) + 1))
        elif rg:
            out.extend(range(int(rg.group(1)), int(rg.group(2)) + 1))
        elif re.fullmatch(r"2\^\d+", part):
            out.append(2 ** int(part[2:]))
        else:
            try:
                out.append(int(part))
            except ValueError:
                raise ConfigError(f"bad integer list entry {part!r}") from None
    if not out:
        raise ConfigError("empty integer list")
    return tuple(out)


def _pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


class _Reader:
    def __init__(self, pairs):
        self.pairs = pairs

    def num(self, key, default=None):
        if key not in self.pairs:
            if default is None:
                raise ConfigError(f"missing key {key!r}")
            return default
        try:
            v = float(self.pairs[key])
        except ValueError:
            raise ConfigError(f"{key}: not a number") from None
        if not math.isfinite(v) and self.pairs[key].lower() not in ("inf", "+inf"):
            raise ConfigError(f"{key}: not finite")
        return v

    def opt(self, key):
        return self.num(key) if key in self.pairs else None

    def int(self, key, default=None):
        v = self.num(key, default)
        if v != int(v):
            raise ConfigError(f"{key}: not an integer")
        return int(v)

    def word(self, key, default=None):
        if key not in self.pairs:
            if default is None:
                raise ConfigError(f"missing key {key!r}")
            return default
        return self.pairs[key].lower()

    def flag(self, key, default=False):
        if key not in self.pairs:
            return default
        v = self.pairs[key].lower()
        if v in ("true", "yes", "1"):
            return True
        if v in ("false", "no", "0"):
            return False
        raise ConfigError(f"{key}: expected true or false")


def _model(r: _Reader) -> LevyModel:
    kind = r.word("model")
    delta = r.num("delta", 1.0)
    if kind == "zero":
        return ZeroMeasure(delta=delta)
    if kind == "compound_poisson":
        jump = r.word("jump", "exponential")
        if jump == "exponential":
            law = ExponentialJump(r.num("jump_scale", 1.0))
        elif jump == "gamma":
            law = GammaJump(r.num("jump_shape", 1.0), r.num("jump_scale", 1.0))
        elif jump == "uniform":
            law = UniformJump(r.num("jump_lo"), r.num("jump_hi"))
        else:
            raise ConfigError(f"unknown jump law {jump!r}")
        return CompoundPoisson(r.num("intensity", 1.0), law, delta=delta)
    if kind == "gamma_subordinator":
        return GammaSubordinator(r.num("shape", 1.0), r.num("scale", 1.0), delta=delta)
    if kind == "bilateral_gamma":
        return BilateralGamma(r.num("shape_pos", 1.0), r.num("scale_pos", 1.0),
                              r.num("shape_neg", 1.0), r.num("scale_neg", 1.0), delta=delta)
    raise ConfigError(f"unknown model {kind!r}")


def _functional(r: _Reader) -> Functional:
    kind = r.word("functional", "gaussian")
    if kind == "gaussian":
        return Gaussian(r.num("center", 0.0), r.num("width", 1.0), r.num("amplitude", 1.0), r.num("decay_index", 4.0))
    if kind == "bump":
        return CompactBump(r.num("supp_lo", 0.5), r.num("supp_hi", 1.5))
    if kind == "dirac":
        return DiracPoint(r.num("x0", 1.0))
    if kind == "dirac_deriv":
        return DiracDerivative(r.num("x0", 1.0), r.int("order", 1))
    raise ConfigError(f"unknown functional {kind!r}")


def _kernel(r: _Reader) -> Kernel:
    kind = r.word("kernel", "sinc")
    if kind == "sinc":
        return Sinc()
    if kind == "taper":
        return PolynomialTaper(r.num("taper_power", 2.0))
    raise ConfigError(f"unknown kernel {kind!r}")


def parse_config(text: str) -> ExperimentConfig:
    pairs = _pairs(text)
    r = _Reader(pairs)
    try:
        penalty = PenaltyConfig(
            c1=r.num("c1", 1.0),
            gamma=r.num("gamma", 0.1),
            delta=r.num("weight_delta", 0.25),
            eta=r.opt("eta"),
            cbar1=r.opt("cbar1"),
            cbar2=r.opt("cbar2"),
            positive_part=r.flag("positive_part"),
            lambda_grouping=r.word("lambda_grouping", "product"),
            kappa=r.opt("kappa"),
        )
        quad = QuadratureSpec(r.int("quad_nodes", 8192), r.word("quad_rule", "trapezoid"),
                              r.num("support_scale", 1.0), r.num("quad_tol", 1e-6))
        regime = Regime(r.word("rate_regime")) if "rate_regime" in pairs else None
        return ExperimentConfig(
            model=_model(r),
            functional=_functional(r),
            kernel=_kernel(r),
            n_list=parse_int_list(pairs.get("n_list", "2^9..2^14")),
            m_grid=tuple(sorted(set(parse_int_list(pairs.get("m_grid", "1..64"))))),
            replications=r.int("replications", 200),
            seed=r.int("seed", 0),
            penalty=penalty,
            quadrature=quad,
            inverse=Inverse(r.word("inverse", "log_truncated")),
            threads=r.int("threads", 1),
            out_dir=pairs.get("out_dir"),
            name=pairs.get("name", "experiment"),
            rate_a=r.opt("rate_a"),
            rate_regime=regime,
            source=dict(pairs),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    cfg = parse_config(Path(path).read_text())
    if "name" not in cfg.source:
        cfg = cfg.with_overrides(name=Path(path).stem)
    return cfg
