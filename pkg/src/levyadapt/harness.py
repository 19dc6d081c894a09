"""Seeded Monte Carlo experiments: risk surfaces, adaptive vs oracle risk, rate slopes.

Replication r at sample size n draws its increments from the Philox stream
keyed by (seed, n, r).  Replications run on a thread pool and are merged in
index order, so every aggregate is independent of the thread count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .adaptive import OracleResult, PenaltyConfig, oracle_from_values, penalty_table, select_m_hat
from .config import ExperimentConfig
from .ecf import Inverse, TruncationConfig
from .estimator import EcfCache, QuadratureError, kernel_estimates, smoothed_targets, theoretical_rate
from .models import sample_increments, true_theta

__all__ = [
    "SCHEMA_VERSION",
    "SELECTION_VARIANT",
    "ExperimentAborted",
    "ReplicationOutcome",
    "RiskReport",
    "fit_rate_slope",
    "run_replication",
    "run_experiment",
    "aggregate",
    "mse_standard_error",
]

SCHEMA_VERSION = 1
MAX_FAILURE_FRACTION = 0.01
# m_hat is always chosen among the log-truncated estimates
SELECTION_VARIANT = Inverse.LOG_TRUNCATED.value
SURFACE_COLUMNS = ("variant", "n", "m", "mse", "mse_se", "bias2", "variance", "theta_m")


class ExperimentAborted(RuntimeError):
    """More than 1% of the replications at some n failed."""


def fit_rate_slope(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of log(mse) against log(n), with its standard error."""
    if len(points) < 4:
        raise ValueError("slope fit needs at least 4 points")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("slope fit needs positive n and positive finite mse")
    fit = stats.linregress(np.log(x), np.log(y))
    return float(fit.slope), float(fit.stderr)


@dataclass(frozen=True)
class ReplicationOutcome:
    index: int
    estimates: dict          # variant value -> tuple of theta_hat over m_grid
    m_hat: int | None
    theta_adaptive: float | None
    failed: bool = False
    error: str = ""


def _truncations(pcfg: PenaltyConfig) -> dict[Inverse, TruncationConfig]:
    log = pcfg.truncation()
    return {
        Inverse.LOG_TRUNCATED: log,
        Inverse.NEUMANN: TruncationConfig(log.kappa, log.delta, log.gamma, Inverse.NEUMANN),
    }


def run_replication(cfg: ExperimentConfig, pcfg: PenaltyConfig, n: int, index: int) -> ReplicationOutcome:
    """One replication: sample, both inverse variants over the grid, penalised selection."""
    sample = sample_increments(cfg.model, n, (cfg.seed, n, index))
    cache = EcfCache(sample)
    ms = list(cfg.m_grid)
    try:
        estimates = {}
        for variant, trunc in _truncations(pcfg).items():
            recs = kernel_estimates(sample, cfg.functional, cfg.kernel, ms, trunc, cfg.quadrature, cache)
            estimates[variant.value] = tuple(r.theta_hat for r in recs)
        table = penalty_table(sample, cfg.functional, cfg.kernel, ms, pcfg, cfg.quadrature, cache=cache)
        sel = select_m_hat(dict(zip(ms, estimates[SELECTION_VARIANT])), table)
    except QuadratureError as exc:
        return ReplicationOutcome(index, {}, None, None, True, str(exc))
    return ReplicationOutcome(index, estimates, sel.m_hat, sel.theta_hat)


def _run_reps(cfg: ExperimentConfig, pcfg: PenaltyConfig, n: int, threads: int) -> list[ReplicationOutcome]:
    idx = range(cfg.replications)
    if threads <= 1:
        return [run_replication(cfg, pcfg, n, i) for i in idx]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map preserves index order
        return list(pool.map(lambda i: run_replication(cfg, pcfg, n, i), idx))


@dataclass
class RiskReport:
    name: str
    theta: float
    m_grid: tuple[int, ...]
    n_list: tuple[int, ...]
    delta: float
    primary_variant: str
    surface: list = field(default_factory=list)        # dicts: variant, n, m, mse, bias2, variance, theta_m
    per_n: list = field(default_factory=list)          # dicts per n
    histogram: list = field(default_factory=list)      # dicts: n, m, count
    slopes: list = field(default_factory=list)         # dicts: quantity, slope, stderr, theory_slope, theory_form
    config: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "theta": self.theta,
            "delta": self.delta,
            "m_grid": list(self.m_grid),
            "n_list": list(self.n_list),
            "primary_variant": self.primary_variant,
            "selection_variant": SELECTION_VARIANT,
            "per_n": self.per_n,
            "slopes": self.slopes,
            "config": self.config,
        }

    def files(self) -> dict[str, str]:
        """File name -> exact text content."""
        out = {
            "risk_surface.csv": _csv(SURFACE_COLUMNS, [[r[k] for k in SURFACE_COLUMNS] for r in self.surface]),
            "mhat_histogram.csv": _csv(["n", "m", "count"], [[r["n"], r["m"], r["count"]] for r in self.histogram]),
            "slopes.csv": _csv(["quantity", "slope", "stderr", "theory_slope", "theory_form"],
                               [[r[k] for k in ("quantity", "slope", "stderr", "theory_slope", "theory_form")]
                                for r in self.slopes]),
            "summary.json": json.dumps(_jsonable(self.summary()), indent=2, sort_keys=True) + "\n",
            "plot_oracle_mse.csv": _csv(["T", "oracle_mse"], [[r["T"], r["oracle_mse"]] for r in self.per_n]),
            "plot_adaptive_mse.csv": _csv(["T", "adaptive_mse"], [[r["T"], r["adaptive_mse"]] for r in self.per_n]),
        }
        for n in self.n_list:
            rows = [[r["m"], r["mse"]] for r in self.surface if r["n"] == n and r["variant"] == self.primary_variant]
            out[f"plot_mse_vs_m_n{n}.csv"] = _csv(["m", "mse"], rows)
        return out

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, text in self.files().items():
            path = out / name
            with open(path, "w", newline="") as fh:
                fh.write(text)
            paths.append(path)
        return paths


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def aggregate(values: np.ndarray, theta: float) -> tuple[float, float, float]:
    """(mse, bias^2, variance) of replicated estimates; variance with ddof = 0."""
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    mse = float(np.mean((values - theta) ** 2))
    return mse, (mean - theta) ** 2, float(np.var(values))


def mse_standard_error(values: np.ndarray, theta: float) -> float:
    """Standard error of the empirical MSE (sample std of squared errors over sqrt(R))."""
    sq = (np.asarray(values, dtype=float) - theta) ** 2
    if sq.size < 2:
        return 0.0
    return float(np.std(sq, ddof=1) / math.sqrt(sq.size))


def _slope_row(quantity, points, theory):
    try:
        slope, se = fit_rate_slope(points)
    except ValueError:
        slope, se = None, None
    t_slope, t_form = theory if theory is not None else (None, "")
    return {"quantity": quantity, "slope": slope, "stderr": se, "theory_slope": t_slope, "theory_form": t_form}


def _theory(cfg: ExperimentConfig, Ts: list[float]):
    if cfg.rate_a is None or len(Ts) < 2:
        return None
    spec = cfg.rate_spec()
    form, _ = theoretical_rate(spec, Ts[0])
    vals = [theoretical_rate(spec, T)[1] for T in Ts]
    # local slope of log r(T) over the experiment's T range
    fit = stats.linregress(np.log(Ts), np.log(vals))
    return float(fit.slope), form.describe()


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> RiskReport:
    threads = cfg.threads if threads is None else threads
    model, f, K = cfg.model, cfg.functional, cfg.kernel
    ms = list(cfg.m_grid)
    theta = true_theta(model, f)
    pcfg = cfg.penalty.resolved(model)
    theta_m = dict(zip(ms, smoothed_targets(model, f, K, ms, cfg.quadrature)))
    primary = cfg.inverse.value
    report = RiskReport(cfg.name, theta, tuple(ms), tuple(cfg.n_list), model.delta, primary,
                        config=dict(sorted(cfg.source.items())))
    for n in cfg.n_list:
        outcomes = _run_reps(cfg, pcfg, n, threads)
        ok = [o for o in outcomes if not o.failed]
        failures = len(outcomes) - len(ok)
        if failures > MAX_FAILURE_FRACTION * len(outcomes):
            raise ExperimentAborted(f"n={n}: {failures} of {len(outcomes)} replications failed "
                                    f"({outcomes[[o.failed for o in outcomes].index(True)].error})")
        oracle: OracleResult = oracle_from_values(
            theta_m, penalty_table(model, f, K, ms, pcfg, cfg.quadrature, n=n).pen)
        mse_by_variant = {v.value: {} for v in Inverse}
        for variant in (Inverse.LOG_TRUNCATED.value, Inverse.NEUMANN.value):
            block = np.array([o.estimates[variant] for o in ok], dtype=float)
            for j, m in enumerate(ms):
                mse, b2, var = aggregate(block[:, j], theta)
                report.surface.append({"variant": variant, "n": n, "m": m, "mse": mse,
                                       "mse_se": mse_standard_error(block[:, j], theta), "bias2": b2,
                                       "variance": var, "theta_m": theta_m[m]})
                mse_by_variant[variant][m] = mse
        adaptive = np.array([o.theta_adaptive for o in ok], dtype=float)
        ad_mse, ad_b2, ad_var = aggregate(adaptive, theta)
        mse_primary = mse_by_variant[primary]
        mse_selection = mse_by_variant[SELECTION_VARIANT]
        oracle_m = min(ms, key=lambda m: (mse_primary[m], m))
        # best fixed m within the family the selection rule chooses from
        oracle_m_sel = min(ms, key=lambda m: (mse_selection[m], m))
        crit_star = oracle.criterion[oracle.m_star]
        counts = {m: 0 for m in ms}
        for o in ok:
            counts[o.m_hat] += 1
        report.histogram.extend({"n": n, "m": m, "count": counts[m]} for m in ms)
        report.per_n.append({
            "n": n,
            "T": model.delta * n,
            "replications": len(outcomes),
            "failures": failures,
            "adaptive_mse": ad_mse,
            "adaptive_bias2": ad_b2,
            "adaptive_variance": ad_var,
            "oracle_mse": mse_primary[oracle_m],
            "oracle_m": oracle_m,
            "oracle_mse_selection": mse_selection[oracle_m_sel],
            "oracle_m_selection": oracle_m_sel,
            "m_star": oracle.m_star,
            "mse_at_m_star": mse_primary[oracle.m_star],
            "oracle_criterion": crit_star,
            "ratio": ad_mse / crit_star if crit_star > 0 else (0.0 if ad_mse == 0 else math.inf),
            "mhat_mode": max(ms, key=lambda m: (counts[m], -m)),
            "mhat_mode_fraction": max(counts.values()) / max(len(ok), 1),
        })
    Ts = [r["T"] for r in report.per_n]
    theory = _theory(cfg, Ts)
    report.slopes.append(_slope_row("oracle_mse", [(r["T"], r["oracle_mse"]) for r in report.per_n], theory))
    report.slopes.append(_slope_row("oracle_mse_selection",
                                    [(r["T"], r["oracle_mse_selection"]) for r in report.per_n], theory))
    report.slopes.append(_slope_row("adaptive_mse", [(r["T"], r["adaptive_mse"]) for r in report.per_n], theory))
    return report
