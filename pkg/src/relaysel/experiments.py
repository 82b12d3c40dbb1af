"""Experiment presets, parameter sweeps, CSV output and the distribution check."""

from __future__ import annotations

import csv
import enum
import io
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import analytic
from .analytic import DistParams, PathLossParams
from .geometry import ALL_POLICIES, NetworkLayout, PolicyKind
from .metrics import (ChannelSpec, Fading, OutageQuery, average_rate_analytic,
                      db_to_linear, outage_analytic)
from .montecarlo import (estimate_average_rate, estimate_outage, ks_distance,
                         run_trials)
from .spatialprocess import PppSpec, SeedSpec, sample_uniform_halfdisc_distance_to_source
from .specialmath import integrate

CSV_HEADER = ("experiment", "snr_db", "lambda", "d", "alpha", "rho", "policy",
              "fading", "analytic", "mc_mean", "mc_stderr", "n_trials")


class ConfigError(ValueError):
    pass


class Experiment(str, enum.Enum):
    RATE_VS_SNR = "rate-vs-snr"
    RATE_VS_LAMBDA = "rate-vs-lambda"
    OUTAGE_VS_SNR = "outage-vs-snr"
    DIST_CHECK = "dist-check"
    CUSTOM = "custom"


class Metric(str, enum.Enum):
    RATE = "rate"
    OUTAGE = "outage"


def snr_range(start: float, stop: float, step: float) -> tuple:
    """Inclusive grid ``start, start+step, ..., stop``."""
    if step <= 0 or stop < start:
        raise ConfigError(f"bad range {start}:{stop}:{step}")
    n = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 10) for i in range(n))


@dataclass(frozen=True)
class SweepConfig:
    experiment: Experiment = Experiment.CUSTOM
    snr_db: tuple = (5.0,)
    lambdas: tuple = (1.0,)
    ds: tuple = (1.0,)
    alpha: float = 4.0
    rho: float | None = None
    policies: tuple = ALL_POLICIES
    fadings: tuple = (Fading.NONE, Fading.RAYLEIGH)
    n_trials: int = 100_000
    master_seed: int = 20190101
    window_radius: float = 10.0
    metric: Metric = Metric.RATE
    instantaneous: bool = False
    strict: bool = False
    output_path: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "experiment", Experiment(self.experiment))
        object.__setattr__(self, "metric", Metric(self.metric))
        object.__setattr__(self, "policies", tuple(PolicyKind(p) for p in self.policies))
        object.__setattr__(self, "fadings", tuple(Fading(f) for f in self.fadings))
        for name in ("snr_db", "lambdas", "ds"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        self.validate()

    def validate(self):
        if not (self.snr_db and self.lambdas and self.ds):
            raise ConfigError("parameter grid must be non-empty")
        if not self.policies or not self.fadings:
            raise ConfigError("need at least one policy and one fading mode")
        if any(not (v > 0 and math.isfinite(v)) for v in self.lambdas):
            raise ConfigError(f"lambda must be positive: {self.lambdas}")
        if any(not (v > 0 and math.isfinite(v)) for v in self.ds):
            raise ConfigError(f"d must be positive: {self.ds}")
        if any(not math.isfinite(v) for v in self.snr_db):
            raise ConfigError("snr_db must be finite")
        if not self.alpha >= 2:
            raise ConfigError(f"alpha must be >= 2, got {self.alpha}")
        if self.metric is Metric.OUTAGE and not (self.rho and self.rho > 0):
            raise ConfigError("outage sweeps need rho > 0")
        if self.n_trials < 1:
            raise ConfigError("n_trials must be >= 1")
        if not self.window_radius > 0:
            raise ConfigError("window radius must be positive")
        if max(self.ds) >= self.window_radius:
            raise ConfigError("source and destination must lie inside the window")


PRESETS = {
    "fig2": SweepConfig(experiment=Experiment.RATE_VS_SNR, snr_db=snr_range(0, 20, 1),
                        lambdas=(1.0,), ds=(1.0,)),
    "fig3": SweepConfig(experiment=Experiment.RATE_VS_LAMBDA, snr_db=(5.0,),
                        lambdas=(0.25, 0.5, 1, 2, 3, 4, 5, 7.5, 10, 15, 20), ds=(1.0, 1.5),
                        policies=(PolicyKind.OPTIMUM, PolicyKind.MIDPOINT)),
    "fig4": SweepConfig(experiment=Experiment.OUTAGE_VS_SNR, snr_db=snr_range(0, 30, 0.5),
                        lambdas=(1.0,), ds=(1.0, 1.5), rho=1.0, metric=Metric.OUTAGE,
                        policies=(PolicyKind.OPTIMUM, PolicyKind.MIDPOINT)),
    "dist-check": SweepConfig(experiment=Experiment.DIST_CHECK, snr_db=(5.0,)),
}

PRESET_FOR = {
    Experiment.RATE_VS_SNR: "fig2",
    Experiment.RATE_VS_LAMBDA: "fig3",
    Experiment.OUTAGE_VS_SNR: "fig4",
    Experiment.DIST_CHECK: "dist-check",
}


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    snr_db: float
    lam: float
    d: float
    alpha: float
    rho: float | None
    policy: PolicyKind
    fading: Fading
    analytic: float | None
    mc_mean: float
    mc_stderr: float
    n_trials: int

    def sort_key(self):
        return (self.snr_db, self.lam, self.d, self.alpha,
                -1.0 if self.rho is None else self.rho, self.policy.value, self.fading.value)

    def within_tolerance(self, slack: float = 0.005) -> bool:
        if self.analytic is None:
            return True
        return abs(self.analytic - self.mc_mean) <= 2.0 * self.mc_stderr + slack


def run_experiment(cfg: SweepConfig, workers: int | None = None) -> list[ResultRow]:
    """One row per grid point x policy x fading mode, sorted by swept parameters.

    Monte Carlo topologies are shared across SNR values and fading modes of
    the same ``(lambda, d)`` cell; only the rates are recomputed.
    """
    if cfg.experiment is Experiment.DIST_CHECK:
        raise ConfigError("dist-check produces a report, use dist_check()")
    metric = {Experiment.RATE_VS_SNR: Metric.RATE, Experiment.RATE_VS_LAMBDA: Metric.RATE,
              Experiment.OUTAGE_VS_SNR: Metric.OUTAGE}.get(cfg.experiment, cfg.metric)
    if metric is Metric.OUTAGE and not (cfg.rho and cfg.rho > 0):
        raise ConfigError("outage sweeps need rho > 0")
    rows = []
    for lam in cfg.lambdas:
        for d in cfg.ds:
            layout = NetworkLayout(d)
            ppp = PppSpec(lam, cfg.window_radius)
            base = run_trials(layout, ppp, ChannelSpec(alpha=cfg.alpha), cfg.policies,
                              cfg.n_trials, cfg.master_seed, workers=workers,
                              instantaneous=cfg.instantaneous)
            dist = DistParams(lam, d)
            for snr_db in cfg.snr_db:
                for fading in cfg.fadings:
                    ch = ChannelSpec.from_db(snr_db, cfg.alpha, fading)
                    ts = base.with_channel(ch)
                    for policy in cfg.policies:
                        if metric is Metric.RATE:
                            est = estimate_average_rate(ts, policy)
                        else:
                            est = estimate_outage(ts, policy, cfg.rho)
                        ana = None
                        if policy is PolicyKind.OPTIMUM and not cfg.instantaneous:
                            if metric is Metric.RATE:
                                ana = average_rate_analytic(ch, dist).value
                            else:
                                ana = outage_analytic(OutageQuery(cfg.rho, ch, dist))
                        rows.append(ResultRow(
                            cfg.experiment.value, snr_db, lam, d, cfg.alpha,
                            cfg.rho if metric is Metric.OUTAGE else None, policy, fading,
                            ana, est.mean, est.std_error, est.n))
    rows.sort(key=ResultRow.sort_key)
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.experiment, _fmt(r.snr_db), _fmt(r.lam), _fmt(r.d), _fmt(r.alpha),
                    _fmt(r.rho), r.policy.value, r.fading.value, _fmt(r.analytic),
                    _fmt(r.mc_mean), _fmt(r.mc_stderr), str(r.n_trials)])
    return buf.getvalue()


def write_output(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


@dataclass(frozen=True)
class Gate:
    name: str
    value: float
    limit: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.limit)


@dataclass
class DistCheckReport:
    params: dict
    gates: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(g.passed for g in self.gates)

    def format(self) -> str:
        head = ", ".join(f"{k}={v}" for k, v in self.params.items())
        lines = [f"# dist-check {head}"]
        for g in self.gates:
            lines.append(f"{'PASS' if g.passed else 'FAIL'}  {g.name:<28} "
                         f"{g.value:.3e} <= {g.limit:.1e}")
        lines.append(f"# overall: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _fd_residual(cdf, pdf, xs, rel_step=1e-5) -> float:
    worst = 0.0
    for x in xs:
        h = rel_step * x
        fd = (cdf(x + h) - cdf(x - h)) / (2 * h)
        worst = max(worst, abs(fd - pdf(x)))
    return worst


def dist_check(cfg: SweepConfig, workers: int | None = None) -> DistCheckReport:
    """Closed forms against their Monte Carlo, finite-difference and limit oracles."""
    lam, d, alpha = cfg.lambdas[0], cfg.ds[0], cfg.alpha
    snr = float(db_to_linear(cfg.snr_db[0]))
    dist = DistParams(lam, d)
    pl = PathLossParams(dist, alpha, snr)
    tau = cfg.window_radius
    report = DistCheckReport(params={"lambda": lam, "d": d, "alpha": alpha,
                                     "snr_db": cfg.snr_db[0], "trials": cfg.n_trials,
                                     "seed": cfg.master_seed, "window": tau})
    gates = report.gates

    ts = run_trials(NetworkLayout(d), PppSpec(lam, tau), ChannelSpec(alpha, snr),
                    (PolicyKind.OPTIMUM,), cfg.n_trials, cfg.master_seed, workers=workers)
    g_opt = ts.scores[PolicyKind.OPTIMUM]
    g_opt = g_opt[np.isfinite(g_opt)]
    gates.append(Gate("ks_gamma_opt", ks_distance(g_opt, lambda g: analytic.gamma_opt_cdf(dist, g)), 1e-2))
    gates.append(Gate("ks_y", ks_distance(snr / g_opt ** alpha, lambda y: analytic.y_cdf(pl, y)), 1e-2))
    gates.append(Gate("window_truncation", 1.0 - analytic.gamma_opt_cdf(dist, tau - d), 1e-6))

    tau_small = 2.0
    draws = sample_uniform_halfdisc_distance_to_source(
        NetworkLayout(d), tau_small, SeedSpec(cfg.master_seed, 2 ** 62), size=cfg.n_trials)
    gates.append(Gate("ks_halfdisc_tau2", ks_distance(
        draws, lambda g: analytic.truncated_gamma_cdf(d, tau_small, g)), 1e-2))
    knot = math.sqrt(tau_small ** 2 + d * d)
    gap = abs(analytic._truncated_middle(knot, d, tau_small)
              - analytic._truncated_outer(knot, d, tau_small))
    gates.append(Gate("knot_continuity", float(gap), 1e-9))

    grid = d * np.array([1.01, 1.1, 1.5, 2.0, 3.0])
    limit_gap = np.max(np.abs(analytic.truncated_gamma_opt_right_cdf(dist, 20.0, grid)
                              - analytic.right_half_cdf(dist, grid)))
    gates.append(Gate("limit_gap_tau20", float(limit_gap), 1e-3))
    halves = np.max(np.abs(analytic.gamma_opt_cdf_via_halves(dist, grid)
                           - analytic.gamma_opt_cdf(dist, grid)))
    gates.append(Gate("halves_identity", float(halves), 1e-12))

    gates.append(Gate("gamma_pdf_fd", _fd_residual(
        lambda g: analytic.gamma_opt_cdf(dist, g), lambda g: analytic.gamma_opt_pdf(dist, g),
        grid), 1e-6))
    ygrid = pl.y_max * np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    gates.append(Gate("y_pdf_fd", _fd_residual(
        lambda y: analytic.y_cdf(pl, y), lambda y: analytic.y_pdf(pl, y), ygrid), 1e-6))
    gates.append(Gate("gamma_pdf_mass", abs(integrate(
        lambda g: analytic.gamma_opt_pdf(dist, g), d, math.inf) - 1.0), 1e-8))
    gates.append(Gate("y_pdf_mass", abs(integrate(
        lambda y: analytic.y_pdf(pl, y), 0.0, pl.y_max) - 1.0), 1e-7))
    return report


def resolve(cfg: SweepConfig, **overrides) -> SweepConfig:
    try:
        return replace(cfg, **overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
