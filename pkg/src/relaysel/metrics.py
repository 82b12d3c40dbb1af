"""Rates and outage for no-fading and Rayleigh links.

Two routes are provided: per-realization rates (fed by Monte Carlo) and
analytic averages obtained by integrating against the ``Y`` law.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .analytic import DistParams, PathLossParams, y_cdf, y_pdf
from .geometry import NetworkLayout, PolicyKind, RelayField, select
from .specialmath import QuadratureSpec, RootSpec, bisect, integrate, scaled_e1

LN2 = math.log(2.0)


class Fading(str, enum.Enum):
    NONE = "none"
    RAYLEIGH = "rayleigh"


class Route(str, enum.Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "montecarlo"


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class ChannelSpec:
    alpha: float = 4.0
    snr: float = 10 ** 0.5
    fading: Fading = Fading.NONE

    def __post_init__(self):
        if not self.alpha >= 2:
            raise ValueError(f"alpha must be >= 2, got {self.alpha}")
        if not self.snr > 0:
            raise ValueError(f"snr must be positive, got {self.snr}")
        object.__setattr__(self, "fading", Fading(self.fading))

    @classmethod
    def from_db(cls, snr_db: float, alpha: float = 4.0, fading=Fading.NONE) -> "ChannelSpec":
        return cls(alpha=alpha, snr=float(db_to_linear(snr_db)), fading=fading)

    def pathloss(self, dist: DistParams) -> PathLossParams:
        return PathLossParams(dist=dist, alpha=self.alpha, snr=self.snr)


@dataclass(frozen=True)
class RateResult:
    value: float
    route: Route


@dataclass(frozen=True)
class OutageQuery:
    rho: float
    channel: ChannelSpec
    dist: DistParams

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"target rate rho must be positive, got {self.rho}")


def rate_of_y(y, fading: Fading):
    """Fading-averaged two-hop rate as a function of the received SNR ``y``."""
    y = np.asarray(y, dtype=float)
    if Fading(fading) is Fading.NONE:
        out = 0.5 * np.log2(1.0 + y)
    else:
        with np.errstate(divide="ignore"):
            inv = np.where(y > 0, 1.0 / np.where(y > 0, y, 1.0), np.inf)
        out = np.asarray(scaled_e1(inv)) / (2.0 * LN2)
    return float(out) if out.ndim == 0 else out


def conditional_rate(channel: ChannelSpec, score):
    """Rate given the relay's worst-hop distance ``score``.

    Infinite scores (empty windows) give rate 0.
    """
    s = np.asarray(score, dtype=float)
    if np.any(~(s > 0)):
        raise ValueError("score must be positive")
    with np.errstate(over="ignore", divide="ignore"):
        y = channel.snr * s ** (-channel.alpha)
    return rate_of_y(y, channel.fading)


def instantaneous_rate(channel: ChannelSpec, layout: NetworkLayout, field: RelayField,
                       policy: PolicyKind, fade_draws: tuple[float, float]) -> float:
    """Rate of one fading state with the direct link dropped.

    ``fade_draws`` are the power gains of the source-relay and relay-destination hops.
    """
    h_sr, h_rd = fade_draws
    if h_sr < 0 or h_rd < 0:
        raise ValueError("fading power gains must be non-negative")
    relay = select(layout, field, policy).chosen
    return _instantaneous(channel, np.linalg.norm(layout.source - relay),
                          np.linalg.norm(relay - layout.dest), h_sr, h_rd)


def _instantaneous(channel, dist_sr, dist_rd, h_sr, h_rd):
    with np.errstate(divide="ignore", over="ignore"):
        hop1 = np.log2(1.0 + channel.snr * h_sr * np.asarray(dist_sr, float) ** (-channel.alpha))
        hop2 = np.log2(1.0 + channel.snr * h_rd * np.asarray(dist_rd, float) ** (-channel.alpha))
    out = 0.5 * np.minimum(hop1, hop2)
    return float(out) if out.ndim == 0 else out


def average_rate_analytic(channel: ChannelSpec, dist: DistParams,
                          quad: QuadratureSpec | None = None) -> RateResult:
    """Average rate of the optimum policy by quadrature over the ``Y`` density."""
    p = channel.pathloss(dist)
    fading = channel.fading

    def integrand(y):
        if y <= 0.0:
            return 0.0
        return rate_of_y(y, fading) * y_pdf(p, y)

    value = integrate(integrand, 0.0, p.y_max, quad)
    return RateResult(value=value, route=Route.ANALYTIC)


def rate_ceiling(channel: ChannelSpec, d: float) -> float:
    """Rate with the relay exactly at the midpoint, the dense-network limit."""
    return conditional_rate(channel, d)


def rayleigh_threshold(rho: float, tol: float = 1e-12) -> float:
    """Received SNR at which the Rayleigh rate equals ``rho``.

    The root is bracketed by ``2^(2 rho) - 1`` below and ``(2^(4 rho) - 1)/2``
    above; the bracket is widened by 1% on each side before bisecting.
    """
    if not rho > 0:
        raise ValueError("rho must be positive")
    lo = 0.99 * (2.0 ** (2 * rho) - 1.0)
    hi = 1.01 * (2.0 ** (4 * rho) - 1.0) / 2.0
    target = 2.0 * rho * LN2
    return bisect(lambda y: scaled_e1(1.0 / y) - target, RootSpec(lo, hi, tol))


def outage_threshold(q: OutageQuery) -> float:
    if q.channel.fading is Fading.NONE:
        return 2.0 ** (2 * q.rho) - 1.0
    return rayleigh_threshold(q.rho)


def outage_analytic(q: OutageQuery) -> float:
    p = q.channel.pathloss(q.dist)
    y_star = outage_threshold(q)
    if y_star > p.y_max:
        return 1.0
    return y_cdf(p, y_star)


def rayleigh_outage_bounds(q: OutageQuery) -> tuple[float, float]:
    """Lower and upper outage bounds from the classical ``exp(x) E1(x)`` sandwich."""
    p = q.channel.pathloss(q.dist)
    return (y_cdf(p, 2.0 ** (2 * q.rho) - 1.0),
            y_cdf(p, (2.0 ** (4 * q.rho) - 1.0) / 2.0))
