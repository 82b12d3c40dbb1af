"""Closed-form laws of the optimum relay distance and its path-loss transform.

``gamma_opt_*`` hold for any non-increasing path loss; ``y_*`` specialize to
``Y = snr / gamma_opt**alpha``.  The ``truncated_*`` functions are the
finite-window building blocks that reproduce the full-plane law in the
limit, and exist so that chain can be checked numerically.

All functions accept scalars or arrays and return the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specialmath import DomainError

# below this exp() underflows in double precision
_EXP_FLOOR = -745.0


@dataclass(frozen=True)
class DistParams:
    intensity: float
    d: float = 1.0

    def __post_init__(self):
        if not (self.intensity > 0 and math.isfinite(self.intensity)):
            raise ValueError(f"intensity must be positive, got {self.intensity}")
        if not (self.d > 0 and math.isfinite(self.d)):
            raise ValueError(f"d must be positive, got {self.d}")


@dataclass(frozen=True)
class PathLossParams:
    dist: DistParams
    alpha: float = 4.0
    snr: float = 10 ** 0.5

    def __post_init__(self):
        if not self.alpha >= 2:
            raise ValueError(f"alpha must be >= 2, got {self.alpha}")
        if not self.snr > 0:
            raise ValueError(f"snr must be positive, got {self.snr}")

    @property
    def y_max(self) -> float:
        return self.snr / self.dist.d ** self.alpha


def _prep(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return float(arr) if scalar else arr


def _lens_term(gamma: np.ndarray, d: float) -> np.ndarray:
    """``d*sqrt(g^2-d^2) - g^2*arcsec(g/d)`` for ``g >= d`` (minus half the lens area)."""
    g = np.maximum(gamma, d)
    root = np.sqrt(np.maximum(g * g - d * d, 0.0))
    return d * root - g * g * np.arccos(np.minimum(d / g, 1.0))


def _opt_exponent(p: DistParams, gamma: np.ndarray) -> np.ndarray:
    return 2.0 * p.intensity * _lens_term(gamma, p.d)


def gamma_opt_cdf(p: DistParams, gamma):
    """CDF of the optimum relay distance for a Poisson field of intensity ``p.intensity``."""
    g, scalar = _prep(gamma)
    with np.errstate(invalid="ignore", divide="ignore"):
        e = _opt_exponent(p, g)
        out = np.where(e < _EXP_FLOOR, 1.0, -np.expm1(np.maximum(e, _EXP_FLOOR)))
    out = np.where(g < p.d, 0.0, out)
    return _out(out, scalar)


def gamma_opt_pdf(p: DistParams, gamma):
    g, scalar = _prep(gamma)
    with np.errstate(invalid="ignore", divide="ignore", under="ignore"):
        gc = np.maximum(g, p.d)
        e = _opt_exponent(p, gc)
        pref = 4.0 * p.intensity * gc * np.arccos(np.minimum(p.d / gc, 1.0))
        out = pref * np.exp(np.maximum(e, _EXP_FLOOR))
        out = np.where(e < _EXP_FLOOR, 0.0, out)
    out = np.where(g < p.d, 0.0, out)
    return _out(out, scalar)


def _check_y(y: np.ndarray):
    if np.any(~(y > 0)):
        raise DomainError("Y-law requires y > 0")


def y_cdf(p: PathLossParams, y):
    """CDF of ``Y = snr / gamma_opt**alpha``; saturates at 1 from ``snr/d**alpha`` on."""
    arr, scalar = _prep(y)
    _check_y(arr)
    with np.errstate(under="ignore", over="ignore"):
        g = (p.snr / arr) ** (1.0 / p.alpha)
        e = _opt_exponent(p.dist, g)
        out = np.exp(np.maximum(e, _EXP_FLOOR))
    out = np.where(e < _EXP_FLOOR, 0.0, out)
    out = np.where(arr >= p.y_max, 1.0, out)
    return _out(out, scalar)


def y_pdf(p: PathLossParams, y):
    arr, scalar = _prep(y)
    _check_y(arr)
    lam, d, a = p.dist.intensity, p.dist.d, p.alpha
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        ratio = p.snr / arr
        g = ratio ** (1.0 / a)
        e = _opt_exponent(p.dist, g)
        pref = 4.0 * lam / (a * arr) * ratio ** (2.0 / a) * np.arccos(np.minimum(d / g, 1.0))
        out = pref * np.exp(np.maximum(e, _EXP_FLOOR))
    out = np.where(e < _EXP_FLOOR, 0.0, out)
    out = np.where(arr > p.y_max, 0.0, out)
    return _out(out, scalar)


def _truncated_middle(g, d, tau):
    root = np.sqrt(np.maximum(g * g - d * d, 0.0))
    return 2.0 / (math.pi * tau * tau) * (g * g * np.arccos(np.minimum(d / g, 1.0)) - d * root)


def _truncated_outer(g, d, tau):
    # sqrt(tau^2 + d^2) < g <= tau + d, principal branches throughout
    t2 = tau * tau
    den = t2 + d * d - g * g  # strictly negative on this branch
    # den rounds to >= 0 only at the knot itself, where the ratio is -inf
    ratio = np.where(den < 0, 2.0 * d * tau / np.where(den < 0, den, -1.0), -np.inf)
    ratio = np.minimum(ratio, -1.0)
    asec_term = np.arccos(-1.0 / ratio)  # arcsec(-ratio), argument >= 1
    acsc_term = np.arcsin(1.0 / ratio)   # arccsc(ratio)
    atan_term = np.arctan(np.sqrt(np.maximum(4 * d * d * t2 - den * den, 0.0)) / (t2 - d * d + g * g))
    heron = np.maximum((tau - d + g) * (tau + d - g) * (d - tau + g) * (tau + d + g), 0.0)
    return (2.0 * g * g / (math.pi * t2) * (asec_term - atan_term)
            - 2.0 * acsc_term / math.pi
            - np.sqrt(heron) / (math.pi * t2))


def truncated_gamma_cdf(d: float, tau: float, gamma):
    """CDF of the source distance of a uniform point on the right half-disc of radius ``tau``."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    g, scalar = _prep(gamma)
    knot = math.sqrt(tau * tau + d * d)
    with np.errstate(invalid="ignore", divide="ignore"):
        mid = _truncated_middle(g, d, tau)
        outer = _truncated_outer(g, d, tau)
    out = np.where(g < d, 0.0,
                   np.where(g <= knot, mid,
                            np.where(g <= tau + d, outer, 1.0)))
    return _out(np.clip(out, 0.0, 1.0), scalar)


def truncated_gamma_opt_right_cdf(p: DistParams, tau: float, gamma):
    """CDF of the best score among Poisson relays on the right half-disc of radius ``tau``."""
    f = np.asarray(truncated_gamma_cdf(p.d, tau, gamma))
    mean = p.intensity * math.pi * tau * tau / 2.0
    out = -np.expm1(-mean * f)
    return _out(out, out.ndim == 0)


def right_half_cdf(p: DistParams, gamma):
    """Full right half-plane law: the ``tau -> inf`` limit of the truncated one."""
    g, scalar = _prep(gamma)
    with np.errstate(invalid="ignore", divide="ignore"):
        e = p.intensity * _lens_term(g, p.d)
        out = -np.expm1(np.maximum(e, _EXP_FLOOR))
    out = np.where(g < p.d, 0.0, out)
    return _out(out, scalar)


def gamma_opt_cdf_via_halves(p: DistParams, gamma):
    """Optimum-distance CDF assembled from two independent half-plane minima."""
    right = np.asarray(right_half_cdf(p, gamma))
    out = 1.0 - (1.0 - right) ** 2
    return _out(out, out.ndim == 0)
