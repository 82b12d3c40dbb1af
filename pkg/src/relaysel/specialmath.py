"""Special functions and small numerical kernels.

The exponential integral is evaluated in two regimes: a power series for
``x <= 1`` and a continued fraction for ``x > 1``.  The continued fraction
produces the scaled quantity ``exp(x) * E1(x)`` directly, which is what the
Rayleigh rate formulas need and which never overflows.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _integrate

EULER_GAMMA = 0.57721566490153286061

_SERIES_TERMS = 24
_CF_MAX_ITER = 2000
_CF_EPS = 1e-16
_TINY = 1e-300


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class NoConvergence(RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget."""


class BadBracket(ValueError):
    """Root bracket endpoints do not straddle a sign change."""


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class RootSpec:
    bracket_lo: float
    bracket_hi: float
    tol: float = 1e-12

    def __post_init__(self):
        if not self.bracket_lo < self.bracket_hi:
            raise ValueError("bracket_lo must be < bracket_hi")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


def _unwrap(out: np.ndarray, scalar: bool):
    return float(np.asarray(out).reshape(-1)[0]) if scalar else out


def _e1_series(x: np.ndarray) -> np.ndarray:
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!), truncated well below 1e-16 for x <= 1
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, _SERIES_TERMS + 1):
        term = term * (-x) / k
        total += term / k
    return -EULER_GAMMA - np.log(x) - total


def _scaled_e1_cf(x: np.ndarray) -> np.ndarray:
    """exp(x) * E1(x) by modified Lentz on the even continued fraction, x > 1."""
    b = x + 1.0
    c = np.full_like(x, 1.0 / _TINY)
    dd = 1.0 / b
    h = dd.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _CF_MAX_ITER + 1):
        a = -float(i * i)
        b = b + 2.0
        dd_new = 1.0 / (a * dd + b)
        c_new = b + a / c
        delta = c_new * dd_new
        dd = np.where(active, dd_new, dd)
        c = np.where(active, c_new, c)
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > _CF_EPS
        if not active.any():
            break
    return h


def exp_integral_e1(x):
    """Exponential integral ``E1(x) = int_x^inf exp(-t)/t dt`` for ``x > 0``.

    Accepts a scalar or an array.  Raises :class:`DomainError` if any
    argument is not strictly positive.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(~(arr > 0)):
        raise DomainError("E1 requires x > 0")
    out = np.empty_like(arr)
    small = arr <= 1.0
    if small.any():
        out[small] = _e1_series(arr[small])
    big = ~small
    if big.any():
        xb = arr[big]
        with np.errstate(under="ignore"):
            out[big] = _scaled_e1_cf(np.where(np.isinf(xb), 2.0, xb)) * np.exp(-xb)
    return _unwrap(out, scalar)


def scaled_e1(x):
    """Return ``exp(x) * E1(x)`` without overflow for large ``x``.

    ``x = inf`` maps to 0, the limit of the scaled function.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(~(arr > 0)):
        raise DomainError("E1 requires x > 0")
    out = np.empty_like(arr)
    small = arr <= 1.0
    if small.any():
        xs = arr[small]
        out[small] = np.exp(xs) * _e1_series(xs)
    big = (~small) & np.isfinite(arr)
    if big.any():
        out[big] = _scaled_e1_cf(arr[big])
    out[np.isinf(arr)] = 0.0
    return _unwrap(out, scalar)


def arcsec(x):
    """Inverse secant, ``arccos(1/x)``; defined for ``|x| >= 1``.

    Positive arguments land in ``[0, pi/2)``, negative ones in ``(pi/2, pi]``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) < 1.0):
        raise DomainError("arcsec requires |x| >= 1")
    with np.errstate(divide="ignore"):
        out = np.arccos(1.0 / arr)
    return _unwrap(out, arr.ndim == 0)


def arccsc(x):
    """Inverse cosecant, ``arcsin(1/x)``; defined for ``|x| >= 1``."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) < 1.0):
        raise DomainError("arccsc requires |x| >= 1")
    with np.errstate(divide="ignore"):
        out = np.arcsin(1.0 / arr)
    return _unwrap(out, arr.ndim == 0)


def integrate(f: Callable[[float], float], lo: float, hi: float,
              spec: QuadratureSpec | None = None) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[lo, hi]``.

    ``hi`` may be ``inf``; the half line is then mapped onto ``(0, 1]`` by
    ``t = 1 / (1 + x - lo)`` before integrating.

    Raises
    ------
    NoConvergence
        If the subdivision budget runs out before the error estimate
        falls below ``max(abs_tol, rel_tol * |result|)``.
    """
    spec = spec or QuadratureSpec()
    if not lo < hi:
        raise ValueError("integrate requires lo < hi")

    if math.isinf(hi):
        def g(t):
            x = lo + (1.0 - t) / t
            return f(x) / (t * t)
        a, b, fun = 0.0, 1.0, g
    else:
        a, b, fun = lo, hi, f

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        value, abserr, info = _integrate.quad(
            fun, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=spec.max_subdivisions, full_output=True)[:3]
    target = max(spec.abs_tol, spec.rel_tol * abs(value))
    if not np.isfinite(value) or abserr > target:
        raise NoConvergence(
            f"quadrature error {abserr:.3g} exceeds {target:.3g} after "
            f"{info.get('last', '?')} subintervals")
    return float(value)


def bisect(f: Callable[[float], float], spec: RootSpec) -> float:
    """Bisection on ``[spec.bracket_lo, spec.bracket_hi]`` down to width ``spec.tol``."""
    lo, hi = spec.bracket_lo, spec.bracket_hi
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise BadBracket(f"f({lo})={flo:.3g} and f({hi})={fhi:.3g} share a sign")
    while hi - lo > spec.tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # bracket at floating-point resolution
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)
