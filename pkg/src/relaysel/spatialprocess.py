"""Reproducible homogeneous Poisson sampling on discs and half-discs.

Every trial draws from its own Philox stream: the key is the master seed and
the stream id sits in the top word of the 256-bit counter, so streams for
different trials never overlap and results do not depend on how trials are
scheduled across workers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import NetworkLayout, RelayField

_U64 = (1 << 64) - 1


class Region(str, enum.Enum):
    FULL_DISC = "full"
    RIGHT_HALF_DISC = "right"


@dataclass(frozen=True)
class PppSpec:
    intensity: float
    window_radius: float = 10.0
    region: Region = Region.FULL_DISC

    def __post_init__(self):
        if not (self.intensity > 0 and math.isfinite(self.intensity)):
            raise ValueError(f"intensity must be positive, got {self.intensity}")
        if not (self.window_radius > 0 and math.isfinite(self.window_radius)):
            raise ValueError(f"window_radius must be positive, got {self.window_radius}")

    @property
    def area(self) -> float:
        full = math.pi * self.window_radius ** 2
        return full if self.region is Region.FULL_DISC else 0.5 * full

    @property
    def mean_count(self) -> float:
        return self.intensity * self.area


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0


def make_rng(seed: SeedSpec) -> np.random.Generator:
    bits = np.random.Philox(key=seed.master_seed & _U64,
                            counter=[0, 0, 0, seed.stream_id & _U64])
    return np.random.Generator(bits)


def sample_disc_points(rng: np.random.Generator, n: int, radius: float,
                       region: Region = Region.FULL_DISC) -> np.ndarray:
    """``n`` i.i.d. uniform points by inverse transform on radius and angle."""
    u = rng.random((2, n))
    r = radius * np.sqrt(u[0])
    if region is Region.FULL_DISC:
        theta = 2.0 * math.pi * u[1]
    else:
        theta = math.pi * (u[1] - 0.5)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sample_ppp(spec: PppSpec, seed: SeedSpec | np.random.Generator) -> RelayField:
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    n = int(rng.poisson(spec.mean_count))
    pts = sample_disc_points(rng, n, spec.window_radius, spec.region)
    return RelayField(points=pts, window_radius=spec.window_radius)


def halfdisc_distance(d: float, u, theta):
    """Distance from the source at ``(-d, 0)`` to the point at polar ``(u, theta)``."""
    u = np.asarray(u, dtype=float)
    return np.sqrt(u * u + 2.0 * d * u * np.cos(theta) + d * d)


def sample_uniform_halfdisc_distance_to_source(layout: NetworkLayout, tau: float,
                                               seed: SeedSpec, size: int | None = None):
    """Source distance of a uniform point on the right half-disc of radius ``tau``.

    Returns a float when ``size`` is None, else an array of ``size`` draws.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    rng = make_rng(seed)
    n = 1 if size is None else int(size)
    u = tau * np.sqrt(rng.random(n))
    theta = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, n)
    out = halfdisc_distance(layout.d, u, theta)
    return float(out[0]) if size is None else out
