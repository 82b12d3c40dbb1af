"""Coordinate frame, relay-selection function and selection policies.

Frame: source at ``(-d, 0)``, destination at ``(+d, 0)``, midpoint at the
origin.  Point sets are ``(n, 2)`` float arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class EmptyField(ValueError):
    """No relay exists in the realization."""


class FieldTooSmall(ValueError):
    """Operation needs at least two relays."""


class PolicyKind(str, enum.Enum):
    OPTIMUM = "optimum"
    MIDPOINT = "midpoint"
    NEAREST_SOURCE = "nearest_source"
    NEAREST_DEST = "nearest_dest"

    @classmethod
    def parse(cls, text: str) -> "PolicyKind":
        key = text.strip().lower().replace("-", "_")
        aliases = {"opt": "optimum", "mid": "midpoint", "source": "nearest_source",
                   "dest": "nearest_dest", "destination": "nearest_dest",
                   "nearest_destination": "nearest_dest"}
        return cls(aliases.get(key, key))


ALL_POLICIES = tuple(PolicyKind)


@dataclass(frozen=True)
class NetworkLayout:
    d: float = 1.0

    def __post_init__(self):
        if not (self.d > 0 and math.isfinite(self.d)):
            raise ValueError(f"half-distance d must be positive, got {self.d}")

    @property
    def source(self) -> np.ndarray:
        return np.array([-self.d, 0.0])

    @property
    def dest(self) -> np.ndarray:
        return np.array([self.d, 0.0])

    @property
    def midpoint(self) -> np.ndarray:
        return np.zeros(2)


@dataclass(frozen=True)
class RelayField:
    points: np.ndarray
    window_radius: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "points", pts)
        if not self.window_radius > 0:
            raise ValueError("window_radius must be positive")
        if len(pts):
            r = np.hypot(pts[:, 0], pts[:, 1])
            if r.max() > self.window_radius * (1 + 1e-12):
                raise ValueError("relay outside the sampling window")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class SelectionResult:
    chosen: np.ndarray
    score: float
    policy: PolicyKind
    index: int = field(default=-1, compare=False)


def scores(layout: NetworkLayout, points: np.ndarray) -> np.ndarray:
    """Vectorized selection function: max distance to source and destination."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    y2 = pts[:, 1] ** 2
    to_src = np.sqrt((pts[:, 0] + layout.d) ** 2 + y2)
    to_dst = np.sqrt((pts[:, 0] - layout.d) ** 2 + y2)
    return np.maximum(to_src, to_dst)


def selection_score(layout: NetworkLayout, x) -> float:
    x0, x1 = float(x[0]), float(x[1])
    return max(math.hypot(x0 + layout.d, x1), math.hypot(x0 - layout.d, x1))


def policy_keys(layout: NetworkLayout, points: np.ndarray, policy: PolicyKind) -> np.ndarray:
    """The per-point quantity each policy minimizes."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if policy is PolicyKind.OPTIMUM:
        return scores(layout, pts)
    if policy is PolicyKind.MIDPOINT:
        return pts[:, 0] ** 2 + pts[:, 1] ** 2
    if policy is PolicyKind.NEAREST_SOURCE:
        return (pts[:, 0] + layout.d) ** 2 + pts[:, 1] ** 2
    if policy is PolicyKind.NEAREST_DEST:
        return (pts[:, 0] - layout.d) ** 2 + pts[:, 1] ** 2
    raise ValueError(f"unknown policy {policy!r}")


def select(layout: NetworkLayout, field: RelayField, policy: PolicyKind) -> SelectionResult:
    """Pick one relay from ``field`` under ``policy``.

    Ties go to the lowest index in ``field.points``.
    """
    policy = PolicyKind(policy)
    if len(field) == 0:
        raise EmptyField("no relay in the realization")
    idx = int(np.argmin(policy_keys(layout, field.points, policy)))
    chosen = field.points[idx].copy()
    return SelectionResult(chosen=chosen, score=selection_score(layout, chosen),
                           policy=policy, index=idx)


def hyperplane_projection_score(layout: NetworkLayout, y) -> float:
    """Score of a point on the bisector at the same distance from the midpoint as ``y``.

    Never exceeds ``selection_score(layout, y)``.
    """
    return math.sqrt(layout.d ** 2 + float(y[0]) ** 2 + float(y[1]) ** 2)


def midpoint_optimality_certificate(layout: NetworkLayout, field: RelayField) -> bool:
    """Sufficient check that the mid-point policy is optimal for ``field``.

    True when the closest relay to the midpoint scores no worse than the
    bisector bound of the second-closest relay; then no other relay can
    beat it.
    """
    if len(field) < 2:
        raise FieldTooSmall("certificate needs at least two relays")
    r2 = policy_keys(layout, field.points, PolicyKind.MIDPOINT)
    order = np.argsort(r2, kind="stable")
    first, second = order[0], order[1]
    return selection_score(layout, field.points[first]) <= math.sqrt(layout.d ** 2 + r2[second])
