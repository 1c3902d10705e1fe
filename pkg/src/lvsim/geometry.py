"""Geometry and log-distance path-loss primitives shared by all detector layers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Hypothesis(Enum):
    LEGITIMATE = 0
    MALICIOUS = 1


@dataclass(frozen=True)
class Position:
    """A point in the plane, coordinates in meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"position coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class ChannelParams:
    """Log-distance path-loss channel with log-normal shadowing.

    p0       reference received power at distance d0, dBm
    d0       reference distance, meters (> 0)
    gamma    path-loss exponent (> 0); mean power drops 10*gamma dB per decade
    sigma_db shadowing standard deviation, dB (> 0)
    """

    p0: float
    d0: float
    gamma: float
    sigma_db: float

    def __post_init__(self):
        for name in ("p0", "d0", "gamma", "sigma_db"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"channel parameter {name} must be finite")
        if self.d0 <= 0:
            raise ValueError(f"d0 must be > 0, got {self.d0}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.sigma_db <= 0:
            raise ValueError(f"sigma_db must be > 0, got {self.sigma_db}")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle with positive area."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.xmin, self.ymin, self.xmax, self.ymax)):
            raise ValueError("rectangle bounds must be finite")
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ValueError(
                f"rectangle must have positive area, got x [{self.xmin}, {self.xmax}],"
                f" y [{self.ymin}, {self.ymax}]"
            )

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains(self, p: Position) -> bool:
        return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax

    def padded(self, fraction: float) -> "Rect":
        """Grow each side by `fraction` of the corresponding extent."""
        px = fraction * self.width
        py = fraction * self.height
        return Rect(self.xmin - px, self.ymin - py, self.xmax + px, self.ymax + py)


@dataclass(frozen=True)
class Deployment:
    """Fixed base stations plus the rectangular analysis region.

    Station order is significant: row i of every observation matrix refers to
    stations[i].
    """

    stations: tuple[Position, ...]
    region: Rect

    def __post_init__(self):
        if len(self.stations) < 1:
            raise ValueError("deployment needs at least one station")
        object.__setattr__(self, "stations", tuple(self.stations))

    @property
    def n_stations(self) -> int:
        return len(self.stations)


def euclidean_distance(p: Position, q: Position) -> float:
    """Distance between two points, meters."""
    return math.hypot(p.x - q.x, p.y - q.y)


def mean_rss(ch: ChannelParams, d: float) -> float:
    """Mean received power at distance d, dBm: p0 - 10*gamma*log10(d/d0).

    All path-loss logarithms are base 10 (dB convention). Rejects d <= 0,
    which would put the user on top of a station.
    """
    if d <= 0:
        raise ValueError(f"distance must be > 0, got {d}")
    return ch.p0 - 10.0 * ch.gamma * math.log10(d / ch.d0)


def bearing(bs: Position, user: Position) -> float:
    """Full-quadrant angle of the station-to-user direction, radians in (-pi, pi].

    Only even trigonometric functions of the bearing enter the information
    matrix, so the branch choice (vs user-to-station) is immaterial there.
    """
    dx = user.x - bs.x
    dy = user.y - bs.y
    if dx == 0.0 and dy == 0.0:
        raise ValueError("bearing undefined: user coincides with the station")
    return math.atan2(dy, dx)
