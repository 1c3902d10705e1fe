"""Fisher information of the RSS likelihood, the decision ellipse, and the verdict.

The verifier scores a position estimate by its squared Mahalanobis distance
to the claimed position, normalized by the inverse information matrix. The
acceptance region {D_M <= T} is an ellipse whose axes scale with sqrt(T)
along the covariance eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import ChannelParams, Deployment, Hypothesis, Position

# det(F) below this fraction of ||F||_F^2 is treated as numerically singular
SINGULARITY_TOL = 1e-12


class SingularInformationError(Exception):
    """Raised when the information matrix is not invertible.

    Happens when the stations subtend fewer than two distinct bearings
    (mod pi) from the evaluation point, e.g. a single station or collinear
    geometry through the point.
    """


@dataclass(frozen=True)
class FisherInfo:
    """Symmetric 2x2 information matrix, entries in meters^-2."""

    xx: float
    xy: float
    yy: float

    def det(self) -> float:
        return self.xx * self.yy - self.xy * self.xy

    @property
    def matrix(self):
        return [[self.xx, self.xy], [self.xy, self.yy]]


@dataclass(frozen=True)
class Covariance:
    """Symmetric positive-definite 2x2 covariance, entries in meters^2."""

    xx: float
    xy: float
    yy: float

    def __post_init__(self):
        if self.xx <= 0 or self.yy <= 0 or self.det() <= 0:
            raise ValueError("covariance must be positive definite")

    def det(self) -> float:
        return self.xx * self.yy - self.xy * self.xy

    @property
    def matrix(self):
        return [[self.xx, self.xy], [self.xy, self.yy]]


@dataclass(frozen=True)
class DecisionEllipse:
    """Acceptance region {D_M <= t}: center, semi-axes (a >= b), orientation.

    `orientation` is the angle of the a-axis, radians in (-pi/2, pi/2].
    """

    center: Position
    semi_axes: tuple[float, float]
    orientation: float


def fim(ch: ChannelParams, dep: Deployment, eval_pos: Position, s: int) -> FisherInfo:
    """Information matrix of the RSS likelihood at a position, for s samples
    per station.

    Entries involve only even functions of the station-to-user bearings
    (cos^2, sin^2, sin of the doubled angle), computed here directly from
    coordinate offsets. Independent samples add information, hence the
    linear scaling with s. Reference power and reference distance cancel;
    only gamma, sigma_db and the geometry enter.
    """
    if s < 1:
        raise ValueError(f"sample count must be >= 1, got {s}")
    b = (10.0 * ch.gamma / (ch.sigma_db * math.log(10.0))) ** 2
    xx = xy = yy = 0.0
    for st in dep.stations:
        dx = eval_pos.x - st.x
        dy = eval_pos.y - st.y
        d2 = dx * dx + dy * dy
        if d2 <= 0.0:
            raise ValueError("evaluation position coincides with a station")
        d4 = d2 * d2
        xx += dx * dx / d4
        xy += dx * dy / d4
        yy += dy * dy / d4
    return FisherInfo(s * b * xx, s * b * xy, s * b * yy)


def covariance(f: FisherInfo) -> Covariance:
    """Invert the information matrix; raises SingularInformationError on
    degenerate geometry."""
    det = f.det()
    fro_sq = f.xx * f.xx + 2.0 * f.xy * f.xy + f.yy * f.yy
    if det <= SINGULARITY_TOL * fro_sq:
        raise SingularInformationError(
            "information matrix is singular (stations subtend fewer than two "
            "distinct bearings from the evaluation point)"
        )
    return Covariance(f.yy / det, -f.xy / det, f.xx / det)


def mahalanobis_sq(est: Position, claimed: Position, m: Covariance) -> float:
    """Squared Mahalanobis distance of the estimate from the claimed position
    under covariance m. Dimensionless, >= 0, zero iff est == claimed."""
    dx = est.x - claimed.x
    dy = est.y - claimed.y
    # quadratic form with the closed-form 2x2 inverse of m
    return (m.yy * dx * dx - 2.0 * m.xy * dx * dy + m.xx * dy * dy) / m.det()


def decision_ellipse(claimed: Position, m: Covariance, t: float) -> DecisionEllipse:
    """Ellipse bounding {D_M <= t}: semi-axes sqrt(t * eigenvalue) along the
    covariance eigenvectors.

    Provided for reporting and integration bounds; verdicts use D_M directly
    to avoid the eigendecomposition round trip.
    """
    if t <= 0:
        raise ValueError(f"threshold must be > 0, got {t}")
    half_tr = 0.5 * (m.xx + m.yy)
    disc = math.hypot(0.5 * (m.xx - m.yy), m.xy)
    lam1 = half_tr + disc
    lam2 = half_tr - disc
    if m.xy == 0.0 and m.xx >= m.yy:
        angle = 0.0
    elif m.xy == 0.0:
        angle = 0.5 * math.pi
    else:
        angle = math.atan2(lam1 - m.xx, m.xy)
    if angle <= -0.5 * math.pi:
        angle += math.pi
    elif angle > 0.5 * math.pi:
        angle -= math.pi
    return DecisionEllipse(claimed, (math.sqrt(t * lam1), math.sqrt(t * lam2)), angle)


def verdict(d_m: float, t: float) -> Hypothesis:
    """Binary decision: legitimate iff D_M <= t (boundary inclusive)."""
    if d_m < 0:
        raise ValueError(f"squared Mahalanobis distance must be >= 0, got {d_m}")
    if t <= 0:
        raise ValueError(f"threshold must be > 0, got {t}")
    return Hypothesis.LEGITIMATE if d_m <= t else Hypothesis.MALICIOUS
