"""Theoretical false-positive and detection rates.

The false positive rate has the chi-square closed form exp(-T/2). Both rates
also have an exact-likelihood form: integrate the normalized posterior of a
noiseless mean observation vector over the decision ellipse, with a uniform
position prior on the deployment region. The closed form is the Gaussian
idealization of the integral one; the quadrature quantifies the gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fisher import Covariance, covariance, fim
from .geometry import ChannelParams, Deployment, Position, Rect
from .observation import MeanRssVector


@dataclass(frozen=True)
class RateTriple:
    """One operating point of the detector: threshold plus both error rates."""

    t: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")


def false_positive_closed(t: float) -> float:
    """Chi-square false positive rate exp(-t/2) for the 2-D ellipse test."""
    if t < 0:
        raise ValueError(f"threshold must be >= 0, got {t}")
    return math.exp(-0.5 * t)


def log_likelihood(
    ch: ChannelParams,
    dep: Deployment,
    mean_obs: MeanRssVector,
    pos: Position,
    s: int,
) -> float:
    """Log-likelihood of per-station sample means at a candidate position.

    The mean of s independent samples has variance sigma_db^2 / s, so the
    quadratic term carries a factor s (sample means are sufficient for the
    Gaussian model).
    """
    if s < 1:
        raise ValueError(f"sample count must be >= 1, got {s}")
    if mean_obs.values.size != dep.n_stations:
        raise ValueError("mean vector length does not match the deployment")
    var = ch.sigma_db**2 / s
    resid = mean_obs.values - _model_means(ch, dep, pos)
    log_norm = -0.5 * dep.n_stations * math.log(2.0 * math.pi * var)
    return float(-0.5 * np.sum(resid**2) / var + log_norm)


def _model_means(ch: ChannelParams, dep: Deployment, pos: Position) -> np.ndarray:
    d = np.array([math.hypot(pos.x - st.x, pos.y - st.y) for st in dep.stations])
    if np.any(d <= 0.0):
        raise ValueError("position coincides with a station")
    return ch.p0 - 10.0 * ch.gamma * np.log10(d / ch.d0)


@dataclass(frozen=True, eq=False)
class PosteriorGrid:
    """Normalized posterior weights on a regular midpoint grid over a region.

    weights[iy, ix] is the posterior mass of the cell centered at
    (x_centers[ix], y_centers[iy]); the weights sum to one, which absorbs
    the normalizing constant of the posterior.
    """

    region: Rect
    step: float
    x_centers: np.ndarray
    y_centers: np.ndarray
    weights: np.ndarray
    samples_per_station: int


def posterior_grid(
    ch: ChannelParams,
    dep: Deployment,
    mean_obs: MeanRssVector,
    step: float,
    s: int,
) -> PosteriorGrid:
    """Midpoint-rule posterior of a mean observation vector over the region.

    The prior is uniform on the deployment region. Cell centers landing on a
    station (a measure-zero singularity of the log-distance model) are nudged
    by step/100 into the cell before evaluation.
    """
    region = dep.region
    if step <= 0:
        raise ValueError(f"grid step must be > 0, got {step}")
    if step > min(region.width, region.height) / 4.0:
        raise ValueError(
            f"grid step {step} too coarse: must be at least 4x smaller than the region extent"
        )
    if mean_obs.values.size != dep.n_stations:
        raise ValueError("mean vector length does not match the deployment")
    nx = max(1, int(round(region.width / step)))
    ny = max(1, int(round(region.height / step)))
    dx = region.width / nx
    dy = region.height / ny
    xs = region.xmin + (np.arange(nx) + 0.5) * dx
    ys = region.ymin + (np.arange(ny) + 0.5) * dy
    gx, gy = np.meshgrid(xs, ys)

    nudge = step / 100.0
    var = ch.sigma_db**2 / s
    ll = np.zeros((ny, nx))
    for i, st in enumerate(dep.stations):
        ddx = gx - st.x
        ddy = gy - st.y
        on_station = (np.abs(ddx) < nudge) & (np.abs(ddy) < nudge)
        if np.any(on_station):
            ddx = np.where(on_station, nudge, ddx)
            ddy = np.where(on_station, nudge, ddy)
        dist = np.hypot(ddx, ddy)
        mu = ch.p0 - 10.0 * ch.gamma * np.log10(dist / ch.d0)
        ll -= (mean_obs.values[i] - mu) ** 2
    ll /= 2.0 * var

    w = np.exp(ll - ll.max())
    w /= w.sum()
    return PosteriorGrid(region, step, xs, ys, w, s)


def mahalanobis_field(grid: PosteriorGrid, claimed: Position, m: Covariance) -> np.ndarray:
    """Squared Mahalanobis distance of every cell center from the claimed
    position."""
    dx = grid.x_centers[None, :] - claimed.x
    dy = grid.y_centers[:, None] - claimed.y
    return (m.yy * dx**2 - 2.0 * m.xy * dx * dy + m.xx * dy**2) / m.det()


class EllipseMassProfile:
    """Posterior mass inside {D_M <= t} as a fast function of the threshold.

    Counting whole cells by their center's D_M leaves an O(step) error from
    cells straddling the ellipse boundary, which is too coarse for the
    quadrature-convergence contract. Each cell is instead credited with the
    fraction of its area inside the ellipse, linearizing D_M across the cell
    with its analytic gradient; the boundary error then shrinks as O(step^2).
    """

    def __init__(self, grid: PosteriorGrid, claimed: Position, m: Covariance):
        d_m = mahalanobis_field(grid, claimed, m)
        dx = grid.x_centers[None, :] - claimed.x
        dy = grid.y_centers[:, None] - claimed.y
        det = m.det()
        gx = 2.0 * (m.yy * dx - m.xy * dy) / det
        gy = 2.0 * (m.xx * dy - m.xy * dx) / det
        hx = grid.region.width / grid.x_centers.size / 2.0
        hy = grid.region.height / grid.y_centers.size / 2.0
        half_range = np.abs(gx) * hx + np.abs(gy) * hy
        # D_M is nonnegative, so the in-cell range never extends below zero
        self._lo = np.maximum(d_m - half_range, 0.0).ravel()
        self._hi = (d_m + half_range).ravel()
        self._d_m = d_m.ravel()
        self._w = grid.weights.ravel()

    def mass_within(self, t: float) -> float:
        """Posterior mass of the region {D_M <= t}, boundary cells pro-rated."""
        width = self._hi - self._lo
        flat = width <= 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.clip((t - self._lo) / width, 0.0, 1.0)
        if flat.any():
            frac[flat] = (self._d_m[flat] <= t).astype(float)
        return float(np.dot(self._w, frac))


def detection_rate(
    ch: ChannelParams,
    dep: Deployment,
    claimed: Position,
    t: float,
    grid: PosteriorGrid,
) -> float:
    """Probability a spoofer's estimate falls outside the acceptance ellipse.

    One minus the posterior mass of the ellipse, where the grid was built
    from the spoofed mean vector and the ellipse covariance comes from the
    information matrix at the claimed position.
    """
    if t < 0:
        raise ValueError(f"threshold must be >= 0, got {t}")
    m = covariance(fim(ch, dep, claimed, grid.samples_per_station))
    profile = EllipseMassProfile(grid, claimed, m)
    return 1.0 - profile.mass_within(t)


def false_positive_integral(
    ch: ChannelParams,
    dep: Deployment,
    claimed: Position,
    t: float,
    grid: PosteriorGrid,
) -> float:
    """Integral-form false positive rate: same construction as the detection
    rate but with the grid built from the honest (non-spoofed) mean vector."""
    return detection_rate(ch, dep, claimed, t, grid)
