"""Maximum-likelihood position estimation from an RSS snapshot.

The likelihood is multimodal near stations, so the search seeds a handful of
starts from a coarse grid over the search rectangle and refines each with a
deterministic derivative-free simplex descent. Conformance is defined by
reaching the global optimum on desk-scale problems, not by the algorithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rates
from .geometry import ChannelParams, Deployment, Position, Rect
from .observation import MeanRssVector, RssSnapshot

_BIG = 1e300


class AllStartsFailedError(Exception):
    """Every refinement start diverged or hit a station singularity."""


@dataclass(frozen=True)
class EstimationResult:
    position: Position
    log_likelihood_at_optimum: float
    converged: bool


class MleEstimator:
    """Reusable estimator for one (channel, deployment, search rectangle).

    Precomputes the coarse-grid model powers once; estimating a snapshot then
    costs one vectorized grid scan plus a few simplex descents.
    """

    def __init__(
        self,
        ch: ChannelParams,
        dep: Deployment,
        search_rect: Rect,
        coarse_spacing: float = 5.0,
        n_starts: int = 3,
        simplex_tol: float = 1e-4,
        max_iter: int = 300,
    ):
        if coarse_spacing <= 0:
            raise ValueError(f"coarse spacing must be > 0, got {coarse_spacing}")
        if n_starts < 1:
            raise ValueError(f"need at least one start, got {n_starts}")
        self.ch = ch
        self.dep = dep
        self.search_rect = search_rect
        self.n_starts = n_starts
        self.simplex_tol = simplex_tol
        self.max_iter = max_iter

        xs = np.arange(search_rect.xmin + coarse_spacing / 2, search_rect.xmax, coarse_spacing)
        ys = np.arange(search_rect.ymin + coarse_spacing / 2, search_rect.ymax, coarse_spacing)
        gx, gy = np.meshgrid(xs, ys)
        self._grid_x = gx.ravel()
        self._grid_y = gy.ravel()
        model = np.empty((dep.n_stations, self._grid_x.size))
        for i, st in enumerate(dep.stations):
            d = np.hypot(self._grid_x - st.x, self._grid_y - st.y)
            d = np.maximum(d, 1e-9)  # grid node on a station: clamp, the refinement avoids it
            model[i] = ch.p0 - 10.0 * ch.gamma * np.log10(d / ch.d0)
        self._model = model
        self._stations = [(st.x, st.y) for st in dep.stations]
        self._half_gain = 5.0 * ch.gamma  # 10*gamma*log10(d) == 5*gamma*log10(d^2)
        self._d0_term = 10.0 * ch.gamma * math.log10(ch.d0)

    def estimate(self, snapshot: RssSnapshot) -> EstimationResult:
        if snapshot.n_stations != self.dep.n_stations:
            raise ValueError("snapshot station count does not match the deployment")
        means = snapshot.station_means()
        scores = ((means[:, None] - self._model) ** 2).sum(axis=0)
        starts = np.argsort(scores, kind="stable")[: self.n_starts]

        obj = self._make_objective(means)
        best = None
        for k in starts:
            cand = _simplex_min(
                obj,
                float(self._grid_x[k]),
                float(self._grid_y[k]),
                scale=2.0,
                tol=self.simplex_tol,
                max_iter=self.max_iter,
            )
            if cand[2] >= _BIG:
                continue
            if best is None or cand[2] < best[2]:
                best = cand
        if best is None:
            raise AllStartsFailedError("no refinement start reached a finite optimum")

        pos = Position(best[0], best[1])
        ll = rates.log_likelihood(
            self.ch, self.dep, MeanRssVector(means), pos, snapshot.n_samples
        )
        return EstimationResult(pos, ll, best[3])

    def _make_objective(self, means: np.ndarray):
        """Negative log-likelihood up to constants, guarded outside the search
        rectangle and at station singularities."""
        rect = self.search_rect
        stations = self._stations
        half_gain = self._half_gain
        offsets = [float(m - self.ch.p0 - self._d0_term) for m in means]
        log10 = math.log10

        def obj(x: float, y: float) -> float:
            if not (rect.xmin <= x <= rect.xmax and rect.ymin <= y <= rect.ymax):
                return _BIG
            total = 0.0
            for (sx, sy), off in zip(stations, offsets):
                dx = x - sx
                dy = y - sy
                d2 = dx * dx + dy * dy
                if d2 < 1e-18:
                    return _BIG
                r = off + half_gain * log10(d2)
                total += r * r
            return total

        return obj


def mle_estimate(
    ch: ChannelParams,
    dep: Deployment,
    snapshot: RssSnapshot,
    search_rect: Rect,
    **kwargs,
) -> EstimationResult:
    """One-shot estimate; build an MleEstimator directly for repeated use."""
    return MleEstimator(ch, dep, search_rect, **kwargs).estimate(snapshot)


def default_search_rect(dep: Deployment, pad_fraction: float = 0.2) -> Rect:
    """Deployment region padded on each side, so edge estimates are not
    clamped artificially."""
    return dep.region.padded(pad_fraction)


def _simplex_min(f, x0: float, y0: float, scale: float, tol: float, max_iter: int):
    """Nelder-Mead on a 2-D objective. Returns (x, y, f, converged);
    converged means the simplex collapsed below tol. Fully deterministic:
    ties sort by vertex index."""
    vx = [x0, x0 + scale, x0]
    vy = [y0, y0, y0 + scale]
    fv = [f(vx[i], vy[i]) for i in range(3)]
    converged = False
    for _ in range(max_iter):
        order = sorted(range(3), key=lambda i: (fv[i], i))
        vx = [vx[i] for i in order]
        vy = [vy[i] for i in order]
        fv = [fv[i] for i in order]
        size = max(
            abs(vx[1] - vx[0]), abs(vy[1] - vy[0]), abs(vx[2] - vx[0]), abs(vy[2] - vy[0])
        )
        if size < tol:
            converged = True
            break
        cx = 0.5 * (vx[0] + vx[1])
        cy = 0.5 * (vy[0] + vy[1])
        rx = 2.0 * cx - vx[2]
        ry = 2.0 * cy - vy[2]
        fr = f(rx, ry)
        if fr < fv[0]:
            ex = 3.0 * cx - 2.0 * vx[2]
            ey = 3.0 * cy - 2.0 * vy[2]
            fe = f(ex, ey)
            if fe < fr:
                vx[2], vy[2], fv[2] = ex, ey, fe
            else:
                vx[2], vy[2], fv[2] = rx, ry, fr
        elif fr < fv[1]:
            vx[2], vy[2], fv[2] = rx, ry, fr
        else:
            if fr < fv[2]:
                kx = 0.5 * (cx + rx)
                ky = 0.5 * (cy + ry)
            else:
                kx = 0.5 * (cx + vx[2])
                ky = 0.5 * (cy + vy[2])
            fk = f(kx, ky)
            if fk < min(fr, fv[2]):
                vx[2], vy[2], fv[2] = kx, ky, fk
            else:  # shrink toward the best vertex
                vx[1] = 0.5 * (vx[0] + vx[1])
                vy[1] = 0.5 * (vy[0] + vy[1])
                vx[2] = 0.5 * (vx[0] + vx[2])
                vy[2] = 0.5 * (vy[0] + vy[2])
                fv[1] = f(vx[1], vy[1])
                fv[2] = f(vx[2], vy[2])
    order = sorted(range(3), key=lambda i: (fv[i], i))
    i = order[0]
    return vx[i], vy[i], fv[i], converged
