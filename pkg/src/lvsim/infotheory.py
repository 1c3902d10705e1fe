"""Detector quality as mutual information, and the threshold that maximizes it.

The detector is a binary channel from the truth (legitimate/malicious, prior
base rate B) to the verdict. Its quality index is the fraction of input
entropy removed by observing the output; the operating threshold is tuned by
maximizing that index over the threshold axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class DegenerateBaseRateError(Exception):
    """Base rate 0 or 1 leaves no input uncertainty to remove."""


class NoInformativeThresholdError(Exception):
    """Every threshold in the search range yields zero information."""


@dataclass(frozen=True)
class DetectorOperatingPoint:
    """Base rate plus the two error rates of a binary detector."""

    base_rate: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("base_rate", "alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True, eq=False)
class IdcCurve:
    """Rows of (threshold, alpha, beta, quality index) along a sweep."""

    t: tuple[float, ...]
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    c_idc: tuple[float, ...]

    def __post_init__(self):
        n = len(self.t)
        if not (len(self.alpha) == len(self.beta) == len(self.c_idc) == n):
            raise ValueError("curve columns must have equal length")
        if any(b >= a for a, b in zip(self.t[1:], self.t[:-1])):
            raise ValueError("thresholds must be strictly increasing")


def _plog2(p: float) -> float:
    return p * math.log2(p) if p > 0.0 else 0.0


def input_entropy(b: float) -> float:
    """Binary entropy of the base rate, bits; 0*log(0) is zero."""
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"base rate must be in [0, 1], got {b}")
    return -_plog2(b) - _plog2(1.0 - b)


def conditional_entropy(op: DetectorOperatingPoint) -> float:
    """Entropy of the truth given the verdict, bits.

    Sums -p(x,y) log2 p(x|y) over the four cells of the joint table, with
    every 0*log(0/.) term taken as zero.
    """
    b, a, d = op.base_rate, op.alpha, op.beta
    # joint[x][y]: x = truth (0 legit, 1 malicious), y = verdict
    j00 = (1.0 - b) * (1.0 - a)
    j01 = (1.0 - b) * a
    j10 = b * (1.0 - d)
    j11 = b * d
    py0 = j00 + j10
    py1 = j01 + j11
    h = 0.0
    for joint, marg in ((j00, py0), (j10, py0), (j01, py1), (j11, py1)):
        if joint > 0.0:
            h -= joint * math.log2(joint / marg)
    return h


def idc(op: DetectorOperatingPoint) -> float:
    """Fraction of input entropy removed by the verdict, in [0, 1].

    Independent of the entropy log base (the ratio cancels it). Undefined
    for base rates 0 and 1.
    """
    if op.base_rate in (0.0, 1.0):
        raise DegenerateBaseRateError("quality index undefined at base rate 0 or 1")
    hx = input_entropy(op.base_rate)
    value = (hx - conditional_entropy(op)) / hx
    # clamp float round-off at the [0, 1] boundaries
    return min(1.0, max(0.0, value))


RateSource = Callable[[float], tuple[float, float]]


def optimize_threshold(
    rate_source: RateSource,
    b: float,
    t_range: tuple[float, float] = (0.05, 20.0),
    coarse_step: float = 0.05,
) -> tuple[float, IdcCurve]:
    """Find the threshold maximizing the detector quality index.

    Scans a coarse grid over t_range, then refines inside the bracket around
    the best grid point by golden section to 1e-3. Ties break toward the
    smaller threshold (the more conservative ellipse). Returns the maximizer
    and the coarse curve.
    """
    lo, hi = t_range
    if lo <= 0 or hi <= lo:
        raise ValueError(f"threshold range must satisfy 0 < lo < hi, got {t_range}")
    if coarse_step <= 0:
        raise ValueError(f"coarse step must be > 0, got {coarse_step}")

    def quality(t: float) -> tuple[float, float, float]:
        a, d = rate_source(t)
        return idc(DetectorOperatingPoint(b, a, d)), a, d

    n = int(math.floor((hi - lo) / coarse_step + 1e-9)) + 1
    ts, alphas, betas, scores = [], [], [], []
    for i in range(n):
        t = lo + i * coarse_step
        c, a, d = quality(t)
        ts.append(t)
        alphas.append(a)
        betas.append(d)
        scores.append(c)
    curve = IdcCurve(tuple(ts), tuple(alphas), tuple(betas), tuple(scores))

    best = max(range(n), key=lambda i: (scores[i], -i))  # ties toward smaller t
    if scores[best] <= 1e-12:
        raise NoInformativeThresholdError(
            "quality index is zero across the whole threshold range"
        )

    a_br = ts[max(0, best - 1)]
    b_br = ts[min(n - 1, best + 1)]
    t0 = _golden_max(lambda t: quality(t)[0], a_br, b_br, tol=1e-3)
    # never regress below the best coarse point; prefer the smaller t on ties
    if quality(t0)[0] < scores[best] or (
        quality(t0)[0] == scores[best] and ts[best] < t0
    ):
        t0 = ts[best]
    return t0, curve


def _golden_max(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Golden-section maximizer on [a, b]; ties move toward the left end."""
    c = b - (b - a) * _INV_PHI
    d = a + (b - a) * _INV_PHI
    fc = f(c)
    fd = f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * _INV_PHI
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * _INV_PHI
            fd = f(d)
    return 0.5 * (a + b)
