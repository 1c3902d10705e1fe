"""RSS snapshot generation for honest users and power-boosting spoofers.

A snapshot is the N x S matrix of powers one user episode produces: row i
holds the S samples collected by station i. Honest users radiate from their
claimed position; spoofers transmit from elsewhere with a single scalar
power boost chosen to minimize the mean-square divergence from the claimed
position's RSS signature (one omni antenna, so the boost is common to all
stations).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import ChannelParams, Deployment, Position, euclidean_distance


@dataclass(frozen=True, eq=False)
class RssSnapshot:
    """N x S matrix of received powers in dBm; row i belongs to stations[i]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] < 1:
            raise ValueError(f"snapshot must be an N x S matrix with S >= 1, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("snapshot contains non-finite powers")
        object.__setattr__(self, "values", v)

    @property
    def n_stations(self) -> int:
        return self.values.shape[0]

    @property
    def n_samples(self) -> int:
        return self.values.shape[1]

    def station_means(self) -> np.ndarray:
        return self.values.mean(axis=1)


@dataclass(frozen=True, eq=False)
class MeanRssVector:
    """Length-N vector of noiseless mean powers, dBm."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValueError(f"mean vector must be 1-D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("mean vector contains non-finite entries")
        object.__setattr__(self, "values", v)


class AttackerMode(Enum):
    FAR_FIELD = "far_field"
    AT_POSITION = "at_position"


@dataclass(frozen=True)
class AttackerSpec:
    """Spoofer placement: effectively infinitely far away, or at a known point.

    The finite position may lie outside the deployment region (a distant
    attacker typically does).
    """

    mode: AttackerMode
    true_position: Position | None = None

    def __post_init__(self):
        if self.mode is AttackerMode.AT_POSITION and self.true_position is None:
            raise ValueError("AT_POSITION attacker needs a true position")
        if self.mode is AttackerMode.FAR_FIELD and self.true_position is not None:
            raise ValueError("FAR_FIELD attacker takes no position")

    @classmethod
    def far_field(cls) -> "AttackerSpec":
        return cls(AttackerMode.FAR_FIELD)

    @classmethod
    def at_position(cls, true_position: Position) -> "AttackerSpec":
        return cls(AttackerMode.AT_POSITION, true_position)


def path_gains(ch: ChannelParams, dep: Deployment, pos: Position) -> np.ndarray:
    """Per-station path losses 10*gamma*log10(d_i/d0), dB."""
    d = np.array([euclidean_distance(pos, s) for s in dep.stations])
    if np.any(d <= 0.0):
        raise ValueError("position coincides with a station")
    return 10.0 * ch.gamma * np.log10(d / ch.d0)


def legitimate_mean_vector(ch: ChannelParams, dep: Deployment, pos: Position) -> MeanRssVector:
    """Noiseless power vector an honest user at `pos` would produce."""
    return MeanRssVector(ch.p0 - path_gains(ch, dep, pos))


def spoofed_mean_vector(ch: ChannelParams, dep: Deployment, claimed_pos: Position) -> MeanRssVector:
    """Noiseless power vector of the far-field spoofer: one common value.

    An infinitely distant attacker with the optimal boost delivers the mean
    of the claimed signature to every station, so the vector is constant.
    """
    gains_c = path_gains(ch, dep, claimed_pos)
    value = ch.p0 - gains_c.mean()
    return MeanRssVector(np.full(dep.n_stations, value))


def malicious_mean_vector(
    ch: ChannelParams, dep: Deployment, attacker: AttackerSpec, claimed_pos: Position
) -> MeanRssVector:
    """Noiseless power vector of a spoofer using the MSE-optimal boost."""
    if attacker.mode is AttackerMode.FAR_FIELD:
        return spoofed_mean_vector(ch, dep, claimed_pos)
    gains_t = path_gains(ch, dep, attacker.true_position)
    gains_c = path_gains(ch, dep, claimed_pos)
    means = ch.p0 + gains_t.mean() - gains_t - gains_c.mean()
    return MeanRssVector(means)


def optimal_boost(
    ch: ChannelParams, dep: Deployment, true_pos: Position, claimed_pos: Position
) -> float:
    """Boost power (dB) minimizing the mean-square divergence between the
    spoofer's powers and the claimed position's signature.

    Closed form: mean path loss from the true position minus mean path loss
    from the claimed position.
    """
    gains_t = path_gains(ch, dep, true_pos)
    gains_c = path_gains(ch, dep, claimed_pos)
    return float(gains_t.mean() - gains_c.mean())


def mse_divergence(
    ch: ChannelParams,
    dep: Deployment,
    true_pos: Position,
    claimed_pos: Position,
    boost: float,
) -> float:
    """Mean-square divergence between boosted and claimed signatures at a
    given boost; minimized by optimal_boost."""
    gains_t = path_gains(ch, dep, true_pos)
    gains_c = path_gains(ch, dep, claimed_pos)
    return float(np.mean((boost - gains_t + gains_c) ** 2))


def sample_legitimate(
    ch: ChannelParams,
    dep: Deployment,
    true_pos: Position,
    s: int,
    rng: np.random.Generator,
) -> RssSnapshot:
    """Draw an N x S honest snapshot: model means plus i.i.d. shadowing."""
    if s < 1:
        raise ValueError(f"sample count must be >= 1, got {s}")
    means = legitimate_mean_vector(ch, dep, true_pos).values
    noise = rng.normal(0.0, ch.sigma_db, size=(dep.n_stations, s))
    return RssSnapshot(means[:, None] + noise)


def sample_malicious(
    ch: ChannelParams,
    dep: Deployment,
    attacker: AttackerSpec,
    claimed_pos: Position,
    s: int,
    rng: np.random.Generator,
) -> RssSnapshot:
    """Draw an N x S spoofed snapshot around the boosted means.

    Noise is fresh and independent per station and per sample, matching the
    honest model.
    """
    if s < 1:
        raise ValueError(f"sample count must be >= 1, got {s}")
    means = malicious_mean_vector(ch, dep, attacker, claimed_pos).values
    noise = rng.normal(0.0, ch.sigma_db, size=(dep.n_stations, s))
    return RssSnapshot(means[:, None] + noise)
