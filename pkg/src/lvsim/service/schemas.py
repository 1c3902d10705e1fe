"""Pydantic request/response models for the verification service."""

from __future__ import annotations

from dataclasses import replace

from pydantic import BaseModel, Field, model_validator

from ..config import ScenarioConfig, default_config
from ..geometry import ChannelParams, Deployment, Position, Rect
from ..observation import AttackerSpec


class PositionModel(BaseModel):
    x: float
    y: float

    def to_domain(self) -> Position:
        return Position(self.x, self.y)


class RegionModel(BaseModel):
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def to_domain(self) -> Rect:
        return Rect(self.xmin, self.ymin, self.xmax, self.ymax)


class ChannelModel(BaseModel):
    p0: float = 0.0
    d0: float = Field(default=1.0, gt=0)
    gamma: float = Field(default=3.0, gt=0)
    sigma_db: float = Field(default=5.0, gt=0)

    def to_domain(self) -> ChannelParams:
        return ChannelParams(self.p0, self.d0, self.gamma, self.sigma_db)


class DeploymentModel(BaseModel):
    stations: list[PositionModel] = Field(min_length=1)
    region: RegionModel

    def to_domain(self) -> Deployment:
        return Deployment(tuple(s.to_domain() for s in self.stations), self.region.to_domain())


class AttackerModel(BaseModel):
    mode: str = "far_field"
    position: PositionModel | None = None

    @model_validator(mode="after")
    def _check_mode(self):
        if self.mode not in ("far_field", "at_position"):
            raise ValueError("mode must be far_field or at_position")
        if self.mode == "at_position" and self.position is None:
            raise ValueError("at_position mode requires a position")
        if self.mode == "far_field" and self.position is not None:
            raise ValueError("far_field mode takes no position")
        return self

    def to_domain(self) -> AttackerSpec:
        if self.mode == "far_field":
            return AttackerSpec.far_field()
        return AttackerSpec.at_position(self.position.to_domain())


class ScenarioModel(BaseModel):
    """Mirror of the scenario configuration; every field defaults to the
    reference scenario."""

    channel: ChannelModel | None = None
    deployment: DeploymentModel | None = None
    claimed: PositionModel | None = None
    samples_per_station: int | None = Field(default=None, ge=1)
    attacker: AttackerModel | None = None
    base_rate: float | None = Field(default=None, ge=0.0, le=1.0)
    trials: int | None = Field(default=None, ge=1)
    seed: int | None = Field(default=None, ge=0)
    t_grid: list[float] | None = None
    grid_step: float | None = Field(default=None, gt=0)
    search_rect: RegionModel | None = None
    workers: int | None = Field(default=None, ge=1)

    def to_domain(self) -> ScenarioConfig:
        base = default_config()
        kwargs = {}
        if self.channel is not None:
            kwargs["channel"] = self.channel.to_domain()
        if self.deployment is not None:
            kwargs["deployment"] = self.deployment.to_domain()
        if self.claimed is not None:
            kwargs["claimed"] = self.claimed.to_domain()
        if self.samples_per_station is not None:
            kwargs["samples_per_station"] = self.samples_per_station
        if self.attacker is not None:
            kwargs["attacker"] = self.attacker.to_domain()
        if self.base_rate is not None:
            kwargs["base_rate"] = self.base_rate
        if self.trials is not None:
            kwargs["trials"] = self.trials
        if self.seed is not None:
            kwargs["seed"] = self.seed
        if self.t_grid is not None:
            kwargs["t_grid"] = tuple(self.t_grid)
        if self.grid_step is not None:
            kwargs["grid_step"] = self.grid_step
        if self.search_rect is not None:
            kwargs["search_rect"] = self.search_rect.to_domain()
        if self.workers is not None:
            kwargs["workers"] = self.workers
        return replace(base, **kwargs)


class HealthResponse(BaseModel):
    status: str
    version: str


class VerifyRequest(BaseModel):
    """One verification episode: a claimed position plus the raw snapshot.

    `observations` is the N x S power matrix in dBm, row i from station i.
    """

    channel: ChannelModel = ChannelModel()
    deployment: DeploymentModel | None = None
    claimed: PositionModel
    observations: list[list[float]] = Field(min_length=1)
    threshold: float = Field(gt=0)


class VerifyResponse(BaseModel):
    verdict: str
    mahalanobis_sq: float
    threshold: float
    estimated: PositionModel
    converged: bool


class TheoryPoint(BaseModel):
    t: float
    alpha: float
    beta: float
    c_idc: float


class TheoryRatesRequest(BaseModel):
    scenario: ScenarioModel = ScenarioModel()
    thresholds: list[float] | None = Field(default=None, description="defaults to the scenario t_grid")


class TheoryRatesResponse(BaseModel):
    points: list[TheoryPoint]


class OptimizeRequest(BaseModel):
    scenario: ScenarioModel = ScenarioModel()
    t_min: float = Field(default=0.05, gt=0)
    t_max: float = Field(default=20.0, gt=0)
    coarse_step: float = Field(default=0.05, gt=0)


class OptimizeResponse(BaseModel):
    t0: float
    alpha: float
    beta: float
    c_idc: float
    curve: list[TheoryPoint]


class SweepRequest(BaseModel):
    scenario: ScenarioModel = ScenarioModel()


class SweepPoint(BaseModel):
    t: float
    alpha_theory: float
    beta_theory: float
    idc_theory: float
    alpha_sim: float
    beta_sim: float
    idc_sim: float


class SweepResponse(BaseModel):
    points: list[SweepPoint]
    n_legitimate: int
    n_malicious: int
    excluded: int
    t0_theory: float
    t0_sim: float


class SigmaSweepRequest(BaseModel):
    scenario: ScenarioModel = ScenarioModel()
    sigma_list: list[float] | None = None
    t_multipliers: list[float] | None = None


class SigmaSweepPoint(BaseModel):
    sigma_db: float
    multiplier: float
    threshold: float
    idc_theory: float
    idc_sim: float


class SigmaSweepResponse(BaseModel):
    points: list[SigmaSweepPoint]
