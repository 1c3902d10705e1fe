"""FastAPI service exposing the verifier and the experiment engine.

The `/verify` endpoint runs the production decision pipeline on one submitted
snapshot; the remaining endpoints wrap the theory and Monte Carlo machinery
for dashboards and batch clients. Run with:

    uvicorn "lvsim.service:create_app" --factory
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..config import default_config
from ..fisher import SingularInformationError, covariance, fim, mahalanobis_sq, verdict
from ..geometry import Hypothesis
from ..infotheory import DegenerateBaseRateError, NoInformativeThresholdError
from ..localization import AllStartsFailedError, MleEstimator, default_search_rect
from ..observation import RssSnapshot
from ..simulate import TheoryEngine, run_sigma_sweep, run_threshold_sweep
from .schemas import (
    HealthResponse,
    OptimizeRequest,
    OptimizeResponse,
    SigmaSweepPoint,
    SigmaSweepRequest,
    SigmaSweepResponse,
    SweepPoint,
    SweepRequest,
    SweepResponse,
    TheoryPoint,
    TheoryRatesRequest,
    TheoryRatesResponse,
    VerifyRequest,
    VerifyResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="lvsim",
        version=__version__,
        description="RSS location verification: snapshot verdicts, theoretical "
        "rates, threshold optimization, Monte Carlo validation.",
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/verify", response_model=VerifyResponse)
    def verify_snapshot(req: VerifyRequest) -> VerifyResponse:
        ch = req.channel.to_domain()
        dep = req.deployment.to_domain() if req.deployment else default_config().deployment
        claimed = req.claimed.to_domain()
        try:
            snap = RssSnapshot(np.asarray(req.observations, dtype=float))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if snap.n_stations != dep.n_stations:
            raise HTTPException(
                status_code=422,
                detail=f"observations have {snap.n_stations} rows but the "
                f"deployment has {dep.n_stations} stations",
            )
        try:
            cov = covariance(fim(ch, dep, claimed, snap.n_samples))
            est = MleEstimator(ch, dep, default_search_rect(dep)).estimate(snap)
        except SingularInformationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except AllStartsFailedError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        d_m = mahalanobis_sq(est.position, claimed, cov)
        decision = verdict(d_m, req.threshold)
        return VerifyResponse(
            verdict="legitimate" if decision is Hypothesis.LEGITIMATE else "malicious",
            mahalanobis_sq=d_m,
            threshold=req.threshold,
            estimated={"x": est.position.x, "y": est.position.y},
            converged=est.converged,
        )

    @app.post("/rates/theory", response_model=TheoryRatesResponse)
    def theory_rates(req: TheoryRatesRequest) -> TheoryRatesResponse:
        cfg = _domain_config(req.scenario)
        theory = _theory_engine(cfg)
        ts = req.thresholds if req.thresholds is not None else list(cfg.t_grid)
        points = []
        for t in ts:
            if t <= 0:
                raise HTTPException(status_code=422, detail=f"threshold must be > 0, got {t}")
            a, b = theory.rates(t)
            points.append(TheoryPoint(t=t, alpha=a, beta=b, c_idc=theory.idc(t)))
        return TheoryRatesResponse(points=points)

    @app.post("/threshold/optimize", response_model=OptimizeResponse)
    def optimize(req: OptimizeRequest) -> OptimizeResponse:
        cfg = _domain_config(req.scenario)
        theory = _theory_engine(cfg)
        try:
            t0, curve = theory.optimize((req.t_min, req.t_max), req.coarse_step)
        except NoInformativeThresholdError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        alpha, beta = theory.rates(t0)
        return OptimizeResponse(
            t0=t0,
            alpha=alpha,
            beta=beta,
            c_idc=theory.idc(t0),
            curve=[
                TheoryPoint(t=t, alpha=a, beta=b, c_idc=c)
                for t, a, b, c in zip(curve.t, curve.alpha, curve.beta, curve.c_idc)
            ],
        )

    @app.post("/simulate/sweep", response_model=SweepResponse)
    def simulate_sweep(req: SweepRequest) -> SweepResponse:
        cfg = _domain_config(req.scenario)
        try:
            table = run_threshold_sweep(cfg)
        except SingularInformationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return SweepResponse(
            points=[
                SweepPoint(
                    t=row[0],
                    alpha_theory=row[1],
                    beta_theory=row[2],
                    idc_theory=row[3],
                    alpha_sim=row[4],
                    beta_sim=row[5],
                    idc_sim=row[6],
                )
                for row in table.rows()
            ],
            n_legitimate=table.n_legitimate,
            n_malicious=table.n_malicious,
            excluded=table.excluded,
            t0_theory=table.t0_theory,
            t0_sim=table.t0_sim,
        )

    @app.post("/simulate/sigma-sweep", response_model=SigmaSweepResponse)
    def simulate_sigma_sweep(req: SigmaSweepRequest) -> SigmaSweepResponse:
        cfg = _domain_config(req.scenario)
        sigmas = tuple(req.sigma_list) if req.sigma_list is not None else None
        mults = tuple(req.t_multipliers) if req.t_multipliers is not None else None
        try:
            table = run_sigma_sweep(cfg, sigmas, mults)
        except SingularInformationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except NoInformativeThresholdError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return SigmaSweepResponse(
            points=[
                SigmaSweepPoint(
                    sigma_db=r.sigma_db,
                    multiplier=r.multiplier,
                    threshold=r.threshold,
                    idc_theory=r.idc_theory,
                    idc_sim=r.idc_sim,
                )
                for r in table.rows
            ]
        )

    return app


def _domain_config(scenario):
    try:
        return scenario.to_domain()
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _theory_engine(cfg) -> TheoryEngine:
    try:
        return TheoryEngine(cfg)
    except SingularInformationError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except DegenerateBaseRateError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


app = create_app()
