"""HTTP service exposing the solver, distribution, diagnostics and harness.

The service wraps the core package one-to-one: every endpoint validates its
request with the schemas, converts the model description through
``ModelSpec``, and calls the corresponding library function. The
distribution table is built once per process and shared.
"""

from __future__ import annotations

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..edge import (
    classify_spikes,
    diagnose_class_G,
    solve_edge,
    stationarity_check,
)
from ..errors import DomainError, SolverError
from ..modelspec import ModelSpec
from ..sim import SimConfig, run_concentration, run_edge_monte_carlo, run_universality
from ..tw import REFERENCE_QUANTILE_GRID
from ..spectrum import ToeplitzSpec, symbol_flat_spots
from ..tw import default_distribution
from . import schemas

__all__ = ["create_app", "app"]


def _model_spec(model) -> ModelSpec:
    return ModelSpec.from_mapping(model.model_dump())


def _solve_payload(measure, n: int, p: int) -> schemas.SolveResponse:
    params = solve_edge(measure, n, p)
    residuals = stationarity_check(measure, n, p, params)
    return schemas.SolveResponse(
        n=params.n,
        p=params.p,
        c=params.c,
        mu=params.mu,
        sigma=params.sigma,
        alpha1=params.alpha1,
        gamma_sq=params.gamma_sq,
        margin=params.margin,
        lambda1=measure.lambda_max,
        lambda_p=measure.lambda_min,
        spike_threshold=params.spike_threshold,
        residuals=schemas.Residuals(
            fprime=residuals.fprime, fsecond=residuals.fsecond, fthird=residuals.fthird
        ),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="twedge", version=__version__)

    @app.exception_handler(DomainError)
    async def _domain_error(_req: Request, exc: DomainError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(SolverError)
    async def _solver_error(_req: Request, exc: SolverError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve(request: schemas.SolveRequest) -> schemas.SolveResponse:
        spec = _model_spec(request.model)
        return _solve_payload(spec.measure(), request.n, spec.p)

    @app.post("/diagnose", response_model=schemas.DiagnoseResponse)
    def diagnose(request: schemas.DiagnoseRequest) -> schemas.DiagnoseResponse:
        spec = _model_spec(request.model)
        report = diagnose_class_G(
            spec.measure(),
            request.n,
            spec.p,
            margin_min=request.thresholds.margin_min,
            lambda1_max=request.thresholds.lambda1_max,
            lambdap_min=request.thresholds.lambdap_min,
        )
        flat = None
        if spec.kind == "toeplitz":
            flat = [
                list(spot)
                for spot in symbol_flat_spots(ToeplitzSpec(spec.coefficients, spec.p))
            ]
        return schemas.DiagnoseResponse(
            n=report.n,
            p=report.p,
            gamma_sq=report.gamma_sq,
            lambda1=report.lambda1,
            lambda_p=report.lambda_p,
            alpha1=report.alpha1,
            alpha1_margin=report.alpha1_margin,
            atom_mass=report.atom_mass,
            atom_bound=report.atom_bound,
            atom_bound_slack=report.atom_bound_slack,
            checks=[
                schemas.CheckOut(
                    name=c.name, passed=c.passed, value=c.value, threshold=c.threshold
                )
                for c in report.checks
            ],
            passed=report.passed,
            symbol_flat_spots=flat,
        )

    @app.post("/spike", response_model=schemas.SpikeResponse)
    def spike(request: schemas.SpikeRequest) -> schemas.SpikeResponse:
        spec = _model_spec(request.model)
        report = classify_spikes(
            spec.measure(), request.n, spec.p, request.spikes, chi_tol=request.chi_tol
        )
        warning = None
        if report.has_supercritical:
            warning = (
                "supercritical spikes fall outside the validated regime: no "
                "centering or scaling is claimed for them"
            )
        return schemas.SpikeResponse(
            n=report.n,
            p=report.p,
            k=report.k,
            chi_tol=report.chi_tol,
            threshold=report.threshold,
            c_base=report.c_base,
            c_tilde=report.c_tilde,
            k_critical=report.k_critical,
            spikes=[
                schemas.SpikeOut(value=s.value, regime=s.regime, rel_distance=s.rel_distance)
                for s in report.spikes
            ],
            warning=warning,
        )

    @app.post("/tw/cdf", response_model=schemas.TwValuesResponse)
    def tw_cdf_endpoint(request: schemas.TwCdfRequest) -> schemas.TwValuesResponse:
        dist = default_distribution()
        values = request.s if isinstance(request.s, list) else [request.s]
        return schemas.TwValuesResponse(values=[float(dist.cdf(v)) for v in values])

    @app.post("/tw/quantile", response_model=schemas.TwValuesResponse)
    def tw_quantile_endpoint(request: schemas.TwQuantileRequest) -> schemas.TwValuesResponse:
        dist = default_distribution()
        probs = request.prob if isinstance(request.prob, list) else [request.prob]
        return schemas.TwValuesResponse(values=[float(dist.quantile(v)) for v in probs])

    @app.get("/tw/table", response_model=schemas.TwTableResponse)
    def tw_table() -> schemas.TwTableResponse:
        dist = default_distribution()
        return schemas.TwTableResponse(
            rows=[
                schemas.TwTableRow(s=s, target=target, F0=f0)
                for s, target, f0 in dist.reference_table()
            ]
        )

    @app.get("/tw/grid", response_model=schemas.TwGridResponse)
    def tw_grid(
        step: int = Query(default=1, ge=1, description="grid subsampling stride")
    ) -> schemas.TwGridResponse:
        dist = default_distribution()
        return schemas.TwGridResponse(
            rows=[
                schemas.TwGridRow(x=float(x), q=float(q), F0=float(f0))
                for x, q, f0 in zip(
                    dist.grid[::step], dist.q_values[::step], dist.f0_values[::step]
                )
            ]
        )

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(request: schemas.SimulateRequest) -> schemas.SimulateResponse:
        spec = _model_spec(request.model)
        measure = spec.measure()
        config = SimConfig(
            n=request.n,
            p=spec.p,
            measure=measure,
            covariance=spec.covariance(),
            replications=request.replications,
            master_seed=request.master_seed,
            quantile_grid=(
                tuple(tuple(q) for q in request.quantile_grid)
                if request.quantile_grid
                else REFERENCE_QUANTILE_GRID
            ),
            entry_law=request.entry_law,
            top_k=request.top_k,
            keep_samples=request.keep_samples,
            workers=request.workers,
        )
        report = run_edge_monte_carlo(config)
        return schemas.SimulateResponse(
            n=report.n,
            p=report.p,
            replications=report.replications,
            master_seed=report.master_seed,
            entry_law=report.entry_law,
            top_k=report.top_k,
            edge=_solve_payload(measure, report.n, report.p),
            rows=[
                schemas.GridPointOut(
                    s=row.s, target=row.target, f_hat=row.f_hat, two_se=row.two_se
                )
                for row in report.rows
            ],
            mean=report.mean,
            sd=report.sd,
            wall_time_s=report.wall_time_s,
            samples=report.samples.tolist() if report.samples is not None else None,
        )

    @app.post("/universality", response_model=schemas.UniversalityResponse)
    def universality(request: schemas.UniversalityRequest) -> schemas.UniversalityResponse:
        if len(request.values) != len(request.masses):
            raise DomainError("values and masses must have the same length")
        report = run_universality(
            list(zip(request.values, request.masses)),
            request.p_ladder,
            request.ratio,
            replications=request.replications,
            master_seed=request.master_seed,
            entry_law=request.entry_law,
        )
        return schemas.UniversalityResponse(
            entry_law=report.entry_law,
            replications=report.replications,
            master_seed=report.master_seed,
            rungs=[schemas.UniversalityRungOut(**r._asdict()) for r in report.rungs],
            drift_decreasing=report.drift_decreasing,
            final_within_bound=report.final_within_bound,
            passed=report.passed,
        )

    @app.post("/concentration", response_model=schemas.ConcentrationResponse)
    def concentration(request: schemas.ConcentrationRequest) -> schemas.ConcentrationResponse:
        spec = _model_spec(request.model)
        config = SimConfig(
            n=request.n,
            p=spec.p,
            measure=spec.measure(),
            covariance=spec.covariance(),
            replications=request.replications,
            master_seed=request.master_seed,
        )
        report = run_concentration(config, request.radii)
        return schemas.ConcentrationResponse(
            n=report.n,
            p=report.p,
            replications=report.replications,
            master_seed=report.master_seed,
            median=report.median,
            rows=[schemas.ConcentrationRowOut(**r._asdict()) for r in report.rows],
            passed=report.passed,
        )

    return app


app = create_app()
