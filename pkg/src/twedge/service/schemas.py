"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field


class EigenvaluesModel(BaseModel):
    kind: Literal["eigenvalues"]
    values: list[float] = Field(min_length=1)
    p: Optional[int] = None


class AtomsModel(BaseModel):
    kind: Literal["atoms"]
    values: list[float] = Field(min_length=1)
    masses: list[float] = Field(min_length=1)
    p: int = Field(ge=1)


class ToeplitzModel(BaseModel):
    kind: Literal["toeplitz"]
    coefficients: list[float] = Field(min_length=1)
    p: int = Field(ge=1)


class IntervalModel(BaseModel):
    kind: Literal["interval"]
    zeta: float
    xi: float
    p: int = Field(ge=1)


ModelIn = Annotated[
    Union[EigenvaluesModel, AtomsModel, ToeplitzModel, IntervalModel],
    Field(discriminator="kind"),
]


class SolveRequest(BaseModel):
    model: ModelIn
    n: int = Field(ge=1)


class Residuals(BaseModel):
    fprime: float
    fsecond: float
    fthird: float


class SolveResponse(BaseModel):
    n: int
    p: int
    c: float
    mu: float
    sigma: float
    alpha1: float
    gamma_sq: float
    margin: float
    lambda1: float
    lambda_p: float
    spike_threshold: float
    residuals: Residuals


class DiagnoseThresholds(BaseModel):
    margin_min: float = 0.02
    lambda1_max: Optional[float] = None
    lambdap_min: Optional[float] = None


class DiagnoseRequest(BaseModel):
    model: ModelIn
    n: int = Field(ge=1)
    thresholds: DiagnoseThresholds = DiagnoseThresholds()


class CheckOut(BaseModel):
    name: str
    passed: bool
    value: float
    threshold: Optional[float]


class DiagnoseResponse(BaseModel):
    n: int
    p: int
    gamma_sq: float
    lambda1: float
    lambda_p: float
    alpha1: float
    alpha1_margin: float
    atom_mass: float
    atom_bound: float
    atom_bound_slack: float
    checks: list[CheckOut]
    passed: bool
    symbol_flat_spots: Optional[list[tuple[float, float]]] = None


class SpikeRequest(BaseModel):
    model: ModelIn
    n: int = Field(ge=1)
    spikes: list[float] = Field(min_length=1)
    chi_tol: float = Field(default=1e-5, gt=0.0, lt=1.0)


class SpikeOut(BaseModel):
    value: float
    regime: Literal["subcritical", "critical", "supercritical"]
    rel_distance: float


class SpikeResponse(BaseModel):
    n: int
    p: int
    k: int
    chi_tol: float
    threshold: float
    c_base: float
    c_tilde: Optional[float]
    k_critical: int
    spikes: list[SpikeOut]
    warning: Optional[str] = None


class TwCdfRequest(BaseModel):
    s: Union[float, list[float]]


class TwQuantileRequest(BaseModel):
    prob: Union[float, list[float]]


class TwValuesResponse(BaseModel):
    values: list[float]


class TwTableRow(BaseModel):
    s: float
    target: float
    F0: float


class TwTableResponse(BaseModel):
    rows: list[TwTableRow]


class TwGridRow(BaseModel):
    x: float
    q: float
    F0: float


class TwGridResponse(BaseModel):
    rows: list[TwGridRow]


class SimulateRequest(BaseModel):
    model: ModelIn
    n: int = Field(ge=1)
    replications: int = Field(default=10_000, ge=1)
    master_seed: int = Field(default=20070663, ge=0, lt=2**64)
    entry_law: Literal["complex-gaussian", "real-gaussian", "scaled-rademacher"] = (
        "complex-gaussian"
    )
    top_k: int = Field(default=1, ge=1)
    quantile_grid: Optional[list[tuple[float, float]]] = None
    keep_samples: bool = False
    workers: int = Field(default=1, ge=1)


class GridPointOut(BaseModel):
    s: float
    target: float
    f_hat: float
    two_se: float


class SimulateResponse(BaseModel):
    n: int
    p: int
    replications: int
    master_seed: int
    entry_law: str
    top_k: int
    edge: SolveResponse
    rows: list[GridPointOut]
    mean: float
    sd: float
    wall_time_s: float
    samples: Optional[list[list[float]]] = None


class UniversalityRequest(BaseModel):
    values: list[float] = Field(min_length=1)
    masses: list[float] = Field(min_length=1)
    p_ladder: list[int] = Field(min_length=2)
    ratio: float = Field(gt=0.0)
    replications: int = Field(default=2000, ge=1)
    master_seed: int = Field(default=20070663, ge=0, lt=2**64)
    entry_law: Literal["complex-gaussian", "real-gaussian", "scaled-rademacher"] = (
        "scaled-rademacher"
    )


class UniversalityRungOut(BaseModel):
    n: int
    p: int
    mu: float
    sigma: float
    mean_l1_over_n: float
    drift: float
    bound: float


class UniversalityResponse(BaseModel):
    entry_law: str
    replications: int
    master_seed: int
    rungs: list[UniversalityRungOut]
    drift_decreasing: bool
    final_within_bound: bool
    passed: bool


class ConcentrationRequest(BaseModel):
    model: ModelIn
    n: int = Field(ge=1)
    radii: list[float] = Field(min_length=1)
    replications: int = Field(default=2000, ge=1000)
    master_seed: int = Field(default=20070663, ge=0, lt=2**64)


class ConcentrationRowOut(BaseModel):
    radius: float
    empirical: float
    bound: float
    se: float
    passed: bool


class ConcentrationResponse(BaseModel):
    n: int
    p: int
    replications: int
    master_seed: int
    median: float
    rows: list[ConcentrationRowOut]
    passed: bool


class HealthResponse(BaseModel):
    status: str
    version: str
