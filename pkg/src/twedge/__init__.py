"""Centering and scaling for the largest eigenvalue of complex sample
covariance matrices: critical-point solver, limiting distribution,
applicability diagnostics, spike classification and a seeded Monte Carlo
harness."""

__version__ = "0.1.0"

from .edge import (
    EdgeParams,
    classify_spikes,
    compute_mu,
    compute_sigma,
    diagnose_class_G,
    solve_c,
    solve_edge,
    stationarity_check,
)
from .errors import DomainError, PoleError, SolverError, TwedgeError
from .modelspec import ModelSpec, parse_model_file, parse_model_text
from .sim import (
    SimConfig,
    SimReport,
    run_concentration,
    run_edge_monte_carlo,
    run_universality,
    sample_data_matrix,
    sqrt_covariance,
    top_eigenvalues,
)
from .spectrum import (
    IntervalSpec,
    SpectralMeasure,
    ToeplitzSpec,
    edge_moment,
    from_atoms,
    from_eigenvalues,
    interval_measure,
    symbol_T_integral,
    toeplitz_eigenvalues,
    toeplitz_symbol,
)
from .tw import (
    REFERENCE_QUANTILE_GRID,
    TWDistribution,
    build_tw_distribution,
    default_distribution,
    tw_cdf,
    tw_quantile,
)

__all__ = [
    "__version__",
    "DomainError",
    "PoleError",
    "SolverError",
    "TwedgeError",
    "SpectralMeasure",
    "ToeplitzSpec",
    "IntervalSpec",
    "from_eigenvalues",
    "from_atoms",
    "interval_measure",
    "toeplitz_eigenvalues",
    "toeplitz_symbol",
    "symbol_T_integral",
    "edge_moment",
    "EdgeParams",
    "solve_c",
    "compute_mu",
    "compute_sigma",
    "solve_edge",
    "stationarity_check",
    "diagnose_class_G",
    "classify_spikes",
    "TWDistribution",
    "build_tw_distribution",
    "default_distribution",
    "tw_cdf",
    "tw_quantile",
    "REFERENCE_QUANTILE_GRID",
    "SimConfig",
    "SimReport",
    "sqrt_covariance",
    "sample_data_matrix",
    "top_eigenvalues",
    "run_edge_monte_carlo",
    "run_universality",
    "run_concentration",
    "ModelSpec",
    "parse_model_file",
    "parse_model_text",
]
