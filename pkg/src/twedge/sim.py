"""Seeded Monte Carlo experiments on complex sample covariance matrices.

Data matrices are n x p with i.i.d. rows drawn from a centered complex
normal with the model covariance (or, for the universality experiment,
standardized non-Gaussian entries times the covariance square root). Each
replication owns a counter-derived random stream, so a run is bit-identical
for a given (master_seed, replications) no matter how replications are
scheduled across threads.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .edge import EdgeParams, solve_edge
from .errors import DomainError, SolverError
from .spectrum import SpectralMeasure, from_atoms
from .tw import REFERENCE_QUANTILE_GRID

__all__ = [
    "ENTRY_LAWS",
    "SimConfig",
    "GridPoint",
    "SimReport",
    "UniversalityRung",
    "UniversalityReport",
    "ConcentrationPoint",
    "ConcentrationReport",
    "replication_rng",
    "sqrt_covariance",
    "sample_data_matrix",
    "top_eigenvalues",
    "run_edge_monte_carlo",
    "run_universality",
    "run_concentration",
]

ENTRY_LAWS = ("complex-gaussian", "real-gaussian", "scaled-rademacher")

# Frequency of the trace-identity spot check inside a replication loop.
_TRACE_CHECK_EVERY = 1000


def replication_rng(master_seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent counter-based generator for one replication.

    The stream is derived from (master_seed, stream, index) alone, so results
    never depend on scheduling or on how many replications run in parallel.
    """
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(seq))


def sqrt_covariance(model) -> np.ndarray:
    """Hermitian positive square root of a covariance model.

    Spectral models map to diag(sqrt(lambda)): the eigenvalue law of the
    sample covariance depends on the population covariance only through its
    spectrum. An explicit matrix (the Toeplitz case keeps its literal form)
    is factored by symmetric eigendecomposition.
    """
    if isinstance(model, SpectralMeasure):
        return np.diag(np.sqrt(model.eigenvalues()))
    mat = np.asarray(model)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError("covariance must be a square matrix or a SpectralMeasure")
    herm = (mat + mat.conj().T) / 2.0
    if not np.allclose(mat, herm, rtol=1e-12, atol=1e-12):
        raise DomainError("covariance matrix must be Hermitian")
    w, v = np.linalg.eigh(herm)
    if w[0] <= 0.0:
        raise DomainError(f"covariance is not positive definite: lambda_min = {float(w[0])!r}")
    root = (v * np.sqrt(w)) @ v.conj().T
    return (root + root.conj().T) / 2.0


def sample_data_matrix(
    n: int, p: int, root: np.ndarray, rng: np.random.Generator, entry_law: str = "complex-gaussian"
) -> np.ndarray:
    """One n x p data matrix with row covariance root @ root^*.

    complex-gaussian draws standard complex normal entries (unit total
    variance split evenly between real and imaginary parts); real-gaussian
    and scaled-rademacher draw standardized real entries for the
    law-insensitivity experiments.
    """
    if entry_law == "complex-gaussian":
        z = rng.standard_normal((2, n, p))
        g = (z[0] + 1j * z[1]) * np.sqrt(0.5)
    elif entry_law == "real-gaussian":
        g = rng.standard_normal((n, p))
    elif entry_law == "scaled-rademacher":
        g = rng.integers(0, 2, size=(n, p)).astype(float) * 2.0 - 1.0
    else:
        raise DomainError(f"unknown entry law {entry_law!r}; expected one of {ENTRY_LAWS}")
    return g @ root


def top_eigenvalues(X: np.ndarray, k: int = 1) -> np.ndarray:
    """k largest eigenvalues of X^* X, descending."""
    p = X.shape[1]
    if not 1 <= k <= p:
        raise DomainError(f"k must lie in [1, {p}], got {k!r}")
    gram = X.conj().T @ X
    gram = (gram + gram.conj().T) / 2.0
    w = np.linalg.eigvalsh(gram)
    return w[::-1][:k].copy()


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Parameters of one Monte Carlo run."""

    n: int
    p: int
    measure: SpectralMeasure
    covariance: Optional[np.ndarray] = None
    replications: int = 10_000
    master_seed: int = 20070663
    quantile_grid: tuple[tuple[float, float], ...] = REFERENCE_QUANTILE_GRID
    entry_law: str = "complex-gaussian"
    top_k: int = 1
    keep_samples: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise DomainError("n and p must be positive")
        if self.replications < 1:
            raise DomainError("at least one replication is required")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must fit in 64 unsigned bits")
        if self.entry_law not in ENTRY_LAWS:
            raise DomainError(f"unknown entry law {self.entry_law!r}; expected one of {ENTRY_LAWS}")
        if not 1 <= self.top_k <= self.p:
            raise DomainError("top_k must lie in [1, p]")
        if self.workers < 1:
            raise DomainError("workers must be positive")
        svals = [s for s, _ in self.quantile_grid]
        if any(b <= a for a, b in zip(svals, svals[1:])):
            raise DomainError("quantile grid s-values must be strictly increasing")
        if self.covariance is not None:
            cov = np.asarray(self.covariance)
            if cov.shape != (self.p, self.p):
                raise DomainError("explicit covariance must be p x p")
            object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "quantile_grid", tuple(tuple(q) for q in self.quantile_grid))


class GridPoint(NamedTuple):
    s: float
    target: float
    f_hat: float
    two_se: float


@dataclass(frozen=True, eq=False)
class SimReport:
    """Empirical distribution of the rescaled largest eigenvalue."""

    n: int
    p: int
    replications: int
    master_seed: int
    entry_law: str
    top_k: int
    edge: EdgeParams
    rows: tuple[GridPoint, ...]
    mean: float
    sd: float
    wall_time_s: float
    samples: Optional[np.ndarray] = None

    def to_csv(self, target) -> None:
        """CSV with fixed column order s,target,F_hat,two_se."""
        import csv

        own = isinstance(target, (str, bytes)) or hasattr(target, "__fspath__")
        handle = open(target, "w", newline="") if own else target
        try:
            writer = csv.writer(handle)
            writer.writerow(["s", "target", "F_hat", "two_se"])
            for row in self.rows:
                writer.writerow(
                    [f"{row.s:.10g}", f"{row.target:.10g}", f"{row.f_hat:.10g}", f"{row.two_se:.10g}"]
                )
        finally:
            if own:
                handle.close()


def _collect_top_samples(config: SimConfig, stream: int = 0) -> np.ndarray:
    """Raw top-k eigenvalue samples, shape (replications, top_k)."""
    root = sqrt_covariance(config.covariance if config.covariance is not None else config.measure)
    out = np.empty((config.replications, config.top_k))

    def one(r: int) -> None:
        rng = replication_rng(config.master_seed, r, stream=stream)
        X = sample_data_matrix(config.n, config.p, root, rng, config.entry_law)
        if r % _TRACE_CHECK_EVERY == 0:
            gram = X.conj().T @ X
            total = float(np.trace((gram + gram.conj().T).real) / 2.0)
            fro = float(np.linalg.norm(X) ** 2)
            if abs(total - fro) > 1e-10 * max(fro, 1.0):
                raise SolverError("eigenvalue/trace identity violated in sampling")
        out[r] = top_eigenvalues(X, config.top_k)

    if config.workers == 1:
        for r in range(config.replications):
            one(r)
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            list(pool.map(one, range(config.replications)))
    return out


def _empirical_rows(
    t: np.ndarray, grid: Sequence[tuple[float, float]], replications: int
) -> tuple[GridPoint, ...]:
    sorted_t = np.sort(t)
    rows = []
    for s, target in grid:
        f_hat = float(np.searchsorted(sorted_t, s, side="right")) / replications
        two_se = 2.0 * float(np.sqrt(f_hat * (1.0 - f_hat) / replications))
        rows.append(GridPoint(s=float(s), target=float(target), f_hat=f_hat, two_se=two_se))
    return tuple(rows)


def run_edge_monte_carlo(config: SimConfig) -> SimReport:
    """Empirical law of (l1 - n*mu) / (sigma * n^(1/3)) over seeded replications."""
    started = time.perf_counter()
    params = solve_edge(config.measure, config.n, config.p)
    raw = _collect_top_samples(config)
    scale = params.sigma * config.n ** (1.0 / 3.0)
    rescaled = (raw - config.n * params.mu) / scale
    t = rescaled[:, 0]
    rows = _empirical_rows(t, config.quantile_grid, config.replications)
    return SimReport(
        n=config.n,
        p=config.p,
        replications=config.replications,
        master_seed=config.master_seed,
        entry_law=config.entry_law,
        top_k=config.top_k,
        edge=params,
        rows=rows,
        mean=float(t.mean()),
        sd=float(t.std(ddof=1)) if t.size > 1 else 0.0,
        wall_time_s=time.perf_counter() - started,
        samples=rescaled if config.keep_samples else None,
    )


class UniversalityRung(NamedTuple):
    n: int
    p: int
    mu: float
    sigma: float
    mean_l1_over_n: float
    drift: float
    bound: float


@dataclass(frozen=True)
class UniversalityReport:
    """Law-insensitivity experiment: drift of l1/n toward mu along a ladder."""

    entry_law: str
    replications: int
    master_seed: int
    rungs: tuple[UniversalityRung, ...]
    drift_decreasing: bool
    final_within_bound: bool

    @property
    def passed(self) -> bool:
        return self.drift_decreasing and self.final_within_bound


def run_universality(
    atoms: Sequence[tuple[float, float]],
    p_ladder: Sequence[int],
    ratio: float,
    replications: int = 2000,
    master_seed: int = 20070663,
    entry_law: str = "scaled-rademacher",
    workers: int = 1,
) -> UniversalityReport:
    """Drift |mean(l1/n) - mu| along a ladder of growing p at fixed n/p and H.

    Passes when the drift decreases along the ladder and the final drift is
    below 5 * sigma * n^(-2/3).
    """
    if len(p_ladder) < 2:
        raise DomainError("the ladder needs at least two rungs")
    rungs = []
    for i, p in enumerate(p_ladder):
        n_exact = ratio * p
        n = int(round(n_exact))
        if abs(n_exact - n) > 1e-9:
            raise DomainError(f"ratio {ratio!r} does not give an integer n at p={p}")
        measure = from_atoms(list(atoms), p)
        config = SimConfig(
            n=n,
            p=p,
            measure=measure,
            replications=replications,
            master_seed=master_seed,
            entry_law=entry_law,
            workers=workers,
        )
        params = solve_edge(measure, n, p)
        raw = _collect_top_samples(config, stream=i + 1)
        mean_ratio = float(raw[:, 0].mean()) / n
        drift = abs(mean_ratio - params.mu)
        bound = 5.0 * params.sigma * n ** (-2.0 / 3.0)
        rungs.append(
            UniversalityRung(
                n=n, p=p, mu=params.mu, sigma=params.sigma,
                mean_l1_over_n=mean_ratio, drift=drift, bound=bound,
            )
        )
    drifts = [r.drift for r in rungs]
    return UniversalityReport(
        entry_law=entry_law,
        replications=replications,
        master_seed=master_seed,
        rungs=tuple(rungs),
        drift_decreasing=all(b < a for a, b in zip(drifts, drifts[1:])),
        final_within_bound=rungs[-1].drift < rungs[-1].bound,
    )


class ConcentrationPoint(NamedTuple):
    radius: float
    empirical: float
    bound: float
    se: float
    passed: bool


@dataclass(frozen=True)
class ConcentrationReport:
    """Exceedance of |sqrt(l1/n) - median| against the Gaussian tail bound."""

    n: int
    p: int
    replications: int
    master_seed: int
    median: float
    rows: tuple[ConcentrationPoint, ...]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)


def run_concentration(config: SimConfig, radii: Sequence[float]) -> ConcentrationReport:
    """Compare empirical tail frequencies of s1 = sqrt(l1/n) with the bound
    2 exp(-n r^2 / lambda_max), allowing 3 standard errors of slack.

    The reference point is the empirical median across replications (the
    population median is not available); the SE slack absorbs that
    substitution.
    """
    if config.replications < 1000:
        raise DomainError("concentration estimates need at least 1000 replications")
    if len(radii) == 0 or any(r < 0 for r in radii):
        raise DomainError("radii must be a nonempty list of nonnegative reals")
    raw = _collect_top_samples(config)
    s1 = np.sqrt(raw[:, 0] / config.n)
    med = float(np.median(s1))
    lam1 = config.measure.lambda_max
    rows = []
    for r in radii:
        emp = float(np.mean(np.abs(s1 - med) > r))
        bound = 2.0 * float(np.exp(-config.n * r * r / lam1))
        se = float(np.sqrt(emp * (1.0 - emp) / config.replications))
        rows.append(
            ConcentrationPoint(
                radius=float(r), empirical=emp, bound=bound, se=se,
                passed=emp <= bound + 3.0 * se,
            )
        )
    return ConcentrationReport(
        n=config.n,
        p=config.p,
        replications=config.replications,
        master_seed=config.master_seed,
        median=med,
        rows=tuple(rows),
    )
