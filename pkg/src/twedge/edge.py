"""Critical point, centering and scaling for the largest sample eigenvalue.

Given a population spectral measure H and the sample shape (n, p), the
rescaled largest eigenvalue of the sample covariance fluctuates, in the
validated regime, around n * mu on the scale sigma * n**(1/3). The three
constants come from one root find and two moment integrals:

    c     : unique root of  sum w * (lam c / (1 - lam c))^2 = n / p
            on (0, 1/lambda_max), which exists because the left side grows
            monotonically and convexly from 0 to infinity;
    mu    = (1/c) * (1 + (p/n) * sum w * lam c / (1 - lam c));
    sigma = cbrt((1/c^3) * (1 + (p/n) * sum w * (lam c / (1 - lam c))^3)).

This module also verifies the stationarity identities satisfied by (c, mu,
sigma), screens a finite model against the assumptions the limit theory
needs, and classifies spiked perturbations against the threshold 1/c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DomainError, SolverError
from .spectrum import SpectralMeasure, edge_moment

__all__ = [
    "EdgeParams",
    "StationarityResiduals",
    "CheckResult",
    "ClassGReport",
    "SpikeAssessment",
    "SpikeReport",
    "solve_c",
    "compute_mu",
    "compute_sigma",
    "solve_edge",
    "stationarity_check",
    "diagnose_class_G",
    "classify_spikes",
]

# Regime labels for spiked perturbations.
SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"

# Relative half-width of the "critical" band around the threshold 1/c.
# Exact criticality is measure-zero; the band makes it reachable from user
# input, wide enough to absorb 6-significant-digit rounding of the threshold.
DEFAULT_CHI_TOL = 1e-5


@dataclass(frozen=True)
class EdgeParams:
    """Solved centering/scaling triple for one (model, n, p) instance."""

    n: int
    p: int
    c: float
    mu: float
    sigma: float
    alpha1: float
    gamma_sq: float

    @property
    def margin(self) -> float:
        """Distance 1 - lambda_max * c of the critical point to its pole."""
        return 1.0 - self.alpha1

    @property
    def spike_threshold(self) -> float:
        """Eigenvalue level 1/c separating small from disruptive spikes."""
        return 1.0 / self.c


class StationarityResiduals(NamedTuple):
    """Relative residuals of the three identities the solved triple satisfies.

    fprime is scaled by mu, fsecond by c**-2, fthird by 2*sigma**3.
    """

    fprime: float
    fsecond: float
    fthird: float


def _moment_equation_derivative(H: SpectralMeasure, c: float) -> float:
    # d/dc of sum w (lam c/(1 - lam c))^2 = sum w 2 lam^2 c / (1 - lam c)^3
    lam = H.values
    return float(np.dot(H.weights, 2.0 * lam**2 * c / (1.0 - lam * c) ** 3))


def solve_c(
    H: SpectralMeasure,
    n: int,
    p: int,
    bracket: Optional[tuple[float, float]] = None,
    rtol: float = 1e-14,
) -> float:
    """Solve the moment equation for the critical point c.

    The root is first bracketed (the equation's left side runs monotonically
    from 0 to infinity on (0, 1/lambda_max), so a bracket always exists),
    bisected to 1e-3 relative width, then polished with bracket-safeguarded
    Newton steps to ``rtol`` relative accuracy. The returned root satisfies
    |moment(c) - n/p| <= 1e-12 * (n/p).
    """
    if n < 1 or p < 1:
        raise DomainError("n and p must be positive integers")
    r = n / p
    pole = 1.0 / H.lambda_max

    def f(c: float) -> float:
        return edge_moment(H, c, 2) - r

    if bracket is not None:
        lo, hi = float(bracket[0]), float(bracket[1])
        if not (0.0 <= lo < hi < pole) or f(lo) > 0.0 or f(hi) < 0.0:
            raise DomainError(f"bracket {bracket!r} does not enclose the root")
    else:
        hi = 0.5 * pole
        for _ in range(200):
            if f(hi) >= 0.0:
                break
            hi = pole - 0.5 * (pole - hi)
        else:  # pragma: no cover - moment blows up at the pole
            raise SolverError("failed to bracket the critical point from above")
        lo = 0.5 * hi
        for _ in range(200):
            if f(lo) < 0.0:
                break
            lo *= 0.5
        else:  # pragma: no cover - moment vanishes at 0
            raise SolverError("failed to bracket the critical point from below")

    # Bisection to a relative bracket width of 1e-3.
    while hi - lo > 1e-3 * lo:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid

    # Safeguarded Newton: monotone convexity keeps the iterates honest, the
    # bracket catches any step that would escape.
    c = 0.5 * (lo + hi)
    for _ in range(100):
        fc = f(c)
        if fc < 0.0:
            lo = c
        else:
            hi = c
        step = fc / _moment_equation_derivative(H, c)
        c_new = c - step
        if not (lo < c_new < hi):
            c_new = 0.5 * (lo + hi)
        done = abs(c_new - c) <= rtol * c
        c = c_new
        if done:
            break

    residual = abs(f(c))
    if residual > 1e-12 * r:  # pragma: no cover - defensive
        raise SolverError(
            f"critical point residual {residual!r} exceeds 1e-12 * n/p after polishing"
        )
    return c


def compute_mu(H: SpectralMeasure, n: int, p: int, c: float) -> float:
    """Centering constant for the solved critical point."""
    return (1.0 / c) * (1.0 + (p / n) * edge_moment(H, c, 1))


def compute_sigma(H: SpectralMeasure, n: int, p: int, c: float) -> float:
    """Scaling constant (cube root of the third moment combination)."""
    sigma_cubed = (1.0 + (p / n) * edge_moment(H, c, 3)) / c**3
    return float(np.cbrt(sigma_cubed))


def solve_edge(H: SpectralMeasure, n: int, p: int) -> EdgeParams:
    """Solve for (c, mu, sigma) and package them with their diagnostics.

    The returned values always satisfy mu > 1/c > lambda_max and, when
    n >= p, c >= 1/(2 lambda_max); violations would indicate a solver bug
    and raise SolverError.
    """
    c = solve_c(H, n, p)
    mu = compute_mu(H, n, p, c)
    sigma = compute_sigma(H, n, p, c)
    params = EdgeParams(
        n=int(n),
        p=int(p),
        c=c,
        mu=mu,
        sigma=sigma,
        alpha1=H.lambda_max * c,
        gamma_sq=n / p,
    )
    if not (0.0 < params.c and params.alpha1 < 1.0):  # pragma: no cover - defensive
        raise SolverError(f"solved c={c!r} escaped (0, 1/lambda_max)")
    if not (params.mu > 1.0 / params.c > H.lambda_max):  # pragma: no cover - defensive
        raise SolverError("centering ordering mu > 1/c > lambda_max violated")
    if n >= p and params.c < 0.5 / H.lambda_max * (1.0 - 1e-12):  # pragma: no cover
        raise SolverError("lower bound c >= 1/(2 lambda_max) violated for n >= p")
    return params


def stationarity_check(
    H: SpectralMeasure, n: int, p: int, params: EdgeParams
) -> StationarityResiduals:
    """Relative residuals of the identities defining (c, mu, sigma).

    With f(z) = -mu (z - q) + log z - (p/n) * sum w log(1 - lam z), the
    solved triple must make f'(c) and f''(c) vanish and f'''(c) equal
    2 sigma^3. All three residuals are expected at or below 1e-9.
    """
    lam = H.values
    w = H.weights
    c, mu, sigma = params.c, params.mu, params.sigma
    ratio = p / n
    fprime = -mu + 1.0 / c + ratio * float(np.dot(w, lam / (1.0 - lam * c)))
    fsecond = -1.0 / c**2 + ratio * float(np.dot(w, (lam / (1.0 - lam * c)) ** 2))
    fthird = 2.0 / c**3 + ratio * float(np.dot(w, 2.0 * lam**3 / (1.0 - lam * c) ** 3))
    return StationarityResiduals(
        fprime=abs(fprime) / mu,
        fsecond=abs(fsecond) * c**2,
        fthird=abs(fthird - 2.0 * sigma**3) / (2.0 * sigma**3),
    )


class CheckResult(NamedTuple):
    name: str
    passed: bool
    value: float
    threshold: Optional[float]


@dataclass(frozen=True)
class ClassGReport:
    """Finite-sample screen of the assumptions behind the limit theory.

    The theory's conditions are asymptotic statements about model sequences;
    at a single (n, p) the report exposes the measured quantities against
    user thresholds instead of pretending to certify a limit. It records
    failures, it never raises.
    """

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
    checks: tuple[CheckResult, ...]
    passed: bool
    edge: EdgeParams


def diagnose_class_G(
    H: SpectralMeasure,
    n: int,
    p: int,
    margin_min: float = 0.02,
    lambda1_max: Optional[float] = None,
    lambdap_min: Optional[float] = None,
    solver_tol: float = 1e-10,
) -> ClassGReport:
    """Evaluate the applicability checks for one finite (model, n, p) triple.

    Checks, each reported with its measured value:

    * aspect_ratio     : n/p >= 1;
    * lambda1_bounded  : lambda_max <= lambda1_max (informational when no
      threshold is given; boundedness is an asymptotic property);
    * lambdap_above    : lambda_min >= lambdap_min (same caveat);
    * edge_margin      : 1 - lambda_max * c >= margin_min;
    * atom_mass_bound  : with nu the mass of the top atom and gamma^2 = n/p,
      the analytic bound alpha1 <= gamma / (gamma + sqrt(nu)) must hold up
      to solver tolerance. The slack of this bound is the sharp quantity
      when the leading eigenvalue carries a small mass.
    """
    params = solve_edge(H, n, p)
    gamma = math.sqrt(n / p)
    nu = H.top_mass
    bound = gamma / (gamma + math.sqrt(nu))
    margin = params.margin
    checks = (
        CheckResult("aspect_ratio", n / p >= 1.0, n / p, 1.0),
        CheckResult(
            "lambda1_bounded",
            True if lambda1_max is None else H.lambda_max <= lambda1_max,
            H.lambda_max,
            lambda1_max,
        ),
        CheckResult(
            "lambdap_above",
            True if lambdap_min is None else H.lambda_min >= lambdap_min,
            H.lambda_min,
            lambdap_min,
        ),
        CheckResult("edge_margin", margin >= margin_min, margin, margin_min),
        CheckResult("atom_mass_bound", params.alpha1 <= bound + solver_tol, params.alpha1, bound),
    )
    return ClassGReport(
        n=int(n),
        p=int(p),
        gamma_sq=n / p,
        lambda1=H.lambda_max,
        lambda_p=H.lambda_min,
        alpha1=params.alpha1,
        alpha1_margin=margin,
        atom_mass=nu,
        atom_bound=bound,
        atom_bound_slack=bound - params.alpha1,
        checks=checks,
        passed=all(chk.passed for chk in checks),
        edge=params,
    )


class SpikeAssessment(NamedTuple):
    value: float
    regime: str
    rel_distance: float


@dataclass(frozen=True)
class SpikeReport:
    """Classification of added leading eigenvalues against the 1/c threshold.

    Subcritical and critical spikes keep the enlarged model inside the
    validated regime; supercritical spikes fall outside it, so no centering
    or scaling is claimed for them. ``c_tilde`` is the critical point of the
    enlarged measure and always sits strictly below the base ``c``.
    """

    n: int
    p: int
    k: int
    chi_tol: float
    threshold: float
    c_base: float
    c_tilde: Optional[float]
    k_critical: int
    spikes: tuple[SpikeAssessment, ...]

    @property
    def has_supercritical(self) -> bool:
        return any(s.regime == SUPERCRITICAL for s in self.spikes)


def classify_spikes(
    H_base: SpectralMeasure,
    n: int,
    p: int,
    spikes: Sequence[float],
    chi_tol: float = DEFAULT_CHI_TOL,
) -> SpikeReport:
    """Classify spike eigenvalues added on top of a base model.

    Each spike must be at least lambda_max of the base. A spike below
    threshold * (1 - chi_tol) is subcritical, within the band is critical,
    above it is supercritical (outside the validated regime: classified and
    flagged, never assigned a limit law).
    """
    if chi_tol <= 0.0 or chi_tol >= 1.0:
        raise DomainError(f"chi_tol must lie in (0, 1), got {chi_tol!r}")
    values = [float(s) for s in spikes]
    for i, s in enumerate(values):
        if s < H_base.lambda_max:
            raise DomainError(
                f"spike at index {i} ({s!r}) is below the base lambda_max "
                f"{H_base.lambda_max!r}"
            )
    c_base = solve_c(H_base, n, p)
    threshold = 1.0 / c_base
    assessments = []
    k_critical = 0
    for s in values:
        rel = (s - threshold) / threshold
        if rel < -chi_tol:
            regime = SUBCRITICAL
        elif rel <= chi_tol:
            regime = CRITICAL
            k_critical += 1
        else:
            regime = SUPERCRITICAL
        assessments.append(SpikeAssessment(value=s, regime=regime, rel_distance=rel))

    k = len(values)
    c_tilde = None
    if k:
        scale = p / (p + k)
        enlarged = SpectralMeasure(
            np.concatenate([H_base.values, np.asarray(values)]),
            np.concatenate([H_base.weights * scale, np.full(k, 1.0 / (p + k))]),
            p + k,
        )
        c_tilde = solve_c(enlarged, n, p + k)
        if not c_tilde < c_base:  # pragma: no cover - defensive
            raise SolverError("enlarged critical point failed to contract below the base c")

    return SpikeReport(
        n=int(n),
        p=int(p),
        k=k,
        chi_tol=chi_tol,
        threshold=threshold,
        c_base=c_base,
        c_tilde=c_tilde,
        k_critical=k_critical,
        spikes=tuple(assessments),
    )
