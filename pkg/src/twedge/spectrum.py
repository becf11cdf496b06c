"""Population spectral measures and the moment integrals built on them.

A covariance model enters every computation in this package only through its
spectral distribution: a finite list of positive eigenvalue atoms carrying
probability weights. This module provides that representation, the three
model families used throughout (explicit eigenvalue lists, symmetric banded
Toeplitz covariances, equally spaced spectra on an interval), and the moment
integrals of the form

    sum_i w_i * (lam_i * c / (1 - lam_i * c)) ** k

that the edge solver consumes. All values are immutable after construction
and every operation is a pure function, so everything here is safe to share
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.optimize

from .errors import DomainError, PoleError

__all__ = [
    "SpectralMeasure",
    "ToeplitzSpec",
    "IntervalSpec",
    "from_eigenvalues",
    "from_atoms",
    "interval_measure",
    "toeplitz_matrix",
    "toeplitz_eigenvalues",
    "toeplitz_symbol",
    "symbol_range",
    "symbol_flat_spots",
    "symbol_T_integral",
    "edge_moment",
]

# Relative tolerance below which two eigenvalues are treated as one atom.
# Tight enough that merging never moves an integral, loose enough to absorb
# the last-bit splitting a dense eigensolver produces for exact multiplicities.
MERGE_RTOL = 1e-14

# User-supplied atom masses may carry decimal rounding; accept and renormalize
# when they sum to 1 within this tolerance, reject otherwise.
_MASS_SUM_TOL = 1e-8


def _merge_sorted_atoms(values: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge descending-sorted atoms whose eigenvalues agree to MERGE_RTOL.

    Total mass is preserved exactly; the merged eigenvalue is the
    weight-averaged location of the group.
    """
    out_v: list[float] = []
    out_w: list[float] = []
    i = 0
    n = values.size
    while i < n:
        j = i + 1
        while j < n and (values[i] - values[j]) <= MERGE_RTOL * values[i]:
            j += 1
        w = float(weights[i:j].sum())
        if values[i] == values[j - 1]:
            v = float(values[i])  # exact duplicates stay bit-exact
        else:
            v = float(np.dot(values[i:j], weights[i:j]) / w)
        out_v.append(v)
        out_w.append(w)
        i = j
    return np.asarray(out_v), np.asarray(out_w)


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Finite atomic spectral distribution of a population covariance.

    Atoms are stored sorted by eigenvalue, descending; weights are
    probabilities summing to one. ``p`` is the matrix dimension the measure
    summarizes, so a weight w corresponds to roughly ``w * p`` population
    eigenvalues.
    """

    values: np.ndarray
    weights: np.ndarray
    p: int

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if values.ndim != 1 or values.shape != weights.shape or values.size == 0:
            raise DomainError("atoms require matching, nonempty value/weight sequences")
        if not np.all(values > 0.0):
            raise DomainError("all eigenvalues of a covariance must be positive")
        if not np.all(weights > 0.0):
            raise DomainError("all atom weights must be positive")
        if self.p < 1:
            raise DomainError("dimension p must be a positive integer")
        order = np.argsort(-values, kind="stable")
        values, weights = _merge_sorted_atoms(values[order], weights[order])
        total = float(weights.sum())
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"atom weights must sum to 1, got {total!r}")
        values.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "p", int(self.p))

    @property
    def lambda_max(self) -> float:
        return float(self.values[0])

    @property
    def lambda_min(self) -> float:
        return float(self.values[-1])

    @property
    def atoms(self) -> tuple[tuple[float, float], ...]:
        return tuple((float(v), float(w)) for v, w in zip(self.values, self.weights))

    @property
    def top_mass(self) -> float:
        """Weight carried by the largest atom."""
        return float(self.weights[0])

    def eigenvalues(self) -> np.ndarray:
        """Expand the measure back into a descending multiset of size p.

        Requires every ``weight * p`` to be integral (within rounding), i.e.
        the measure must be realizable as the spectrum of a p x p matrix.
        """
        counts = self.weights * self.p
        rounded = np.rint(counts)
        if not np.all(np.abs(counts - rounded) < 1e-6) or int(rounded.sum()) != self.p:
            raise DomainError(
                f"measure is not realizable at dimension p={self.p}: "
                f"atom multiplicities {counts.tolist()} are not integers"
            )
        return np.repeat(self.values, rounded.astype(int))


@dataclass(frozen=True)
class ToeplitzSpec:
    """Symmetric banded Toeplitz covariance: first row (a0, a1, ..., am, 0, ...).

    The band must be shorter than the dimension. The summability weight
    ``sum k*|a_k|`` (trivially finite for a finite band) is recorded for
    documentation of the stationarity condition the model relies on.
    """

    coefficients: tuple[float, ...]
    p: int

    def __post_init__(self):
        coeffs = tuple(float(a) for a in self.coefficients)
        if len(coeffs) == 0:
            raise DomainError("a Toeplitz spec needs at least the diagonal coefficient a0")
        if self.p < 1:
            raise DomainError("dimension p must be a positive integer")
        if len(coeffs) - 1 >= self.p:
            raise DomainError(
                f"band width {len(coeffs) - 1} must be smaller than the dimension p={self.p}"
            )
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "p", int(self.p))

    @property
    def summability_weight(self) -> float:
        return float(sum(k * abs(a) for k, a in enumerate(self.coefficients)))


@dataclass(frozen=True)
class IntervalSpec:
    """p eigenvalues equally spaced on [zeta, xi], endpoints included."""

    zeta: float
    xi: float
    p: int

    def __post_init__(self):
        if not (self.zeta > 0.0):
            raise DomainError("interval lower endpoint zeta must be positive")
        if not np.isfinite(self.xi) or not (self.xi > self.zeta):
            raise DomainError("interval upper endpoint xi must be finite and exceed zeta")
        if self.p < 1:
            raise DomainError("dimension p must be a positive integer")
        object.__setattr__(self, "zeta", float(self.zeta))
        object.__setattr__(self, "xi", float(self.xi))
        object.__setattr__(self, "p", int(self.p))


def from_eigenvalues(eigs: Iterable[float]) -> SpectralMeasure:
    """Empirical spectral measure of an explicit eigenvalue list.

    Weights are uniform 1/p; duplicates are merged with accumulated weight.
    """
    arr = np.asarray(list(eigs), dtype=float)
    if arr.size == 0:
        raise DomainError("at least one eigenvalue is required")
    bad = np.nonzero(~(arr > 0.0))[0]
    if bad.size:
        raise DomainError(
            f"eigenvalue at index {int(bad[0])} is not positive: {arr[bad[0]]!r}"
        )
    p = arr.size
    return SpectralMeasure(arr, np.full(p, 1.0 / p), p)


def from_atoms(atoms: Sequence[tuple[float, float]], p: int) -> SpectralMeasure:
    """Spectral measure from explicit (eigenvalue, mass) pairs.

    Masses must sum to 1 within 1e-8 and are renormalized exactly, so decimal
    input like 0.3/0.7 is accepted verbatim.
    """
    if len(atoms) == 0:
        raise DomainError("at least one atom is required")
    values = np.asarray([a[0] for a in atoms], dtype=float)
    masses = np.asarray([a[1] for a in atoms], dtype=float)
    total = float(masses.sum())
    if abs(total - 1.0) > _MASS_SUM_TOL:
        raise DomainError(f"atom masses must sum to 1 (within {_MASS_SUM_TOL}), got {total!r}")
    return SpectralMeasure(values, masses / total, p)


def interval_measure(spec: IntervalSpec) -> SpectralMeasure:
    """Uniform measure on p equally spaced eigenvalues of [zeta, xi]."""
    return from_eigenvalues(np.linspace(spec.zeta, spec.xi, spec.p))


def toeplitz_matrix(spec: ToeplitzSpec) -> np.ndarray:
    """Dense p x p symmetric banded Toeplitz matrix realizing the band."""
    col = np.zeros(spec.p)
    band = np.asarray(spec.coefficients)
    col[: band.size] = band
    return scipy.linalg.toeplitz(col)


def toeplitz_eigenvalues(spec: ToeplitzSpec) -> SpectralMeasure:
    """Spectral measure of the banded Toeplitz covariance.

    Uses a dense symmetric eigensolver: exactness at finite p is what the
    downstream centering/scaling values require. Raises if the matrix is not
    positive definite.
    """
    eigs = np.linalg.eigvalsh(toeplitz_matrix(spec))
    lam_min = float(eigs[0])
    if lam_min <= 0.0:
        raise DomainError(
            f"Toeplitz covariance is not positive definite: lambda_min = {lam_min!r}"
        )
    return from_eigenvalues(eigs)


def toeplitz_symbol(spec: ToeplitzSpec, omega):
    """Symbol a(w) = a0 + 2 * sum_k a_k cos(k w) of the banded Toeplitz family."""
    omega = np.asarray(omega, dtype=float)
    coeffs = spec.coefficients
    out = np.full_like(omega, coeffs[0], dtype=float)
    for k in range(1, len(coeffs)):
        out = out + 2.0 * coeffs[k] * np.cos(k * omega)
    return float(out) if out.ndim == 0 else out


def _symbol_derivative(spec: ToeplitzSpec, omega):
    omega = np.asarray(omega, dtype=float)
    out = np.zeros_like(omega, dtype=float)
    for k in range(1, len(spec.coefficients)):
        out = out - 2.0 * k * spec.coefficients[k] * np.sin(k * omega)
    return float(out) if out.ndim == 0 else out


def _refine_extremum(spec: ToeplitzSpec, omega0: float, sign: float) -> tuple[float, float]:
    lo = max(0.0, omega0 - 2e-3 * np.pi)
    hi = min(np.pi, omega0 + 2e-3 * np.pi)
    res = scipy.optimize.minimize_scalar(
        lambda w: sign * toeplitz_symbol(spec, w), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-14},
    )
    return float(res.x), float(sign * res.fun)


def symbol_range(spec: ToeplitzSpec, samples: int = 4096) -> tuple[float, float]:
    """(min, max) of the symbol over a period, by dense sampling plus local refinement.

    The symbol is even and 2*pi periodic, so [0, pi] covers its range.
    """
    grid = np.linspace(0.0, np.pi, samples)
    vals = toeplitz_symbol(spec, grid)
    _, smax = _refine_extremum(spec, float(grid[np.argmax(vals)]), -1.0)
    _, smin = _refine_extremum(spec, float(grid[np.argmin(vals)]), +1.0)
    return min(smin, float(vals.min())), max(smax, float(vals.max()))


def symbol_flat_spots(
    spec: ToeplitzSpec, deriv_tol: float = 1e-3, min_width: float = 1e-2, samples: int = 8192
) -> tuple[tuple[float, float], ...]:
    """Intervals of [0, pi] where |a'(w)| stays below deriv_tol.

    A wide flat spot signals that the distribution of the symbol may place an
    atom at the corresponding level, which the limit theory excludes. This is
    a heuristic screen, not a certificate: it reports candidates wider than
    min_width and never proves atom-freeness.
    """
    grid = np.linspace(0.0, np.pi, samples)
    flat = np.abs(_symbol_derivative(spec, grid)) < deriv_tol
    spots: list[tuple[float, float]] = []
    i = 0
    while i < samples:
        if flat[i]:
            j = i
            while j + 1 < samples and flat[j + 1]:
                j += 1
            lo, hi = float(grid[i]), float(grid[j])
            if hi - lo >= min_width:
                spots.append((lo, hi))
            i = j + 1
        else:
            i += 1
    return tuple(spots)


def symbol_T_integral(spec: ToeplitzSpec, x: float) -> float:
    """Quadrature of the squared symbol transform over one period.

        T(x) = integral over (-pi, pi) of (a(u) x / (1 - a(u) x))^2 du

    Defined for 0 <= x < 1 / max a; nondecreasing in x. The integrand peaks
    sharply where the symbol approaches its maximum, so the quadrature is
    anchored at the refined symbol extrema.
    """
    x = float(x)
    if x < 0.0:
        raise DomainError(f"T is defined for x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    grid = np.linspace(0.0, np.pi, 4096)
    vals = toeplitz_symbol(spec, grid)
    omega_max, a_max = _refine_extremum(spec, float(grid[np.argmax(vals)]), -1.0)
    a_max = max(a_max, float(vals.max()))
    margin = 1.0 - a_max * x
    if margin <= 0.0:
        raise PoleError(
            f"x={x!r} is at or beyond the symbol pole 1/max(a)={1.0 / a_max!r} "
            f"(margin {margin!r})",
            margin,
        )

    def integrand(u):
        a = toeplitz_symbol(spec, u)
        t = a * x / (1.0 - a * x)
        return t * t

    interior = [omega_max] if 0.0 < omega_max < np.pi else None
    half, _ = scipy.integrate.quad(
        integrand, 0.0, np.pi, points=interior, limit=400, epsabs=5e-10, epsrel=1e-12
    )
    return 2.0 * half


def edge_moment(H: SpectralMeasure, c: float, k: int) -> float:
    """Moment integral sum_i w_i * (lam_i c / (1 - lam_i c))^k for k in {1, 2, 3}.

    Strictly increasing and strictly convex in c on (0, 1/lambda_max); raises
    PoleError at or beyond the pole, reporting the margin 1 - lambda_max * c.
    """
    if k not in (1, 2, 3):
        raise DomainError(f"moment order k must be 1, 2 or 3, got {k!r}")
    c = float(c)
    if c < 0.0:
        raise DomainError(f"c must be nonnegative, got {c!r}")
    if c == 0.0:
        return 0.0
    margin = 1.0 - H.lambda_max * c
    if margin <= 0.0:
        raise PoleError(
            f"c={c!r} is at or beyond the pole 1/lambda_max={1.0 / H.lambda_max!r} "
            f"(margin {margin!r})",
            margin,
        )
    t = H.values * c / (1.0 - H.values * c)
    return float(np.dot(H.weights, t**k))
