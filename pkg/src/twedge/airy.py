"""Airy function Ai and its derivative, by power series and asymptotics.

The right tail of the distribution machinery is anchored at Ai, so the
function is provided here to 1e-10 absolute accuracy on [-15, 15] without
reaching for a special-function library. Two Maclaurin series (the even and
odd solutions of w'' = x w) cover -7.5 <= x <= 5; beyond, the standard
large-|x| expansions take over. The crossovers are asymmetric because the
error sources are: series cancellation grows like exp(|x|^1.5) against a
function that is O(1) on the left but exponentially small on the right, so
the expansion wins absolutely from x = 5 up, while on the left its
divergence floor only drops below the series noise near -7.5.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = ["airy_ai", "airy_ai_prime", "AIRY_DOMAIN"]

AIRY_DOMAIN = 15.0
_SERIES_LEFT = -7.5
_SERIES_RIGHT = 5.0
_MAX_TERMS = 200

_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)  # Ai(0)
_AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)  # Ai'(0)


def _series_pair(x: float) -> tuple[float, float]:
    """Values (f, g) of the two Maclaurin solutions of w'' = x w at x."""
    x3 = x * x * x
    f_term, g_term = 1.0, x
    f_sum, g_sum = f_term, g_term
    for k in range(_MAX_TERMS):
        f_term *= x3 / ((3 * k + 2) * (3 * k + 3))
        g_term *= x3 / ((3 * k + 3) * (3 * k + 4))
        f_sum += f_term
        g_sum += g_term
        if abs(f_term) < 1e-18 * (1.0 + abs(f_sum)) and abs(g_term) < 1e-18 * (1.0 + abs(g_sum)):
            break
    return f_sum, g_sum


def _series_pair_prime(x: float) -> tuple[float, float]:
    """Derivatives (f', g') of the two Maclaurin solutions at x."""
    if x == 0.0:
        return 0.0, 1.0
    x3 = x * x * x
    fp_term = 0.5 * x * x  # d/dx of x^3/6
    gp_term = 1.0
    fp_sum, gp_sum = fp_term, gp_term
    for k in range(_MAX_TERMS):
        fp_term *= x3 / ((3 * k + 3) * (3 * k + 5))
        gp_term *= x3 / ((3 * k + 1) * (3 * k + 3))
        fp_sum += fp_term
        gp_sum += gp_term
        if abs(fp_term) < 1e-18 * (1.0 + abs(fp_sum)) and abs(gp_term) < 1e-18 * (1.0 + abs(gp_sum)):
            break
    return fp_sum, gp_sum


def _asymptotic_terms(zeta: float, derivative: bool) -> list[float]:
    """Terms w_k * u_k / zeta^k of the large-|x| expansion, sign-free in zeta.

    u_0 = 1 with the classical three-factor ratio; the derivative variant
    reweights term k >= 1 by (6k+1)/(1-6k). The list stops at the smallest
    magnitude, the optimal truncation point of the divergent series.
    """
    terms: list[float] = []
    t = 1.0  # u_k / zeta^k
    prev = math.inf
    for k in range(60):
        if t >= prev:
            break
        prev = t
        weight = (6 * k + 1) / (1.0 - 6 * k) if (derivative and k > 0) else 1.0
        terms.append(weight * t)
        if t < 1e-18:
            break
        t *= (3 * k + 2.5) * (3 * k + 1.5) * (3 * k + 0.5) / (54.0 * (k + 1) * (k + 0.5) * zeta)
    return terms


def _ai_asymptotic(x: float, derivative: bool) -> float:
    ax = abs(x)
    zeta = (2.0 / 3.0) * ax**1.5
    terms = _asymptotic_terms(zeta, derivative)
    if x > 0.0:
        total = sum((-1.0) ** k * t for k, t in enumerate(terms))
        if derivative:
            return -(ax**0.25) * math.exp(-zeta) / (2.0 * math.sqrt(math.pi)) * total
        return math.exp(-zeta) / (2.0 * math.sqrt(math.pi) * ax**0.25) * total
    # Oscillatory side: even-index terms ride one trig factor, odd the other.
    even = sum((-1.0) ** j * t for j, t in enumerate(terms[0::2]))
    odd = sum((-1.0) ** j * t for j, t in enumerate(terms[1::2]))
    angle = zeta + 0.25 * math.pi
    if derivative:
        return -(ax**0.25) / math.sqrt(math.pi) * (math.cos(angle) * even + math.sin(angle) * odd)
    return (math.sin(angle) * even - math.cos(angle) * odd) / (math.sqrt(math.pi) * ax**0.25)


def _ai_scalar(x: float) -> float:
    if _SERIES_LEFT <= x <= _SERIES_RIGHT:
        f, g = _series_pair(x)
        return _AI0 * f + _AIP0 * g
    return _ai_asymptotic(x, derivative=False)


def _ai_prime_scalar(x: float) -> float:
    if _SERIES_LEFT <= x <= _SERIES_RIGHT:
        fp, gp = _series_pair_prime(x)
        return _AI0 * fp + _AIP0 * gp
    return _ai_asymptotic(x, derivative=True)


def _evaluate(x, scalar_fn):
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > AIRY_DOMAIN):
        raise DomainError(f"Airy evaluation restricted to [-{AIRY_DOMAIN}, {AIRY_DOMAIN}]")
    if arr.ndim == 0:
        return scalar_fn(float(arr))
    out = np.array([scalar_fn(float(v)) for v in arr.ravel()])
    return out.reshape(arr.shape)


def airy_ai(x):
    """Ai(x) for scalar or array x in [-15, 15], to 1e-10 absolute accuracy."""
    return _evaluate(x, _ai_scalar)


def airy_ai_prime(x):
    """Ai'(x) for scalar or array x in [-15, 15]."""
    return _evaluate(x, _ai_prime_scalar)
