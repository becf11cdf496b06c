"""Model-spec documents: the text format describing a covariance model.

A model spec is a flat key = value document. Blank lines and ``#`` comments
are ignored. The ``kind`` key selects the family, and each kind admits
exactly the keys listed below; anything else is rejected.

    kind = eigenvalues      values = 1, 2, 3.5          [p optional, must
                                                         equal len(values)]
    kind = atoms            values = 10, 1
                            masses = 0.3, 0.7
                            p = 100
    kind = toeplitz         coefficients = 1, 0.2, 0.3
                            p = 50
    kind = interval         zeta = 0.5
                            xi = 2.0
                            p = 64

The same structure is accepted as a mapping (the service request bodies use
it verbatim).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .errors import DomainError
from .spectrum import (
    IntervalSpec,
    SpectralMeasure,
    ToeplitzSpec,
    from_atoms,
    from_eigenvalues,
    interval_measure,
    toeplitz_eigenvalues,
    toeplitz_matrix,
)

__all__ = ["ModelSpec", "parse_model_file", "parse_model_text"]

KINDS = ("eigenvalues", "atoms", "toeplitz", "interval")

_KEYS_BY_KIND = {
    "eigenvalues": {"kind", "values", "p"},
    "atoms": {"kind", "values", "masses", "p"},
    "toeplitz": {"kind", "coefficients", "p"},
    "interval": {"kind", "zeta", "xi", "p"},
}
_REQUIRED_BY_KIND = {
    "eigenvalues": {"values"},
    "atoms": {"values", "masses", "p"},
    "toeplitz": {"coefficients", "p"},
    "interval": {"zeta", "xi", "p"},
}


@dataclass(frozen=True)
class ModelSpec:
    """Validated covariance model description."""

    kind: str
    values: Optional[tuple[float, ...]] = None
    masses: Optional[tuple[float, ...]] = None
    coefficients: Optional[tuple[float, ...]] = None
    zeta: Optional[float] = None
    xi: Optional[float] = None
    p: Optional[int] = None

    @classmethod
    def from_mapping(cls, data: Mapping) -> "ModelSpec":
        kind = data.get("kind")
        if kind not in KINDS:
            raise DomainError(f"model kind must be one of {KINDS}, got {kind!r}")
        provided = {k for k, v in data.items() if v is not None}
        unknown = provided - _KEYS_BY_KIND[kind]
        if unknown:
            raise DomainError(f"unknown keys for kind={kind}: {sorted(unknown)}")
        missing = _REQUIRED_BY_KIND[kind] - provided
        if missing:
            raise DomainError(f"missing keys for kind={kind}: {sorted(missing)}")

        def floats(key):
            raw = data.get(key)
            if raw is None:
                return None
            return tuple(float(v) for v in raw)

        p = data.get("p")
        spec = cls(
            kind=kind,
            values=floats("values"),
            masses=floats("masses"),
            coefficients=floats("coefficients"),
            zeta=None if data.get("zeta") is None else float(data["zeta"]),
            xi=None if data.get("xi") is None else float(data["xi"]),
            p=None if p is None else int(p),
        )
        spec._validate()
        return spec

    def _validate(self) -> None:
        if self.kind == "eigenvalues":
            if self.p is not None and self.p != len(self.values):
                raise DomainError(
                    f"p={self.p} does not match the {len(self.values)} listed eigenvalues"
                )
            object.__setattr__(self, "p", len(self.values))
        elif self.kind == "atoms":
            if len(self.values) != len(self.masses):
                raise DomainError("values and masses must have the same length")
        # Kind-specific numeric validation is delegated to the constructors.
        self.measure()

    def measure(self) -> SpectralMeasure:
        """Spectral measure realizing this model."""
        if self.kind == "eigenvalues":
            return from_eigenvalues(self.values)
        if self.kind == "atoms":
            return from_atoms(list(zip(self.values, self.masses)), self.p)
        if self.kind == "toeplitz":
            return toeplitz_eigenvalues(ToeplitzSpec(self.coefficients, self.p))
        return interval_measure(IntervalSpec(self.zeta, self.xi, self.p))

    def covariance(self) -> Optional[np.ndarray]:
        """Literal covariance matrix, for kinds that carry more than a spectrum."""
        if self.kind == "toeplitz":
            return toeplitz_matrix(ToeplitzSpec(self.coefficients, self.p))
        return None

    def to_mapping(self) -> dict:
        out = {"kind": self.kind}
        for key in ("values", "masses", "coefficients", "zeta", "xi", "p"):
            val = getattr(self, key)
            if val is not None:
                out[key] = list(val) if isinstance(val, tuple) else val
        return out


def parse_model_text(text: str) -> ModelSpec:
    """Parse a model-spec document from its text."""
    data: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in data:
            raise DomainError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise DomainError(f"line {lineno}: empty value for {key!r}")
        data[key] = value

    if "kind" not in data:
        raise DomainError("model spec must declare a kind")
    kind = data["kind"]
    if kind not in KINDS:
        raise DomainError(f"model kind must be one of {KINDS}, got {kind!r}")

    converted: dict = {"kind": kind}
    for key, value in data.items():
        if key == "kind":
            continue
        if key not in _KEYS_BY_KIND.get(kind, set()):
            raise DomainError(f"unknown key {key!r} for kind={kind}")
        try:
            if key in ("values", "masses", "coefficients"):
                parts = value.split(",")
                converted[key] = tuple(float(v.strip()) for v in parts)
            elif key == "p":
                converted[key] = int(value)
            else:
                converted[key] = float(value)
        except ValueError as exc:
            raise DomainError(f"could not parse {key!r} value {value!r}: {exc}") from exc
    return ModelSpec.from_mapping(converted)


def parse_model_file(path) -> ModelSpec:
    """Parse a model-spec document from a file path."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_model_text(handle.read())
