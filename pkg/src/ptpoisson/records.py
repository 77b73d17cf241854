"""Plain data carriers shared across modules, with their file formats."""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True)
class SampledFunction:
    """Values on a strictly increasing 1-D grid; zero outside the grid span."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if grid.size > 1 and np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, f, grid) -> "SampledFunction":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, f(grid))

    def to_csv(self, header: str = "coordinate,value") -> str:
        buf = io.StringIO()
        buf.write(header + "\n")
        for x, v in zip(self.grid, self.values):
            buf.write(f"{float(x)!r},{float(v)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampledFunction":
        rows = [ln for ln in text.strip().splitlines()[1:] if ln.strip()]
        if not rows:
            return cls(np.empty(0), np.empty(0))
        data = np.array([[float(c) for c in ln.split(",")[:2]] for ln in rows])
        return cls(data[:, 0], data[:, 1])


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre / Simpson settings.

    ``truncation`` is the upper integration limit used for semi-infinite
    integrals (0 means: choose from the decay rate).
    """

    truncation: float = 0.0
    panels: int = 400
    nodes_per_panel: int = 8
    tail_tolerance: float = 1e-14

    def __post_init__(self):
        if self.panels < 1 or self.nodes_per_panel < 1:
            raise ValueError("panels and nodes_per_panel must be positive")
        if self.truncation < 0 or self.tail_tolerance <= 0:
            raise ValueError("truncation must be >= 0 and tail_tolerance > 0")


@dataclass
class ResidualReport:
    """Residual norms produced by the verification routines.

    ``residuals`` holds the named norms; ``meta`` carries identifying
    parameters.  ``to_dict`` flattens both, plus ``empirical_order`` when
    one was measured.
    """

    residuals: dict[str, float]
    empirical_order: float | None = None
    meta: dict[str, Any] = field(default_factory=dict)
    history: list[dict[str, float]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __getitem__(self, key: str) -> float:
        return self.residuals[key]

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {k: float(v) for k, v in self.residuals.items()}
        if self.empirical_order is not None:
            out["empirical_order"] = float(self.empirical_order)
        out.update(self.meta)
        if self.history:
            out["history"] = self.history
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def empirical_order(errors, ratio: float = 2.0) -> float:
    """Smallest observed order log_ratio(e_k / e_{k+1}) over a refinement sequence."""
    e = np.asarray(errors, dtype=float)
    if e.size < 2 or np.any(e <= 0):
        return float("nan")
    return float(np.min(np.log(e[:-1] / e[1:]) / np.log(ratio)))
