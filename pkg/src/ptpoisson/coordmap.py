"""Coordinate maps from the Poschl-Teller geometries to the half-plane.

``trig``           w = theta + i y  ->  2 tan(w/2)     (half-strip onto the quadrant)
``hyp_conformal``  w = x + i y      ->  2 tanh(w/2)    (strip 0 < y < pi onto the quadrant)
``hyp_paper``      (x, y) -> (2 sinh x, 2 sinh y) / (cosh x + cosh y), taken
                   literally; not conformal.

Each map returns (X, Y) with X the horizontal coordinate (the one carrying
the inverse-square potential) and Y the height.  All maps accept complex
heights so that kernels can be continued off the real axis.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .records import ResidualReport, empirical_order

__all__ = [
    "MapKind",
    "SingularProximityWarning",
    "trig_map",
    "hyp_map",
    "map_point",
    "boundary_pullback",
    "conformal_factor",
    "cauchy_riemann_residual",
    "conjugation_residual",
    "gaussian_bump",
    "residual_at_step",
    "StripGrid",
]


class MapKind(str, Enum):
    TRIG = "trig"
    HYP_PAPER = "hyp_paper"
    HYP_CONFORMAL = "hyp_conformal"

    @property
    def label(self) -> str:
        return {
            "trig": "conformal map 2 tan(w/2)",
            "hyp_paper": "literal non-conformal map",
            "hyp_conformal": "derived conformal map",
        }[self.value]


class SingularProximityWarning(UserWarning):
    """A stencil reaches a line where the potential is singular."""


def trig_map(theta, y):
    """Image of the half-strip point (theta, y) under w -> 2 tan(w/2).

    Returns (X, Y) = (2 sin theta, 2 sinh y) / (cos theta + cosh y).
    """
    d = np.cos(theta) + np.cosh(y)
    return 2.0 * np.sin(theta) / d, 2.0 * np.sinh(y) / d


def hyp_map(kind, x, y):
    """Image of (x, y) under one of the two hyperbolic maps."""
    kind = MapKind(kind)
    if kind is MapKind.HYP_PAPER:
        d = np.cosh(x) + np.cosh(y)
        return 2.0 * np.sinh(x) / d, 2.0 * np.sinh(y) / d
    if kind is MapKind.HYP_CONFORMAL:
        if np.any(np.real(y) >= math.pi):
            raise ValueError("hyp_conformal map requires y < pi")
        d = np.cosh(x) + np.cos(y)
        return 2.0 * np.sinh(x) / d, 2.0 * np.sin(y) / d
    raise ValueError(f"{kind} is not a hyperbolic map")


def map_point(kind, coord, y):
    kind = MapKind(kind)
    if kind is MapKind.TRIG:
        return trig_map(coord, y)
    return hyp_map(kind, coord, y)


def boundary_pullback(kind, boundary_coord):
    """Boundary image X' and Jacobian dX'/d(coordinate) at height zero."""
    kind = MapKind(kind)
    s = np.asarray(boundary_coord, dtype=float)
    if kind is MapKind.TRIG:
        if np.any((s <= 0) | (s >= math.pi)):
            raise ValueError("trig boundary coordinate must lie in (0, pi)")
        half = 0.5 * s
        return 2.0 * np.tan(half), 1.0 / np.cos(half) ** 2
    if np.any(s <= 0):
        raise ValueError("hyperbolic boundary coordinate must be positive")
    half = 0.5 * s
    return 2.0 * np.tanh(half), 1.0 / np.cosh(half) ** 2


def conformal_factor(kind, coord, y):
    """|f'(w)|^2 for the map f; for ``hyp_paper`` the analogous expression."""
    kind = MapKind(kind)
    if kind is MapKind.TRIG:
        return 4.0 / (np.cos(coord) + np.cosh(y)) ** 2
    if kind is MapKind.HYP_CONFORMAL:
        return 4.0 / (np.cosh(coord) + np.cos(y)) ** 2
    return 4.0 / (np.cosh(coord) + np.cosh(y)) ** 2


def potential_profile(kind, coord):
    """1/sin^2 (trig) or 1/sinh^2 (hyperbolic) of the horizontal coordinate."""
    kind = MapKind(kind)
    if kind is MapKind.TRIG:
        return 1.0 / np.sin(coord) ** 2
    return 1.0 / np.sinh(coord) ** 2


def cauchy_riemann_residual(kind, coord: float, y: float, h: float = 1e-4) -> tuple[float, float]:
    """Residuals of X_c = Y_y and X_y = -Y_c by central differences."""
    X_c = (map_point(kind, coord + h, y)[0] - map_point(kind, coord - h, y)[0]) / (2 * h)
    X_y = (map_point(kind, coord, y + h)[0] - map_point(kind, coord, y - h)[0]) / (2 * h)
    Y_c = (map_point(kind, coord + h, y)[1] - map_point(kind, coord - h, y)[1]) / (2 * h)
    Y_y = (map_point(kind, coord, y + h)[1] - map_point(kind, coord, y - h)[1]) / (2 * h)
    return float(abs(X_c - Y_y)), float(abs(X_y + Y_c))


def gaussian_bump(X0: float = 1.5, Y0: float = 1.0, width: float = 0.4) -> Callable:
    """Smooth test function on the half-plane, negligible near X = 0."""

    def f(X, Y):
        return np.exp(-((X - X0) ** 2 + (Y - Y0) ** 2) / (2 * width * width))

    return f


@dataclass(frozen=True)
class StripGrid:
    """Tensor grid of (coordinate, height) points for residual checks."""

    coord: np.ndarray
    height: np.ndarray

    @classmethod
    def default(cls, kind) -> "StripGrid":
        kind = MapKind(kind)
        if kind is MapKind.TRIG:
            return cls(np.linspace(0.6, 2.4, 7), np.linspace(0.2, 1.4, 7))
        return cls(np.linspace(0.5, 2.0, 7), np.linspace(0.2, 1.4, 7))


def _half_plane_operator(F, X, Y, nu, h):
    lap = (F(X + h, Y) + F(X - h, Y) + F(X, Y + h) + F(X, Y - h) - 4 * F(X, Y)) / (h * h)
    return lap + (0.25 - nu * nu) / X**2 * F(X, Y)


def _conjugation_residual_at(kind, c, nu, F, cc, yy, h):
    X, Y = map_point(kind, cc, yy)
    G = lambda a, b: F(*map_point(kind, a, b))  # noqa: E731
    lap = (G(cc + h, yy) + G(cc - h, yy) + G(cc, yy + h) + G(cc, yy - h) - 4 * G(cc, yy)) / (h * h)
    strip = lap + c * (0.25 - nu * nu) * potential_profile(kind, cc) * G(cc, yy)
    half = conformal_factor(kind, cc, yy) * _half_plane_operator(F, X, Y, nu, h)
    return strip - half


def conjugation_residual(
    kind,
    potential_coeff: float,
    order: float,
    test_fn: Callable | None = None,
    grid: StripGrid | None = None,
    h: float = 0.04,
    refinements: int = 3,
) -> ResidualReport:
    """Measure how well a map conjugates the strip operator to the half-plane one.

    At every grid point compares ``[d_cc + d_yy + c (1/4 - nu^2) V(coord)] G``
    with ``|f'|^2 [d_XX + d_YY + (1/4 - nu^2)/X^2] F`` at the image point,
    where ``G = F o f``.  Both sides use second-order central differences with
    step ``h``; the step is halved ``refinements`` times and the reported
    norms belong to the finest step.
    """
    kind = MapKind(kind)
    F = test_fn or gaussian_bump()
    grid = grid or StripGrid.default(kind)
    cc, yy = np.meshgrid(grid.coord, grid.height, indexing="ij")
    warn = []
    lo = float(np.min(cc)) - h
    if lo <= 0 or (kind is MapKind.TRIG and float(np.max(cc)) + h >= math.pi):
        msg = "stencil touches a singular edge of the potential"
        warnings.warn(msg, SingularProximityWarning, stacklevel=2)
        warn.append(msg)
    steps = [h / 2**k for k in range(refinements + 1)]
    maxes, l2s, history = [], [], []
    for step in steps:
        r = _conjugation_residual_at(kind, potential_coeff, order, F, cc, yy, step)
        maxes.append(float(np.max(np.abs(r))))
        l2s.append(float(np.sqrt(np.mean(r * r))))
        history.append({"h": step, "max_residual": maxes[-1], "l2_residual": l2s[-1]})
    return ResidualReport(
        {"max_residual": maxes[-1], "l2_residual": l2s[-1]},
        empirical_order=empirical_order(maxes),
        meta={"kind": kind.value, "c": potential_coeff, "nu": order, "h": steps[-1]},
        history=history,
        warnings=warn,
    )


def residual_at_step(kind, potential_coeff, order, h, test_fn=None, grid=None) -> float:
    """Max-norm conjugation residual at a single step size."""
    kind = MapKind(kind)
    F = test_fn or gaussian_bump()
    grid = grid or StripGrid.default(kind)
    cc, yy = np.meshgrid(grid.coord, grid.height, indexing="ij")
    return float(np.max(np.abs(_conjugation_residual_at(kind, potential_coeff, order, F, cc, yy, h))))
