"""Discrete Hankel transform and Bessel-product quadrature oracles.

The routines here never touch the Legendre closed forms; they integrate
Bessel products directly and serve as the reference against which the
closed-form kernels are checked.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.interpolate import CubicSpline

from .records import QuadratureSpec, ResidualReport, SampledFunction
from .specfun import bessel_j

__all__ = [
    "TruncationWarning",
    "DiscreteHankel",
    "hankel_transform",
    "weighted_laplace_integral",
    "heat_spectral_integral",
    "check_hankel_properties",
    "gauss_legendre_panels",
    "REFERENCE_POINTS",
    "REFERENCE_SPAN",
]

REFERENCE_POINTS = 2048
REFERENCE_SPAN = 20.0
_MAX_PANELS = 200_000
_ROW_CHUNK = 256


class TruncationWarning(UserWarning):
    """Quadrature could not meet its resolution or tail budget."""


def gauss_legendre_panels(lo: float, hi: float, panels: int, nodes_per_panel: int):
    """Nodes and weights of composite Gauss-Legendre on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _panel_count(span: float, max_freq: float, q: QuadratureSpec, extra_width: float = math.inf) -> int:
    width = math.pi / (4.0 * max_freq) if max_freq > 0 else math.inf
    width = min(width, extra_width)
    need = math.ceil(span / width) if math.isfinite(width) else 1
    n = max(q.panels, need)
    if n > _MAX_PANELS:
        warnings.warn(
            f"oscillatory quadrature needs {need} panels; capped at {_MAX_PANELS}",
            TruncationWarning,
            stacklevel=3,
        )
        n = _MAX_PANELS
    return n


class DiscreteHankel:
    """Precomputed Hankel transform from samples on ``in_grid`` to ``out_grid``.

    Samples are interpolated by a cubic spline and integrated with composite
    Gauss-Legendre over the span of ``in_grid``; panels are narrow enough
    that each covers at most a quarter period of the fastest Bessel factor.
    """

    def __init__(self, order: float, in_grid, out_grid, q: QuadratureSpec | None = None):
        if order <= -1:
            raise ValueError("Hankel order must exceed -1")
        q = q or QuadratureSpec()
        self.order = float(order)
        self.in_grid = np.asarray(in_grid, dtype=float)
        self.out_grid = np.asarray(out_grid, dtype=float)
        lo, hi = float(self.in_grid[0]), float(self.in_grid[-1])
        omega_max = float(np.max(np.abs(self.out_grid), initial=0.0))
        panels = _panel_count(hi - lo, omega_max, q)
        self.nodes, self.weights = gauss_legendre_panels(lo, hi, panels, q.nodes_per_panel)
        self.matrix = np.empty((self.out_grid.size, self.nodes.size))
        for start in range(0, self.out_grid.size, _ROW_CHUNK):
            om = self.out_grid[start : start + _ROW_CHUNK, None]
            arg = om * self.nodes[None, :]
            self.matrix[start : start + _ROW_CHUNK] = (
                np.sqrt(arg) * bessel_j(self.order, arg.ravel()).reshape(arg.shape) * self.weights[None, :]
            )

    def apply(self, values) -> np.ndarray:
        spline = CubicSpline(self.in_grid, np.asarray(values, dtype=float))
        return self.matrix @ spline(self.nodes)


def hankel_transform(f: SampledFunction, order: float, out_grid, q: QuadratureSpec | None = None) -> SampledFunction:
    """Hankel transform of order ``order`` of sampled data.

    Computes ``int (X w)^(1/2) J_nu(X w) f(X) dX`` at each ``w`` in
    ``out_grid``; ``f`` is taken as zero outside its grid.
    """
    out_grid = np.asarray(out_grid, dtype=float)
    if f.grid.size < 2:
        return SampledFunction(out_grid, np.zeros_like(out_grid))
    op = DiscreteHankel(order, f.grid, out_grid, q)
    return SampledFunction(out_grid, op.apply(f.values))


def weighted_laplace_integral(order: float, p: float, a: float, b: float, q: QuadratureSpec | None = None) -> float:
    """Quadrature for int_0^inf exp(-p x) J_nu(a x) J_nu(b x) x dx."""
    if order <= -0.5:
        raise ValueError("order must exceed -1/2")
    if p <= 0 or a <= 0 or b <= 0:
        raise ValueError("p, a, b must be positive")
    q = q or QuadratureSpec()
    if p < 0.05:
        warnings.warn(f"slow exponential decay (p={p}); accuracy budget not guaranteed", TruncationWarning, stacklevel=2)
    x_max = q.truncation or -math.log(q.tail_tolerance) / p
    panels = _panel_count(x_max, a + b, q, extra_width=1.0 / p)
    x, w = gauss_legendre_panels(0.0, x_max, panels, q.nodes_per_panel)
    f = np.exp(-p * x) * bessel_j(order, a * x) * bessel_j(order, b * x) * x
    return float(np.dot(w, f))


def heat_spectral_integral(order: float, t: float, X: float, Xp: float, q: QuadratureSpec | None = None) -> float:
    """Heat kernel of the inverse-square operator from its Hankel diagonalization.

    Integrates ``(X X')^(1/2) J_nu(X w) J_nu(X' w) exp(-t w^2) w`` over
    ``0 <= w <= max(8/sqrt(t), 40)``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    q = q or QuadratureSpec()
    w_max = q.truncation or max(8.0 / math.sqrt(t), 40.0)
    panels = _panel_count(w_max, X + Xp, q, extra_width=0.5 * math.sqrt(t))
    om, wt = gauss_legendre_panels(0.0, w_max, panels, q.nodes_per_panel)
    f = bessel_j(order, X * om) * bessel_j(order, Xp * om) * np.exp(-t * om * om) * om
    return float(math.sqrt(X * Xp) * np.dot(wt, f))


def _l2(values, grid) -> float:
    return float(np.sqrt(np.trapezoid(values * values, grid)))


def _apply_operator(order: float, grid, values) -> np.ndarray:
    """Inverse-square operator d^2/dX^2 + (1/4 - nu^2)/X^2 by central differences."""
    h = grid[1] - grid[0]
    out = np.zeros_like(values)
    out[1:-1] = (values[2:] - 2 * values[1:-1] + values[:-2]) / (h * h)
    interior = slice(1, -1)
    out[interior] += (0.25 - order * order) / grid[interior] ** 2 * values[interior]
    return out


def check_hankel_properties(
    f: SampledFunction,
    order: float,
    q: QuadratureSpec | None = None,
    partner: SampledFunction | None = None,
) -> ResidualReport:
    """Residuals of involution, isometry, self-adjointness and diagonalization.

    The transform image is sampled on the same grid as ``f`` (the grid
    must be uniform).  ``partner`` is the second function of the
    self-adjointness pair; a fixed smooth bump is used when omitted.
    """
    grid = f.grid
    h = np.diff(grid)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0.0):
        raise ValueError("property check needs a uniform grid")
    if partner is None:
        partner = SampledFunction(grid, (grid / 8.0) ** 2 * np.exp(-0.5 * (grid - 8.0) ** 2))
    op = DiscreteHankel(order, grid, grid, q)
    fv = f.values
    norm_f = _l2(fv, grid)
    if norm_f == 0.0:
        return ResidualReport(
            {"involution": 0.0, "isometry": 0.0, "self_adjoint": 0.0, "diagonalization": 0.0},
            meta={"order": order, "points": int(grid.size)},
        )
    hf = op.apply(fv)
    hhf = op.apply(hf)
    g = partner.values
    hg = op.apply(g)
    norm_g = _l2(g, grid)
    lf = _apply_operator(order, grid, fv)
    hlf = op.apply(lf)
    res = {
        "involution": _l2(hhf - fv, grid) / norm_f,
        "isometry": abs(_l2(hf, grid) - norm_f) / norm_f,
        "self_adjoint": abs(np.trapezoid(hf * g, grid) - np.trapezoid(fv * hg, grid)) / (norm_f * max(norm_g, 1e-300)),
        "diagonalization": _l2(hlf + grid**2 * hf, grid) / norm_f,
    }
    return ResidualReport(res, meta={"order": order, "points": int(grid.size)})
