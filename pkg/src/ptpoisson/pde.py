"""Finite-difference reference solver for the three Dirichlet problems.

The horizontal coordinate (X, theta or x) is discretized on cell centres,
half a cell away from the singular edges, with homogeneous Dirichlet
conditions imposed through odd ghost values.  The height runs from the
data row at 0 to a truncated top edge where the solution is set to zero.
The 5-point operator -(D_11 + D_22 + V) is symmetric, and positive
definite for nu >= 1/2; it is solved by Jacobi-preconditioned conjugate
gradients.
"""
from __future__ import annotations

import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sps
from scipy.interpolate import CubicSpline, RegularGridInterpolator
from scipy.sparse.linalg import cg

from .records import ResidualReport, SampledFunction, empirical_order
from .specfun import ConvergenceError

__all__ = [
    "Grid2D",
    "OperatorKind",
    "Field",
    "SupportWarning",
    "potential",
    "fd_solve_dirichlet",
    "pde_residual",
    "default_grid",
]

MAX_ITERATIONS = 200_000


class SupportWarning(UserWarning):
    """Boundary data reaches close to a truncated edge."""


@dataclass(frozen=True)
class Grid2D:
    """coord1: horizontal (cell centres when staggered); coord2: height nodes 0..n2."""

    c1_lo: float
    c1_hi: float
    n1: int
    c2_lo: float
    c2_hi: float
    n2: int
    staggered: bool = True

    def __post_init__(self):
        if self.n1 < 16 or self.n2 < 16:
            raise ValueError("grid counts must be at least 16")
        if self.c1_hi <= self.c1_lo or self.c2_hi <= self.c2_lo:
            raise ValueError("grid ranges must be increasing")

    @property
    def h1(self) -> float:
        return (self.c1_hi - self.c1_lo) / (self.n1 if self.staggered else self.n1 + 1)

    @property
    def h2(self) -> float:
        return (self.c2_hi - self.c2_lo) / self.n2

    @property
    def coord1(self) -> np.ndarray:
        if self.staggered:
            return self.c1_lo + (np.arange(self.n1) + 0.5) * self.h1
        return self.c1_lo + np.arange(1, self.n1 + 1) * self.h1

    @property
    def coord2(self) -> np.ndarray:
        return self.c2_lo + np.arange(self.n2 + 1) * self.h2


@dataclass(frozen=True)
class OperatorKind:
    """One of the three operators with potential c (1/4 - nu^2) V(coord1)."""

    tag: str
    order: float
    potential_coeff: float = 1.0

    def __post_init__(self):
        if self.tag not in ("inverse_square", "trig_pt", "hyp_pt"):
            raise ValueError(f"unknown operator tag {self.tag!r}")
        if self.potential_coeff <= 0:
            raise ValueError("potential coefficient must be positive")


def potential(op: OperatorKind, coord):
    coord = np.asarray(coord, dtype=float)
    strength = op.potential_coeff * (0.25 - op.order**2)
    if op.tag == "inverse_square":
        profile = 1.0 / coord**2
    elif op.tag == "trig_pt":
        profile = 1.0 / np.sin(coord) ** 2
    else:
        profile = 1.0 / np.sinh(coord) ** 2
    return strength * profile


def default_grid(tag: str, n: int = 256, height: float | None = None) -> Grid2D:
    if tag == "trig_pt":
        return Grid2D(0.0, math.pi, n, 0.0, height or 10.0, n)
    return Grid2D(0.0, 20.0, n, 0.0, height or 20.0, n)


@dataclass
class Field:
    grid: Grid2D
    values: np.ndarray  # shape (n2 + 1, n1): row j is height coord2[j]
    stats: dict = field(default_factory=dict)

    def interpolator(self) -> RegularGridInterpolator:
        return RegularGridInterpolator(
            (self.grid.coord2, self.grid.coord1), self.values, method="cubic", bounds_error=True
        )

    def at(self, points) -> np.ndarray:
        """Values at (height, coord1) points."""
        return self.interpolator()(np.atleast_2d(np.asarray(points, dtype=float)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("coord1,coord2,value\n")
        c1, c2 = self.grid.coord1, self.grid.coord2
        for j, y in enumerate(c2):
            for i, x in enumerate(c1):
                buf.write(f"{float(x)!r},{float(y)!r},{float(self.values[j, i])!r}\n")
        return buf.getvalue()

    def header_json(self) -> str:
        return json.dumps({"grid": asdict(self.grid), "solver": self.stats}, sort_keys=True)


def _second_difference(n: int, h: float, staggered: bool) -> sps.csr_matrix:
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    d = sps.diags([off, main, off], [-1, 0, 1], format="lil")
    if staggered:
        # odd ghost values across both edges
        d[0, 0] = -3.0
        d[n - 1, n - 1] = -3.0
    return (d / (h * h)).tocsr()


def _sample_boundary(boundary: SampledFunction, coord) -> np.ndarray:
    g = boundary.grid
    if g.size < 2:
        return np.zeros_like(coord)
    vals = CubicSpline(g, boundary.values)(coord)
    return np.where((coord >= g[0]) & (coord <= g[-1]), vals, 0.0)


def fd_solve_dirichlet(op: OperatorKind, boundary: SampledFunction, grid: Grid2D, tol: float = 1e-10) -> Field:
    """Solve [D_11 + D_22 + V] u = 0 with u = boundary data on the bottom row.

    Homogeneous Dirichlet conditions hold on the other three edges.
    """
    c1 = grid.coord1
    u0 = _sample_boundary(boundary, c1)
    nz = np.nonzero(np.abs(u0) > 1e-14 * max(np.max(np.abs(u0), initial=0.0), 1e-300))[0]
    span = grid.c1_hi - grid.c1_lo
    if nz.size and (c1[nz[-1]] > grid.c1_hi - 0.1 * span or (op.tag == "trig_pt" and c1[nz[0]] < grid.c1_lo + 0.1 * span)):
        warnings.warn("boundary data support within 10% of a truncated edge", SupportWarning, stacklevel=2)
    n1, m = grid.n1, grid.n2 - 1
    out = np.zeros((grid.n2 + 1, n1))
    out[0] = u0
    if not np.any(u0):
        return Field(grid, out, {"iterations": 0, "residual": 0.0})

    d1 = _second_difference(n1, grid.h1, grid.staggered)
    d2 = _second_difference(m, grid.h2, staggered=False)
    lap = sps.kron(sps.identity(m), d1) + sps.kron(d2, sps.identity(n1))
    V = potential(op, c1)
    A = (-(lap + sps.diags(np.tile(V, m)))).tocsr()
    b = np.zeros(m * n1)
    b[:n1] = u0 / grid.h2**2
    diag = A.diagonal()
    M = sps.diags(1.0 / diag)
    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    x, info = cg(A, b, rtol=tol, atol=0.0, maxiter=MAX_ITERATIONS, M=M, callback=count)
    if info != 0:
        raise ConvergenceError(f"conjugate gradients stopped after {iterations} iterations (info={info})")
    res = float(np.linalg.norm(A @ x - b) / np.linalg.norm(b))
    out[1:-1] = x.reshape(m, n1)
    return Field(grid, out, {"iterations": iterations, "residual": res, "tol": tol})


def _operator_at(op: OperatorKind, f: Callable, c1, c2, h: float):
    lap = (f(c1 + h, c2) + f(c1 - h, c2) + f(c1, c2 + h) + f(c1, c2 - h) - 4.0 * f(c1, c2)) / (h * h)
    return lap + potential(op, c1) * f(c1, c2)


def pde_residual(op: OperatorKind, f: Callable, probes, h: float = 0.05, refinements: int = 3) -> ResidualReport:
    """Central-difference residual of ``op`` applied to ``f(coord1, coord2)`` at probes.

    ``probes`` are (coord1, coord2) pairs.  The step is halved
    ``refinements`` times; norms are reported at the finest step and the
    empirical order is the smallest observed over the halvings.
    """
    pts = np.atleast_2d(np.asarray(probes, dtype=float))
    c1, c2 = pts[:, 0], pts[:, 1]
    warn = []
    edge = np.min(c1) if op.tag != "trig_pt" else min(np.min(c1), math.pi - np.max(c1))
    if edge < 4 * h:
        warn.append("probe within 4h of a singular line")
    steps = [h / 2**k for k in range(refinements + 1)]
    maxes, l2s, history = [], [], []
    for step in steps:
        r = _operator_at(op, f, c1, c2, step)
        maxes.append(float(np.max(np.abs(r))))
        l2s.append(float(np.sqrt(np.mean(r * r))))
        history.append({"h": step, "max_residual": maxes[-1], "l2_residual": l2s[-1]})
    return ResidualReport(
        {"max_residual": maxes[-1], "l2_residual": l2s[-1]},
        empirical_order=empirical_order(maxes),
        meta={"operator": op.tag, "c": op.potential_coeff, "nu": op.order, "h": steps[-1]},
        history=history,
        warnings=warn,
    )
