"""Closed-form Poisson and heat kernels for inverse-square and Poschl-Teller potentials."""
from . import coordmap, hankel, kernels, pde, records, solve, specfun
from .specfun import ConvergenceError, PoleError

__version__ = "0.1.0"

__all__ = ["coordmap", "hankel", "kernels", "pde", "records", "solve", "specfun", "ConvergenceError", "PoleError"]
