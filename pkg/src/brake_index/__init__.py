"""Maslov-type indices with Lagrangian boundary conditions, (eps, L0, L1)-signatures,
(L0, L1)-normal forms and brake orbits on convex symmetric energy surfaces."""

from .config import DEFAULT, ConvergenceError, IndeterminateError, Tolerances

__version__ = "0.1.0"
