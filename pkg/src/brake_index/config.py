"""Tolerance configuration shared by all modules."""

import os
from dataclasses import dataclass, fields, replace

ENV_PREFIX = "BRAKE_INDEX_"


@dataclass(frozen=True)
class Tolerances:
    symplectic_tol: float = 1e-9
    kernel_tol: float = 1e-8
    eig_tol: float = 1e-8
    inertia_tol: float = 1e-8
    rank_tol: float = 1e-8
    angle_tol: float = 1e-8
    bc_tol: float = 1e-10
    energy_tol: float = 1e-9
    sym_tol: float = 1e-7
    dedup_tol: float = 1e-6
    spec_margin: float = 1e-3

    def scaled(self, factor):
        """Every tolerance multiplied by ``factor``."""
        return replace(self, **{f.name: getattr(self, f.name) * factor for f in fields(self)})

    @classmethod
    def from_env(cls, environ=None, scale=1.0):
        env = os.environ if environ is None else environ
        kw = {}
        for f in fields(cls):
            key = ENV_PREFIX + f.name.upper()
            if key in env:
                kw[f.name] = float(env[key])
        return cls(**kw).scaled(scale) if scale != 1.0 else cls(**kw)


DEFAULT = Tolerances.from_env(scale=float(os.environ.get(ENV_PREFIX + "TOL_SCALE", "1")))


class IndeterminateError(ValueError):
    """A numerical decision could not be made stably at the configured tolerances."""

    def __init__(self, message, **detail):
        super().__init__(message)
        self.detail = detail


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge."""

    def __init__(self, message, **detail):
        super().__init__(message)
        self.detail = detail
