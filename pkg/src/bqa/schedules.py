"""Annealing protocols.

Bifurcation annealing sweeps ``B(t) = B0 (2 t/t_f - 1)`` linearly from
``-B0`` to ``+B0`` while the driver amplitude ``A(t)`` is either a Gaussian
centred on ``t_f/2`` or a constant. Standard annealing interpolates
linearly between the transverse-field driver and the problem Hamiltonian.

All times are in units of inverse energy (hbar = 1). Coefficient functions
accept scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidArgumentError

__all__ = ["BqaSchedule", "QaSchedule", "Coefficient", "bqa_coefficients", "qa_weights"]

PROTOCOLS = ("gauss", "const")
_T_SLACK = 1e-12


def _check_time(t, t_final):
    arr = np.asarray(t, dtype=float)
    slack = _T_SLACK * max(1.0, t_final)
    if np.any(arr < -slack) or np.any(arr > t_final + slack) or not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"time {t} outside [0, {t_final}]")


@dataclass(frozen=True)
class BqaSchedule:
    """Linear bifurcation sweep with a Gaussian or constant driver.

    Parameters
    ----------
    b0 : float
        Bifurcation amplitude; ``B`` runs from ``-b0`` to ``+b0``.
    a0 : float
        Peak (Gaussian) or constant driver amplitude.
    t_final : float
        Annealing time.
    protocol : {"gauss", "const"}
    sigma2 : float
        Gaussian variance in the reduced time ``2 t/t_f - 1``. The Gaussian
        is not truncated, so ``A(0) = a0 * exp(-1/(2 sigma2))``.
    """

    b0: float = 20.0
    a0: float = 1.0
    t_final: float = 100.0
    protocol: str = "gauss"
    sigma2: float = 0.1

    def __post_init__(self):
        for name in ("b0", "a0", "t_final", "sigma2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} must be positive and finite, got {value}")
            object.__setattr__(self, name, float(value))
        if self.protocol not in PROTOCOLS:
            raise InvalidArgumentError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")

    def reduced_time(self, t):
        return 2.0 * np.asarray(t, dtype=float) / self.t_final - 1.0

    def driver(self, t):
        """``A(t)`` without range checking."""
        if isinstance(t, float):
            if self.protocol == "const":
                return self.a0
            x = 2.0 * t / self.t_final - 1.0
            return self.a0 * math.exp(-0.5 * x * x / self.sigma2)
        if self.protocol == "const":
            return np.full(np.shape(t), self.a0) if np.ndim(t) else self.a0
        x = self.reduced_time(t)
        out = self.a0 * np.exp(-0.5 * x * x / self.sigma2)
        return out if np.ndim(t) else float(out)

    def bifurcation(self, t):
        """``B(t)`` without range checking."""
        if isinstance(t, float):
            return self.b0 * (2.0 * t / self.t_final - 1.0)
        out = self.b0 * self.reduced_time(t)
        return out if np.ndim(t) else float(out)


@dataclass(frozen=True)
class QaSchedule:
    """Linear interpolation from ``-gamma * sum X`` to the problem Hamiltonian."""

    gamma: float = 1.0
    t_final: float = 200.0

    def __post_init__(self):
        for name in ("gamma", "t_final"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} must be positive and finite, got {value}")
            object.__setattr__(self, name, float(value))

    def problem_weight(self, t):
        if isinstance(t, float):
            return t / self.t_final
        out = np.asarray(t, dtype=float) / self.t_final
        return out if np.ndim(t) else float(out)

    def driver_weight(self, t):
        if isinstance(t, float):
            return 1.0 - t / self.t_final
        out = 1.0 - np.asarray(t, dtype=float) / self.t_final
        return out if np.ndim(t) else float(out)


def bqa_coefficients(schedule: BqaSchedule, t):
    """Return ``(A(t), B(t))``; ``t`` must lie in ``[0, t_final]``."""
    _check_time(t, schedule.t_final)
    return schedule.driver(t), schedule.bifurcation(t)


def qa_weights(schedule: QaSchedule, t):
    """Return ``(1 - t/t_f, t/t_f)``."""
    _check_time(t, schedule.t_final)
    return schedule.driver_weight(t), schedule.problem_weight(t)


_COMPONENTS = {
    "A": "driver",
    "B": "bifurcation",
    "driver_weight": "driver_weight",
    "problem_weight": "problem_weight",
}


@dataclass(frozen=True)
class Coefficient:
    """Real time-dependent scalar ``scale * <component of schedule>(t)``.

    Value semantics (frozen, comparable) let the integrator recognise that
    several Hamiltonians share a driver and can be propagated together.
    """

    schedule: BqaSchedule | QaSchedule
    component: str
    scale: float = 1.0

    def __post_init__(self):
        if self.component not in _COMPONENTS:
            raise InvalidArgumentError(f"unknown schedule component {self.component!r}")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "_fn", getattr(self.schedule, _COMPONENTS[self.component]))

    @property
    def t_final(self) -> float:
        return self.schedule.t_final

    def __call__(self, t):
        return self.scale * self._fn(t)
