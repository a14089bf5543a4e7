"""Zero-temperature mean-field theory of the ferromagnetic spin-1 model.

Each site sees ``H_eff(m) = -A Sx - B Sz^2 - Jz m Sz`` and the magnetization
solves ``m = <Sz>`` in the ground state of ``H_eff(m)``. Fixed points are the
stationary points of the variational energy density::

    e(m) = eps0(A, B, Jz m) + Jz m^2 / 2,    de/dm = Jz (m - <Sz>(m)),

where ``eps0`` is the ground energy of ``H_eff``. The physical solution is
the global minimiser of ``e``; plain fixed-point iteration can stall on a
metastable branch near first-order lines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exceptions import ConvergenceError, InvalidArgumentError
from .schedules import BqaSchedule

__all__ = [
    "MeanFieldPoint",
    "BoundaryPoint",
    "PhaseDiagram",
    "effective_hamiltonian",
    "ground_magnetization",
    "variational_energy",
    "solve_selfconsistent",
    "phase_diagram",
    "protocol_overlay",
    "PARAMAGNETIC",
    "FIRST_ORDER_SIDE",
    "SECOND_ORDER_SIDE",
]

PARAMAGNETIC = "paramagnetic"
FIRST_ORDER_SIDE = "first-order-side"
SECOND_ORDER_SIDE = "second-order-side"

RESIDUAL_TOL = 1e-10
JUMP_THRESHOLD = 1e-3
_GRID_STEP = 1e-3
_PROBE = 1e-7

_SQRT2 = math.sqrt(2.0)


def effective_hamiltonian(A, B, Jz, m) -> np.ndarray:
    """``-A Sx - B Sz^2 - Jz m Sz``; broadcasts over array ``m`` to shape ``(..., 3, 3)``."""
    m = np.asarray(m, dtype=float)
    out = np.zeros(m.shape + (3, 3))
    field = Jz * m
    out[..., 0, 0] = -B - field
    out[..., 2, 2] = -B + field
    off = -A / _SQRT2
    out[..., 0, 1] = out[..., 1, 0] = off
    out[..., 1, 2] = out[..., 2, 1] = off
    return out


def _ground(A, B, Jz, m):
    values, vectors = np.linalg.eigh(effective_hamiltonian(A, B, Jz, m))
    ground = vectors[..., :, 0]
    sz = np.abs(ground[..., 0]) ** 2 - np.abs(ground[..., 2]) ** 2
    # exact by m -> -m symmetry; eigh mixes nearly degenerate levels at small A
    sz = np.where(np.asarray(m) == 0.0, 0.0, sz)
    return values[..., 0], sz


def ground_magnetization(A, B, Jz, m):
    """``<Sz>`` in the ground state of ``H_eff(m)``."""
    return _ground(A, B, Jz, m)[1]


def variational_energy(A, B, Jz, m):
    """Mean-field energy density ``e(m)``."""
    m = np.asarray(m, dtype=float)
    if np.any(np.abs(m) > 1.0 + 1e-12):
        raise InvalidArgumentError("magnetization must lie in [-1, 1]")
    energy = _ground(A, B, Jz, m)[0] + 0.5 * Jz * m * m
    return energy if energy.ndim else float(energy)


@dataclass(frozen=True)
class MeanFieldPoint:
    A: float
    B: float
    Jz: float
    m_s: float
    order: str
    energy_density: float
    residual: float


def _residual(A, B, Jz, m):
    if m == 0.0:
        return 0.0  # m = 0 is a fixed point by the m -> -m symmetry
    return float(ground_magnetization(A, B, Jz, m) - m)


def solve_selfconsistent(A: float, B: float, Jz: float) -> MeanFieldPoint:
    """Global minimiser of ``e(m)`` over ``m >= 0``.

    Minima are bracketed on a ``1e-3`` grid in ``m`` (plus a probe just above
    zero) by sign changes of ``<Sz>(m) - m`` and refined with Brent's method
    to machine precision. Ferromagnetic points are labelled
    ``first-order-side`` when the paramagnetic solution is still a local
    minimum (the state must jump to reach the ferromagnet) and
    ``second-order-side`` otherwise.
    """
    if not Jz > 0:
        raise InvalidArgumentError("Jz must be positive")
    A, B, Jz = float(A), float(B), float(Jz)
    grid = np.concatenate(([_PROBE], np.arange(_GRID_STEP, 1.0, _GRID_STEP), [1.0]))
    g = ground_magnetization(A, B, Jz, grid) - grid

    candidates = [0.0]
    if abs(g[-1]) < 1e-14:
        candidates.append(1.0)
    for k in np.nonzero((g[:-1] > 0) & (g[1:] <= 0))[0]:
        a, b = grid[k], grid[k + 1]
        if g[k + 1] == 0.0:
            candidates.append(float(b))
            continue
        root = brentq(lambda x: _residual(A, B, Jz, x), a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        candidates.append(float(root))

    energies = variational_energy(A, B, Jz, np.array(candidates))
    para_stable = g[0] < 0
    if para_stable or len(candidates) == 1:
        best = int(np.argmin(energies))
        # ties go to the paramagnet
        if energies[best] >= energies[0] - 1e-13 * max(1.0, abs(energies[0])):
            best = 0
    else:
        # m = 0 is a local maximum of e(m) and cannot be the minimiser
        best = 1 + int(np.argmin(energies[1:]))
    m_s = candidates[best]
    residual = abs(_residual(A, B, Jz, m_s))
    grid_energy = variational_energy(A, B, Jz, grid)
    if residual > RESIDUAL_TOL:
        k = int(np.argmin(grid_energy))
        raise ConvergenceError(
            f"fixed-point residual {residual:.3g} at A={A}, B={B}",
            fallback=MeanFieldPoint(A, B, Jz, float(grid[k]), "unconverged", float(grid_energy[k]), residual),
        )
    if m_s == 0.0:
        order = PARAMAGNETIC
    else:
        order = FIRST_ORDER_SIDE if para_stable else SECOND_ORDER_SIDE
    return MeanFieldPoint(A, B, Jz, m_s, order, float(energies[best]), residual)


@dataclass(frozen=True)
class BoundaryPoint:
    """Phase boundary located on one grid edge.

    ``jump`` is the magnetization on the ferromagnetic side of the edge after
    bisection down to ``width``; ``order`` is ``"first"`` when it exceeds the
    jump threshold.
    """

    A: float
    B: float
    jump: float
    order: str
    width: float


@dataclass
class PhaseDiagram:
    a_grid: np.ndarray
    b_grid: np.ndarray
    Jz: float
    points: list  # row-major over (A, B)
    boundary: list

    def magnetization(self) -> np.ndarray:
        return np.array([p.m_s for p in self.points]).reshape(len(self.a_grid), len(self.b_grid))

    def boundary_of(self, order: str) -> list:
        return [b for b in self.boundary if b.order == order]


def _locate_boundary(para, ferro, Jz, width):
    """Bisect the segment between a paramagnetic and a ferromagnetic point."""
    lo = np.array([para.A, para.B])
    hi = np.array([ferro.A, ferro.B])
    hi_point = ferro
    while np.linalg.norm(hi - lo) > width * Jz:
        mid = 0.5 * (lo + hi)
        point = solve_selfconsistent(mid[0], mid[1], Jz)
        if point.m_s == 0.0:
            lo = mid
        else:
            hi, hi_point = mid, point
    jump = hi_point.m_s
    mid = 0.5 * (lo + hi)
    return BoundaryPoint(
        float(mid[0]),
        float(mid[1]),
        float(jump),
        "first" if jump > JUMP_THRESHOLD else "second",
        float(np.linalg.norm(hi - lo)),
    )


def phase_diagram(a_grid, b_grid, Jz: float = 1.0, boundary_width: float = 1e-9) -> PhaseDiagram:
    """Solve every ``(A, B)`` grid point and classify the phase boundary.

    Every grid edge joining a paramagnetic and a ferromagnetic point is
    bisected to ``boundary_width * Jz``; the magnetization just inside the
    ferromagnetic side measures the discontinuity. A second-order line gives
    a jump that vanishes with the width, a first-order line a finite one.
    """
    a_grid = np.asarray(a_grid, dtype=float)
    b_grid = np.asarray(b_grid, dtype=float)
    if not (np.all(np.isfinite(a_grid)) and np.all(np.isfinite(b_grid))):
        raise InvalidArgumentError("grids must be finite")
    points = [solve_selfconsistent(a, b, Jz) for a in a_grid for b in b_grid]
    nb = len(b_grid)

    def at(i, j):
        return points[i * nb + j]

    boundary = []
    for i in range(len(a_grid)):
        for j in range(nb):
            here = at(i, j)
            for di, dj in ((1, 0), (0, 1)):
                if i + di >= len(a_grid) or j + dj >= nb:
                    continue
                there = at(i + di, j + dj)
                if (here.m_s == 0.0) == (there.m_s == 0.0):
                    continue
                para, ferro = (here, there) if here.m_s == 0.0 else (there, here)
                boundary.append(_locate_boundary(para, ferro, Jz, boundary_width))
    return PhaseDiagram(a_grid, b_grid, float(Jz), points, boundary)


def protocol_overlay(schedule: BqaSchedule, Jz: float = 1.0, n_points: int = 101):
    """Path ``(A(t)/Jz, B(t)/Jz)`` traced by an annealing schedule."""
    t = np.linspace(0.0, schedule.t_final, n_points)
    return t / schedule.t_final, schedule.driver(t) / Jz, schedule.bifurcation(t) / Jz
