"""Schrodinger-equation propagation and instantaneous spectra.

``i d psi/dt = H(t) psi`` (hbar = 1) is integrated with scipy's adaptive
Dormand-Prince 8(5,3) scheme. Unitarity is not enforced; the norm drift is
reported with every result.

Two details keep the explicit integrator cheap:

* Each diagonal term is shifted by the midpoint of its spectrum before
  integration, which roughly halves the largest eigenvalue magnitude. The
  removed scalar is integrated alongside the state and restored as an exact
  global phase, so returned amplitudes are those of the unshifted ``H``.
* Hamiltonians that share every coefficient function and every off-diagonal
  operator (the same schedule on different instances) are integrated as one
  batch of column vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .exceptions import DegenerateGroundStateError, IntegrationError, InvalidArgumentError
from .hamiltonians import DenseOperator, TimeDependentHamiltonian, evaluate
from .spinops import SiteBasis, SiteKind

__all__ = [
    "StateVector",
    "EvolutionResult",
    "evolve",
    "evolve_batch",
    "instantaneous_spectrum",
    "adiabatic_initial_state",
    "zero_state",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-12
DENSE_LIMIT = 1000
NORM_TOL = 1e-9
DEFAULT_MAX_STEPS = 2_000_000
_STAGES_PER_STEP = 12


@dataclass(frozen=True, eq=False)
class StateVector:
    basis: SiteBasis
    amplitudes: np.ndarray
    check_norm: bool = field(default=True, repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise InvalidArgumentError(
                f"amplitudes have shape {amps.shape}, basis dimension is {self.basis.dim}"
            )
        if self.check_norm and abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise InvalidArgumentError(f"state norm {np.linalg.norm(amps)} is not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_configuration(cls, basis: SiteBasis, config) -> "StateVector":
        amps = np.zeros(basis.dim, dtype=complex)
        amps[basis.encode(config)] = 1.0
        return cls(basis, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    """Sampled trajectory of one propagation.

    ``states`` has shape ``(len(times), dim)``; ``norm_drift`` is the largest
    ``| ||psi|| - 1 |`` over the sampled states.
    """

    final_state: StateVector
    times: np.ndarray
    states: np.ndarray
    norm_drift: float
    step_count: int

    @property
    def basis(self) -> SiteBasis:
        return self.final_state.basis

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def samples(self) -> list:
        return list(zip(self.times.tolist(), self.probabilities))


def zero_state(n: int) -> StateVector:
    """The qutrit product state with every site in ``m = 0``."""
    return StateVector.from_configuration(SiteBasis.qutrits(n), (0,) * n)


class _Kernel:
    """Right-hand side for a batch of Hamiltonians with a shared structure."""

    def __init__(self, hamiltonians, dense_limit=DENSE_LIMIT):
        first = hamiltonians[0]
        self.dim = first.dim
        self.batch = len(hamiltonians)
        for h in hamiltonians[1:]:
            if h.basis != first.basis or len(h.terms) != len(first.terms):
                raise InvalidArgumentError("batched Hamiltonians must share basis and term layout")
        self.static_diag = np.zeros((self.dim, self.batch))
        self.static_shift = np.zeros(self.batch)
        self.td_diag = []  # (coefficient, values (dim, batch), shifts (batch,))
        self.offdiag = []  # (coefficient or None, apply)
        for k, term in enumerate(first.terms):
            group = [h.terms[k] for h in hamiltonians]
            if any(t.coefficient != term.coefficient for t in group):
                raise InvalidArgumentError("batched Hamiltonians must share coefficient functions")
            if term.operator.diagonal:
                if not all(t.operator.diagonal for t in group):
                    raise InvalidArgumentError("batched term kinds differ")
                values = np.stack([t.operator.values for t in group], axis=1)
                mids = 0.5 * (values.max(axis=0) + values.min(axis=0))
                if term.static:
                    self.static_diag += values - mids
                    self.static_shift += mids
                else:
                    self.td_diag.append((term.coefficient, values - mids, mids))
            else:
                if any(not (t.operator == term.operator) for t in group[1:]):
                    raise InvalidArgumentError("batched off-diagonal operators must be identical")
                op = term.operator
                if self.dim <= dense_limit and not isinstance(op, DenseOperator):
                    op = DenseOperator(op.toarray())
                self.offdiag.append((term.coefficient, op.apply))
        self.size = self.dim * self.batch
        self.nfev = 0
        self.budget = None

    def __call__(self, t, y):
        self.nfev += 1
        if self.budget is not None and self.nfev > self.budget:
            raise _BudgetExceeded(t)
        psi = y[: self.size].reshape(self.dim, self.batch)
        result = np.empty_like(y)
        out = result[: self.size].reshape(self.dim, self.batch)
        shift = result[self.size :]
        shift[:] = self.static_shift
        diag = self.static_diag
        for coefficient, values, mids in self.td_diag:
            c = coefficient(t)
            diag = diag + c * values
            shift += c * mids
        np.multiply(diag, psi, out=out)
        for coefficient, apply in self.offdiag:
            if coefficient is None:
                out += apply(psi)
            else:
                out += coefficient(t) * apply(psi)
        out *= -1j
        return result


class _BudgetExceeded(Exception):
    def __init__(self, t):
        self.t = t


def _stack_states(psi0s, hamiltonians):
    columns = []
    for psi0, h in zip(psi0s, hamiltonians):
        if not isinstance(psi0, StateVector):
            psi0 = StateVector(h.basis, psi0)
        if psi0.basis != h.basis:
            raise InvalidArgumentError("initial state basis does not match Hamiltonian")
        columns.append(psi0.amplitudes)
    return np.stack(columns, axis=1)


def evolve_batch(
    hamiltonians,
    psi0s,
    t_final=None,
    sample_count: int = 21,
    tol: float = DEFAULT_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
    dense_limit: int = DENSE_LIMIT,
) -> list:
    """Propagate several Hamiltonians that share their time dependence.

    Returns one :class:`EvolutionResult` per Hamiltonian. Sample times are
    ``sample_count`` uniformly spaced points including both endpoints.
    """
    hamiltonians = list(hamiltonians)
    if not hamiltonians:
        return []
    if len(psi0s) != len(hamiltonians):
        raise InvalidArgumentError("need one initial state per Hamiltonian")
    horizon = hamiltonians[0].t_final
    t_final = horizon if t_final is None else float(t_final)
    if not 0 < t_final <= horizon * (1 + 1e-12):
        raise InvalidArgumentError(f"t_final {t_final} outside (0, {horizon}]")
    if sample_count < 2:
        raise InvalidArgumentError("sample_count must be at least 2")
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")

    kernel = _Kernel(hamiltonians, dense_limit)
    kernel.budget = int(max_steps) * (_STAGES_PER_STEP + 1)
    psi = _stack_states(psi0s, hamiltonians)
    y0 = np.concatenate((psi.ravel(), np.zeros(kernel.batch, dtype=complex)))
    times = np.linspace(0.0, t_final, int(sample_count))
    try:
        sol = solve_ivp(
            kernel, (0.0, t_final), y0, method="DOP853", t_eval=times, rtol=tol, atol=tol
        )
    except _BudgetExceeded as exc:
        raise IntegrationError(
            f"step budget of {max_steps} exhausted at t={exc.t:.6g}",
            t_reached=exc.t,
            steps=max_steps,
        ) from None
    if sol.status != 0:
        t_done = np.asarray(sol.t, dtype=float)
        t_reached = float(t_done[-1]) if t_done.size else 0.0
        raise IntegrationError(
            f"integration failed: {sol.message}", t_reached=t_reached, steps=sol.nfev // _STAGES_PER_STEP
        )
    steps = sol.nfev // _STAGES_PER_STEP
    ys = sol.y  # (size + batch, samples)
    phases = np.exp(-1j * ys[kernel.size :].real)  # (batch, samples)
    amps = ys[: kernel.size].reshape(kernel.dim, kernel.batch, -1) * phases[None]
    results = []
    for b, h in enumerate(hamiltonians):
        states = np.ascontiguousarray(amps[:, b, :].T)
        drift = float(np.max(np.abs(np.linalg.norm(states, axis=1) - 1.0)))
        final = StateVector(h.basis, states[-1], check_norm=False)
        results.append(EvolutionResult(final, times.copy(), states, drift, steps))
    return results


def evolve(
    hamiltonian: TimeDependentHamiltonian,
    psi0,
    t_final=None,
    sample_count: int = 21,
    tol: float = DEFAULT_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
    dense_limit: int = DENSE_LIMIT,
) -> EvolutionResult:
    """Propagate ``psi0`` under ``hamiltonian`` from ``t = 0`` to ``t_final``.

    Parameters
    ----------
    hamiltonian : TimeDependentHamiltonian
    psi0 : StateVector or array_like
        Normalized initial state.
    t_final : float, optional
        Defaults to the Hamiltonian's own ``t_final``.
    sample_count : int
        Number of uniformly spaced sample times, endpoints included.
    tol : float
        Relative and absolute local error tolerance of the integrator.
    max_steps : int
        Step budget; exceeding it raises :class:`IntegrationError`.
    dense_limit : int
        Off-diagonal terms are applied as dense matrices up to this
        dimension and matrix-free above it.
    """
    return evolve_batch(
        [hamiltonian], [psi0], t_final, sample_count, tol, max_steps, dense_limit
    )[0]


def instantaneous_spectrum(hamiltonian: TimeDependentHamiltonian, t: float, eigenvectors: bool = False):
    """Ascending eigenvalues of ``H(t)`` (and eigenvectors as columns)."""
    matrix = evaluate(hamiltonian, t)
    if eigenvectors:
        return np.linalg.eigh(matrix)
    return np.linalg.eigvalsh(matrix)


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vector)))
    return vector * (abs(vector[k]) / vector[k])


def adiabatic_initial_state(hamiltonian: TimeDependentHamiltonian, ideal: bool = False) -> StateVector:
    """Ground state of ``H(0)``.

    With ``ideal=True`` on a qutrit basis, return the exact ``|0, ..., 0>``
    instead. The global phase is fixed so the largest amplitude is real and
    positive.
    """
    basis = hamiltonian.basis
    if ideal:
        if basis.kind is not SiteKind.QUTRIT:
            raise InvalidArgumentError("the ideal start state is defined for qutrits only")
        return zero_state(basis.n_sites)
    values, vectors = instantaneous_spectrum(hamiltonian, 0.0, eigenvectors=True)
    scale = max(abs(values[0]), abs(values[-1]))
    if values.size > 1 and values[1] - values[0] <= 1e-10 * scale:
        raise DegenerateGroundStateError("ground level of H(0) is degenerate")
    return StateVector(basis, _fix_phase(vectors[:, 0]))
