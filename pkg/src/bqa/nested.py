"""Qutrits realised as the triplet sector of two physical qubits.

Logical qutrit ``i`` is built from qubits ``2i`` and ``2i+1`` (site-0
slowest ordering is kept on the 2N-qubit register). With
``S_i = (sigma_{i1} + sigma_{i2}) / 2``:

* ``-B (Sz_i)^2 = -(B/2)(sz_{i1} sz_{i2} + 1)``, one intra-qutrit bond;
* ``-A Sx_i = -(A/2)(sx_{i1} + sx_{i2})``;
* ``-J_ij Sz_i Sz_j`` becomes four qubit bonds of strength ``J_ij / 4``;
* ``-h_i Sz_i`` becomes two local fields ``h_i / 2``.

Triplet basis states all have real, positive overlaps with their qubit-pair
expressions: ``|+1> = |++>``, ``|0> = (|+-> + |-+>)/sqrt(2)``,
``|-1> = |-->``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .evolve import StateVector
from .exceptions import InvalidArgumentError
from .hamiltonians import DiagonalOperator, SiteSumOperator, Term, TimeDependentHamiltonian
from .instances import ProblemInstance
from .schedules import BqaSchedule, Coefficient
from .spinops import SiteBasis, pauli_operator, two_site

__all__ = [
    "NestedMapping",
    "nest_hamiltonian",
    "nested_initial_state",
    "project_to_qutrit",
    "site_spin_squared",
]

_S = 1.0 / np.sqrt(2.0)
# columns: |+1>, |0>, |-1> in the pair basis (++, +-, -+, --)
_TRIPLET = np.array([[1, 0, 0], [0, _S, 0], [0, _S, 0], [0, 0, 1]], dtype=complex)


@dataclass(frozen=True)
class NestedMapping:
    """Index bookkeeping between ``n`` logical qutrits and ``2n`` qubits."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("need at least one logical qutrit")

    @property
    def qubit_basis(self) -> SiteBasis:
        return SiteBasis.qubits(2 * self.n)

    @property
    def qutrit_basis(self) -> SiteBasis:
        return SiteBasis.qutrits(self.n)

    @staticmethod
    def qubits_of(i: int) -> tuple[int, int]:
        return 2 * i, 2 * i + 1

    @cached_property
    def isometry(self) -> np.ndarray:
        """``(4**n, 3**n)`` matrix whose columns are the triplet product states."""
        out = np.ones((1, 1), dtype=complex)
        for _ in range(self.n):
            out = np.kron(out, _TRIPLET)
        return out

    @cached_property
    def triplet_projector(self) -> np.ndarray:
        return self.isometry @ self.isometry.conj().T

    def bonds(self, instance: ProblemInstance) -> list:
        """Two-qubit ``sz sz`` terms as ``(a, b, weight, kind)``.

        ``kind`` is ``"intra"`` for the bifurcation bond (its weight multiplies
        ``-B(t)/2``) and ``"inter"`` for problem bonds (weight ``J_ij/4``).
        """
        if instance.n != self.n:
            raise InvalidArgumentError("instance size does not match mapping")
        out = [(*self.qubits_of(i), 1.0, "intra") for i in range(self.n)]
        for i, j, coupling in instance.bonds:
            for a in self.qubits_of(i):
                for b in self.qubits_of(j):
                    out.append((a, b, coupling / 4.0, "inter"))
        return out


def nest_hamiltonian(
    instance: ProblemInstance, schedule: BqaSchedule, *, keep_constant: bool = True
) -> TimeDependentHamiltonian:
    """2N-qubit Hamiltonian equivalent to the qutrit bifurcation Hamiltonian.

    With ``keep_constant`` the ``+1`` of ``(sz sz + 1)/2`` is retained and the
    triplet block equals the qutrit Hamiltonian exactly. Without it the
    nested Hamiltonian exceeds the qutrit one by ``n * B(t) / 2`` times the
    identity, a pure global phase.
    """
    mapping = NestedMapping(instance.n)
    basis = mapping.qubit_basis
    sz = basis.configurations.astype(float)  # (dim, 2n) Pauli eigenvalues

    intra = np.zeros(basis.dim)
    problem = np.zeros(basis.dim)
    for a, b, weight, kind in mapping.bonds(instance):
        if kind == "intra":
            intra += 0.5 * weight * (sz[:, a] * sz[:, b] + (1.0 if keep_constant else 0.0))
        else:
            problem -= weight * sz[:, a] * sz[:, b]
    for i, h in enumerate(instance.fields):
        for a in mapping.qubits_of(i):
            problem -= 0.5 * h * sz[:, a]

    terms = [
        Term(SiteSumOperator(pauli_operator("X"), basis), Coefficient(schedule, "A", -0.5)),
        Term(DiagonalOperator(intra), Coefficient(schedule, "B", -1.0)),
        Term(DiagonalOperator(problem)),
    ]
    return TimeDependentHamiltonian(basis, terms, schedule.t_final)


def nested_initial_state(n: int) -> StateVector:
    """Product over qutrits of ``(|+-> + |-+>)/sqrt(2)``."""
    mapping = NestedMapping(n)
    zero = np.zeros(3**n, dtype=complex)
    zero[mapping.qutrit_basis.encode((0,) * n)] = 1.0
    return StateVector(mapping.qubit_basis, mapping.isometry @ zero)


def project_to_qutrit(psi) -> tuple[StateVector, float]:
    """Triplet-sector amplitudes of a 2N-qubit state and the singlet leakage.

    Leakage is the singlet weight ``||psi||^2 - ||P psi||^2``, which equals
    ``1 - ||P psi||^2`` for a normalized input but does not absorb integrator
    norm drift. The returned qutrit state is not renormalised.
    """
    if isinstance(psi, StateVector):
        amps = psi.amplitudes
    else:
        amps = np.asarray(psi, dtype=complex)
    dim = amps.shape[0]
    n2 = int(round(np.log2(dim))) if dim > 0 else 0
    if 2**n2 != dim or n2 % 2:
        raise InvalidArgumentError(f"dimension {dim} is not 4**n")
    mapping = NestedMapping(n2 // 2)
    qutrit = mapping.isometry.conj().T @ amps
    leakage = float(np.vdot(amps, amps).real - np.vdot(qutrit, qutrit).real)
    return StateVector(mapping.qutrit_basis, qutrit, check_norm=False), max(leakage, 0.0)


def site_spin_squared(i: int, n: int) -> np.ndarray:
    """Total-spin operator ``S_i . S_i`` of logical site ``i`` on ``2n`` qubits."""
    basis = SiteBasis.qubits(2 * n)
    a, b = NestedMapping.qubits_of(i)
    sy = np.array([[0, -1j], [1j, 0]])
    out = 1.5 * np.eye(basis.dim, dtype=complex)
    for p in (pauli_operator("X"), sy, pauli_operator("Z")):
        out += 0.5 * two_site(p, a, p, b, basis)
    return out
