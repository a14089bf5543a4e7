"""Time-dependent Hamiltonians for bifurcation and standard quantum annealing.

A :class:`TimeDependentHamiltonian` is a sum of :class:`Term` objects, each an
operator times an optional real coefficient function of time. Operators are
kept factored (diagonal vectors or a single-site operator summed over all
sites) so that ``H(t) @ psi`` can be applied without forming the full matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import InvalidArgumentError
from .instances import ProblemInstance, energies
from .schedules import BqaSchedule, Coefficient, QaSchedule, _check_time
from .spinops import SiteBasis, SiteKind, lift, pauli_operator, spin1_operator

__all__ = [
    "DiagonalOperator",
    "SiteSumOperator",
    "DenseOperator",
    "Term",
    "TimeDependentHamiltonian",
    "problem_diagonal",
    "problem_operator",
    "bqa_hamiltonian",
    "qa_hamiltonian",
    "single_qutrit_field_hamiltonian",
    "evaluate",
    "flip_operator",
]


class DiagonalOperator:
    """Operator diagonal in the computational basis."""

    diagonal = True

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)
        self.values.setflags(write=False)
        self.dim = self.values.shape[0]

    def toarray(self) -> np.ndarray:
        return np.diag(self.values).astype(complex)

    def apply(self, psi):
        psi = np.asarray(psi)
        return (self.values if psi.ndim == 1 else self.values[:, None]) * psi

    def __eq__(self, other):
        return isinstance(other, DiagonalOperator) and np.array_equal(self.values, other.values)

    __hash__ = None


class SiteSumOperator:
    """``sum_i lift(local, i)`` over every site of ``basis``."""

    diagonal = False

    def __init__(self, local, basis: SiteBasis):
        self.local = np.asarray(local, dtype=complex)
        self.local.setflags(write=False)
        if self.local.shape != (basis.local_dim, basis.local_dim):
            raise InvalidArgumentError("local operator does not match basis")
        self.basis = basis
        self.dim = basis.dim

    def toarray(self) -> np.ndarray:
        return sum(lift(self.local, i, self.basis) for i in range(self.basis.n_sites))

    def apply(self, psi):
        """Matrix-free application; ``psi`` has shape ``(dim,)`` or ``(dim, k)``."""
        psi = np.asarray(psi)
        n, d = self.basis.n_sites, self.basis.local_dim
        extra = psi.shape[1:]
        tensor = psi.reshape((d,) * n + extra)
        out = np.zeros_like(tensor, dtype=complex)
        for site in range(n):
            moved = np.tensordot(self.local, tensor, axes=([1], [site]))
            out += np.moveaxis(moved, 0, site)
        return out.reshape(psi.shape)

    def __eq__(self, other):
        return (
            isinstance(other, SiteSumOperator)
            and self.basis == other.basis
            and np.array_equal(self.local, other.local)
        )

    __hash__ = None


class DenseOperator:
    diagonal = False

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.matrix.setflags(write=False)
        self.dim = self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return np.array(self.matrix)

    def apply(self, psi):
        return self.matrix @ psi

    def __eq__(self, other):
        return isinstance(other, DenseOperator) and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Term:
    operator: DiagonalOperator | SiteSumOperator | DenseOperator
    coefficient: Coefficient | None = None  # None: time independent

    @property
    def static(self) -> bool:
        return self.coefficient is None


@dataclass(frozen=True, eq=False)
class TimeDependentHamiltonian:
    """``H(t) = sum_k c_k(t) O_k`` over ``0 <= t <= t_final``."""

    basis: SiteBasis
    terms: tuple
    t_final: float

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            if term.operator.dim != self.basis.dim:
                raise InvalidArgumentError("term dimension does not match basis")

    @property
    def dim(self) -> int:
        return self.basis.dim

    @cached_property
    def static_part(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for term in self.terms:
            if term.static:
                out += term.operator.toarray()
        return out

    @property
    def driver_parts(self) -> list:
        """``(matrix, coefficient)`` pairs of the time-dependent terms."""
        return [(t.operator.toarray(), t.coefficient) for t in self.terms if not t.static]

    def coefficients(self, t) -> list:
        return [1.0 if term.static else term.coefficient(t) for term in self.terms]

    def __call__(self, t) -> np.ndarray:
        return evaluate(self, t)

    def apply(self, t, psi):
        out = np.zeros_like(np.asarray(psi), dtype=complex)
        for c, term in zip(self.coefficients(t), self.terms):
            out += c * term.operator.apply(psi)
        return out


def problem_diagonal(instance: ProblemInstance, basis: SiteBasis) -> np.ndarray:
    """Diagonal of the problem operator (Sz -> spin-1 Sz or Pauli Z)."""
    if basis.n_sites != instance.n:
        raise InvalidArgumentError(
            f"basis has {basis.n_sites} sites but instance has {instance.n} spins"
        )
    return energies(instance, basis.configurations)


def problem_operator(instance: ProblemInstance, basis: SiteBasis) -> np.ndarray:
    return np.diag(problem_diagonal(instance, basis)).astype(complex)


def bqa_hamiltonian(
    instance: ProblemInstance, schedule: BqaSchedule, *, sx2_weight: float = 0.0
) -> TimeDependentHamiltonian:
    """``sum_i [-A(t) Sx_i - B(t) (Sz_i)^2] + H_problem`` on qutrits.

    ``sx2_weight`` adds ``-sx2_weight * A(t) * sum_i (Sx_i)^2``, a driver
    that couples ``m = +1`` and ``m = -1`` directly. It is off by default.
    """
    basis = SiteBasis.qutrits(instance.n)
    sz2_sum = (basis.configurations**2).sum(axis=1)
    terms = [
        Term(SiteSumOperator(spin1_operator("Sx"), basis), Coefficient(schedule, "A", -1.0)),
        Term(DiagonalOperator(sz2_sum), Coefficient(schedule, "B", -1.0)),
        Term(DiagonalOperator(problem_diagonal(instance, basis))),
    ]
    if sx2_weight:
        terms.append(
            Term(
                SiteSumOperator(spin1_operator("Sx2"), basis),
                Coefficient(schedule, "A", -float(sx2_weight)),
            )
        )
    return TimeDependentHamiltonian(basis, terms, schedule.t_final)


def qa_hamiltonian(instance: ProblemInstance, schedule: QaSchedule) -> TimeDependentHamiltonian:
    """``(1 - t/t_f)(-gamma sum_i X_i) + (t/t_f) H_problem`` on qubits."""
    basis = SiteBasis.qubits(instance.n)
    terms = [
        Term(
            SiteSumOperator(pauli_operator("X"), basis),
            Coefficient(schedule, "driver_weight", -schedule.gamma),
        ),
        Term(
            DiagonalOperator(problem_diagonal(instance, basis)),
            Coefficient(schedule, "problem_weight", 1.0),
        ),
    ]
    return TimeDependentHamiltonian(basis, terms, schedule.t_final)


def single_qutrit_field_hamiltonian(h: float, schedule: BqaSchedule) -> TimeDependentHamiltonian:
    """``-A(t) Sx - B(t) Sz^2 - h Sz`` for one qutrit."""
    return bqa_hamiltonian(ProblemInstance(1, (), [h]), schedule)


def evaluate(hamiltonian: TimeDependentHamiltonian, t: float) -> np.ndarray:
    """Dense matrix ``H(t)``."""
    _check_time(t, hamiltonian.t_final)
    out = np.zeros((hamiltonian.dim, hamiltonian.dim), dtype=complex)
    for c, term in zip(hamiltonian.coefficients(t), hamiltonian.terms):
        if term.operator.diagonal:
            out[np.diag_indices_from(out)] += c * term.operator.values
        else:
            out += c * term.operator.toarray()
    return out


def flip_operator(basis: SiteBasis) -> np.ndarray:
    """Permutation matrix sending every local state ``m`` to ``-m``."""
    reverse = np.eye(basis.local_dim)[::-1]
    out = np.ones((1, 1))
    for _ in range(basis.n_sites):
        out = np.kron(out, reverse)
    return out.astype(complex)
