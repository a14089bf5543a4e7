"""Bifurcation-based quantum annealing on spin-1 qutrits."""
__version__ = "0.1.0"

from .analysis import benchmark, sampling_distribution, success_curve, success_probability
from .estimators import BifurcationAnnealer, MeanFieldMagnetization, TransverseFieldAnnealer
from .evolve import EvolutionResult, StateVector, adiabatic_initial_state, evolve, evolve_batch
from .hamiltonians import bqa_hamiltonian, qa_hamiltonian
from .instances import (
    ProblemInstance,
    brute_force_ground_states,
    ferromagnetic_ring,
    random_fully_connected,
)
from .meanfield import phase_diagram, solve_selfconsistent
from .nested import nest_hamiltonian
from .schedules import BqaSchedule, QaSchedule

__all__ = [
    "BifurcationAnnealer",
    "BqaSchedule",
    "EvolutionResult",
    "MeanFieldMagnetization",
    "ProblemInstance",
    "QaSchedule",
    "StateVector",
    "TransverseFieldAnnealer",
    "adiabatic_initial_state",
    "benchmark",
    "bqa_hamiltonian",
    "brute_force_ground_states",
    "evolve",
    "evolve_batch",
    "ferromagnetic_ring",
    "nest_hamiltonian",
    "phase_diagram",
    "qa_hamiltonian",
    "random_fully_connected",
    "sampling_distribution",
    "solve_selfconsistent",
    "success_curve",
    "success_probability",
]
