import numpy as np
import pytest
from scipy.linalg import expm

from bqa.evolve import (
    EvolutionResult,
    StateVector,
    adiabatic_initial_state,
    evolve,
    evolve_batch,
    instantaneous_spectrum,
    zero_state,
)
from bqa.exceptions import DegenerateGroundStateError, IntegrationError, InvalidArgumentError
from bqa.hamiltonians import (
    DenseOperator,
    DiagonalOperator,
    Term,
    TimeDependentHamiltonian,
    bqa_hamiltonian,
    evaluate,
    qa_hamiltonian,
    single_qutrit_field_hamiltonian,
)
from bqa.instances import ProblemInstance, ferromagnetic_ring, random_fully_connected
from bqa.schedules import BqaSchedule, QaSchedule
from bqa.spinops import SiteBasis

from .oracles import propagate_midpoint


def single(a0_tf=100.0, h=0.0, protocol="gauss", ratio=20.0):
    return single_qutrit_field_hamiltonian(h, BqaSchedule(ratio, 1.0, a0_tf, protocol))


def static_hamiltonian(matrix, t_final):
    basis = SiteBasis.qutrits(int(round(np.log(len(matrix)) / np.log(3))))
    return TimeDependentHamiltonian(basis, [Term(DenseOperator(matrix))], t_final)


def test_state_vector_validation():
    basis = SiteBasis.qutrits(1)
    with pytest.raises(InvalidArgumentError):
        StateVector(basis, [1, 1, 0])
    with pytest.raises(InvalidArgumentError):
        StateVector(basis, [1, 0])
    psi = StateVector.from_configuration(basis, (0,))
    assert psi.norm == 1
    np.testing.assert_array_equal(psi.probabilities(), [0, 1, 0])


def test_stationary_basis_state():
    basis = SiteBasis.qutrits(2)
    H = TimeDependentHamiltonian(basis, [Term(DiagonalOperator(np.arange(9.0)))], 5.0)
    result = evolve(H, StateVector.from_configuration(basis, (1, -1)), sample_count=11)
    k = basis.encode((1, -1))
    np.testing.assert_allclose(result.probabilities[:, k], 1.0, atol=1e-12)
    assert isinstance(result, EvolutionResult)
    assert len(result.samples) == 11
    assert result.times[0] == 0 and result.times[-1] == 5.0


def test_static_hamiltonian_matches_exact_propagator():
    rng = np.random.default_rng(1)
    M = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    M = M + M.conj().T
    t_final = 10 / np.linalg.norm(M, 2)
    psi0 = rng.normal(size=9) + 1j * rng.normal(size=9)
    psi0 /= np.linalg.norm(psi0)
    result = evolve(static_hamiltonian(M, t_final), psi0, sample_count=3)
    exact = expm(-1j * t_final * M) @ psi0
    np.testing.assert_allclose(result.final_state.amplitudes, exact, atol=1e-8)


def test_matches_midpoint_exponential_reference():
    inst = random_fully_connected(2, 1.0, 5)
    s = BqaSchedule(b0=3.0, a0=1.0, t_final=10.0)
    H = bqa_hamiltonian(inst, s)
    psi0 = adiabatic_initial_state(H)
    result = evolve(H, psi0, sample_count=2)
    reference = propagate_midpoint(lambda t: evaluate(H, t), psi0.amplitudes, 10.0, 4000)
    np.testing.assert_allclose(result.final_state.amplitudes, reference, atol=1e-5)


def test_single_qutrit_bifurcation():
    H = single()
    result = evolve(H, adiabatic_initial_state(H))
    p_plus, p_zero, p_minus = result.final_state.probabilities()
    assert abs(p_plus - 0.5) < 0.05 and abs(p_minus - 0.5) < 0.05
    assert p_zero < 0.02
    assert result.norm_drift < 1e-9
    sums = result.probabilities.sum(axis=1)
    np.testing.assert_allclose(sums, 1.0, atol=1e-8)
    assert np.all(result.probabilities >= 0)


def test_sudden_limit_freezes_state():
    H = single(a0_tf=0.1)
    result = evolve(H, adiabatic_initial_state(H))
    assert result.final_state.probabilities()[1] > 0.9


def test_field_mirror():
    finals = []
    for h in (0.2, -0.2):
        H = single(a0_tf=50.0, h=h)
        finals.append(evolve(H, adiabatic_initial_state(H), sample_count=2).final_state.probabilities())
    np.testing.assert_allclose(finals[0], finals[1][::-1], atol=1e-8)


def test_global_shift_invariance():
    inst = ferromagnetic_ring(2, 1.0, 0.1)
    H = bqa_hamiltonian(inst, BqaSchedule(20.0, 2.0, 20.0))
    shifted = TimeDependentHamiltonian(H.basis, [*H.terms, Term(DiagonalOperator(np.full(9, 7.5)))], 20.0)
    psi0 = adiabatic_initial_state(H)
    a = evolve(H, psi0, sample_count=5).probabilities
    b = evolve(shifted, psi0, sample_count=5).probabilities
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_self_convergence():
    # final-state error of the adaptive scheme is proportional to tol, so each
    # tenfold tightening should shrink successive differences about tenfold
    H = single(a0_tf=20.0)
    psi0 = adiabatic_initial_state(H)
    states = [evolve(H, psi0, sample_count=2, tol=tol).final_state.amplitudes for tol in (1e-6, 1e-7, 1e-8)]
    coarse = np.linalg.norm(states[0] - states[1])
    fine = np.linalg.norm(states[1] - states[2])
    assert fine < coarse
    assert 3 < coarse / fine < 30


def test_batch_matches_individual_and_matrix_free():
    s = BqaSchedule(20.0, 2.0, 10.0)
    hams = [bqa_hamiltonian(random_fully_connected(3, 1.0, seed), s) for seed in range(3)]
    starts = [adiabatic_initial_state(h) for h in hams]
    batch = evolve_batch(hams, starts, sample_count=3)
    for h, psi0, res in zip(hams, starts, batch):
        single_run = evolve(h, psi0, sample_count=3, dense_limit=0)
        np.testing.assert_allclose(res.states, single_run.states, atol=1e-9)


def test_batch_rejects_mismatched_schedules():
    inst = ferromagnetic_ring(2)
    hams = [bqa_hamiltonian(inst, BqaSchedule(20.0, a0, 10.0)) for a0 in (1.0, 2.0)]
    with pytest.raises(InvalidArgumentError):
        evolve_batch(hams, [zero_state(2)] * 2)


def test_step_budget_exhausted():
    H = single()
    with pytest.raises(IntegrationError) as info:
        evolve(H, adiabatic_initial_state(H), max_steps=5)
    assert info.value.t_reached is not None and info.value.t_reached < 100


def test_invalid_arguments():
    H = single()
    with pytest.raises(InvalidArgumentError):
        evolve(H, zero_state(1), sample_count=1)
    with pytest.raises(InvalidArgumentError):
        evolve(H, zero_state(1), t_final=200.0)
    with pytest.raises(InvalidArgumentError):
        evolve(H, zero_state(2))


def test_spectrum_landmarks():
    H = single(a0_tf=1.0)
    np.testing.assert_allclose(instantaneous_spectrum(H, 0.5), [-1, 0, 1], atol=1e-12)
    end = instantaneous_spectrum(H, 1.0)
    assert end[1] - end[0] < 1e-3
    assert end[1] - end[0] == pytest.approx(np.exp(-10) / 20, rel=0.05)  # A(t_f)^2 / (2 B0) splitting
    # |0> only couples to the flip-even combination of |+1> and |-1>
    even = np.array([[0, 1, 0], [1 / np.sqrt(2), 0, 1 / np.sqrt(2)]])
    grid = np.linspace(0, 1, 401)
    gaps = [np.diff(np.linalg.eigvalsh(even @ evaluate(H, float(t)) @ even.T))[0] for t in grid]
    assert abs(grid[int(np.argmin(gaps))] - 0.5) < 0.05
    values, vectors = instantaneous_spectrum(H, 0.5, eigenvectors=True)
    np.testing.assert_allclose(evaluate(H, 0.5) @ vectors, vectors * values, atol=1e-12)


def test_adiabatic_initial_states():
    psi = adiabatic_initial_state(single())
    assert psi.probabilities()[1] > 0.999
    assert np.argmax(np.abs(psi.amplitudes)) == 1 and psi.amplitudes[1].real > 0
    H = qa_hamiltonian(ProblemInstance(2, [(0, 1, 1.0)], [0.1, 0.2]), QaSchedule())
    np.testing.assert_allclose(np.abs(adiabatic_initial_state(H).amplitudes), 0.5, atol=1e-12)
    ideal = adiabatic_initial_state(bqa_hamiltonian(ferromagnetic_ring(2), BqaSchedule()), ideal=True)
    assert ideal.probabilities()[4] == 1
    with pytest.raises(InvalidArgumentError):
        adiabatic_initial_state(H, ideal=True)


def test_degenerate_initial_state_rejected():
    basis = SiteBasis.qutrits(1)
    H = TimeDependentHamiltonian(basis, [Term(DiagonalOperator(np.zeros(3)))], 1.0)
    with pytest.raises(DegenerateGroundStateError):
        adiabatic_initial_state(H)
