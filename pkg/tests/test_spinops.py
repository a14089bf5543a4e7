import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bqa.exceptions import InvalidArgumentError
from bqa.spinops import SiteBasis, is_hermitian, lift, pauli_operator, spin1_operator, two_site

from .oracles import embed, spin_matrices

S = 1 / np.sqrt(2)


def test_sz_is_diagonal():
    np.testing.assert_array_equal(spin1_operator("Sz"), np.diag([1, 0, -1]))


def test_sx2_matrix():
    expected = 0.5 * np.array([[1, 0, 1], [0, 2, 0], [1, 0, 1]])
    np.testing.assert_allclose(spin1_operator("Sx2"), expected, atol=1e-15)


def test_sz2_is_square_of_sz():
    sz = spin1_operator("Sz")
    np.testing.assert_array_equal(spin1_operator("Sz2"), sz @ sz)


def test_spin1_matches_ladder_construction():
    sx, _, sz = spin_matrices(1)
    np.testing.assert_allclose(spin1_operator("Sx"), sx, atol=1e-15)
    np.testing.assert_allclose(spin1_operator("Sx2"), sx @ sx, atol=1e-15)
    np.testing.assert_allclose(spin1_operator("Sz"), sz, atol=0)


def test_spin1_commutator():
    sx, sy, sz = spin_matrices(1)
    sx_pkg = spin1_operator("Sx")
    sz_pkg = spin1_operator("Sz")
    np.testing.assert_allclose(sx_pkg @ sy - sy @ sx_pkg, 1j * sz_pkg, atol=1e-15)


def test_unknown_operator_rejected():
    with pytest.raises(InvalidArgumentError):
        spin1_operator("Sy")
    with pytest.raises(InvalidArgumentError):
        pauli_operator("Y")


def test_pauli_matrices():
    np.testing.assert_array_equal(pauli_operator("Z"), np.diag([1, -1]))
    np.testing.assert_array_equal(pauli_operator("X"), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(pauli_operator("X") @ pauli_operator("X"), np.eye(2))


def test_lift_eigenvalue_on_basis_state():
    basis = SiteBasis.qutrits(2)
    op = lift(spin1_operator("Sz"), 0, basis)
    k = basis.encode((1, 0))
    vec = np.zeros(9)
    vec[k] = 1
    np.testing.assert_allclose(op @ vec, vec)


@pytest.mark.parametrize("basis", [SiteBasis.qutrits(3), SiteBasis.qubits(4)])
def test_lift_identity(basis):
    eye = np.eye(basis.local_dim)
    for site in range(basis.n_sites):
        np.testing.assert_array_equal(lift(eye, site, basis), np.eye(basis.dim))


@given(st.integers(1, 4), st.data())
def test_lift_sz_traceless(n, data):
    site = data.draw(st.integers(0, n - 1))
    assert abs(np.trace(lift(spin1_operator("Sz"), site, SiteBasis.qutrits(n)))) < 1e-12


@given(st.integers(1, 3), st.data())
def test_lift_matches_explicit_embedding(n, data):
    site = data.draw(st.integers(0, n - 1))
    which = data.draw(st.sampled_from(["Sz", "Sx", "Sz2", "Sx2"]))
    local = spin1_operator(which)
    np.testing.assert_allclose(lift(local, site, SiteBasis.qutrits(n)), embed({site: local}, n, 3), atol=1e-15)


def test_lift_rejects_bad_input():
    basis = SiteBasis.qutrits(2)
    with pytest.raises(InvalidArgumentError):
        lift(pauli_operator("Z"), 0, basis)
    with pytest.raises(InvalidArgumentError):
        lift(spin1_operator("Sz"), 2, basis)


def test_two_site_examples():
    basis = SiteBasis.qutrits(2)
    sz = spin1_operator("Sz")
    op = two_site(sz, 0, sz, 1, basis)
    k = basis.encode((1, -1))
    assert op[k, k] == -1
    np.testing.assert_array_equal(op, two_site(sz, 1, sz, 0, basis))
    z = pauli_operator("Z")
    np.testing.assert_array_equal(two_site(z, 0, z, 1, SiteBasis.qubits(2)), np.diag([1, -1, -1, 1]))


def test_two_site_same_site_rejected():
    sz = spin1_operator("Sz")
    with pytest.raises(InvalidArgumentError):
        two_site(sz, 1, sz, 1, SiteBasis.qutrits(2))


@given(st.integers(2, 3), st.data())
def test_lifted_operators_commute_on_distinct_sites(n, data):
    i, j = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    basis = SiteBasis.qutrits(n)
    a = lift(spin1_operator("Sx"), i, basis)
    b = lift(spin1_operator("Sz"), j, basis)
    np.testing.assert_array_equal(a @ b - b @ a, 0)


@pytest.mark.parametrize("which", ["Sz", "Sx", "Sz2", "Sx2"])
def test_hermitian_and_spectrum_preserved(which):
    local = spin1_operator(which)
    basis = SiteBasis.qutrits(2)
    assert is_hermitian(local)
    lifted = lift(local, 1, basis)
    assert is_hermitian(lifted)
    local_ev = np.unique(np.round(np.linalg.eigvalsh(local), 10))
    lifted_ev = np.unique(np.round(np.linalg.eigvalsh(lifted), 10))
    np.testing.assert_allclose(local_ev, lifted_ev, atol=1e-10)


def test_basis_encode_decode_roundtrip():
    basis = SiteBasis.qutrits(3)
    for k in range(basis.dim):
        assert basis.encode(basis.decode(k)) == k
    # site 0 varies slowest
    assert basis.decode(0) == (1, 1, 1)
    assert basis.decode(1) == (1, 1, 0)
    assert basis.decode(9) == (0, 1, 1)
    with pytest.raises(InvalidArgumentError):
        basis.encode((1, 2, 0))
