import numpy as np
import pytest

from qsqlearn.pauli import PauliString, all_pauli_strings, pauli_matrix
from qsqlearn.states import (
    ChoiState,
    Circuit,
    DenseOperator,
    DensityMatrix,
    StateVector,
    apply_gate,
    apply_pauli,
    bell_transform,
    bell_transform_amps,
    choi_of_circuit,
    choi_of_unitary,
    dominant_eigenstate,
    embed_operator,
    expansion_of_unitary,
    haar_random_state,
    haar_random_unitary,
    inverse_bell_transform,
    partial_trace,
    random_brickwork_circuit,
    unitary_of_choi,
)

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def test_statevector_normalization():
    with pytest.raises(ValueError):
        StateVector(1, np.array([1.0, 1.0]))
    StateVector(1, np.array([1.0, 1.0]) / np.sqrt(2))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(1, np.array([[1.0, 0.5], [0.2, 0.0]]))
    with pytest.raises(ValueError):
        DensityMatrix(1, np.diag([0.8, 0.8]))
    with pytest.raises(ValueError):
        DensityMatrix(1, np.diag([1.5, -0.5]))


def test_choi_layout_amplitudes():
    # amplitude at index i*2^n + j must equal U[j, i] / sqrt(2^n)
    u = haar_random_unitary(2, 0)
    v = choi_of_unitary(u).vec.amps
    for i in range(4):
        for j in range(4):
            assert v[i * 4 + j] == pytest.approx(u.entries[j, i] / 2)


def test_unitary_of_choi_roundtrip():
    u = haar_random_unitary(3, 1)
    v = choi_of_unitary(u)
    assert np.allclose(unitary_of_choi(v.vec.amps, 3), u.entries)


def test_choi_rejects_non_unitary():
    with pytest.raises(ValueError):
        choi_of_unitary(DenseOperator(1, np.array([[1, 0], [0, 0.5]])))


def test_bell_transform_matches_trace_oracle():
    rng = np.random.default_rng(7)
    for n in (1, 2):
        u = haar_random_unitary(n, rng)
        c = bell_transform(choi_of_unitary(u))
        for p in all_pauli_strings(n):
            ref = np.trace(pauli_matrix(p).conj().T @ u.entries) / 2**n
            assert abs(c[p.code] - ref) < 1e-12


def test_bell_transform_hadamard():
    c = bell_transform(choi_of_unitary(DenseOperator(1, H)))
    assert np.allclose(c, [0, 1 / np.sqrt(2), 0, 1 / np.sqrt(2)])


def test_inverse_bell_transform_roundtrip():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        amps = haar_random_state(2 * n, rng).amps
        c = bell_transform_amps(amps, n)
        assert np.allclose(inverse_bell_transform(c, n), amps)


def test_bell_basis_vectors_are_choi_states_of_paulis():
    n = 2
    for p in all_pauli_strings(n):
        e = np.zeros(4**n, dtype=complex)
        e[p.code] = 1.0
        v = inverse_bell_transform(e, n)
        ref = choi_of_unitary(DenseOperator(n, pauli_matrix(p))).vec.amps
        assert np.allclose(v, ref)


def test_apply_pauli_matches_dense():
    rng = np.random.default_rng(11)
    for letters in ("X", "ZY", "XIZ", "YYXZ"):
        p = PauliString.from_letters(letters)
        amps = haar_random_state(p.n, rng).amps
        assert np.allclose(apply_pauli(amps, p.n, p), pauli_matrix(p) @ amps)


def test_apply_gate_matches_embed():
    rng = np.random.default_rng(5)
    n = 3
    g = haar_random_unitary(2, rng).entries
    amps = haar_random_state(n, rng).amps
    for targets in ((0, 1), (1, 2), (2, 0)):
        direct = apply_gate(amps, n, g, targets)
        dense = embed_operator(g, targets, n) @ amps
        assert np.allclose(direct, dense)


def test_embed_operator_kron_oracle():
    g = haar_random_unitary(1, 2).entries
    assert np.allclose(embed_operator(g, (0,), 2), np.kron(g, np.eye(2)))
    assert np.allclose(embed_operator(g, (1,), 2), np.kron(np.eye(2), g))


def test_circuit_compile_matches_apply():
    rng = np.random.default_rng(9)
    c = random_brickwork_circuit(3, 3, rng)
    u = c.compile().entries
    amps = haar_random_state(3, rng).amps
    assert np.allclose(c.apply(amps.copy(), 3), u @ amps)
    assert c.depth == 3


def test_circuit_rejects_overlap_and_non_unitary():
    g = np.eye(4, dtype=complex)
    with pytest.raises(ValueError):
        Circuit(3, (((g, (0, 1)), (g, (1, 2))),))
    with pytest.raises(ValueError):
        Circuit(2, (((np.ones((4, 4)), (0, 1)),),))


def test_choi_of_circuit_matches_choi_of_unitary():
    c = random_brickwork_circuit(3, 2, 4)
    a = choi_of_circuit(c).vec.amps
    b = choi_of_unitary(c.compile()).vec.amps
    assert np.allclose(a, b)


def test_partial_trace_statevector_vs_kron_oracle():
    rng = np.random.default_rng(13)
    psi = haar_random_state(3, rng)
    rho = np.outer(psi.amps, psi.amps.conj())
    full = DensityMatrix(3, rho)
    for keep in ([0], [2], [0, 1], [1, 2], [0, 2]):
        a = partial_trace(psi, keep).entries
        b = partial_trace(full, keep).entries
        assert np.allclose(a, b)
    # explicit 2-qubit oracle: product state traces to its factors
    q0 = haar_random_state(1, rng).amps
    q1 = haar_random_state(1, rng).amps
    prod = StateVector(2, np.kron(q0, q1))
    assert np.allclose(partial_trace(prod, [0]).entries, np.outer(q0, q0.conj()))
    assert np.allclose(partial_trace(prod, [1]).entries, np.outer(q1, q1.conj()))


def test_partial_trace_choi_of_identity_is_maximally_mixed():
    v = choi_of_unitary(DenseOperator(2, np.eye(4, dtype=complex)))
    red = partial_trace(v, [0, 1]).entries
    assert np.allclose(red, np.eye(4) / 4)


def test_dominant_eigenstate_dense_and_power():
    rng = np.random.default_rng(17)
    psi = haar_random_state(3, rng).amps
    rho = 0.9 * np.outer(psi, psi.conj()) + 0.1 * np.eye(8) / 8
    vec, val = dominant_eigenstate(DensityMatrix(3, rho))
    assert abs(np.vdot(vec.amps, psi)) ** 2 > 0.999
    assert val == pytest.approx(0.9 + 0.1 / 8)
    # force the power-iteration branch on a 128-dim state
    psi7 = haar_random_state(7, rng).amps
    rho7 = 0.95 * np.outer(psi7, psi7.conj()) + 0.05 * np.eye(128) / 128
    vec7, _ = dominant_eigenstate(DensityMatrix(7, rho7))
    assert abs(np.vdot(vec7.amps, psi7)) ** 2 > 0.999


def test_haar_random_unitary_is_unitary():
    for m in (1, 2, 3):
        assert haar_random_unitary(m, m).is_unitary()


def test_expansion_of_unitary_cnot():
    e = expansion_of_unitary(DenseOperator(2, CNOT))
    got = {p.letters: c for p, c in e.items()}
    assert set(got) == {"II", "IX", "ZI", "ZX"}
    assert got["II"] == pytest.approx(0.5)
    assert got["ZX"] == pytest.approx(-0.5)
    assert e.total_mass() == pytest.approx(1.0)


def test_parseval_for_random_unitaries():
    rng = np.random.default_rng(23)
    for n in (1, 2, 3):
        c = bell_transform(choi_of_unitary(haar_random_unitary(n, rng)))
        assert np.sum(np.abs(c) ** 2) == pytest.approx(1.0, abs=1e-12)
