import numpy as np
import pytest

from qsqlearn.oracle import (
    NoiseModel,
    Observable,
    QsqOracle,
    expectation_exact,
)
from qsqlearn.pauli import PauliPrefix, PauliString, all_pauli_strings, pauli_matrix
from qsqlearn.states import (
    DenseOperator,
    DensityMatrix,
    choi_of_unitary,
    haar_random_state,
    haar_random_unitary,
)

H = DenseOperator(1, np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2))


def _dense_value(choi, obs):
    mat = obs.dense_matrix(choi.vec.m)
    return float(np.real(choi.vec.amps.conj() @ mat @ choi.vec.amps))


@pytest.fixture(scope="module")
def choi2():
    return choi_of_unitary(haar_random_unitary(2, 42))


@pytest.mark.parametrize(
    "make",
    [
        lambda: Observable.subset_mass(PauliPrefix(2, "Z")),
        lambda: Observable.subset_mass(PauliPrefix(2, "")),
        lambda: Observable.subset_mass(
            [PauliString.from_letters("ZX"), PauliString.from_letters("IY")]
        ),
        lambda: Observable.letter_mass(2, 0, "I"),
        lambda: Observable.letter_mass(2, 1, "Y"),
        lambda: Observable.doubled_pauli(PauliString.from_letters("XZYI")),
        lambda: Observable.sign_probe(
            PauliString.from_letters("XX"), PauliString.from_letters("ZY")
        ),
        lambda: Observable.projected_doubled_pauli(
            PauliString.from_letters("XZ"), (1,)
        ),
        lambda: Observable.projected_doubled_pauli(
            PauliString.from_letters("YIZX"), (0, 1)
        ),
    ],
)
def test_structured_paths_match_dense_matrices(choi2, make):
    obs = make()
    assert expectation_exact(choi2, obs) == pytest.approx(
        _dense_value(choi2, obs), abs=1e-10
    )


def test_all_variant_norms_at_most_one(choi2):
    for obs in [
        Observable.subset_mass(PauliPrefix(2, "X")),
        Observable.letter_mass(2, 0, "Z"),
        Observable.doubled_pauli(PauliString.from_letters("YZXI")),
        Observable.sign_probe(
            PauliString.from_letters("XI"), PauliString.from_letters("IZ")
        ),
        Observable.projected_doubled_pauli(PauliString.from_letters("ZZ"), (0,)),
    ]:
        assert np.linalg.norm(obs.dense_matrix(4), ord=2) <= 1 + 1e-9


def test_dense_observable_norm_check():
    Observable.dense(np.eye(4))
    with pytest.raises(ValueError):
        Observable.dense(2 * np.eye(4))


def test_sign_probe_value_on_hadamard():
    obs = Observable.sign_probe(
        PauliString.from_letters("X"), PauliString.from_letters("Z")
    )
    # both coefficients are 1/sqrt(2), so 2 Re(c_X* c_Z) = 1
    assert expectation_exact(choi_of_unitary(H), obs) == pytest.approx(1.0)


def test_subset_mass_prefix_equals_explicit_set(choi2):
    pre = PauliPrefix(2, "Y")
    a = expectation_exact(choi2, Observable.subset_mass(pre))
    b = expectation_exact(choi2, Observable.subset_mass(set(pre.members())))
    assert a == pytest.approx(b)


def test_expectation_on_density_matrix():
    rho = DensityMatrix(2, np.eye(4) / 4)
    obs = Observable.doubled_pauli(PauliString.from_letters("ZZ"))
    assert expectation_exact(rho, obs) == pytest.approx(0.0)


def test_oracle_ledger_and_tolerance():
    oracle = QsqOracle(choi_of_unitary(H))
    obs = Observable.subset_mass(PauliPrefix(1, "X"))
    val = oracle.query(obs, 0.1)
    assert val == pytest.approx(0.5)
    assert oracle.ledger.total == 1
    assert oracle.ledger.min_tolerance == pytest.approx(0.1)
    oracle.query(obs, 0.05)
    assert oracle.ledger.per_label[obs.label()] == 2
    assert oracle.ledger.min_tolerance == pytest.approx(0.05)
    with pytest.raises(ValueError):
        oracle.query(obs, 0.0)


def test_cached_path_matches_uncached(choi2):
    oracle = QsqOracle(choi2)
    for obs in [
        Observable.subset_mass(PauliPrefix(2, "ZX")),
        Observable.subset_mass([PauliString.from_letters("YY")]),
        Observable.sign_probe(
            PauliString.from_letters("II"), PauliString.from_letters("ZZ")
        ),
    ]:
        assert oracle.query(obs, 1e-6) == pytest.approx(
            expectation_exact(choi2, obs), abs=1e-12
        )


def test_noise_models():
    rng = np.random.default_rng(0)
    tau = 0.2
    assert NoiseModel.exact().perturb(tau, rng) == 0.0
    assert NoiseModel.adversarial_sign(+1).perturb(tau, rng) == tau
    assert NoiseModel.adversarial_sign(-1).perturb(tau, rng) == -tau
    draws = [NoiseModel.bounded_uniform().perturb(tau, rng) for _ in range(200)]
    assert all(abs(d) <= tau for d in draws)
    g = [NoiseModel.gaussian().perturb(tau, rng) for _ in range(2000)]
    assert np.std(g) == pytest.approx(tau / 2, rel=0.1)
    with pytest.raises(ValueError):
        NoiseModel.adversarial_sign(2)


def test_noisy_query_adds_noise():
    oracle = QsqOracle(choi_of_unitary(H), NoiseModel.adversarial_sign(+1))
    obs = Observable.subset_mass(PauliPrefix(1, "X"))
    assert oracle.query(obs, 0.25) == pytest.approx(0.75)


def test_pure_state_target():
    psi = haar_random_state(2, 3)
    oracle = QsqOracle(psi)
    p = PauliString.from_letters("XZ")
    ref = float(np.real(psi.amps.conj() @ pauli_matrix(p) @ psi.amps))
    assert oracle.query(Observable.doubled_pauli(p), 0.1) == pytest.approx(ref)


def test_subset_mass_rejects_bad_input():
    with pytest.raises(ValueError):
        Observable.subset_mass([])
    with pytest.raises(ValueError):
        Observable.subset_mass(
            [PauliString.from_letters("X"), PauliString.from_letters("XX")]
        )
    with pytest.raises(ValueError):
        Observable.sign_probe(
            PauliString.from_letters("X"), PauliString.from_letters("X")
        )


def test_exhaustive_prefix_mass_n2():
    u = haar_random_unitary(2, 9)
    choi = choi_of_unitary(u)
    coeffs = {
        p: np.trace(pauli_matrix(p).conj().T @ u.entries) / 4
        for p in all_pauli_strings(2)
    }
    for k in range(3):
        for fixed in ["".join(t) for t in __import__("itertools").product("IXYZ", repeat=k)]:
            pre = PauliPrefix(2, fixed)
            brute = sum(abs(coeffs[p]) ** 2 for p in pre.members())
            got = expectation_exact(choi, Observable.subset_mass(pre))
            assert got == pytest.approx(brute, abs=1e-10)
