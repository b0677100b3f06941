"""Distances between unitaries, pure-state ensembles, and channel unitarity.

Trace distance uses the half-Schatten-1 normalization throughout, so the
distance between pure states |a>, |b> is sqrt(1 - |<a|b>|^2) and all
distances live in [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import (
    DenseOperator,
    DensityMatrix,
    StateVector,
    as_rng,
    haar_random_state,
    random_brickwork_circuit,
)

# the six single-qubit stabilizer states: |0>, |1>, |+>, |->, |+i>, |-i>
_STABILIZER = np.array(
    [
        [1, 0],
        [0, 1],
        [1, 1],
        [1, -1],
        [1, 1j],
        [1, -1j],
    ],
    dtype=complex,
)
_STABILIZER = _STABILIZER / np.linalg.norm(_STABILIZER, axis=1, keepdims=True)


@dataclass(frozen=True)
class StateEnsemble:
    """A sampler of n-qubit pure states.

    The product variants (stabilizer, Haar product) and the global Haar
    measure are locally scrambled: composing each sample with any fixed
    local unitary leaves the distribution invariant.
    """

    kind: str
    n: int
    k: int = 1
    depth: int = 1

    @classmethod
    def stabilizer_product(cls, n: int) -> "StateEnsemble":
        return cls("stabilizer_product", n)

    @classmethod
    def haar_product(cls, n: int, k: int = 1) -> "StateEnsemble":
        if n % k != 0:
            raise ValueError("block size must divide the qubit count")
        return cls("haar_product", n, k=k)

    @classmethod
    def haar_global(cls, n: int) -> "StateEnsemble":
        return cls("haar_global", n)

    @classmethod
    def brickwork_scrambled(cls, n: int, depth: int) -> "StateEnsemble":
        return cls("brickwork_scrambled", n, depth=depth)

    def sample(self, rng) -> StateVector:
        rng = as_rng(rng)
        if self.kind == "stabilizer_product":
            amps = np.ones(1, dtype=complex)
            for _ in range(self.n):
                amps = np.kron(amps, _STABILIZER[rng.integers(6)])
            return StateVector(self.n, amps)
        if self.kind == "haar_product":
            amps = np.ones(1, dtype=complex)
            for _ in range(self.n // self.k):
                amps = np.kron(amps, haar_random_state(self.k, rng).amps)
            return StateVector(self.n, amps)
        if self.kind == "haar_global":
            return haar_random_state(self.n, rng)
        if self.kind == "brickwork_scrambled":
            c = random_brickwork_circuit(self.n, self.depth, rng)
            zero = np.zeros(2**self.n, dtype=complex)
            zero[0] = 1.0
            return StateVector(self.n, c.apply(zero, self.n))
        raise ValueError(self.kind)


def choi_distance(u: DenseOperator, v: DenseOperator) -> float:
    """sqrt(1 - |Tr[U^dag V]|^2 / 4^n): the trace distance of the two
    Choi states, invariant under global phases."""
    if u.m != v.m:
        raise ValueError("mismatched qubit counts")
    if not (u.is_unitary() and v.is_unitary()):
        raise ValueError("choi_distance needs unitary inputs")
    f = abs(np.trace(u.entries.conj().T @ v.entries)) / 2**u.m
    return float(np.sqrt(max(0.0, 1.0 - f**2)))


def expected_risk_mc(
    u: DenseOperator,
    v: DenseOperator,
    ensemble: StateEnsemble,
    samples: int = 2000,
    seed=0,
) -> tuple[float, float]:
    """Monte-Carlo mean of the squared trace distance between U|psi> and
    V|psi> over the ensemble, with its standard error."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    rng = as_rng(seed)
    w = u.entries.conj().T @ v.entries
    vals = np.empty(samples)
    for i in range(samples):
        psi = ensemble.sample(rng).amps
        vals[i] = 1.0 - abs(np.vdot(psi, w @ psi)) ** 2
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive trace-preserving map given by Kraus operators."""

    n: int
    kraus: tuple

    def __post_init__(self):
        kraus = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        object.__setattr__(self, "kraus", kraus)
        d = 2**self.n
        total = sum(k.conj().T @ k for k in kraus)
        if not np.allclose(total, np.eye(d), atol=1e-9):
            raise ValueError("Kraus operators do not sum to the identity")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    @classmethod
    def from_unitary(cls, u: DenseOperator) -> "KrausChannel":
        return cls(u.m, (u.entries,))

    @classmethod
    def depolarizing(cls, n: int, p: float) -> "KrausChannel":
        """Output (1-p) rho + p I/2^n, via the n-qubit Pauli twirl."""
        from .pauli import all_pauli_strings, pauli_matrix

        d = 2**n
        ops = []
        for s in all_pauli_strings(n):
            w = 1 - p + p / d**2 if s.is_identity() else p / d**2
            ops.append(np.sqrt(w) * pauli_matrix(s))
        return cls(n, tuple(ops))

    @classmethod
    def random(cls, n: int, seed, env_dim: int = 4) -> "KrausChannel":
        """Haar-random Stinespring dilation with the given environment size."""
        d = 2**n
        rng = as_rng(seed)
        g = rng.normal(size=(d * env_dim, d * env_dim)) + 1j * rng.normal(
            size=(d * env_dim, d * env_dim)
        )
        q, r = np.linalg.qr(g)
        ph = np.diag(r).copy()
        ph /= np.abs(ph)
        iso = (q * ph)[:, :d]  # columns: images of |j> (system) (x) |0> (env)
        ops = tuple(iso[e::env_dim, :] for e in range(env_dim))
        return cls(n, ops)


def choi_matrix(ch: KrausChannel) -> DensityMatrix:
    """Trace-1 Choi matrix (Id (x) channel) applied to the maximally
    entangled state, in the same register layout as the pure Choi vectors."""
    n = ch.n
    d = 2**n
    j = np.zeros((d * d, d * d), dtype=complex)
    for k in ch.kraus:
        vec = k.T.reshape(-1) / np.sqrt(d)
        j += np.outer(vec, vec.conj())
    return DensityMatrix(2 * n, j)


def _swap_operator(d: int) -> np.ndarray:
    f = np.zeros((d * d, d * d))
    for i in range(d):
        for k in range(d):
            f[i * d + k, k * d + i] = 1.0
    return f


def unitarity(ch: KrausChannel) -> float:
    """Haar-averaged purity of the traceless output, normalized to 1 for
    unitary channels.

    Computed two independent ways — the literal second-moment average and
    the closed form in the Choi purity — and cross-checked to 1e-9.
    """
    n = ch.n
    d = 2**n
    if n > 3:
        raise ValueError("dense unitarity computation capped at n = 3")

    # path (a): E_psi Tr[N(psi)^2] via E[psi psi (x) psi psi] = (I + F)/(d(d+1))
    f = _swap_operator(d)
    second = (np.eye(d * d) + f) / (d * (d + 1))
    out = np.zeros((d * d, d * d), dtype=complex)
    for k1 in ch.kraus:
        for k2 in ch.kraus:
            kk = np.kron(k1, k2)
            out += kk @ second @ kk.conj().T
    mean_purity = float(np.real(np.trace(out @ f)))
    fixed = ch.apply(np.eye(d) / d)
    fixed_purity = float(np.real(np.trace(fixed @ fixed)))
    u_a = d / (d - 1) * (mean_purity - fixed_purity)

    # path (b): closed form in the Choi purity
    tr_j2 = float(np.real(np.trace(choi_matrix(ch).entries @ choi_matrix(ch).entries)))
    u_b = (d * d * tr_j2 - d * fixed_purity) / (d * d - 1)

    if abs(u_a - u_b) > 1e-9:
        raise AssertionError(
            f"unitarity paths disagree: {u_a!r} vs {u_b!r}"
        )
    return u_b


def purity_unitarity_sandwich_check(ch: KrausChannel) -> bool:
    """Two-sided bound relating unitarity to the Choi purity:

        (4^n Tr[J^2] - 2^n Tr[N(I/2^n)^2]) / (4^n - 1)  =  u
        (4^n Tr[J^2] - 2^n) / (4^n - 1)  <=  u  <=  (4^n Tr[J^2] - 1) / (4^n - 1)

    The lower bound uses Tr[N(I/d)^2] <= 1 (purity at most 1); the upper
    uses Tr[N(I/d)^2] >= 1/d (purity at least maximally mixed).  Both are
    tight for unitary channels and for full amplitude damping respectively.
    """
    n = ch.n
    d = 2**n
    u = unitarity(ch)
    j = choi_matrix(ch).entries
    tr_j2 = float(np.real(np.trace(j @ j)))
    lo = (d * d * tr_j2 - d) / (d * d - 1)
    hi = (d * d * tr_j2 - 1) / (d * d - 1)
    return bool(lo - 1e-9 <= u <= hi + 1e-9)
