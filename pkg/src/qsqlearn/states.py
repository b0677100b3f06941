"""Dense statevector/operator simulation and the Bell-basis transform.

Register layout for Choi states: qubits 0..n-1 are the reference half,
qubits n..2n-1 carry the unitary; the Bell pair of system qubit j is
(j, n+j).  Basis indices are big-endian (qubit 0 is the most significant
bit), so the amplitude of |v(U)> at index i*2^n + j is U[j, i] / sqrt(2^n).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import DENSE_LIMIT, DimensionLimitError, PauliString, PauliExpansion

ATOL = 1e-9


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class StateVector:
    m: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        object.__setattr__(self, "amps", amps)
        if amps.shape != (2**self.m,):
            raise ValueError(f"expected 2^{self.m} amplitudes, got {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state not normalized: |amps| = {norm}")

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amps, other.amps)) ** 2)


@dataclass(frozen=True)
class DenseOperator:
    m: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", entries)
        d = 2**self.m
        if entries.shape != (d, d):
            raise ValueError(f"expected {d}x{d} matrix, got {entries.shape}")

    def is_unitary(self, tol: float = ATOL) -> bool:
        d = 2**self.m
        return bool(
            np.allclose(self.entries @ self.entries.conj().T, np.eye(d), atol=tol)
        )

    def is_hermitian(self, tol: float = ATOL) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, atol=tol))


@dataclass(frozen=True)
class DensityMatrix:
    m: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", entries)
        d = 2**self.m
        if entries.shape != (d, d):
            raise ValueError(f"expected {d}x{d} matrix, got {entries.shape}")
        if not np.allclose(entries, entries.conj().T, atol=ATOL):
            raise ValueError("density matrix not Hermitian")
        if abs(np.trace(entries).real - 1.0) > ATOL:
            raise ValueError(f"trace {np.trace(entries)} != 1")
        if np.linalg.eigvalsh(entries).min() < -ATOL:
            raise ValueError("density matrix not positive semidefinite")


@dataclass(frozen=True)
class ChoiState:
    """The 2n-qubit pure state (I (x) U)|Omega> in block layout."""

    n: int
    vec: StateVector

    def __post_init__(self):
        if self.vec.m != 2 * self.n:
            raise ValueError("Choi vector must live on 2n qubits")


@dataclass(frozen=True)
class Circuit:
    """Layers of disjoint 1- or 2-qubit unitary gates."""

    n: int
    layers: tuple = ()

    def __post_init__(self):
        layers = tuple(
            tuple((np.asarray(g, dtype=complex), tuple(t)) for g, t in layer)
            for layer in self.layers
        )
        object.__setattr__(self, "layers", layers)
        for layer in layers:
            used: set[int] = set()
            for g, targets in layer:
                k = len(targets)
                if g.shape != (2**k, 2**k):
                    raise ValueError("gate shape does not match target count")
                if not np.allclose(g @ g.conj().T, np.eye(2**k), atol=ATOL):
                    raise ValueError("gate is not unitary")
                if used & set(targets):
                    raise ValueError("overlapping targets within a layer")
                if any(not 0 <= q < self.n for q in targets):
                    raise ValueError("target out of range")
                used |= set(targets)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gate_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def compile(self) -> DenseOperator:
        u = np.eye(2**self.n, dtype=complex)
        for layer in self.layers:
            for g, targets in layer:
                u = embed_operator(g, targets, self.n) @ u
        return DenseOperator(self.n, u)

    def apply(self, amps: np.ndarray, m: int, offset: int = 0) -> np.ndarray:
        """Apply the circuit's gates to qubits offset..offset+n-1 of a state."""
        for layer in self.layers:
            for g, targets in layer:
                amps = apply_gate(amps, m, g, tuple(q + offset for q in targets))
        return amps


def apply_gate(amps: np.ndarray, m: int, gate: np.ndarray, targets) -> np.ndarray:
    k = len(targets)
    t = amps.reshape((2,) * m)
    gt = gate.reshape((2,) * (2 * k))
    t = np.tensordot(gt, t, axes=(list(range(k, 2 * k)), list(targets)))
    t = np.moveaxis(t, range(k), targets)
    return np.ascontiguousarray(t).reshape(-1)


def embed_operator(gate: np.ndarray, targets, n: int) -> np.ndarray:
    """Lift a k-qubit gate acting on ``targets`` to the full 2^n space."""
    k = len(targets)
    rest = [q for q in range(n) if q not in targets]
    order = list(targets) + rest
    perm = np.argsort(order)
    full = np.kron(gate, np.eye(2 ** (n - k), dtype=complex))
    t = full.reshape((2,) * (2 * n))
    t = np.transpose(t, list(perm) + [n + p for p in perm])
    return np.ascontiguousarray(t).reshape(2**n, 2**n)


def apply_pauli(amps: np.ndarray, m: int, p: PauliString) -> np.ndarray:
    """P @ amps for an m-qubit Pauli string, via bit arithmetic."""
    if p.n != m:
        raise ValueError("Pauli string size does not match state")
    flip, phase_mask, ny = p.masks()
    idx = np.arange(amps.size, dtype=np.int64)
    src = idx ^ flip
    par = np.zeros(amps.size, dtype=np.int64)
    bit = 1
    while bit <= phase_mask:
        if bit & phase_mask:
            par ^= (src // bit) & 1
        bit <<= 1
    phase = (1j**ny) * np.where(par, -1.0, 1.0)
    return phase * amps[src]


# Change of basis per Bell pair: rows (I, X, Y, Z), columns (00, 01, 10, 11)
# with the first bit the reference qubit.  The row phases make the output
# coefficient of P equal <v(P)|v(U)> = Tr[P U] / 2^n exactly.
_BELL = (
    np.array(
        [
            [1, 0, 0, 1],
            [0, 1, 1, 0],
            [0, -1j, 1j, 0],
            [1, 0, 0, -1],
        ],
        dtype=complex,
    )
    / np.sqrt(2)
)


def _pairwise_transform(amps: np.ndarray, n: int, mat: np.ndarray) -> np.ndarray:
    t = amps.reshape((2,) * (2 * n))
    order = []
    for j in range(n):
        order += [j, n + j]
    t = np.transpose(t, order).reshape((4,) * n)
    for axis in range(n):
        t = np.tensordot(mat, t, axes=([1], [axis]))
        t = np.moveaxis(t, 0, axis)
    return np.ascontiguousarray(t).reshape(-1)


def bell_transform(v: ChoiState) -> np.ndarray:
    """Dense length-4^n vector c with c[P.code] = <v(P)|v(U)> = U_hat(P)."""
    return _pairwise_transform(v.vec.amps, v.n, _BELL)


def bell_transform_amps(amps: np.ndarray, n: int) -> np.ndarray:
    """Bell transform of a raw 2n-qubit amplitude vector (need not be a Choi)."""
    return _pairwise_transform(amps, n, _BELL)


def inverse_bell_transform(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Amplitudes of sum_P c[P] |v(P)>, inverting :func:`bell_transform`."""
    t = np.asarray(coeffs, dtype=complex).reshape((4,) * n)
    inv = _BELL.conj().T
    for axis in range(n):
        t = np.tensordot(inv, t, axes=([1], [axis]))
        t = np.moveaxis(t, 0, axis)
    t = t.reshape((2, 2) * n)
    order = []
    for j in range(n):
        order += [j, n + j]
    return np.ascontiguousarray(np.transpose(t, np.argsort(order))).reshape(-1)


def choi_of_unitary(u: DenseOperator) -> ChoiState:
    if u.m > DENSE_LIMIT // 2:
        raise DimensionLimitError(f"n={u.m} exceeds Choi dense limit")
    if not u.is_unitary():
        raise ValueError("input operator is not unitary")
    n = u.m
    vec = u.entries.T.reshape(-1) / np.sqrt(2**n)
    return ChoiState(n, StateVector(2 * n, vec))


def unitary_of_choi(vec: np.ndarray, n: int) -> np.ndarray:
    """Read a 2^n x 2^n matrix off a Choi-layout amplitude vector.

    Inverse of :func:`choi_of_unitary` up to normalization; the result is
    unitary only when the input is exactly the Choi vector of a unitary.
    """
    return vec.reshape(2**n, 2**n).T * np.sqrt(2**n)


def expansion_of_unitary(u: DenseOperator, cutoff: float = 1e-12) -> PauliExpansion:
    """Sparse Pauli expansion of a unitary via the Bell transform."""
    c = bell_transform(choi_of_unitary(u))
    coeffs = {
        PauliString(u.m, int(code)): c[code]
        for code in np.nonzero(np.abs(c) > cutoff)[0]
    }
    return PauliExpansion(u.m, coeffs)


def partial_trace(state, keep) -> DensityMatrix:
    """Reduced density matrix on the ``keep`` qubits, in ascending order."""
    keep = sorted(keep)
    if not keep:
        raise ValueError("keep set must be non-empty")
    if isinstance(state, ChoiState):
        state = state.vec
    if isinstance(state, StateVector):
        m, amps = state.m, state.amps
        rest = [q for q in range(m) if q not in keep]
        t = amps.reshape((2,) * m)
        t = np.transpose(t, keep + rest).reshape(2 ** len(keep), -1)
        rho = t @ t.conj().T
    elif isinstance(state, DensityMatrix):
        m = state.m
        t = state.entries.reshape((2,) * (2 * m))
        remaining = list(range(m))
        for q in range(m):
            if q in keep:
                continue
            pos = remaining.index(q)
            t = np.trace(t, axis1=pos, axis2=pos + len(remaining))
            remaining.remove(q)
        rho = t.reshape(2 ** len(keep), 2 ** len(keep))
    else:
        raise TypeError(f"cannot trace {type(state).__name__}")
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(len(keep), rho)


def dominant_eigenstate(
    rho: DensityMatrix, max_iter: int = 10_000, tol: float = 1e-10
) -> tuple[StateVector, float]:
    """Unit eigenvector of the largest eigenvalue, with the eigenvalue.

    Dense solve below dimension 64; power iteration with a deterministic
    start above, raising if the residual fails to converge.
    """
    a = rho.entries
    d = a.shape[0]
    if d <= 64:
        w, v = np.linalg.eigh(a)
        vec = v[:, -1]
        val = float(w[-1])
    else:
        rng = np.random.default_rng(0)
        x = rng.normal(size=d) + 1j * rng.normal(size=d)
        x /= np.linalg.norm(x)
        for _ in range(max_iter):
            y = a @ x + x  # iterate on a + I: PSD input keeps the top eigenpair
            y /= np.linalg.norm(y)
            overlap = np.vdot(x, y)
            if np.linalg.norm(y - x * overlap / max(abs(overlap), 1e-300)) < tol:
                x = y
                break
            x = y
        else:
            raise RuntimeError("power iteration did not converge")
        val = float(np.real(np.vdot(x, a @ x)))
        vec = x
    if np.linalg.norm(a @ vec - val * vec) > 1e-8:
        raise RuntimeError("dominant eigenpair residual too large")
    # fix the global phase: make the largest-magnitude entry real positive
    k = int(np.argmax(np.abs(vec)))
    vec = vec * np.exp(-1j * np.angle(vec[k]))
    return StateVector(rho.m, vec / np.linalg.norm(vec)), val


def haar_random_unitary(m: int, seed) -> DenseOperator:
    """Haar-distributed unitary via a Ginibre matrix and phase-fixed QR."""
    if m > DENSE_LIMIT:
        raise DimensionLimitError(f"m={m} exceeds dense limit")
    rng = as_rng(seed)
    d = 2**m
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return DenseOperator(m, q * ph)


def haar_random_state(m: int, seed) -> StateVector:
    rng = as_rng(seed)
    d = 2**m
    x = rng.normal(size=d) + 1j * rng.normal(size=d)
    return StateVector(m, x / np.linalg.norm(x))


def random_brickwork_circuit(n: int, depth: int, seed) -> Circuit:
    """Alternating brickwork of Haar-random 2-qubit gates.

    Even layers pair (0,1), (2,3), ...; odd layers pair (1,2), (3,4), ...
    """
    if n < 2:
        raise ValueError("brickwork needs at least 2 qubits")
    rng = as_rng(seed)
    layers = []
    for layer_idx in range(depth):
        start = layer_idx % 2
        layer = []
        for q in range(start, n - 1, 2):
            layer.append((haar_random_unitary(2, rng).entries, (q, q + 1)))
        layers.append(tuple(layer))
    return Circuit(n, tuple(layers))


def choi_of_circuit(c: Circuit) -> ChoiState:
    """Apply the circuit's gates to the system half of |Omega> directly."""
    n = c.n
    omega = np.zeros(4**n, dtype=complex)
    step = 2**n + 1
    omega[::step] = 1 / np.sqrt(2**n)
    amps = c.apply(omega, 2 * n, offset=n)
    return ChoiState(n, StateVector(2 * n, amps))
