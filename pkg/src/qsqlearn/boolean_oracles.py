"""Quantum oracles for classical Boolean functions, and the quadratic-form
ensemble whose phase oracles are statistically indistinguishable.

Bit conventions match the qubit order: input bit j of x is
``(x >> (n-1-j)) & 1``, and the ancilla of the bit-flip oracle is the last
qubit.  Fourier coefficients are those of the +/-1-valued function
(-1)^f(x) in the character basis chi_s(x) = (-1)^{x.s}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle import Observable, expectation_exact
from .states import DenseOperator, StateVector, as_rng, choi_of_unitary


@dataclass(frozen=True)
class BooleanFunction:
    """A function {0,1}^n -> {0,1} stored as its truth table."""

    n: int
    table: tuple

    def __post_init__(self):
        table = tuple(int(b) for b in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != 2**self.n:
            raise ValueError(f"truth table must have 2^{self.n} entries")
        if any(b not in (0, 1) for b in table):
            raise ValueError("truth table entries must be bits")

    @classmethod
    def constant(cls, n: int, value: int = 0) -> "BooleanFunction":
        return cls(n, (value,) * 2**n)

    @classmethod
    def from_callable(cls, n: int, fn) -> "BooleanFunction":
        return cls(n, tuple(fn(x) & 1 for x in range(2**n)))

    @classmethod
    def random(cls, n: int, seed) -> "BooleanFunction":
        rng = as_rng(seed)
        return cls(n, tuple(int(b) for b in rng.integers(0, 2, size=2**n)))

    def __call__(self, x: int) -> int:
        return self.table[x]

    def sign_fourier(self) -> np.ndarray:
        """f_hat(s) = 2^-n sum_x (-1)^{f(x) + x.s}, indexed by the mask s."""
        d = 2**self.n
        signs = 1.0 - 2.0 * np.array(self.table)
        out = np.empty(d)
        xs = np.arange(d)
        for s in range(d):
            par = np.zeros(d, dtype=np.int64)
            bit = 1
            while bit <= s:
                if bit & s:
                    par ^= (xs // bit) & 1
                bit <<= 1
            out[s] = np.mean(signs * np.where(par, -1.0, 1.0))
        return out


@dataclass(frozen=True)
class QuadraticForm:
    """f_A(x) = x^T A x mod 2 for an n x n bit matrix A."""

    n: int
    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.int64) & 1
        if a.shape != (self.n, self.n):
            raise ValueError("matrix shape does not match n")
        object.__setattr__(self, "a", a)

    @classmethod
    def from_index(cls, n: int, idx: int) -> "QuadraticForm":
        """The idx-th of the 2^(n^2) bit matrices, row-major bit order."""
        bits = [(idx >> p) & 1 for p in range(n * n)]
        return cls(n, np.array(bits, dtype=np.int64).reshape(n, n))

    def to_function(self) -> BooleanFunction:
        n = self.n
        table = []
        for x in range(2**n):
            bits = np.array([(x >> (n - 1 - j)) & 1 for j in range(n)])
            table.append(int(bits @ self.a @ bits) & 1)
        return BooleanFunction(n, tuple(table))


def bitflip_unitary(f: BooleanFunction) -> DenseOperator:
    """Permutation |x, y> -> |x, y ^ f(x)> on n+1 qubits (ancilla last)."""
    n = f.n
    d = 2 ** (n + 1)
    u = np.zeros((d, d))
    for x in range(2**n):
        for y in (0, 1):
            u[x * 2 + (y ^ f(x)), x * 2 + y] = 1.0
    return DenseOperator(n + 1, u)


def phase_unitary(f: BooleanFunction) -> DenseOperator:
    """Diagonal |x> -> (-1)^f(x) |x>; a Hermitian unitary for every f."""
    return DenseOperator(f.n, np.diag(1.0 - 2.0 * np.array(f.table, dtype=complex)))


def uniform_example_state(f: BooleanFunction) -> StateVector:
    """The uniform superposition of labeled examples sum_x |x, f(x)>/2^(n/2)."""
    n = f.n
    amps = np.zeros(2 ** (n + 1), dtype=complex)
    for x in range(2**n):
        amps[x * 2 + f(x)] = 2.0 ** (-n / 2)
    return StateVector(n + 1, amps)


def lift_observable_bitflip(a: DenseOperator) -> tuple[DenseOperator, float]:
    """Translate an observable on labeled-example states to one on the
    Choi state of the bit-flip oracle.

    Returns (A', s) with A' = I_n (x) |0><0| (x) A on 2n+2 qubits and the
    scale s = 2 such that <psi_f| A |psi_f> = s * <v(U_f)| A' |v(U_f)>
    whenever A is diagonal in the input register (A = sum_x |x><x| (x) a_x).
    Off-diagonal input-register components of A are invisible on the Choi
    side, so the identity is scoped to that class.
    """
    if np.linalg.norm(a.entries, ord=2) > 1 + 1e-9:
        raise ValueError("operator norm exceeds 1")
    n = a.m - 1
    proj0 = np.array([[1.0, 0.0], [0.0, 0.0]])
    lifted = np.kron(np.eye(2**n), np.kron(proj0, a.entries))
    return DenseOperator(2 * (n + 1), lifted), 2.0


def compress_observable_phase(c: np.ndarray) -> tuple[DenseOperator, float]:
    """Translate a diagonal Choi-side observable to one on labeled-example
    states.

    ``c`` has length 2^n; the Choi-side observable is
    B = sum_s c_s |v(Z^s)><v(Z^s)| and its expectation on |v(V_f)> equals
    sum_s c_s f_hat(s)^2.  Returns (B', s) on n+1 qubits with scale s = 2
    such that that value equals s * <psi_f| B' |psi_f> for every f; the
    weights enter linearly, not squared.
    """
    c = np.asarray(c, dtype=float)
    d = len(c)
    n = int(np.log2(d))
    if 2**n != d:
        raise ValueError("coefficient vector length must be a power of 2")
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    had = np.ones((1, 1))
    for _ in range(n + 1):
        had = np.kron(had, h)
    proj1 = np.kron(np.eye(d), np.array([[0.0, 0.0], [0.0, 1.0]]))
    t = np.kron(np.diag(c), np.eye(2))
    core = proj1 @ t @ proj1
    return DenseOperator(n + 1, had @ core @ had), 2.0


def diagonal_choi_observable(c: np.ndarray, n: int) -> Observable:
    """sum_s c_s |v(Z^s)><v(Z^s)| as a dense observable on 2n qubits."""
    from .states import inverse_bell_transform

    c = np.asarray(c, dtype=float)
    mat = np.zeros((4**n, 4**n), dtype=complex)
    for s in range(2**n):
        code = _z_code(s, n)
        e = np.zeros(4**n, dtype=complex)
        e[code] = 1.0
        v = inverse_bell_transform(e, n)
        mat += c[s] * np.outer(v, v.conj())
    return Observable.dense(mat)


def _z_code(s: int, n: int) -> int:
    """Base-4 code of the Pauli string Z^s (Z where bit of s is set)."""
    code = 0
    for j in range(n):
        code = (code << 2) | (3 if (s >> (n - 1 - j)) & 1 else 0)
    return code


def _fourier_vectors(n: int) -> np.ndarray:
    """Rows: the unit vectors f_hat_A over all 2^(n^2) quadratic forms."""
    forms = 2 ** (n * n)
    out = np.empty((forms, 2**n))
    for idx in range(forms):
        f = QuadraticForm.from_index(n, idx).to_function()
        out[idx] = f.sign_fourier()
    return out


def separation_gap(n: int) -> float:
    """Exact min over quadratic forms A of the trace distance between the
    phase-oracle Choi state of f_A and the ensemble average over all B.

    Works in the 2^n-dimensional span of the diagonal Choi states, where
    |v(V_f)> has the real coordinates f_hat(s).
    """
    if n > 3:
        raise ValueError("exhaustive gap computation capped at n = 3")
    w = _fourier_vectors(n)
    mean = (w[:, :, None] * w[:, None, :]).mean(axis=0)
    worst = np.inf
    for row in w:
        diff = np.outer(row, row) - mean
        gap = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
        worst = min(worst, gap)
    return worst


def probe_expectations(
    n: int, obs: Observable, samples: int | None = None, seed=0
) -> np.ndarray:
    """Observable expectations on phase-oracle Choi states of quadratic
    forms: exhaustive when ``samples`` is None (n <= 3), else sampled."""
    if samples is None:
        if n > 3:
            raise ValueError("exhaustive enumeration capped at n = 3")
        indices = range(2 ** (n * n))
    else:
        rng = as_rng(seed)
        indices = [int(i) for i in rng.integers(0, 2 ** (n * n), size=samples)]
    vals = []
    for idx in indices:
        f = QuadraticForm.from_index(n, idx).to_function()
        choi = choi_of_unitary(phase_unitary(f))
        vals.append(expectation_exact(choi, obs))
    return np.array(vals)


def variance_probe(
    n: int, obs: Observable, samples: int | None = None, seed=0
) -> float:
    """Variance over uniformly random quadratic forms of the observable's
    expectation on the phase-oracle Choi state."""
    return float(probe_expectations(n, obs, samples, seed).var())
