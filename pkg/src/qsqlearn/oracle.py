"""The statistical-query oracle: structured observables, noise, accounting.

A query hands the oracle a bounded-norm observable and a tolerance tau and
receives the exact expectation value perturbed according to the configured
noise model.  Values are never clamped to [-1, 1]; consumers must tolerate
slightly out-of-range estimates.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliPrefix, PauliString, pauli_matrix
from .states import (
    ChoiState,
    DensityMatrix,
    StateVector,
    apply_pauli,
    as_rng,
    bell_transform_amps,
    inverse_bell_transform,
)

SUBSET_MASS = "subset_mass"
DOUBLED_PAULI = "doubled_pauli"
SIGN_PROBE = "sign_probe"
PROJECTED_DOUBLED_PAULI = "projected_doubled_pauli"
DENSE = "dense"


class Observable:
    """Tagged union of the bounded-norm observables the oracle accepts.

    Every variant has operator norm at most 1; the sign probe carries an
    explicit 1/2 factor to stay within the contract.
    """

    __slots__ = ("kind", "payload")

    def __init__(self, kind: str, payload: tuple):
        self.kind = kind
        self.payload = payload

    # -- constructors -----------------------------------------------------
    @classmethod
    def subset_mass(cls, subset) -> "Observable":
        """Projector onto the Bell-basis span of a Pauli subset.

        ``subset`` is a :class:`PauliPrefix` or an iterable of
        :class:`PauliString`.
        """
        if isinstance(subset, PauliPrefix):
            return cls(SUBSET_MASS, ("prefix", subset))
        strings = frozenset(subset)
        if not strings:
            raise ValueError("empty Pauli subset")
        sizes = {p.n for p in strings}
        if len(sizes) != 1:
            raise ValueError("mixed qubit counts in subset")
        return cls(SUBSET_MASS, ("set", strings))

    @classmethod
    def letter_mass(cls, n: int, j: int, letter: str) -> "Observable":
        """Subset-mass over all strings whose letter at qubit j is fixed.

        Realizable as a single Bell-pair projector on pair (j, n+j).
        """
        if not 0 <= j < n:
            raise IndexError(f"qubit index {j} out of range")
        return cls(SUBSET_MASS, ("letter", n, j, letter))

    @classmethod
    def doubled_pauli(cls, r: PauliString) -> "Observable":
        return cls(DOUBLED_PAULI, (r,))

    @classmethod
    def sign_probe(cls, p_star: PauliString, p: PauliString) -> "Observable":
        if p_star.n != p.n:
            raise ValueError("mismatched string sizes")
        if p_star == p:
            raise ValueError("sign probe needs two distinct strings")
        return cls(SIGN_PROBE, (p_star, p))

    @classmethod
    def projected_doubled_pauli(cls, r: PauliString, subset) -> "Observable":
        """Pi (R on T_2) Pi, with Pi projecting the complement Bell pairs
        onto |v(I)>.

        ``r`` lives on 2*len(subset) qubits ordered as the reference copies
        of the sorted subset followed by their system copies.
        """
        t = tuple(sorted(subset))
        if r.n != 2 * len(t):
            raise ValueError("Pauli string must act on the doubled subset")
        return cls(PROJECTED_DOUBLED_PAULI, (r, t))

    @classmethod
    def dense(cls, matrix: np.ndarray) -> "Observable":
        matrix = np.asarray(matrix, dtype=complex)
        norm = np.linalg.norm(matrix, ord=2)
        if norm > 1 + 1e-9:
            raise ValueError(f"operator norm {norm} exceeds 1")
        return cls(DENSE, (matrix,))

    # -- bookkeeping ------------------------------------------------------
    def label(self) -> str:
        """Canonical serialization used for per-operation query tallies."""
        if self.kind == SUBSET_MASS:
            tag = self.payload[0]
            if tag == "prefix":
                return f"subset_mass:prefix:{self.payload[1].fixed}"
            if tag == "letter":
                _, n, j, letter = self.payload
                return f"subset_mass:letter:{j}={letter}"
            strings = ",".join(sorted(p.letters for p in self.payload[1]))
            return f"subset_mass:set:{strings}"
        if self.kind == DOUBLED_PAULI:
            return f"doubled_pauli:{self.payload[0].letters}"
        if self.kind == SIGN_PROBE:
            return f"sign_probe:{self.payload[0].letters}~{self.payload[1].letters}"
        if self.kind == PROJECTED_DOUBLED_PAULI:
            r, t = self.payload
            return f"projected:{r.letters}@{','.join(map(str, t))}"
        return "dense"

    def dense_matrix(self, m: int) -> np.ndarray:
        """Brute-force dense matrix on m qubits (test oracle; small m only)."""
        d = 2**m
        if self.kind == DENSE:
            return self.payload[0]
        if self.kind == DOUBLED_PAULI:
            return pauli_matrix(self.payload[0])
        if self.kind == SUBSET_MASS:
            n = m // 2
            out = np.zeros((d, d), dtype=complex)
            for code in _subset_codes(self, n):
                e = np.zeros(4**n, dtype=complex)
                e[code] = 1.0
                v = inverse_bell_transform(e, n)
                out += np.outer(v, v.conj())
            return out
        if self.kind == SIGN_PROBE:
            n = m // 2
            vs = []
            for p in self.payload:
                e = np.zeros(4**n, dtype=complex)
                e[p.code] = 1.0
                vs.append(inverse_bell_transform(e, n))
            plus = vs[0] + vs[1]
            minus = vs[0] - vs[1]
            return (np.outer(plus, plus.conj()) - np.outer(minus, minus.conj())) / 2
        if self.kind == PROJECTED_DOUBLED_PAULI:
            r, t = self.payload
            n = m // 2
            proj = _complement_projector(n, t)
            rmat = _embedded_doubled_pauli(r, t, n)
            return proj @ rmat @ proj
        raise ValueError(self.kind)


def _subset_codes(obs: Observable, n: int) -> np.ndarray:
    tag = obs.payload[0]
    if tag == "prefix":
        prefix: PauliPrefix = obs.payload[1]
        if prefix.n != n:
            raise ValueError("prefix size does not match state")
        lo, hi = prefix.block()
        return np.arange(lo, hi)
    if tag == "letter":
        _, pn, j, letter = obs.payload
        if pn != n:
            raise ValueError("observable size does not match state")
        codes = np.arange(4**n)
        digit = (codes >> (2 * (n - 1 - j))) & 3
        return codes[digit == "IXYZ".index(letter)]
    strings = obs.payload[1]
    if next(iter(strings)).n != n:
        raise ValueError("subset size does not match state")
    return np.array(sorted(p.code for p in strings), dtype=np.int64)


def _complement_pairs_projector_apply(amps: np.ndarray, n: int, t: tuple) -> np.ndarray:
    """Project every Bell pair outside ``t`` onto |v(I)> = (|00>+|11>)/sqrt(2)."""
    out = amps
    for q in range(n):
        if q in t:
            continue
        v = out.reshape((2,) * (2 * n))
        a00 = np.take(np.take(v, 0, axis=q), 0, axis=n + q - 1)
        a11 = np.take(np.take(v, 1, axis=q), 1, axis=n + q - 1)
        amp = (a00 + a11) / 2
        new = np.zeros_like(v)
        idx0 = [slice(None)] * (2 * n)
        idx0[q] = 0
        idx0[n + q] = 0
        idx1 = [slice(None)] * (2 * n)
        idx1[q] = 1
        idx1[n + q] = 1
        new[tuple(idx0)] = amp
        new[tuple(idx1)] = amp
        out = new.reshape(-1)
    return out


def _complement_projector(n: int, t: tuple) -> np.ndarray:
    d = 4**n
    cols = [
        _complement_pairs_projector_apply(np.eye(d, dtype=complex)[:, k], n, t)
        for k in range(d)
    ]
    return np.stack(cols, axis=1)


def _embedded_doubled_pauli(r: PauliString, t: tuple, n: int) -> np.ndarray:
    ell = len(t)
    full = PauliString.from_letters(
        _doubled_letters(r, t, n)
    )
    return pauli_matrix(full)


def _doubled_letters(r: PauliString, t: tuple, n: int) -> str:
    """Spread a 2*ell-qubit string over the 2n-qubit Choi register."""
    ell = len(t)
    letters = ["I"] * (2 * n)
    for i, q in enumerate(t):
        letters[q] = r.letter(i)
        letters[n + q] = r.letter(ell + i)
    return "".join(letters)


def _state_amps(state) -> tuple[np.ndarray, int]:
    if isinstance(state, ChoiState):
        return state.vec.amps, state.vec.m
    if isinstance(state, StateVector):
        return state.amps, state.m
    raise TypeError(f"expected a pure state, got {type(state).__name__}")


def expectation_exact(state, obs: Observable) -> float:
    """Exact Tr[rho O] for any observable variant, without materializing
    dense matrices for the structured variants."""
    if isinstance(state, DensityMatrix):
        m = state.m
        mat = obs.dense_matrix(m)
        if mat.shape != state.entries.shape:
            raise ValueError("dimension mismatch")
        return float(np.real(np.trace(state.entries @ mat)))

    amps, m = _state_amps(state)

    if obs.kind == DENSE:
        mat = obs.payload[0]
        if mat.shape != (amps.size, amps.size):
            raise ValueError("dimension mismatch")
        return float(np.real(np.vdot(amps, mat @ amps)))

    if obs.kind == DOUBLED_PAULI:
        r = obs.payload[0]
        if r.n != m:
            raise ValueError("dimension mismatch")
        return float(np.real(np.vdot(amps, apply_pauli(amps, m, r))))

    if m % 2 != 0:
        raise ValueError("Bell-structured observables need a 2n-qubit state")
    n = m // 2
    if obs.kind == SUBSET_MASS:
        c = bell_transform_amps(amps, n)
        codes = _subset_codes(obs, n)
        if obs.payload[0] == "prefix":
            lo, hi = obs.payload[1].block()
            return float(np.sum(np.abs(c[lo:hi]) ** 2))
        return float(np.sum(np.abs(c[codes]) ** 2))
    if obs.kind == SIGN_PROBE:
        p_star, p = obs.payload
        if p_star.n != n:
            raise ValueError("dimension mismatch")
        c = bell_transform_amps(amps, n)
        return float(2 * np.real(np.conj(c[p_star.code]) * c[p.code]))
    if obs.kind == PROJECTED_DOUBLED_PAULI:
        r, t = obs.payload
        if any(q >= n for q in t):
            raise ValueError("subset out of range for this state")
        w = _complement_pairs_projector_apply(amps, n, t)
        full = PauliString.from_letters(_doubled_letters(r, t, n))
        return float(np.real(np.vdot(w, apply_pauli(w, m, full))))
    raise ValueError(obs.kind)


@dataclass
class NoiseModel:
    """How a query's returned value deviates from the exact expectation.

    ``bounded_uniform`` and ``adversarial_sign`` guarantee |error| <= tau;
    ``gaussian`` (sd tau/2) does not.
    """

    kind: str = "exact"
    sign: int = +1

    @classmethod
    def exact(cls) -> "NoiseModel":
        return cls("exact")

    @classmethod
    def gaussian(cls) -> "NoiseModel":
        return cls("gaussian")

    @classmethod
    def bounded_uniform(cls) -> "NoiseModel":
        return cls("bounded_uniform")

    @classmethod
    def adversarial_sign(cls, sign: int = +1) -> "NoiseModel":
        if sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")
        return cls("adversarial_sign", sign)

    def perturb(self, tau: float, rng: np.random.Generator) -> float:
        if self.kind == "exact":
            return 0.0
        if self.kind == "gaussian":
            return float(rng.normal(0.0, tau / 2))
        if self.kind == "bounded_uniform":
            return float(rng.uniform(-tau, tau))
        if self.kind == "adversarial_sign":
            return self.sign * tau
        raise ValueError(self.kind)


@dataclass
class QueryLedger:
    """Audit record: total queries, minimum tolerance, per-label tallies."""

    total: int = 0
    min_tolerance: float = float("inf")
    per_label: dict = field(default_factory=dict)

    def record(self, label: str, tau: float) -> None:
        self.total += 1
        self.min_tolerance = min(self.min_tolerance, tau)
        self.per_label[label] = self.per_label.get(label, 0) + 1


class QsqOracle:
    """Holds a hidden target state, a noise model and a query ledger.

    Learners may only call :meth:`query`; the hidden state is deliberately
    name-mangled to keep the access seam explicit.
    """

    def __init__(self, state, noise: NoiseModel | None = None, seed=0):
        self.__state = state
        self.noise = noise if noise is not None else NoiseModel.exact()
        self.rng = as_rng(seed)
        self.ledger = QueryLedger()
        self._lock = threading.Lock()
        self._bell_cache = None
        if isinstance(state, ChoiState):
            self.n = state.n
            self.m = 2 * state.n
        elif isinstance(state, (StateVector, DensityMatrix)):
            self.n = None
            self.m = state.m
        else:
            raise TypeError(f"unsupported state {type(state).__name__}")

    def query(self, obs: Observable, tau: float) -> float:
        if tau <= 0:
            raise ValueError("tolerance must be positive")
        exact = self._expectation(obs)
        with self._lock:
            noise = self.noise.perturb(tau, self.rng)
            self.ledger.record(obs.label(), tau)
        return exact + noise

    def _expectation(self, obs: Observable) -> float:
        """Exact value, with the Bell coefficients of a pure hidden state
        cached so repeated mass/sign queries cost only an indexed sum."""
        state = self._QsqOracle__state
        if obs.kind in (SUBSET_MASS, SIGN_PROBE) and not isinstance(
            state, DensityMatrix
        ):
            amps, m = _state_amps(state)
            if m % 2 == 0:
                n = m // 2
                if self._bell_cache is None:
                    self._bell_cache = bell_transform_amps(amps, n)
                c = self._bell_cache
                if obs.kind == SUBSET_MASS:
                    if obs.payload[0] == "prefix":
                        lo, hi = obs.payload[1].block()
                        return float(np.sum(np.abs(c[lo:hi]) ** 2))
                    return float(np.sum(np.abs(c[_subset_codes(obs, n)]) ** 2))
                p_star, p = obs.payload
                if p_star.n != n:
                    raise ValueError("dimension mismatch")
                return float(2 * np.real(np.conj(c[p_star.code]) * c[p.code]))
        return expectation_exact(state, obs)


def qstat_query(oracle: QsqOracle, obs: Observable, tau: float) -> float:
    return oracle.query(obs, tau)
