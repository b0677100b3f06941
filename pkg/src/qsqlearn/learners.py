"""Learning algorithms driven purely by statistical queries.

Every routine here touches its target only through ``QsqOracle.query``; the
oracle's ledger therefore gives an exact account of query counts and
tolerances for each learner.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import polar
from scipy.optimize import minimize

from .pauli import (
    PauliExpansion,
    PauliPrefix,
    PauliString,
    all_pauli_strings,
    pauli_matrix,
)
from .oracle import Observable, QsqOracle
from .states import (
    Circuit,
    DenseOperator,
    DensityMatrix,
    StateVector,
    as_rng,
    choi_of_circuit,
    embed_operator,
    partial_trace,
    unitary_of_choi,
)


@dataclass(frozen=True)
class GlConfig:
    """Heavy-coefficient search threshold and its query tolerance.

    The completeness/soundness guarantee needs tau <= gamma^2 / 4 whenever
    the noise is bounded by the tolerance.
    """

    gamma: float
    tau: float | None = None

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.tau is None:
            object.__setattr__(self, "tau", self.gamma**2 / 4)
        if self.tau <= 0 or self.tau > self.gamma**2 / 4 + 1e-15:
            raise ValueError("tau must lie in (0, gamma^2/4]")


@dataclass(frozen=True)
class JuntaConfig:
    """Arity bound, target distance, and the phase-1 influence settings."""

    k: int
    epsilon: float
    influence_tol: float | None = None
    influence_threshold: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.influence_tol is None:
            object.__setattr__(self, "influence_tol", self.epsilon**2 / (20 * self.k))
        if self.influence_threshold is None:
            object.__setattr__(
                self, "influence_threshold", self.epsilon**2 / (16 * self.k)
            )
        if self.influence_tol <= 0 or self.influence_threshold <= self.influence_tol:
            raise ValueError("need threshold > tolerance > 0")


@dataclass
class LearnedUnitary:
    """A learner's output unitary plus enough provenance to audit the run."""

    n: int
    operator: DenseOperator
    junta_block: DenseOperator | None = None
    junta_support: tuple = ()
    queries: int = 0
    min_tolerance: float = float("inf")
    config: object = None
    certified: bool | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.operator.is_unitary(1e-8):
            raise ValueError("learned representation is not unitary")


def estimate_subset_mass(oracle: QsqOracle, subset, tau: float) -> float:
    """One query for the squared-coefficient mass on a Pauli subset."""
    return oracle.query(Observable.subset_mass(subset), tau)


def estimate_influence(oracle: QsqOracle, j: int, tau: float) -> float:
    """1 minus the mass of strings acting as identity on qubit j."""
    n = oracle.n
    if n is None:
        raise ValueError("oracle target is not a Choi state")
    return 1.0 - oracle.query(Observable.letter_mass(n, j, "I"), tau)


def goldreich_levin(oracle: QsqOracle, cfg: GlConfig) -> list[PauliString]:
    """All Pauli strings with coefficient magnitude >= gamma (and none
    below gamma/2), found by thresholded prefix extension.

    Prefixes are grown one letter at a time in I, X, Y, Z order, level by
    level; a prefix survives iff its estimated mass is >= gamma^2/2, ties
    kept.  Deterministic given the oracle's noise stream.
    """
    n = oracle.n
    if n is None:
        raise ValueError("oracle target is not a Choi state")
    live = [PauliPrefix(n, "")]
    for _ in range(n):
        extended = []
        for prefix in live:
            for letter in "IXYZ":
                child = prefix.extend(letter)
                est = oracle.query(Observable.subset_mass(child), cfg.tau)
                if est >= cfg.gamma**2 / 2:
                    extended.append(child)
        live = extended
    return sorted(p.as_string() for p in live)


def estimate_coefficients_with_signs(
    oracle: QsqOracle, strings: list[PauliString], tau: float
) -> dict[PauliString, float]:
    """Coefficient values, up to one global sign, for a real-coefficient
    target (e.g. a Hermitian unitary).

    Magnitudes come from singleton subset-mass queries at tolerance tau^2;
    relative signs from (M+ - M-)/2 probes against the largest-magnitude
    anchor at tolerance tau^2/2.  Needs every true |coefficient| > tau/2.
    """
    if not strings:
        raise ValueError("empty string list")
    mags = {}
    for p in strings:
        o = oracle.query(Observable.subset_mass([p]), tau**2)
        mags[p] = float(np.sqrt(max(o, 0.0)))
    anchor = max(strings, key=lambda p: mags[p])
    if mags[anchor] < tau / 2:
        raise ValueError(
            f"anchor magnitude {mags[anchor]:.3g} below tau/2; "
            "sign probes would be unreliable"
        )
    out = {anchor: mags[anchor]}
    for p in strings:
        if p == anchor:
            continue
        probe = oracle.query(Observable.sign_probe(anchor, p), tau**2 / 2)
        out[p] = mags[p] if probe >= 0 else -mags[p]
    return out


def learn_qbf(
    oracle: QsqOracle, k: int, epsilon: float, c: float = 2.0
) -> PauliExpansion:
    """Approximate a Hermitian unitary target by its heavy Pauli terms.

    Heavy strings are located at threshold gamma = epsilon * 2^-k / c, then
    their coefficients estimated to accuracy epsilon * 4^-k.  The result is
    correct up to one global sign.
    """
    n = oracle.n
    gamma = epsilon * 2.0 ** (-k) / c
    found = goldreich_levin(oracle, GlConfig(gamma))
    if not found:
        warnings.warn("no heavy coefficients found; returning the zero expansion")
        return PauliExpansion(n)
    coeffs = estimate_coefficients_with_signs(oracle, found, epsilon * 4.0 ** (-k))
    mass = sum(v**2 for v in coeffs.values())
    if mass < 1 - epsilon**2:
        warnings.warn(
            f"recovered squared mass {mass:.4f} < 1 - epsilon^2; "
            "the target's coefficients are not concentrated on the list"
        )
    return PauliExpansion(n, {p: complex(v) for p, v in coeffs.items()})


def learn_junta(oracle: QsqOracle, cfg: JuntaConfig) -> LearnedUnitary:
    """Recover a unitary acting on at most k qubits (as identity elsewhere).

    Phase 1 thresholds per-qubit influences to find the support T; phase 2
    tomographs the Choi state's Bell pairs over T, conditioned on the
    complement pairs sitting in their maximally-entangled state, and reads
    the block unitary off the dominant eigenvector.
    """
    n = oracle.n
    if n is None:
        raise ValueError("oracle target is not a Choi state")
    influences = [
        estimate_influence(oracle, j, cfg.influence_tol) for j in range(n)
    ]
    support = tuple(
        j for j in range(n) if influences[j] >= cfg.influence_threshold
    )
    ell = len(support)
    if ell > cfg.k:
        raise ValueError(
            f"influence phase selected {ell} qubits, above the promised bound {cfg.k}"
        )
    snapshot = lambda: (oracle.ledger.total, oracle.ledger.min_tolerance)  # noqa: E731
    if ell == 0:
        total, min_tau = snapshot()
        return LearnedUnitary(
            n,
            DenseOperator(n, np.eye(2**n, dtype=complex)),
            junta_block=None,
            junta_support=(),
            queries=total,
            min_tolerance=min_tau,
            config=cfg,
            diagnostics={"influences": influences},
        )
    tau2 = 2.0 ** (-ell) * cfg.epsilon / 3
    d = 2**ell
    rho = np.zeros((d * d, d * d), dtype=complex)
    for r in all_pauli_strings(2 * ell):
        o = oracle.query(Observable.projected_doubled_pauli(r, support), tau2)
        rho += min(o, 1.0) * pauli_matrix(r) / (d * d)
    rho = (rho + rho.conj().T) / 2
    w_eig, v_eig = np.linalg.eigh(rho)
    psi = v_eig[:, -1]
    raw = unitary_of_choi(psi, ell)
    block, _ = polar(raw)
    defect = float(np.linalg.norm(raw - block))
    total, min_tau = snapshot()
    w = DenseOperator(ell, block)
    full = embed_operator(block, support, n)
    return LearnedUnitary(
        n,
        DenseOperator(n, full),
        junta_block=w,
        junta_support=support,
        queries=total,
        min_tolerance=min_tau,
        config=cfg,
        diagnostics={
            "influences": influences,
            "unitarity_defect": defect,
            "top_eigenvalue": float(w_eig[-1]),
        },
    )


def qsq_state_tomography(
    oracle: QsqOracle,
    epsilon: float,
    pure: bool = False,
    qubits=None,
    tau: float | None = None,
):
    """Full Pauli tomography of the oracle's hidden state.

    Queries every non-identity Pauli on ``qubits`` (default: the whole
    register) exactly once, at tolerance epsilon / sqrt(2^m) unless ``tau``
    overrides it; the 2-norm of the reconstruction error is then <= epsilon
    under any bounded noise model.  With ``pure`` set, returns the dominant
    eigenvector instead of the matrix.
    """
    m_full = oracle.m
    qubits = tuple(range(m_full)) if qubits is None else tuple(sorted(qubits))
    m = len(qubits)
    if tau is None:
        tau = epsilon / np.sqrt(2**m)
    d = 2**m
    rho = np.eye(d, dtype=complex) / d
    for p in all_pauli_strings(m):
        if p.is_identity():
            continue
        letters = ["I"] * m_full
        for i, q in enumerate(qubits):
            letters[q] = p.letter(i)
        obs = Observable.doubled_pauli(PauliString.from_letters("".join(letters)))
        x = min(oracle.query(obs, tau), 1.0)
        rho += x * pauli_matrix(p) / d
    rho = (rho + rho.conj().T) / 2
    if pure:
        _, v = np.linalg.eigh(rho)
        vec = v[:, -1]
        k = int(np.argmax(np.abs(vec)))
        vec = vec * np.exp(-1j * np.angle(vec[k]))
        return StateVector(m, vec / np.linalg.norm(vec))
    return DensityMatrix(m, rho)


def _hermitian_from_params(theta: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=complex)
    h[np.diag_indices(d)] = theta[:d]
    iu = np.triu_indices(d, 1)
    k = len(iu[0])
    h[iu] = theta[d : d + k] + 1j * theta[d + k : d + 2 * k]
    h += np.triu(h, 1).conj().T
    return h


def _gate_from_params(theta: np.ndarray) -> np.ndarray:
    from scipy.linalg import expm

    return expm(1j * _hermitian_from_params(theta, 4))


def _brickwork_pairs(n: int, depth: int) -> list[list[tuple[int, int]]]:
    return [
        [(q, q + 1) for q in range(layer % 2, n - 1, 2)] for layer in range(depth)
    ]


def _ansatz_circuit(n: int, depth: int, params: np.ndarray) -> Circuit:
    pairs = _brickwork_pairs(n, depth)
    layers = []
    offset = 0
    for layer_pairs in pairs:
        layer = []
        for pair in layer_pairs:
            layer.append((_gate_from_params(params[offset : offset + 16]), pair))
            offset += 16
        layers.append(tuple(layer))
    return Circuit(n, tuple(layers))


class _SearchHit(Exception):
    """Raised inside the objective to abort a minimization that is already
    below the acceptance threshold."""

    def __init__(self, params, value):
        self.params = params
        self.value = value


def _powell_search(objective, num_params, rng, restarts, accept, maxfev):
    """Random-restart Powell minimization; stops early once ``accept`` is hit."""

    def guarded(x):
        v = objective(x)
        if v <= 0.9 * accept:
            raise _SearchHit(np.array(x, copy=True), v)
        return v

    best_params = None
    best_value = np.inf
    for _ in range(restarts):
        x0 = rng.uniform(-np.pi, np.pi, size=num_params)
        try:
            res = minimize(
                guarded,
                x0,
                method="Powell",
                options={"maxfev": maxfev, "xtol": 1e-4, "ftol": 1e-6},
            )
            params, value = res.x, float(res.fun)
        except _SearchHit as hit:
            return hit.params, hit.value
        if value < best_value:
            best_value = value
            best_params = params
        if best_value <= accept:
            break
    return best_params, best_value


def learn_shallow(
    oracle: QsqOracle,
    depth: int,
    epsilon: float,
    search=None,
    seed=0,
    restarts: int = 50,
    maxfev: int = 6000,
) -> LearnedUnitary:
    """Learn a shallow brickwork circuit by matching local marginals of the
    Choi state.

    Tomographs every k-local reduced density matrix of the Choi state with
    k = min(2^(depth+2), 2n) at accuracy epsilon^2/(2n), then searches a
    depth-``depth`` brickwork ansatz for the circuit whose Choi marginals
    are all within epsilon^2/n of the estimates.  Hitting that bound
    certifies the learned circuit is within epsilon of the target.
    """
    n = oracle.n
    if n is None:
        raise ValueError("oracle target is not a Choi state")
    m = 2 * n
    k = min(2 ** (depth + 2), m)
    tau = epsilon**2 / (4 * n) * 2.0 ** (-depth / 2)
    subsets = list(itertools.combinations(range(m), k))
    marginals = [
        qsq_state_tomography(oracle, epsilon**2 / (2 * n), qubits=s, tau=tau)
        for s in subsets
    ]

    def objective(params: np.ndarray) -> float:
        choi = choi_of_circuit(_ansatz_circuit(n, depth, params))
        worst = 0.0
        for s, est in zip(subsets, marginals):
            red = partial_trace(choi, s)
            eigs = np.linalg.eigvalsh(red.entries - est.entries)
            worst = max(worst, 0.5 * float(np.sum(np.abs(eigs))))
        return worst

    num_params = 16 * sum(len(lp) for lp in _brickwork_pairs(n, depth))
    accept = epsilon**2 / n
    rng = as_rng(seed)
    if search is None:
        params, value = _powell_search(
            objective, num_params, rng, restarts, accept, maxfev
        )
    else:
        params, value = search(objective, num_params, rng, restarts, accept)
    circuit = _ansatz_circuit(n, depth, params)
    return LearnedUnitary(
        n,
        circuit.compile(),
        queries=oracle.ledger.total,
        min_tolerance=oracle.ledger.min_tolerance,
        config={"depth": depth, "epsilon": epsilon},
        certified=bool(value <= accept),
        diagnostics={"certificate": value, "threshold": accept},
    )
