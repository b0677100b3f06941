"""Recover the heavy Pauli coefficients of a CNOT from noisy statistical queries."""
import numpy as np

from qsqlearn import (
    DenseOperator,
    GlConfig,
    NoiseModel,
    QsqOracle,
    bell_transform,
    choi_of_unitary,
    estimate_coefficients_with_signs,
    goldreich_levin,
)

CNOT = DenseOperator(
    2,
    np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
)

state = choi_of_unitary(CNOT)
oracle = QsqOracle(state, noise=NoiseModel.gaussian(), seed=7)

gamma = 0.4
heavy = goldreich_levin(oracle, GlConfig(gamma=gamma))
print(f"gamma={gamma}: found {[p.letters for p in heavy]}")

# CNOT expands over exactly four Pauli strings, each with coefficient 1/2.
truth = bell_transform(state)
for p in heavy:
    print(f"  |c_{p.letters}| = {abs(truth[p.code]):.3f}")
assert sorted(p.letters for p in heavy) == ["II", "IX", "ZI", "ZX"]

coeffs = estimate_coefficients_with_signs(oracle, heavy, tau=0.1)
recon = sum(c * np.conj(truth[p.code]) for p, c in coeffs.items())
print(f"overlap of reconstruction with truth: {abs(recon):.4f}")
assert abs(recon) > 0.95

print(f"queries used: {oracle.ledger.total}")
