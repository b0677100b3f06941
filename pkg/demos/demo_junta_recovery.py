"""Learn a unitary acting on a hidden pair of qubits and check the distance."""
import numpy as np

from qsqlearn import (
    DenseOperator,
    JuntaConfig,
    NoiseModel,
    QsqOracle,
    StateEnsemble,
    choi_of_unitary,
    expected_risk_mc,
    haar_random_unitary,
    learn_junta,
)
from qsqlearn.states import embed_operator

n, k = 4, 2

gate = haar_random_unitary(2, seed=11)
support = (1, 3)
target = DenseOperator(n, embed_operator(gate.entries, support, n))
oracle = QsqOracle(choi_of_unitary(target), noise=NoiseModel.gaussian(), seed=11)

result = learn_junta(oracle, JuntaConfig(k=k, epsilon=0.2))
print(f"recovered support: {result.junta_support} (true {support})")
assert result.junta_support == support

ensemble = StateEnsemble.haar_global(n)
risk, se = expected_risk_mc(target, result.operator, ensemble, samples=200, seed=3)
print(f"Monte-Carlo risk: {risk:.4f} +/- {se:.4f}")
assert risk < 0.04

print(f"queries used: {result.queries}, smallest tolerance: {result.min_tolerance:.4g}")
