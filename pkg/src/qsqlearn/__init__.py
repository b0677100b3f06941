"""Learning unitaries from noisy statistical queries to their Choi states.

The library is organised around a small dense simulator (``states``), a
Pauli-label layer (``pauli``), a noisy statistical-query oracle (``oracle``),
the learning algorithms themselves (``learners``), distance/risk metrics and
channel unitarity (``metrics``), classical-function oracle constructions and
the hardness demos (``boolean_oracles``), and a CSV-emitting CLI (``cli``).
"""

__version__ = "0.1.0"

from .pauli import (
    PauliString,
    PauliPrefix,
    PauliExpansion,
    pauli_matrix,
    influence_subset_mass,
    dj_map,
)
from .states import (
    StateVector,
    DenseOperator,
    ChoiState,
    DensityMatrix,
    Circuit,
    choi_of_unitary,
    bell_transform,
    inverse_bell_transform,
    expansion_of_unitary,
    partial_trace,
    dominant_eigenstate,
    haar_random_unitary,
    random_brickwork_circuit,
)
from .oracle import Observable, NoiseModel, QueryLedger, QsqOracle, expectation_exact
from .learners import (
    GlConfig,
    JuntaConfig,
    LearnedUnitary,
    estimate_subset_mass,
    estimate_influence,
    goldreich_levin,
    estimate_coefficients_with_signs,
    learn_qbf,
    learn_junta,
    qsq_state_tomography,
    learn_shallow,
)
from .metrics import (
    StateEnsemble,
    KrausChannel,
    choi_distance,
    expected_risk_mc,
    unitarity,
    choi_matrix,
    purity_unitarity_sandwich_check,
)
from .boolean_oracles import (
    BooleanFunction,
    QuadraticForm,
    bitflip_unitary,
    phase_unitary,
    uniform_example_state,
    lift_observable_bitflip,
    compress_observable_phase,
    separation_gap,
    variance_probe,
)
