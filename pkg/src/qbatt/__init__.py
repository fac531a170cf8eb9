"""qbatt: stochastic energy extraction from a qubit battery under projective
measurements of its auxiliary, with positive and non-positive effective
measurement families, noise dilations, and restricted-measurement optimization."""

from ._backend import backend_name
from .hilbert import (
    Operator,
    apply_unitary,
    eig_hermitian,
    identity,
    kron,
    partial_trace,
    unitary_from_hamiltonian,
)
from .model import (
    GhzSpec,
    ModelParams,
    coupling_hamiltonian,
    default_initial_state,
    ghz_state,
    local_hamiltonian,
)
from .noise import KINDS, NoiseSpec, apply_channel, dilation_unitary, kraus_operators
from .optimizer import (
    AccessibleResult,
    OptimizerConfig,
    accessible_energy,
    haar_random_unitary,
    sampled_supremum,
    single_qubit_unitary,
)
from .protocol import (
    ExtractionResult,
    Outcome,
    Scenario,
    SpectraReport,
    b_operator,
    evolve,
    max_extractable,
    run_scenario,
    spectra_compare,
    stochastic_energy,
    z_operator,
)

__version__ = "0.1.0"

__all__ = [
    "Operator", "apply_unitary", "eig_hermitian", "identity", "kron",
    "partial_trace", "unitary_from_hamiltonian",
    "ModelParams", "GhzSpec", "local_hamiltonian", "coupling_hamiltonian",
    "ghz_state", "default_initial_state",
    "NoiseSpec", "KINDS", "dilation_unitary", "kraus_operators", "apply_channel",
    "Scenario", "Outcome", "ExtractionResult", "SpectraReport",
    "evolve", "z_operator", "b_operator", "stochastic_energy",
    "max_extractable", "run_scenario", "spectra_compare",
    "OptimizerConfig", "AccessibleResult", "accessible_energy",
    "single_qubit_unitary", "haar_random_unitary", "sampled_supremum",
    "backend_name", "__version__",
]
