"""spintomo: assistant-aided reconstruction of a spin-1/2 Bloch vector.

The full unknown state of a spin-1/2 is recovered from repeated
simultaneous measurements of commuting observables on the system plus a
known assistant, using one fixed apparatus setting.  Two assistants are
implemented: a second spin-1/2 (optimal tetrahedron scheme) and a
resonantly coupled field mode in a coherent state, with closed-form
dynamics cross-checked against an exact matrix-exponential reference.
"""

from .core import (
    FockSpace,
    IllConditionedError,
    TruncationError,
    bloch_to_density,
    coherent_state,
    density_to_bloch,
    hermitian_expm,
    pauli,
    tensor_product,
)
from .spin_assistant import (
    OPTIMAL_DETERMINANT,
    MappingCoefficients,
    SpinScheme,
    build_scheme,
    forward_probabilities,
    ising_hamiltonian,
    optimal_hamiltonian,
    optimal_scheme,
    reconstruct_bloch,
)
from .coherent_assistant import (
    ExpectationTriple,
    JCParams,
    ReconstructionSystem,
    determinant_series,
    expectations_analytic,
    reconstruction_system,
    reconstruct_initial,
    singular_triplet_check,
)
from .oracle import JCOracle, jc_hamiltonian, oracle_expectations
from .measurement import (
    ReconstructionReport,
    ShotRecord,
    estimate_triple,
    reconstruct_from_shots,
    sample,
)

__version__ = "0.1.0"

__all__ = [
    "FockSpace",
    "IllConditionedError",
    "TruncationError",
    "bloch_to_density",
    "coherent_state",
    "density_to_bloch",
    "hermitian_expm",
    "pauli",
    "tensor_product",
    "OPTIMAL_DETERMINANT",
    "MappingCoefficients",
    "SpinScheme",
    "build_scheme",
    "forward_probabilities",
    "ising_hamiltonian",
    "optimal_hamiltonian",
    "optimal_scheme",
    "reconstruct_bloch",
    "ExpectationTriple",
    "JCParams",
    "ReconstructionSystem",
    "determinant_series",
    "expectations_analytic",
    "reconstruction_system",
    "reconstruct_initial",
    "singular_triplet_check",
    "JCOracle",
    "jc_hamiltonian",
    "oracle_expectations",
    "ReconstructionReport",
    "ShotRecord",
    "estimate_triple",
    "reconstruct_from_shots",
    "sample",
    "__version__",
]
