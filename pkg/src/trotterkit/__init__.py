"""Matrix exponentials, Trotter product formulas and split-step evolution."""
from .expm import UnitaryOperator, evolve_state, exact_expm, taylor_expm
from .hamiltonians import (
    PauliString,
    build_diagonal,
    build_pauli,
    build_random_hermitian,
    build_tight_binding,
)
from .linalg import (
    ConvergenceError,
    DimensionError,
    LinalgError,
    NotHermitianError,
    SpectralDecomposition,
    commutator,
    eig_hermitian,
    hermitian_check,
    matmul,
    normalize,
    norms,
)
from .schrodinger import (
    GridSpec,
    WaveFunction,
    kinetic_step,
    observables,
    potential_step,
    split_step_evolve,
)
from .trotter import (
    ConvergenceReport,
    ErrorMetric,
    SplitHamiltonian,
    convergence_study,
    defect,
    defect_supremum,
    generator_residual,
    linearized_trotter,
    trotter_evolve,
    trotter_step,
)

__version__ = "0.1.0"
