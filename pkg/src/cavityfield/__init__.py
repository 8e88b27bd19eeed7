"""Cavity-field statistics for a driven two-level emitter in a lossless cavity.

The package follows one pipeline: build :class:`SystemParams`, evolve them into
a :class:`JointState` (closed form, or the independent RK4 integrator), reduce
to a :class:`DensityMatrix` via one of three constructors, then feed the matrix
to photon statistics and Wigner-map routines.  The command line in
:mod:`cavityfield.cli` drives the same calls and writes CSV plus PNG reports.
"""

from .errors import (
    DegenerateParametersError,
    EmptyManifoldError,
    IntegrationDivergedError,
    PhaseSpaceTruncationError,
    StepSizeError,
    TruncationTailError,
    TruncationWarning,
    VacuumFieldError,
    WignerBoundError,
    WignerConvergenceError,
    ZeroDenominatorError,
)
from .model import (
    JointState,
    SystemParams,
    coherent_amplitude,
    coherent_state_vector,
    default_n_max,
    evolve_closed_form,
    manifold_probability,
    rabi_frequency,
    truncation_tail,
)
from .observables import (
    FieldMoments,
    ObservableReport,
    exact_report,
    field_moments,
    mandel_q,
    mandel_q_paper,
    paper_report,
    photon_number_distribution,
    squeezing_parameters,
    squeezing_paper,
)
from .oracle import (
    DensityDiagnostics,
    DensityMatrix,
    integrate_schrodinger,
    manifold_density_matrix,
    paper_density_matrix,
    reduced_density_matrix,
    validate_density,
)
from .wigner import (
    GridWindow,
    WignerGrid,
    WignerMinimum,
    displaced_fock_overlap,
    laguerre_assoc,
    min_wigner,
    wigner_grid,
    wigner_parity_oracle,
    wigner_series,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # parameters and state
    "SystemParams",
    "JointState",
    "default_n_max",
    "truncation_tail",
    "rabi_frequency",
    "coherent_amplitude",
    "coherent_state_vector",
    "evolve_closed_form",
    "manifold_probability",
    # density matrices
    "DensityMatrix",
    "DensityDiagnostics",
    "integrate_schrodinger",
    "reduced_density_matrix",
    "paper_density_matrix",
    "manifold_density_matrix",
    "validate_density",
    # photon statistics
    "FieldMoments",
    "ObservableReport",
    "photon_number_distribution",
    "field_moments",
    "mandel_q",
    "mandel_q_paper",
    "squeezing_parameters",
    "squeezing_paper",
    "exact_report",
    "paper_report",
    # phase space
    "GridWindow",
    "WignerGrid",
    "WignerMinimum",
    "laguerre_assoc",
    "displaced_fock_overlap",
    "wigner_series",
    "wigner_parity_oracle",
    "wigner_grid",
    "min_wigner",
    # errors
    "DegenerateParametersError",
    "TruncationTailError",
    "StepSizeError",
    "IntegrationDivergedError",
    "EmptyManifoldError",
    "VacuumFieldError",
    "ZeroDenominatorError",
    "PhaseSpaceTruncationError",
    "WignerConvergenceError",
    "WignerBoundError",
    "TruncationWarning",
]
