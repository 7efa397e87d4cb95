"""Exact numerics for multicopy qudit teleportation and program retrieval."""

from .tensor import (
    DEFAULT_ATOL,
    DIM_CAP,
    GROUP_BUDGET,
    UNITARY_ATOL,
    CapacityError,
    Operator,
    Permutation,
    StateVector,
    VerificationError,
    conjugate_by_permutation,
    haar_state,
    haar_unitary,
    hermitian_eig,
    identity_operator,
    kron,
    max_entangled_state,
    partial_trace,
    partial_transpose,
    permutation_operator,
    permute_state,
    symmetric_group,
)
from .symgroup import (
    IrrepData,
    Partition,
    character,
    dim_standard,
    f_projector,
    irrep_data,
    mult_semistandard,
    partitions,
    removable_boxes,
    sym_basis,
    sym_partition,
    sym_projector,
    young_projector,
)
from .teleport import (
    Measurement,
    RVector,
    assert_eigendecomposition,
    build_measurement,
    eigendecomposition_residual,
    r_vectors,
    simulate,
    success_probability_formula,
    verify_theorem,
)
from .optimality import (
    ReducedMeasurement,
    equality_residual,
    haar_moment_check,
    decomposition_coefficients,
    objective,
    perturbation_falsifier,
    reduced_optimum,
)
from .sar import (
    Channel,
    ProgramState,
    depolarizing_channel,
    identity_channel,
    mix_channels,
    random_channel,
    retrieve,
    store,
    unitary_channel,
    verify_sar,
)

__version__ = "0.1.0"
