"""Schmidt-number witnesses from symmetric (N, M)-POVMs."""

from .errors import SnwitError
from .fedorov import (
    AmplitudeGrid,
    GaussianBiphoton,
    fedorov_ratio,
    fedorov_ratio_grid,
    participation_ratio_svd,
    sample_grid,
    schmidt_number_gaussian,
)
from .operator_basis import HermitianBasis, gell_mann_basis, pauli_basis, random_unitary
from .positive_maps import (
    WitnessMap,
    adjoint_map,
    apply_map,
    choi_matrix,
    h_coefficient,
    hs_identity_check,
    kpos_trace_square_check,
)
from .rotations import RotationFamily, identity_rotation_family, random_rotation_family
from .states import (
    BipartiteState,
    isotropic_expectation_analytic,
    isotropic_state,
    max_entangled_rank_k,
    random_pure_schmidt_rank,
    schmidt_decomposition,
    threshold_v,
)
from .symmetric_measurement import (
    PovmParameters,
    SymmetricPovm,
    build_h_operators,
    build_nm_povm,
    mub_basis,
    t_interval,
    t_of_x,
    validate_povm,
    x_of_t,
)
from .witness import (
    WitnessOperator,
    build_witness,
    choi_consistency_check,
    expectation,
    min_over_schmidt_k,
)

__version__ = "0.1.0"
