"""Variational circuits for the exponential of real antisymmetric matrices.

The circuit is built around the uniform antisymmetric matrix G (+1 above the
diagonal, -1 below), whose eigenbasis is a phase-shifted quantum Fourier
transform.
"""

from .circuit import (
    GateKind,
    GateOp,
    ParamVector,
    assemble_u,
    block_identity,
    build_d_block,
    build_kron_rz,
    build_lambda_block,
    build_p_block,
    build_param_qft,
    p_count,
    random_params,
    reconstruct_generator,
    total_count,
    warm_start,
)
from .linalg import expm_pade, frobenius_distance, hermitian_eig
from .matgen import (
    Family,
    MatrixFamily,
    apply_signed_perm,
    find_canonical_perm,
    is_transitive,
    random_antisym,
    sign_matrix,
)
from .optimize import (
    LossMode,
    OptConfig,
    OptTrace,
    antisym_objective,
    finite_diff_grad,
    loss_antisym,
    loss_unitary,
    minimize,
    seeded_start,
    unitary_objective,
)
from .spectral import GSpectrum, build_g, g_spectrum, verify_spectrum

__version__ = "0.1.0"
