"""chromagap: exact combinatorial reductions and quantum-assignment
verification for CSPs, Pultr functors, and the 3XOR-to-colouring chain."""

from .relstruct import (
    RelStructure,
    Signature,
    check_homomorphism,
    chromatic_number,
    clique,
    diameter_and_connectivity,
    digraph,
    find_homomorphism,
    gaifman_distance,
    independence_number,
    symmetrize,
)
from .csp import CspInstance, augment_k, classify_label_cover, from_structures, isat_value, sat_value, to_structures
from .f2linalg import F2Ambient, F2Functional, F2Subspace, F2Vector, enumerate_subspaces, extend_functional
from .qop import (
    GQ,
    PMatrix,
    QuantumAssignment,
    cleanup_bipartite,
    compose_sandwich,
    lift_classical,
    mermin_peres,
    qsat,
    verify_assignment,
    verify_pvm,
)
from .pultr import (
    PultrTemplate,
    adjunction_oracle,
    central_apply,
    gamma_functor,
    lambda_functor,
    left_apply,
    template_predicates,
    transfer_gamma,
    transfer_lambda,
)
from .colouring import (
    alpha_beta,
    build_transition_matrix,
    eta_apply,
    eta_context,
    eta_quantum_transfer,
    line_digraph,
    linedigraph_quantum_transfer,
    linedigraph_template,
    xi_colouring,
)
from .dkkms import (
    XorSystem,
    build_rho1,
    build_rho2,
    game_csp,
    is_regular,
    legitimate_tuples,
    rho_quantum_transfer,
    verify_game_assignment,
)
from .dmr import collapse_to_d2d, dmr_pipeline, equalize_marginals, left_regularize

__version__ = "0.1.0"
