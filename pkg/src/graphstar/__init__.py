"""Graph C*-correspondences, KMS states and quantum symmetries of finite graphs."""

__version__ = "0.1.0"

from .algebra import (
    AlgebraElement,
    apply_state,
    element_from_json,
    equal,
    expand,
    gauge_apply,
    kms_condition_check,
    monomial_keys,
    monomials,
    multiply,
    sigma_apply,
    sigma_i_beta,
    state_eval,
)
from .correspondence import (
    EdgeFunction,
    PathVector,
    VertexFunction,
    inner_product,
    left_act,
    path_basis,
    right_act,
    tensor,
    tensor_inner_product,
    vertex_pullback,
)
from .errors import (
    DanglingEndpointError,
    DimensionMismatchError,
    DuplicateIdentifierError,
    GraphFormatError,
    GraphMismatchError,
    GraphStarError,
    InvariantError,
    PreconditionError,
    SizeBoundError,
)
from .graph import (
    Graph,
    GraphAutomorphism,
    StructuralReport,
    adjacency,
    bouquet,
    bouquet_union,
    classical_automorphisms,
    disjoint_union,
    from_adjacency,
    load_graph,
    oriented_cycle,
    parse_graph,
    structural_report,
)
from .kms import KmsProfile, kms_eval_tensor, kms_profile, perron
from .magic import MagicUnitary, two_projection_unitary
from .nonlinear import nonlinear_coaction_demo
from .presentation import Presentation, emit_banica, emit_bichon, emit_wreath, verify_magic
from .symmetry import (
    CoactionMatrices,
    build_coactions,
    classical_coactions,
    coincidence_verdict,
    identity_coactions,
    kac_witness,
    state_equivariance_check,
    verify_equivariance,
)
