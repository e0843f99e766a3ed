"""Width parameters and certificates for graphs embedded in the sphere or projective plane.

The package works with signed rotation systems: every vertex carries a clockwise
cyclic order of its incident half-edges and every edge carries a sign, +1 for
untwisted and -1 for twisted.  Two surfaces are supported, the sphere ("S") and
the projective plane ("P"), distinguished by Euler characteristic 2 and 1.
"""

from .embed import (
    SPHERE,
    PROJECTIVE,
    GraphError,
    StructureError,
    DomainError,
    SizeCapError,
    EmbeddedGraph,
    Face,
    DualWalk,
    MinimalityCheck,
    mate,
    edge_of,
    parse_rot,
    write_rot,
    representativity,
    representativity_bruteforce,
    radial_graph,
    odd_closed_walk,
    iso_map,
    is_minor_minimal_representative,
)
from .cover import DoubleCover, double_cover, lift_walk, find_free_involution, quotient_by_involution
from .medial import (
    MedialGraph,
    StraightAheadDecomposition,
    TightnessCheck,
    LinsTightness,
    medial,
    straight_ahead,
    opening_face_pairs,
    open_at,
    dual_odd_girth,
    dual_odd_walk,
    opened_dual_odd_girth,
    is_k_tight_direct,
    is_tight_lins,
)

from .width import (
    Antipodality,
    Carving,
    BranchDecomposition,
    CarvingWidth,
    MinorMinimalityReport,
    decomposition_width,
    decomposition_from_json,
    antipodality_from_json,
    optimal_carving,
    optimal_branch_decomposition,
    shortest_closed_dual_walk_through,
    antipodality_decision,
    validate_antipodality,
    carving_width,
    carving_width_witness,
    branch_width,
    build_cover_antipodality,
    certify_minor_minimal_bw,
    bw_bruteforce,
    cw_bruteforce,
    OracleReport,
    oracle_carving_suite,
    oracle_medial_suite,
    oracle_representativity_suite,
)

from .sweep import (
    Graft,
    SweepTrace,
    build_graft,
    delta_nabla,
    extreme_brooms,
    sweep_graft,
    cut_open,
    sweep_tight,
    sweep_double_cover,
    carving_from_opening,
    validate_sweep_trace,
)

from .atlas import (
    Catalog,
    projective_grid,
    dodecahedron,
    petersen_projective,
    cobweb,
    y_delta,
    delta_y,
    single_lift_ydelta,
    enumerate_catalog,
    enumerate_embedded,
    plane_multigraph_classes,
    abstract_key,
    same_abstract_graph,
)

__version__ = "0.1.0"

__all__ = [
    "SPHERE",
    "PROJECTIVE",
    "GraphError",
    "StructureError",
    "DomainError",
    "SizeCapError",
    "EmbeddedGraph",
    "Face",
    "DualWalk",
    "MinimalityCheck",
    "mate",
    "edge_of",
    "parse_rot",
    "write_rot",
    "representativity",
    "representativity_bruteforce",
    "iso_map",
    "radial_graph",
    "odd_closed_walk",
    "is_minor_minimal_representative",
    "DoubleCover",
    "double_cover",
    "lift_walk",
    "find_free_involution",
    "quotient_by_involution",
    "MedialGraph",
    "StraightAheadDecomposition",
    "TightnessCheck",
    "LinsTightness",
    "medial",
    "straight_ahead",
    "opening_face_pairs",
    "open_at",
    "dual_odd_girth",
    "dual_odd_walk",
    "opened_dual_odd_girth",
    "is_k_tight_direct",
    "is_tight_lins",
    "Antipodality",
    "Carving",
    "BranchDecomposition",
    "CarvingWidth",
    "MinorMinimalityReport",
    "decomposition_width",
    "decomposition_from_json",
    "antipodality_from_json",
    "optimal_carving",
    "optimal_branch_decomposition",
    "shortest_closed_dual_walk_through",
    "antipodality_decision",
    "validate_antipodality",
    "carving_width",
    "carving_width_witness",
    "branch_width",
    "build_cover_antipodality",
    "certify_minor_minimal_bw",
    "bw_bruteforce",
    "cw_bruteforce",
    "OracleReport",
    "oracle_carving_suite",
    "oracle_medial_suite",
    "oracle_representativity_suite",
    "Graft",
    "SweepTrace",
    "build_graft",
    "delta_nabla",
    "extreme_brooms",
    "sweep_graft",
    "cut_open",
    "sweep_tight",
    "sweep_double_cover",
    "carving_from_opening",
    "validate_sweep_trace",
    "Catalog",
    "projective_grid",
    "dodecahedron",
    "petersen_projective",
    "cobweb",
    "y_delta",
    "delta_y",
    "single_lift_ydelta",
    "enumerate_catalog",
    "enumerate_embedded",
    "plane_multigraph_classes",
    "abstract_key",
    "same_abstract_graph",
    "__version__",
]
