"""Layered-grid constructions with unique shortest paths, their alternating
product, the clique-chain edge extension, and adversarial audits of all
three, plus additive and multiplicative spanner baselines.

The compiled BFS kernels are used when available; `opgraph.kernels.COMPILED`
says which flavor this process is running.
"""

from .avgfree import (
    AvgFreeSet,
    ConstructionParams,
    build_avgfree,
    build_shell,
    encode_vector,
    verify_avgfree,
)
from .base_graph import (
    BaseAuditReport,
    LayeredGraph,
    PairSet,
    audit_base,
    build_base,
    node_coords,
    node_id,
    validate_canonical_paths,
)
from .errors import (
    BudgetError,
    ConstructionViolation,
    InconclusiveError,
    InputError,
    IntegrityError,
    OpGraphError,
)
from .graph import Graph, bfs_distances, count_shortest_paths, delete_edges, is_path
from .labels import (
    BaseNode,
    CliqueNode,
    NodeLabelTable,
    PathNode,
    ProductNode,
    label_from_str,
    label_to_str,
)
from .obstacle_product import (
    EdgeExtension,
    ObstacleGraph,
    OPAuditReport,
    audit_op,
    build_op,
    clique_sequence,
    extend_edges,
    faithfulness_check,
    replace_cliques,
)
from .path_compression import (
    CompressedAuditReport,
    CompressedGraph,
    ForwardOrientation,
    audit_compressed,
    build_rho,
    compress,
    orient,
    product_id,
    reachable_core,
)
from .pipeline import (
    LoadedStage,
    OpView,
    RunResult,
    fixture_set,
    load_stage,
    plan,
    run_pipeline,
)
from .spanners import (
    SpannerAudit,
    SpannerResult,
    girth,
    op_retention,
    spanner_greedy_mult,
    spanner_plus2,
    spanner_plus6,
    verify_spanner,
)
from .verification import (
    AdversaryFinding,
    CollisionWitness,
    FamilyMember,
    StretchReport,
    SubgraphMask,
    bitmap_compressor,
    build_family_member,
    counting_adversary,
    family_check,
    family_member_distances,
    hash_compressor,
    identity_compressor,
    pigeonhole_demo,
    stretch_audit,
    sweep_family,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryFinding",
    "AvgFreeSet",
    "BaseAuditReport",
    "BaseNode",
    "BudgetError",
    "CliqueNode",
    "CollisionWitness",
    "CompressedAuditReport",
    "CompressedGraph",
    "ConstructionParams",
    "ConstructionViolation",
    "EdgeExtension",
    "FamilyMember",
    "ForwardOrientation",
    "Graph",
    "InconclusiveError",
    "InputError",
    "IntegrityError",
    "LayeredGraph",
    "LoadedStage",
    "NodeLabelTable",
    "OPAuditReport",
    "ObstacleGraph",
    "OpGraphError",
    "OpView",
    "PairSet",
    "PathNode",
    "ProductNode",
    "RunResult",
    "SpannerAudit",
    "SpannerResult",
    "StretchReport",
    "SubgraphMask",
    "audit_base",
    "audit_compressed",
    "audit_op",
    "bfs_distances",
    "bitmap_compressor",
    "build_avgfree",
    "build_base",
    "build_family_member",
    "build_op",
    "build_rho",
    "build_shell",
    "clique_sequence",
    "compress",
    "count_shortest_paths",
    "counting_adversary",
    "delete_edges",
    "encode_vector",
    "extend_edges",
    "faithfulness_check",
    "family_check",
    "family_member_distances",
    "fixture_set",
    "girth",
    "hash_compressor",
    "identity_compressor",
    "is_path",
    "label_from_str",
    "label_to_str",
    "load_stage",
    "node_coords",
    "node_id",
    "op_retention",
    "orient",
    "pigeonhole_demo",
    "plan",
    "product_id",
    "reachable_core",
    "replace_cliques",
    "run_pipeline",
    "spanner_greedy_mult",
    "spanner_plus2",
    "spanner_plus6",
    "stretch_audit",
    "sweep_family",
    "validate_canonical_paths",
    "verify_avgfree",
    "verify_spanner",
]
