"""Subtree overlap graphs: reduction gadgets, canonical representations and bounded search."""

from .canonical import (
    ConstructionError,
    DecodedColoring,
    LayoutConfig,
    NoNiceCopy,
    decode_coloring,
    find_illegal_pairs,
    represent_blocked_on_star,
    represent_blocked_on_subdivision,
    represent_empty_blocked_subpaths,
)
from .gadget import (
    BlockedLabels,
    GadgetParams,
    amplify_3con,
    build_blocked_graph,
    build_empty_blocked,
    build_gadget,
    params_for_leafage,
    reduction_params_for_tree,
)
from .graph import Coloring, Graph, find_k_coloring, vertex_connectivity
from .search import (
    AuditReport,
    HostConstraint,
    SearchConfig,
    SearchResult,
    SearchStatus,
    audit_gadget_lemmas,
    audit_spanbranch,
    enumerate_host_trees,
    find_representation,
    free_trees,
)
from .tree import (
    HostTree,
    Relation,
    Representation,
    Subtree,
    analyze_tree,
    derive_graph,
    lift_representation,
    set_relation,
    subdivide,
    verify_representation,
)

__version__ = "0.1.0"
