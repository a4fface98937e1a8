"""The blocking gadget, 3-connectivity amplification and blocked graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .graph import Graph, sort_key
from .tree import HostTree, analyze_tree

__all__ = [
    "GadgetParams",
    "BlockedLabels",
    "COPIES",
    "build_gadget",
    "amplify_3con",
    "build_blocked_graph",
    "build_empty_blocked",
    "reduction_params_for_tree",
    "params_for_leafage",
    "gadget_path_vertex",
]

COPIES = ("a", "b", "c", "d", "e", "f")
ROLES = ("vertex", "edge", "brother", "gadget")


@dataclass(frozen=True)
class GadgetParams:
    d: int
    u: int = 0

    def __post_init__(self):
        if self.d < 3:
            raise ValueError(f"gadget needs d >= 3, got {self.d}")
        if self.u < 0 or self.u == 1:
            raise ValueError(f"gadget needs u = 0 or u >= 2, got {self.u}")


def gadget_path_vertex(family: str, index: int, step: int) -> str:
    """Name of the ``step``-th internal vertex (1-based) of path ``index``.

    ``family`` is ``"d"`` for the paths between v_s and v_b (step 1 is next to
    v_s) or ``"u"`` for the paths between v_s' and v_b' (step 1 is next to v_s').
    """
    return f"gadget:{family}{index}:{step}"


def build_gadget(p: GadgetParams, path_vertices: int = 3) -> tuple[Graph, dict[str, str]]:
    """Build G_d^u and return it with the named vertices.

    ``vs`` and ``vb`` are joined by ``d`` internally disjoint paths with
    ``path_vertices`` internal vertices each; ``vb_prime`` is the middle
    internal vertex of the first of them.  For ``u >= 2`` a further vertex
    ``vs_prime`` is joined to ``vb_prime`` by ``u`` such paths.
    """
    if path_vertices < 1:
        raise ValueError("paths need at least one internal vertex")
    vs, vb = "gadget:vs", "gadget:vb"
    named = {"vs": vs, "vb": vb}
    verts = [vs, vb]
    edges = []
    for i in range(1, p.d + 1):
        chain = [vs] + [gadget_path_vertex("d", i, j) for j in range(1, path_vertices + 1)] + [vb]
        verts += chain[1:-1]
        edges += zip(chain, chain[1:])
    named["vb_prime"] = gadget_path_vertex("d", 1, (path_vertices + 1) // 2)
    if p.u:
        vsp = "gadget:vs_prime"
        named["vs_prime"] = vsp
        verts.append(vsp)
        for i in range(1, p.u + 1):
            chain = (
                [vsp]
                + [gadget_path_vertex("u", i, j) for j in range(1, path_vertices + 1)]
                + [named["vb_prime"]]
            )
            verts += chain[1:-1]
            edges += zip(chain, chain[1:])
    return Graph(verts, edges), named


def amplify_3con(g: Graph) -> Graph:
    """Three copies of ``g`` with a triangle on the copies of every vertex."""
    if len(g) < 2:
        raise ValueError("amplification needs at least 2 vertices")
    if not g.is_connected():
        raise ValueError("amplification needs a connected graph")
    name = lambda v, i: f"copy{i}:{v}"  # noqa: E731
    verts = [name(v, i) for i in (1, 2, 3) for v in g.vertices]
    edges = [(name(a, i), name(b, i)) for i in (1, 2, 3) for a, b in g.edges]
    for v in g.vertices:
        edges += [(name(v, 1), name(v, 2)), (name(v, 2), name(v, 3)), (name(v, 1), name(v, 3))]
    return Graph(verts, edges)


@dataclass(frozen=True)
class BlockedLabels:
    """Role bookkeeping for a blocked graph."""

    role: Mapping[str, str]
    copy: Mapping[str, str]
    origin: Mapping[str, object]  # vertex rep -> original vertex, edge rep -> original edge
    brother_of: Mapping[str, str]  # vertex rep -> brother
    named: Mapping[str, str] = field(default_factory=dict)
    params: GadgetParams | None = None

    def of_role(self, role: str) -> list[str]:
        return sorted((v for v, r in self.role.items() if r == role), key=sort_key)

    @property
    def vertex_reps(self) -> list[str]:
        return self.of_role("vertex")

    @property
    def edge_reps(self) -> list[str]:
        return self.of_role("edge")

    @property
    def brothers(self) -> list[str]:
        return self.of_role("brother")

    @property
    def gadget(self) -> list[str]:
        return self.of_role("gadget")

    def vertex_rep(self, copy: str, v: str) -> str:
        return f"vrep:{copy}:{v}"

    def reps_of_copy(self, copy: str) -> list[str]:
        return [v for v in self.vertex_reps if self.copy[v] == copy]

    def to_dict(self) -> dict:
        origin = {
            v: (list(o) if isinstance(o, tuple) else o) for v, o in sorted(self.origin.items())
        }
        out = {
            "role": dict(sorted(self.role.items())),
            "copy": dict(sorted(self.copy.items())),
            "origin": origin,
            "brother_of": dict(sorted(self.brother_of.items())),
            "named": dict(sorted(self.named.items())),
        }
        if self.params is not None:
            out["params"] = {"d": self.params.d, "u": self.params.u}
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> BlockedLabels:
        try:
            origin = {
                v: (tuple(o) if isinstance(o, list) else o) for v, o in data["origin"].items()
            }
            params = data.get("params")
            return cls(
                role=dict(data["role"]),
                copy=dict(data["copy"]),
                origin=origin,
                brother_of=dict(data["brother_of"]),
                named=dict(data.get("named", {})),
                params=GadgetParams(params["d"], params["u"]) if params else None,
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed labels object: {exc}") from exc


def _blocked_core(g: Graph) -> tuple[list[str], list[tuple[str, str]], dict, dict, dict, dict]:
    role, copy, origin, brother_of = {}, {}, {}, {}
    verts: list[str] = []
    edges: list[tuple[str, str]] = []
    clique: list[str] = []
    for c in COPIES:
        for v in g.vertices:
            rep, bro = f"vrep:{c}:{v}", f"bro:{c}:{v}"
            role[rep], role[bro] = "vertex", "brother"
            copy[rep] = copy[bro] = c
            origin[rep] = v
            brother_of[rep] = bro
            verts += [rep, bro]
            clique.append(bro)
            edges.append((rep, bro))  # E3
        for a, b in g.sorted_edges():
            er = f"erep:{c}:({a},{b})"
            role[er] = "edge"
            copy[er] = c
            origin[er] = (a, b)
            verts.append(er)
            clique.append(er)
            edges += [(er, f"vrep:{c}:{a}"), (er, f"vrep:{c}:{b}")]  # E1
    edges += combinations(clique, 2)  # E2
    return verts, edges, role, copy, origin, brother_of


def build_blocked_graph(
    g: Graph, p: GadgetParams, path_vertices: int = 3
) -> tuple[Graph, BlockedLabels]:
    """The G_d^u-blocked graph of ``g`` with its role labels."""
    verts, edges, role, copy, origin, brother_of = _blocked_core(g)
    clique = [v for v in verts if role[v] in ("edge", "brother")]
    gadget, named = build_gadget(p, path_vertices)
    for v in gadget.vertices:
        role[v] = "gadget"
    verts += gadget.vertices
    edges += gadget.edges  # E6
    edges += [(x, named["vs"]) for x in clique]  # E4
    edges += [(x, named["vb"]) for x in clique]  # E5
    labels = BlockedLabels(role, copy, origin, brother_of, named, p)
    return Graph(verts, edges), labels


def build_empty_blocked(g: Graph) -> tuple[Graph, BlockedLabels]:
    """The blocked graph without any gadget (the subpath reduction target)."""
    verts, edges, role, copy, origin, brother_of = _blocked_core(g)
    return Graph(verts, edges), BlockedLabels(role, copy, origin, brother_of, {}, None)


def params_for_leafage(k: int) -> GadgetParams:
    """Parameters for host trees with ``k`` leaves and no prescribed shape."""
    if k < 3:
        raise ValueError("k must be at least 3")
    return GadgetParams(3, 0) if k == 3 else GadgetParams(3, k - 2)


def reduction_params_for_tree(t: HostTree) -> tuple[GadgetParams, int]:
    """Gadget parameters and colour count for host trees in SUB(t).

    ``k`` is the leafage; ``d`` is the smallest degree of a lastbranch; a tree
    with a single branching node uses ``u = 0`` (and then ``d = k``),
    otherwise ``u = k - d + 1``.
    """
    info = analyze_tree(t)
    if info.leafage < 3:
        raise ValueError("tree must have at least 3 leaves")
    k = info.leafage
    if len(info.branching_nodes) == 1:
        return GadgetParams(k, 0), k
    d = min(t.degree(n) for n in info.lastbranches)
    return GadgetParams(d, k - d + 1), k
