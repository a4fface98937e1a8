"""Host trees, subtrees, representations and the graphs they induce."""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from .graph import Graph, graphs_equal, sort_key

__all__ = [
    "HostTree",
    "Subtree",
    "Relation",
    "Representation",
    "TreeAnalysis",
    "Verdict",
    "set_relation",
    "derive_graph",
    "verify_representation",
    "analyze_tree",
    "subdivide",
    "lift_representation",
    "subdivision_node",
    "subtree_leaves",
    "boundary_nodes",
    "common_nodes",
    "path_tree",
    "star_tree",
    "spider_tree",
    "double_star_tree",
]


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if sort_key(a) <= sort_key(b) else (b, a)


@dataclass(frozen=True)
class HostTree:
    """An unrooted tree on string node identifiers."""

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    _adj: Mapping[str, tuple[str, ...]] = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, nodes: Iterable, edges: Iterable):
        ns = [str(n) for n in nodes]
        if not ns:
            raise ValueError("a host tree needs at least one node")
        if len(set(ns)) != len(ns):
            raise ValueError("duplicate node identifiers")
        nset = set(ns)
        es: set[tuple[str, str]] = set()
        for e in edges:
            a, b = (str(x) for x in e)
            if a == b or a not in nset or b not in nset:
                raise ValueError(f"bad tree edge ({a!r}, {b!r})")
            es.add(_pair(a, b))
        if len(es) != len(ns) - 1:
            raise ValueError(f"{len(ns)} nodes need {len(ns) - 1} edges, got {len(es)}")
        adj: dict[str, list[str]] = {n: [] for n in ns}
        for a, b in es:
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "nodes", tuple(sorted(ns, key=sort_key)))
        object.__setattr__(self, "edges", frozenset(es))
        object.__setattr__(
            self, "_adj", {n: tuple(sorted(v, key=sort_key)) for n, v in adj.items()}
        )
        if not self.is_connected_set(nset):
            raise ValueError("host tree is not connected")

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, n) -> bool:
        return n in self._adj

    def neighbors(self, n: str) -> tuple[str, ...]:
        return self._adj[n]

    def degree(self, n: str) -> int:
        return len(self._adj[n])

    def has_edge(self, a: str, b: str) -> bool:
        return b in self._adj.get(a, ())

    def leaves(self) -> list[str]:
        if len(self.nodes) == 1:
            return list(self.nodes)
        return [n for n in self.nodes if len(self._adj[n]) == 1]

    def max_degree(self) -> int:
        return max(len(v) for v in self._adj.values())

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges, key=lambda e: (sort_key(e[0]), sort_key(e[1])))

    def is_connected_set(self, nodes: Iterable[str]) -> bool:
        nodes = set(nodes)
        if not nodes:
            return False
        start = next(iter(nodes))
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in self._adj[x]:
                if y in nodes and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == len(nodes)

    def path(self, a: str, b: str) -> list[str]:
        """Node sequence of the unique a-b path, both ends included."""
        parent = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            if x == b:
                break
            for y in self._adj[x]:
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        out = [b]
        while out[-1] != a:
            out.append(parent[out[-1]])
        return out[::-1]

    def components_without(self, removed: Iterable[str]) -> list[list[str]]:
        removed = set(removed)
        seen = set(removed)
        out = []
        for start in self.nodes:
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for y in self._adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        queue.append(y)
            out.append(comp)
        return out

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_dict(cls, data: Mapping) -> HostTree:
        try:
            return cls(data["nodes"], data["edges"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed tree object: {exc}") from exc

    def to_dot(self, highlight: Iterable[str] = (), name: str = "T") -> str:
        marked = set(highlight)
        lines = [f"graph {name} {{", "  node [color=black];"]
        for n in self.nodes:
            style = ' [color=red, style=filled, fillcolor="#ffd0d0"]' if n in marked else ""
            lines.append(f'  "{n}"{style};')
        for a, b in self.sorted_edges():
            style = " [color=red, penwidth=2]" if a in marked and b in marked else ""
            lines.append(f'  "{a}" -- "{b}"{style};')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Subtree:
    """A connected, nonempty node set of a host tree."""

    host: HostTree
    nodes: frozenset[str]

    def __init__(self, host: HostTree, nodes: Iterable):
        ns = frozenset(str(n) for n in nodes)
        if not ns:
            raise ValueError("a subtree must be nonempty")
        missing = [n for n in ns if n not in host]
        if missing:
            raise ValueError(f"nodes {sorted(missing)} are not in the host tree")
        if not host.is_connected_set(ns):
            raise ValueError("node set is not connected in the host tree")
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "nodes", ns)

    def is_path(self) -> bool:
        return _is_path(self.host, self.nodes)

    def leaves(self) -> int:
        return subtree_leaves(self.host, self.nodes)


class Relation(enum.Enum):
    DISJOINT = "disjoint"
    OVERLAP = "overlap"
    A_CONTAINS_B = "a_contains_b"
    B_CONTAINS_A = "b_contains_a"
    EQUAL = "equal"


def _relation(a: frozenset, b: frozenset) -> Relation:
    if not a & b:
        return Relation.DISJOINT
    if a == b:
        return Relation.EQUAL
    if a > b:
        return Relation.A_CONTAINS_B
    if a < b:
        return Relation.B_CONTAINS_A
    return Relation.OVERLAP


def set_relation(a: Subtree, b: Subtree) -> Relation:
    if a.host is not b.host and a.host != b.host:
        raise ValueError("subtrees belong to different host trees")
    return _relation(a.nodes, b.nodes)


def _is_path(host: HostTree, nodes: frozenset) -> bool:
    ends = 0
    for n in nodes:
        inner = sum(1 for m in host.neighbors(n) if m in nodes)
        if inner > 2:
            return False
        ends += inner <= 1
    return ends <= 2


def subtree_leaves(host: HostTree, nodes: Iterable[str]) -> int:
    """Leaves of the subtree itself (nodes with at most one neighbour inside it)."""
    nodes = set(nodes)
    return sum(1 for n in nodes if sum(1 for m in host.neighbors(n) if m in nodes) <= 1)


def boundary_nodes(host: HostTree, nodes: Iterable[str]) -> list[str]:
    """Nodes of the set having a host neighbour outside the set."""
    nodes = set(nodes)
    return sorted(
        (n for n in nodes if any(m not in nodes for m in host.neighbors(n))), key=sort_key
    )


def common_nodes(sets: Iterable[Iterable[str]]) -> frozenset[str]:
    it = iter(sets)
    try:
        acc = set(next(it))
    except StopIteration:
        return frozenset()
    for s in it:
        acc &= set(s)
    return frozenset(acc)


@dataclass(frozen=True)
class Representation:
    """A host tree and an assignment of graph vertices to subtrees of it."""

    host: HostTree
    subtrees: Mapping[str, frozenset[str]]

    def __init__(self, host: HostTree, subtrees: Mapping):
        clean: dict[str, frozenset[str]] = {}
        for v, ns in subtrees.items():
            clean[str(v)] = Subtree(host, ns).nodes
        object.__setattr__(self, "host", host)
        object.__setattr__(
            self, "subtrees", {v: clean[v] for v in sorted(clean, key=sort_key)}
        )

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self.subtrees)

    def __getitem__(self, v: str) -> frozenset[str]:
        return self.subtrees[v]

    def subtree(self, v: str) -> Subtree:
        return Subtree(self.host, self.subtrees[v])

    def restrict(self, vertices: Iterable[str]) -> Representation:
        return Representation(self.host, {v: self.subtrees[v] for v in vertices})

    def is_path(self, v: str) -> bool:
        return _is_path(self.host, self.subtrees[v])

    def to_dict(self) -> dict:
        return {
            "host": self.host.to_dict(),
            "subtrees": {v: sorted(ns, key=sort_key) for v, ns in self.subtrees.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> Representation:
        try:
            return cls(HostTree.from_dict(data["host"]), data["subtrees"])
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed representation object: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_dot(self, highlight: str | None = None) -> str:
        nodes = self.subtrees[highlight] if highlight is not None else ()
        return self.host.to_dot(nodes)


# -- derived graphs ------------------------------------------------------

_MODES = ("overlap", "intersection")


def _masks(rep: Representation) -> dict[str, int]:
    index = {n: i for i, n in enumerate(rep.host.nodes)}
    out = {}
    for v, ns in rep.subtrees.items():
        m = 0
        for n in ns:
            m |= 1 << index[n]
        out[v] = m
    return out


def _adjacent(a: int, b: int, mode: str) -> bool:
    if mode == "intersection":
        return bool(a & b)
    return bool(a & b) and bool(a & ~b) and bool(b & ~a)


def derive_graph(rep: Representation, relation: str = "overlap") -> Graph:
    """Overlap (or intersection) graph of the representation's subtrees."""
    if relation not in _MODES:
        raise ValueError(f"relation must be one of {_MODES}")
    masks = _masks(rep)
    verts = list(masks)
    edges = [
        (u, v) for u, v in combinations(verts, 2) if _adjacent(masks[u], masks[v], relation)
    ]
    return Graph(verts, edges)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    missing: tuple[tuple[str, str], ...] = ()  # edges of the target not realised
    extra: tuple[tuple[str, str], ...] = ()  # realised pairs that are not edges

    @property
    def offending(self) -> list[tuple[str, str]]:
        return sorted(self.missing + self.extra, key=lambda e: (sort_key(e[0]), sort_key(e[1])))

    def __bool__(self) -> bool:
        return self.ok


def verify_representation(rep: Representation, target: Graph, relation: str = "overlap") -> Verdict:
    if set(rep.vertices) != set(target.vertices):
        only_rep = sorted(set(rep.vertices) - set(target.vertices), key=sort_key)
        only_tgt = sorted(set(target.vertices) - set(rep.vertices), key=sort_key)
        raise ValueError(
            f"vertex sets differ: only in representation {only_rep[:5]}, only in graph {only_tgt[:5]}"
        )
    derived = derive_graph(rep, relation)
    if graphs_equal(derived, target):
        return Verdict(True)
    key = lambda e: (sort_key(e[0]), sort_key(e[1]))  # noqa: E731
    return Verdict(
        False,
        tuple(sorted(target.edges - derived.edges, key=key)),
        tuple(sorted(derived.edges - target.edges, key=key)),
    )


# -- structure of the host -----------------------------------------------


@dataclass(frozen=True)
class TreeAnalysis:
    leaves: tuple[str, ...]
    leafage: int
    max_degree: int
    branching_nodes: tuple[str, ...]
    twigs: tuple[tuple[str, ...], ...]  # each ordered from the attachment side to the leaf
    lastbranches: tuple[str, ...]
    is_path: bool
    internal_edges: int

    def twig_lengths(self) -> list[int]:
        """Edge length of each twig, counting the edge that attaches it to the tree."""
        if self.is_path:
            return [len(t) - 1 for t in self.twigs]
        return [len(t) for t in self.twigs]

    def twig_index(self) -> dict[str, int]:
        return {n: i for i, twig in enumerate(self.twigs) for n in twig}

    def to_dict(self) -> dict:
        return {
            "leaves": list(self.leaves),
            "leafage": self.leafage,
            "max_degree": self.max_degree,
            "branching_nodes": list(self.branching_nodes),
            "twigs": [list(t) for t in self.twigs],
            "twig_lengths": self.twig_lengths(),
            "lastbranches": list(self.lastbranches),
            "is_path": self.is_path,
            "internal_edges": self.internal_edges,
        }


def analyze_tree(t: HostTree) -> TreeAnalysis:
    leaves = t.leaves()
    branching = [n for n in t.nodes if t.degree(n) >= 3]
    twigs: list[tuple[str, ...]] = []
    seen: set[frozenset] = set()
    for leaf in leaves:
        walk = [leaf]
        prev, cur = None, leaf
        while True:
            nxt = [m for m in t.neighbors(cur) if m != prev]
            if not nxt or t.degree(nxt[0]) > 2:
                break
            prev, cur = cur, nxt[0]
            walk.append(cur)
        key = frozenset(walk)
        if key in seen:
            continue
        seen.add(key)
        twigs.append(tuple(reversed(walk)))
    is_path = not branching
    branch_set = set(branching)
    lastbranches = []
    for p in branching:
        heavy = sum(
            1 for comp in t.components_without([p]) if any(n in branch_set for n in comp)
        )
        if heavy <= 1:
            lastbranches.append(p)
    in_twig = sum(len(tw) - 1 for tw in twigs) if is_path else sum(len(tw) for tw in twigs)
    return TreeAnalysis(
        leaves=tuple(leaves),
        leafage=len(leaves) if len(t) > 1 else 0,
        max_degree=t.max_degree(),
        branching_nodes=tuple(branching),
        twigs=tuple(twigs),
        lastbranches=tuple(lastbranches),
        is_path=is_path,
        internal_edges=len(t.edges) - in_twig,
    )


# -- subdivision ---------------------------------------------------------


def subdivision_node(a: str, b: str, i: int) -> str:
    a, b = _pair(a, b)
    return f"({a},{b})#{i}"


def subdivide(t: HostTree, edge: tuple, times: int = 1) -> HostTree:
    """Replace ``edge`` by a path with ``times`` new interior nodes.

    New nodes are named ``(a,b)#i`` with ``a`` the smaller endpoint and
    ``i`` counting from ``a`` towards ``b``.
    """
    a, b = _pair(str(edge[0]), str(edge[1]))
    if not t.has_edge(a, b):
        raise ValueError(f"({a}, {b}) is not an edge of the tree")
    if times < 1:
        raise ValueError("times must be positive")
    new = [subdivision_node(a, b, i) for i in range(1, times + 1)]
    clash = [n for n in new if n in t]
    if clash:
        raise ValueError(f"subdivision names {clash} already used")
    chain = [a, *new, b]
    edges = [e for e in t.edges if e != (a, b)] + list(zip(chain, chain[1:]))
    return HostTree(list(t.nodes) + new, edges)


def lift_representation(
    rep: Representation, subdivided_host: HostTree, node_map: Mapping[str, str] | None = None
) -> Representation:
    """Carry a representation over to a subdivision of its host.

    Every subtree is mapped node-wise and gains the new nodes lying inside
    each of its edges; the overlap and intersection graphs are unchanged.
    """
    old = rep.host
    if node_map is None:
        node_map = {n: n for n in old.nodes}
    image = {n: str(node_map.get(n, "")) for n in old.nodes}
    targets = set(image.values())
    if len(targets) != len(old.nodes) or not all(x in subdivided_host for x in targets):
        raise ValueError("node map is not an injection into the subdivided host")
    interior: dict[tuple[str, str], list[str]] = {}
    covered = set(targets)
    for a, b in old.edges:
        route = subdivided_host.path(image[a], image[b])
        inner = route[1:-1]
        if any(x in targets for x in inner):
            raise ValueError(f"edge ({a}, {b}) does not map to a subdivided path")
        interior[(a, b)] = inner
        covered.update(inner)
    if len(covered) != len(subdivided_host):
        raise ValueError("subdivided host has nodes not explained by the node map")
    lifted = {}
    for v, ns in rep.subtrees.items():
        out = {image[n] for n in ns}
        for (a, b), inner in interior.items():
            if a in ns and b in ns:
                out.update(inner)
        lifted[v] = out
    return Representation(subdivided_host, lifted)


# -- small named trees -------------------------------------------------------


def path_tree(n: int, prefix: str = "") -> HostTree:
    ns = [f"{prefix}{i}" for i in range(1, n + 1)]
    return HostTree(ns, zip(ns, ns[1:]))


def spider_tree(legs: Iterable[int], center: str = "c") -> HostTree:
    """A centre with one pendant path per entry of ``legs`` (entry = leg length in edges)."""
    nodes, edges = [center], []
    for i, length in enumerate(legs, start=1):
        prev = center
        for j in range(1, length + 1):
            n = f"l{i}_{j}"
            nodes.append(n)
            edges.append((prev, n))
            prev = n
    return HostTree(nodes, edges)


def star_tree(k: int, center: str = "c") -> HostTree:
    return spider_tree([1] * k, center)


def double_star_tree(left: int = 2, right: int = 2) -> HostTree:
    """Two adjacent centres ``x`` and ``y`` carrying ``left`` and ``right`` pendant leaves."""
    nodes = ["x", "y"] + [f"x{i}" for i in range(1, left + 1)] + [f"y{i}" for i in range(1, right + 1)]
    edges = [("x", "y")] + [("x", f"x{i}") for i in range(1, left + 1)]
    edges += [("y", f"y{i}") for i in range(1, right + 1)]
    return HostTree(nodes, edges)
