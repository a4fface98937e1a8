"""Finite simple graphs, exact vertex connectivity and exact k-colouring."""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping

__all__ = [
    "Graph",
    "Coloring",
    "vertex_connectivity",
    "find_k_coloring",
    "graphs_equal",
    "sort_key",
    "complete_graph",
    "path_graph",
    "cycle_graph",
    "complete_bipartite",
    "prism_graph",
    "wheel_graph",
]

_DIGITS = re.compile(r"(\d+)")


@lru_cache(maxsize=1 << 17)
def sort_key(name: str) -> tuple:
    """Natural ordering key: ``"v2" < "v10"``."""
    return tuple(int(part) if part.isdigit() else part for part in _DIGITS.split(name))


def _edge(u: str, v: str) -> tuple[str, str]:
    return (u, v) if sort_key(u) <= sort_key(v) else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph with string vertex identifiers.

    Vertices are kept in natural sorted order and every edge is stored as a
    pair with the smaller endpoint first, so two graphs built from the same
    data compare equal and serialise identically.
    """

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    _adj: Mapping[str, frozenset[str]] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __init__(self, vertices: Iterable, edges: Iterable = ()):
        verts = [str(v) for v in vertices]
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertex identifiers")
        vset = set(verts)
        norm: set[tuple[str, str]] = set()
        for e in edges:
            u, v = (str(x) for x in e)
            if u == v:
                raise ValueError(f"self-loop at {u!r}")
            if u not in vset or v not in vset:
                raise ValueError(f"edge ({u!r}, {v!r}) has an undeclared endpoint")
            norm.add(_edge(u, v))
        adj: dict[str, set[str]] = {v: set() for v in verts}
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "vertices", tuple(sorted(verts, key=sort_key)))
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "_adj", {v: frozenset(n) for v, n in adj.items()})

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self._adj

    def neighbors(self, v: str) -> frozenset[str]:
        return self._adj[v]

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._adj.get(u, ())

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges, key=lambda e: (sort_key(e[0]), sort_key(e[1])))

    def induced(self, keep: Iterable[str]) -> Graph:
        keep = set(keep)
        return Graph(keep, (e for e in self.edges if e[0] in keep and e[1] in keep))

    def remove(self, drop: Iterable[str]) -> Graph:
        drop = set(drop)
        return self.induced(v for v in self.vertices if v not in drop)

    def relabel(self, fn) -> Graph:
        return Graph((fn(v) for v in self.vertices), ((fn(u), fn(v)) for u, v in self.edges))

    def components(self) -> list[list[str]]:
        seen: set[str] = set()
        out = []
        for start in self.vertices:
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
            out.append(sorted(comp, key=sort_key))
        return out

    def is_connected(self) -> bool:
        return len(self.vertices) <= 1 or len(self.components()) == 1

    def min_degree(self) -> int:
        return min((len(n) for n in self._adj.values()), default=0)

    # -- serialisation -------------------------------------------------

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_dict(cls, data: Mapping) -> Graph:
        try:
            return cls(data["vertices"], data.get("edges", ()))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed graph object: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        lines += [f'  "{v}";' for v in self.vertices]
        lines += [f'  "{u}" -- "{v}";' for u, v in self.sorted_edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Coloring:
    assignment: Mapping[str, int]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        for v, c in self.assignment.items():
            if not 0 <= c < self.k:
                raise ValueError(f"colour {c} of {v!r} outside [0, {self.k})")

    def __getitem__(self, v: str) -> int:
        return self.assignment[v]

    def is_total(self, g: Graph) -> bool:
        return all(v in self.assignment for v in g.vertices)

    def is_proper(self, g: Graph) -> bool:
        return self.is_total(g) and all(
            self.assignment[u] != self.assignment[v] for u, v in g.edges
        )

    def classes(self) -> list[list[str]]:
        out: list[list[str]] = [[] for _ in range(self.k)]
        for v in sorted(self.assignment, key=sort_key):
            out[self.assignment[v]].append(v)
        return out

    def num_classes_used(self) -> int:
        return len(set(self.assignment.values()))


def graphs_equal(a: Graph, b: Graph) -> bool:
    """Labelled equality: same vertex set and same edge set."""
    return set(a.vertices) == set(b.vertices) and a.edges == b.edges


# -- connectivity ------------------------------------------------------


def _local_connectivity(g: Graph, s: str, t: str, cap: int) -> int:
    """Maximum number of internally vertex-disjoint s-t paths, stopping at ``cap``.

    Unit-capacity max-flow on the split graph: every vertex ``x`` becomes
    ``(x, 0) -> (x, 1)`` with capacity 1 (infinite for s and t).
    """
    flow: dict[tuple, int] = {}

    def residual(a, b) -> int:
        if a[0] == b[0]:  # internal arc of a split vertex
            if a[1] == 0 and b[1] == 1:
                c = cap + 1 if a[0] in (s, t) else 1
            else:
                c = 0
        elif a[1] == 1 and b[1] == 0:
            c = cap + 1
        else:
            c = 0
        return c - flow.get((a, b), 0) + flow.get((b, a), 0)

    def succ(a):
        x, side = a
        yield (x, 1 - side)
        if side == 1:
            for y in g.neighbors(x):
                yield (y, 0)
        else:
            for y in g.neighbors(x):
                yield (y, 1)

    source, sink = (s, 1), (t, 0)
    value = 0
    while value < cap:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            a = queue.popleft()
            for b in succ(a):
                if b not in parent and residual(a, b) > 0:
                    parent[b] = a
                    queue.append(b)
        if sink not in parent:
            break
        b = sink
        while parent[b] is not None:
            a = parent[b]
            if flow.get((b, a), 0) > 0:
                flow[(b, a)] -= 1
            else:
                flow[(a, b)] = flow.get((a, b), 0) + 1
            b = a
        value += 1
    return value


def vertex_connectivity(g: Graph) -> int:
    """Exact vertex connectivity via Menger's theorem.

    The minimum over non-adjacent pairs of the local connectivity, and
    ``n - 1`` for complete graphs.
    """
    n = len(g)
    if n < 2:
        raise ValueError("vertex connectivity needs at least 2 vertices")
    if not g.is_connected():
        return 0
    best = n - 1
    verts = g.vertices
    for s, t in combinations(verts, 2):
        if g.has_edge(s, t):
            continue
        best = min(best, _local_connectivity(g, s, t, best))
        if best == 0:
            break
    return best


# -- colouring ---------------------------------------------------------


def find_k_coloring(g: Graph, k: int) -> Coloring | None:
    """Exact search for a proper k-colouring, or ``None`` if none exists.

    Vertices are taken in descending-degree order (ties by name); each
    assignment removes the colour from the domains of uncoloured neighbours
    and the branch is abandoned as soon as a domain empties.  A new colour
    is only ever opened in increasing order, which removes colour
    permutation symmetry.
    """
    if k < 1:
        raise ValueError("k must be positive")
    order = sorted(g.vertices, key=lambda v: (-g.degree(v), sort_key(v)))
    domains = {v: set(range(k)) for v in order}
    colour: dict[str, int] = {}

    def solve(i: int, used: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for c in sorted(domains[v]):
            if c > used:  # only the first fresh colour is worth trying
                break
            touched = []
            ok = True
            for w in g.neighbors(v):
                if w not in colour and c in domains[w]:
                    domains[w].discard(c)
                    touched.append(w)
                    if not domains[w]:
                        ok = False
            colour[v] = c
            if ok and solve(i + 1, max(used, c + 1)):
                return True
            del colour[v]
            for w in touched:
                domains[w].add(c)
        return False

    if not solve(0, 0):
        return None
    return Coloring(dict(colour), k)


# -- small named graphs used throughout tests and examples --------------


def complete_graph(n: int, prefix: str = "v") -> Graph:
    vs = [f"{prefix}{i}" for i in range(1, n + 1)]
    return Graph(vs, combinations(vs, 2))


def path_graph(n: int, prefix: str = "v") -> Graph:
    vs = [f"{prefix}{i}" for i in range(1, n + 1)]
    return Graph(vs, zip(vs, vs[1:]))


def cycle_graph(n: int, prefix: str = "v") -> Graph:
    vs = [f"{prefix}{i}" for i in range(1, n + 1)]
    return Graph(vs, list(zip(vs, vs[1:])) + [(vs[-1], vs[0])])


def complete_bipartite(m: int, n: int) -> Graph:
    left = [f"a{i}" for i in range(1, m + 1)]
    right = [f"b{i}" for i in range(1, n + 1)]
    return Graph(left + right, ((x, y) for x in left for y in right))


def prism_graph() -> Graph:
    """C3 x K2: triangles v1v2v3 and v4v5v6 joined by a perfect matching."""
    edges = [("v1", "v2"), ("v2", "v3"), ("v1", "v3"),
             ("v4", "v5"), ("v5", "v6"), ("v4", "v6"),
             ("v1", "v4"), ("v2", "v5"), ("v3", "v6")]
    return Graph([f"v{i}" for i in range(1, 7)], edges)


def wheel_graph(rim: int) -> Graph:
    """Hub ``h`` joined to every vertex of a ``rim``-cycle (W5 = ``wheel_graph(5)``)."""
    rim_graph = cycle_graph(rim)
    return Graph(
        ("h",) + rim_graph.vertices,
        list(rim_graph.edges) + [("h", v) for v in rim_graph.vertices],
    )
