"""Forward constructions (colouring -> representation) and colouring decoders.

Host layout used by the subtree builders
----------------------------------------
Let ``r`` be the branching node carrying ``t_s`` and call the host paths
leaving ``r`` its *arms*: every twig attached at ``r`` plus, when the tree
has other branching nodes, the *spine* running to the rest of the tree.
Positions on an arm count away from ``r``.  Each arm starts with ``N``
overflow nodes (``N`` = number of edge-representatives plus brothers)
which lie in ``t_s`` and ``t_b`` and in nothing else until the final
adjustment.

On a twig arm carrying gadget path ``vs - a - m - b - vb``::

    pos:   1   2   3   4   5   6 ...
    t_s    ]
    a      [---]
    m          [---]
    b              [-------]
    t_b    -----------]
    vertex reps                [--] [--] ...

On the spine ``r .. x y .. h0`` path 1 is laid out as ``a_1 = {x, y}``,
``m_1 = t_b'`` (from ``y`` over every other branching node) and ``b_1``,
which swallows the whole ``vs' .. vb'`` part of the gadget.  The twigs
attached away from ``r`` each carry one ``vs'``-path in the same pattern
as above (``p``, ``q``, ``r`` at 1-2, 2-3, 3-5 with ``t_s'`` ending at 1,
``t_b'`` at 4, ``t_b`` at 6); ``b_1`` reaches position 5 on all of them
and position 7 on the first, where it leaves ``t_b``.

Brothers and edge-representatives always contain ``r``; whenever they go
down the spine they contain ``t_b'`` and ``b_1`` entirely.  Pairwise
overlap among them is then forced on the overflow nodes: on each arm, the
members not using that arm are sorted by size and extended into its
overflow path, the smallest furthest.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

from .gadget import (
    COPIES,
    BlockedLabels,
    GadgetParams,
    build_blocked_graph,
    build_empty_blocked,
    gadget_path_vertex,
    reduction_params_for_tree,
)
from .graph import Coloring, Graph, sort_key
from .tree import HostTree, Representation, analyze_tree, common_nodes, star_tree, subdivide, verify_representation

__all__ = [
    "LayoutConfig",
    "DecodedColoring",
    "NoNiceCopy",
    "ConstructionError",
    "represent_blocked_on_star",
    "represent_blocked_on_subdivision",
    "represent_empty_blocked_subpaths",
    "find_illegal_pairs",
    "decode_coloring",
]

log = logging.getLogger(__name__)


class ConstructionError(RuntimeError):
    """A builder produced a representation that fails verification."""


class NoNiceCopy(Exception):
    """No copy of the vertex set decodes to a proper colouring."""

    def __init__(self, message: str, diagnostics: Mapping[str, str] | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


@dataclass(frozen=True)
class LayoutConfig:
    overflow_length: int
    slot_pitch: int = 2

    def __post_init__(self):
        if self.overflow_length < 1 or self.slot_pitch < 2:
            raise ValueError("overflow length must be positive and slot pitch at least 2")


@dataclass(frozen=True)
class DecodedColoring:
    copy: str
    coloring: Coloring
    witnesses: Mapping[int, str] = field(default_factory=dict)


def _check_coloring(g: Graph, c: Coloring, k: int) -> None:
    if c.k != k:
        raise ValueError(f"colouring uses {c.k} colours, expected {k}")
    if not c.is_proper(g):
        raise ValueError("colouring is not proper")


def _ordered_reps(g: Graph, c: Coloring, colour: int) -> list[str]:
    verts = [v for v in g.vertices if c[v] == colour]
    return [f"vrep:{cp}:{v}" for v in verts for cp in COPIES]


def _subdivide_first_edge(host: HostTree, a: str, b: str, extra: int) -> HostTree:
    return subdivide(host, (a, b), extra) if extra > 0 else host


def _slots(count: int, pitch: int) -> int:
    return pitch * (count - 1) + 2 if count else 0


def _arm(host: HostTree, r: str, towards: str) -> list[str]:
    """Host path from ``r`` (excluded) to ``towards`` (included)."""
    return host.path(r, towards)[1:]


def _overflow_adjust(
    subtrees: dict[str, set[str]], members: list[str], arms: dict[tuple, list[str]],
    uses: dict[str, set[tuple]], n: int,
) -> None:
    for name, arm in arms.items():
        free = [m for m in members if name not in uses[m]]
        free.sort(key=lambda m: (len(subtrees[m]), sort_key(m)))
        if len(free) > n:
            raise ConstructionError("overflow path too short")
        for j, m in enumerate(free):
            subtrees[m].update(arm[: len(free) - j])


def _layout_blocked(t: HostTree, g: Graph, c: Coloring, p: GadgetParams, cfg: LayoutConfig | None):
    info = analyze_tree(t)
    k = info.leafage
    _check_coloring(g, c, k)
    blocked, labels = build_blocked_graph(g, p)
    n_over = len(labels.edge_reps) + len(labels.brothers)
    cfg = cfg or LayoutConfig(n_over)
    if cfg.overflow_length < n_over:
        raise ValueError(f"overflow length must be at least {n_over}")
    n_over = cfg.overflow_length
    pitch = cfg.slot_pitch

    attach = {}
    for tw in info.twigs:
        attach[tw] = next(x for x in t.neighbors(tw[0]) if x not in tw)
    if len(info.branching_nodes) == 1:
        r = info.branching_nodes[0]
        spine_end = None
        if p.u != 0 or p.d != k:
            raise ValueError(f"a tree with one branching node needs params (d={k}, u=0)")
    else:
        d = p.d
        candidates = [x for x in info.lastbranches if t.degree(x) == d]
        if not candidates or p.u != k - d + 1:
            raise ValueError(f"params {p} do not match the tree (use reduction_params_for_tree)")
        r = min(candidates, key=sort_key)
        heavy = [x for x in t.neighbors(r) if not any(x in tw for tw in info.twigs)]
        (toward,) = heavy
        route = [r, toward]
        while t.degree(route[-1]) == 2:
            route.append(next(x for x in t.neighbors(route[-1]) if x != route[-2]))
        spine_end = route[-1]
    r_twigs = [tw for tw in info.twigs if attach[tw] == r]
    h_twigs = [tw for tw in info.twigs if attach[tw] != r]
    colour_of_twig = {tw: i for i, tw in enumerate(info.twigs)}
    reps_on = {tw: _ordered_reps(g, c, colour_of_twig[tw]) for tw in info.twigs}

    # host: subdivide the first edge of every arm / H-twig until it is long enough
    host = t
    for tw in r_twigs:
        need = n_over + 5 + _slots(len(reps_on[tw]), pitch)
        host = _subdivide_first_edge(host, r, tw[0], need - len(tw))
    if spine_end is not None:
        interior = len(t.path(r, spine_end)) - 2
        host = _subdivide_first_edge(host, r, t.path(r, spine_end)[1], n_over + 2 - interior)
        for tw in h_twigs:
            need = 7 + _slots(len(reps_on[tw]), pitch)
            host = _subdivide_first_edge(host, attach[tw], tw[0], need - len(tw))

    sub: dict[str, set[str]] = {}
    named = labels.named
    arms: dict[str, list[str]] = {}
    twig_path = {}
    for tw in r_twigs:
        twig_path[tw] = _arm(host, r, tw[-1])
        arms[("twig", tw[-1])] = twig_path[tw][:n_over]
    t_s = {r}
    t_b = {r}
    for path in twig_path.values():
        t_s.update(path[: n_over + 1])
        t_b.update(path[: n_over + 4])

    twig_paths_in_order = [twig_path[tw] for tw in r_twigs]
    first = 2 if spine_end is not None else 1
    for i, path in enumerate(twig_paths_in_order, start=first):
        pos = lambda q: path[n_over + q - 1]  # noqa: E731
        sub[gadget_path_vertex("d", i, 1)] = {pos(1), pos(2)}
        sub[gadget_path_vertex("d", i, 2)] = {pos(2), pos(3)}
        sub[gadget_path_vertex("d", i, 3)] = {pos(3), pos(4), pos(5)}

    h_block: set[str] = set()
    if spine_end is not None:
        spine = _arm(host, r, spine_end)
        arms[("spine",)] = spine[:n_over]
        x, y = spine[n_over], spine[n_over + 1]
        t_s.update(spine[: n_over + 1])
        others = [b for b in info.branching_nodes if b != r]
        core = set()
        for b in others:
            core.update(host.path(spine_end, b))
        h_paths = {tw: _arm(host, attach[tw], tw[-1]) for tw in h_twigs}
        t_sp = set(core)
        t_bp = set(spine[n_over + 1:]) | core
        b_1 = set(core)
        for j, tw in enumerate(h_twigs, start=1):
            path = h_paths[tw]
            pos = lambda q: path[q - 1]  # noqa: E731
            t_sp.add(pos(1))
            t_bp.update(path[:4])
            b_1.update(path[:7] if j == 1 else path[:5])
            t_b.update(path[:6])
            sub[gadget_path_vertex("u", j, 1)] = {pos(1), pos(2)}
            sub[gadget_path_vertex("u", j, 2)] = {pos(2), pos(3)}
            sub[gadget_path_vertex("u", j, 3)] = {pos(3), pos(4), pos(5)}
        t_b.update(spine)
        t_b.update(core)
        sub[gadget_path_vertex("d", 1, 1)] = {x, y}
        sub[named["vb_prime"]] = t_bp
        sub[gadget_path_vertex("d", 1, 3)] = b_1
        sub[named["vs_prime"]] = t_sp
        h_block = set(spine) | t_bp | b_1
        twig_path.update(h_paths)
    sub[named["vs"]] = t_s
    sub[named["vb"]] = t_b

    # vertex representatives, brothers, edge representatives
    route: dict[str, set[str]] = {}
    uses: dict[str, set[tuple]] = {}
    for tw in info.twigs:
        path = twig_path[tw]
        start = n_over + 6 if tw in r_twigs else 8
        for j, rep in enumerate(reps_on[tw]):
            inner = start - 1 + pitch * j
            sub[rep] = {path[inner], path[inner + 1]}
            if tw in r_twigs:
                route[rep] = {r, *path[: inner + 1]}
                uses[rep] = {("twig", tw[-1])}
            else:
                route[rep] = {r} | h_block | set(path[: inner + 1])
                uses[rep] = {("spine",)}
    members = []
    for rep in labels.vertex_reps:
        bro = labels.brother_of[rep]
        sub[bro] = set(route[rep])
        uses[bro] = uses[rep]
        members.append(bro)
    for er in labels.edge_reps:
        a, b = labels.origin[er]
        ra, rb = f"vrep:{labels.copy[er]}:{a}", f"vrep:{labels.copy[er]}:{b}"
        sub[er] = route[ra] | route[rb]
        uses[er] = uses[ra] | uses[rb]
        members.append(er)
    _overflow_adjust(sub, members, arms, uses, n_over)

    rep = Representation(host, sub)
    verdict = verify_representation(rep, blocked, "overlap")
    if not verdict:
        raise ConstructionError(
            f"canonical layout failed verification on {len(verdict.offending)} pairs, "
            f"e.g. {verdict.offending[:3]}"
        )
    return rep, blocked, labels


def represent_blocked_on_star(
    g: Graph, c: Coloring, p: GadgetParams, cfg: LayoutConfig | None = None
) -> Representation:
    """Representation of the (k, 0)-blocked graph of ``g`` on a subdivided k-leaf star."""
    if p.u != 0 or p.d != c.k:
        raise ValueError(f"star layout needs params (d={c.k}, u=0), got {p}")
    rep, _, _ = _layout_blocked(star_tree(c.k), g, c, p, cfg)
    return rep


def represent_blocked_on_subdivision(
    t: HostTree, g: Graph, c: Coloring, cfg: LayoutConfig | None = None
) -> Representation:
    """Representation of the blocked graph for ``reduction_params_for_tree(t)`` on a member of SUB(t)."""
    p, k = reduction_params_for_tree(t)
    if c.k != k:
        raise ValueError(f"colouring must use exactly {k} colours")
    rep, _, _ = _layout_blocked(t, g, c, p, cfg)
    return rep


def represent_empty_blocked_subpaths(g: Graph, c: Coloring, k: int) -> Representation:
    """Path representation of the gadget-free blocked graph on a tree of maximum degree ``k``.

    The host is a centre of degree ``k`` with one caterpillar per colour,
    each having ``n + 1`` pendant twigs of three nodes (``n`` = number of
    vertex-representatives).  The result is valid in both overlap and
    intersection mode.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    _check_coloring(g, c, k)
    blocked, labels = build_empty_blocked(g)
    n = len(labels.vertex_reps)
    centre = "c"
    nodes, edges = [centre], []
    pend: dict[int, list[tuple[str, str, str]]] = {}
    spine: dict[int, list[str]] = {}
    for i in range(k):
        spine[i], pend[i] = [], []
        prev = centre
        for j in range(1, n + 2):
            s = f"k{i}:s{j}"
            t1, t2, t3 = (f"k{i}:t{j}:{q}" for q in (1, 2, 3))
            nodes += [s, t1, t2, t3]
            edges += [(prev, s), (s, t1), (t1, t2), (t2, t3)]
            spine[i].append(s)
            pend[i].append((t1, t2, t3))
            prev = s
    host = HostTree(nodes, edges)

    sub: dict[str, set[str]] = {}
    near: dict[str, tuple[str, str]] = {}
    to_centre: dict[str, list[str]] = {}
    for i in range(k):
        for j, rep in enumerate(_ordered_reps(g, c, i)):
            t1, t2, t3 = pend[i][j]
            sub[rep] = {t1, t2, t3}
            near[rep] = (t1, t2)
            to_centre[rep] = [centre, *spine[i][: j + 1]]
    for rep in labels.vertex_reps:
        sub[labels.brother_of[rep]] = {*to_centre[rep], *near[rep]}
    for er in labels.edge_reps:
        a, b = labels.origin[er]
        ra, rb = f"vrep:{labels.copy[er]}:{a}", f"vrep:{labels.copy[er]}:{b}"
        sub[er] = {*to_centre[ra], near[ra][0], *to_centre[rb], near[rb][0]}
    rep = Representation(host, sub)
    for mode in ("overlap", "intersection"):
        verdict = verify_representation(rep, blocked, mode)
        if not verdict:
            raise ConstructionError(
                f"subpath layout failed {mode} verification: {verdict.offending[:3]}"
            )
    return rep


# -- illegal pairs and decoding ------------------------------------------


def _check_labels(rep: Representation, labels: BlockedLabels, original: Graph) -> None:
    for v in labels.vertex_reps:
        if v not in rep.subtrees:
            raise ValueError(f"vertex representative {v} missing from the representation")
        if labels.origin[v] not in original:
            raise ValueError(f"label origin {labels.origin[v]!r} is not a vertex of the graph")
    expected = len(COPIES) * len(original)
    if len(labels.vertex_reps) != expected:
        raise ValueError(
            f"labels carry {len(labels.vertex_reps)} vertex representatives, graph needs {expected}"
        )


def find_illegal_pairs(
    rep: Representation, labels: BlockedLabels, original: Graph
) -> list[tuple[str, str]]:
    """Same-copy vertex-representatives of adjacent vertices meeting a common twig."""
    _check_labels(rep, labels, original)
    where = analyze_tree(rep.host).twig_index()
    touched = {v: {where[n] for n in rep[v] if n in where} for v in labels.vertex_reps}
    out = []
    for cp in COPIES:
        for a, b in original.sorted_edges():
            ra, rb = f"vrep:{cp}:{a}", f"vrep:{cp}:{b}"
            if touched[ra] & touched[rb]:
                out.append((ra, rb))
    return out


def _decode_parts(
    original: Graph, labels: BlockedLabels, part_of, k: int, names: list[str]
) -> DecodedColoring:
    """Try each copy in order; ``part_of(rep)`` gives a part index or None."""
    reasons = {}
    for cp in COPIES:
        parts = {}
        bad = None
        for v in original.vertices:
            idx = part_of(f"vrep:{cp}:{v}")
            if idx is None:
                bad = f"vrep:{cp}:{v} is not confined to a colour region"
                break
            parts[v] = idx
        if bad is None:
            clash = next(((a, b) for a, b in original.sorted_edges() if parts[a] == parts[b]), None)
            if clash:
                bad = f"illegal pair {clash} in copy {cp}"
        if bad is None:
            used = sorted(set(parts.values()))
            if len(used) > k:
                bad = f"copy {cp} spreads over {len(used)} regions > {k}"
        if bad is not None:
            reasons[cp] = bad
            continue
        relabel = {old: new for new, old in enumerate(used)}
        coloring = Coloring({v: relabel[i] for v, i in parts.items()}, k)
        return DecodedColoring(cp, coloring, {relabel[i]: names[i] for i in used})
    raise NoNiceCopy("no copy of the vertex set is nicely represented", reasons)


def decode_coloring(
    rep: Representation, labels: BlockedLabels, original: Graph, k: int
) -> DecodedColoring:
    """Read a proper k-colouring of ``original`` off a representation of its blocked graph.

    With a gadget, colours are the twigs of the host; without one (the
    subpath reduction), colours are the components left after deleting the
    highest-degree node common to every edge-representative and brother.
    """
    _check_labels(rep, labels, original)
    host = rep.host
    if labels.params is not None:
        info = analyze_tree(host)
        where = info.twig_index()

        def part_of(v):
            idx = {where.get(n) for n in rep[v]}
            return idx.pop() if len(idx) == 1 and None not in idx else None

        return _decode_parts(original, labels, part_of, k, [tw[-1] for tw in info.twigs])

    hub = labels.edge_reps + labels.brothers
    common = common_nodes(rep[v] for v in hub)
    if not common:
        raise NoNiceCopy("edge-representatives and brothers share no node")
    centre = max(sorted(common, key=sort_key), key=host.degree)
    comps = sorted(host.components_without([centre]), key=lambda cmp: sort_key(min(cmp, key=sort_key)))
    where = {n: i for i, cmp in enumerate(comps) for n in cmp}

    def part_of(v):
        idx = {where.get(n) for n in rep[v]}
        return idx.pop() if len(idx) == 1 and None not in idx else None

    names = [min(cmp, key=sort_key) for cmp in comps]
    return _decode_parts(original, labels, part_of, k, names)
