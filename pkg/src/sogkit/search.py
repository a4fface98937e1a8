"""Bounded exhaustive search for subtree representations, and lemma audits.

Host trees are enumerated up to isomorphism; for each host every connected
node set is encoded as a bitmask and graph vertices are assigned subtrees by
backtracking with forward checking.  A negative answer is only ever
"absent within the caps".
"""

from __future__ import annotations

import enum
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .gadget import GadgetParams, build_gadget
from .graph import Graph, sort_key
from .tree import HostTree, Representation, verify_representation

__all__ = [
    "HostConstraint",
    "SearchConfig",
    "SearchStatus",
    "SearchResult",
    "AuditReport",
    "SearchTimeout",
    "free_trees",
    "enumerate_host_trees",
    "connected_subsets",
    "find_representation",
    "audit_gadget_lemmas",
    "audit_spanbranch",
]

log = logging.getLogger(__name__)

LARGE_GRAPH_WARNING = 12


class SearchTimeout(Exception):
    """Raised internally when the time budget runs out."""


@dataclass(frozen=True)
class HostConstraint:
    """Which host trees are admissible.

    ``kind`` is one of ``"any"``, ``"leafage"`` (at most ``bound`` leaves),
    ``"max_degree"`` (maximum degree at most ``bound``), ``"sub"`` (a
    subdivision of ``base``) or ``"fixed"`` (exactly ``base``).
    """

    kind: str = "any"
    bound: int | None = None
    base: HostTree | None = None

    def __post_init__(self):
        if self.kind not in ("any", "leafage", "max_degree", "sub", "fixed"):
            raise ValueError(f"unknown host constraint {self.kind!r}")
        if self.kind in ("leafage", "max_degree") and (self.bound is None or self.bound < 1):
            raise ValueError(f"{self.kind} constraint needs a positive bound")
        if self.kind in ("sub", "fixed") and self.base is None:
            raise ValueError(f"{self.kind} constraint needs a base tree")

    def admits(self, t: HostTree) -> bool:
        if self.kind == "leafage":
            return len(t) == 1 or len(t.leaves()) <= self.bound
        if self.kind == "max_degree":
            return t.max_degree() <= self.bound
        if self.kind == "sub":
            return is_subdivision_of(t, self.base)
        return True


@dataclass(frozen=True)
class SearchConfig:
    max_host_nodes: int = 8
    host_constraint: HostConstraint = field(default_factory=HostConstraint)
    relation: str = "overlap"
    paths_only: bool = False
    time_budget: float | None = None
    min_host_nodes: int = 1
    jobs: int = 1

    def __post_init__(self):
        if self.max_host_nodes < 2:
            raise ValueError("max_host_nodes must be at least 2")
        if self.relation not in ("overlap", "intersection"):
            raise ValueError(f"unknown relation {self.relation!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")


class SearchStatus(enum.Enum):
    FOUND = "found"
    BOUNDED_ABSENT = "bounded_absent"
    TIMEOUT = "timeout"


@dataclass
class SearchResult:
    status: SearchStatus
    representation: Representation | None = None
    hosts_tried: int = 0
    nodes_visited: int = 0

    def to_dict(self) -> dict:
        out = {
            "status": self.status.value,
            "hosts_tried": self.hosts_tried,
            "nodes_visited": self.nodes_visited,
        }
        if self.representation is not None:
            out["representation"] = self.representation.to_dict()
        return out


# -- free trees -----------------------------------------------------------


def _centers(adj: Sequence[Sequence[int]]) -> list[int]:
    n = len(adj)
    if n <= 2:
        return list(range(n))
    deg = [len(a) for a in adj]
    layer = [v for v in range(n) if deg[v] == 1]
    left = n
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            for w in adj[v]:
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt
    return sorted(layer)


def _rooted_code(adj, root: int, marks: int = 0) -> str:
    def code(v: int, parent: int) -> str:
        kids = sorted(code(w, v) for w in adj[v] if w != parent)
        tag = "1" if marks >> v & 1 else "0"
        return "(" + tag + "".join(kids) + ")"

    return code(root, -1)


def tree_code(adj: Sequence[Sequence[int]], marks: int = 0) -> str:
    """Canonical string of a (node-marked) free tree, rooted at its centre(s)."""
    return min(_rooted_code(adj, c, marks) for c in _centers(adj))


def _adj_from_code(code: str) -> list[list[int]]:
    adj: list[list[int]] = []
    stack: list[int] = []
    for ch in code:
        if ch == "(":
            v = len(adj)
            adj.append([])
            if stack:
                adj[stack[-1]].append(v)
                adj[v].append(stack[-1])
            stack.append(v)
        elif ch == ")":
            stack.pop()
    return adj


@lru_cache(maxsize=None)
def _free_tree_codes(n: int) -> tuple[str, ...]:
    if n == 1:
        return ("(0)",)
    found = set()
    for code in _free_tree_codes(n - 1):
        adj = _adj_from_code(code)
        for v in range(n - 1):
            grown = [list(a) for a in adj] + [[v]]
            grown[v].append(n - 1)
            found.add(tree_code(grown))
    return tuple(sorted(found, key=lambda c: (c.count("(("), c)))


def _tree_from_adj(adj: Sequence[Sequence[int]]) -> HostTree:
    nodes = [f"n{i}" for i in range(len(adj))]
    edges = [(f"n{a}", f"n{b}") for a in range(len(adj)) for b in adj[a] if a < b]
    return HostTree(nodes, edges)


def free_trees(n: int) -> list[HostTree]:
    """One tree per isomorphism class on ``n`` nodes, in a fixed order.

    Nodes are named ``n0, n1, ...`` in preorder of the canonical rooting.
    """
    if n < 1:
        raise ValueError("trees need at least one node")
    return [_tree_from_adj(_adj_from_code(c)) for c in _free_tree_codes(n)]


def _index_adj(t: HostTree) -> tuple[list[str], list[list[int]]]:
    nodes = list(t.nodes)
    idx = {x: i for i, x in enumerate(nodes)}
    return nodes, [[idx[y] for y in t.neighbors(x)] for x in nodes]


def _smoothed_code(t: HostTree) -> str:
    """Canonical code of the tree with every degree-2 node suppressed."""
    if len(t) <= 2 or t.max_degree() <= 2:
        return "path"
    keep = [x for x in t.nodes if t.degree(x) != 2]
    idx = {x: i for i, x in enumerate(keep)}
    adj: list[list[int]] = [[] for _ in keep]
    for x in keep:
        for y in t.neighbors(x):
            prev = x
            while t.degree(y) == 2:
                prev, y = y, next(z for z in t.neighbors(y) if z != prev)
            adj[idx[x]].append(idx[y])
    return tree_code(adj)


def is_subdivision_of(t: HostTree, base: HostTree) -> bool:
    """True if ``t`` can be obtained from ``base`` by subdividing edges.

    Decided by comparing homeomorphic reductions; degree-2 nodes of ``base``
    are matched by requiring at least as many nodes overall.
    """
    if len(t) < len(base):
        return False
    if len(base) <= 2:
        return t.max_degree() <= 2 and len(t) >= len(base)
    return _smoothed_code(t) == _smoothed_code(base)


def enumerate_host_trees(cfg: SearchConfig) -> Iterator[HostTree]:
    """Admissible hosts in increasing size, one per isomorphism class."""
    con = cfg.host_constraint
    if con.kind == "fixed":
        if len(con.base) <= cfg.max_host_nodes:
            yield con.base
        return
    for n in range(max(1, cfg.min_host_nodes), cfg.max_host_nodes + 1):
        for t in free_trees(n):
            if con.admits(t):
                yield t


# -- subtrees as bitmasks ---------------------------------------------------


def connected_subsets(adj: Sequence[Sequence[int]]) -> list[int]:
    """Every nonempty connected node set, as a bitmask, in increasing order."""
    n = len(adj)
    nbr = [sum(1 << w for w in a) for a in adj]
    out: list[int] = []

    def grow(mask: int, frontier: int, banned: int) -> None:
        out.append(mask)
        # extend with frontier nodes one at a time; once skipped a node is banned
        f = frontier & ~banned
        while f:
            low = f & -f
            f ^= low
            v = low.bit_length() - 1
            grow(mask | low, (frontier | nbr[v]) & ~(mask | low), banned)
            banned |= low

    for root in range(n):
        # root is the smallest index in the set
        below = (1 << root) - 1
        grow(1 << root, nbr[root] & ~below, below)
    return sorted(out)


def _is_path_mask(mask: int, nbr: Sequence[int]) -> bool:
    m = mask
    while m:
        low = m & -m
        m ^= low
        if bin(nbr[low.bit_length() - 1] & mask).count("1") > 2:
            return False
    return True


def _leaves_mask(mask: int, nbr: Sequence[int]) -> int:
    count = 0
    m = mask
    while m:
        low = m & -m
        m ^= low
        if bin(nbr[low.bit_length() - 1] & mask).count("1") <= 1:
            count += 1
    return count


def _boundary_mask(mask: int, nbr: Sequence[int]) -> int:
    count = 0
    m = mask
    while m:
        low = m & -m
        m ^= low
        if nbr[low.bit_length() - 1] & ~mask:
            count += 1
    return count


def _related(a: int, b: int, overlap: bool) -> bool:
    common = a & b
    if not overlap:
        return common != 0
    return common != 0 and common != a and common != b


class _HostData:
    def __init__(self, t: HostTree, paths_only: bool):
        self.tree = t
        self.names, self.adj = _index_adj(t)
        self.nbr = [sum(1 << w for w in a) for a in self.adj]
        subs = connected_subsets(self.adj)
        if paths_only:
            subs = [s for s in subs if _is_path_mask(s, self.nbr)]
        self.subsets = subs

    def orbit_representatives(self) -> list[int]:
        """One subset per orbit of the host's automorphism group."""
        seen = set()
        reps = []
        for s in self.subsets:
            code = tree_code(self.adj, s)
            if code not in seen:
                seen.add(code)
                reps.append(s)
        return reps

    def to_names(self, mask: int) -> list[str]:
        return [self.names[i] for i in range(len(self.names)) if mask >> i & 1]


def _vertex_order(g: Graph) -> list[str]:
    return sorted(g.vertices, key=lambda v: (-g.degree(v), sort_key(v)))


class _Solver:
    """Backtracking assignment of subtrees to vertices on one host.

    Domains are bitsets over the host's subset indices; for every subset the
    set of subsets it is related to is precomputed, so forward checking is a
    single AND per later vertex.
    """

    def __init__(self, g: Graph, host: _HostData, overlap: bool, deadline: float | None,
                 order: list[str] | None = None):
        self.order = order or _vertex_order(g)
        self.adjacent = [[g.has_edge(v, w) for w in self.order] for v in self.order]
        self.host = host
        self.deadline = deadline
        self.nodes = 0
        subs = host.subsets
        self.index = {m: i for i, m in enumerate(subs)}
        self.full = (1 << len(subs)) - 1
        self.related = []
        for a in subs:
            bits = 0
            for j, b in enumerate(subs):
                if _related(a, b, overlap):
                    bits |= 1 << j
            self.related.append(bits)

    def _tick(self) -> None:
        self.nodes += 1
        if self.deadline is not None and self.nodes % 512 == 0 and time.monotonic() > self.deadline:
            raise SearchTimeout

    def domain_of(self, masks) -> int:
        return sum(1 << self.index[m] for m in set(masks) if m in self.index)

    def members(self, domain: int) -> list[int]:
        subs = self.host.subsets
        out = []
        while domain:
            low = domain & -domain
            domain ^= low
            out.append(subs[low.bit_length() - 1])
        return out

    def _filter(self, domains, i: int, mask: int):
        """Domains of later vertices after vertex ``i`` takes ``mask``; None on wipe-out."""
        rel = self.related[self.index[mask]]
        non = self.full & ~rel
        out = list(domains)
        row = self.adjacent[i]
        for j in range(i + 1, len(self.order)):
            dom = domains[j] & (rel if row[j] else non)
            if not dom:
                return None
            out[j] = dom
        return out

    def initial_domains(self) -> list[int]:
        return [self.full for _ in self.order]

    def solve(self, domains, i: int = 0, chosen: list[int] | None = None):
        """Yield complete assignments (lists of masks in ``self.order``)."""
        chosen = chosen if chosen is not None else []
        if i == len(self.order):
            yield list(chosen)
            return
        for mask in self.members(domains[i]):
            self._tick()
            nxt = self._filter(domains, i, mask)
            if nxt is None:
                continue
            chosen.append(mask)
            yield from self.solve(nxt, i + 1, chosen)
            chosen.pop()

    def first(self, domains, i: int = 0, chosen: list[int] | None = None):
        return next(self.solve(domains, i, chosen), None)

    def to_rep(self, masks: Sequence[int]) -> Representation:
        return Representation(
            self.host.tree, {v: self.host.to_names(m) for v, m in zip(self.order, masks)}
        )


def _deadline(budget: float | None) -> float | None:
    return None if budget is None else time.monotonic() + budget


def _search_one_host(g: Graph, t: HostTree, cfg: SearchConfig, deadline: float | None):
    """(status, representation or None, nodes) for one host."""
    host = _HostData(t, cfg.paths_only)
    solver = _Solver(g, host, cfg.relation == "overlap", deadline)
    domains = solver.initial_domains()
    if domains:
        domains[0] = solver.domain_of(host.orbit_representatives())
    try:
        masks = solver.first(domains)
    except SearchTimeout:
        return SearchStatus.TIMEOUT, None, solver.nodes
    if masks is None:
        return SearchStatus.BOUNDED_ABSENT, None, solver.nodes
    return SearchStatus.FOUND, solver.to_rep(masks), solver.nodes


def _host_worker(args):
    g, t, cfg, deadline_left = args
    deadline = None if deadline_left is None else time.monotonic() + deadline_left
    status, rep, nodes = _search_one_host(g, t, cfg, deadline)
    return status, (rep.to_dict() if rep is not None else None), nodes


def find_representation(g: Graph, cfg: SearchConfig) -> SearchResult:
    """First representation of ``g`` over the admissible hosts, in enumeration order.

    ``BOUNDED_ABSENT`` means every admissible host up to ``cfg.max_host_nodes``
    was exhausted; ``TIMEOUT`` means the budget ran out first.
    """
    if len(g) > LARGE_GRAPH_WARNING:
        log.warning("searching for a representation of a %d-vertex graph may be slow", len(g))
    start = time.monotonic()
    deadline = _deadline(cfg.time_budget)
    result = SearchResult(SearchStatus.BOUNDED_ABSENT)
    if len(g) == 0:
        hosts = list(enumerate_host_trees(cfg))
        rep = Representation(hosts[0], {}) if hosts else None
        return SearchResult(SearchStatus.FOUND if rep else SearchStatus.BOUNDED_ABSENT, rep)
    hosts = enumerate_host_trees(cfg)
    if cfg.jobs > 1:
        return _find_parallel(g, list(hosts), cfg, deadline, start)
    for t in hosts:
        status, rep, nodes = _search_one_host(g, t, cfg, deadline)
        result.hosts_tried += 1
        result.nodes_visited += nodes
        if status is SearchStatus.TIMEOUT:
            result.status = status
            return result
        if status is SearchStatus.FOUND:
            _recheck(rep, g, cfg)
            result.status, result.representation = status, rep
            return result
    return result


def _find_parallel(g, hosts, cfg, deadline, start) -> SearchResult:
    left = None if deadline is None else max(0.0, deadline - time.monotonic())
    result = SearchResult(SearchStatus.BOUNDED_ABSENT)
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        futures = [pool.submit(_host_worker, (g, t, cfg, left)) for t in hosts]
        try:
            # ordered merge: the answer is the first host in enumeration order
            for fut in futures:
                status, rep_data, nodes = fut.result()
                result.hosts_tried += 1
                result.nodes_visited += nodes
                if status is SearchStatus.TIMEOUT:
                    result.status = status
                    return result
                if status is SearchStatus.FOUND:
                    rep = Representation.from_dict(rep_data)
                    _recheck(rep, g, cfg)
                    result.status, result.representation = status, rep
                    return result
        finally:
            for fut in futures:
                fut.cancel()
    return result


def _recheck(rep: Representation, g: Graph, cfg: SearchConfig) -> None:
    if not verify_representation(rep, g, cfg.relation):
        raise AssertionError("search produced a representation that fails verification")


# -- audits -------------------------------------------------------------------


@dataclass
class AuditReport:
    """Outcome of an exhaustive audit within caps.

    ``representations_found`` counts the distinct witnesses examined (for the
    gadget audit: distinct ``(t_s, t_b)`` placements, up to host automorphism
    of ``t_s``, that extend to a full representation).  Leaf counts are
    taken after closing branching nodes (see ``_closed_leaves``);
    ``raw_leaf_shortfalls`` records how often the plain count fell short.
    """

    name: str
    hosts_checked: int = 0
    cases_checked: int = 0
    representations_found: int = 0
    counterexamples: list[dict] = field(default_factory=list)
    timed_out: bool = False
    elapsed: float = 0.0
    raw_leaf_shortfalls: int = 0

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.timed_out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "hosts_checked": self.hosts_checked,
            "cases_checked": self.cases_checked,
            "representations_found": self.representations_found,
            "counterexamples": self.counterexamples,
            "raw_leaf_shortfalls": self.raw_leaf_shortfalls,
            "timed_out": self.timed_out,
            "elapsed": round(self.elapsed, 3),
            "ok": self.ok,
        }

    def merge(self, other: AuditReport) -> None:
        self.hosts_checked += other.hosts_checked
        self.cases_checked += other.cases_checked
        self.representations_found += other.representations_found
        self.counterexamples.extend(other.counterexamples)
        self.raw_leaf_shortfalls += other.raw_leaf_shortfalls
        self.timed_out = self.timed_out or other.timed_out


def _gadget_order(gadget: Graph, named: dict) -> list[str]:
    """v_s, v_b, then the rest breadth-first from v_s (ties by name)."""
    order = [named["vs"], named["vb"]]
    placed = set(order)
    frontier = [named["vs"], named["vb"]]
    while len(order) < len(gadget):
        nxt = sorted(
            {w for v in frontier for w in gadget.neighbors(v) if w not in placed}, key=sort_key
        )
        if not nxt:
            nxt = [min((v for v in gadget.vertices if v not in placed), key=sort_key)]
        for w in nxt:
            order.append(w)
            placed.add(w)
        frontier = nxt
    return order


def _audit_gadget_host(args) -> AuditReport:
    d, t, cfg, deadline_left = args
    deadline = None if deadline_left is None else time.monotonic() + deadline_left
    gadget, named = build_gadget(GadgetParams(d, 0))
    host = _HostData(t, cfg.paths_only)
    solver = _Solver(gadget, host, cfg.relation == "overlap", deadline, _gadget_order(gadget, named))
    report = AuditReport("gadget", hosts_checked=1)
    domains = solver.initial_domains()
    try:
        for ts in host.orbit_representatives():
            after_ts = solver._filter(domains, 0, ts)
            if after_ts is None:
                continue
            for tb in solver.members(after_ts[1]):
                after_tb = solver._filter(after_ts, 1, tb)
                report.cases_checked += 1
                if after_tb is None:
                    continue
                masks = solver.first(after_tb, 2, [ts, tb])
                if masks is None:
                    continue
                report.representations_found += 1
                problems, raw_short = _gadget_violations(ts, tb, d, host)
                report.raw_leaf_shortfalls += raw_short
                if problems:
                    rep = solver.to_rep(masks)
                    report.counterexamples.append({"problems": problems, **rep.to_dict()})
    except SearchTimeout:
        report.timed_out = True
    return report


def _closed_leaves(mask: int, nbr: Sequence[int]) -> int:
    """Leaves of the subtree once every branching node in it takes all its neighbours.

    Subdividing an edge ``b - y`` and adding the new node to every subtree
    that holds ``b`` but not ``y`` changes no pairwise relation, so this is
    the leaf count of an equivalent representation on a subdivided host.
    """
    count = 0
    m = mask
    while m:
        low = m & -m
        m ^= low
        v = low.bit_length() - 1
        deg = bin(nbr[v]).count("1")
        inside = bin(nbr[v] & mask).count("1")
        if deg >= 3:
            count += deg - inside
        elif inside <= 1:
            count += 1
    return count


def _gadget_violations(ts: int, tb: int, d: int, host: _HostData) -> tuple[list[str], int]:
    """Problems with a completed placement, and how many raw leaf counts fall short of ``d``."""
    problems = []
    s_in_b = ts & tb == ts and ts != tb
    b_in_s = ts & tb == tb and ts != tb
    if s_in_b == b_in_s:
        problems.append("t_s and t_b are not properly nested")
    raw_short = 0
    for label, mask in (("t_s", ts), ("t_b", tb)):
        leaves = _closed_leaves(mask, host.nbr)
        if leaves < d:
            problems.append(f"{label} has {leaves} leaves, fewer than {d}")
        if _leaves_mask(mask, host.nbr) < d:
            raw_short += 1
    return problems, raw_short


def _run_audit(name: str, worker, items, cfg: SearchConfig) -> AuditReport:
    start = time.monotonic()
    deadline = _deadline(cfg.time_budget)
    report = AuditReport(name)

    def left():
        return None if deadline is None else max(0.0, deadline - time.monotonic())

    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            parts = pool.map(worker, [(*item, cfg, left()) for item in items])
            for part in parts:
                report.merge(part)
    else:
        for item in items:
            report.merge(worker((*item, cfg, left())))
            if report.timed_out:
                break
    report.elapsed = time.monotonic() - start
    return report


def audit_gadget_lemmas(d: int, cfg: SearchConfig) -> AuditReport:
    """Check nesting of t_s, t_b and their leaf counts over all representations of G_d^0.

    Every admissible host is scanned.  For each placement of ``t_s`` (one
    per automorphism orbit) and each compatible ``t_b``, the search asks
    whether the remaining gadget vertices can be completed; for every
    placement that completes, ``t_s`` and ``t_b`` must be properly nested
    and each must have at least ``d`` leaves.  Since the checked properties
    depend only on ``(t_s, t_b)``, this covers every representation.
    """
    if d < 3:
        raise ValueError("d must be at least 3")
    items = [(d, t) for t in enumerate_host_trees(cfg)]
    return _run_audit(f"gadget d={d}", _audit_gadget_host, items, cfg)


def _audit_spanbranch_host(args) -> AuditReport:
    t, offset, cfg, deadline_left = args
    deadline = None if deadline_left is None else time.monotonic() + deadline_left
    host = _HostData(t, False)
    k = len(t.leaves())
    report = AuditReport("spanbranch", hosts_checked=1)
    branching = sum(1 << i for i, a in enumerate(host.adj) if len(a) >= 3)
    bcount = {s: _boundary_mask(s, host.nbr) for s in host.subsets}
    count = 0
    for s, u in combinations(host.subsets, 2):
        count += 1
        if deadline is not None and count % 4096 == 0 and time.monotonic() > deadline:
            report.timed_out = True
            break
        if s & u:
            continue
        ls, lu = bcount[s], bcount[u]
        # both orders of the pair: (l, k - l + offset)
        if ls + lu != k + offset:
            continue
        report.cases_checked += 1
        missing = branching & ~(s | u)
        if missing:
            report.counterexamples.append({
                "host": t.to_dict(),
                "s": host.to_names(s),
                "t": host.to_names(u),
                "boundary": [ls, lu],
                "uncovered": host.to_names(missing),
            })
    return report


def audit_spanbranch(cfg: SearchConfig, offset: int = 2, leafage: Sequence[int] | None = None) -> AuditReport:
    """Disjoint subtrees with ``l`` and ``k - l + offset`` boundary nodes cover every branching node.

    ``offset = 2`` is the claim; ``offset = 1`` is a negative control that is
    expected to produce counterexamples.  Hosts are restricted to leafage in
    ``leafage`` (default: at least 3).
    """
    items = []
    for t in enumerate_host_trees(cfg):
        k = len(t.leaves()) if len(t) > 1 else 0
        if (leafage is None and k >= 3) or (leafage is not None and k in leafage):
            items.append((t, offset))
    return _run_audit(f"spanbranch offset={offset}", _audit_spanbranch_host, items, cfg)

