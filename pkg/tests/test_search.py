import random
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from sogkit.gadget import GadgetParams, build_gadget
from sogkit.graph import Graph, complete_graph, cycle_graph, path_graph, wheel_graph
from sogkit.search import (
    HostConstraint,
    SearchConfig,
    SearchStatus,
    audit_gadget_lemmas,
    audit_spanbranch,
    connected_subsets,
    enumerate_host_trees,
    find_representation,
    free_trees,
    is_subdivision_of,
)
from sogkit.tree import (
    HostTree,
    analyze_tree,
    derive_graph,
    double_star_tree,
    path_tree,
    spider_tree,
    star_tree,
    subdivide,
    verify_representation,
)

from conftest import random_representation, random_tree


def to_nx(t: HostTree) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(t.nodes)
    g.add_edges_from(t.edges)
    return g


@pytest.mark.parametrize("n", range(2, 11))
def test_free_tree_counts_match_networkx(n):
    ours = free_trees(n)
    assert len(ours) == sum(1 for _ in nx.nonisomorphic_trees(n))


@pytest.mark.parametrize("n", range(1, 9))
def test_free_trees_are_pairwise_non_isomorphic(n):
    trees = [to_nx(t) for t in free_trees(n)]
    assert all(nx.is_tree(t) and len(t) == n for t in trees)
    for a, b in combinations(trees, 2):
        assert not nx.is_isomorphic(a, b)


def test_known_sequence():
    assert [len(free_trees(n)) for n in range(1, 11)] == [1, 1, 1, 2, 3, 6, 11, 23, 47, 106]


def test_enumeration_examples():
    four = list(enumerate_host_trees(SearchConfig(4, min_host_nodes=4)))
    assert sorted(t.max_degree() for t in four) == [2, 3]
    paths = list(enumerate_host_trees(SearchConfig(5, HostConstraint("leafage", 2), min_host_nodes=2)))
    assert [len(t) for t in paths] == [2, 3, 4, 5] and all(t.max_degree() <= 2 for t in paths)
    three = list(enumerate_host_trees(SearchConfig(5, HostConstraint("leafage", 3), min_host_nodes=2)))
    assert len(three) == 6
    assert all(t.max_degree() < 4 for t in three)
    fixed = list(enumerate_host_trees(SearchConfig(6, HostConstraint("fixed", base=star_tree(3)))))
    assert fixed == [star_tree(3)]


def test_enumeration_is_deterministic():
    a = [t.to_dict() for t in enumerate_host_trees(SearchConfig(7))]
    b = [t.to_dict() for t in enumerate_host_trees(SearchConfig(7))]
    assert a == b


def test_is_subdivision_of():
    ds = double_star_tree()
    assert is_subdivision_of(ds, ds)
    assert is_subdivision_of(subdivide(ds, ("x", "y"), 3), ds)
    assert not is_subdivision_of(star_tree(4), ds)
    assert not is_subdivision_of(spider_tree([2, 2, 2]), ds)
    assert is_subdivision_of(path_tree(5), path_tree(2))
    subs = list(enumerate_host_trees(SearchConfig(8, HostConstraint("sub", base=ds))))
    # one extra node: middle or pendant edge; two extra nodes: five placements
    assert [len(t) for t in subs] == [6, 7, 7, 8, 8, 8, 8, 8]


def test_constraint_validation():
    with pytest.raises(ValueError):
        HostConstraint("bogus")
    with pytest.raises(ValueError):
        HostConstraint("leafage")
    with pytest.raises(ValueError):
        HostConstraint("sub")
    with pytest.raises(ValueError):
        SearchConfig(1)
    with pytest.raises(ValueError):
        SearchConfig(5, relation="containment")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 9))
def test_connected_subsets_match_brute_force(seed, n):
    t = random_tree(random.Random(seed), n)
    nodes = list(t.nodes)
    adj = [[nodes.index(y) for y in t.neighbors(x)] for x in nodes]
    expected = sorted(
        sum(1 << i for i in range(n) if mask >> i & 1)
        for mask in range(1, 1 << n)
        if t.is_connected_set(nodes[i] for i in range(n) if mask >> i & 1)
    )
    assert connected_subsets(adj) == expected


def test_find_examples():
    k2 = path_graph(2)
    res = find_representation(k2, SearchConfig(3))
    assert res.status is SearchStatus.FOUND and verify_representation(res.representation, k2)
    c5 = find_representation(cycle_graph(5), SearchConfig(10, HostConstraint("leafage", 2)))
    assert c5.status is SearchStatus.FOUND
    assert analyze_tree(c5.representation.host).leafage <= 2
    empty = Graph(["a", "b", "c"])
    res = find_representation(empty, SearchConfig(3, relation="intersection"))
    assert res.status is SearchStatus.FOUND
    assert verify_representation(res.representation, empty, "intersection")


def test_bounded_absent():
    # no two subtrees of a 2-node host overlap
    assert find_representation(path_graph(2), SearchConfig(2)).status is SearchStatus.BOUNDED_ABSENT
    # K3 needs three pairwise overlapping intervals, impossible on 3 nodes
    res = find_representation(complete_graph(3), SearchConfig(3, HostConstraint("leafage", 2)))
    assert res.status is SearchStatus.BOUNDED_ABSENT and res.hosts_tried == 3
    # W5 is not a circle graph, hence not an interval overlap graph
    res = find_representation(wheel_graph(5), SearchConfig(8, HostConstraint("leafage", 2)))
    assert res.status is SearchStatus.BOUNDED_ABSENT


def test_timeout_is_distinct():
    res = find_representation(wheel_graph(5), SearchConfig(12, HostConstraint("leafage", 2), time_budget=0.0))
    assert res.status is SearchStatus.TIMEOUT


def test_paths_only():
    res = find_representation(cycle_graph(4), SearchConfig(6, paths_only=True))
    assert res.status is SearchStatus.FOUND
    assert all(res.representation.is_path(v) for v in res.representation.vertices)


def test_search_is_deterministic_and_parallel_agrees():
    g = cycle_graph(5)
    cfg = SearchConfig(7, HostConstraint("max_degree", 3))
    a = find_representation(g, cfg).to_dict()
    b = find_representation(g, cfg).to_dict()
    c = find_representation(g, SearchConfig(7, HostConstraint("max_degree", 3), jobs=2)).to_dict()
    assert a == b
    assert a["representation"] == c["representation"] and a["status"] == c["status"]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**9))
def test_search_is_complete_on_known_instances(seed):
    rng = random.Random(seed)
    rep = random_representation(rng, rng.randint(2, 6), rng.randint(1, 4))
    g = derive_graph(rep)
    res = find_representation(g, SearchConfig(len(rep.host)))
    assert res.status is SearchStatus.FOUND
    assert len(res.representation.host) <= len(rep.host)


def test_spanbranch_audit():
    report = audit_spanbranch(SearchConfig(8))
    assert report.ok and report.hosts_checked > 0
    control = audit_spanbranch(SearchConfig(8), offset=1)
    assert control.counterexamples
    witness = control.counterexamples[0]
    assert witness["uncovered"]


def test_spanbranch_on_double_stars():
    cfg = SearchConfig(10, HostConstraint("sub", base=double_star_tree()))
    report = audit_spanbranch(cfg, leafage=[4])
    assert report.ok and report.hosts_checked == sum(1 for _ in enumerate_host_trees(cfg))


def test_gadget_audit_on_paths_finds_nothing():
    report = audit_gadget_lemmas(3, SearchConfig(12, HostConstraint("leafage", 2)))
    assert report.ok and report.representations_found == 0


def test_gadget_audit_small_hosts():
    report = audit_gadget_lemmas(3, SearchConfig(8))
    assert report.ok and report.hosts_checked == 48
    assert report.representations_found == 0


@pytest.mark.slow
def test_gadget_audit_on_spider():
    report = audit_gadget_lemmas(3, SearchConfig(11, HostConstraint("fixed", base=spider_tree([3, 3, 4]))))
    assert report.representations_found >= 1
    assert report.ok
    # without closing branching nodes the plain leaf count can drop below d
    assert report.raw_leaf_shortfalls >= 1


def test_gadget_audit_counts_only_valid_completions():
    g, named = build_gadget(GadgetParams(3, 0))
    assert len(g) == 11
    with pytest.raises(ValueError):
        audit_gadget_lemmas(2, SearchConfig(5))
