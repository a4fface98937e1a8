import random

import pytest
from hypothesis import given, settings, strategies as st

from sogkit.graph import Graph, cycle_graph, path_graph
from sogkit.tree import (
    HostTree,
    Relation,
    Representation,
    Subtree,
    analyze_tree,
    boundary_nodes,
    common_nodes,
    derive_graph,
    double_star_tree,
    lift_representation,
    path_tree,
    set_relation,
    spider_tree,
    star_tree,
    subdivide,
    subtree_leaves,
    verify_representation,
)

from conftest import random_tree, representations

P3 = path_tree(3)


def sub(*nodes, host=P3):
    return Subtree(host, [str(n) for n in nodes])


def test_host_tree_validation():
    with pytest.raises(ValueError):
        HostTree(["a", "b", "c"], [("a", "b")])  # disconnected
    with pytest.raises(ValueError):
        HostTree(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    with pytest.raises(ValueError):
        Subtree(P3, ["1", "3"])
    with pytest.raises(ValueError):
        Subtree(P3, [])


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((1, 2), (2, 3), Relation.OVERLAP),
        ((2,), (1, 2, 3), Relation.B_CONTAINS_A),
        ((1, 2, 3), (2,), Relation.A_CONTAINS_B),
        ((1,), (3,), Relation.DISJOINT),
        ((1, 2), (1, 2), Relation.EQUAL),
    ],
)
def test_set_relation(a, b, expected):
    assert set_relation(sub(*a), sub(*b)) is expected


def test_set_relation_needs_one_host():
    with pytest.raises(ValueError):
        set_relation(sub(1), Subtree(path_tree(2), ["1"]))


def test_derive_graph_examples():
    overlapping = Representation(P3, {"x": ["1", "2"], "y": ["2", "3"]})
    assert derive_graph(overlapping).edges == {("x", "y")}
    nested = Representation(P3, {"x": ["1", "2", "3"], "y": ["2"]})
    assert not derive_graph(nested, "overlap").edges
    assert derive_graph(nested, "intersection").edges == {("x", "y")}


def test_c5_as_interval_overlap():
    # chord model of C5 on 10 circle points: chord i joins 2i and 2i+3 (mod 10);
    # the chord crossing the cut point is replaced by its complementary arc
    intervals = {"v1": (0, 3), "v2": (2, 5), "v3": (4, 7), "v4": (6, 9), "v5": (1, 8)}
    host = path_tree(10, prefix="p")
    rep = Representation(
        host, {v: [f"p{i + 1}" for i in range(lo, hi + 1)] for v, (lo, hi) in intervals.items()}
    )
    pairwise = {
        (a, b)
        for a in rep.vertices
        for b in rep.vertices
        if a < b and set_relation(rep.subtree(a), rep.subtree(b)) is Relation.OVERLAP
    }
    assert derive_graph(rep).edges == pairwise
    assert verify_representation(rep, cycle_graph(5))


def test_verify_representation():
    k2 = path_graph(2, prefix="v")
    good = Representation(P3, {"v1": ["1", "2"], "v2": ["2", "3"]})
    bad = Representation(P3, {"v1": ["1", "2", "3"], "v2": ["2"]})
    assert verify_representation(good, k2)
    verdict = verify_representation(bad, k2)
    assert not verdict and verdict.offending == [("v1", "v2")]
    with pytest.raises(ValueError):
        verify_representation(good, Graph(["v1", "v3"]))


def test_representation_json_round_trip():
    rep = Representation(P3, {"x": ["1", "2"]})
    assert Representation.from_dict(rep.to_dict()).to_dict() == rep.to_dict()
    assert "digraph" not in rep.to_dot() and '"1" -- "2"' in rep.to_dot()


def test_analyze_star():
    info = analyze_tree(star_tree(3))
    assert info.leafage == 3
    assert info.branching_nodes == ("c",)
    assert info.lastbranches == ("c",)
    assert info.twig_lengths() == [1, 1, 1]


def test_analyze_path():
    info = analyze_tree(path_tree(5))
    assert info.leafage == 2 and info.is_path
    assert not info.branching_nodes and not info.lastbranches
    assert len(info.twigs) == 1 and len(info.twigs[0]) == 5


def test_analyze_double_star():
    t = double_star_tree()
    assert len(t) == 6
    info = analyze_tree(t)
    assert info.leafage == 4
    assert set(info.branching_nodes) == {"x", "y"}
    assert set(info.lastbranches) == {"x", "y"}
    assert len(info.twigs) == 4


def test_lastbranch_excludes_inner_branching_node():
    # x - m - y with m carrying its own leaf: m sees two components with branching nodes
    t = HostTree(
        ["x", "m", "y", "x1", "x2", "m1", "y1", "y2"],
        [("x", "m"), ("m", "y"), ("x", "x1"), ("x", "x2"), ("m", "m1"), ("y", "y1"), ("y", "y2")],
    )
    info = analyze_tree(t)
    assert set(info.lastbranches) == {"x", "y"}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 14))
def test_twig_edge_accounting(seed, n):
    t = random_tree(random.Random(seed), n)
    info = analyze_tree(t)
    assert sum(info.twig_lengths()) + info.internal_edges == len(t) - 1
    owners = {leaf: sum(1 for tw in info.twigs if leaf in tw) for leaf in info.leaves}
    assert all(count == 1 for count in owners.values()) or info.is_path
    for tw in info.twigs:
        assert all(t.degree(x) <= 2 for x in tw)
        assert any(x in info.leaves for x in tw)


def test_subdivide_examples():
    p2 = path_tree(2)
    p3 = subdivide(p2, ("1", "2"))
    assert len(p3) == 3 and analyze_tree(p3).is_path
    spider = subdivide(star_tree(3), ("c", "l1_1"), 2)
    assert len(spider) == 6 and analyze_tree(spider).leafage == 3
    assert sorted(analyze_tree(spider).twig_lengths()) == [1, 1, 3]
    with pytest.raises(ValueError):
        subdivide(p2, ("1", "3"))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 12), st.integers(1, 3))
def test_subdivision_keeps_leafage(seed, n, times):
    rng = random.Random(seed)
    t = random_tree(rng, n)
    edge = rng.choice(t.sorted_edges())
    s = subdivide(t, edge, times)
    assert len(s) == len(t) + times
    assert analyze_tree(s).leafage == analyze_tree(t).leafage


def test_lift_identity_and_single_edge():
    rep = Representation(P3, {"a": ["1", "2"], "b": ["2", "3"], "c": ["3"]})
    assert lift_representation(rep, P3).to_dict() == rep.to_dict()
    bigger = subdivide(P3, ("1", "2"))
    lifted = lift_representation(rep, bigger)
    assert len(lifted["a"]) == 3 and lifted["b"] == rep["b"]
    assert derive_graph(lifted) == derive_graph(rep)


def test_lift_rejects_bad_map():
    rep = Representation(P3, {"a": ["1"]})
    with pytest.raises(ValueError):
        lift_representation(rep, P3, {"1": "1", "2": "1", "3": "3"})
    with pytest.raises(ValueError):
        lift_representation(rep, path_tree(4))


@settings(max_examples=60, deadline=None)
@given(representations(), st.integers(0, 10**9))
def test_lift_preserves_graphs(rep, seed):
    rng = random.Random(seed)
    host = rep.host
    if len(host) < 2:
        return
    for _ in range(5):
        host = subdivide(host, rng.choice(host.sorted_edges()), rng.randint(1, 2))
    lifted = lift_representation(rep, host)
    for mode in ("overlap", "intersection"):
        assert derive_graph(lifted, mode) == derive_graph(rep, mode)
        assert verify_representation(lifted, derive_graph(rep, mode), mode)


@settings(max_examples=60, deadline=None)
@given(representations())
def test_overlap_graph_inside_intersection_graph(rep):
    assert derive_graph(rep, "overlap").edges <= derive_graph(rep, "intersection").edges


@settings(max_examples=60, deadline=None)
@given(representations(), representations())
def test_relation_symmetry(r1, r2):
    vs = r1.vertices
    for a in vs:
        for b in vs:
            ab = set_relation(r1.subtree(a), r1.subtree(b))
            ba = set_relation(r1.subtree(b), r1.subtree(a))
            flip = {Relation.A_CONTAINS_B: Relation.B_CONTAINS_A, Relation.B_CONTAINS_A: Relation.A_CONTAINS_B}
            assert ba is flip.get(ab, ab)
            assert (ab is Relation.EQUAL) == (r1[a] == r1[b])


@settings(max_examples=60, deadline=None)
@given(representations())
def test_helly_property(rep):
    sets = [rep[v] for v in rep.vertices]
    if all(a & b for a in sets for b in sets):
        assert common_nodes(sets)


def test_leaf_and_boundary_counts():
    t = spider_tree([2, 2, 2])
    core = {"c", "l1_1", "l2_1", "l3_1"}
    assert subtree_leaves(t, core) == 3
    assert boundary_nodes(t, core) == ["l1_1", "l2_1", "l3_1"]
    assert subtree_leaves(t, {"c"}) == 1
