import random
from itertools import combinations, product

import pytest
from hypothesis import strategies as st

from sogkit.graph import Graph
from sogkit.tree import HostTree, Representation


def brute_connectivity(g: Graph) -> int:
    """Smallest vertex set whose removal disconnects g or leaves one vertex."""
    n = len(g)
    for size in range(n - 1):
        for cut in combinations(g.vertices, size):
            rest = g.remove(cut)
            if len(rest) <= 1 or not rest.is_connected():
                return size
    return n - 1


def brute_colorable(g: Graph, k: int) -> bool:
    verts = g.vertices
    for colours in product(range(k), repeat=len(verts)):
        c = dict(zip(verts, colours))
        if all(c[u] != c[v] for u, v in g.edges):
            return True
    return False


def random_tree(rng: random.Random, n: int, prefix: str = "t") -> HostTree:
    nodes = [f"{prefix}{i}" for i in range(n)]
    edges = [(nodes[i], nodes[rng.randrange(i)]) for i in range(1, n)]
    return HostTree(nodes, edges)


def random_subtree(rng: random.Random, t: HostTree) -> set:
    start = rng.choice(t.nodes)
    chosen = {start}
    for _ in range(rng.randrange(len(t))):
        frontier = sorted({y for x in chosen for y in t.neighbors(x)} - chosen)
        if not frontier:
            break
        chosen.add(rng.choice(frontier))
    return chosen


def random_representation(rng: random.Random, n_tree: int, n_vertices: int) -> Representation:
    t = random_tree(rng, n_tree)
    return Representation(t, {f"v{i}": random_subtree(rng, t) for i in range(n_vertices)})


@st.composite
def graphs(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    verts = [f"v{i}" for i in range(n)]
    pairs = list(combinations(verts, 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(verts, [p for p, keep in zip(pairs, mask) if keep])


@st.composite
def representations(draw, max_tree=9, max_vertices=6):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    return random_representation(rng, rng.randint(1, max_tree), rng.randint(1, max_vertices))


@pytest.fixture
def rng():
    return random.Random(20240611)
