import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_nonharmonicity, random_tree
from geocomplexity.errors import GraphError
from geocomplexity.graph import (
    EmbeddedGraph,
    chain_graph,
    geometrical_complexity,
    graph_length,
    node_count,
    nonharmonicities,
    star_nonharmonicity,
    star_of,
    structural_barcode,
)


# -- construction ----------------------------------------------------------

def test_rejects_self_loop_and_duplicates():
    with pytest.raises(GraphError):
        EmbeddedGraph([[0, 0], [1, 0]], [(0, 0)])
    with pytest.raises(GraphError):
        EmbeddedGraph([[0, 0], [1, 0]], [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        EmbeddedGraph([[0, 0], [1, 0]], [(0, 2)])


def test_edges_are_sorted_pairs():
    g = EmbeddedGraph(np.zeros((3, 2)), [(2, 1), (1, 0)])
    assert g.edges == ((0, 1), (1, 2))


def test_connectivity_and_tree(y_tree):
    assert y_tree.is_connected() and y_tree.is_tree()
    forest = EmbeddedGraph(np.zeros((4, 2)), [(0, 1), (2, 3)])
    assert not forest.is_connected()
    cycle = EmbeddedGraph(np.zeros((3, 2)), [(0, 1), (1, 2), (0, 2)])
    assert cycle.is_connected() and not cycle.is_tree()


# -- star_of ---------------------------------------------------------------

def test_star_of_path_middle():
    s = star_of(chain_graph([[0, 0], [1, 0], [2, 0]]), 1)
    assert s.degree == 2 and set(s.leaves) == {0, 2}


def test_star_of_hub(y_tree):
    assert star_of(y_tree, 0).degree == 3


def test_star_of_leaf():
    s = star_of(chain_graph([[0, 0], [1, 0]]), 0)
    assert s.degree == 1 and s.leaves == (1,)


def test_star_of_unknown_node(y_tree):
    with pytest.raises(GraphError):
        star_of(y_tree, 7)


# -- graph_length ----------------------------------------------------------

def test_length_no_edges():
    assert graph_length(EmbeddedGraph([[0, 0], [1, 1]])) == 0.0


def test_length_unit_chain():
    assert graph_length(chain_graph([[0, 0], [1, 0], [1, 1]])) == pytest.approx(2.0)


def test_length_y_tree():
    g = EmbeddedGraph([[0, 0], [1, 0], [0, 2], [-3, 0]], [(0, 1), (0, 2), (0, 3)])
    assert graph_length(g) == pytest.approx(6.0, rel=1e-12)


# -- non-harmonicity and GC --------------------------------------------------

def test_leaf_nonharmonicity_zero(y_tree):
    assert star_nonharmonicity(y_tree, 1) == 0.0


def test_bent_chain_middle():
    g = chain_graph([[0, 0], [1, 1], [2, 0]])
    assert star_nonharmonicity(g, 1) == pytest.approx(1.0, rel=1e-12)


def test_harmonic_three_star(y_tree):
    assert star_nonharmonicity(y_tree, 0) == pytest.approx(0.0, abs=1e-15)


def test_gc_collinear_equally_spaced():
    for k in (2, 3, 7, 40):
        g = chain_graph(np.outer(np.arange(k), [0.3, -1.7]) + [5, 2])
        assert abs(geometrical_complexity(g)) <= 1e-12


def test_gc_bent_chain():
    assert abs(geometrical_complexity(chain_graph([[0, 0], [1, 1], [2, 0]])) - 9.0) <= 1e-12


def test_gc_harmonic_y_tree(y_tree):
    assert geometrical_complexity(y_tree) == pytest.approx(0.0, abs=1e-12)


def test_gc_single_node():
    assert geometrical_complexity(EmbeddedGraph([[1, 2]])) == 0.0


@settings(max_examples=50)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_nonharmonicity_matches_brute_force(n, seed):
    r = np.random.default_rng(seed)
    g = random_tree(r, n)
    # a couple of extra chords so the check also covers cyclic graphs
    extra = [(0, j) for j in range(2, n) if (0, j) not in g.edges][:2]
    g = EmbeddedGraph(g.positions, list(g.edges) + extra)
    vec = nonharmonicities(g)
    for v in range(n):
        want = brute_nonharmonicity(g.positions, g.edges, v)
        assert star_nonharmonicity(g, v) == pytest.approx(want, rel=1e-12, abs=1e-14)
        assert vec[v] == pytest.approx(want, rel=1e-12, abs=1e-14)


@settings(max_examples=50)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1), st.floats(0, 2 * math.pi), st.floats(0.1, 10))
def test_gc_and_length_under_similarity(n, seed, angle, s):
    r = np.random.default_rng(seed)
    g = random_tree(r, n)
    rot = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    moved = g.with_positions(g.positions @ rot.T + [3.0, -1.0])
    scaled = g.with_positions(s * g.positions)
    gc = geometrical_complexity(g)
    assert geometrical_complexity(moved) == pytest.approx(gc, rel=1e-9, abs=1e-9)
    assert geometrical_complexity(scaled) == pytest.approx(s * s * gc, rel=1e-9, abs=1e-9)
    assert graph_length(moved) == pytest.approx(graph_length(g), rel=1e-9)
    assert graph_length(scaled) == pytest.approx(s * graph_length(g), rel=1e-9)


@settings(max_examples=50)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_gc_zero_iff_all_stars_harmonic(n, seed):
    r = np.random.default_rng(seed)
    g = random_tree(r, n)
    stars_harmonic = all(brute_nonharmonicity(g.positions, g.edges, v) < 1e-20 for v in range(n))
    assert (geometrical_complexity(g) < 1e-12) == stars_harmonic


# -- barcode -----------------------------------------------------------------

def test_barcode_y_tree_fig1(y_tree):
    assert str(structural_barcode(y_tree, min_max_order=4)) == "0|1||4"


def test_barcode_y_tree_default(y_tree):
    assert str(structural_barcode(y_tree)) == "1||4"


def test_barcode_fig1_nineteen_nodes():
    # one 4-star hub, two of its arms end in 3-stars, remaining arms are paths
    pos, edges = [[0.0, 0.0]], []

    def add(parent):
        pos.append([float(len(pos)), 0.0])
        edges.append((parent, len(pos) - 1))
        return len(pos) - 1

    arms = [add(0) for _ in range(4)]
    for a in arms[:2]:
        add(a)
        add(a)
    while len(pos) < 19:
        add(len(pos) - 1)
    g = EmbeddedGraph(pos, edges)
    assert g.is_tree()
    assert str(structural_barcode(g, 4)) == "1|2||19"


def test_barcode_path():
    assert str(structural_barcode(chain_graph(np.zeros((5, 2))))) == "0||5"


@settings(max_examples=30)
@given(st.integers(1, 15), st.integers(0, 2**32 - 1))
def test_barcode_node_count(n, seed):
    g = random_tree(np.random.default_rng(seed), n)
    b = structural_barcode(g)
    assert b.node_count == node_count(g) == n
    assert sum(b.star_counts) <= n


def test_node_count_examples(y_tree):
    assert node_count(EmbeddedGraph([[0, 0]])) == 1
    assert node_count(y_tree) == 4
    assert node_count(chain_graph(np.zeros((101, 2)))) == 101


# -- JSON ----------------------------------------------------------------------

def test_json_layout_and_round_trip(tmp_path, y_tree):
    p = tmp_path / "g.json"
    y_tree.save_json(p)
    obj = json.loads(p.read_text())
    assert set(obj) == {"dimension", "nodes", "edges"}
    assert obj["dimension"] == 2
    assert all(i < j for i, j in obj["edges"])
    back = EmbeddedGraph.load_json(p)
    assert np.array_equal(back.positions, y_tree.positions)
    assert back.edges == y_tree.edges
