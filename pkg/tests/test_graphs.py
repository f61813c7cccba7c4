import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgmfunctor.errors import GraphError, LimitExceededError, UnknownVertexError
from pgmfunctor.graphs import (
    GraphHom,
    OrderedDag,
    OrderedUGraph,
    enumerate_cliques,
    hom_compose,
    is_chordal,
    is_valid_hom,
    moralise_graph,
    parents,
    satisfies_triangulated_property,
    to_dot,
    triangulate_graph,
)


def edge_names(g):
    return {(g.vertices[a].label, g.vertices[b].label) for a, b in g.sorted_edges()}


@st.composite
def ugraphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    labels = [f"v{i}" for i in range(n)]
    return OrderedUGraph.from_labels(labels, [(labels[a], labels[b]) for a, b in chosen])


@st.composite
def dags(draw, max_n=6):
    h = draw(ugraphs(max_n))
    return OrderedDag(h.vertices, frozenset(tuple(sorted(e)) for e in h.edges))


def test_dag_rejects_backward_edge():
    with pytest.raises(GraphError):
        OrderedDag.from_labels("AB", [("B", "A")])


def test_unknown_vertex():
    g = OrderedDag.from_labels("AB", [("A", "B")])
    with pytest.raises(UnknownVertexError):
        g.vid("Z")


def test_parents_in_order():
    g = OrderedDag.from_labels("BEAR", [("E", "A"), ("B", "A"), ("E", "R")])
    assert [v.label for v in parents(g, "A")] == ["B", "E"]
    assert parents(g, "B") == []


def test_cliques_of_triangle_with_tail():
    h = OrderedUGraph.from_labels("ABCD", [("A", "B"), ("B", "C"), ("A", "C"), ("C", "D")])
    got = ["".join(v.label for v in c) for c in enumerate_cliques(h)]
    assert sorted(got) == sorted(["A", "B", "C", "D", "AB", "AC", "BC", "CD", "ABC"])


def test_clique_cap():
    h = OrderedUGraph.from_labels([str(i) for i in range(5)])
    with pytest.raises(LimitExceededError):
        enumerate_cliques(h, max_vertices=4)


def test_moralise_bear():
    g = OrderedDag.from_labels("BEAR", [("B", "A"), ("E", "A"), ("E", "R")])
    mg = moralise_graph(g)
    assert {frozenset(e) for e in edge_names(mg)} == {
        frozenset(p) for p in [("B", "A"), ("E", "A"), ("E", "R"), ("B", "E")]
    }


def test_moralise_chain_adds_nothing():
    g = OrderedDag.from_labels("ABC", [("A", "B"), ("B", "C")])
    assert edge_names(moralise_graph(g)) == {("A", "B"), ("B", "C")}


def test_triangulate_misconception():
    h = OrderedUGraph.from_labels("ABCD", [("A", "B"), ("B", "C"), ("C", "D"), ("A", "D")])
    assert edge_names(triangulate_graph(h)) == {("A", "B"), ("B", "C"), ("C", "D"), ("A", "D"), ("A", "C")}


def test_triangulate_edgeless():
    h = OrderedUGraph.from_labels("ABC")
    assert triangulate_graph(h).edges == frozenset()


def test_five_cycle_gets_fill_in():
    labels = "ABCDE"
    h = OrderedUGraph.from_labels(labels, [(labels[i], labels[(i + 1) % 5]) for i in range(5)])
    t = triangulate_graph(h)
    assert len(t.edges) > len(h.edges)
    assert is_chordal(t)


def _brute_triangulation(h):
    # v -> w iff some path from v to w has every interior vertex above w
    n = len(h)
    nx_g = nx.Graph()
    nx_g.add_nodes_from(range(n))
    nx_g.add_edges_from(tuple(e) for e in h.edges)
    out = set()
    for v, w in itertools.combinations(range(n), 2):
        sub = nx_g.subgraph([v, w] + [u for u in range(n) if u > w])
        if nx.has_path(sub, v, w):
            out.add((v, w))
    return out


@settings(max_examples=150, deadline=None)
@given(ugraphs())
def test_triangulation_matches_path_definition(h):
    assert triangulate_graph(h).edges == frozenset(_brute_triangulation(h))


@settings(max_examples=150, deadline=None)
@given(ugraphs())
def test_triangulation_properties(h):
    t = triangulate_graph(h)
    assert satisfies_triangulated_property(t)
    assert is_chordal(t)
    assert {frozenset(e) for e in h.edges} <= {frozenset(e) for e in t.edges}


@settings(max_examples=150, deadline=None)
@given(ugraphs())
def test_is_chordal_agrees_with_networkx(h):
    g = nx.Graph()
    g.add_nodes_from(range(len(h)))
    g.add_edges_from(tuple(e) for e in h.edges)
    assert is_chordal(h) == nx.is_chordal(g)


@settings(max_examples=100, deadline=None)
@given(dags())
def test_moral_graph_marries_parents(g):
    mg = moralise_graph(g)
    for v in range(len(g)):
        ps = [p.id for p in parents(g, v)]
        for a, b in itertools.combinations(ps, 2):
            assert mg.has_edge(a, b)
    assert {frozenset(e) for e in g.edges} <= set(mg.edges)


@settings(max_examples=100, deadline=None)
@given(dags())
def test_tr_mor_embedding_is_homomorphism(g):
    big = triangulate_graph(moralise_graph(g))
    assert is_valid_hom(g, big, tuple(range(len(g))))
    assert is_chordal(big)


def test_hom_rejects_order_reversal():
    g = OrderedDag.from_labels("AB")
    with pytest.raises(GraphError):
        GraphHom(g, g, (1, 0))


def test_hom_rejects_missing_edge():
    g = OrderedDag.from_labels("AB", [("A", "B")])
    h = OrderedDag.from_labels("AB")
    with pytest.raises(GraphError):
        GraphHom(g, h, (0, 1))


def test_hom_allows_collapse():
    g = OrderedDag.from_labels("AB", [("A", "B")])
    GraphHom.contraction(g)
    assert GraphHom.contraction(g).mapping == (0, 0)


def test_hom_compose_associative():
    g1 = OrderedDag.from_labels("ABC", [("A", "B"), ("B", "C")])
    g2 = OrderedDag.from_labels("XY", [("X", "Y")])
    a = GraphHom(g1, g2, (0, 0, 1))
    b = GraphHom.contraction(g2)
    c = GraphHom.identity(b.target)
    assert hom_compose(hom_compose(a, b), c).mapping == hom_compose(a, hom_compose(b, c)).mapping == (0, 0, 0)


def test_dot_output_deterministic():
    g = OrderedDag.from_labels("BEAR", [("B", "A"), ("E", "A"), ("E", "R")])
    text = to_dot(g, "bear")
    assert text == to_dot(g, "bear")
    assert text.count("->") == 3
    assert text.startswith("digraph bear {")
    assert to_dot(OrderedUGraph.from_labels("AB", [("A", "B")])).count("--") == 1


def test_triangulated_property_violation():
    g = OrderedDag.from_labels("ABC", [("A", "C"), ("B", "C")])
    assert not satisfies_triangulated_property(g)
    assert len(triangulate_graph(moralise_graph(g)).edges) == 3
