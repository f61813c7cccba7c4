import itertools
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgmfunctor.diagram import (
    clique_generator_name,
    compare_composition,
    copy_composition,
    dag_signature,
    evaluate,
    substitute,
    vertex_generator_name,
)
from pgmfunctor.errors import DegenerateNetworkError, GraphError
from pgmfunctor.graphs import GraphHom, OrderedDag, OrderedUGraph, is_chordal, moralise_graph
from pgmfunctor.network import (
    BayesianNetwork,
    MarkovNetwork,
    NetworkMorphism,
    bn_joint,
    bn_from_tables,
    check_morphism,
    marginalization_morphism,
    mn_from_tables,
    mn_joint,
)
from pgmfunctor.oracle import brute_family_product
from pgmfunctor.randomized import random_bn, random_mn
from pgmfunctor.semantics import FiniteSet, Tensor, identity_tensor
from pgmfunctor.transform import (
    family_product,
    moralisation_map,
    moralise_bn,
    moralise_morphism,
    mor_tr,
    mor_tr_embedding,
    normalize_family,
    tr_mor,
    tr_mor_embedding,
    triangulate_mn,
    triangulate_morphism,
    triangulation_map,
)


def test_moralise_bear_factors(bear):
    mn = moralise_bn(bear)
    assert set(mn.factors) == {("B",), ("E",), ("B", "E", "A"), ("E", "R")}
    assert np.allclose(mn.factor(("B", "E", "A")).entries, np.transpose(bear.kernels["A"].entries, (1, 2, 0)))
    assert np.array_equal(mn.factor(("B", "A")).entries, np.ones((2, 2)))
    z, dist = mn_joint(mn)
    assert abs(z - 1.0) < 1e-12
    assert dist.max_deviation(bn_joint(bear)) < 1e-12


def test_moralise_single_vertex():
    bn = bn_from_tables("A", [], {"A": 3}, {"A": np.array([0.2, 0.3, 0.5])})
    mn = moralise_bn(bn)
    assert mn.ugraph.edges == frozenset()
    assert np.allclose(mn.factor(("A",)).entries, [0.2, 0.3, 0.5])


def test_moralisation_map_images(bear):
    mm = moralisation_map(bear.dag)
    img = mm.gmap.images[clique_generator_name("BEA")]
    assert [o.generator for o in img.occurrences] == [vertex_generator_name("A")]
    assert img.domain == () and img.codomain == ("B", "E", "A")
    assert mm.gmap.images[clique_generator_name("BA")].occurrences == ()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_moralisation_preserves_joint(seed):
    bn = random_bn(np.random.default_rng(seed), zero_prob=0.2)
    z, dist = mn_joint(moralise_bn(bn))
    assert abs(z - 1.0) < 1e-12
    assert dist.max_deviation(bn_joint(bn)) <= 1e-9


def test_moralisation_substitution_identity(bear):
    # the moral network's clique product is the image of the copy composition
    mm = moralisation_map(bear.dag)
    sig = mm.gmap.source
    d = substitute(compare_composition(sig, sig.generator_names), mm.gmap)
    t = evaluate(d, bear.sets(), bear.tensors())
    assert np.allclose(t.entries, bn_joint(bear).entries, atol=1e-15)


MISCONCEPTION_G = {
    "D": [[0.5, 0.9999], [0.0001, 0.5]],
    "C": [[0.66664, 0.0002], [0.9998, 0.33336]],
    "B": [0.23072, 0.84749],
    "A": 0.18055,
}


def test_misconception_triangulation_tables(misconception):
    res = triangulate_mn(misconception)
    bn = res.bn
    assert [(bn.dag.vertices[a].label, bn.dag.vertices[b].label) for a, b in bn.dag.sorted_edges()] == [
        ("A", "B"), ("A", "C"), ("A", "D"), ("B", "C"), ("C", "D"),
    ]
    for v, expected in MISCONCEPTION_G.items():
        assert np.allclose(bn.kernels[v].entries[0], expected, atol=1e-4), v
    assert res.z == pytest.approx(7201840, rel=1e-12)


def test_misconception_unnormalized_tensors(misconception):
    res = triangulate_mn(misconception)
    f = res.unnormalized
    # f_D(d | a, c) = phi_CD(c, d) phi_AD(a, d)
    cd, ad = misconception.factor(("C", "D")).entries, misconception.factor(("A", "D")).entries
    assert np.allclose(f["D"].entries, np.einsum("cd,ad->dac", cd, ad))
    assert np.allclose(f["C"].entries, misconception.factor(("B", "C")).entries.T[:, None, :] * np.ones((2, 2, 2)))
    assert np.allclose(f["B"].entries, misconception.factor(("A", "B")).entries.T)
    assert np.allclose(f["A"].entries, [1.0, 1.0])


def test_triangulate_edgeless():
    mn = mn_from_tables("AB", [], {"A": 2, "B": 3}, {("A",): np.array([1.0, 3.0]), ("B",): np.array([1.0, 1.0, 2.0])})
    res = triangulate_mn(mn)
    assert res.bn.dag.edges == frozenset()
    assert np.allclose(res.bn.kernels["A"].entries, [0.25, 0.75])
    assert np.allclose(res.bn.kernels["B"].entries, [0.25, 0.25, 0.5])
    assert res.z == pytest.approx(16.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_triangulation_preserves_joint_and_sweep(seed):
    mn = random_mn(np.random.default_rng(seed), zero_prob=0.2)
    res = triangulate_mn(mn)
    z, dist = mn_joint(mn)
    assert bn_joint(res.bn).max_deviation(dist) <= 1e-9
    sets = mn.sets()
    lhs = brute_family_product(res.bn.dag, sets, res.unnormalized)
    rhs = res.z * brute_family_product(res.bn.dag, sets, res.bn.kernels)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12
    assert res.z == pytest.approx(z, rel=1e-12)


def test_triangulation_substitution_identity(misconception):
    # the image of the copy composition of the DAG is the clique product
    tm = triangulation_map(misconception.ugraph)
    cd = dag_signature(tm.dag)
    d = replace(copy_composition(cd, cd.generator_names), signature=tm.gmap.source)
    d = substitute(d, tm.gmap)
    t = evaluate(d, misconception.sets(), misconception.tensors())
    sig_h = tm.gmap.target
    ref = evaluate(compare_composition(sig_h, sig_h.generator_names), misconception.sets(), misconception.tensors())
    assert np.allclose(t.entries, ref.entries)


def test_triangulation_partition(misconception):
    tm = triangulation_map(misconception.ugraph)
    assert {v: set(block) for v, block in tm.partition.items()} == {
        "A": {("A",)},
        "B": {("B",), ("A", "B")},
        "C": {("C",), ("B", "C")},
        "D": {("D",), ("A", "D"), ("C", "D")},
    }
    assert sum(len(p) for p in tm.partition.values()) == len(misconception.clique_labels())


def test_silent_parent_is_ignored(misconception):
    # C has parent A in the triangulation but no clique of C contains A
    f_c = triangulate_mn(misconception).unnormalized["C"]
    assert [s.name for s in f_c.domain] == ["A", "B"]
    assert np.array_equal(f_c.entries[:, 0, :], f_c.entries[:, 1, :])


def _tensor(cod, dom, arr):
    return Tensor(tuple(cod), tuple(dom), np.asarray(arr, dtype=float))


def test_normalize_stochastic_family_has_unit_constant(bear):
    g = tr_mor(bear)
    fam = normalize_family(g.dag, g.kernels)
    assert fam.z == pytest.approx(1.0)
    for v in g.dag.labels:
        assert np.allclose(fam.kernels[v].entries, g.kernels[v].entries)


def test_normalize_zero_column_is_uniform_and_feeds_parent():
    a, b = FiniteSet.range("A", 2), FiniteSet.range("B", 3)
    dag = OrderedDag.from_labels("AB", [("A", "B")])
    f = {"A": _tensor([a], [], [1.0, 1.0]), "B": _tensor([b], [a], [[2.0, 0.0], [1.0, 0.0], [1.0, 0.0]])}
    fam = normalize_family(dag, f)
    assert np.allclose(fam.kernels["B"].entries[:, 1], 1 / 3)
    assert np.allclose(fam.kernels["B"].entries[:, 0], [0.5, 0.25, 0.25])
    assert np.allclose(fam.lambdas["B"].entries, [4.0, 0.0])
    assert np.allclose(fam.kernels["A"].entries, [1.0, 0.0])
    assert fam.z == pytest.approx(4.0)
    prod_f = brute_family_product(dag, {"A": a, "B": b}, f)
    prod_g = brute_family_product(dag, {"A": a, "B": b}, fam.kernels)
    assert np.allclose(prod_f, fam.z * prod_g)


def test_normalize_requires_triangulated_dag():
    dag = OrderedDag.from_labels("ABC", [("A", "C"), ("B", "C")])
    sets = [FiniteSet.range(x, 2) for x in "ABC"]
    f = {"A": _tensor(sets[:1], [], [1, 1]), "B": _tensor(sets[1:2], [], [1, 1]),
         "C": _tensor(sets[2:], sets[:2], np.ones((2, 2, 2)))}
    with pytest.raises(GraphError):
        normalize_family(dag, f)


def test_normalize_zero_constant_raises():
    a = FiniteSet.range("A", 2)
    dag = OrderedDag.from_labels("A")
    with pytest.raises(DegenerateNetworkError):
        normalize_family(dag, {"A": _tensor([a], [], [0.0, 0.0])})


def test_family_product_matches_oracle(bear):
    ft = family_product(bear.dag, bear.sets(), bear.kernels)
    assert np.allclose(ft.entries, brute_family_product(bear.dag, bear.sets(), bear.kernels))


def test_degenerate_mn_is_rejected():
    mn = mn_from_tables("AB", [("A", "B")], {"A": 2, "B": 2}, {("A", "B"): np.zeros((2, 2))})
    with pytest.raises(DegenerateNetworkError):
        triangulate_mn(mn)
    with pytest.raises(DegenerateNetworkError):
        mor_tr_embedding(mn)


def test_v_structure_embedding_completes_dag():
    bn = bn_from_tables("ABC", [("A", "C"), ("B", "C")], dict.fromkeys("ABC", 2), {
        "A": np.array([0.3, 0.7]), "B": np.array([0.6, 0.4]),
        "C": np.array([[[0.1, 0.2], [0.3, 0.4]], [[0.9, 0.8], [0.7, 0.6]]]),
    })
    big = tr_mor(bn)
    assert big.dag.sorted_edges() == [(0, 1), (0, 2), (1, 2)]
    m = tr_mor_embedding(bn)
    assert check_morphism(big, bn, m)


def test_misconception_embedding_adds_chord(misconception):
    big = mor_tr(misconception)
    added = {frozenset(e) for e in big.ugraph.edges} - {frozenset(e) for e in misconception.ugraph.edges}
    assert added == {frozenset((0, 2))}
    assert check_morphism(big, misconception, mor_tr_embedding(misconception))


def test_five_cycle_embedding(rng):
    labels = "ABCDE"
    edges = [(labels[i], labels[(i + 1) % 5]) for i in range(5)]
    h = OrderedUGraph.from_labels(labels, edges)
    factors = {}
    for a, b in edges:
        key = tuple(sorted((a, b)))
        factors[key] = rng.random((2, 2)) + 0.1
    mn = mn_from_tables(labels, edges, dict.fromkeys(labels, 2), factors)
    big = mor_tr(mn)
    assert len(big.ugraph.edges) > len(h.edges)
    assert is_chordal(big.ugraph)
    assert check_morphism(big, mn, mor_tr_embedding(mn))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_random_embeddings(seed):
    rng = np.random.default_rng(seed)
    bn = random_bn(rng)
    assert check_morphism(tr_mor(bn), bn, tr_mor_embedding(bn))
    assert is_chordal(tr_mor(bn).dag.skeleton())
    mn = random_mn(rng)
    assert check_morphism(mor_tr(mn), mn, mor_tr_embedding(mn))


def test_naturality_of_moralisation(bear):
    # a marginalisation morphism stays a morphism between moralised networks
    target, m = marginalization_morphism(bear, "R")
    assert check_morphism(bear, target, m)
    mm = moralise_morphism(m)
    assert check_morphism(moralise_bn(bear), moralise_bn(target), mm)


def test_naturality_of_triangulation(misconception):
    target, m = marginalization_morphism(misconception, "C")
    assert check_morphism(misconception, target, m)
    tm = triangulate_morphism(m)
    assert check_morphism(triangulate_mn(misconception).bn, triangulate_mn(target).bn, tm)


def _point_collapse_counterexample():
    """Triangulating through a one-point graph need not commute with marginals."""
    # phi(a, b, c) is 1 exactly when two of the three values agree
    phi = np.zeros((2, 2, 2))
    for a, b, c in itertools.product(range(2), repeat=3):
        phi[a, b, c] = 1.0 if len({a, b, c}) == 2 else 0.0
    return phi


def test_point_collapse_counterexample_marginal_not_independent():
    phi = _point_collapse_counterexample()
    # f_C(c | a, b) = phi, with A and B fed by omni (uniform) states
    joint = phi / phi.sum()
    ab = joint.sum(axis=2)
    assert np.allclose(ab / ab.min(), [[1, 2], [2, 1]])
    product = np.outer(ab.sum(axis=1), ab.sum(axis=0))
    tv = 0.5 * np.abs(ab - product).sum()
    assert tv == pytest.approx(1 / 6)
    assert tv >= 0.02


def test_moralise_morphism_rebuilds_graph_hom(bear):
    m = NetworkMorphism(GraphHom.identity(bear.dag), identity_tensor(tuple(bear.tau[x] for x in bear.dag.labels)))
    mm = moralise_morphism(m)
    assert mm.alpha.source == moralise_graph(bear.dag)
    assert isinstance(mm.alpha.source, OrderedUGraph)


def test_bn_and_mn_types_are_kept(bear, misconception):
    assert isinstance(moralise_bn(bear), MarkovNetwork)
    assert isinstance(triangulate_mn(misconception).bn, BayesianNetwork)
