"""Moralisation of Bayesian networks and triangulation of Markov networks.

Both directions are built at the level of syntax first, as generator maps
between free categories, and the new network's tables are obtained by
evaluating the image diagrams in the old network's semantics.  Triangulation
then needs the normalisation sweep (:func:`normalize_family`) to turn the
resulting nonnegative tensors into stochastic kernels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .diagram import (
    GeneratorMap,
    compare_composition,
    copy_composition,
    dag_signature,
    evaluate,
    generator_diagram,
    graph_of,
    omni_factor,
    ugraph_signature,
    unbend,
    vertex_generator_name,
    clique_generator_name,
)
from .errors import DegenerateNetworkError, GraphError
from .graphs import (
    DEFAULT_MAX_CLIQUE_VERTICES,
    GraphHom,
    OrderedDag,
    OrderedUGraph,
    clique_ids,
    moralise_graph,
    parent_ids,
    satisfies_triangulated_property,
    triangulate_graph,
)
from .network import (
    BayesianNetwork,
    MarkovNetwork,
    NetworkMorphism,
    mn_joint,
    joint_sets,
)
from .semantics import DEGENERATE, StochasticKernel, Tensor, identity_tensor


@dataclass(frozen=True, eq=False)
class MoralisationMap:
    dag: OrderedDag
    ugraph: OrderedUGraph
    gmap: GeneratorMap


def moralisation_map(g: OrderedDag, max_vertices: int = DEFAULT_MAX_CLIQUE_VERTICES) -> MoralisationMap:
    """Generator map from the moral graph's syntax to the DAG's (hypergraph) syntax.

    The clique formed by a vertex and its parents goes to the graph of that
    vertex's generator; every other clique goes to omnis.
    """
    mg = moralise_graph(g)
    target = dag_signature(g).hypergraph()
    source = ugraph_signature(mg, max_vertices)
    families = {}
    for v in g.vertices:
        fam = tuple(sorted(parent_ids(g, v.id) + (v.id,)))
        families[fam] = vertex_generator_name(v.label)
    images = {}
    for c in clique_ids(mg, max_vertices):
        labels = [mg.vertices[i].label for i in c]
        name = clique_generator_name(labels)
        if c in families:
            images[name] = graph_of(generator_diagram(target, families[c]))
        else:
            images[name] = omni_factor(target, labels)
    objects = {o: (o,) for o in g.labels}
    return MoralisationMap(g, mg, GeneratorMap(source, target, objects, images))


def moralise_bn(bn: BayesianNetwork, max_vertices: int = DEFAULT_MAX_CLIQUE_VERTICES) -> MarkovNetwork:
    """The Markov network on the moral graph sharing ``bn``'s joint (with Z = 1).

    Each family clique carries its kernel read as a factor; every other
    clique is left at the constant-one factor.
    """
    mm = moralisation_map(bn.dag, max_vertices)
    sets, tensors = bn.sets(), bn.tensors()
    factors = {}
    for c in clique_ids(mm.ugraph, max_vertices):
        labels = tuple(mm.ugraph.vertices[i].label for i in c)
        img = mm.gmap.images[clique_generator_name(labels)]
        if img.occurrences:
            factors[labels] = evaluate(img, sets, tensors)
    return MarkovNetwork(mm.ugraph, bn.tau, factors, max_vertices)


@dataclass(frozen=True, eq=False)
class TriangulationMap:
    ugraph: OrderedUGraph
    dag: OrderedDag
    gmap: GeneratorMap
    partition: Mapping[str, tuple[tuple[str, ...], ...]]


def triangulation_map(h: OrderedUGraph, max_vertices: int = DEFAULT_MAX_CLIQUE_VERTICES) -> TriangulationMap:
    """Generator map from the triangulated DAG's syntax to the graph's syntax.

    Every clique is assigned to its largest vertex ``v``; the generator of
    ``v`` goes to the compare-composition of its cliques, unbent so that
    ``pa(v)`` are inputs and ``v`` the output.  Parents not covered by any of
    those cliques become inputs the image ignores.
    """
    tg = triangulate_graph(h)
    target = ugraph_signature(h, max_vertices)
    source = dag_signature(tg).hypergraph()
    cliques = clique_ids(h, max_vertices)
    blocks: dict[int, list[tuple[int, ...]]] = {v: [] for v in range(len(h))}
    for c in cliques:
        blocks[c[-1]].append(c)

    seen = [c for v in blocks for c in blocks[v]]
    assert len(seen) == len(set(seen)) == len(cliques), "clique blocks must partition the cliques"
    images = {}
    partition = {}
    for v in tg.vertices:
        pa = parent_ids(tg, v.id)
        for c in blocks[v.id]:
            assert set(c) <= set(pa) | {v.id}, f"clique {c} not inside the family of {v.label}"
        names = [clique_generator_name([h.vertices[i].label for i in c]) for c in blocks[v.id]]
        core = compare_composition(target, names)
        ins = [tg.vertices[p].label for p in pa]
        images[vertex_generator_name(v.label)] = unbend(core, ins, [v.label])
        partition[v.label] = tuple(tuple(h.vertices[i].label for i in c) for c in blocks[v.id])
    objects = {o: (o,) for o in h.labels}
    return TriangulationMap(h, tg, GeneratorMap(source, target, objects, images), partition)


@dataclass(frozen=True, eq=False)
class NormalizedFamily:
    kernels: dict[str, StochasticKernel]
    z: float
    lambdas: dict[str, Tensor]


def normalize_family(dag: OrderedDag, f: Mapping[str, Tensor]) -> NormalizedFamily:
    """Turn nonnegative ``f_v(v | pa(v))`` into stochastic kernels and a constant.

    Sweeps from the largest vertex down.  The column sums ``lambda_v`` of
    ``f_v`` divide ``f_v`` (columns summing to zero become uniform) and are
    multiplied into the tensor of the largest parent of ``v``, which already
    has every other parent of ``v`` among its inputs on a triangulated DAG.
    For parentless vertices ``lambda_v`` is a scalar that goes into ``Z``.
    Afterwards ``prod f_v == Z * prod g_v`` pointwise.  The sweep is
    sequential by nature.
    """
    if not satisfies_triangulated_property(dag):
        raise GraphError("normalisation needs a DAG where co-parents are joined by an edge")
    work = {}
    for v in dag.vertices:
        t = f[v.label]
        work[v.id] = (np.array(t.entries, dtype=float), t)
    kernels: dict[str, StochasticKernel] = {}
    lambdas: dict[str, Tensor] = {}
    z = 1.0
    for v in reversed(dag.vertices):
        arr, t = work[v.id]
        lam = arr.sum(axis=0)
        card = arr.shape[0]
        safe = np.where(lam > 0, lam, 1.0)
        g = np.where(lam > 0, arr / safe, 1.0 / card)
        kernels[v.label] = StochasticKernel(t.codomain, t.domain, g)
        lambdas[v.label] = Tensor((), t.domain, lam)
        pa = parent_ids(dag, v.id)
        if not pa:
            z *= float(lam)
            continue
        w = pa[-1]
        warr, wt = work[w]
        wpa = parent_ids(dag, w)
        code = {w: 0}
        code.update({p: i + 1 for i, p in enumerate(wpa)})
        rest = [p for p in pa if p != w]
        if not set(rest) <= set(wpa):
            raise GraphError(f"parent {dag.vertices[w].label} of {v.label} misses some co-parents")
        warr = np.einsum(warr, list(range(len(wpa) + 1)), lam, [code[p] for p in pa], list(range(len(wpa) + 1)))
        work[w] = (warr, wt)
    if z <= 0.0:
        raise DegenerateNetworkError("normalising constant is zero")
    ordered = {v.label: kernels[v.label] for v in dag.vertices}
    return NormalizedFamily(ordered, z, {v.label: lambdas[v.label] for v in dag.vertices})


@dataclass(frozen=True, eq=False)
class TriangulationResult:
    bn: BayesianNetwork
    unnormalized: dict[str, Tensor]
    z: float
    lambdas: dict[str, Tensor]
    tmap: TriangulationMap


def triangulate_mn(mn: MarkovNetwork) -> TriangulationResult:
    """The Bayesian network on the triangulated DAG sharing ``mn``'s joint."""
    z, dist = mn_joint(mn)
    if dist is DEGENERATE:
        raise DegenerateNetworkError("cannot triangulate a degenerate Markov network (Z = 0)")
    tm = triangulation_map(mn.ugraph, mn.max_clique_vertices)
    sets, tensors = mn.sets(), mn.tensors()
    f = {v.label: evaluate(tm.gmap.images[vertex_generator_name(v.label)], sets, tensors) for v in tm.dag.vertices}
    fam = normalize_family(tm.dag, f)
    bn = BayesianNetwork(tm.dag, mn.tau, fam.kernels)
    return TriangulationResult(bn, f, fam.z, fam.lambdas, tm)


def family_product(dag: OrderedDag, sets, f: Mapping[str, Tensor]) -> Tensor:
    """``prod_v f_v(v | pa(v))`` as one tensor over all variables."""
    sig = dag_signature(dag)
    tensors = {vertex_generator_name(lab): t for lab, t in f.items()}
    return evaluate(copy_composition(sig, sig.generator_names), sets, tensors)


def _embedding(small, big) -> GraphHom:
    try:
        return GraphHom(small, big, tuple(range(len(small))))
    except GraphError as exc:  # pragma: no cover - excluded by construction
        raise AssertionError(f"identity on vertices is not an embedding: {exc}") from exc


def tr_mor(bn: BayesianNetwork) -> BayesianNetwork:
    """The same distribution as a network on ``tr(mor(G))``."""
    return triangulate_mn(moralise_bn(bn)).bn


def mor_tr(mn: MarkovNetwork) -> MarkovNetwork:
    """The same distribution as a network on ``mor(tr(H))``."""
    return moralise_bn(triangulate_mn(mn).bn, mn.max_clique_vertices)


def tr_mor_embedding(bn: BayesianNetwork) -> NetworkMorphism:
    """Morphism ``tr_mor(bn) -> bn``: the embedding ``G -> tr(mor(G))`` with identity eta."""
    big = triangulate_graph(moralise_graph(bn.dag))
    return NetworkMorphism(_embedding(bn.dag, big), identity_tensor(joint_sets(bn)))


def mor_tr_embedding(mn: MarkovNetwork) -> NetworkMorphism:
    """Morphism ``mor_tr(mn) -> mn``: the embedding ``H -> mor(tr(H))`` with identity eta."""
    if mn_joint(mn)[1] is DEGENERATE:
        raise DegenerateNetworkError("degenerate Markov networks are not objects of the category")
    big = moralise_graph(triangulate_graph(mn.ugraph))
    return NetworkMorphism(_embedding(mn.ugraph, big), identity_tensor(joint_sets(mn)))


def moralise_morphism(m: NetworkMorphism) -> NetworkMorphism:
    """A morphism of Bayesian networks read between the moralised networks."""
    a = m.alpha
    return NetworkMorphism(GraphHom(moralise_graph(a.source), moralise_graph(a.target), a.mapping), m.eta)


def triangulate_morphism(m: NetworkMorphism) -> NetworkMorphism:
    """A morphism of Markov networks read between the triangulated networks."""
    a = m.alpha
    return NetworkMorphism(GraphHom(triangulate_graph(a.source), triangulate_graph(a.target), a.mapping), m.eta)
