"""Bayesian and Markov networks, their joints, and morphisms between them.

A morphism ``N -> N'`` pairs a graph homomorphism ``alpha`` running the other
way (from the graph of ``N'`` to the graph of ``N``) with a stochastic kernel
``eta`` from the joint variables of ``N`` to those of ``N'`` that carries one
joint distribution onto the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .diagram import (
    clique_generator_name,
    compare_composition,
    copy_composition,
    dag_signature,
    evaluate,
    ugraph_signature,
    vertex_generator_name,
)
from .errors import DegenerateNetworkError, GraphError, PGMError, ShapeMismatchError, StochasticityError
from .graphs import (
    DEFAULT_MAX_CLIQUE_VERTICES,
    GraphHom,
    OrderedDag,
    OrderedUGraph,
    clique_ids,
    hom_compose,
    hom_violations,
    parent_ids,
)
from .semantics import (
    DEGENERATE,
    Distribution,
    FiniteSet,
    StochasticKernel,
    Tensor,
    as_stochastic,
    identity_tensor,
    kernel_compose,
    marginalize,
    normalize_tensor,
)

JOINT_TOL = 1e-9


def _coerce_tau(labels: Sequence[str], tau: Mapping) -> dict[str, FiniteSet]:
    out = {}
    for lab in labels:
        if lab not in tau:
            raise PGMError(f"no finite set for vertex {lab!r}")
        s = tau[lab]
        if not isinstance(s, FiniteSet):
            s = FiniteSet.range(lab, s) if isinstance(s, int) else FiniteSet(lab, tuple(s))
        if s.name != lab:
            s = FiniteSet(lab, s.elements)
        out[lab] = s
    extra = set(tau) - set(labels)
    if extra:
        raise PGMError(f"finite sets given for unknown vertices {sorted(extra)}")
    return out


@dataclass(frozen=True, eq=False)
class BayesianNetwork:
    """A DAG with one stochastic kernel ``f_v(v | pa(v))`` per vertex.

    ``tau`` and ``kernels`` are keyed by vertex label.  ``tau`` values may be
    FiniteSets, element lists or plain cardinalities.
    """

    dag: OrderedDag
    tau: Mapping[str, FiniteSet]
    kernels: Mapping[str, StochasticKernel]

    def __post_init__(self) -> None:
        tau = _coerce_tau(self.dag.labels, self.tau)
        kernels = {}
        for v in self.dag.vertices:
            if v.label not in self.kernels:
                raise PGMError(f"no kernel for vertex {v.label}")
            k = self.kernels[v.label]
            cod = (tau[v.label],)
            dom = tuple(tau[self.dag.vertices[p].label] for p in parent_ids(self.dag, v.id))
            if not isinstance(k, Tensor):
                k = Tensor(cod, dom, k)
            if k.codomain != cod or k.domain != dom:
                raise ShapeMismatchError(
                    f"kernel at {v.label} has type {[s.name for s in k.domain]} -> "
                    f"{[s.name for s in k.codomain]}, expected parents {[s.name for s in dom]}"
                )
            try:
                kernels[v.label] = as_stochastic(k)
            except StochasticityError as exc:
                raise StochasticityError(f"stochasticity violated at vertex {v.label}: {exc}") from None
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "kernels", kernels)

    @property
    def graph(self) -> OrderedDag:
        return self.dag

    def sets(self) -> dict[str, FiniteSet]:
        return dict(self.tau)

    def tensors(self) -> dict[str, StochasticKernel]:
        return {vertex_generator_name(lab): k for lab, k in self.kernels.items()}


@dataclass(frozen=True, eq=False)
class MarkovNetwork:
    """An undirected graph with nonnegative factors on (some of) its cliques.

    ``factors`` is keyed by clique label tuples in vertex order.  Cliques
    without an explicit factor carry the constant-one factor.
    """

    ugraph: OrderedUGraph
    tau: Mapping[str, FiniteSet]
    factors: Mapping[tuple[str, ...], Tensor] = field(default_factory=dict)
    max_clique_vertices: int = DEFAULT_MAX_CLIQUE_VERTICES

    def __post_init__(self) -> None:
        tau = _coerce_tau(self.ugraph.labels, self.tau)
        cliques = set(self.clique_labels())
        factors = {}
        for key, t in self.factors.items():
            key = (key,) if isinstance(key, str) else tuple(key)
            if key not in cliques:
                raise GraphError(f"factor scope {key} is not a clique in vertex order")
            cod = tuple(tau[lab] for lab in key)
            if not isinstance(t, Tensor):
                t = Tensor(cod, (), t)
            if t.codomain != cod or t.domain:
                raise ShapeMismatchError(f"factor on {key} has the wrong type")
            factors[key] = t
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "factors", factors)

    @property
    def graph(self) -> OrderedUGraph:
        return self.ugraph

    def clique_labels(self) -> list[tuple[str, ...]]:
        return [
            tuple(self.ugraph.vertices[i].label for i in c)
            for c in clique_ids(self.ugraph, self.max_clique_vertices)
        ]

    def factor(self, clique: Sequence[str]) -> Tensor:
        key = tuple(clique)
        if key in self.factors:
            return self.factors[key]
        cod = tuple(self.tau[lab] for lab in key)
        return Tensor(cod, (), np.ones(tuple(len(s) for s in cod)))

    def sets(self) -> dict[str, FiniteSet]:
        return dict(self.tau)

    def tensors(self) -> dict[str, Tensor]:
        return {clique_generator_name(c): self.factor(c) for c in self.clique_labels()}


Network = Union[BayesianNetwork, MarkovNetwork]


def bn_joint(bn: BayesianNetwork) -> Distribution:
    """Joint distribution over all variables, in vertex order."""
    sig = dag_signature(bn.dag)
    d = copy_composition(sig, sig.generator_names)
    return evaluate(d, bn.sets(), bn.tensors(), stochastic=True)


def mn_unnormalized(mn: MarkovNetwork) -> Tensor:
    """The product of all clique factors, as one tensor over the variables."""
    sig = ugraph_signature(mn.ugraph, mn.max_clique_vertices)
    d = compare_composition(sig, sig.generator_names)
    return evaluate(d, mn.sets(), mn.tensors())


def mn_joint(mn: MarkovNetwork):
    """``(Z, distribution)``, or ``(0.0, DEGENERATE)`` when the factors multiply to zero."""
    return normalize_tensor(mn_unnormalized(mn))


def joint(net: Network) -> Distribution:
    if isinstance(net, BayesianNetwork):
        return bn_joint(net)
    z, dist = mn_joint(net)
    if dist is DEGENERATE:
        raise DegenerateNetworkError("Markov network is degenerate (Z = 0)")
    return dist


def joint_sets(net: Network) -> tuple[FiniteSet, ...]:
    return tuple(net.tau[lab] for lab in net.graph.labels)


@dataclass(frozen=True, eq=False)
class NetworkMorphism:
    """``alpha`` maps the target's graph to the source's graph; ``eta`` maps
    the source joint to the target joint."""

    alpha: GraphHom
    eta: StochasticKernel


@dataclass(frozen=True)
class MorphismReport:
    passed: bool
    max_deviation: float
    problems: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


def check_morphism(src: Network, dst: Network, m: NetworkMorphism, tol: float = JOINT_TOL) -> MorphismReport:
    """Check that ``m`` is a morphism ``src -> dst``."""
    if type(src) is not type(dst):
        raise ShapeMismatchError("a morphism joins networks of the same kind")
    if m.alpha.source != dst.graph or m.alpha.target != src.graph:
        raise ShapeMismatchError("alpha must map the target network's graph to the source network's graph")
    if m.eta.domain != joint_sets(src) or m.eta.codomain != joint_sets(dst):
        raise ShapeMismatchError("eta must run from the source joint variables to the target joint variables")
    problems = list(hom_violations(m.alpha.source, m.alpha.target, m.alpha.mapping))
    try:
        pushed = kernel_compose(joint(src), m.eta)
        dev = pushed.max_deviation(joint(dst))
    except DegenerateNetworkError as exc:
        return MorphismReport(False, float("inf"), tuple(problems + [str(exc)]))
    if dev > tol:
        problems.append(f"eta does not preserve the joint: max deviation {dev:.3g}")
    return MorphismReport(not problems, dev, tuple(problems))


def identity_morphism(net: Network) -> NetworkMorphism:
    return NetworkMorphism(GraphHom.identity(net.graph), identity_tensor(joint_sets(net)))


def compose_morphisms(first: NetworkMorphism, second: NetworkMorphism) -> NetworkMorphism:
    """``second . first``, component-wise."""
    alpha = hom_compose(second.alpha, first.alpha)
    eta = kernel_compose(first.eta, second.eta)
    return NetworkMorphism(alpha, as_stochastic(eta))


def _marginal_kernel(sets: tuple[FiniteSet, ...], keep: str) -> StochasticKernel:
    names = [s.name for s in sets]
    i = names.index(keep)
    shape = tuple(len(s) for s in sets)
    arr = np.zeros((shape[i],) + shape)
    idx = np.indices(shape)
    arr[(idx[i],) + tuple(idx)] = 1.0
    return StochasticKernel((sets[i],), sets, arr)


def marginalization_morphism(net: Network, v: str):
    """The morphism from ``net`` onto the one-vertex network of the marginal at ``v``.

    Returns ``(target_network, morphism)``; alpha includes the single vertex
    as ``v`` and eta discards every other variable.
    """
    label = net.graph.label(v)
    dist = marginalize(joint(net), [label])
    s = net.tau[label]
    if isinstance(net, BayesianNetwork):
        point = OrderedDag.from_labels([label])
        target: Network = BayesianNetwork(point, {label: s}, {label: StochasticKernel((s,), (), dist.entries)})
    else:
        point = OrderedUGraph.from_labels([label])
        target = MarkovNetwork(point, {label: s}, {(label,): Tensor((s,), (), dist.entries)})
    alpha = GraphHom(point, net.graph, (net.graph.vid(label),))
    return target, NetworkMorphism(alpha, _marginal_kernel(joint_sets(net), label))


def _reveal_anchor(g: OrderedDag, parents: Sequence[int]) -> int:
    start = max(parents) if parents else len(g) - 1
    for q in range(start, len(g)):
        if all(p == q or (p, q) in g.edges for p in parents):
            return q
    raise GraphError(
        "cannot reveal: no vertex q after the parents with every other parent pointing to q, "
        "so the projection back onto the original graph would not be a homomorphism"
    )


def reveal_variable(
    bn: BayesianNetwork,
    new_vertex: str,
    parents: Sequence[str],
    f: StochasticKernel,
):
    """Add a variable ``new_vertex`` drawn from ``f`` given ``parents``.

    The new vertex is placed right after an anchor ``q``: the first vertex at
    or after the largest parent such that every other parent is a parent of
    ``q`` (for parentless reveals, the last vertex).  The projection of the
    new graph onto the old one sends the new vertex to ``q``, which is then
    an order-preserving homomorphism.  Returns ``(new_network, morphism)``
    where the morphism runs from ``bn`` to the new network.
    """
    g = bn.dag
    if new_vertex in g.labels:
        raise GraphError(f"vertex {new_vertex!r} already exists")
    pids = sorted(g.vid(p) for p in parents)
    if len(set(pids)) != len(pids):
        raise GraphError("parents must be distinct")
    q = _reveal_anchor(g, pids)
    old_labels = list(g.labels)
    new_labels = old_labels[: q + 1] + [new_vertex] + old_labels[q + 1:]
    edges = [(g.vertices[a].label, g.vertices[b].label) for a, b in g.sorted_edges()]
    edges += [(g.vertices[p].label, new_vertex) for p in pids]
    g2 = OrderedDag.from_labels(new_labels, edges)

    if len(f.codomain) != 1:
        raise ShapeMismatchError("f must have the new variable as its single output")
    tau = dict(bn.tau)
    tau[new_vertex] = FiniteSet(new_vertex, f.codomain[0].elements)
    dom = tuple(bn.tau[g.vertices[p].label] for p in pids)
    if tuple(s.elements for s in f.domain) != tuple(s.elements for s in dom):
        raise ShapeMismatchError("f must take the parents (in vertex order) as inputs")
    new_set = tau[new_vertex]
    kernel = StochasticKernel((new_set,), dom, f.entries)
    kernels = dict(bn.kernels)
    kernels[new_vertex] = kernel
    bn2 = BayesianNetwork(g2, tau, kernels)

    mapping = tuple(q if lab == new_vertex else g.vid(lab) for lab in new_labels)
    alpha = GraphHom(g2, g, mapping)

    # eta(x', y | x) = [x' = x] f(y | x_pa)
    n_old = len(old_labels)
    out_code = {lab: i for i, lab in enumerate(new_labels)}
    in_code = {lab: len(new_labels) + i for i, lab in enumerate(old_labels)}
    operands = []
    for lab in old_labels:
        operands += [np.eye(len(bn.tau[lab])), [out_code[lab], in_code[lab]]]
    operands += [kernel.entries, [out_code[new_vertex]] + [in_code[g.vertices[p].label] for p in pids]]
    arr = np.einsum(*operands, list(range(len(new_labels) + n_old)))
    eta = StochasticKernel(joint_sets(bn2), joint_sets(bn), arr)
    return bn2, NetworkMorphism(alpha, eta)


@dataclass(frozen=True)
class FactorizationReport:
    passed: bool
    max_deviation: float
    message: str = ""

    def __bool__(self) -> bool:
        return self.passed


def verify_factorization(omega: Distribution, net: Network, tol: float = JOINT_TOL) -> FactorizationReport:
    """Does ``net`` factorise ``omega``?

    For a Bayesian network the joint must equal ``omega``; for a Markov
    network the factor product need only be proportional to it, so the
    normalised joint is compared.
    """
    names = tuple(s.name for s in omega.codomain)
    if names != net.graph.labels or omega.codomain != joint_sets(net):
        raise ShapeMismatchError(f"distribution variables {names} do not match network vertices {net.graph.labels}")
    if isinstance(net, MarkovNetwork):
        z, dist = mn_joint(net)
        if dist is DEGENERATE:
            return FactorizationReport(False, float("inf"), "network is degenerate")
    else:
        dist = bn_joint(net)
    dev = dist.max_deviation(omega)
    return FactorizationReport(dev <= tol, dev, f"max deviation {dev:.3g}")


def bn_from_tables(
    labels: Sequence[str],
    edges,
    cards: Mapping[str, int],
    tables: Mapping[str, np.ndarray],
) -> BayesianNetwork:
    """Build a network from arrays laid out as ``(v, *pa(v))``."""
    dag = OrderedDag.from_labels(labels, edges)
    tau = {lab: FiniteSet.range(lab, cards[lab]) for lab in labels}
    return BayesianNetwork(dag, tau, dict(tables))


def mn_from_tables(
    labels: Sequence[str],
    edges,
    cards: Mapping[str, int],
    tables: Mapping[tuple[str, ...], np.ndarray],
) -> MarkovNetwork:
    h = OrderedUGraph.from_labels(labels, edges)
    tau = {lab: FiniteSet.range(lab, cards[lab]) for lab in labels}
    return MarkovNetwork(h, tau, dict(tables))

