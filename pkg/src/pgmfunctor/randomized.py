"""Seeded random graphs, networks and homomorphisms for property checks."""
from __future__ import annotations

import itertools

import numpy as np

from .graphs import GraphHom, OrderedDag, OrderedUGraph, clique_ids, parent_ids
from .network import BayesianNetwork, MarkovNetwork, mn_unnormalized
from .semantics import FiniteSet, StochasticKernel, Tensor

LABELS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _labels(n: int) -> list[str]:
    return [LABELS[i] if n <= len(LABELS) else f"X{i}" for i in range(n)]


def random_dag(rng: np.random.Generator, n: int, p: float = 0.5) -> OrderedDag:
    labels = _labels(n)
    edges = [(labels[a], labels[b]) for a, b in itertools.combinations(range(n), 2) if rng.random() < p]
    return OrderedDag.from_labels(labels, edges)


def random_ugraph(rng: np.random.Generator, n: int, p: float = 0.5) -> OrderedUGraph:
    labels = _labels(n)
    edges = [(labels[a], labels[b]) for a, b in itertools.combinations(range(n), 2) if rng.random() < p]
    return OrderedUGraph.from_labels(labels, edges)


def _random_sets(rng, labels, max_card):
    return {lab: FiniteSet.range(lab, int(rng.integers(1, max_card + 1))) for lab in labels}


def random_bn(
    rng: np.random.Generator, n: int | None = None, max_vertices: int = 5, max_card: int = 3, p: float = 0.5,
    zero_prob: float = 0.0,
) -> BayesianNetwork:
    """A random network; ``zero_prob`` sprinkles exact zeros into the tables."""
    if n is None:
        n = int(rng.integers(1, max_vertices + 1))
    g = random_dag(rng, n, p)
    tau = _random_sets(rng, g.labels, max_card)
    kernels = {}
    for v in g.vertices:
        cod = (tau[v.label],)
        dom = tuple(tau[g.vertices[q].label] for q in parent_ids(g, v.id))
        shape = tuple(len(s) for s in cod + dom)
        arr = rng.random(shape)
        if zero_prob:
            arr = np.where(rng.random(shape) < zero_prob, 0.0, arr)
            arr[0] += np.where(arr.sum(axis=0) == 0, 1.0, 0.0)
        arr = arr / arr.sum(axis=0, keepdims=True)
        kernels[v.label] = StochasticKernel(cod, dom, arr)
    return BayesianNetwork(g, tau, kernels)


def random_mn(
    rng: np.random.Generator, n: int | None = None, max_vertices: int = 5, max_card: int = 3, p: float = 0.5,
    zero_prob: float = 0.0, keep_prob: float = 0.8,
) -> MarkovNetwork:
    """A random non-degenerate Markov network with factors in ``[0, 1)``.

    Each clique gets an explicit factor with probability ``keep_prob``.
    """
    if n is None:
        n = int(rng.integers(1, max_vertices + 1))
    h = random_ugraph(rng, n, p)
    tau = _random_sets(rng, h.labels, max_card)
    while True:
        factors = {}
        for c in clique_ids(h):
            if rng.random() >= keep_prob:
                continue
            labels = tuple(h.vertices[i].label for i in c)
            cod = tuple(tau[lab] for lab in labels)
            shape = tuple(len(s) for s in cod)
            arr = rng.random(shape)
            if zero_prob:
                arr = np.where(rng.random(shape) < zero_prob, 0.0, arr)
            factors[labels] = Tensor(cod, (), arr)
        mn = MarkovNetwork(h, tau, factors)
        if float(mn_unnormalized(mn).entries.sum()) > 0:
            return mn


def _random_monotone(rng, n: int, m: int) -> tuple[int, ...]:
    return tuple(sorted(int(x) for x in rng.integers(0, m, size=n)))


def random_hom_from(rng: np.random.Generator, g, m: int, p: float = 0.4) -> GraphHom:
    """A random order-preserving homomorphism out of ``g`` onto an ``m``-vertex
    graph containing the image edges plus random extra edges."""
    mapping = _random_monotone(rng, len(g), m)
    labels = [f"{lab}'" for lab in _labels(m)]
    image = set()
    for e in g.edges:
        a, b = sorted(e) if isinstance(g, OrderedUGraph) else e
        x, y = mapping[a], mapping[b]
        if x != y:
            image.add((x, y))
    for x, y in itertools.combinations(range(m), 2):
        if rng.random() < p:
            image.add((x, y))
    edges = [(labels[x], labels[y]) for x, y in sorted(image)]
    target = type(g).from_labels(labels, edges)
    return GraphHom(g, target, mapping)


def random_composable_pair(rng: np.random.Generator, kind: str, max_vertices: int = 4):
    """``(alpha, beta)`` with ``alpha: G1 -> G2`` and ``beta: G2 -> G3``."""
    n1 = int(rng.integers(1, max_vertices + 1))
    g1 = random_dag(rng, n1) if kind == "dag" else random_ugraph(rng, n1)
    alpha = random_hom_from(rng, g1, int(rng.integers(1, max_vertices + 1)))
    beta = random_hom_from(rng, alpha.target, int(rng.integers(1, max_vertices + 1)))
    # relabel beta's target so labels stay distinct from the other graphs
    g3 = beta.target
    g3 = type(g3).from_labels(
        [lab + "'" for lab in g3.labels],
        [(g3.vertices[a].label + "'", g3.vertices[b].label + "'") for a, b in g3.sorted_edges()],
    )
    beta = GraphHom(alpha.target, g3, beta.mapping)
    return alpha, beta
