"""Syntax first: generators, copy-composition and the maps graph morphisms induce."""
import numpy as np

from pgmfunctor.diagram import (
    cdsyn_hom,
    compare_composition,
    copy_composition,
    dag_signature,
    evaluate,
    generator_diagram,
    graph_of,
    random_semantics,
    semantic_deviation,
    substitute,
)
from pgmfunctor.graphs import GraphHom, OrderedDag, hom_compose

g = OrderedDag.from_labels("ABC", [("A", "B"), ("B", "C")])
sig = dag_signature(g)
print(sig.generators)

# sharing each variable's wire gives the joint of the chain
chain = copy_composition(sig, sig.generator_names)
print(chain.dump())

sets, tensors = random_semantics(sig, np.random.default_rng(0))
joint = evaluate(chain, sets, tensors, stochastic=True)
print("joint sums to", joint.entries.sum())

# bending inputs round commutes with the composition
lhs = graph_of(chain)
rhs = compare_composition(sig.hypergraph(), [graph_of(generator_diagram(sig, n)) for n in sig.generator_names])
print("graph/copy identity gap:", semantic_deviation(lhs, rhs, stochastic=True))

# collapse B and C onto one vertex, then everything onto a point
g2 = OrderedDag.from_labels(["A'", "BC'"], [("A'", "BC'")])
alpha = GraphHom(g, g2, (0, 1, 1))
beta = GraphHom.contraction(g2)
direct = cdsyn_hom(hom_compose(alpha, beta))
first, second = cdsyn_hom(beta), cdsyn_hom(alpha)
for name, img in direct.images.items():
    via = substitute(first.images[name], second)
    print(name, "functoriality gap:", semantic_deviation(img, via))
