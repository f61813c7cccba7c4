"""Morphisms of networks: marginalising, revealing a variable, and the embeddings."""
from pathlib import Path

import numpy as np

from pgmfunctor import fileformat
from pgmfunctor.network import check_morphism, marginalization_morphism, reveal_variable
from pgmfunctor.semantics import FiniteSet, StochasticKernel
from pgmfunctor.transform import mor_tr, mor_tr_embedding, moralise_bn, moralise_morphism, tr_mor, tr_mor_embedding

data = Path(__file__).parent / "data"
bear = fileformat.load(data / "bear.json")
misconception = fileformat.load(data / "misconception.json")

# forgetting the radio is a morphism onto the smaller network
smaller, m = marginalization_morphism(bear, "R")
print("drop R:", check_morphism(bear, smaller, m))
print("  and after moralising both sides:", check_morphism(moralise_bn(bear), moralise_bn(smaller), moralise_morphism(m)))

# a neighbour phoning in, depending on the alarm only
call = FiniteSet("N", ("calls", "silent"))
kernel = StochasticKernel((call,), (bear.tau["A"],), np.array([[0.7, 0.05], [0.3, 0.95]]))
bigger, m = reveal_variable(bear, "N", ["A"], kernel)
print("reveal N:", bigger.dag.labels, check_morphism(bear, bigger, m))

# the round trips only ever add edges
for net, big, emb in [(bear, tr_mor(bear), tr_mor_embedding(bear)),
                      (misconception, mor_tr(misconception), mor_tr_embedding(misconception))]:
    report = check_morphism(big, net, emb)
    print(type(net).__name__, len(net.graph.edges), "->", len(big.graph.edges), "edges;", report)
