"""The four-student misconception network turned into a Bayesian network."""
from pathlib import Path

import numpy as np

from pgmfunctor import fileformat
from pgmfunctor.network import bn_joint, mn_joint
from pgmfunctor.oracle import brute_family_product
from pgmfunctor.transform import triangulate_mn

mn = fileformat.load(Path(__file__).parent / "data" / "misconception.json")
res = triangulate_mn(mn)
dag = res.bn.dag
print("edges:", [(dag.label(a), dag.label(b)) for a, b in dag.sorted_edges()])

# which cliques each vertex's tensor is built from
for v, block in res.tmap.partition.items():
    print(v, "<-", block)

# unnormalised tensors, then the sweep's constant and kernels
for v in dag.labels:
    print(f"f_{v}", res.unnormalized[v].entries.ravel())
print("Z =", res.z)
for v in reversed(dag.labels):
    k = res.bn.kernels[v]
    print(f"g_{v}({v.lower()} | {','.join(s.name for s in k.domain)})", k.entries[0].ravel().round(5))

z, dist = mn_joint(mn)
print("MN constant agrees:", np.isclose(z, res.z))
print("max joint deviation:", bn_joint(res.bn).max_deviation(dist))

sets = mn.sets()
lhs = brute_family_product(dag, sets, res.unnormalized)
rhs = res.z * brute_family_product(dag, sets, res.bn.kernels)
print("sweep identity gap:", np.abs(lhs - rhs).max())
