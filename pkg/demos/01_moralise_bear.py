"""Burglary, earthquake, alarm, radio report: a Bayesian network moralised."""
from pathlib import Path

from pgmfunctor import fileformat
from pgmfunctor.graphs import to_dot
from pgmfunctor.network import bn_joint, mn_joint
from pgmfunctor.transform import moralisation_map, moralise_bn

bn = fileformat.load(Path(__file__).parent / "data" / "bear.json")
print(to_dot(bn.dag, "bear"))

# B and E share the child A, so moralisation marries them
mn = moralise_bn(bn)
print(to_dot(mn.ugraph, "moral"))

# the family clique {B, E, A} carries the alarm's kernel; {B, A} is left at one
for clique, table in mn.factors.items():
    print(clique, table.entries.ravel().round(4))

# images of the clique generators under the syntax-level map
mm = moralisation_map(bn.dag)
for name, img in mm.gmap.images.items():
    print(name, "->", [o.generator for o in img.occurrences] or "omni")

z, dist = mn_joint(mn)
print("Z =", z)
print("max deviation from the Bayesian joint:", dist.max_deviation(bn_joint(bn)))

# the joint has axes B, E, A, R; the report says nothing about burglary
p = dist.entries
print("P(burglary)          =", round(float(p[0].sum()), 6))
print("P(burglary | report) =", round(float(p[0, :, :, 0].sum() / p[:, :, :, 0].sum()), 6))
print("P(burglary | alarm)  =", round(float(p[0, :, 0].sum() / p[:, :, 0].sum()), 6))
