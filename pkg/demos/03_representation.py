"""
Building a representation step by step
======================================

Nodes are joined by ultrafilter labels.  Each pair of nodes is scheduled once;
its demands are witnessed by an existing node or by a new one whose remaining
edges get blur colours.
"""
import numpy as np

from blowblur.blowup import blur_structure
from blowblur.finite_ra import make_M
from blowblur.representation import default_generators, graph_violations, new_graph, rep, saturate, verify_representation
from blowblur.symbolic import BlurFilter, full_blur, random_element

spec = blur_structure(make_M(list("ABCDEF")))
gens = default_generators(spec)
g = saturate(new_graph(spec), spec, gens, 150)
print(g.n, "nodes,", len(g.labels), "labels in use,", len(g.dequeued), "defects dequeued")
print(g.step_log[0])
print("graph conditions:", graph_violations(g) or "all hold")

n_blur = sum(isinstance(L, BlurFilter) for L in g.labels)
print(n_blur, "blur colours appear")

w = next(L.blur for L in g.labels if isinstance(L, BlurFilter))
print("|rep(E^W)| =", len(rep(g, full_blur(w))))

rng = np.random.default_rng(0)
sample = gens[:12] + [random_element(spec, rng) for _ in range(8)]
r = verify_representation(g, sample)
print("violations:", len(r.violations), " pending (unfinished witnesses):", r.pending)
