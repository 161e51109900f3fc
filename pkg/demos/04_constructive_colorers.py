# Constructive weak colorings that add one colored vertex per edge at most.
import random

from cfchroma import ExtensionProblem, PartialColoring, SetSystem, is_weak_cf
from cfchroma.colorers import (
    cf_bound,
    disjointify_color,
    extend_ind0,
    find_layering,
    greedy_max_color,
    layered_extend,
)
from cfchroma.generators import random_system
from cfchroma.solver import WEAK

rng = random.Random(5)

# Greedy by maxima: the top vertex of every edge gets a fresh color.
s = random_system(rng, 16, 6, sizes=(3, 4), mu=2)
res = greedy_max_color(s, {0: {0}}, 8)
print(res.coloring.assignment, res.witness)

# Disjointify: color each edge's new part; the table bounds what is missing.
for row in disjointify_color(s, 3).table:
    print(row)

# extend_ind0 on well spread edges: two colors, one pre-colored point per edge.
edges = [list(range(10 * i, 10 * i + 10)) for i in range(4)]
edges[1][0] = 0  # edges 0 and 1 share vertex 0
system = SetSystem.from_edges(40, edges)
fixed = PartialColoring(2, {0: 1, 25: 0})
out = extend_ind0(ExtensionProblem(system, fixed, 2, spill_bound=1, mode=WEAK), d=2)
print("chosen (vertex, color) per edge:", out.chosen)
print("weak CF:", is_weak_cf(system, out.coloring).ok)

# Layered systems: each block only reaches back into earlier blocks once.
blocks = [SetSystem.from_edges(12, [range(0, 6), range(6, 12)])]
later = SetSystem.from_edges(24, [list(range(12, 18)) + [3], list(range(18, 24)) + [9]])
system = SetSystem.from_edges(24, list(blocks[0].edges) + list(later.edges))
layering = find_layering(system, d=2)
print("blocks:", len(layering.blocks), "spill:", layering.spill)
x = cf_bound(layering.depth, 2, 0)
f = layered_extend(system, layering, x, d=2)
print("palette", x, "weak CF:", is_weak_cf(system, f).ok)
