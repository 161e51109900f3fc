# Product gadgets: colorings that look the same on every face of some Y fail.
import random

from cfchroma import ExtensionProblem, PartialColoring, feasible_cf
from cfchroma.generators import complete_graph, gen_product_gadget, rank_subset, refute_product_coloring

# With lambda=4, n=2, k=1, t=2 the gadget is just the complete graph K4.
print(gen_product_gadget(4, 2, 1, 2) == complete_graph(4))

# lambda=6, n=3: vertices are the 15 pairs of {0..5}, edges the 20 triangles.
g = gen_product_gadget(6, 3, 1, 3)
print(g.ground_size, "vertices,", len(g.edges), "edges")

# Any 2-coloring of the pairs has a monochromatic triangle (R(3,3) = 6), and
# the edge of that triangle sees each color 0 or at least 2 times.
rng = random.Random(0)
f = PartialColoring(2, {v: rng.randrange(2) for v in range(g.ground_size)})
ref = refute_product_coloring(g, f)
print("homogeneous Y:", ref.Y, "color counts on its edge:", ref.counts)

# So the exact solver finds no conflict-free 2-coloring.
print(feasible_cf(ExtensionProblem.free(g, 2)).verdict)

# On five points the pentagon/pentagram split avoids monochromatic triangles.
g5 = gen_product_gadget(5, 3, 1, 3)
pent = {rank_subset(B, 5): int((B[1] - B[0]) % 5 in (1, 4))
        for B in [(a, b) for a in range(5) for b in range(a + 1, 5)]}
print("refutation on K5:", refute_product_coloring(g5, PartialColoring(2, pent)))
