# A first look at conflict-free colorings of small set systems.
from cfchroma import PartialColoring, SetSystem, chi, chi_cf, is_cf, is_weak_cf, unique_color_set, wchi_cf
from cfchroma.generators import complete_graph

# A set system is a ground size plus a tuple of edges (sorted vertex tuples).
s = SetSystem.from_edges(5, [[0, 1, 2], [2, 3, 4], [0, 4]])
print(s.edges)

# A coloring is a palette size and a partial vertex -> color map.
f = PartialColoring(3, {0: 0, 1: 0, 2: 1, 3: 2, 4: 2})

# I_f(A) is the set of colors that occur exactly once on A.
for i in range(len(s.edges)):
    print(i, s.edges[i], unique_color_set(s, f, i))

# The strict check wants every vertex colored; the report lists offending edges.
rep = is_cf(s, f)
print("conflict-free:", rep.ok, "violations:", rep.violations)

# Weak colorings may leave vertices blank; blanks never count.
g = PartialColoring(2, {2: 0, 4: 1})
print("weak conflict-free:", is_weak_cf(s, g).ok)

# Exact values.  For graphs (all edges of size 2) CF coloring is proper coloring,
# while the weak version can save a color by leaving a vertex blank.
k4 = complete_graph(4)
print("K4:", chi(k4), chi_cf(k4), wchi_cf(k4))

# The sandwich chi <= chi_CF <= wchi_CF + 1 holds on every instance.
for system in (s, k4):
    a, b, c = chi(system), chi_cf(system), wchi_cf(system)
    print(a, "<=", b, "<=", c + 1, a <= b <= c + 1)
