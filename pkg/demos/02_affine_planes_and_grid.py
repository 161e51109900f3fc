# Lines of small affine planes, and a 3-coloring that cannot be completed.
from cfchroma import ADParams, ExtensionProblem, brute_oracle, feasible_cf, is_almost_disjoint
from cfchroma.generators import check_grid_conditions, gen_affine_lines, gen_grid_gadget
from cfchroma.solver import WEAK, solve_chi_cf, solve_wchi_cf

# AG(2, q) has q^2 points and q^2 + q lines; two lines meet in at most one point.
for q in (2, 3, 5):
    plane = gen_affine_lines(q)
    ok, _ = is_almost_disjoint(plane, ADParams(2))
    print(f"q={q}: {plane.ground_size} points, {len(plane.edges)} lines, 2-almost disjoint: {ok}")

# Exact values from the search engine.  q=3 is small enough to double check
# by enumerating every coloring of the nine points.
for q in (3, 5):
    plane = gen_affine_lines(q)
    print(q, "chi_CF =", solve_chi_cf(plane).optimum, "wchi_CF =", solve_wchi_cf(plane).optimum)
plane = gen_affine_lines(3)
print("oracle, weak palette 2:", brute_oracle(ExtensionProblem.free(plane, 2, WEAK)).verdict)
print("oracle, weak palette 3:", brute_oracle(ExtensionProblem.free(plane, 3, WEAK)).verdict)

# The grid gadget: all lines through at least two points of a 4 x 6 grid, each
# line extended by four extra points that carry a fixed color pattern.
system, c = gen_grid_gadget(4, 6)
print(len(system.edges), "lines,", len(c.assignment), "pre-colored points")
print(check_grid_conditions(system, c))

# No 3-coloring of the 24 grid points completes c to a conflict-free coloring.
res = feasible_cf(ExtensionProblem(system, c, 3))
print(res.verdict, res.stats)
