import itertools
from math import comb

import pytest

from cfchroma import ADParams, ExtensionProblem, PartialColoring, SetSystem, is_almost_disjoint, is_cf
from cfchroma.core import dumps, system_to_dict
from cfchroma.generators import (
    GadgetError,
    check_grid_conditions,
    complete_graph,
    gen_affine_lines,
    gen_grid_gadget,
    gen_lift0,
    gen_product_gadget,
    gen_quad,
    gen_union,
    n_transversals,
    product_counts,
    product_face_counts,
    rank_subset,
    refute_product_coloring,
    unrank_subset,
    ProductParams,
)
from cfchroma.solver import INFEASIBLE, feasible_cf, solve_chi


# -- quad ---------------------------------------------------------------------------

def test_quad_four():
    assert gen_quad(4).edges == ((0, 1, 2, 3),)


def test_quad_six_count():
    assert len(gen_quad(6).edges) == 9


@pytest.mark.parametrize("m", [4, 6, 8])
def test_quad_two_colorable(m):
    assert solve_chi(gen_quad(m)).optimum == 2


def test_quad_edges_balanced():
    for e in gen_quad(9).edges:
        assert sum(v % 2 for v in e) == 2


def test_quad_small():
    with pytest.raises(GadgetError):
        gen_quad(3)


# -- product gadget -----------------------------------------------------------------

def test_product_is_k4():
    assert gen_product_gadget(4, 2, 1, 2) == complete_graph(4)


def test_product_six_three():
    s = gen_product_gadget(6, 3, 1, 3)
    assert s.ground_size == comb(6, 2) == 15
    assert len(s.edges) == comb(6, 3) == 20
    assert set(s.edge_sizes()) == {3}
    assert is_almost_disjoint(s, ADParams(2))[0]


@pytest.mark.parametrize("lam,n,k,t", [(5, 3, 2, 4), (5, 3, 2, 5), (6, 3, 2, 6), (5, 4, 2, 5), (7, 3, 3, 7)])
def test_product_contract(lam, n, k, t):
    s = gen_product_gadget(lam, n, k, t)
    assert is_almost_disjoint(s, ADParams(k + 1))[0]
    assert set(s.edge_sizes()) == {t}
    for i in range(len(s.edges)):
        assert 1 not in product_face_counts(s, i)


def test_product_counts_never_one():
    for k in range(1, 5):
        for n in range(2, 6):
            for t in range(k + 1, n * k + 1):
                p = ProductParams(n + 2, n, k, t)
                try:
                    p.validate()
                except GadgetError:
                    continue
                counts = product_counts(p)
                assert sum(counts) == t and 1 not in counts and max(counts) <= n


@pytest.mark.parametrize("args", [(6, 1, 1, 2), (6, 3, 2, 2), (6, 2, 1, 3), (2, 3, 1, 2)])
def test_product_bad_params(args):
    with pytest.raises(GadgetError):
        gen_product_gadget(*args)


def test_rank_roundtrip():
    for size in range(4):
        subsets = list(itertools.combinations(range(7), size))
        assert [rank_subset(s, 7) for s in subsets] == list(range(len(subsets)))
        assert [unrank_subset(r, 7, size) for r in range(len(subsets))] == subsets


def test_refute_constant():
    s = gen_product_gadget(6, 3, 1, 3)
    ref = refute_product_coloring(s, PartialColoring(2, {v: 0 for v in range(15)}))
    assert ref.Y == (0, 1, 2)
    assert not is_cf(SetSystem(s.ground_size, (s.edges[ref.edge_index],)),
                     PartialColoring(2, {v: 0 for v in range(15)})).ok


def test_refute_every_two_coloring():
    # exhaustive over all 2^15 colorings of the pair set of a 6-set
    s = gen_product_gadget(6, 3, 1, 3)
    for bits in range(1 << 15):
        f = PartialColoring(2, {v: bits >> v & 1 for v in range(15)})
        ref = refute_product_coloring(s, f)
        assert ref is not None
        assert all(n >= 2 for n in ref.counts.values())


def test_refute_pentagon_coloring_none():
    s = gen_product_gadget(5, 3, 1, 3)
    # pair {a, b} is red iff a and b are adjacent on the 5-cycle
    f = {}
    for B in itertools.combinations(range(5), 2):
        f[rank_subset(B, 5)] = int((B[1] - B[0]) % 5 in (1, 4))
    assert refute_product_coloring(s, PartialColoring(2, f)) is None


def test_refute_family_mismatch():
    with pytest.raises(GadgetError):
        refute_product_coloring(gen_affine_lines(3), PartialColoring(2, {v: 0 for v in range(9)}))


def test_refute_needs_total():
    with pytest.raises(GadgetError):
        refute_product_coloring(gen_product_gadget(6, 3, 1, 3), PartialColoring(2, {0: 0}))


def test_product_six_not_two_colorable():
    s = gen_product_gadget(6, 3, 1, 3)
    assert feasible_cf(ExtensionProblem.free(s, 2)).verdict == INFEASIBLE


# -- affine planes --------------------------------------------------------------------

@pytest.mark.parametrize("q,lines", [(2, 6), (3, 12), (5, 30)])
def test_affine_counts(q, lines):
    s = gen_affine_lines(q)
    assert s.ground_size == q * q
    assert len(s.edges) == lines == q * q + q
    assert set(s.edge_sizes()) == {q}
    assert is_almost_disjoint(s, ADParams(2))[0]


def test_affine_two_points_one_line():
    s = gen_affine_lines(5)
    for a, b in itertools.combinations(range(25), 2):
        assert sum(1 for e in s.edges if a in e and b in e) == 1


def test_affine_non_prime():
    with pytest.raises(GadgetError):
        gen_affine_lines(4)


# -- grid gadget ---------------------------------------------------------------------

def test_grid_shape():
    s, c = gen_grid_gadget(4, 6)
    assert len(s.edges) == s.meta["lines"] == 136
    assert len(c.assignment) == s.meta["extra_points"] == 4 * 136
    assert s.ground_size == 24 + 544
    assert c.palette == 3
    assert is_almost_disjoint(s, ADParams(2))[0]


def test_grid_conditions():
    s, c = gen_grid_gadget(4, 6)
    res = check_grid_conditions(s, c)
    assert res["ok"], res


def test_grid_condition_checker_catches_recolor():
    s, c = gen_grid_gadget(4, 6)
    v = min(c.assignment)
    bad = PartialColoring(3, {**c.assignment, v: (c[v] + 1) % 3})
    assert not check_grid_conditions(s, bad)["ok"]


def test_grid_not_extendable():
    s, c = gen_grid_gadget(4, 6)
    assert feasible_cf(ExtensionProblem(s, c, 3)).verdict == INFEASIBLE


def test_grid_lines_are_geometric():
    s, _ = gen_grid_gadget(4, 6)
    grid_traces = {tuple(v for v in e if v < 24) for e in s.edges}
    assert len(grid_traces) == 136
    assert all(len(t) >= 2 for t in grid_traces)


# -- lift and union --------------------------------------------------------------------

def test_lift_single_edge():
    s = gen_lift0(SetSystem(2, ((0, 1),)), 1)
    assert s.ground_size == 4
    assert s.edges[:2] == ((0, 1), (2, 3))
    assert len(s.edges) == 2 + 4


def test_lift_affine():
    base = gen_affine_lines(3)
    s = gen_lift0(base, 2)
    assert s.ground_size == 36
    assert len(s.edges) == 4 * 12 + 9**4 == 4 * 12 + n_transversals(base, 2)
    assert is_almost_disjoint(s, ADParams(4))[0]


def test_lift_cap_and_sample():
    base = gen_affine_lines(3)
    with pytest.raises(GadgetError):
        gen_lift0(base, 2, cap=100)
    s = gen_lift0(base, 2, cap=100, sample=50, seed=1)
    assert len(s.edges) == 48 + 50
    assert s == gen_lift0(base, 2, cap=100, sample=50, seed=1)


def test_lift_needs_ad_base():
    with pytest.raises(GadgetError):
        gen_lift0(SetSystem(4, ((0, 1, 2), (0, 1, 3))), 1)


def test_union():
    k4 = complete_graph(4)
    assert gen_union([k4]) == k4
    u = gen_union([k4, k4])
    assert u.ground_size == 8 and len(u.edges) == 12


# -- determinism ----------------------------------------------------------------------

@pytest.mark.parametrize("make", [
    lambda: gen_quad(7),
    lambda: gen_product_gadget(6, 3, 1, 3),
    lambda: gen_affine_lines(5),
    lambda: gen_grid_gadget(4, 6)[0],
    lambda: gen_lift0(gen_affine_lines(2), 1),
])
def test_generators_byte_identical(make):
    assert dumps(system_to_dict(make())) == dumps(system_to_dict(make()))
