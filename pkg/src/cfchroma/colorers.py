"""Constructive colorings with certificates.

Each procedure either returns a coloring that has been re-checked with the
verifiers in :mod:`cfchroma.core`, or raises :class:`ColoringFailure`
naming the vertex, edge or block that blocked it.  Finite instances can run
out of room where the infinite arguments always have some, so failing
loudly is part of the contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import (
    ADParams,
    CFError,
    EDDecomposition,
    PartialColoring,
    SetSystem,
    color_counts,
    is_almost_disjoint,
    is_weak_cf,
    is_witness,
    restrict,
    verify_ed,
)
from .solver import WEAK, ExtensionProblem


class ColoringFailure(CFError):
    """A constructive procedure could not continue.

    ``where`` names the blocking object, e.g. ``("vertex", 7)`` or
    ``("edge", 3)``.
    """

    def __init__(self, message: str, where: tuple | None = None):
        super().__init__(message)
        self.where = where


def cf_bound(m: int, d: int, k: int = 0) -> int:
    """Palette size that suffices for m stepping-up levels over d-almost disjoint edges."""
    return ((m + 1) * (d - 1) + k + 1) // 2 + 1


# -- greedy coloring by maximal elements ----------------------------------------------

@dataclass
class GreedyResult:
    coloring: PartialColoring
    witness: dict[int, int]  # edge index -> color of its max vertex


def greedy_max_color(system: SetSystem, avoid: Mapping[int, Iterable[int]] | None,
                     palette: int, total: bool = False) -> GreedyResult:
    """Injective coloring in vertex order so that f(max A) is unique on A and avoids g(A).

    By default only vertices that are the maximum of some edge are colored,
    which is all the witness property needs.  ``total=True`` colors every
    vertex of the support injectively.
    """
    avoid = {i: frozenset(g) for i, g in (avoid or {}).items()}
    for i, g in avoid.items():
        if not 0 <= i < len(system.edges):
            raise ValueError(f"avoid map names unknown edge {i}")
        if any(not 0 <= c < palette for c in g):
            raise ValueError(f"avoid set of edge {i} leaves the palette")
    tops: dict[int, list[int]] = {}
    for i, e in enumerate(system.edges):
        tops.setdefault(e[-1], []).append(i)
    verts = sorted(system.support) if total else sorted(tops)
    used: set[int] = set()
    assign: dict[int, int] = {}
    for v in verts:
        banned = set(used)
        for i in tops.get(v, ()):
            banned |= avoid.get(i, frozenset())
        color = next((c for c in range(palette) if c not in banned), None)
        if color is None:
            raise ColoringFailure(f"palette {palette} exhausted at vertex {v}", ("vertex", v))
        assign[v] = color
        used.add(color)
    f = PartialColoring(palette, assign)
    witness = {}
    for i, e in enumerate(system.edges):
        c = assign[e[-1]]
        if c in avoid.get(i, ()) or color_counts(e, f).get(c) != 1:
            raise AssertionError(f"greedy witness failed on edge {i}")
        witness[i] = c
    return GreedyResult(f, witness)


# -- disjointify -------------------------------------------------------------------

@dataclass
class DisjointifyResult:
    coloring: PartialColoring
    table: list[dict]  # per edge: overlap, fresh, deficiency, bound


def disjointify_color(system: SetSystem, palette: int) -> DisjointifyResult:
    """Color each edge's fresh part (vertices unseen in earlier edges) with distinct colors.

    The first ``palette`` fresh vertices of an edge get colors 0, 1, ...;
    further fresh vertices stay uncolored so they cannot spoil a color.
    An edge then misses at most one color per vertex it shares with
    earlier edges, plus the colors its fresh part was too small to reach:
    ``deficiency <= overlap + max(0, palette - fresh)``.
    """
    if palette < 1:
        raise ValueError("palette must be positive")
    seen: set[int] = set()
    assign: dict[int, int] = {}
    rows = []
    for e in system.edges:
        fresh = [v for v in e if v not in seen]
        for c, v in enumerate(fresh[:palette]):
            assign[v] = c
        seen.update(e)
        rows.append({"overlap": len(e) - len(fresh), "fresh": len(fresh)})
    f = PartialColoring(palette, assign)
    for row, e in zip(rows, system.edges):
        counts = color_counts(e, f)
        unique = {c for c, n in counts.items() if n == 1}
        row["deficiency"] = palette - len(unique)
        row["bound"] = row["overlap"] + max(0, palette - row["fresh"])
        if row["deficiency"] > row["bound"]:
            raise AssertionError("disjointify deficiency exceeds its bound")
    return DisjointifyResult(f, rows)


# -- essential disjointness and witnesses ---------------------------------------------

def ed_decompose(system: SetSystem) -> EDDecomposition:
    """Greedy sweep in edge order: F(A) is the part of A already claimed by earlier remainders.

    Raises :class:`ColoringFailure` when some remainder would be empty; that
    only says this order fails, not that the system is not ED.
    """
    claimed: set[int] = set()
    removed = []
    for i, e in enumerate(system.edges):
        F = frozenset(v for v in e if v in claimed)
        if len(F) == len(e):
            raise ColoringFailure(f"edge {i} has no unclaimed vertex left", ("edge", i))
        claimed.update(v for v in e if v not in F)
        removed.append(F)
    ed = EDDecomposition(tuple(removed))
    ok, _ = verify_ed(system, ed)
    assert ok
    return ed


def find_witness(system: SetSystem, tau: int) -> frozenset[int]:
    """Greedily build X with ``|X & A| == tau`` for every edge A.

    Edges are visited in order; vertices are added in increasing order as
    long as no edge would exceed ``tau``.
    """
    if tau < 1:
        raise ValueError("tau must be positive")
    inc = system.incidence
    hit = [0] * len(system.edges)
    X: set[int] = set()
    for i, e in enumerate(system.edges):
        for v in e:
            if hit[i] >= tau:
                break
            if v in X or any(hit[j] >= tau for j in inc[v]):
                continue
            X.add(v)
            for j in inc[v]:
                hit[j] += 1
        if hit[i] != tau:
            raise ColoringFailure(f"no {tau}-witness found greedily: edge {i} stuck at {hit[i]}",
                                  ("edge", i))
    if not is_witness(system, X, tau):
        raise ColoringFailure(f"greedy set is not a {tau}-witness", None)
    return frozenset(X)


@dataclass
class ReductionResult:
    coloring: PartialColoring
    witness: frozenset[int]
    decomposition: EDDecomposition
    trace: SetSystem
    report: list[dict]


def reduce_via_witness(system: SetSystem, tau: int, palette: int | None = None,
                       X: Iterable[int] | None = None) -> ReductionResult:
    """Witness, trace, essential-disjointness, then color remainders injectively.

    Off-witness vertices get color 0.  Each remainder of the trace takes
    distinct colors, preferring colors not already used on the removed
    part of its trace and avoiding 0 while possible.  Per edge the report
    checks ``palette - I_c(A) ⊆ {0} ∪ c[F(A∩X)] ∪ gap(A)`` where gap(A)
    are the colors absent from ``c[A∩X]``; gap is empty whenever the
    trace is colored onto the whole palette.
    """
    if tau < 2:
        raise ValueError("tau must be at least 2 so that traces remain edges")
    palette = tau if palette is None else palette
    Xs = frozenset(X) if X is not None else find_witness(system, tau)
    if not is_witness(system, Xs, tau):
        raise ColoringFailure(f"given set is not a {tau}-witness")
    trace, _ = restrict(system, Xs)
    vmap = trace.meta["vertex_map"]
    ed = ed_decompose(trace)
    assign: dict[int, int] = {v: 0 for v in system.support if v not in Xs}
    for e, F in zip(trace.edges, ed.removed):
        taken = {assign[vmap[u]] for u in F}
        prefs = [c for c in range(1, palette) if c not in taken]
        prefs += [0] if 0 not in taken else []
        prefs += [c for c in range(palette) if c in taken]
        rest = [u for u in e if u not in F]
        for u, c in zip(rest, prefs):
            assign[vmap[u]] = c
    f = PartialColoring(palette, assign)
    trace_index = {e: i for i, e in enumerate(trace.edges)}
    inv = {v: i for i, v in enumerate(vmap)}
    report = []
    for e in system.edges:
        t = tuple(sorted(inv[v] for v in e if v in Xs))
        F = ed.removed[trace_index[t]]
        on_X = {f[v] for v in e if v in Xs and v in f}
        counts = color_counts(e, f)
        unique = {c for c, n in counts.items() if n == 1}
        missing = set(range(palette)) - unique
        allowed = {0} | {f[vmap[u]] for u in F} | (set(range(palette)) - on_X)
        report.append({"missing": sorted(missing), "allowed": sorted(allowed),
                       "removed": len(F), "ok": missing <= allowed})
    if not all(r["ok"] for r in report):
        raise AssertionError("witness reduction containment failed")
    return ReductionResult(f, Xs, ed, trace, report)


# -- extension recursion -----------------------------------------------------------

@dataclass
class Ind0Result:
    coloring: PartialColoring
    chosen: dict[int, tuple[int, int]]  # edge index -> (new vertex, color)
    max_new_later: list[int]  # per step: max |A_g & new domain| over edges g after the step


def _spill(system: SetSystem, closed: frozenset[int]) -> int:
    return max((sum(1 for v in e if v in closed) for e in system.edges), default=0)


def extend_ind0(problem: ExtensionProblem, d: int, check_invariants: bool = True) -> Ind0Result:
    """Weakly extend ``problem.fixed`` edge by edge, adding at most one colored vertex per edge.

    Needs a d-almost disjoint system whose edges meet the closed set in at
    most ``k <= 2x - d - 1`` vertices.  At edge A_z: if some color already
    occurs once, move on; otherwise an unused color j exists (at most k + d
    colored points, fewer than 2x) and j goes to a vertex of A_z that is
    outside the closed set, outside every earlier edge and outside every
    later edge that already holds d new points.
    """
    system = problem.system
    x = problem.palette
    if problem.mode != WEAK:
        raise ValueError("extend_ind0 produces weak extensions; use mode='weak'")
    if 2 * x <= d:
        raise ValueError(f"need 2x > d, got x={x}, d={d}")
    closed = problem.closed
    k = problem.spill_bound if problem.spill_bound is not None else _spill(system, closed)
    if k > 2 * x - d - 1:
        raise ValueError(f"spill {k} exceeds 2x - d - 1 = {2 * x - d - 1}")
    ok, pair = is_almost_disjoint(system, ADParams(d))
    if not ok:
        raise ValueError(f"system is not {d}-almost disjoint: edges {pair}")
    inc = system.incidence
    assign = dict(problem.fixed.assignment)
    new_count = [0] * len(system.edges)
    earlier: set[int] = set()
    chosen: dict[int, tuple[int, int]] = {}
    trace: list[int] = []
    for z, e in enumerate(system.edges):
        counts = [0] * x
        for v in e:
            if v in assign:
                counts[assign[v]] += 1
        if 1 not in counts:
            j = counts.index(0)
            xi = None
            for v in e:
                if v in closed or v in earlier:
                    continue
                if any(g > z and new_count[g] >= d for g in inc[v]):
                    continue
                xi = v
                break
            if xi is None:
                raise ColoringFailure(f"edge {z} has no admissible vertex left", ("edge", z))
            assign[xi] = j
            chosen[z] = (xi, j)
            for g in inc[xi]:
                new_count[g] += 1
        earlier.update(e)
        later = max(new_count[z + 1:], default=0)
        trace.append(later)
        if check_invariants and later > d:
            raise AssertionError(f"step {z}: a later edge holds {later} > {d} new points")
    f = PartialColoring(x, assign)
    if not is_weak_cf(system, f).ok or not f.extends(problem.fixed):
        raise AssertionError("extend_ind0 produced an invalid coloring")
    if (f.domain - problem.fixed.domain) & closed:
        raise AssertionError("extend_ind0 colored a closed vertex")
    return Ind0Result(f, chosen, trace)


# -- layerings ---------------------------------------------------------------------

@dataclass
class LayeringCertificate:
    """Ordered vertex blocks with an edge -> block map.

    Every edge lies inside its block plus earlier blocks and meets the
    earlier blocks in at most ``spill`` vertices.  ``sub`` optionally gives
    a nested layering for a block, over the subsystem of that block's edges
    (edge indices in the nested certificate refer to that subsystem, in
    original order).
    """

    blocks: list[list[int]]
    edge_block: list[int]
    spill: int
    sub: dict[int, "LayeringCertificate"] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return 1 + max((s.depth for s in self.sub.values()), default=0)

    def validate(self, system: SetSystem) -> None:
        where: dict[int, int] = {}
        for b, block in enumerate(self.blocks):
            for v in block:
                if v in where:
                    raise ValueError(f"vertex {v} appears in blocks {where[v]} and {b}")
                where[v] = b
        missing = system.support - where.keys()
        if missing:
            raise ValueError(f"blocks do not cover vertex {min(missing)}")
        if len(self.edge_block) != len(system.edges):
            raise ValueError("edge_block length differs from the number of edges")
        for i, (e, b) in enumerate(zip(system.edges, self.edge_block)):
            if any(where[v] > b for v in e):
                raise ValueError(f"edge {i} reaches past its block {b}")
            if sum(1 for v in e if where[v] < b) > self.spill:
                raise ValueError(f"edge {i} spills more than {self.spill} vertices into earlier blocks")
        for b, sub in self.sub.items():
            sub.validate(block_subsystem(system, self.edge_block, b))

    def to_dict(self) -> dict:
        return {"blocks": self.blocks, "edge_block": self.edge_block, "spill": self.spill,
                "sub": {str(b): s.to_dict() for b, s in sorted(self.sub.items())}}

    @classmethod
    def from_dict(cls, d) -> "LayeringCertificate":
        return cls([list(b) for b in d["blocks"]], list(d["edge_block"]), int(d["spill"]),
                   {int(b): cls.from_dict(s) for b, s in d.get("sub", {}).items()})


def block_subsystem(system: SetSystem, edge_block: list[int], b: int) -> SetSystem:
    edges = tuple(e for e, bb in zip(system.edges, edge_block) if bb == b)
    return SetSystem(system.ground_size, edges, {"family": "block", "params": {"block": b}})


def find_layering(system: SetSystem, d: int, spill: int | None = None) -> LayeringCertificate | None:
    """Greedy layering with spill at most ``spill`` (default ``d - 1``).

    A block starts from the first unplaced edge and absorbs every unplaced
    edge that would otherwise end up with more than ``spill`` vertices in
    earlier blocks.  Returns ``None`` when some edge already spills too far.
    Vertices of no edge go into a final block.
    """
    spill = d - 1 if spill is None else spill
    placed: set[int] = set()
    remaining = list(range(len(system.edges)))
    blocks: list[list[int]] = []
    edge_block = [-1] * len(system.edges)
    while remaining:
        first = remaining[0]
        if sum(1 for v in system.edges[first] if v in placed) > spill:
            return None
        block = {v for v in system.edges[first] if v not in placed}
        members = [first]
        changed = True
        while changed:
            changed = False
            for i in remaining:
                if i in members:
                    continue
                e = system.edges[i]
                if sum(1 for v in e if v in placed or v in block) > spill:
                    if sum(1 for v in e if v in placed) > spill:
                        return None
                    block.update(v for v in e if v not in placed)
                    members.append(i)
                    changed = True
        b = len(blocks)
        blocks.append(sorted(block))
        for i in members:
            edge_block[i] = b
        placed |= block
        remaining = [i for i in remaining if i not in members]
    rest = sorted(set(range(system.ground_size)) - placed)
    if rest:
        blocks.append(rest)
    cert = LayeringCertificate(blocks, edge_block, spill)
    cert.validate(system)
    return cert


def layered_extend(system: SetSystem, layering: LayeringCertificate, x: int, d: int, k: int = 0,
                   fixed: PartialColoring | None = None,
                   closed: Iterable[int] | None = None) -> PartialColoring:
    """Weak extension block by block, each block solved with spill budget ``k + d - 1``.

    For block b the closed set is the original closed set plus every vertex
    of earlier blocks, and the fixed part is the original fixed coloring
    plus everything colored so far.  Blocks with a nested layering recurse
    with ``k + d - 1`` in place of ``k``; others call :func:`extend_ind0`.
    """
    fixed = fixed if fixed is not None else PartialColoring(x)
    closed_set = frozenset(closed) if closed is not None else fixed.domain
    layering.validate(system)
    if layering.spill > d - 1:
        raise ValueError(f"layering spill {layering.spill} exceeds d - 1 = {d - 1}")
    for i, e in enumerate(system.edges):
        if sum(1 for v in e if v in closed_set) > k:
            raise ValueError(f"edge {i} meets the closed set in more than {k} vertices")
    assign = _layered(system, layering, x, d, k, dict(fixed.assignment), closed_set, ())
    f = PartialColoring(x, assign)
    if not is_weak_cf(system, f).ok or not f.extends(fixed) or (f.domain - fixed.domain) & closed_set:
        raise AssertionError("layered extension failed verification")
    return f


def _layered(system, layering, x, d, k, assign, closed, path) -> dict[int, int]:
    assign = dict(assign)
    earlier: set[int] = set()
    local_k = k + d - 1
    for b, block in enumerate(layering.blocks):
        sub = block_subsystem(system, layering.edge_block, b)
        if sub.edges:
            C = closed | earlier
            f_b = PartialColoring(x, {v: c for v, c in assign.items() if v in C})
            try:
                if b in layering.sub:
                    result = _layered(sub, layering.sub[b], x, d, local_k, f_b.assignment, frozenset(C),
                                      path + (b,))
                else:
                    problem = ExtensionProblem(sub, f_b, x, spill_bound=local_k, mode=WEAK,
                                               closed=frozenset(C))
                    result = extend_ind0(problem, d).coloring.assignment
            except (ColoringFailure, ValueError) as exc:
                raise ColoringFailure(f"block {path + (b,)}: {exc}", ("block", path + (b,))) from exc
            assign.update(result)
        earlier.update(block)
    return assign
