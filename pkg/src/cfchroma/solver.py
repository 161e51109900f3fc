"""Exact solvers for chi, chi_CF and weak chi_CF, plus extension feasibility.

The search engine is a backtracking solver over per-vertex value domains
with edge-local propagation.  In weak mode an extra "blank" value stands for
"left uncolored"; it never contributes to a color multiplicity, so strict
and weak problems share one engine.

An edge is dead when no color can still end up with multiplicity exactly
one: every color is either used at least twice, or unused with no
unassigned vertex able to take it.  Two propagation rules keep the search
small and are sound for any completion of the current assignment:

* if the only live color of an edge is already used once, no other vertex
  of the edge may take it;
* if the only live color is unused and a single unassigned vertex can take
  it, that vertex is forced to it.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .core import (
    CFError,
    PartialColoring,
    SetSystem,
    is_cf,
    is_proper,
    is_weak_cf,
)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNKNOWN = "unknown"

STRICT = "strict"
WEAK = "weak"

DEFAULT_NODE_LIMIT = 50_000_000
DEFAULT_ORACLE_CAP = 10**8


class OracleCapExceeded(CFError):
    """The brute-force oracle refuses instances above its enumeration cap."""


def default_node_limit() -> int | None:
    raw = os.environ.get("CFCHROMA_NODE_LIMIT")
    if raw is None or raw == "":
        return DEFAULT_NODE_LIMIT
    n = int(raw)
    return None if n <= 0 else n


@dataclass
class ExtensionProblem:
    """Extend ``fixed`` to a (weak) conflict-free coloring with ``palette`` colors.

    ``closed`` is the set C on which the extension must agree with ``fixed``:
    in weak mode vertices of C outside dom(fixed) stay uncolored.  It
    defaults to dom(fixed).  When ``spill_bound`` is given, every edge must
    meet C in at most that many vertices.
    """

    system: SetSystem
    fixed: PartialColoring
    palette: int
    spill_bound: int | None = None
    mode: str = STRICT
    closed: frozenset[int] | None = None

    def __post_init__(self):
        if self.mode not in (STRICT, WEAK):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.palette < 1:
            raise ValueError("palette must be at least 1")
        if self.fixed.palette != self.palette:
            raise ValueError(f"fixed coloring palette {self.fixed.palette} != problem palette {self.palette}")
        self.fixed.check_against(self.system)
        dom = self.fixed.domain
        if self.closed is None:
            self.closed = dom
        else:
            self.closed = frozenset(self.closed)
            if not dom <= self.closed:
                raise ValueError("closed set must contain dom(fixed)")
        if self.spill_bound is not None:
            for i, e in enumerate(self.system.edges):
                n = sum(1 for v in e if v in self.closed)
                if n > self.spill_bound:
                    raise ValueError(f"edge {i} meets the fixed part in {n} > {self.spill_bound} vertices")

    @classmethod
    def free(cls, system: SetSystem, palette: int, mode: str = STRICT) -> "ExtensionProblem":
        return cls(system, PartialColoring(palette), palette, mode=mode)


@dataclass
class SolveResult:
    verdict: str
    witness: PartialColoring | None = None
    optimum: int | None = None
    lower_bound: int | None = None
    stats: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.verdict == FEASIBLE

    def to_dict(self, timing: bool = False) -> dict:
        stats = dict(self.stats)
        if not timing:
            stats.pop("seconds", None)
        d = {"verdict": self.verdict,
             "witness": self.witness.to_dict() if self.witness is not None else None,
             "stats": stats}
        if self.optimum is not None:
            d["optimum"] = self.optimum
        if self.lower_bound is not None:
            d["lower_bound"] = self.lower_bound
        return d


class _Conflict(Exception):
    pass


class _NodeLimit(Exception):
    pass


class _Engine:
    """Backtracking search with a trail; one instance per solve."""

    def __init__(self, system: SetSystem, palette: int, weak: bool, proper: bool,
                 fixed: dict[int, int], closed: frozenset[int], symmetric: bool,
                 node_limit: int | None, heuristic: str = "degree"):
        self.x = palette
        self.weak = weak
        self.proper = proper
        self.blank = palette if weak else None
        self.nvals = palette + (1 if weak else 0)
        self.edges = system.edges
        self.inc = system.incidence
        self.symmetric = symmetric
        self.node_limit = node_limit
        self.vwt = [0] * system.ground_size if heuristic == "wdeg" else None
        self.nodes = 0
        n = system.ground_size
        self.val = [-1] * n
        full = (1 << self.nvals) - 1
        self.dom = [full] * n
        self.cnt = [[0] * palette for _ in self.edges]
        self.un = [len(e) for e in self.edges]
        self.used = [0] * palette
        self.trail: list[tuple] = []
        support = system.support
        # vertices outside every edge are irrelevant to the search
        self.order = sorted(support, key=lambda v: (-len(self.inc[v]), v))
        self.init_doms: list[tuple[int, int]] = []
        for v, c in fixed.items():
            if v in support:
                self.init_doms.append((v, 1 << c))
        if weak:
            for v in closed:
                if v in support and v not in fixed:
                    self.init_doms.append((v, 1 << self.blank))

    # -- primitive state changes -------------------------------------------
    def _restrict(self, w: int, newdom: int, queue: list) -> None:
        old = self.dom[w]
        if newdom == old:
            # a singleton domain may still be unassigned (palette 1, no blank)
            if self.val[w] < 0 and newdom & (newdom - 1) == 0 and newdom:
                self._assign(w, newdom.bit_length() - 1, queue)
            return
        if newdom == 0:
            raise _Conflict
        self.trail.append((0, w, old))
        self.dom[w] = newdom
        if newdom & (newdom - 1) == 0:
            self._assign(w, newdom.bit_length() - 1, queue)
        elif not self.proper:
            queue.extend(self.inc[w])

    def _assign(self, v: int, a: int, queue: list) -> None:
        self.trail.append((1, v, a))
        self.val[v] = a
        if self.dom[v] != 1 << a:
            self.trail.append((0, v, self.dom[v]))
            self.dom[v] = 1 << a
        color = a < self.x
        if color:
            self.used[a] += 1
        cnt = self.cnt
        un = self.un
        for e in self.inc[v]:
            un[e] -= 1
            if color:
                cnt[e][a] += 1
        queue.extend(self.inc[v])

    def _undo_to(self, mark: int) -> None:
        trail = self.trail
        while len(trail) > mark:
            kind, v, a = trail.pop()
            if kind == 0:
                self.dom[v] = a
            else:
                self.val[v] = -1
                color = a < self.x
                if color:
                    self.used[a] -= 1
                for e in self.inc[v]:
                    self.un[e] += 1
                    if color:
                        self.cnt[e][a] -= 1

    # -- propagation ---------------------------------------------------------
    def _check_cf(self, e: int, queue: list) -> None:
        c = self.cnt[e]
        once = 0
        zero = 0
        for col in range(self.x):
            n = c[col]
            if n == 0:
                zero |= 1 << col
            elif n == 1:
                once |= 1 << col
        sup = 0
        val = self.val
        dom = self.dom
        edge = self.edges[e]
        if self.un[e]:
            for w in edge:
                if val[w] < 0:
                    sup |= dom[w]
        live = once | (sup & zero)
        if live == 0:
            self._bump(e)
            raise _Conflict
        if live & (live - 1):
            return
        if once:
            for w in edge:
                if val[w] < 0 and dom[w] & live:
                    self._restrict(w, dom[w] & ~live, queue)
        else:
            holder = -1
            for w in edge:
                if val[w] < 0 and dom[w] & live:
                    if holder >= 0:
                        return
                    holder = w
            self._restrict(holder, live, queue)

    def _check_proper(self, e: int, queue: list) -> None:
        if self.un[e] > 1:
            return
        edge = self.edges[e]
        seen = -1
        free = -1
        for w in edge:
            a = self.val[w]
            if a < 0:
                free = w
            elif seen < 0:
                seen = a
            elif a != seen:
                return
        if free < 0:
            self._bump(e)
            raise _Conflict
        if seen >= 0:
            self._restrict(free, self.dom[free] & ~(1 << seen), queue)

    def _bump(self, e: int) -> None:
        if self.vwt is not None:
            for w in self.edges[e]:
                self.vwt[w] += 1

    def _propagate(self, queue: list) -> None:
        check = self._check_proper if self.proper else self._check_cf
        while queue:
            check(queue.pop(), queue)

    # -- search ----------------------------------------------------------------
    def _values(self, v: int) -> list[int]:
        d = self.dom[v]
        vals = [a for a in range(self.nvals) if d >> a & 1]
        if self.symmetric:
            top = -1
            for col in range(self.x - 1, -1, -1):
                if self.used[col]:
                    top = col
                    break
            vals = [a for a in vals if a == self.blank or a <= top + 1]
        return vals

    def setup(self) -> bool:
        queue: list[int] = []
        try:
            for v, d in self.init_doms:
                self._restrict(v, self.dom[v] & d, queue)
            queue.extend(range(len(self.edges)))
            self._propagate(queue)
        except _Conflict:
            return False
        return True

    def _next_var(self, start: int) -> int:
        order = self.order
        val = self.val
        if self.vwt is None:
            for i in range(start, len(order)):
                if val[order[i]] < 0:
                    return i
            return len(order)
        # conflict-weighted choice: fewest values, then most conflicts, then static order
        best = len(order)
        best_key = None
        dom = self.dom
        vwt = self.vwt
        for i, v in enumerate(order):
            if val[v] < 0:
                key = (dom[v].bit_count(), -vwt[v])
                if best_key is None or key < best_key:
                    best, best_key = i, key
        return best

    def search(self, start: int = 0) -> bool:
        i = self._next_var(start)
        if i == len(self.order):
            return True
        v = self.order[i]
        for a in self._values(v):
            self.nodes += 1
            if self.node_limit is not None and self.nodes > self.node_limit:
                raise _NodeLimit
            mark = len(self.trail)
            queue: list[int] = []
            try:
                self._restrict(v, 1 << a, queue)
                self._propagate(queue)
                if self.search(i + 1 if self.vwt is None else 0):
                    return True
            except _Conflict:
                pass
            self._undo_to(mark)
        return False

    def branch_point(self) -> tuple[int, list[int]] | None:
        i = self._next_var(0)
        if i == len(self.order):
            return None
        v = self.order[i]
        return v, self._values(v)

    def coloring(self) -> dict[int, int]:
        return {v: a for v in self.order if (a := self.val[v]) >= 0 and a != self.blank}


def _run_engine(system, palette, weak, proper, fixed, closed, symmetric, node_limit, heuristic,
                first=None):
    eng = _Engine(system, palette, weak, proper, fixed, closed, symmetric, node_limit, heuristic)
    t0 = time.perf_counter()
    verdict = INFEASIBLE
    assign = None
    try:
        ok = eng.setup()
        if ok and first is not None:
            v, a = first
            queue: list[int] = []
            eng.nodes += 1
            try:
                eng._restrict(v, eng.dom[v] & (1 << a), queue)
                eng._propagate(queue)
            except _Conflict:
                ok = False
        if ok and eng.search():
            verdict = FEASIBLE
            assign = eng.coloring()
    except _NodeLimit:
        verdict = UNKNOWN
    return verdict, assign, eng.nodes, time.perf_counter() - t0


def _subtree(args):
    return _run_engine(*args)


def _solve(system: SetSystem, palette: int, weak: bool, proper: bool,
           fixed: PartialColoring, closed: frozenset[int], node_limit: int | None,
           threads: int = 1, heuristic: str = "degree") -> SolveResult:
    symmetric = not fixed.assignment and not (weak and closed)
    base = (system, palette, weak, proper, dict(fixed.assignment), closed, symmetric, node_limit, heuristic)
    if threads > 1:
        probe = _Engine(*base)
        if probe.setup():
            bp = probe.branch_point()
        else:
            bp = None
        if bp is not None:
            v, values = bp
            with ProcessPoolExecutor(max_workers=threads) as ex:
                parts = list(ex.map(_subtree, [base + ((v, a),) for a in values]))
            nodes = sum(p[2] for p in parts)
            seconds = max(p[3] for p in parts)
            # lowest-valued feasible subtree wins, so the witness matches single-thread search
            for verdict, assign, _, _ in parts:
                if verdict == FEASIBLE:
                    return _result(FEASIBLE, assign, palette, fixed, nodes, seconds)
                if verdict == UNKNOWN:
                    return _result(UNKNOWN, None, palette, fixed, nodes, seconds)
            return _result(INFEASIBLE, None, palette, fixed, nodes, seconds)
    verdict, assign, nodes, seconds = _run_engine(*base)
    return _result(verdict, assign, palette, fixed, nodes, seconds)


def _result(verdict, assign, palette, fixed, nodes, seconds) -> SolveResult:
    witness = None
    if verdict == FEASIBLE:
        full = dict(fixed.assignment)
        full.update(assign)
        witness = PartialColoring(palette, full)
    return SolveResult(verdict, witness, stats={"nodes": nodes, "complete": verdict != UNKNOWN,
                                                 "seconds": round(seconds, 6)})


def _check_witness(problem: ExtensionProblem, witness: PartialColoring) -> None:
    if not witness.extends(problem.fixed):
        raise AssertionError("solver witness does not extend the fixed coloring")
    if problem.mode == STRICT:
        ok = is_cf(problem.system, witness).ok
    else:
        extra = (witness.domain - problem.fixed.domain) & problem.closed
        ok = is_weak_cf(problem.system, witness).ok and not extra
    if not ok:
        raise AssertionError("solver witness failed verification")


def feasible_cf(problem: ExtensionProblem, node_limit: int | None = -1,
                threads: int = 1, heuristic: str = "degree") -> SolveResult:
    """Decide whether ``problem.fixed`` extends to a (weak) CF coloring.

    ``node_limit=-1`` means "use CFCHROMA_NODE_LIMIT or the default";
    ``None`` disables the limit.  A limited run that gives up reports
    ``unknown`` rather than ``infeasible``.
    """
    if node_limit == -1:
        node_limit = default_node_limit()
    res = _solve(problem.system, problem.palette, problem.mode == WEAK, False,
                 problem.fixed, problem.closed, node_limit, threads, heuristic)
    if res.witness is not None:
        _check_witness(problem, res.witness)
    return res


def feasible_proper(system: SetSystem, palette: int, node_limit: int | None = -1,
                    threads: int = 1) -> SolveResult:
    """Decide whether a proper coloring (no monochromatic edge) exists."""
    if node_limit == -1:
        node_limit = default_node_limit()
    res = _solve(system, palette, False, True, PartialColoring(palette), frozenset(), node_limit, threads)
    if res.witness is not None and not is_proper(system, res.witness):
        raise AssertionError("proper-coloring witness failed verification")
    return res


# -- chromatic numbers --------------------------------------------------------

def graph_clique_bound(system: SetSystem) -> int:
    """Size of a greedily grown clique among the two-element edges."""
    adj: dict[int, set[int]] = {}
    for e in system.edges:
        if len(e) == 2:
            a, b = e
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
    best = 0
    for start in sorted(adj, key=lambda v: (-len(adj[v]), v)):
        clique = [start]
        cand = set(adj[start])
        while cand:
            w = min(cand, key=lambda u: (-len(adj[u] & cand), u))
            clique.append(w)
            cand &= adj[w]
        best = max(best, len(clique))
    return best


def _optimize(system: SetSystem, kind: str, lower: int, max_palette: int | None,
              node_limit: int | None, threads: int) -> SolveResult:
    if not system.edges:
        raise ValueError("chromatic numbers need at least one edge")
    if node_limit == -1:
        node_limit = default_node_limit()
    upper = max_palette if max_palette is not None else max(len(system.support), lower)
    nodes = 0
    seconds = 0.0
    for p in range(lower, upper + 1):
        if kind == "chi":
            res = feasible_proper(system, p, node_limit, threads)
        else:
            res = feasible_cf(ExtensionProblem.free(system, p, WEAK if kind == "wchi_cf" else STRICT),
                              node_limit, threads)
        nodes += res.stats["nodes"]
        seconds += res.stats["seconds"]
        stats = {"nodes": nodes, "seconds": round(seconds, 6), "palette": p}
        if res.verdict == FEASIBLE:
            return SolveResult(FEASIBLE, res.witness, optimum=p, lower_bound=p,
                               stats={**stats, "complete": True})
        if res.verdict == UNKNOWN:
            return SolveResult(UNKNOWN, None, lower_bound=p, stats={**stats, "complete": False})
    # every palette up to the cap is infeasible
    return SolveResult(INFEASIBLE, None, lower_bound=upper + 1, stats={"nodes": nodes, "complete": True,
                                                                       "seconds": round(seconds, 6),
                                                                       "palette": upper})


def solve_chi(system: SetSystem, max_palette: int | None = None, node_limit: int | None = -1,
              threads: int = 1) -> SolveResult:
    return _optimize(system, "chi", max(2, graph_clique_bound(system)), max_palette, node_limit, threads)


def solve_chi_cf(system: SetSystem, max_palette: int | None = None, node_limit: int | None = -1,
                 threads: int = 1) -> SolveResult:
    return _optimize(system, "chi_cf", max(2, graph_clique_bound(system)), max_palette, node_limit, threads)


def solve_wchi_cf(system: SetSystem, max_palette: int | None = None, node_limit: int | None = -1,
                  threads: int = 1) -> SolveResult:
    return _optimize(system, "wchi_cf", 1, max_palette, node_limit, threads)


def _value(res: SolveResult, name: str) -> int:
    if res.optimum is None:
        raise CFError(f"{name}: {res.verdict} (proven lower bound {res.lower_bound})")
    return res.optimum


def chi(system: SetSystem, **kw) -> int:
    return _value(solve_chi(system, **kw), "chi")


def chi_cf(system: SetSystem, **kw) -> int:
    return _value(solve_chi_cf(system, **kw), "chi_cf")


def wchi_cf(system: SetSystem, **kw) -> int:
    return _value(solve_wchi_cf(system, **kw), "wchi_cf")


# -- brute-force oracle --------------------------------------------------------

def brute_oracle(problem: ExtensionProblem, cap: int = DEFAULT_ORACLE_CAP) -> SolveResult:
    """Exhaustive enumeration of every completion; used to referee the search."""
    system = problem.system
    weak = problem.mode == WEAK
    free = sorted(v for v in system.support if v not in problem.closed)
    values: list[int | None] = list(range(problem.palette))
    if weak:
        values.append(None)
    total = len(values) ** len(free)
    if total > cap:
        raise OracleCapExceeded(f"{len(values)}^{len(free)} = {total} completions exceed cap {cap}")
    t0 = time.perf_counter()
    base = dict(problem.fixed.assignment)
    count = 0
    for combo in itertools.product(values, repeat=len(free)):
        count += 1
        assign = dict(base)
        for v, a in zip(free, combo):
            if a is not None:
                assign[v] = a
        f = PartialColoring(problem.palette, assign)
        if weak:
            good = all(_has_unique(e, assign) for e in system.edges)
        else:
            good = is_cf(system, f).ok
        if good:
            return SolveResult(FEASIBLE, f, stats={"nodes": count, "complete": True,
                                                   "seconds": round(time.perf_counter() - t0, 6)})
    return SolveResult(INFEASIBLE, None, stats={"nodes": count, "complete": True,
                                                "seconds": round(time.perf_counter() - t0, 6)})


def _has_unique(edge, assign) -> bool:
    seen: dict[int, int] = {}
    for v in edge:
        if v in assign:
            seen[assign[v]] = seen.get(assign[v], 0) + 1
    return 1 in seen.values()


# -- CNF export ----------------------------------------------------------------

@dataclass
class CNF:
    """DIMACS CNF text plus the variable map needed to decode models."""

    num_vars: int
    clauses: list[list[int]]
    color_var: dict[tuple[int, int], int]
    palette: int
    comments: list[str] = field(default_factory=list)
    base: dict[int, int] = field(default_factory=dict)  # fixed colors on vertices of no edge

    def dimacs(self) -> str:
        lines = [f"c {c}" for c in self.comments]
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        lines.extend(" ".join(map(str, cl)) + " 0" for cl in self.clauses)
        return "\n".join(lines) + "\n"

    def decode(self, model) -> PartialColoring:
        """Turn a satisfying assignment (iterable of signed literals) into a coloring."""
        true = {lit for lit in model if lit > 0}
        assign = dict(self.base)
        for (v, c), var in self.color_var.items():
            if var in true:
                assign[v] = c
        return PartialColoring(self.palette, assign)

    def evaluate(self, model) -> bool:
        true = {lit for lit in model if lit > 0}
        return all(any((lit > 0) == (abs(lit) in true) for lit in cl) for cl in self.clauses)


def export_cnf(problem: ExtensionProblem) -> CNF:
    """Encode the extension problem as CNF.

    Variables ``x[v,c]`` say vertex v has color c; ``u[A,c]`` says color c
    occurs exactly once on edge A.  Strict mode asks for exactly one color
    per vertex, weak mode for at most one (no color = blank).
    """
    system = problem.system
    x = problem.palette
    weak = problem.mode == WEAK
    verts = sorted(system.support)
    var: dict[tuple[int, int], int] = {}
    n = 0
    for v in verts:
        for c in range(x):
            n += 1
            var[v, c] = n
    clauses: list[list[int]] = []
    for v in verts:
        if not weak:
            clauses.append([var[v, c] for c in range(x)])
        for c1 in range(x):
            for c2 in range(c1 + 1, x):
                clauses.append([-var[v, c1], -var[v, c2]])
    for v in verts:
        if v in problem.fixed:
            clauses.append([var[v, problem.fixed[v]]])
        elif weak and v in problem.closed:
            clauses.extend([-var[v, c]] for c in range(x))
    for e in system.edges:
        us = []
        for c in range(x):
            n += 1
            u = n
            us.append(u)
            clauses.append([-u] + [var[v, c] for v in e])
            for a, b in itertools.combinations(e, 2):
                clauses.append([-u, -var[a, c], -var[b, c]])
        clauses.append(us)
    comments = [f"conflict-free extension: {len(verts)} vertices, {len(system.edges)} edges, "
                f"palette {x}, mode {problem.mode}"]
    base = {v: c for v, c in problem.fixed.assignment.items() if v not in system.support}
    return CNF(n, clauses, var, x, comments, base)


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    num_vars = 0
    clauses: list[list[int]] = []
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            num_vars = int(line.split()[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    return num_vars, clauses


# -- witness normalization --------------------------------------------------------

def normalize_extension_witness(problem: ExtensionProblem) -> ExtensionProblem:
    """Blow up the fixed part into pairwise disjoint blocks of size ``spill_bound``.

    Every fixed vertex lying on several edges is split into one copy per
    edge (copies keep its color); each edge then owns a block Y_i with
    ``edge_i & dom ⊆ Y_i``, padded with fresh fixed vertices of color 0.
    Fixed vertices on no edge are used as padding first.  The blocks are
    recorded in ``meta["blocks"]``.  Solutions of the two problems
    correspond, so (in)feasibility is preserved.
    """
    if problem.mode != WEAK:
        raise ValueError("normalization is defined for weak extension problems")
    k = problem.spill_bound
    if k is None:
        raise ValueError("normalization needs a declared spill bound")
    system = problem.system
    closed = problem.closed
    for i, e in enumerate(system.edges):
        if sum(1 for v in e if v in closed) > k:
            raise ValueError(f"edge {i} violates spill bound {k}")
    fixed = problem.fixed.assignment
    n = system.ground_size
    new_edges = [list(e) for e in system.edges]
    new_fixed = dict(fixed)
    new_closed = set(closed)
    claimed: set[int] = set()
    for i, e in enumerate(system.edges):
        for pos, v in enumerate(e):
            if v not in closed:
                continue
            if v not in claimed:
                claimed.add(v)
                continue
            copy = n
            n += 1
            new_edges[i][pos] = copy
            new_closed.add(copy)
            if v in fixed:
                new_fixed[copy] = fixed[v]
    spare = sorted(v for v in closed if not system.incidence[v])
    blocks = []
    for e in new_edges:
        block = [v for v in e if v in new_closed]
        while len(block) < k:
            if spare:
                w = spare.pop(0)
            else:
                w = n
                n += 1
                new_fixed[w] = 0
                new_closed.add(w)
            block.append(w)
        blocks.append(sorted(block))
    while spare and k > 0:
        block = []
        while len(block) < k:
            if spare:
                block.append(spare.pop(0))
            else:
                new_fixed[n] = 0
                new_closed.add(n)
                block.append(n)
                n += 1
        blocks.append(sorted(block))
    meta = {"family": "normalized", "params": {"k": k}, "parent": system.meta.get("family"),
            "blocks": blocks}
    new_system = SetSystem(n, tuple(tuple(sorted(e)) for e in new_edges), meta)
    return replace(problem, system=new_system,
                   fixed=PartialColoring(problem.palette, new_fixed),
                   closed=frozenset(new_closed))
