"""Set systems, colorings and the verifiers every other module relies on.

Vertices are the integers ``0..ground_size-1``; an edge is a strictly
increasing tuple of vertex indices.  All checks here are plain recounts so
they can serve as the independent referee for solvers and colorers.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Any, Iterable, Mapping

SCHEMA_VERSION = 1
DEFAULT_TUPLE_CAP = 10**6


class CFError(Exception):
    """Base class for errors raised by this package."""


class NotTotalError(CFError):
    """A strict check was given a coloring that misses vertices of some edge."""


class BoundCheckTooLarge(CFError):
    """An almost-disjointness check would enumerate too many edge tuples."""


class MalformedDecomposition(CFError):
    """An EDDecomposition removes vertices that are not in their edge."""


@dataclass(frozen=True)
class SetSystem:
    ground_size: int
    edges: tuple[tuple[int, ...], ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.ground_size < 0:
            raise ValueError("ground_size must be non-negative")
        edges = tuple(tuple(e) for e in self.edges)
        seen = set()
        for e in edges:
            if len(e) < 2:
                raise ValueError(f"edge {e} has fewer than two vertices")
            if any(b <= a for a, b in zip(e, e[1:])):
                raise ValueError(f"edge {e} is not strictly increasing")
            if e[0] < 0 or e[-1] >= self.ground_size:
                raise ValueError(f"edge {e} leaves the ground set [0, {self.ground_size})")
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, ground_size: int, edges: Iterable[Iterable[int]],
                   meta: dict | None = None) -> "SetSystem":
        """Sort and deduplicate raw vertex collections into a valid system."""
        out = []
        seen = set()
        for e in edges:
            t = tuple(sorted(set(e)))
            if t not in seen:
                seen.add(t)
                out.append(t)
        return cls(ground_size, tuple(out), dict(meta or {}))

    def __len__(self) -> int:
        return len(self.edges)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Bitset view of the edges (bit v set iff v in the edge)."""
        out = []
        for e in self.edges:
            m = 0
            for v in e:
                m |= 1 << v
            out.append(m)
        return tuple(out)

    @cached_property
    def support(self) -> frozenset[int]:
        """The union of all edges."""
        return frozenset(v for e in self.edges for v in e)

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.ground_size)]
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return tuple(tuple(x) for x in inc)

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def edge_sizes(self) -> list[int]:
        return [len(e) for e in self.edges]


@dataclass(frozen=True)
class ADParams:
    mu: int
    nu: int | None = None

    def __post_init__(self):
        if self.mu < 1:
            raise ValueError("mu must be at least 1")
        if self.nu is not None and self.nu < 2:
            raise ValueError("nu must be at least 2 when given")


@dataclass
class PartialColoring:
    """A palette size together with a partial map vertex -> color."""

    palette: int
    assignment: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.palette < 0:
            raise ValueError("palette must be non-negative")
        self.assignment = {int(v): int(c) for v, c in self.assignment.items()}
        for v, c in self.assignment.items():
            if not 0 <= c < self.palette:
                raise ValueError(f"color {c} of vertex {v} outside palette {self.palette}")
            if v < 0:
                raise ValueError(f"negative vertex {v}")

    def __getitem__(self, v: int) -> int:
        return self.assignment[v]

    def __contains__(self, v: int) -> bool:
        return v in self.assignment

    def __len__(self) -> int:
        return len(self.assignment)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self.assignment)

    def get(self, v: int, default=None):
        return self.assignment.get(v, default)

    def check_against(self, system: SetSystem) -> None:
        for v in self.assignment:
            if v >= system.ground_size:
                raise ValueError(f"colored vertex {v} outside ground set of size {system.ground_size}")

    def extends(self, other: "PartialColoring") -> bool:
        return all(self.assignment.get(v) == c for v, c in other.assignment.items())

    def to_dict(self) -> dict:
        return {"palette": self.palette,
                "assignment": {str(v): c for v, c in sorted(self.assignment.items())}}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "PartialColoring":
        return cls(int(d["palette"]), {int(v): int(c) for v, c in d.get("assignment", {}).items()})


@dataclass(frozen=True)
class EdgeReport:
    counts: dict[int, int]
    unique: frozenset[int]

    @property
    def ok(self) -> bool:
        return bool(self.unique)


@dataclass(frozen=True)
class CFReport:
    edges: tuple[EdgeReport, ...]
    weak: bool

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.edges)

    @property
    def violations(self) -> list[int]:
        return [i for i, r in enumerate(self.edges) if not r.ok]

    def to_dict(self) -> dict:
        return {
            "weak": self.weak,
            "status": "cf" if self.ok else "violated",
            "violations": self.violations,
            "edges": [
                {"counts": {str(c): n for c, n in sorted(r.counts.items())},
                 "unique": sorted(r.unique), "ok": r.ok}
                for r in self.edges
            ],
        }


@dataclass(frozen=True)
class EDDecomposition:
    removed: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, removed: Iterable[Iterable[int]]) -> "EDDecomposition":
        return cls(tuple(frozenset(r) for r in removed))


def _edge(system: SetSystem, edge_index: int) -> tuple[int, ...]:
    if not 0 <= edge_index < len(system.edges):
        raise IndexError(f"edge index {edge_index} out of range (0..{len(system.edges) - 1})")
    return system.edges[edge_index]


def color_counts(edge: Iterable[int], f: PartialColoring) -> dict[int, int]:
    return dict(Counter(f.assignment[v] for v in edge if v in f.assignment))


def unique_color_set(system: SetSystem, f: PartialColoring, edge_index: int) -> set[int]:
    """Colors carried by exactly one vertex of the edge."""
    counts = color_counts(_edge(system, edge_index), f)
    return {c for c, n in counts.items() if n == 1}


def _report(system: SetSystem, f: PartialColoring, weak: bool) -> CFReport:
    if f.palette <= 0:
        raise ValueError("palette must be positive")
    rows = []
    for e in system.edges:
        counts = color_counts(e, f)
        rows.append(EdgeReport(counts, frozenset(c for c, n in counts.items() if n == 1)))
    return CFReport(tuple(rows), weak)


def is_cf(system: SetSystem, f: PartialColoring) -> CFReport:
    """Conflict-free check for a coloring that must be total on the union of edges."""
    missing = sorted(v for v in system.support if v not in f.assignment)
    if missing:
        raise NotTotalError(f"coloring is not total: {len(missing)} uncolored vertices, first {missing[0]}")
    return _report(system, f, weak=False)


def is_weak_cf(system: SetSystem, f: PartialColoring) -> CFReport:
    """Conflict-free check where uncolored vertices simply do not count."""
    return _report(system, f, weak=True)


def is_proper(system: SetSystem, f: PartialColoring) -> bool:
    """Every edge sees at least two colors (f must be total on the support)."""
    if any(v not in f.assignment for v in system.support):
        raise NotTotalError("coloring is not total")
    return all(len({f.assignment[v] for v in e}) >= 2 for e in system.edges)


def is_almost_disjoint(system: SetSystem, params: ADParams,
                       cap: int = DEFAULT_TUPLE_CAP) -> tuple[bool, tuple[int, ...] | None]:
    """Check that every ``nu`` distinct edges share fewer than ``mu`` vertices.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is the
    first offending tuple of edge indices in lexicographic order.
    """
    nu = params.nu or 2
    m = len(system.edges)
    if nu > m:
        return True, None
    masks = system.masks
    if nu == 2:
        # two edges share mu vertices iff some mu-subset lies in both
        subset_cost = sum(comb(len(e), params.mu) for e in system.edges)
        if subset_cost < m * m // 2:
            owner: dict[tuple[int, ...], int] = {}
            bad = None
            for j, e in enumerate(system.edges):
                for sub in combinations(e, params.mu):
                    i = owner.setdefault(sub, j)
                    if i != j and (bad is None or (i, j) < bad):
                        bad = (i, j)
            return bad is None, bad
        for i in range(m):
            mi = masks[i]
            for j in range(i + 1, m):
                if (mi & masks[j]).bit_count() >= params.mu:
                    return False, (i, j)
        return True, None
    if comb(m, nu) > cap:
        raise BoundCheckTooLarge(f"C({m},{nu}) = {comb(m, nu)} edge tuples exceeds cap {cap}")
    for tup in combinations(range(m), nu):
        acc = masks[tup[0]]
        for i in tup[1:]:
            acc &= masks[i]
        if acc.bit_count() >= params.mu:
            return False, tup
    return True, None


def max_pairwise_intersection(system: SetSystem) -> int:
    masks = system.masks
    best = 0
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            best = max(best, (masks[i] & masks[j]).bit_count())
    return best


def _vertex_mask(system: SetSystem, X: Iterable[int]) -> int:
    m = 0
    for v in X:
        if not 0 <= v < system.ground_size:
            raise ValueError(f"vertex {v} outside ground set")
        m |= 1 << v
    return m


def is_transversal(system: SetSystem, X: Iterable[int], tau: int) -> bool:
    """``0 < |X & A| < tau`` for every edge A."""
    xm = _vertex_mask(system, X)
    return all(0 < (xm & am).bit_count() < tau for am in system.masks)


def is_witness(system: SetSystem, X: Iterable[int], tau: int) -> bool:
    """``|X & A| == tau`` for every edge A."""
    xm = _vertex_mask(system, X)
    return all((xm & am).bit_count() == tau for am in system.masks)


def verify_ed(system: SetSystem, ed: EDDecomposition) -> tuple[bool, int | None]:
    """Check that the remainders ``A - F(A)`` are pairwise disjoint.

    Returns ``(ok, first shared vertex)``.
    """
    if len(ed.removed) != len(system.edges):
        raise MalformedDecomposition("decomposition and system have different edge counts")
    owner: dict[int, int] = {}
    bad: int | None = None
    for i, (e, F) in enumerate(zip(system.edges, ed.removed)):
        if not F <= set(e):
            raise MalformedDecomposition(f"F({i}) = {sorted(F)} is not a subset of edge {e}")
        for v in e:
            if v in F:
                continue
            if v in owner and bad is None:
                bad = v
            owner.setdefault(v, i)
    return bad is None, bad


def restrict(system: SetSystem, X: Iterable[int]) -> tuple[SetSystem, int]:
    """Trace of the system on X, re-indexed to ``0..|X|-1``.

    Traces of size below two are dropped; their number is returned alongside
    the new system.  ``meta["vertex_map"]`` lists the original index of each
    new vertex.
    """
    xs = sorted(set(X))
    if not xs:
        raise ValueError("restriction set must be nonempty")
    _vertex_mask(system, xs)
    index = {v: i for i, v in enumerate(xs)}
    traces = []
    dropped = 0
    for e in system.edges:
        t = [index[v] for v in e if v in index]
        if len(t) < 2:
            dropped += 1
        else:
            traces.append(t)
    meta = {"family": "restriction",
            "params": {"size": len(xs)},
            "parent": system.meta.get("family"),
            "vertex_map": xs,
            "dropped": dropped}
    return SetSystem.from_edges(len(xs), traces, meta), dropped


# instance files ------------------------------------------------------------

def system_to_dict(system: SetSystem, fixed: PartialColoring | None = None) -> dict:
    d: dict[str, Any] = {"schema": SCHEMA_VERSION,
                         "ground_size": system.ground_size,
                         "edges": [list(e) for e in system.edges],
                         "meta": system.meta}
    if fixed is not None:
        d["fixed"] = fixed.to_dict()
    return d


def system_from_dict(d: Mapping[str, Any]) -> tuple[SetSystem, PartialColoring | None]:
    schema = d.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {schema}")
    system = SetSystem(int(d["ground_size"]), tuple(tuple(int(v) for v in e) for e in d["edges"]),
                       dict(d.get("meta", {})))
    fixed = PartialColoring.from_dict(d["fixed"]) if d.get("fixed") else None
    if fixed is not None:
        fixed.check_against(system)
    return system, fixed


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def save_instance(path, system: SetSystem, fixed: PartialColoring | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(system_to_dict(system, fixed)))


def load_instance(path) -> tuple[SetSystem, PartialColoring | None]:
    with open(path) as fh:
        return system_from_dict(json.load(fh))
