"""Finite instances of the extremal constructions.

Every generator is deterministic and records ``meta["family"]`` and
``meta["params"]`` so that instance files can be regenerated and checked.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb, gcd, prod

from .core import ADParams, CFError, PartialColoring, SetSystem, is_almost_disjoint


class GadgetError(CFError):
    """Parameters outside a generator's domain, or a failed construction."""


def gen_quad(m: int) -> SetSystem:
    """All 4-sets of ``range(m)`` with exactly two even and two odd members."""
    if m < 4:
        raise GadgetError("gen_quad needs m >= 4")
    evens = range(0, m, 2)
    odds = range(1, m, 2)
    edges = [tuple(sorted(a + b)) for a in itertools.combinations(evens, 2)
             for b in itertools.combinations(odds, 2)]
    edges.sort()
    return SetSystem(m, tuple(edges), {"family": "quad", "params": {"m": m}})


# -- product gadget -------------------------------------------------------------

@dataclass(frozen=True)
class ProductParams:
    lam: int
    n: int
    k: int
    t: int

    def validate(self) -> None:
        if self.n < 2:
            raise GadgetError("product gadget needs n >= 2")
        if not 0 < self.k < self.t <= self.n * self.k:
            raise GadgetError(f"product gadget needs 0 < k < t <= n*k, got k={self.k}, t={self.t}, n={self.n}")
        if self.n == 2 and self.t % 2:
            raise GadgetError("for n = 2 the edge size t must be even")
        if self.lam < self.n:
            raise GadgetError("product gadget needs lambda >= n")


def rank_subset(subset, lam: int) -> int:
    """Lexicographic rank of a sorted subset among the subsets of ``range(lam)`` of its size."""
    r = 0
    size = len(subset)
    prev = -1
    for pos, s in enumerate(subset):
        for skipped in range(prev + 1, s):
            r += comb(lam - skipped - 1, size - pos - 1)
        prev = s
    return r


def unrank_subset(r: int, lam: int, size: int) -> tuple[int, ...]:
    out = []
    s = 0
    for pos in range(size):
        while True:
            block = comb(lam - s - 1, size - pos - 1)
            if r < block:
                break
            r -= block
            s += 1
        out.append(s)
        s += 1
    return tuple(out)


def product_vertex(B, i: int, p: ProductParams) -> int:
    """Index of the pair <B, i> with B an (n-1)-subset and i < k."""
    return rank_subset(B, p.lam) * p.k + i


def product_counts(p: ProductParams) -> list[int]:
    """How many of the n faces of Y each coordinate i uses; no entry equals 1."""
    counts = [0] * p.k
    left = p.t
    for i in range(p.k):
        if left >= 2:
            counts[i] = 2
            left -= 2
    i = 0
    while left:
        if 2 <= counts[i] < p.n:
            counts[i] += 1
            left -= 1
        i = (i + 1) % p.k
    return counts


def gen_product_gadget(lam: int, n: int, k: int, t: int) -> SetSystem:
    """Edges A_Y, Y an n-subset of range(lam), over the vertices [lam]^(n-1) x k.

    For each coordinate i the edge uses either none or at least two of the
    n faces of Y, so a coloring constant on the faces of Y kills every
    color on A_Y.  Any two edges share at most one face, hence at most k
    vertices.
    """
    p = ProductParams(lam, n, k, t)
    p.validate()
    counts = product_counts(p)
    edges = []
    for Y in itertools.combinations(range(lam), n):
        faces = list(itertools.combinations(Y, n - 1))
        A = [product_vertex(faces[j], i, p) for i in range(k) for j in range(counts[i])]
        edges.append(tuple(sorted(A)))
    meta = {"family": "product", "params": {"lambda": lam, "n": n, "k": k, "t": t},
            "mu": k + 1, "coordinate_counts": counts}
    return SetSystem(comb(lam, n - 1) * k, tuple(edges), meta)


def product_face_counts(system: SetSystem, edge_index: int) -> list[int]:
    """Per coordinate i, the number of faces B with <B, i> in the edge."""
    k = system.meta["params"]["k"]
    out = [0] * k
    for v in system.edges[edge_index]:
        out[v % k] += 1
    return out


@dataclass
class Refutation:
    Y: tuple[int, ...]
    edge_index: int
    counts: dict[int, int]

    def to_dict(self) -> dict:
        return {"Y": list(self.Y), "edge": self.edge_index,
                "counts": {str(c): n for c, n in sorted(self.counts.items())}}


def refute_product_coloring(system: SetSystem, f: PartialColoring) -> Refutation | None:
    """Find an n-set Y on whose faces f looks the same in every coordinate.

    Returns the homogeneous Y, its edge A_Y and the color recount on A_Y
    (every multiplicity is at least 2).  ``None`` only means lambda is below
    the relevant Ramsey threshold for this f, not that f is conflict-free.
    """
    if system.meta.get("family") != "product":
        raise GadgetError("refutation needs a product gadget instance")
    prm = system.meta["params"]
    p = ProductParams(prm["lambda"], prm["n"], prm["k"], prm["t"])
    missing = [v for v in range(system.ground_size) if v not in f]
    if missing:
        raise GadgetError(f"coloring must be total on the gadget; vertex {missing[0]} is uncolored")

    def g(B):
        base = rank_subset(B, p.lam) * p.k
        return tuple(f[base + i] for i in range(p.k))

    for idx, Y in enumerate(itertools.combinations(range(p.lam), p.n)):
        faces = itertools.combinations(Y, p.n - 1)
        first = g(next(faces))
        if all(g(B) == first for B in faces):
            counts: dict[int, int] = {}
            for v in system.edges[idx]:
                counts[f[v]] = counts.get(f[v], 0) + 1
            if any(c == 1 for c in counts.values()):
                raise AssertionError("homogeneous set with a unique color; gadget is malformed")
            return Refutation(Y, idx, counts)
    return None


# -- affine planes ---------------------------------------------------------------

def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, int(q**0.5) + 1))


def gen_affine_lines(q: int) -> SetSystem:
    """All q^2 + q lines of the affine plane over the integers mod a prime q.

    The point (a, b) has index ``a*q + b``.
    """
    if not _is_prime(q):
        raise GadgetError(f"q = {q} is not prime")
    edges = []
    for m in range(q):
        for c in range(q):
            edges.append(tuple(sorted(a * q + (m * a + c) % q for a in range(q))))
    for c in range(q):
        edges.append(tuple(c * q + b for b in range(q)))
    return SetSystem(q * q, tuple(edges), {"family": "affine", "params": {"q": q}, "mu": 2})


# -- grid gadget -----------------------------------------------------------------

def _line_key(p, r):
    (x1, y1), (x2, y2) = p, r
    dx, dy = x2 - x1, y2 - y1
    g = gcd(dx, dy)
    dx, dy = dx // g, dy // g
    if dx < 0 or (dx == 0 and dy < 0):
        dx, dy = -dx, -dy
    return dx, dy, dy * x1 - dx * y1


def _on_line(key, pt) -> bool:
    dx, dy, off = key
    return dy * pt[0] - dx * pt[1] == off


def grid_lines(rows: int, cols: int):
    """Distinct lines through at least two points of the rows x cols grid.

    Returns ``(key, grid points)`` pairs sorted by the point lists; a key is
    ``(dx, dy, offset)`` with a primitive direction.
    """
    pts = [(i, j) for i in range(rows) for j in range(cols)]
    lines: dict[tuple, list] = {}
    for a, b in itertools.combinations(pts, 2):
        key = _line_key(a, b)
        if key not in lines:
            lines[key] = [p for p in pts if _on_line(key, p)]
    return sorted(lines.items(), key=lambda kv: kv[1])


def line_kind(key) -> str:
    dx, dy, _ = key
    if dx == 0:
        return "vertical"
    if dy == 0:
        return "horizontal"
    return "cross"


# Colors of the four extra points per line kind: two each of two colors.
GRID_PATTERN = {"vertical": (0, 0, 1, 1), "horizontal": (1, 1, 2, 2), "cross": (0, 0, 2, 2)}


def gen_grid_gadget(rows: int = 4, cols: int = 6) -> tuple[SetSystem, PartialColoring]:
    """Lines of the integer grid, each carrying four private pre-colored points.

    Lattice points ``(i, j)``, ``i < rows``, ``j < cols`` get index
    ``i*cols + j``.  For every line through two grid points four lattice
    points beyond the grid are picked by walking the primitive direction
    outward; a point is skipped if claimed already or if it lies on another
    of the lines, so the extra blocks are pairwise disjoint and each edge is
    exactly the trace of its line on grid + extra points.  Lines with
    constant first coordinate (6 grid points in the 4 x 6 case) get extra
    colors 0,0,1,1, lines with constant second coordinate get 1,1,2,2 and
    all other lines 0,0,2,2.
    """
    if rows < 2 or cols < 2:
        raise GadgetError("grid gadget needs at least a 2 x 2 grid")
    lines = grid_lines(rows, cols)
    keys = [k for k, _ in lines]
    claimed: set[tuple[int, int]] = set()
    extra: list[list[tuple[int, int]]] = []
    for idx, (key, gpts) in enumerate(lines):
        dx, dy, _ = key
        x, y = gpts[-1]
        chosen = []
        s = 0
        while len(chosen) < 4:
            s += 1
            if s > 10_000:
                raise GadgetError(f"could not place extra points on line {idx}")
            pt = (x + s * dx, y + s * dy)
            if pt in claimed:
                continue
            if any(_on_line(k2, pt) for j, k2 in enumerate(keys) if j != idx):
                continue
            chosen.append(pt)
            claimed.add(pt)
        extra.append(chosen)
    coords = [(i, j) for i in range(rows) for j in range(cols)]
    index = {p: n for n, p in enumerate(coords)}
    assignment = {}
    for (key, _), pts in zip(lines, extra):
        for pt, color in zip(pts, GRID_PATTERN[line_kind(key)]):
            index[pt] = len(coords)
            coords.append(pt)
            assignment[index[pt]] = color
    edges = []
    for (key, gpts), pts in zip(lines, extra):
        edges.append(tuple(sorted(index[p] for p in gpts + pts)))
    meta = {"family": "grid", "params": {"rows": rows, "cols": cols}, "mu": 2,
            "lines": len(lines), "extra_points": len(coords) - rows * cols,
            "coords": [list(p) for p in coords],
            "kinds": [line_kind(k) for k, _ in lines]}
    system = SetSystem(len(coords), tuple(edges), meta)
    return system, PartialColoring(3, assignment)


def check_grid_conditions(system: SetSystem, c: PartialColoring) -> dict:
    """Recount the structural requirements of the grid gadget from coordinates.

    Checks that every edge meets dom(c) in four points, that these blocks are
    pairwise disjoint, that every edge is the full trace of its geometric
    line on the point set, and the color conditions per line kind.
    """
    rows = system.meta["params"]["rows"]
    cols = system.meta["params"]["cols"]
    coords = [tuple(p) for p in system.meta["coords"]]
    grid = set(range(rows * cols))
    result = {"four_per_line": True, "blocks_disjoint": True, "lines_exact": True,
              "a": True, "b": True, "c": True}
    seen: set[int] = set()
    for e in system.edges:
        block = [v for v in e if v in c]
        gpts = [v for v in e if v in grid]
        if len(block) != 4 or len(block) + len(gpts) != len(e):
            result["four_per_line"] = False
        if seen & set(block):
            result["blocks_disjoint"] = False
        seen |= set(block)
        key = _line_key(coords[gpts[0]], coords[gpts[1]])
        if {v for v, p in enumerate(coords) if _on_line(key, p)} != set(e):
            result["lines_exact"] = False
        colors = sorted(c[v] for v in block)
        kind = line_kind(key)
        cond = {"vertical": "a", "horizontal": "b", "cross": "c"}[kind]
        if colors != sorted(GRID_PATTERN[kind]):
            result[cond] = False
    result["ok"] = all(result.values())
    return result


# -- lift and union --------------------------------------------------------------

def gen_lift0(base: SetSystem, t: int, cap: int = 10**6, sample: int | None = None,
              seed: int = 0) -> SetSystem:
    """2t disjoint copies of ``base`` plus every transversal of the copies.

    A transversal takes one vertex from the support of each copy, so it has
    2t elements.  With ``sample`` set, only that many transversals, drawn
    with a seeded generator, are added when the full count exceeds ``cap``.
    """
    if t < 1:
        raise GadgetError("t must be positive")
    ok, _ = is_almost_disjoint(base, ADParams(2 * t))
    if not ok:
        raise GadgetError(f"base system is not {2 * t}-almost disjoint")
    copies = 2 * t
    support = sorted(base.support)
    N = base.ground_size
    edges = [tuple(v + n * N for v in e) for n in range(copies) for e in base.edges]
    total = len(support) ** copies
    if total > cap:
        if sample is None:
            raise GadgetError(f"{total} transversals exceed cap {cap}; pass sample= to subsample")
        rng = random.Random(seed)
        chosen = set()
        while len(chosen) < min(sample, total):
            chosen.add(tuple(rng.choice(support) for _ in range(copies)))
        tuples = sorted(chosen)
    else:
        tuples = itertools.product(support, repeat=copies)
    for tup in tuples:
        edges.append(tuple(v + n * N for n, v in enumerate(tup)))
    meta = {"family": "lift0", "params": {"t": t, "sampled": total > cap},
            "base": base.meta, "mu": 2 * t, "copies": copies}
    return SetSystem(N * copies, tuple(edges), meta)


def gen_union(instances) -> SetSystem:
    """Disjoint union; part j is shifted by the total size of parts before it."""
    instances = list(instances)
    if not instances:
        raise GadgetError("union of nothing")
    edges = []
    offset = 0
    parts = []
    for s in instances:
        edges.extend(tuple(v + offset for v in e) for e in s.edges)
        parts.append({"offset": offset, "meta": s.meta})
        offset += s.ground_size
    return SetSystem(offset, tuple(edges), {"family": "union", "params": {"parts": len(instances)},
                                            "parts": parts})


def complete_graph(n: int) -> SetSystem:
    return SetSystem(n, tuple(itertools.combinations(range(n), 2)),
                     {"family": "complete", "params": {"n": n}})


def random_system(rng, n_vertices: int, n_edges: int, sizes=(2, 3), mu: int | None = None,
                  tries: int = 200) -> SetSystem:
    """Random system with edge sizes drawn from ``sizes``; optionally mu-almost disjoint.

    ``rng`` is a ``random.Random``.  Fewer edges than requested may come back
    when the almost-disjointness constraint blocks further sampling.
    """
    edges: list[tuple[int, ...]] = []
    masks: list[int] = []
    for _ in range(tries):
        if len(edges) >= n_edges:
            break
        size = rng.choice(sizes)
        if size > n_vertices:
            continue
        e = tuple(sorted(rng.sample(range(n_vertices), size)))
        m = sum(1 << v for v in e)
        if e in edges:
            continue
        if mu is not None and any((m & o).bit_count() >= mu for o in masks):
            continue
        edges.append(e)
        masks.append(m)
    return SetSystem(n_vertices, tuple(edges), {"family": "random",
                                                "params": {"n": n_vertices, "m": n_edges, "mu": mu}})


def n_transversals(base: SetSystem, t: int) -> int:
    return prod([len(base.support)] * (2 * t))
