"""Minor models: validity, fatness, ultra-fatness and the model transformations.

A branch path is stored with its endpoints, which lie in the two incident
branch sets.  For distance purposes a branch path is its interior: the
endpoints already belong to branch sets, and measuring them twice would make
any two paths leaving the same branch set distance 0 apart.  A path with an
empty interior (a single edge between two branch sets) therefore takes part
in no fatness pair.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .errors import ConstructionError, InvalidModelError, PreconditionError, UsageError
from .graph_core import GraphHandle, distance
from .hexgrid import FatnessSchedule, HexSubdivision

PatternVertex = Hashable
PatternEdge = tuple

PATTERN_KINDS = ("halfgrid_portion", "hexhalfgrid_portion", "omega_rays", "explicit")


# ---------------------------------------------------------------------------
# patterns


@dataclass(frozen=True)
class PatternDescriptor:
    """A finite pattern graph.

    halfgrid_portion: vertices (c, h) with c < cols, h < rows, minus the
    corner block c, h < corner.  hexhalfgrid_portion: same grid with the rung
    (x, y)(x+1, y) present only when x + y is even.  omega_rays: ``count``
    disjoint paths of ``length`` vertices, vertex (i, k) is position k on ray
    i.  explicit: given vertex names and edges.
    """

    kind: str
    rows: int = 0
    cols: int = 0
    corner: int = 0
    count: int = 0
    length: int = 0
    names: tuple = ()
    edge_list: tuple = ()

    def __post_init__(self):
        if self.kind not in PATTERN_KINDS:
            raise UsageError(f"unknown pattern kind {self.kind!r}")
        if min(self.rows, self.cols, self.corner, self.count, self.length) < 0:
            raise UsageError("pattern sizes must be nonnegative")

    @classmethod
    def halfgrid(cls, rows: int, cols: int, corner: int = 0) -> "PatternDescriptor":
        return cls("halfgrid_portion", rows=rows, cols=cols, corner=corner)

    @classmethod
    def hexhalfgrid(cls, rows: int, cols: int) -> "PatternDescriptor":
        return cls("hexhalfgrid_portion", rows=rows, cols=cols)

    @classmethod
    def omega(cls, count: int, length: int) -> "PatternDescriptor":
        return cls("omega_rays", count=count, length=length)

    @classmethod
    def explicit(cls, names: Iterable[str], edges: Iterable[tuple[str, str]]) -> "PatternDescriptor":
        names = tuple(sorted(set(names)))
        edges = tuple(sorted(tuple(sorted(e)) for e in edges))
        return cls("explicit", names=names, edge_list=edges)

    def vertices(self) -> list:
        if self.kind in ("halfgrid_portion", "hexhalfgrid_portion"):
            k = self.corner
            return [(c, h) for c in range(self.cols) for h in range(self.rows) if not (c < k and h < k)]
        if self.kind == "omega_rays":
            return [(i, k) for i in range(self.count) for k in range(self.length)]
        return list(self.names)

    def edges(self) -> list[tuple]:
        if self.kind == "explicit":
            return [tuple(e) for e in self.edge_list]
        vs = set(self.vertices())
        out = []
        for v in self.vertices():
            a, b = v
            if self.kind == "omega_rays":
                cand = [(a, b + 1)]
            elif self.kind == "halfgrid_portion":
                cand = [(a, b + 1), (a + 1, b)]
            else:
                cand = [(a, b + 1)] + ([(a + 1, b)] if (a + b) % 2 == 0 else [])
            out.extend((v, w) for w in cand if w in vs)
        return sorted(out)

    def to_json(self) -> dict:
        if self.kind == "halfgrid_portion":
            return {"kind": self.kind, "rows": self.rows, "cols": self.cols, "corner": self.corner}
        if self.kind == "hexhalfgrid_portion":
            return {"kind": self.kind, "rows": self.rows, "cols": self.cols}
        if self.kind == "omega_rays":
            return {"kind": self.kind, "count": self.count, "length": self.length}
        return {"kind": self.kind, "vertices": list(self.names), "edges": [list(e) for e in self.edge_list]}

    @classmethod
    def from_json(cls, data: dict) -> "PatternDescriptor":
        try:
            kind = data["kind"]
            if kind == "halfgrid_portion":
                return cls.halfgrid(data["rows"], data["cols"], data.get("corner", 0))
            if kind == "hexhalfgrid_portion":
                return cls.hexhalfgrid(data["rows"], data["cols"])
            if kind == "omega_rays":
                return cls.omega(data["count"], data["length"])
            if kind == "explicit":
                return cls.explicit(data["vertices"], [tuple(e) for e in data["edges"]])
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed pattern descriptor: {exc}") from exc
        raise UsageError(f"unknown pattern kind {kind!r}")


def pattern_token(x) -> str:
    return f"{x[0]},{x[1]}" if isinstance(x, tuple) else str(x)


def edge_token(e: tuple) -> str:
    return f"{pattern_token(e[0])}~{pattern_token(e[1])}"


def _parse_pattern_vertex(token: str, pattern: PatternDescriptor):
    if pattern.kind == "explicit":
        return token
    try:
        a, b = token.split(",")
        return (int(a), int(b))
    except ValueError as exc:
        raise UsageError(f"bad pattern vertex token {token!r}") from exc


# ---------------------------------------------------------------------------
# models


@dataclass
class MinorModel:
    pattern: PatternDescriptor
    branch_sets: dict = field(default_factory=dict)
    branch_paths: dict = field(default_factory=dict)

    def elements(self) -> list[tuple[str, object, frozenset]]:
        """Fatness elements in canonical order: branch sets, then path interiors."""
        out = [("V", x, frozenset(self.branch_sets[x])) for x in self.pattern.vertices() if x in self.branch_sets]
        for e in self.pattern.edges():
            if e in self.branch_paths:
                out.append(("E", e, frozenset(self.branch_paths[e][1:-1])))
        return out

    def element_vertices(self, key) -> frozenset:
        """All vertices of a branch set, or of a branch path including its ends."""
        if key in self.branch_sets:
            return frozenset(self.branch_sets[key])
        if key in self.branch_paths:
            return frozenset(self.branch_paths[key])
        raise UsageError(f"model has no element {key!r}")

    def all_vertices(self) -> set:
        out = set()
        for s in self.branch_sets.values():
            out.update(s)
        for p in self.branch_paths.values():
            out.update(p)
        return out

    def to_json(self, g: GraphHandle) -> dict:
        return {
            "pattern": self.pattern.to_json(),
            "branch_sets": {
                pattern_token(x): g.tokens(g.sorted(self.branch_sets[x]))
                for x in self.pattern.vertices()
                if x in self.branch_sets
            },
            "branch_paths": {
                edge_token(e): g.tokens(self.branch_paths[e]) for e in self.pattern.edges() if e in self.branch_paths
            },
        }

    @classmethod
    def from_json(cls, g: GraphHandle, data: dict) -> "MinorModel":
        """Parse a model; vertices outside the window are kept and flagged by validation."""
        try:
            pattern = PatternDescriptor.from_json(data["pattern"])
            sets = {
                _parse_pattern_vertex(k, pattern): frozenset(g.parse(t) for t in v)
                for k, v in data["branch_sets"].items()
            }
            paths = {}
            for k, v in data["branch_paths"].items():
                a, b = k.split("~")
                e = (_parse_pattern_vertex(a, pattern), _parse_pattern_vertex(b, pattern))
                paths[e] = tuple(g.parse(t) for t in v)
        except (KeyError, AttributeError, ValueError, TypeError) as exc:
            raise UsageError(f"malformed model: {exc}") from exc
        return cls(pattern, sets, paths)


# ---------------------------------------------------------------------------
# validity


@dataclass(frozen=True)
class ValidityReport:
    status: str  # "valid", "invalid" or "indeterminate"
    clause: str = ""
    element: str = ""
    vertex: object = None
    detail: str = ""

    @property
    def valid(self) -> bool:
        return self.status == "valid"

    def to_json(self, g: GraphHandle | None = None) -> dict:
        out = {"status": self.status}
        if self.clause:
            out.update(clause=self.clause, element=self.element, detail=self.detail)
            if self.vertex is not None:
                out["vertex"] = g.token(self.vertex) if g is not None and self.vertex in g else repr(self.vertex)
        return out


def _bad(clause, element, detail, vertex=None, status="invalid"):
    return ValidityReport(status, clause, element, vertex, detail)


def _elem_name(kind: str, key) -> str:
    return f"{kind}[{edge_token(key) if kind == 'E' else pattern_token(key)}]"


def validate_model(g: GraphHandle, m: MinorModel) -> ValidityReport:
    """Check every model invariant and name the first violated clause."""
    pattern = m.pattern
    pverts = pattern.vertices()
    pedges = pattern.edges()
    for x in pverts:
        for v in m.branch_sets.get(x, ()):
            if v not in g:
                return _bad("in_window", _elem_name("V", x), "vertex outside the window", v, "indeterminate")
    for e in pedges:
        for v in m.branch_paths.get(e, ()):
            if v not in g:
                return _bad("in_window", _elem_name("E", e), "vertex outside the window", v, "indeterminate")

    extra = set(m.branch_sets) - set(pverts)
    if extra:
        return _bad("coverage", repr(sorted(extra, key=repr)[0]), "branch set for a non-pattern vertex")
    extra = set(m.branch_paths) - set(pedges)
    if extra:
        return _bad("coverage", repr(sorted(extra, key=repr)[0]), "branch path for a non-pattern edge")
    for x in pverts:
        if x not in m.branch_sets:
            return _bad("coverage", _elem_name("V", x), "pattern vertex has no branch set")
        if not m.branch_sets[x]:
            return _bad("nonempty", _elem_name("V", x), "empty branch set")
    for e in pedges:
        if e not in m.branch_paths:
            return _bad("coverage", _elem_name("E", e), "pattern edge has no branch path")

    owner: dict = {}
    for x in pverts:
        for v in g.sorted(m.branch_sets[x]):
            if v in owner:
                return _bad("disjoint", _elem_name("V", x), f"shares a vertex with {_elem_name('V', owner[v])}", v)
            owner[v] = x

    for x in pverts:
        s = set(g.indices(m.branch_sets[x]))
        start = min(s)
        reach = g.bfs([start], blocked=lambda u: u not in s)
        if len(reach) != len(s):
            missing = g.vertex(min(s - set(reach)))
            return _bad("connected", _elem_name("V", x), "branch set does not induce a connected subgraph", missing)

    used: dict = {}
    for e in pedges:
        path = m.branch_paths[e]
        name = _elem_name("E", e)
        if len(path) < 2:
            return _bad("path", name, "branch path needs at least two vertices")
        if len(set(path)) != len(path):
            seen = set()
            rep = next(v for v in path if v in seen or seen.add(v))
            return _bad("path", name, "branch path repeats a vertex", rep)
        for a, b in zip(path, path[1:]):
            if g.idx(b) not in g.adj(g.idx(a)):
                return _bad("path", name, "consecutive vertices are not adjacent", b)
        x0, x1 = e
        ends = (owner.get(path[0]), owner.get(path[-1]))
        if ends not in ((x0, x1), (x1, x0)):
            return _bad("endpoints", name, "branch path does not join its two branch sets", path[0])
        for v in path[1:-1]:
            if v in owner:
                return _bad("interior", name, f"interior meets {_elem_name('V', owner[v])}", v)
            if v in used:
                return _bad("internally_disjoint", name, f"interior meets {_elem_name('E', used[v])}", v)
            used[v] = e
    return ValidityReport("valid")


# ---------------------------------------------------------------------------
# fatness


@dataclass(frozen=True)
class FatnessReport:
    """Minimum distance over non-exempt element pairs.

    ``achieved_K`` is None when no two non-exempt elements are connected
    inside the window (vacuously fat).  ``exact`` says whether the windowed
    minimum provably equals the true one.
    """

    achieved_K: int | None
    violating_pair: tuple | None
    exact: bool
    pairs: int = 0

    def at_least(self, K: int) -> bool:
        return self.achieved_K is None or self.achieved_K >= K

    def to_json(self) -> dict:
        out = {"achieved_K": self.achieved_K, "exact": self.exact, "pairs": self.pairs}
        if self.violating_pair is not None:
            a, b, d = self.violating_pair
            out["witness"] = {"first": a, "second": b, "distance": d}
        return out


def _exempt(a, b) -> bool:
    # exactly the incident (branch set, branch path) pairs
    (ka, xa, _), (kb, xb, _) = a, b
    if ka == kb:
        return False
    vert, edge = (xa, xb) if ka == "V" else (xb, xa)
    return vert in edge


def fatness(g: GraphHandle, m: MinorModel, check_validity: bool = True) -> FatnessReport:
    """Exact minimum distance over all non-exempt element pairs.

    Witness: the pair attaining the minimum whose first element comes first
    in canonical order, with its first partner.
    """
    if check_validity:
        rep = validate_model(g, m)
        if not rep.valid:
            raise InvalidModelError(rep)
    elems = [e for e in m.elements() if e[2]]
    owner: dict[int, int] = {}
    for k, (_, _, vs) in enumerate(elems):
        for v in vs:
            owner[g.idx(v)] = k
    n = len(elems)
    npairs = sum(1 for i in range(n) for j in range(i + 1, n) if not _exempt(elems[i], elems[j]))
    best: int | None = None
    witness = None
    adj = g.adj
    for i in range(n):
        if best == 0:
            break
        sources = g.indices(elems[i][2])
        limit = None if best is None else best - 1
        dist = {s: 0 for s in sources}
        queue = deque(sources)
        found: tuple[int, int] | None = None
        while queue:
            v = queue.popleft()
            d = dist[v]
            j = owner.get(v)
            if j is not None and j > i and not _exempt(elems[i], elems[j]):
                if found is None or (d, j) < found:
                    found = (d, j)
            if found is not None and d >= found[0]:
                continue
            if limit is not None and d >= limit:
                continue
            for u in adj(v):
                if u not in dist:
                    dist[u] = d + 1
                    queue.append(u)
        if found is not None and (best is None or found[0] < best):
            best = found[0]
            witness = (i, found[1])
    pair = None
    if witness is not None:
        a, b = elems[witness[0]], elems[witness[1]]
        pair = (_elem_name(a[0], a[1]), _elem_name(b[0], b[1]), best)
    exact = _window_exact(g, [v for e in elems for v in e[2]], best, npairs)
    return FatnessReport(best, pair, exact, npairs)


def _window_exact(g: GraphHandle, vertices: list, best: int | None, npairs: int) -> bool:
    """A true path shorter than ``best`` leaving the window passes an open vertex
    within ``best - 2`` of some element; rule that out."""
    if npairs == 0 or g.complete:
        return True
    if best is None:
        return False
    if best < 2:
        return True
    open_vs = [i for i in range(len(g)) if g._depth[i] >= g.horizon]
    if not open_vs:
        return True
    near = g.bfs(open_vs, limit=best - 2)
    return not any(g.idx(v) in near for v in vertices)


def pairwise_min_distance(g: GraphHandle, sets: list[Iterable]) -> int | None:
    """min_{i<j} d(sets[i], sets[j]); None when no pair is connected."""
    model = MinorModel(
        PatternDescriptor.explicit([str(i) for i in range(len(sets))], []),
        {str(i): frozenset(s) for i, s in enumerate(sets)},
        {},
    )
    return fatness(g, model, check_validity=False).achieved_K


# ---------------------------------------------------------------------------
# ultra-fatness


@dataclass(frozen=True)
class UltraFatRow:
    K: int
    passed: bool
    min_distance: int | None
    witness: tuple | None
    exact: bool
    elements: int

    def to_json(self) -> dict:
        out = {
            "K": self.K,
            "passed": self.passed,
            "min_distance": self.min_distance,
            "exact": self.exact,
            "elements": self.elements,
        }
        if self.witness is not None:
            out["witness"] = {"first": self.witness[0], "second": self.witness[1], "distance": self.witness[2]}
        return out


@dataclass(frozen=True)
class UltraFatTable:
    rows: tuple[UltraFatRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def passes_up_to(self) -> int:
        """Largest K such that every row up to K passed (-1 if row 0 failed)."""
        best = -1
        for r in self.rows:
            if not r.passed:
                break
            best = r.K
        return best

    def to_json(self) -> list[dict]:
        return [r.to_json() for r in self.rows]


def _require_halfgrid(m: MinorModel):
    if m.pattern.kind != "halfgrid_portion":
        raise UsageError(f"operation needs a halfgrid_portion pattern, got {m.pattern.kind}")


def submodel_beyond(m: MinorModel, K: int) -> MinorModel:
    """The submodel on pattern vertices (c, h) with c >= K or h >= K."""
    _require_halfgrid(m)
    p = m.pattern
    if K < 0 or K > max(p.rows, p.cols):
        raise UsageError(f"level {K} exceeds the {p.rows}x{p.cols} pattern")
    if K <= p.corner:
        return m
    sub = PatternDescriptor.halfgrid(p.rows, p.cols, K)
    keep_v = set(sub.vertices())
    keep_e = set(sub.edges())
    return MinorModel(
        sub,
        {x: s for x, s in m.branch_sets.items() if x in keep_v},
        {e: q for e, q in m.branch_paths.items() if e in keep_e},
    )


def ultrafat_table(g: GraphHandle, m: MinorModel, Kmax: int) -> UltraFatTable:
    """Row K: is the submodel beyond level K K-fat?  Row 0 is plain validity."""
    _require_halfgrid(m)
    rep = validate_model(g, m)
    rows = [UltraFatRow(0, rep.valid, None, None, rep.status != "indeterminate", len(m.elements()))]
    if not rep.valid:
        return UltraFatTable(tuple(rows))
    top = min(Kmax, max(m.pattern.rows, m.pattern.cols))
    for K in range(1, top + 1):
        sub = submodel_beyond(m, K)
        f = fatness(g, sub, check_validity=False)
        rows.append(UltraFatRow(K, f.at_least(K), f.achieved_K, f.violating_pair, f.exact, len(sub.elements())))
    return UltraFatTable(tuple(rows))


# ---------------------------------------------------------------------------
# divergence probe


@dataclass(frozen=True)
class ProbeRow:
    first: str
    second: str
    pattern_distance: int | None
    ambient_distance: int | None


@dataclass(frozen=True)
class DivergenceProbe:
    rows: tuple[ProbeRow, ...]
    trend: str
    branch_sets_finite: bool = True

    def to_json(self) -> dict:
        return {
            "rows": [vars(r) for r in self.rows],
            "trend": self.trend,
            "branch_sets_finite": self.branch_sets_finite,
        }


def _pattern_distances(pattern: PatternDescriptor, sources: Iterable) -> dict:
    adj: dict = {v: [] for v in pattern.vertices()}
    for a, b in pattern.edges():
        adj[a].append(b)
        adj[b].append(a)
    dist = {s: 0 for s in sources}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def _element_ends(m: MinorModel, key) -> list:
    if key in m.branch_sets:
        return [key]
    if key in m.branch_paths:
        return list(key)
    raise UsageError(f"model has no element {key!r}")


def _key_token(m: MinorModel, key) -> str:
    return pattern_token(key) if key in m.branch_sets else edge_token(key)


def divergence_probe(g: GraphHandle, m: MinorModel, pairs: list[tuple]) -> DivergenceProbe:
    """Pattern distance against ambient distance for the requested element pairs.

    An edge element sits at the pattern distance of its nearer endpoint.  This
    is a finite sample; no limit is claimed.
    """
    rows = []
    for a, b in pairs:
        ea, eb = _element_ends(m, a), _element_ends(m, b)
        if a == b:
            pd = 0
        else:
            pd_map = _pattern_distances(m.pattern, ea)
            reach = [pd_map[x] for x in eb if x in pd_map]
            pd = min(reach) if reach else None
        amb = distance(g, m.element_vertices(a), m.element_vertices(b))
        rows.append(ProbeRow(_key_token(m, a), _key_token(m, b), pd, amb))
    ordered = sorted((r for r in rows if r.pattern_distance is not None), key=lambda r: r.pattern_distance)
    amb = [r.ambient_distance if r.ambient_distance is not None else float("inf") for r in ordered]
    if len({r.pattern_distance for r in ordered}) > 1 and len(set(amb)) == 1:
        trend = "non-diverging sample"
    elif all(x <= y for x, y in zip(amb, amb[1:])):
        trend = "nondecreasing sample"
    else:
        trend = "mixed sample"
    return DivergenceProbe(tuple(rows), trend)


# ---------------------------------------------------------------------------
# contraction and regridding


def contract_hex_subdivision(g: GraphHandle, h: HexSubdivision, schedule: FatnessSchedule) -> MinorModel:
    """Contract a hexagonal subdivision into a rows x cols half-grid model.

    Branch set (c, h) is the stretch of column c covering the attachment
    points of both level-h rungs, widened by K_c - 1 on each side; vertical
    branch paths are the column stretches in between; horizontal branch
    paths are the subdivision's horizontal paths.
    """
    rows, cols = h.rows, h.cols
    pattern = PatternDescriptor.halfgrid(rows, cols)
    sets: dict = {}
    paths: dict = {}
    for c in range(cols):
        col = h.columns[c]
        K = schedule[c]
        margin = max(0, K - 1)
        spans = []
        for lvl in range(rows):
            att = h.column_attachments(c, lvl)
            if att:
                lo, hi = max(0, min(att) - margin), max(att) + margin
            else:
                # single-column pattern: sets spread 2K apart along the ray
                lo = hi = lvl * 2 * max(K, 1)
            if hi >= len(col):
                raise ConstructionError(
                    f"spacing infeasible: column {c} level {lvl} needs index {hi} beyond the materialized ray",
                    "contract",
                )
            spans.append((lo, hi))
        for lvl, (lo, hi) in enumerate(spans):
            sets[(c, lvl)] = frozenset(col[lo : hi + 1])
            if lvl + 1 < rows:
                lo2 = spans[lvl + 1][0]
                if lo2 <= hi:
                    raise ConstructionError(
                        f"spacing infeasible: column {c} branch sets at levels {lvl} and {lvl + 1} overlap",
                        "contract",
                    )
                paths[((c, lvl), (c, lvl + 1))] = tuple(col[hi : lo2 + 1])
        for lvl in range(rows - 1):
            d = distance(g, sets[(c, lvl)], sets[(c, lvl + 1)])
            if K > 0 and (d is None or d < K):
                raise ConstructionError(
                    f"spacing infeasible: column {c} levels {lvl},{lvl + 1} are {d} apart, need {K}",
                    "contract",
                )
    for (c, lvl), path in h.horizontals.items():
        if c + 1 < cols and lvl < rows:
            paths[((c, lvl), (c + 1, lvl))] = tuple(path)
    return MinorModel(pattern, sets, paths)


def graded_fatness_profile(g: GraphHandle, m: MinorModel, cap: int) -> list[tuple[int, FatnessReport]]:
    """Fatness of the column submodels c >= K for K = 1..cap."""
    _require_halfgrid(m)
    out = []
    for K in range(1, min(cap, m.pattern.cols - 1) + 1):
        sub = MinorModel(
            m.pattern,
            {x: s for x, s in m.branch_sets.items() if x[0] >= K},
            {e: p for e, p in m.branch_paths.items() if e[0][0] >= K and e[1][0] >= K},
        )
        out.append((K, fatness(g, sub, check_validity=False)))
    return out


def regrid_ultrafat(
    g: GraphHandle, m: MinorModel, rows: int | None = None, cols: int | None = None, cap: int | None = None
) -> MinorModel:
    """Re-index a column-graded half-grid model into an ultra-fat one.

    New column n runs along old level n, starting at old column n; new
    branch set (n, k) merges old sets (n+2k, n) and (n+2k+1, n) with the rung
    between them.  Every new element off the [K]x[K] corner then lives on old
    columns >= K, where the source is K-fat by hypothesis.
    """
    _require_halfgrid(m)
    old_rows, old_cols = m.pattern.rows, m.pattern.cols
    if old_cols == 1:
        return MinorModel(PatternDescriptor.halfgrid(1, 1), {(0, 0): m.branch_sets[(0, 0)]}, {})
    if rows is None or cols is None:
        s = 1
        while s + 1 <= old_rows and 3 * (s + 1) - 1 <= old_cols:
            s += 1
        rows, cols = s, s
    if cols > old_rows or cols + 2 * rows - 1 > old_cols:
        raise UsageError(f"a {rows}x{cols} regrid needs {cols} old levels and {cols + 2 * rows - 1} old columns")
    cap = max(rows, cols) if cap is None else cap
    for K, rep in graded_fatness_profile(g, m, cap):
        if not rep.at_least(K):
            raise PreconditionError(
                f"source model lacks the graded-fatness property: columns >= {K} are only {rep.achieved_K}-fat"
            )
    sets: dict = {}
    paths: dict = {}
    for n in range(cols):
        for k in range(rows):
            x = n + 2 * k
            rung = m.branch_paths[((x, n), (x + 1, n))]
            sets[(n, k)] = frozenset(m.branch_sets[(x, n)]) | frozenset(rung) | frozenset(m.branch_sets[(x + 1, n)])
            if n + 1 < cols:
                paths[((n, k), (n + 1, k))] = m.branch_paths[((x + 1, n), (x + 1, n + 1))]
            if k + 1 < rows:
                paths[((n, k), (n, k + 1))] = m.branch_paths[((x + 1, n), (x + 2, n))]
    return MinorModel(PatternDescriptor.halfgrid(rows, cols), sets, paths)


# ---------------------------------------------------------------------------
# diverging rays


@dataclass(frozen=True)
class DivergingRays:
    rays: tuple
    cuts: dict  # K -> per-ray index where levels >= K begin
    separations: tuple  # full-ray pairwise distances
    tail_separations: dict  # K -> pairwise distances of the tails cut at K


def extract_diverging_rays(g: GraphHandle, m: MinorModel, count: int, certified: int | None = None) -> DivergingRays:
    """One path per pattern column through that column's sets and vertical paths."""
    from .rays import Ray

    _require_halfgrid(m)
    p = m.pattern
    if count < 1 or count > p.cols:
        raise UsageError(f"count {count} exceeds the {p.cols} pattern columns")
    certified = p.rows if certified is None else certified
    rays = []
    level_starts = []
    for c in range(count):
        seq: list = []
        starts = []
        entry = None
        for lvl in range(p.rows):
            s = m.branch_sets[(c, lvl)]
            up = m.branch_paths.get(((c, lvl), (c, lvl + 1)))
            if entry is None:
                entry = up[0] if up is not None else g.sorted(s)[0]
            starts.append(len(seq))
            seq.extend(_route_in(g, s, entry, up[0] if up is not None else entry))
            if up is not None:
                seq.extend(up[1:-1])
                entry = up[-1]
        rays.append(Ray(tuple(seq)))
        level_starts.append(starts)
    n = len(rays)
    sep = tuple(
        tuple(0 if i == j else distance(g, rays[i].prefix, rays[j].prefix) for j in range(n)) for i in range(n)
    )
    cuts = {}
    tails = {}
    for K in range(1, certified + 1):
        if K >= p.rows:
            break
        cut = [level_starts[c][K] for c in range(n)]
        cuts[K] = cut
        tails[K] = tuple(
            tuple(
                0 if i == j else distance(g, rays[i].prefix[cut[i] :], rays[j].prefix[cut[j] :]) for j in range(n)
            )
            for i in range(n)
        )
    return DivergingRays(tuple(rays), cuts, sep, tails)


def _route_in(g: GraphHandle, s, a, b) -> list:
    idx = set(g.indices(s))
    _, parent, hit = g.bfs_tree([g.idx(a)], {g.idx(b)}, blocked=lambda u: u not in idx)
    if hit is None:
        raise ConstructionError("branch set is not connected", "extract")
    return [g.vertex(i) for i in g.trace(parent, hit)]
