"""From a family of far-apart fat rays to a fat half-grid model.

Stages, in order:

1. ``choose_connectors``: short paths between consecutive rays, each one
   kept 4K_j - 4 away from all earlier ones and pushed past the earlier
   ones' footprint on every ray it comes near.
2. ``build_auxiliary_graph``: rays plus connector pieces outside the
   (K_k - 1)-balls of the rays, with shortcut edges standing in for the
   removed pieces.
3. ``find_hex_subdivision``: one routed path per connector blob between
   consecutive rays.
4. ``lift_horizontal_paths``: expand shortcuts back into G and accept, rung
   by rung in sweep order, the first lift that keeps away from everything
   already accepted.
5. ``assemble_hex_subdivision``: measure the four distance clauses.
6. Contract (and, for ultra-fat output, regrid) into a half-grid model.
"""
from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

from .errors import CoarseGridError, ConstructionError, PreconditionError, UsageError
from .graph_core import GraphHandle
from .hexgrid import FatnessSchedule, HexSubdivision, fig1_order
from .minor_model import (
    MinorModel,
    contract_hex_subdivision,
    fatness,
    regrid_ultrafat,
    ultrafat_table,
)
from .ray_families import RayFamily, annulus_ray_family, separation_table, translate_ray_family
from .rays import (
    automorphism,
    default_automorphisms,
    fat_ray_certificate,
    geodesic_ray,
    invariant_double_ray,
    ray_vertices,
)

__all__ = [
    "Connector",
    "AuxiliaryGraph",
    "Blob",
    "RoutedPattern",
    "HexSubdivision",
    "ClauseCheck",
    "AssemblyReport",
    "choose_connectors",
    "build_auxiliary_graph",
    "find_hex_subdivision",
    "lift_horizontal_paths",
    "assemble_hex_subdivision",
    "select_family",
    "auto_family",
    "pipeline_halfgrid",
]


def _ray_indices(g: GraphHandle, family: RayFamily) -> list[list[int]]:
    return [g.indices(ray_vertices(r)) for r in family.rays]


def _require_schedule(schedule: FatnessSchedule, n: int):
    for k in range(n):
        if schedule[k] < 1:
            raise PreconditionError(f"fatness schedule entry {k} is {schedule[k]}; the pipeline needs entries >= 1")


# ---------------------------------------------------------------------------
# connectors


@dataclass(frozen=True)
class Connector:
    """Path from ray ``rays[0]`` to ray ``rays[1]``.

    ``marks[k]`` lists the positions on ray k lying within distance K_k - 1
    of the path.  ``clearance`` is the distance to the nearest earlier
    connector (None for the first one) and ``required`` is 4K - 3.
    """

    index: int
    rays: tuple[int, int]
    path: tuple
    marks: dict
    clearance: int | None
    required: int

    def to_json(self, g: GraphHandle) -> dict:
        return {
            "index": self.index,
            "rays": list(self.rays),
            "path": g.tokens(self.path),
            "marks": {str(k): list(v) for k, v in sorted(self.marks.items())},
            "clearance": self.clearance,
            "required": self.required,
        }


def choose_connectors(
    g: GraphHandle,
    family: RayFamily,
    demand: list[tuple[int, int]],
    schedule: FatnessSchedule | None = None,
    slack: int | None = None,
) -> list[Connector]:
    """Choose one connector per demand pair, in demand order.

    Connector j avoids the (4K - 4)-balls around all earlier connectors,
    where K is the schedule entry of the higher ray of its pair, and the
    (K_k - 1)-balls around the initial segment of every ray k up to one past
    the last position an earlier connector came within K_k - 1 of.  Its
    interior avoids every ray.  Ties between shortest candidates go to the
    earliest start on the ray.  Ray vertices closer than ``slack`` to the
    window boundary are never used as ends, so that distances around the
    result stay exact (default 4 * max K + 4).
    """
    schedule = family.schedule if schedule is None else schedule
    n = len(family.rays)
    for k, l in demand:
        if not (0 <= k < n and 0 <= l < n) or k == l:
            raise UsageError(f"demand ({k}, {l}) does not name two distinct rays of a family of {n}")
    _require_schedule(schedule, n)
    rays = _ray_indices(g, family)
    on_ray: dict[int, int] = {}
    for k, r in enumerate(rays):
        for v in r:
            on_ray.setdefault(v, k)
    Ks = [schedule[k] for k in range(n)]
    Kmax = max(Ks) if Ks else 1
    slack = 4 * Kmax + 4 if slack is None else slack
    inner = (lambda v: True) if g.complete else (lambda v: g._depth[v] <= g.horizon - slack)
    out: list[Connector] = []
    for j, (k, l) in enumerate(demand):
        Kj = schedule[max(k, l)]
        forbidden: set[int] = set()
        for P in out:
            forbidden |= g.ball_indices(frozenset(g.indices(P.path)), 4 * Kj - 4)
        for m in range(n):
            near = [t for P in out for t in P.marks.get(m, ())]
            if near:
                stop = min(max(near) + 1, len(rays[m]) - 1)
                forbidden |= g.ball_indices(frozenset(rays[m][: stop + 1]), Ks[m] - 1)
        sources = [v for v in rays[k] if v not in forbidden and inner(v)]
        srcset = set(sources)
        targets = {v for v in rays[l] if v not in forbidden and inner(v)}

        def blocked(u, forbidden=forbidden, srcset=srcset, targets=targets):
            return u in forbidden or (u in on_ray and u not in srcset and u not in targets)

        _, parent, hit = g.bfs_tree(sources, targets, blocked)
        if hit is None:
            raise ConstructionError(
                f"no connector for demand {j} between rays {k} and {l} in the depleted window",
                "connectors",
            )
        pidx = g.trace(parent, hit)
        near = g.bfs(pidx, limit=Kmax - 1)
        marks = {}
        for m in range(n):
            pos = tuple(t for t, v in enumerate(rays[m]) if near.get(v, Kmax) <= Ks[m] - 1)
            if pos:
                marks[m] = pos
        clearance = None
        if out:
            prior = set()
            for P in out:
                prior.update(g.indices(P.path))
            dist, _, hit2 = g.bfs_tree(pidx, prior)
            clearance = dist[hit2] if hit2 is not None else None
        out.append(Connector(j, (k, l), tuple(g.vertex(i) for i in pidx), marks, clearance, 4 * Kj - 3))
    return out


# ---------------------------------------------------------------------------
# auxiliary graph


@dataclass(frozen=True)
class Blob:
    """Connected piece of the auxiliary graph grown from one connector.

    ``rays`` is the index set of rays the connector comes within K_k - 1 of;
    ``stretches[k]`` is the (first, last) position on ray k the blob uses.
    """

    connector: int
    vertices: frozenset
    rays: tuple
    stretches: dict


@dataclass
class AuxiliaryGraph:
    """Ray vertices plus trimmed connectors, with three edge classes.

    Class 1 edges are the edges of G between auxiliary vertices.  A class 2
    edge joins a ray-k vertex to a trimmed-connector vertex at distance
    exactly K_k.  A class 3 edge joins vertices u on ray k and v on ray l
    when some connector edge (a, b) has d(u, a) <= K_k - 1 and
    d(v, b) <= K_l - 1; ``witness`` records that connector edge.
    All vertices are window indices.
    """

    g: GraphHandle
    family: RayFamily
    schedule: FatnessSchedule
    connectors: list
    rays: list
    trimmed: list
    class2: list
    class3: list
    blobs: list
    vertices: frozenset
    extra: dict = field(default_factory=dict)

    def neighbors(self, v: int, within: frozenset | None = None) -> list[int]:
        pool = self.vertices if within is None else within
        out = [u for u in self.g.adj(v) if u in pool]
        for u in self.extra.get(v, ()):
            if u in pool and u not in out:
                out.append(u)
        return out

    def edge_kind(self, u: int, v: int) -> tuple:
        """(class, connector, witness) for a non-original edge; (1, None, None) for edges of G."""
        if v in self.g.adj(u):
            return (1, None, None)
        return self.extra_info[(u, v)]

    @cached_property
    def extra_info(self) -> dict:
        info = {}
        for u, v, ci in self.class2:
            info.setdefault((u, v), (2, ci, None))
            info.setdefault((v, u), (2, ci, None))
        for u, v, ci, wit in self.class3:
            info.setdefault((u, v), (3, ci, wit))
            info.setdefault((v, u), (3, ci, (wit[1], wit[0])))
        return info

    def summary(self) -> dict:
        g = self.g
        return {
            "trimmed": [g.tokens(g.vertex(i) for i in t) for t in self.trimmed],
            "class2": [[g.token(g.vertex(u)), g.token(g.vertex(v)), ci] for u, v, ci in self.class2],
            "class3": [
                [g.token(g.vertex(u)), g.token(g.vertex(v)), ci, g.tokens(g.vertex(i) for i in w)]
                for u, v, ci, w in self.class3
            ],
            "blobs": [
                {"connector": b.connector, "rays": list(b.rays), "size": len(b.vertices)} for b in self.blobs
            ],
        }


def build_auxiliary_graph(
    g: GraphHandle,
    family: RayFamily,
    connectors: list[Connector],
    schedule: FatnessSchedule | None = None,
) -> AuxiliaryGraph:
    """Build the auxiliary graph and one blob per connector.

    A blob is the trimmed connector together with, on every ray the
    connector comes near, the stretch between the first and last ray vertex
    it is joined to.
    """
    schedule = family.schedule if schedule is None else schedule
    n = len(family.rays)
    _require_schedule(schedule, n)
    rays = _ray_indices(g, family)
    Ks = [schedule[k] for k in range(n)]
    Kmax = max(Ks) if Ks else 1
    on_ray: dict[int, tuple[int, int]] = {}
    for k, r in enumerate(rays):
        for t, v in enumerate(r):
            on_ray.setdefault(v, (k, t))
    # owner of each fattened-ball vertex; balls are disjoint when rays are K_k + K_l - 1 apart
    owner: dict[int, int] = {}
    for k, r in enumerate(rays):
        for v in g.ball_indices(frozenset(r), Ks[k] - 1):
            owner.setdefault(v, k)
    trimmed, class2, class3, blobs = [], [], [], []
    extra: dict[int, list[int]] = defaultdict(list)
    vertex_pool: set[int] = set(on_ray)

    def add_extra(u, v):
        if v not in extra[u]:
            extra[u].append(v)
        if u not in extra[v]:
            extra[v].append(u)

    for ci, P in enumerate(connectors):
        pidx = g.indices(P.path)
        tr = tuple(v for v in pidx if v not in owner)
        trimmed.append(tr)
        vertex_pool.update(tr)
        attach: dict[int, set[int]] = defaultdict(set)
        for v in pidx:
            if v in on_ray:
                k, t = on_ray[v]
                attach[k].add(t)
        for v in tr:
            for u in g.adj(v):
                if u in on_ray:
                    k, t = on_ray[u]
                    attach[k].add(t)
            for u, d in g.bfs([v], limit=Kmax).items():
                if u in on_ray:
                    k, t = on_ray[u]
                    if d == Ks[k]:
                        class2.append((u, v, ci))
                        attach[k].add(t)
                        if v not in g.adj(u):
                            add_extra(u, v)
        for a, b in zip(pidx, pidx[1:]):
            ka, kb = owner.get(a), owner.get(b)
            if ka is None or kb is None or ka == kb:
                continue
            ua = sorted(u for u in g.bfs([a], limit=Ks[ka] - 1) if on_ray.get(u, (None,))[0] == ka)
            vb = sorted(u for u in g.bfs([b], limit=Ks[kb] - 1) if on_ray.get(u, (None,))[0] == kb)
            for u in ua:
                for v in vb:
                    class3.append((u, v, ci, (a, b)))
                    attach[ka].add(on_ray[u][1])
                    attach[kb].add(on_ray[v][1])
                    if v not in g.adj(u):
                        add_extra(u, v)
        near_rays = tuple(sorted(P.marks))
        verts = set(tr)
        stretches = {}
        for k in sorted(attach):
            lo, hi = min(attach[k]), max(attach[k])
            stretches[k] = (lo, hi)
            verts.update(rays[k][lo : hi + 1])
        blobs.append(Blob(ci, frozenset(verts), near_rays, stretches))
    return AuxiliaryGraph(
        g,
        family,
        schedule,
        list(connectors),
        rays,
        trimmed,
        class2,
        class3,
        blobs,
        frozenset(vertex_pool),
        dict(extra),
    )


# ---------------------------------------------------------------------------
# routing in the auxiliary graph


@dataclass
class RoutedPattern:
    """Candidate auxiliary-graph paths per rung (c, h), best first.

    Each candidate is (blob index, path of window indices) running from
    column c to column c + 1 with no other column vertex on it.
    """

    rows: int
    cols: int
    candidates: dict
    blocked: list
    order: tuple

    def primary(self, rung) -> tuple:
        return self.candidates[rung][rung[1]]


def _route_blob(aux: AuxiliaryGraph, blob: Blob, c: int, cols: int) -> list[int] | None:
    rays = aux.rays
    src = [v for v in rays[c] if v in blob.vertices]
    tgt = {v for v in rays[c + 1] if v in blob.vertices}
    if not src or not tgt:
        return None
    others = set()
    for k in range(cols):
        if k not in (c, c + 1):
            others.update(v for v in rays[k] if v in blob.vertices)
    srcset = set(src)
    parent = {s: -1 for s in src}
    queue = list(src)
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for u in aux.neighbors(v, blob.vertices):
            if u in parent or u in others or u in srcset:
                continue
            parent[u] = v
            if u in tgt:
                path = [u]
                while parent[path[-1]] != -1:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(u)
    return None


def find_hex_subdivision(aux: AuxiliaryGraph, rows: int, cols: int) -> RoutedPattern:
    """Route one path per blob between consecutive columns.

    Columns are the first ``cols`` rays of the family.  The blobs of pair
    (c, c + 1) are taken in connector order; rung (c, h) gets the h-th one
    as its primary candidate and the rest as spares.
    """
    if rows < 1 or cols < 2:
        raise UsageError("a hexagonal portion needs at least 1 row and 2 columns")
    if cols > len(aux.rays):
        raise ConstructionError(
            f"insufficient rays: {cols} columns requested, family has {len(aux.rays)}", "routing", hint="more rays"
        )
    by_pair: dict[int, list[tuple[int, list[int]]]] = defaultdict(list)
    blocked = []
    for bi, blob in enumerate(aux.blobs):
        k, l = aux.connectors[blob.connector].rays
        c = min(k, l)
        if abs(k - l) != 1 or c + 1 >= cols:
            continue
        path = _route_blob(aux, blob, c, cols)
        if path is None:
            blocked.append(bi)
        else:
            by_pair[c].append((bi, path))
    for c in range(cols - 1):
        have = len(by_pair[c])
        if have < rows:
            names = [b for b in blocked if min(aux.connectors[aux.blobs[b].connector].rays) == c]
            extra = f"; blocked blobs {names}" if names else ""
            raise ConstructionError(
                f"insufficient connectors: columns {c},{c + 1} have {have} routable blobs, need {rows}{extra}",
                "routing",
                hint="more connectors",
            )
    order = tuple(fig1_order(rows, cols))
    cands = {(c, h): list(by_pair[c]) for (c, h) in order}
    return RoutedPattern(rows, cols, cands, blocked, order)


# ---------------------------------------------------------------------------
# lifting


def _prune_walk(walk: list[int]) -> list[int]:
    """Erase loops, keeping the first occurrence of every vertex."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for v in walk:
        if v in pos:
            cut = pos[v]
            for w in out[cut + 1 :]:
                del pos[w]
            del out[cut + 1 :]
        else:
            pos[v] = len(out)
            out.append(v)
    return out


def _corridor(g: GraphHandle, a: int, b: int) -> list[int]:
    _, parent, hit = g.bfs_tree([a], {b})
    return g.trace(parent, hit)


def _lift(aux: AuxiliaryGraph, path: list[int]) -> tuple[list[int], list[tuple]]:
    """Expand a routed path into a walk in G, then prune it to a path.

    Returns the path and the list of (class, length) of every expansion.
    """
    g = aux.g
    info = aux.extra_info
    rays = aux.rays
    on_ray = {v: k for k, r in enumerate(rays) for v in r}
    walk = [path[0]]
    used = []
    for u, v in zip(path, path[1:]):
        if v in g.adj(u):
            walk.append(v)
            continue
        kind, _ci, wit = info[(u, v)]
        if kind == 2:
            seg = _corridor(g, u, v)
        else:
            a, b = wit
            seg = _corridor(g, u, a) + _corridor(g, b, v)
        used.append((kind, len(seg) - 1, on_ray.get(u), on_ray.get(v)))
        walk.extend(seg[1:])
    return _prune_walk(walk), used


def _entry_ok(dist_to_col: dict[int, int], W: list[int], K: int) -> bool:
    # the vertices of W within K - 1 of the column are exactly W[0..K-1], at distances 0..K-1
    near = [t for t, v in enumerate(W) if dist_to_col.get(v, K) <= K - 1]
    return near == list(range(K)) and all(dist_to_col.get(W[t]) == t for t in range(K))


def lift_horizontal_paths(
    g: GraphHandle,
    aux: AuxiliaryGraph,
    routed: RoutedPattern,
    schedule: FatnessSchedule | None = None,
) -> HexSubdivision:
    """Lift routed paths to G and pick one per rung in sweep order.

    A candidate W for rung (c, h) is accepted when its ends lie past every
    earlier attachment on both columns, its two end segments are clean
    corridors of lengths K_c - 1 and K_{c+1} - 1, and, with K = K_c:

    (a) every connector W meets is 2K - 1 away from all accepted paths;
    (b) on every ray W meets, the shared vertices are K away from all
        accepted paths;
    (c) ray vertices whose (K_k - 1)-balls meet W are 2K_k - 1 away from
        ray vertices whose balls meet an accepted path.
    """
    schedule = aux.schedule if schedule is None else schedule
    rays = aux.rays
    n = len(rays)
    Ks = [schedule[k] for k in range(n)]
    Kmax = max(Ks)
    cols, rows = routed.cols, routed.rows
    on_conn: dict[int, list[int]] = defaultdict(list)
    for ci, P in enumerate(aux.connectors):
        for v in g.indices(P.path):
            on_conn[v].append(ci)
    on_ray = {}
    for k, r in enumerate(rays):
        for t, v in enumerate(r):
            on_ray.setdefault(v, (k, t))
    col_dist = [g.bfs(rays[c], limit=Kmax) for c in range(cols)]
    accepted: set[int] = set()
    near_acc: list[set[int]] = [set() for _ in range(n)]
    last = [-1] * cols
    used_blobs: set[int] = set()
    horizontals, attach, sources = {}, {}, {}
    for rung in routed.order:
        c, _h = rung
        K = Ks[c]
        failures = []
        chosen = None
        for bi, qpath in routed.candidates[rung]:
            if bi in used_blobs:
                continue
            W, _ = _lift(aux, qpath)
            a0, a1 = on_ray[W[0]][1], on_ray[W[-1]][1]
            if a0 <= last[c] or a1 <= last[c + 1]:
                failures.append((bi, "order"))
                continue
            if not (_entry_ok(col_dist[c], W, Ks[c]) and _entry_ok(col_dist[c + 1], W[::-1], Ks[c + 1])):
                failures.append((bi, "(iii)"))
                continue
            bad = None
            if accepted:
                for ci in sorted({ci for v in W for ci in on_conn.get(v, ())}):
                    reach = g.bfs(g.indices(aux.connectors[ci].path), limit=2 * K - 2)
                    if any(v in accepted for v in reach):
                        bad = "(a)"
                        break
            if bad is None and accepted:
                hits = defaultdict(list)
                for v in W:
                    if v in on_ray:
                        hits[on_ray[v][0]].append(v)
                for k, vs in sorted(hits.items()):
                    if any(v in accepted for v in g.bfs(vs, limit=K - 1)):
                        bad = "(b)"
                        break
            nearW = [set() for _ in range(n)]
            if bad is None:
                reachW = g.bfs(W, limit=Kmax - 1)
                for v, d in reachW.items():
                    if v in on_ray:
                        k = on_ray[v][0]
                        if d <= Ks[k] - 1:
                            nearW[k].add(v)
                for k in range(n):
                    if nearW[k] and near_acc[k]:
                        reach = g.bfs(nearW[k], limit=2 * Ks[k] - 2)
                        if any(v in near_acc[k] for v in reach):
                            bad = "(c)"
                            break
            if bad is not None:
                failures.append((bi, bad))
                continue
            chosen = (bi, W, a0, a1, nearW)
            break
        if chosen is None:
            why = ", ".join(f"blob {b}: {r}" for b, r in failures) or "no unused candidates"
            raise ConstructionError(f"no lift for rung {rung} is acceptable ({why})", "lift", hint="more connectors")
        bi, W, a0, a1, nearW = chosen
        used_blobs.add(bi)
        accepted.update(W)
        for k in range(n):
            near_acc[k] |= nearW[k]
        last[c], last[c + 1] = a0, a1
        horizontals[rung] = tuple(g.vertex(v) for v in W)
        attach[rung] = (a0, a1)
        sources[rung] = aux.blobs[bi].connector
    fam_idx = tuple(range(cols))
    columns = tuple(tuple(ray_vertices(aux.family.rays[c])) for c in range(cols))
    return HexSubdivision(rows, cols, columns, fam_idx, horizontals, attach, routed.order, sources)


# ---------------------------------------------------------------------------
# clause verification


@dataclass(frozen=True)
class ClauseCheck:
    clause: str
    subject: str
    measured: int | None
    required: int
    ok: bool

    @property
    def margin(self) -> int | None:
        return None if self.measured is None else self.measured - self.required

    def to_json(self) -> dict:
        return {
            "clause": self.clause,
            "subject": self.subject,
            "measured": self.measured,
            "required": self.required,
            "ok": self.ok,
        }


@dataclass
class AssemblyReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[ClauseCheck]:
        return [c for c in self.checks if not c.ok]

    def min_margin(self, clause: str) -> int | None:
        ms = [c.margin for c in self.checks if c.clause == clause and c.margin is not None]
        return min(ms) if ms else None

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _set_distance(g: GraphHandle, A: list[int], B: set[int]) -> int | None:
    dist, _, hit = g.bfs_tree(A, B)
    return None if hit is None else dist[hit]


def assemble_hex_subdivision(
    g: GraphHandle,
    h: HexSubdivision,
    schedule: FatnessSchedule,
    family: RayFamily | None = None,
) -> AssemblyReport:
    """Measure clauses (i)-(iv) of a hexagonal subdivision by BFS.

    (i) columns are distinct family rays in increasing index order;
    (ii) rung (c, h) keeps K_k away from every other column k;
    (iii) near each end column, the rung is a corridor of length K - 1;
    (iv) two rungs at columns i and j are K_n apart with n = min(K_i, K_j).
    Schedule entries are indexed by column.
    """
    checks: list[ClauseCheck] = []
    fi = list(h.family_indices)
    ok_i = len(set(fi)) == len(fi) and fi == sorted(fi)
    if family is not None:
        for c, col in enumerate(h.columns):
            ray = ray_vertices(family.rays[fi[c]]) if fi[c] < len(family.rays) else ()
            same = tuple(ray[: len(col)]) == tuple(col)
            checks.append(ClauseCheck("i", f"column {c}", int(same), 1, same and ok_i))
    else:
        checks.append(ClauseCheck("i", "column order", int(ok_i), 1, ok_i))
    cols_idx = [g.indices(col) for col in h.columns]
    col_sets = [set(ci) for ci in cols_idx]
    rungs = [r for r in h.order if r in h.horizontals]
    paths = {r: g.indices(h.horizontals[r]) for r in rungs}
    for r in rungs:
        c, lvl = r
        for k in range(h.cols):
            if k in (c, c + 1):
                continue
            d = _set_distance(g, paths[r], col_sets[k])
            checks.append(ClauseCheck("ii", f"rung {c},{lvl} vs column {k}", d, schedule[k], d is None or d >= schedule[k]))
        for end, k in ((0, c), (1, c + 1)):
            K = schedule[k]
            W = paths[r] if end == 0 else paths[r][::-1]
            dist = g.bfs(cols_idx[k], limit=K)
            near = [t for t, v in enumerate(W) if dist.get(v, K) <= K - 1]
            good = near == list(range(K)) and all(dist.get(W[t]) == t for t in range(K))
            checks.append(ClauseCheck("iii", f"rung {c},{lvl} at column {k}", len(near) - 1, K - 1, good))
    for a in range(len(rungs)):
        for b in range(a + 1, len(rungs)):
            ra, rb = rungs[a], rungs[b]
            need = schedule[min(schedule[ra[0]], schedule[rb[0]])]
            d = _set_distance(g, paths[ra], set(paths[rb]))
            checks.append(
                ClauseCheck("iv", f"rung {ra[0]},{ra[1]} vs rung {rb[0]},{rb[1]}", d, need, d is None or d >= need)
            )
    return AssemblyReport(checks)


# ---------------------------------------------------------------------------
# end-to-end


def _column_schedule(mode: str, K: int | None, cols: int, cap: int) -> FatnessSchedule:
    if mode == "kfat":
        return FatnessSchedule.constant(K, cols)
    return FatnessSchedule.graded(cols, cap)


def select_family(g: GraphHandle, family: RayFamily, schedule: FatnessSchedule, count: int) -> RayFamily:
    """Greedily keep rays, in family order, that are K_a + K_b - 1 away from every kept ray.

    Position p in the selection carries requirement ``schedule[p]``.
    """
    keep: list[int] = []
    for i in range(len(family.rays)):
        p = len(keep)
        if all(
            family.separations[a][i] is None or family.separations[a][i] >= schedule[q] + schedule[p] - 1
            for q, a in enumerate(keep)
        ):
            keep.append(i)
            if len(keep) == count:
                break
    if len(keep) < count:
        raise ConstructionError(
            f"only {len(keep)} of {count} rays are far enough apart", "family", hint="enlarge window"
        )
    rays = [family.rays[i] for i in keep]
    seps = tuple(tuple(family.separations[a][b] for b in keep) for a in keep)
    sched = FatnessSchedule(tuple(schedule[p] for p in range(count)))
    notes = dict(family.notes)
    notes["selected"] = keep
    return RayFamily(rays, sched, seps, "schedule_sum", [family.annuli[i] for i in keep] if family.annuli else [], notes)


def auto_family(g: GraphHandle, count: int, automorphisms: list[str] | None = None) -> RayFamily:
    """Build a candidate family from the generator's automorphisms.

    A non-elliptic automorphism gives the annulus family around its
    invariant double ray; otherwise the elliptic list gives translates of a
    geodesic ray.
    """
    ids = default_automorphisms(g) if automorphisms is None else automorphisms
    if not ids:
        raise PreconditionError(f"generator {g.spec.name} supplies no automorphism data; pass an explicit ray family")
    autos = [automorphism(g, a) for a in ids]
    moving = [phi for phi in autos if phi.kind != "elliptic"]
    if moving:
        phi = moving[0]
        axis = invariant_double_ray(g, phi)
        return annulus_ray_family(g, axis.ray, phi, count)
    base = geodesic_ray(g, g.basepoint)
    return translate_ray_family(g, base, autos)


def _check_kfat_family(family: RayFamily, K: int, cols: int):
    sep = None
    for i in range(cols):
        for j in range(i + 1, cols):
            d = family.separations[i][j]
            if d is not None and (sep is None or d < sep):
                sep = d
    if sep is not None and sep < 2 * K - 1:
        raise PreconditionError(f"family separation {sep} is below the 2K-1 = {2 * K - 1} bound")


def pipeline_halfgrid(
    g: GraphHandle,
    mode: str,
    rows: int,
    cols: int,
    K: int | None = None,
    source: RayFamily | None = None,
    automorphisms: list[str] | None = None,
    spare: int = 1,
    cap: int | None = None,
    seed: int | None = None,
):
    """Run all stages and return a certificate for a rows x cols half-grid model.

    ``mode`` is "kfat" (needs ``K``) or "ultrafat".  With ``source`` None the
    ray family is built from automorphism data.
    """
    from .certificates import Certificate

    t0 = time.perf_counter()
    if mode not in ("kfat", "ultrafat"):
        raise UsageError(f"unknown mode {mode!r}; expected kfat or ultrafat")
    if rows < 1 or cols < 1:
        raise UsageError("rows and cols must be positive")
    if spare < 1:
        raise UsageError("spare factor must be at least 1")
    if mode == "kfat":
        if K is None or K < 1:
            raise UsageError("kfat mode needs K >= 1")
        hex_rows, hex_cols = rows, max(cols, 2)
        cap = None
    else:
        cap = max(rows, cols) if cap is None else cap
        if cols == 1 and rows == 1:
            hex_rows, hex_cols = 1, 2
        else:
            hex_rows, hex_cols = cols, cols + 2 * rows - 1
    schedule = _column_schedule(mode, K, hex_cols, cap or 1)

    stage = "family"
    try:
        if source is None:
            need = hex_cols
            count = need
            while True:
                cand = auto_family(g, count, automorphisms)
                try:
                    family = select_family(g, cand, schedule, need)
                    break
                except ConstructionError:
                    if len(cand.rays) < count or count >= 4 * need:
                        raise
                    count += need
        else:
            if len(source.rays) < hex_cols:
                raise PreconditionError(f"family has {len(source.rays)} rays, {hex_cols} columns needed")
            rays = list(source.rays[:hex_cols])
            seps = tuple(tuple(r[:hex_cols]) for r in source.separations[:hex_cols])
            if mode == "kfat":
                _check_kfat_family(source, K, hex_cols)
                claim = f"at_least:{2 * K - 1}"
            else:
                claim = "schedule_sum"
            family = RayFamily(rays, FatnessSchedule(tuple(schedule[c] for c in range(hex_cols))), seps, claim,
                               list(source.annuli[:hex_cols]), dict(source.notes))
            bad = family.violations()
            if bad:
                i, j, d, need = bad[0]
                raise PreconditionError(f"rays {i} and {j} are {d} apart, need {need}")
        for c, R in enumerate(family.rays):
            cert = fat_ray_certificate(g, R, 2 * schedule[c] - 1)
            if not cert.ok:
                raise PreconditionError(f"ray {c} is not certified {2 * schedule[c] - 1}-fat in the window")

        stage = "connectors"
        demand = [(c, c + 1) for (c, _h) in fig1_order(hex_rows * spare, hex_cols)]
        connectors = choose_connectors(g, family, demand)
        stage = "auxiliary"
        aux = build_auxiliary_graph(g, family, connectors)
        stage = "routing"
        routed = find_hex_subdivision(aux, hex_rows, hex_cols)
        stage = "lift"
        hexsub = lift_horizontal_paths(g, aux, routed)
        stage = "assemble"
        report = assemble_hex_subdivision(g, hexsub, schedule, family)
        if not report.passed:
            f = report.failures()[0]
            raise ConstructionError(f"clause ({f.clause}) fails for {f.subject}: {f.measured} < {f.required}", stage)
        stage = "contract"
        model = contract_hex_subdivision(g, hexsub, schedule)
        if mode == "ultrafat":
            stage = "regrid"
            model = regrid_ultrafat(g, model, rows, cols, cap)
        stage = "verify"
        if mode == "kfat":
            fr = fatness(g, model)
            if not fr.at_least(K):
                raise ConstructionError(f"contracted model is only {fr.achieved_K}-fat, wanted {K}", stage)
            measured = {"fatness": fr.to_json()}
        else:
            table = ultrafat_table(g, model, cap)
            if not table.passed:
                raise ConstructionError(f"ultra-fat table passes only up to {table.passes_up_to()}", stage)
            measured = {"ultrafat": table.to_json()}
    except ConstructionError:
        raise
    except CoarseGridError:
        raise
    except Exception as exc:  # pragma: no cover - defensive wrapping
        raise ConstructionError(f"{type(exc).__name__}: {exc}", stage) from exc

    elapsed = time.perf_counter() - t0
    return Certificate.for_halfgrid(
        g,
        mode=mode,
        K=K,
        rows=rows,
        cols=cols,
        cap=cap,
        family=family,
        schedule=schedule,
        connectors=connectors,
        aux=aux,
        hexsub=hexsub,
        report=report,
        model=model,
        measured=measured,
        seed=seed,
        elapsed=elapsed,
    )
