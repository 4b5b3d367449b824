"""Lazily generated locally finite graphs restricted to finite windows.

A generator is a neighbor oracle over hashable vertex ids.  A
``GraphHandle`` materializes the ball of a given radius around a basepoint
once, assigns every vertex a dense integer index in BFS discovery order, and
answers distance, ball and component queries exactly inside that window.
Results that might differ in the infinite graph carry a ``truncated`` or
``exact`` flag instead of being silently cut off.
"""
from __future__ import annotations

import json
import os
import threading
from collections import OrderedDict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence

from .errors import OutOfWindowError, UsageError

Vertex = Hashable
UNREACHABLE = None

GENERATOR_NAMES = (
    "grid2d",
    "halfgrid",
    "hexhalfgrid",
    "example41",
    "example42",
    "cycle_spokes",
    "explicit",
)

_DEFAULT_CACHE_LIMIT = 64 * 1024 * 1024


# ---------------------------------------------------------------------------
# generators


class Generator:
    """Neighbor oracle plus the canonical token format of one graph family."""

    name = ""

    def neighbors(self, v: Vertex) -> tuple:
        raise NotImplementedError

    def token(self, v: Vertex) -> str:
        raise NotImplementedError

    def parse(self, token: str) -> Vertex:
        raise NotImplementedError

    def default_basepoint(self) -> Vertex:
        raise NotImplementedError

    def is_vertex(self, v: Vertex) -> bool:
        return True


def _parse_ints(token: str, count: int) -> tuple[int, ...]:
    parts = token.strip().strip("()").split(",")
    if len(parts) != count:
        raise UsageError(f"cannot parse vertex token {token!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"cannot parse vertex token {token!r}") from exc


class _LatticeGenerator(Generator):
    def token(self, v):
        return f"{v[0]},{v[1]}"

    def parse(self, token):
        v = _parse_ints(token, 2)
        if not self.is_vertex(v):
            raise UsageError(f"{token!r} is not a vertex of {self.name}")
        return v

    def default_basepoint(self):
        return (0, 0)


class Grid2d(_LatticeGenerator):
    name = "grid2d"

    def neighbors(self, v):
        x, y = v
        return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


class HalfGrid(_LatticeGenerator):
    name = "halfgrid"

    def is_vertex(self, v):
        return v[0] >= 0 and v[1] >= 0

    def neighbors(self, v):
        x, y = v
        out = [(x + 1, y)]
        if x > 0:
            out.append((x - 1, y))
        out.append((x, y + 1))
        if y > 0:
            out.append((x, y - 1))
        return tuple(out)


class HexHalfGrid(_LatticeGenerator):
    """Half-grid with every other rung deleted.

    Column ``x`` is the vertical ray S_x; the rung (x,y)-(x+1,y) is present
    exactly when x + y is even, so consecutive rungs on a column alternate
    sides and every vertex has degree at most 3.
    """

    name = "hexhalfgrid"

    def is_vertex(self, v):
        return v[0] >= 0 and v[1] >= 0

    def neighbors(self, v):
        x, y = v
        out = []
        if (x + y) % 2 == 0:
            out.append((x + 1, y))
        elif x > 0:
            out.append((x - 1, y))
        out.append((x, y + 1))
        if y > 0:
            out.append((x, y - 1))
        return tuple(out)


class CycleSpokes(_LatticeGenerator):
    """A cycle of length n with an infinite spoke hanging off every cycle vertex.

    Vertex (k, t) is depth t on spoke k; depth 0 is the cycle.
    """

    name = "cycle_spokes"

    def __init__(self, n: int):
        if n < 3:
            raise UsageError("cycle_spokes needs cycle length n >= 3")
        self.n = n

    def is_vertex(self, v):
        return 0 <= v[0] < self.n and v[1] >= 0

    def neighbors(self, v):
        k, t = v
        if t == 0:
            return (((k + 1) % self.n, 0), ((k - 1) % self.n, 0), (k, 1))
        return ((k, t + 1), (k, t - 1))


class Example41(Generator):
    """Rays R_j whose i-th vertex is joined to clique vertex c_i by a path of length j.

    The clique and the number of rays are truncated to ``n`` so the graph is
    locally finite.  Ray R_0 coincides with the clique on its first n vertices
    (paths of length 0), so ``r:i:0`` canonicalizes to ``c:i`` for i < n.
    Interior vertex ``p:i:j:k`` sits at distance k from r_i^j along the path.
    """

    name = "example41"

    def __init__(self, n: int):
        if n < 1:
            raise UsageError("example41 needs clique truncation n >= 1")
        self.n = n

    def _ray(self, i, j):
        if j == 0 and i < self.n:
            return ("c", i)
        return ("r", i, j)

    def is_vertex(self, v):
        n = self.n
        if v[0] == "c":
            return 0 <= v[1] < n
        if v[0] == "r":
            _, i, j = v
            return i >= 0 and 0 <= j < n and not (j == 0 and i < n)
        if v[0] == "p":
            _, i, j, k = v
            return 0 <= i < n and 0 <= j < n and 1 <= k <= j - 1
        return False

    def neighbors(self, v):
        n = self.n
        kind = v[0]
        out = []
        if kind == "c":
            i = v[1]
            out.extend(("c", a) for a in range(n) if a != i)
            if i + 1 == n:
                out.append(("r", n, 0))
            for j in range(1, n):
                out.append(("r", i, 1) if j == 1 else ("p", i, j, j - 1))
        elif kind == "r":
            _, i, j = v
            if i > 0:
                out.append(self._ray(i - 1, j))
            out.append(self._ray(i + 1, j))
            if i < n and j >= 1:
                out.append(("c", i) if j == 1 else ("p", i, j, 1))
        else:
            _, i, j, k = v
            out.append(("r", i, j) if k == 1 else ("p", i, j, k - 1))
            out.append(("c", i) if k + 1 == j else ("p", i, j, k + 1))
        return tuple(out)

    def token(self, v):
        return ":".join(str(p) for p in v)

    def parse(self, token):
        parts = token.strip().split(":")
        try:
            v = (parts[0],) + tuple(int(p) for p in parts[1:])
        except ValueError as exc:
            raise UsageError(f"cannot parse vertex token {token!r}") from exc
        if v[0] == "r" and len(v) == 3:
            v = self._ray(v[1], v[2])
        if len(v) not in (2, 3, 4) or not self.is_vertex(v):
            raise UsageError(f"{token!r} is not a vertex of example41(n={self.n})")
        return v

    def default_basepoint(self):
        return ("c", 0)


class Example42(Generator):
    """Rays T and R^j with r_i^j joined to t_{i+j} by a path of length K - 1.

    Interior vertex ``p:i:j:k`` sits at distance k from r_i^j.  For K = 1 the
    paths have length 0, so every r_i^j is the vertex t_{i+j}.
    """

    name = "example42"

    def __init__(self, K: int):
        if K < 1:
            raise UsageError("example42 needs K >= 1")
        self.K = K

    def _ray(self, i, j):
        if self.K == 1:
            return ("t", i + j)
        return ("r", i, j)

    def _toward_t(self, i, j):
        # neighbor of t_{i+j} on the path from r_i^j
        return ("r", i, j) if self.K == 2 else ("p", i, j, self.K - 2)

    def is_vertex(self, v):
        if v[0] == "t":
            return v[1] >= 0
        if v[0] == "r":
            return self.K >= 2 and v[1] >= 0 and v[2] >= 0
        if v[0] == "p":
            _, i, j, k = v
            return i >= 0 and j >= 0 and 1 <= k <= self.K - 2
        return False

    def neighbors(self, v):
        K = self.K
        kind = v[0]
        out = []
        if kind == "t":
            i = v[1]
            if i > 0:
                out.append(("t", i - 1))
            out.append(("t", i + 1))
            if K >= 2:
                out.extend(self._toward_t(a, i - a) for a in range(i + 1))
        elif kind == "r":
            _, i, j = v
            if i > 0:
                out.append(("r", i - 1, j))
            out.append(("r", i + 1, j))
            out.append(("t", i + j) if K == 2 else ("p", i, j, 1))
        else:
            _, i, j, k = v
            out.append(("r", i, j) if k == 1 else ("p", i, j, k - 1))
            out.append(("t", i + j) if k == K - 2 else ("p", i, j, k + 1))
        return tuple(out)

    def token(self, v):
        return ":".join(str(p) for p in v)

    def parse(self, token):
        parts = token.strip().split(":")
        try:
            v = (parts[0],) + tuple(int(p) for p in parts[1:])
        except ValueError as exc:
            raise UsageError(f"cannot parse vertex token {token!r}") from exc
        if v[0] == "r" and len(v) == 3:
            v = self._ray(v[1], v[2])
        if len(v) not in (2, 3, 4) or not self.is_vertex(v):
            raise UsageError(f"{token!r} is not a vertex of example42(K={self.K})")
        return v

    def default_basepoint(self):
        return ("t", 0)

    def level(self, n: int) -> set:
        """The n-th level {t_n} together with every r_i^j with i + j = n."""
        return {("t", n)} | {self._ray(i, n - i) for i in range(n + 1)}


class Explicit(Generator):
    """Finite graph given by an edge list; tokens are the vertex names."""

    name = "explicit"

    def __init__(self, edges: Sequence[tuple[str, str]], vertices: Iterable[str] = ()):
        adj: dict[str, set[str]] = {v: set() for v in vertices}
        for u, v in edges:
            if not u or not v or any(c.isspace() for c in u + v):
                raise UsageError(f"bad explicit edge {u!r} {v!r}")
            if u == v:
                raise UsageError(f"self-loop at {u!r} is not allowed")
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        if not adj:
            raise UsageError("explicit graph needs at least one vertex")
        self._adj = {v: tuple(sorted(nb)) for v, nb in adj.items()}

    def is_vertex(self, v):
        return v in self._adj

    def neighbors(self, v):
        return self._adj[v]

    def token(self, v):
        return v

    def parse(self, token):
        token = token.strip()
        if token not in self._adj:
            raise UsageError(f"{token!r} is not a vertex of the explicit graph")
        return token

    def default_basepoint(self):
        return min(self._adj)

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self._adj))


# ---------------------------------------------------------------------------
# specs and windows


@dataclass(frozen=True)
class GeneratorSpec:
    """Generator name, integer parameters and (explicit graphs only) the edge list."""

    name: str
    params: dict = field(default_factory=dict)
    edges: tuple = ()
    vertices: tuple = ()

    def build(self) -> Generator:
        p = self.params
        if self.name == "grid2d":
            return Grid2d()
        if self.name == "halfgrid":
            return HalfGrid()
        if self.name == "hexhalfgrid":
            return HexHalfGrid()
        if self.name == "cycle_spokes":
            return CycleSpokes(_int_param(p, "n"))
        if self.name == "example41":
            return Example41(_int_param(p, "n"))
        if self.name == "example42":
            return Example42(_int_param(p, "K"))
        if self.name == "explicit":
            return Explicit(self.edges, self.vertices)
        raise UsageError(f"unknown generator {self.name!r}; expected one of {', '.join(GENERATOR_NAMES)}")

    def to_json(self) -> dict:
        out = {"generator": self.name, "params": dict(sorted(self.params.items()))}
        if self.name == "explicit":
            out["edges"] = [f"{u} {v}" for u, v in self.edges]
            isolated = sorted(set(self.vertices) - {x for e in self.edges for x in e})
            if isolated:
                out["vertices"] = isolated
        return out


def _int_param(params: dict, key: str) -> int:
    if key not in params:
        raise UsageError(f"missing generator parameter {key!r}")
    value = params[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise UsageError(f"generator parameter {key!r} must be an integer")
    return value


@dataclass(frozen=True)
class Window:
    """Ball of ``radius`` around ``basepoint`` (a token; None means the generator default)."""

    basepoint: str | None
    radius: int


@dataclass(frozen=True)
class BallResult:
    vertices: frozenset
    truncated: bool

    def __contains__(self, v):
        return v in self.vertices

    def __iter__(self):
        return iter(self.vertices)

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class Component:
    vertices: frozenset
    contacts: frozenset  # component vertices adjacent to the forbidden set


@dataclass(frozen=True)
class LevelSet:
    index: int
    vertices: frozenset


# ---------------------------------------------------------------------------
# handle


class _Memo:
    """Byte-capped LRU cache; invisible to callers and safe under threads."""

    def __init__(self, limit: int):
        self.limit = limit
        self._data: OrderedDict = OrderedDict()
        self._sizes: dict = {}
        self._used = 0
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                return self._data[key]
        return None

    def put(self, key, value, size: int):
        if size > self.limit:
            return
        with self._lock:
            if key in self._data:
                return
            self._data[key] = value
            self._sizes[key] = size
            self._used += size
            while self._used > self.limit:
                old, _ = self._data.popitem(last=False)
                self._used -= self._sizes.pop(old)


def _cache_limit() -> int:
    raw = os.environ.get("COARSEGRID_CACHE_LIMIT")
    if raw is None:
        return _DEFAULT_CACHE_LIMIT
    try:
        return max(0, int(raw))
    except ValueError as exc:
        raise UsageError("COARSEGRID_CACHE_LIMIT must be an integer byte count") from exc


class GraphHandle:
    """A generator materialized on a window, with dense integer vertex indices.

    Index order is BFS discovery order from the basepoint (neighbors in
    generator order), which doubles as the package-wide deterministic
    tie-break order ("rank") for vertices.
    """

    def __init__(self, spec: GeneratorSpec, window: Window):
        if window.radius < 0:
            raise UsageError("window radius must be nonnegative")
        self.spec = spec
        self.window = window
        self.gen = spec.build()
        # an explicit graph without a basepoint is materialized whole, every
        # component seeded in token order, and has no open horizon
        whole = isinstance(self.gen, Explicit) and window.basepoint is None
        base = self.gen.parse(window.basepoint) if window.basepoint is not None else self.gen.default_basepoint()
        self.basepoint = base
        self.radius = window.radius
        self.complete = whole
        seeds = list(self.gen.vertices) if whole else [base]
        verts: list = []
        index: dict = {}
        depth: list[int] = []
        for seed in seeds:
            if seed in index:
                continue
            head = len(verts)
            index[seed] = head
            verts.append(seed)
            depth.append(0)
            while head < len(verts):
                v = verts[head]
                d = depth[head]
                head += 1
                if d == window.radius and not whole:
                    continue
                for u in self.gen.neighbors(v):
                    if u not in index:
                        index[u] = len(verts)
                        verts.append(u)
                        depth.append(d + 1)
        # vertices at depth >= horizon may have neighbors outside the window
        self.horizon = len(verts) + 1 if whole else window.radius
        self._verts = verts
        self._index = index
        self._depth = depth
        gen_nb = self.gen.neighbors
        self._adj = [tuple(index[u] for u in gen_nb(v) if u in index) for v in verts]
        self._memo = _Memo(_cache_limit())

    # -- basic access ------------------------------------------------------
    def __len__(self):
        return len(self._verts)

    def __contains__(self, v):
        return v in self._index

    def idx(self, v: Vertex) -> int:
        try:
            return self._index[v]
        except (KeyError, TypeError):
            raise OutOfWindowError(v) from None

    def vertex(self, i: int) -> Vertex:
        return self._verts[i]

    def vertices(self) -> list:
        return list(self._verts)

    def depth(self, v: Vertex) -> int:
        return self._depth[self.idx(v)]

    def rank(self, v: Vertex) -> int:
        return self.idx(v)

    def full_neighborhood(self, v: Vertex) -> bool:
        """True when every generator neighbor of v lies inside the window."""
        return self._depth[self.idx(v)] < self.horizon

    def token(self, v: Vertex) -> str:
        return self.gen.token(v)

    def parse(self, token: str) -> Vertex:
        if not isinstance(token, str):
            raise UsageError(f"vertex tokens are strings, got {token!r}")
        return self.gen.parse(token)

    def tokens(self, vs: Iterable[Vertex]) -> list[str]:
        return [self.gen.token(v) for v in vs]

    def adj(self, i: int) -> tuple[int, ...]:
        return self._adj[i]

    def sorted(self, vs: Iterable[Vertex]) -> list:
        """Vertices in rank order."""
        return sorted(vs, key=self.idx)

    def descriptor(self) -> dict:
        out = self.spec.to_json()
        out["basepoint"] = None if self.complete else self.gen.token(self.basepoint)
        out["radius"] = self.radius
        return out

    # -- search primitives (integer indices) --------------------------------
    def bfs(
        self,
        sources: Iterable[int],
        limit: int | None = None,
        blocked: Callable[[int], bool] | None = None,
    ) -> dict[int, int]:
        """Multi-source BFS distances (by index), optionally capped and blocked."""
        dist: dict[int, int] = {}
        queue = deque()
        for s in sources:
            if s not in dist and (blocked is None or not blocked(s)):
                dist[s] = 0
                queue.append(s)
        adj = self._adj
        while queue:
            v = queue.popleft()
            d = dist[v]
            if limit is not None and d >= limit:
                continue
            for u in adj[v]:
                if u not in dist and (blocked is None or not blocked(u)):
                    dist[u] = d + 1
                    queue.append(u)
        return dist

    def bfs_tree(
        self,
        sources: Iterable[int],
        targets: set[int] | None = None,
        blocked: Callable[[int], bool] | None = None,
        limit: int | None = None,
    ) -> tuple[dict[int, int], dict[int, int], int | None]:
        """BFS with parent pointers; stops at the first target reached.

        Returns (dist, parent, hit) where ``hit`` is the first target index in
        queue order at the minimal distance, or None.
        """
        dist: dict[int, int] = {}
        parent: dict[int, int] = {}
        queue = deque()
        for s in sources:
            if s in dist or (blocked is not None and blocked(s)):
                continue
            dist[s] = 0
            parent[s] = -1
            if targets is not None and s in targets:
                return dist, parent, s
            queue.append(s)
        adj = self._adj
        while queue:
            v = queue.popleft()
            d = dist[v]
            if limit is not None and d >= limit:
                continue
            for u in adj[v]:
                if u in dist or (blocked is not None and blocked(u)):
                    continue
                dist[u] = d + 1
                parent[u] = v
                if targets is not None and u in targets:
                    return dist, parent, u
                queue.append(u)
        return dist, parent, None

    @staticmethod
    def trace(parent: dict[int, int], end: int) -> list[int]:
        path = [end]
        while parent[path[-1]] != -1:
            path.append(parent[path[-1]])
        path.reverse()
        return path

    def shortest_path(self, a: Vertex, b: Vertex, blocked=None) -> list | None:
        """First-discovered shortest a-b path in the window, or None."""
        _, parent, hit = self.bfs_tree([self.idx(a)], {self.idx(b)}, blocked)
        if hit is None:
            return None
        return [self._verts[i] for i in self.trace(parent, hit)]

    def indices(self, vs: Iterable[Vertex]) -> list[int]:
        return [self.idx(v) for v in vs]

    # -- cached ball --------------------------------------------------------
    def ball_indices(self, sources: frozenset[int], r: int) -> frozenset[int]:
        key = (sources, r)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = frozenset(self.bfs(sources, limit=r))
        self._memo.put(key, result, 64 + 40 * len(result) + 40 * len(sources))
        return result


# ---------------------------------------------------------------------------
# public operations


def instantiate_graph(spec: GeneratorSpec, window: Window) -> GraphHandle:
    """Materialize ``spec`` on ``window``."""
    return GraphHandle(spec, window)


def neighbors(g: GraphHandle, v: Vertex) -> tuple:
    """Generator neighbors of v that lie inside the window, in generator order."""
    return tuple(g.vertex(u) for u in g.adj(g.idx(v)))


def _nonempty(name: str, vs) -> list:
    vs = list(vs)
    if not vs:
        raise UsageError(f"{name} must be a nonempty vertex set")
    return vs


def distance(g: GraphHandle, A: Iterable[Vertex], B: Iterable[Vertex]) -> int | None:
    """Shortest-path distance between two vertex sets in the windowed graph.

    Returns None when no path exists inside the window.
    """
    a = g.indices(_nonempty("A", A))
    b = set(g.indices(_nonempty("B", B)))
    dist, _, hit = g.bfs_tree(a, b)
    return None if hit is None else dist[hit]


def distance_exact(g: GraphHandle, A: Iterable[Vertex], B: Iterable[Vertex]) -> tuple[int | None, bool]:
    """Windowed distance plus whether it provably equals the true distance.

    Exact when every vertex strictly closer to A than the reported distance
    has its full neighborhood inside the window.
    """
    a = g.indices(_nonempty("A", A))
    b = set(g.indices(_nonempty("B", B)))
    dist, _, hit = g.bfs_tree(a, b)
    d = None if hit is None else dist[hit]
    depth, horizon = g._depth, g.horizon
    exact = all(depth[v] < horizon for v, dv in dist.items() if d is None or dv < d)
    return d, exact


def ball(g: GraphHandle, A: Iterable[Vertex], r: int) -> BallResult:
    """B(A, r) inside the window; ``truncated`` when the window may cut it off."""
    if r < 0:
        raise UsageError("ball radius must be nonnegative")
    src = frozenset(g.indices(A))
    got = g.ball_indices(src, r)
    far = max((g._depth[i] for i in src), default=0)
    truncated = far + r > g.horizon
    return BallResult(frozenset(g.vertex(i) for i in got), truncated)


def components_avoiding(g: GraphHandle, forbidden: Iterable[Vertex]) -> list[Component]:
    """Components of the window minus ``forbidden``, ordered by least vertex rank."""
    bad = set(g.indices(forbidden))
    seen = set(bad)
    comps = []
    for start in range(len(g)):
        if start in seen:
            continue
        comp = g.bfs([start], blocked=lambda u: u in bad)
        seen.update(comp)
        contacts = frozenset(g.vertex(v) for v in comp if any(u in bad for u in g.adj(v)))
        comps.append(Component(frozenset(g.vertex(v) for v in comp), contacts))
    return comps


def level_set(g: GraphHandle, n: int) -> LevelSet:
    """The n-th level of example42, restricted to the window."""
    if not isinstance(g.gen, Example42):
        raise UsageError("level sets are defined for example42 only")
    return LevelSet(n, frozenset(v for v in g.gen.level(n) if v in g))


# ---------------------------------------------------------------------------
# descriptors


def parse_edge_lines(lines: Iterable[str]) -> tuple[tuple[str, str], ...]:
    edges = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"edge line must be 'u v', got {raw!r}")
        edges.append((parts[0], parts[1]))
    return tuple(edges)


def load_edge_list(path: str | Path) -> tuple[tuple[str, str], ...]:
    return parse_edge_lines(Path(path).read_text().splitlines())


def spec_from_descriptor(desc: dict) -> tuple[GeneratorSpec, Window]:
    """Inverse of ``GraphHandle.descriptor``."""
    try:
        name = desc["generator"]
        radius = desc["radius"]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"graph descriptor lacks field {exc}") from exc
    if not isinstance(radius, int) or isinstance(radius, bool):
        raise UsageError("descriptor radius must be an integer")
    params = dict(desc.get("params") or {})
    edges: tuple = ()
    vertices: tuple = ()
    if name == "explicit":
        if "edge_file" in desc:
            edges = load_edge_list(desc["edge_file"])
        else:
            edges = parse_edge_lines(desc.get("edges", []))
        vertices = tuple(desc.get("vertices", ()))
    spec = GeneratorSpec(name, params, edges, vertices)
    return spec, Window(desc.get("basepoint"), radius)


def load_descriptor(path: str | Path) -> GraphHandle:
    desc = json.loads(Path(path).read_text())
    spec, window = spec_from_descriptor(desc)
    return instantiate_graph(spec, window)


def window_dump(g: GraphHandle) -> dict:
    """Vertices and edges of the materialized window in token form."""
    edges = []
    for i in range(len(g)):
        for j in g.adj(i):
            if i < j:
                edges.append([g.token(g.vertex(i)), g.token(g.vertex(j))])
    return {
        "graph": g.descriptor(),
        "vertices": [g.token(v) for v in g.vertices()],
        "edges": edges,
    }

