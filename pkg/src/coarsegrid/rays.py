"""Rays, double rays and automorphisms on windowed graphs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ConstructionError, PreconditionError, UsageError
from .graph_core import GraphHandle, Vertex

KINDS = ("elliptic", "non_elliptic", "undeclared")


# ---------------------------------------------------------------------------
# automorphisms


@dataclass(frozen=True)
class Automorphism:
    """A vertex bijection with its inverse and a declared ellipticity kind.

    The kind is declared by whoever builds the map; a finite window cannot
    decide it.
    """

    id: str
    forward: Callable[[Vertex], Vertex]
    inverse: Callable[[Vertex], Vertex]
    kind: str = "undeclared"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown automorphism kind {self.kind!r}")

    def __call__(self, v: Vertex) -> Vertex:
        return self.forward(v)

    def power(self, n: int) -> "Automorphism":
        if n == 1:
            return self
        f, b = (self.forward, self.inverse) if n >= 0 else (self.inverse, self.forward)
        k = abs(n)

        def fwd(v, f=f):
            for _ in range(k):
                v = f(v)
            return v

        def inv(v, b=b):
            for _ in range(k):
                v = b(v)
            return v

        kind = "elliptic" if n == 0 else self.kind
        return Automorphism(f"{self.id}^{n}", fwd, inv, kind)

    def inv(self) -> "Automorphism":
        return self.power(-1)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other.

        Compositions of declared-elliptic maps are declared elliptic: the
        callers only compose inside groups assumed to consist of elliptic
        automorphisms.
        """
        kind = "elliptic" if self.kind == other.kind == "elliptic" else "undeclared"
        return Automorphism(
            f"{self.id}*{other.id}",
            lambda v: self.forward(other.forward(v)),
            lambda v: other.inverse(self.inverse(v)),
            kind,
        )


def _identity() -> Automorphism:
    return Automorphism("id", lambda v: v, lambda v: v, "elliptic")


def _base_automorphism(g: GraphHandle, name: str) -> Automorphism:
    gen = g.spec.name
    if name == "id":
        return _identity()
    if gen == "grid2d" and name.startswith("translate:"):
        try:
            a, b = (int(t) for t in name.split(":", 1)[1].split(","))
        except ValueError as exc:
            raise UsageError(f"bad translation {name!r}; expected translate:a,b") from exc
        kind = "elliptic" if (a, b) == (0, 0) else "non_elliptic"
        return Automorphism(
            f"translate:{a},{b}", lambda v: (v[0] + a, v[1] + b), lambda v: (v[0] - a, v[1] - b), kind
        )
    if gen == "grid2d" and name == "rotate90":
        return Automorphism("rotate90", lambda v: (-v[1], v[0]), lambda v: (v[1], -v[0]), "elliptic")
    if gen == "cycle_spokes" and name.startswith("rotate:"):
        n = g.gen.n
        try:
            s = int(name.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad rotation {name!r}; expected rotate:s") from exc
        return Automorphism(
            f"rotate:{s}", lambda v: ((v[0] + s) % n, v[1]), lambda v: ((v[0] - s) % n, v[1]), "elliptic"
        )
    raise UsageError(f"generator {gen} has no automorphism {name!r}")


def automorphism(g: GraphHandle, ident: str) -> Automorphism:
    """Look up an automorphism id: a base id, ``id^n`` powers, ``a*b`` compositions."""
    parts = ident.split("*")
    out = None
    for part in parts:
        base, _, exp = part.partition("^")
        phi = _base_automorphism(g, base.strip())
        if exp:
            try:
                phi = phi.power(int(exp))
            except ValueError as exc:
                raise UsageError(f"bad exponent in {part!r}") from exc
        out = phi if out is None else out.compose(phi)
    return out


def default_automorphisms(g: GraphHandle) -> list[str]:
    """Automorphism ids a generator supplies for automatic ray families."""
    if g.spec.name == "grid2d":
        return ["translate:1,0"]
    if g.spec.name == "cycle_spokes":
        return [f"rotate:{s}" for s in range(1, g.gen.n)]
    return []


def check_automorphism(g: GraphHandle, phi: Automorphism, core_radius: int | None = None) -> tuple | None:
    """Return None if phi looks like an automorphism on the window, else a witness.

    Checks forward-then-inverse is the identity on the core and that every
    in-window edge with in-window images maps to an edge.
    """
    core = g.horizon // 2 if core_radius is None else core_radius
    for i in range(len(g)):
        v = g.vertex(i)
        if g._depth[i] <= core and phi.inverse(phi(v)) != v:
            return ("inverse", v)
        fv = phi(v)
        if fv not in g:
            continue
        fi = g.idx(fv)
        for j in g.adj(i):
            fu = phi(g.vertex(j))
            if fu in g and g.idx(fu) not in g.adj(fi):
                return ("adjacency", v, g.vertex(j))
    return None


# ---------------------------------------------------------------------------
# rays


@dataclass(frozen=True)
class RayExtension:
    """vertex[i] = phi(vertex[i - period]) for every i >= start + period."""

    automorphism: str
    start: int
    period: int


@dataclass(frozen=True)
class Ray:
    prefix: tuple
    extension: RayExtension | None = None

    def __len__(self):
        return len(self.prefix)

    def __getitem__(self, i):
        return self.prefix[i]

    def tail(self, i: int) -> "Ray":
        return Ray(self.prefix[i:])

    def materialize(self, g: GraphHandle) -> "Ray":
        """Extend the prefix by the periodic rule until it leaves the window."""
        if self.extension is None:
            return self
        ext = self.extension
        phi = automorphism(g, ext.automorphism)
        seq = list(self.prefix)
        if len(seq) < ext.start + ext.period or ext.period < 1:
            raise UsageError("ray prefix is shorter than its extension period")
        while True:
            nxt = phi(seq[len(seq) - ext.period])
            if nxt not in g:
                break
            seq.append(nxt)
        return Ray(tuple(seq), ext)

    def check(self, g: GraphHandle) -> str | None:
        """None when the prefix is a path in the window obeying its extension rule."""
        seen = set()
        for k, v in enumerate(self.prefix):
            if v not in g:
                return f"vertex {k} lies outside the window"
            if v in seen:
                return f"vertex {k} repeats"
            seen.add(v)
            if k and g.idx(v) not in g.adj(g.idx(self.prefix[k - 1])):
                return f"vertices {k - 1},{k} are not adjacent"
        if self.extension is not None:
            ext = self.extension
            phi = automorphism(g, ext.automorphism)
            for i in range(ext.start + ext.period, len(self.prefix)):
                if phi(self.prefix[i - ext.period]) != self.prefix[i]:
                    return f"vertex {i} breaks the periodic extension"
        return None

    def to_json(self, g: GraphHandle) -> dict:
        ext = None
        if self.extension is not None:
            e = self.extension
            ext = {"automorphism": e.automorphism, "start": e.start, "period": e.period}
        return {"prefix": g.tokens(self.prefix), "extension": ext}

    @classmethod
    def from_json(cls, g: GraphHandle, data: dict) -> "Ray":
        try:
            prefix = tuple(g.parse(t) for t in data["prefix"])
            e = data.get("extension")
            ext = RayExtension(e["automorphism"], int(e["start"]), int(e["period"])) if e else None
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed ray: {exc}") from exc
        return cls(prefix, ext)


@dataclass(frozen=True)
class DoubleRay:
    """Two rays sharing their first vertex r_0, otherwise disjoint."""

    forward: Ray
    backward: Ray

    def __post_init__(self):
        if not self.forward.prefix or not self.backward.prefix or self.forward[0] != self.backward[0]:
            raise UsageError("double ray halves must share their first vertex")

    def vertices(self) -> tuple:
        """... r_{-1} r_0 r_1 ... as one sequence."""
        return tuple(reversed(self.backward.prefix)) + self.forward.prefix[1:]

    @property
    def prefix(self) -> tuple:
        return self.vertices()

    def __len__(self):
        return len(self.vertices())

    def to_json(self, g: GraphHandle) -> dict:
        return {"forward": self.forward.to_json(g), "backward": self.backward.to_json(g)}

    @classmethod
    def from_json(cls, g: GraphHandle, data: dict) -> "DoubleRay":
        return cls(Ray.from_json(g, data["forward"]), Ray.from_json(g, data["backward"]))


def ray_vertices(R) -> tuple:
    return R.vertices() if isinstance(R, DoubleRay) else tuple(R.prefix)


# ---------------------------------------------------------------------------
# geodesic rays


def geodesic_ray(g: GraphHandle, base: Vertex) -> Ray:
    """A geodesic ray from base reaching the window boundary.

    A vertex survives when a distance-increasing chain from it reaches an
    open vertex of the window; the ray repeatedly steps to the first
    surviving neighbor in generator order.
    """
    b = g.idx(base)
    dist = g.bfs([b])
    order = sorted(dist, key=lambda i: -dist[i])
    survive = set()
    for i in order:
        if g._depth[i] >= g.horizon:
            survive.add(i)
            continue
        if any(dist.get(u) == dist[i] + 1 and u in survive for u in g.adj(i)):
            survive.add(i)
    if b not in survive:
        raise ConstructionError("no infinite extension from the base inside the window", "geodesic_ray")
    path = [b]
    while g._depth[path[-1]] < g.horizon:
        v = path[-1]
        nxt = next(u for u in g.adj(v) if dist.get(u) == dist[v] + 1 and u in survive)
        path.append(nxt)
    return Ray(tuple(g.vertex(i) for i in path))


# ---------------------------------------------------------------------------
# fat-ray certificates


@dataclass(frozen=True)
class FatRayCertificate:
    """cuts[n] = least N with d(R r_n, r_N R) >= K inside the window."""

    K: int
    cuts: tuple
    certified_range: int
    exact: bool
    failure: int | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "cuts": list(self.cuts),
            "certified_range": self.certified_range,
            "exact": self.exact,
            "failure": self.failure,
        }


def fat_ray_certificate(g: GraphHandle, R, K: int, upto: int | None = None) -> FatRayCertificate:
    """Cut function of a ray for n = 0..upto (default: half its materialized length)."""
    verts = ray_vertices(R)
    L = len(verts)
    if L == 0:
        raise UsageError("empty ray")
    upto = L // 2 if upto is None else min(upto, L - 1)
    pos = {g.idx(v): k for k, v in enumerate(verts)}
    reach = -1
    cuts = []
    exact = True
    for n in range(upto + 1):
        if K >= 1:
            near = g.bfs([g.idx(verts[n])], limit=K - 1)
            for u, d in near.items():
                if d < K - 1 and g._depth[u] >= g.horizon:
                    exact = False
                k = pos.get(u)
                if k is not None and k > reach:
                    reach = k
        N = reach + 1 if K >= 1 else 0
        if N >= L:
            return FatRayCertificate(K, tuple(cuts), n - 1, exact, failure=n)
        cuts.append(N)
    return FatRayCertificate(K, tuple(cuts), upto, exact)


def segment_fat_ray(g: GraphHandle, R, K: int):
    """Split a ray into blocks B_0, B_1, ... forming a K-fat model of a path.

    B_i = r_{e_i} .. r_{e_{i+1}-1} with e_0 = 0 and e_{i+1} = max(e_i + 1, N(e_i)),
    so every block starts where the whole earlier ray is K away.  Even blocks
    are branch sets, odd blocks are branch-path interiors; the model ends on
    a branch set.
    """
    from .minor_model import MinorModel, PatternDescriptor

    verts = ray_vertices(R)
    cert = fat_ray_certificate(g, R, K, upto=len(verts) - 1)
    cuts = cert.cuts
    if not cuts:
        raise ConstructionError(f"ray has no {K}-fat cut inside the window", "segment")
    bounds = [0]
    while bounds[-1] < len(cuts):
        e = bounds[-1]
        bounds.append(max(e + 1, cuts[e]))
    blocks = [verts[a:b] for a, b in zip(bounds, bounds[1:])]
    if len(blocks) % 2 == 0:
        blocks.pop()
    sets = {(0, k): frozenset(blocks[2 * k]) for k in range(len(blocks) // 2 + 1)}
    paths = {}
    for k in range(len(blocks) // 2):
        paths[((0, k), (0, k + 1))] = (blocks[2 * k][-1],) + tuple(blocks[2 * k + 1]) + (blocks[2 * k + 2][0],)
    return MinorModel(PatternDescriptor.omega(1, len(sets)), sets, paths)


# ---------------------------------------------------------------------------
# embedding profile


@dataclass(frozen=True)
class EmbeddingProfile:
    """table[L] = min d_G(x, y) over ray vertices x, y at ray distance L."""

    table: dict
    lower: dict  # a -> min_{L >= a} table[L]
    exact: bool

    def to_json(self) -> dict:
        return {
            "table": {str(k): v for k, v in self.table.items()},
            "lower": {str(k): v for k, v in self.lower.items()},
            "exact": self.exact,
        }


def embedding_profile(g: GraphHandle, R, Lmax: int) -> EmbeddingProfile:
    verts = ray_vertices(R)
    if Lmax >= len(verts):
        raise UsageError(f"Lmax {Lmax} exceeds the materialized ray length {len(verts)}")
    table = {L: L for L in range(Lmax + 1)}
    idx = [g.idx(v) for v in verts]
    # distance from each source to the nearest open vertex
    to_open = []
    for i, s in enumerate(idx):
        dist = g.bfs([s], limit=Lmax)
        to_open.append(min((d for u, d in dist.items() if g._depth[u] >= g.horizon), default=Lmax + 1))
        for L in range(1, min(Lmax, len(idx) - 1 - i) + 1):
            d = dist.get(idx[i + L])
            if d is not None and d < table[L]:
                table[L] = d
    # a shortcut through unseen vertices leaves and re-enters the window, so it
    # is at least 2 longer than the distance to the open vertex it leaves by
    exact = all(
        to_open[i] >= table[L] - 2 for L in range(1, Lmax + 1) for i in range(len(idx) - L)
    )
    lower = {}
    run = None
    for L in range(Lmax, -1, -1):
        run = table[L] if run is None else min(run, table[L])
        lower[L] = run
    return EmbeddingProfile(table, dict(sorted(lower.items())), exact)


# ---------------------------------------------------------------------------
# invariant double rays


@dataclass(frozen=True)
class InvariantDoubleRay:
    ray: DoubleRay
    m: int
    period: int
    checked: int  # core vertices whose image was checked


def invariant_double_ray(g: GraphHandle, phi: Automorphism, core_radius: int | None = None) -> InvariantDoubleRay:
    """A phi-invariant double ray by the minimal-displacement surrogate.

    Picks the core vertex v moving least under phi, a shortest v-phi(v) path
    Q, and walks the translates phi^k(Q) both ways; fails rather than
    repairs when the walk meets itself.
    """
    if phi.kind == "elliptic":
        raise PreconditionError(f"automorphism {phi.id} is declared elliptic; it has no invariant double ray")
    core = g.horizon // 4 if core_radius is None else core_radius
    best = None
    for i in range(len(g)):
        if g._depth[i] > core:
            break
        v = g.vertex(i)
        fv = phi(v)
        if fv not in g or fv == v:
            continue
        path = g.shortest_path(v, fv)
        if path is not None and (best is None or len(path) < len(best)):
            best = path
    if best is None:
        raise ConstructionError("no core vertex with an in-window image", "invariant_double_ray")
    Q = best
    period = len(Q) - 1
    fwd = list(Q)
    while True:
        nxt = phi(fwd[-period])
        if nxt not in g:
            break
        fwd.append(nxt)
    inv = phi.inv()
    bwd = [Q[0]]
    while True:
        nxt = inv(fwd[period - len(bwd)] if len(bwd) <= period else bwd[-period])
        if nxt not in g:
            break
        bwd.append(nxt)
    walk = list(reversed(bwd)) + fwd[1:]
    seen = {}
    for k, v in enumerate(walk):
        if v in seen:
            raise ConstructionError(
                f"translated geodesic meets itself at {g.token(v)} (positions {seen[v]} and {k}); extraction failed",
                "invariant_double_ray",
            )
        seen[v] = k
    D = DoubleRay(
        Ray(tuple(fwd), RayExtension(phi.id, 0, period)),
        Ray(tuple(bwd), RayExtension(inv.id, 0, period)),
    )
    on = set(walk)
    checked = 0
    for v in walk:
        if g.depth(v) <= core:
            checked += 1
            if phi(v) in g and phi(v) not in on:
                raise ConstructionError(f"image of {g.token(v)} leaves the double ray", "invariant_double_ray")
    return InvariantDoubleRay(D, 1, period, checked)
