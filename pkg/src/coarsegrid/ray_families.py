"""Families of pairwise far-apart rays built from automorphisms.

Two routes: around an invariant double ray of a non-elliptic automorphism,
rays are taken in nested annuli B(R, K_j) - B(R, L_j); for elliptic
automorphisms, translates of one geodesic ray are cut to tails that stay
apart.  Everything is measured inside the window and the measured
separation table travels with the family.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConstructionError, PreconditionError, UsageError
from .graph_core import GraphHandle, ball, components_avoiding, distance
from .hexgrid import FatnessSchedule
from .rays import Automorphism, DoubleRay, Ray, RayExtension, automorphism, ray_vertices

__all__ = [
    "FatnessSchedule",
    "AnnulusSpec",
    "RayFamily",
    "HalfLongComponent",
    "HalfThickChain",
    "TailCut",
    "half_long_components",
    "half_thick_witness",
    "annulus_ray_family",
    "tail_separation",
    "translate_ray_family",
    "separation_table",
]


@dataclass(frozen=True)
class AnnulusSpec:
    """B(R, outer) minus B(R, inner)."""

    inner: int
    outer: int

    def __post_init__(self):
        if self.inner >= self.outer:
            raise UsageError("annulus needs inner < outer")


def separation_table(g: GraphHandle, rays: list) -> tuple[tuple[int | None, ...], ...]:
    n = len(rays)
    table = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = distance(g, ray_vertices(rays[i]), ray_vertices(rays[j]))
            table[i][j] = table[j][i] = d
    return tuple(tuple(r) for r in table)


@dataclass
class RayFamily:
    """Rays with their measured pairwise distances.

    ``claim`` is the separation the family asserts: "max_index" means
    d(R_i, R_j) >= max(i, j); "at_least:c" means d(R_i, R_j) >= c;
    "schedule_sum" means d(R_i, R_j) >= K_i + K_j - 1.
    """

    rays: list
    schedule: FatnessSchedule
    separations: tuple
    claim: str = "max_index"
    annuli: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def required(self, i: int, j: int) -> int:
        if self.claim == "max_index":
            return max(i, j)
        if self.claim == "schedule_sum":
            return self.schedule[i] + self.schedule[j] - 1
        if self.claim.startswith("at_least:"):
            return int(self.claim.split(":", 1)[1])
        raise UsageError(f"unknown separation claim {self.claim!r}")

    def violations(self) -> list[tuple[int, int, int | None, int]]:
        out = []
        for i in range(len(self.rays)):
            for j in range(i + 1, len(self.rays)):
                d = self.separations[i][j]
                need = self.required(i, j)
                if d is not None and d < need:
                    out.append((i, j, d, need))
        return out

    def min_separation(self) -> int | None:
        ds = [
            self.separations[i][j]
            for i in range(len(self.rays))
            for j in range(i + 1, len(self.rays))
            if self.separations[i][j] is not None
        ]
        return min(ds) if ds else None

    def to_json(self, g: GraphHandle) -> dict:
        out = {
            "rays": [r.to_json(g) for r in self.rays],
            "schedule": self.schedule.to_json(),
            "separations": [list(r) for r in self.separations],
            "claim": self.claim,
        }
        if self.annuli:
            out["annuli"] = [[a.inner, a.outer] for a in self.annuli]
        return out

    @classmethod
    def from_json(cls, g: GraphHandle, data: dict) -> "RayFamily":
        try:
            rays = [Ray.from_json(g, r) for r in data["rays"]]
            sched = FatnessSchedule(tuple(data.get("schedule") or [0] * len(rays)))
            claim = data.get("claim", "max_index")
            annuli = [AnnulusSpec(a, b) for a, b in data.get("annuli", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed ray family: {exc}") from exc
        seps = data.get("separations")
        if seps is None:
            seps = separation_table(g, rays)
        else:
            seps = tuple(tuple(r) for r in seps)
        return cls(rays, sched, seps, claim, annuli)


# ---------------------------------------------------------------------------
# half-long and half-thick components


@dataclass(frozen=True)
class HalfLongComponent:
    vertices: frozenset
    contact_count: int
    half_long: bool


def half_long_components(g: GraphHandle, R, K: int, threshold: int | None = None) -> list[HalfLongComponent]:
    """Components of the window minus B(R, K) with their ray-contact counts.

    The contact count of C is the number of ray vertices r with a neighbour
    of C in B(r, K), i.e. d(r, C) <= K + 1.  C is flagged half-long when the
    count reaches the threshold (default: a quarter of the window radius).
    """
    T = max(1, g.radius // 4) if threshold is None else threshold
    if T < 1:
        raise UsageError("half-long threshold must be at least 1")
    verts = ray_vertices(R)
    ray_idx = set(g.indices(verts))
    forbidden = ball(g, verts, K).vertices
    out = []
    for comp in components_avoiding(g, forbidden):
        near = g.bfs(g.indices(comp.contacts), limit=K + 1) if comp.contacts else {}
        count = sum(1 for i in near if i in ray_idx)
        out.append(HalfLongComponent(comp.vertices, count, count >= T))
    return out


@dataclass(frozen=True)
class HalfThickChain:
    components: tuple  # C_0 ⊇ C_1 ⊇ ... (frozensets), one per level reached
    break_level: int | None

    @property
    def complete(self) -> bool:
        return self.break_level is None


def half_thick_witness(g: GraphHandle, R, Lmax: int, threshold: int | None = None) -> HalfThickChain:
    """Nested half-long components for L = 0..Lmax; stops at the first level without one."""
    chain: list[frozenset] = []
    for L in range(Lmax + 1):
        prev = chain[-1] if chain else None
        pick = None
        for c in half_long_components(g, R, L, threshold):
            if c.half_long and (prev is None or c.vertices <= prev):
                pick = c.vertices
                break
        if pick is None:
            return HalfThickChain(tuple(chain), L)
        chain.append(pick)
    return HalfThickChain(tuple(chain), None)


# ---------------------------------------------------------------------------
# annulus family (non-elliptic case)


def _periodic_ray(g: GraphHandle, P: list, phi_n: Automorphism) -> list:
    """Concatenate the translates phi_n^k(P) that lie in the window.

    Starts at the backward-most translate fully inside the window so the ray
    spans the window, and stops at the first vertex leaving it.
    """
    inv = phi_n.inv()
    start = list(P)
    for _ in range(4 * g.horizon + 4):
        back = [inv(v) for v in start]
        if not all(v in g for v in back):
            break
        start = back
    seq = list(start)
    seg = start
    for _ in range(8 * g.horizon + 8):
        seg = [phi_n(v) for v in seg]
        stop = False
        for v in seg[1:]:
            if v not in g:
                stop = True
                break
            seq.append(v)
        if stop:
            break
    return seq


def annulus_ray_family(
    g: GraphHandle,
    R: DoubleRay,
    phi: Automorphism,
    count: int,
    threshold: int | None = None,
    max_power: int | None = None,
) -> RayFamily:
    """Rays R_j inside B(R, K_j) - B(R, L_j) with L_j = K_{j-1} + j.

    At level j: take the first half-long component C of the window minus
    B(R, L_j) nested in the previous one, the least n >= 1 for which some
    contact vertex y of C (in rank order) has phi^n(y) in C, a shortest
    y-phi^n(y) path P inside C, and K_j = |P| + L_j + 1.  R_j runs along the
    translates of P.
    """
    if phi.kind == "elliptic":
        raise PreconditionError(f"automorphism {phi.id} is declared elliptic; the annulus family needs a non-elliptic one")
    if count < 1:
        raise UsageError("count must be at least 1")
    verts = ray_vertices(R)
    max_power = g.horizon if max_power is None else max_power
    rays: list[Ray] = []
    ks: list[int] = []
    annuli: list[AnnulusSpec] = []
    prev_C = None
    K_prev = 0
    for j in range(count):
        L = K_prev + j
        comps = [
            c
            for c in half_long_components(g, R, L, threshold)
            if c.half_long and (prev_C is None or c.vertices <= prev_C)
        ]
        if not comps:
            raise ConstructionError(f"no nested half-long component at level {L} (ray {j}); enlarge window", "annulus")
        C = comps[0].vertices
        cidx = set(g.indices(C))
        near = ball(g, verts, L + 1).vertices
        contacts = g.sorted(v for v in C if v in near)
        found = None
        for n in range(1, max_power + 1):
            phi_n = phi.power(n)
            for y in contacts:
                target = phi_n(y)
                if target in g and g.idx(target) in cidx:
                    path = g.shortest_path(y, target, blocked=lambda u: u not in cidx)
                    if path is not None:
                        found = (n, phi_n, path)
                        break
            if found:
                break
        if found is None:
            raise ConstructionError(
                f"no path from a contact vertex to its translate inside the level-{L} component (ray {j}); enlarge window",
                "annulus",
            )
        n, phi_n, P = found
        K = len(P) - 1 + L + 1
        seq = _periodic_ray(g, P, phi_n)
        if len(set(seq)) != len(seq):
            raise ConstructionError(f"translates of the level-{L} path overlap (ray {j})", "annulus")
        inner = ball(g, verts, L).vertices
        outer = ball(g, verts, K).vertices
        for v in seq:
            if v in inner or v not in outer:
                raise ConstructionError(f"ray {j} leaves its annulus at {g.token(v)}", "annulus")
        rays.append(Ray(tuple(seq), RayExtension(phi_n.id, 0, len(P) - 1)))
        ks.append(K)
        annuli.append(AnnulusSpec(L, K))
        prev_C = C
        K_prev = K
    fam = RayFamily(rays, FatnessSchedule(tuple(ks)), separation_table(g, rays), "max_index", annuli)
    fam.notes["automorphism"] = phi.id
    return fam


# ---------------------------------------------------------------------------
# elliptic case


@dataclass(frozen=True)
class TailCut:
    j: int
    separation: int | None  # measured d(R_{>=j}, phi(R)) inside the window
    shift: int  # d with phi(r_0) = r_d
    exact: bool


def _geodesic_from_start(g: GraphHandle, verts) -> bool:
    dist = g.bfs([g.idx(verts[0])])
    return all(dist.get(g.idx(v)) == k for k, v in enumerate(verts))


def tail_separation(g: GraphHandle, R, phi: Automorphism, K: int) -> TailCut:
    """Least j with d(R_{>=j}, phi(R)) >= K inside the window.

    Needs phi declared elliptic, phi(r_0) = r_d with d >= 4K, and R geodesic.
    """
    verts = ray_vertices(R)
    if phi.kind != "elliptic":
        raise PreconditionError(f"automorphism {phi.id} is not declared elliptic")
    image0 = phi(verts[0])
    try:
        d = verts.index(image0)
    except ValueError:
        raise PreconditionError("the automorphism does not map the first ray vertex onto the ray") from None
    if d < 4 * K:
        raise PreconditionError(f"shift {d} of the first ray vertex is below 4K = {4 * K}")
    if not _geodesic_from_start(g, verts):
        raise PreconditionError("ray is not geodesic inside the window")
    image = [phi(v) for v in verts]
    image = [v for v in image if v in g]
    if K <= 0:
        sep = distance(g, verts, image)
        return TailCut(0, sep, d, True)
    near = g.bfs(g.indices(image), limit=K - 1)
    close = [k for k, v in enumerate(verts) if g.idx(v) in near]
    j = close[-1] + 1 if close else 0
    if j >= len(verts):
        raise ConstructionError("no separated tail inside the window; enlarge window", "tail_separation")
    sep = distance(g, verts[j:], image)
    exact = not any(g._depth[u] >= g.horizon for u, dd in near.items() if dd < K - 1)
    return TailCut(j, sep, d, exact)


def _image_prefix(g: GraphHandle, psi: Automorphism, verts) -> tuple:
    out = []
    for v in verts:
        w = psi(v)
        if w not in g:
            break
        out.append(w)
    return tuple(out)


def translate_ray_family(g: GraphHandle, R: Ray, autos: list[Automorphism]) -> RayFamily:
    """Rays R_j = psi_j(R_{>=n_j}) with psi_j = phi_1^-1 ... phi_j^-1.

    The indices i_j come from phi_j(r_{i_{j-1}}) = r_{i_j} and must satisfy
    i_j - i_{j-1} >= 4j; n_j >= i_j is the largest tail cut needed to keep
    R_j at distance >= j from every earlier R'_k.
    """
    verts = tuple(ray_vertices(R))
    if not _geodesic_from_start(g, verts):
        raise PreconditionError("ray is not geodesic inside the window")
    for phi in autos:
        if phi.kind != "elliptic":
            raise PreconditionError(f"automorphism {phi.id} is not declared elliptic")
    idx = [0]
    for j, phi in enumerate(autos, start=1):
        img = phi(verts[idx[-1]])
        if img not in verts:
            raise PreconditionError(f"automorphism {j} does not map r_{idx[-1]} onto the ray")
        nxt = verts.index(img)
        if nxt - idx[-1] < 4 * j:
            raise PreconditionError(f"gap i_{j} - i_{j - 1} = {nxt - idx[-1]} is below 4j = {4 * j}")
        idx.append(nxt)
    rays = [Ray(verts)]
    cuts = [0]
    for j in range(1, len(autos) + 1):
        n_j = idx[j]
        for k in range(j):
            phi = autos[j - 1]
            for a in reversed(autos[k : j - 1]):
                phi = phi.compose(a)
            cut = tail_separation(g, Ray(verts[idx[k] :]), phi, j)
            n_j = max(n_j, idx[k] + cut.j)
        psi = autos[0].inv()
        for a in autos[1:j]:
            psi = psi.compose(a.inv())
        prefix = _image_prefix(g, psi, verts[n_j:])
        if not prefix:
            raise ConstructionError(f"translated ray {j} leaves the window; enlarge window", "translate_family")
        rays.append(Ray(prefix))
        cuts.append(n_j)
    fam = RayFamily(rays, FatnessSchedule(tuple(range(len(rays)))), separation_table(g, rays), "max_index")
    fam.notes["indices"] = idx
    fam.notes["cuts"] = cuts
    return fam
