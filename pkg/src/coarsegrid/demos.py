"""Measured demonstrations on the two counterexample graphs.

Every fact is measured inside a window and reported with its verdict.
Statements about all of an infinite graph (no fat half-grid minor exists)
cannot be measured and are reported as such.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError, UsageError
from .graph_core import GeneratorSpec, GraphHandle, Window, distance_exact, instantiate_graph
from .minor_model import MinorModel, PatternDescriptor, fatness
from .ray_families import RayFamily, separation_table
from .hexgrid import FatnessSchedule
from .rays import Ray

NOT_CHECKED = "not machine-checked (infinite claim)"
DEMOS = ("example41", "example42", "tightness")


@dataclass(frozen=True)
class DemoFact:
    fact: str
    claim: str
    measured: object
    verdict: str

    def to_json(self) -> dict:
        return {"fact": self.fact, "claim": self.claim, "measured": self.measured, "verdict": self.verdict}


@dataclass
class DemoReport:
    demo: str
    params: dict
    facts: list = field(default_factory=list)

    def add(self, fact: str, claim: str, measured, ok: bool | None):
        verdict = NOT_CHECKED if ok is None else ("pass" if ok else "fail")
        self.facts.append(DemoFact(fact, claim, measured, verdict))

    @property
    def passed(self) -> bool:
        return all(f.verdict != "fail" for f in self.facts)

    def to_json(self) -> dict:
        return {"demo": self.demo, "params": self.params, "facts": [f.to_json() for f in self.facts]}

    def lines(self) -> list[str]:
        return [f"[{f.verdict}] {f.fact}: {f.claim} (measured: {f.measured})" for f in self.facts]


def _ray_prefix(g: GraphHandle, make, depth: int | None = None) -> tuple:
    """Ray vertices make(0), make(1), ... while inside the window (and within ``depth``)."""
    out = []
    i = 0
    while True:
        v = make(i)
        if v not in g or (depth is not None and g.depth(v) > depth):
            break
        out.append(v)
        i += 1
    return tuple(out)


# ---------------------------------------------------------------------------
# comb-and-clique graph


def demo_example41(n: int = 6, radius: int = 20, Kmax: int = 2) -> DemoReport:
    g = instantiate_graph(GeneratorSpec("example41", {"n": n}), Window(None, radius))
    gen = g.gen
    rep = DemoReport("example41", {"n": n, "radius": radius, "Kmax": Kmax})

    def ray(j):
        # inner half of the window, so measured distances are exact
        return _ray_prefix(g, lambda i: gen._ray(i, j), radius // 2)

    bad = []
    count = 0
    for i in range(n):
        for j in range(1, n):
            ends = {gen._ray(i, j), ("c", i)}
            path = g.shortest_path(
                gen._ray(i, j), ("c", i), blocked=lambda u: g.vertex(u)[0] != "p" and g.vertex(u) not in ends
            )
            count += 1
            if path is None or len(path) - 1 != j:
                bad.append((i, j, None if path is None else len(path) - 1))
    rep.add("path-lengths", f"the connecting path from ray {{j}} vertex i to clique vertex i has length j (i, j < {n})",
            {"checked": count, "mismatches": bad}, not bad)
    for K in range(1, Kmax + 1):
        worst = None
        exact = True
        for a in range(K, n):
            for b in range(a + 1, n):
                d, ex = distance_exact(g, ray(a), ray(b))
                exact = exact and ex
                if d is not None and (worst is None or d < worst):
                    worst = d
        rep.add(f"rays-apart-K{K}", f"rays {K}..{n - 1} are pairwise at least {2 * K} apart",
                {"min_distance": worst, "exact": exact}, worst is not None and worst >= 2 * K and exact)
    rep.add("no-2-fat-halfgrid", "the half-grid is not a 2-fat minor", None, None)
    return rep


# ---------------------------------------------------------------------------
# rays attached to a spine by paths of length K - 1


def _example42_graph(K: int, radius: int) -> GraphHandle:
    return instantiate_graph(GeneratorSpec("example42", {"K": K}), Window(None, radius))


def omega_model(g: GraphHandle, count: int, length: int) -> MinorModel:
    """(2K - 2)-fat model of ``count`` disjoint rays, each cut into ``length`` branch sets.

    On ray j, branch set k spans positions [kP, kP + D - 2] and the branch
    path to set k + 1 runs on to (k + 1)P, where D = 2K - 2 and P = 2D - 2.
    """
    gen = g.gen
    K = gen.K
    D = 2 * K - 2
    if D < 2:
        raise UsageError("the spread-out ray model needs K >= 2")
    span = D - 2
    period = span + D
    sets, paths = {}, {}
    for j in range(count):
        for k in range(length):
            lo = k * period
            sets[(j, k)] = frozenset(gen._ray(i, j) for i in range(lo, lo + span + 1))
            if k + 1 < length:
                paths[((j, k), (j, k + 1))] = tuple(gen._ray(i, j) for i in range(lo + span, lo + period + 1))
    return MinorModel(PatternDescriptor.omega(count, length), sets, paths)


def example42_family(g: GraphHandle, count: int) -> RayFamily:
    gen = g.gen
    rays = [Ray(_ray_prefix(g, lambda i, j=j: gen._ray(i, j))) for j in range(count)]
    D = 2 * gen.K - 2
    return RayFamily(rays, FatnessSchedule.constant(gen.K, count), separation_table(g, rays), f"at_least:{D}")


def demo_example42(K: int = 3, radius: int = 40, levels: int = 20, rays: int = 4) -> DemoReport:
    if K < 2:
        raise UsageError("the example42 demo needs K >= 2")
    g = _example42_graph(K, radius)
    gen = g.gen
    rep = DemoReport("example42", {"K": K, "radius": radius, "levels": levels, "rays": rays})

    # connector lengths
    bad, count = [], 0
    for v in g.vertices():
        if v[0] != "r":
            continue
        _, i, j = v
        t = ("t", i + j)
        if t not in g:
            continue
        ends = {v, t}
        path = g.shortest_path(v, t, blocked=lambda u: g.vertex(u)[0] != "p" and g.vertex(u) not in ends)
        count += 1
        if path is None or len(path) - 1 != K - 1:
            bad.append((g.token(v), None if path is None else len(path) - 1))
    rep.add("connector-length", f"every connecting path has length K-1 = {K - 1}", {"checked": count, "mismatches": bad[:5]},
            count > 0 and not bad)

    # degrees
    over = []
    top = []
    for i in range(levels + 1):
        deg = len(gen.neighbors(("t", i)))
        top.append(deg)
        if deg > (i + 1) ** 2 + 2:
            over.append((i, deg))
    rep.add("spine-degree", f"deg(t_i) <= (i+1)^2 + 2 for i <= {levels}",
            {f"deg(t_{levels})": top[-1], "bound": (levels + 1) ** 2 + 2, "violations": over}, not over)
    rdeg = max(len(gen.neighbors(v)) for v in g.vertices() if v[0] == "r")
    rep.add("ray-degree", "every ray vertex has degree at most 3", rdeg, rdeg <= 3)

    # ray separations
    prefixes = [_ray_prefix(g, lambda i, j=j: gen._ray(i, j), radius // 2) for j in range(rays)]
    seps, all_exact = [], True
    for a in range(rays):
        for b in range(a + 1, rays):
            d, ex = distance_exact(g, prefixes[a], prefixes[b])
            seps.append(d)
            all_exact = all_exact and ex
    rep.add("ray-separation", f"d(R^i, R^j) = 2K-2 = {2 * K - 2} for distinct rays",
            {"distances": seps, "exact": all_exact}, all_exact and all(d == 2 * K - 2 for d in seps))

    # levels
    worst, checked = 0, 0
    for m in range(radius):
        level = gen.level(m)
        if not all(v in g for v in level):
            continue
        others = [v for v in level if v != ("t", m)]
        if not others:
            continue
        # a windowed distance is an upper bound, which is all this fact needs
        d, _ = distance_exact(g, [("t", m)], others)
        worst = max(worst, d)
        checked += 1
    rep.add("level-radius", f"d(t_m, U_m - t_m) <= K-1 = {K - 1} for every in-window level",
            {"levels": checked, "max": worst}, checked > 0 and worst <= K - 1)

    # the spread-out ray model
    m = omega_model(g, 3, 3)
    f = fatness(g, m)
    rep.add("ray-model-fatness", f"the spread-out model of disjoint rays has fatness exactly 2K-2 = {2 * K - 2}",
            {"fatness": f.achieved_K, "exact": f.exact}, f.exact and f.achieved_K == 2 * K - 2)
    rep.add("no-K-fat-halfgrid", f"the half-grid is not a {K}-fat minor", None, None)
    return rep


def demo_tightness(K: int = 3, radius: int = 40) -> DemoReport:
    """Rays exactly 2K - 2 apart: fat ray model exists, the half-grid pipeline refuses."""
    from .halin_pipeline import pipeline_halfgrid

    if K < 2:
        raise UsageError("the tightness demo needs K >= 2")
    g = _example42_graph(K, radius)
    rep = DemoReport("tightness", {"K": K, "radius": radius})
    m = omega_model(g, 3, 3)
    f = fatness(g, m)
    rep.add("ray-model-fatness", f"disjoint-ray model with fatness exactly 2K-2 = {2 * K - 2}",
            {"fatness": f.achieved_K, "exact": f.exact}, f.exact and f.achieved_K == 2 * K - 2)
    fam = example42_family(g, 4)
    rep.add("family-separation", f"the rays are only {2 * K - 2} apart",
            fam.min_separation(), fam.min_separation() == 2 * K - 2)
    try:
        pipeline_halfgrid(g, "kfat", 2, 2, K=K, source=fam)
        msg, ok = "accepted", False
    except PreconditionError as exc:
        msg = str(exc)
        ok = f"2K-1 = {2 * K - 1}" in msg
    rep.add("pipeline-rejects", f"a {K}-fat half-grid construction needs rays 2K-1 = {2 * K - 1} apart", msg, ok)
    rep.add("no-K-fat-halfgrid", f"the half-grid is not a {K}-fat minor of this graph", None, None)
    return rep


def run_demo(demo: str, **kw) -> DemoReport:
    if demo == "example41":
        return demo_example41(**{k: v for k, v in kw.items() if k in ("n", "radius", "Kmax") and v is not None})
    if demo == "example42":
        return demo_example42(**{k: v for k, v in kw.items() if k in ("K", "radius", "levels", "rays") and v is not None})
    if demo == "tightness":
        return demo_tightness(**{k: v for k, v in kw.items() if k in ("K", "radius") and v is not None})
    raise UsageError(f"unknown demo {demo!r}; expected one of {', '.join(DEMOS)}")
