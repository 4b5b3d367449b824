from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from coarsegrid.errors import ConstructionError, InvalidModelError, PreconditionError, UsageError
from coarsegrid.graph_core import GeneratorSpec, Window, instantiate_graph
from coarsegrid.hexgrid import FatnessSchedule, HexSubdivision, fig1_order, hex_row
from coarsegrid.minor_model import (
    MinorModel,
    PatternDescriptor,
    contract_hex_subdivision,
    divergence_probe,
    extract_diverging_rays,
    fatness,
    regrid_ultrafat,
    submodel_beyond,
    ultrafat_table,
    validate_model,
)


def grid(radius=60):
    return instantiate_graph(GeneratorSpec("grid2d", {}), Window(None, radius))


def explicit(edges, vertices=()):
    return instantiate_graph(GeneratorSpec("explicit", {}, tuple(edges), tuple(vertices)), Window(None, 100))


def lattice_model(rows, cols, S, a, x0=0, y0=0):
    """Half-grid model in Z^2: plus-shaped branch sets with arms a, centres S apart.

    Fatness is min(2a + 2, S - 2a) by hand: two paths leaving one set are
    2a + 2 apart, neighbouring sets S - 2a apart.
    """
    sets, paths = {}, {}
    for c in range(cols):
        for h in range(rows):
            X, Y = x0 + S * c, y0 + S * h
            arm = {(X + t, Y) for t in range(-a, a + 1)} | {(X, Y + t) for t in range(-a, a + 1)}
            sets[(c, h)] = frozenset(arm)
            if c + 1 < cols:
                paths[((c, h), (c + 1, h))] = tuple((x, Y) for x in range(X + a, X + S - a + 1))
            if h + 1 < rows:
                paths[((c, h), (c, h + 1))] = tuple((X, y) for y in range(Y + a, Y + S - a + 1))
    return MinorModel(PatternDescriptor.halfgrid(rows, cols), sets, paths)


def _exempt(a, b):
    (ka, xa), (kb, xb) = a, b
    if ka == kb:
        return False
    v, e = (xa, xb) if ka == "V" else (xb, xa)
    return v in e


def _elements(m):
    out = [(("V", x), set(s)) for x, s in m.branch_sets.items()]
    out += [(("E", e), set(p[1:-1])) for e, p in m.branch_paths.items() if len(p) > 2]
    return out


def oracle_fatness(m, dist):
    """Minimum of dist(u, v) over non-exempt element pairs; None if nothing is finite."""
    best = None
    els = _elements(m)
    for (ka, A), (kb, B) in itertools.combinations(els, 2):
        if _exempt(ka, kb):
            continue
        d = min(dist(u, v) for u in A for v in B)
        if d != float("inf") and (best is None or d < best):
            best = d
    return best


def l1(u, v):
    return abs(u[0] - v[0]) + abs(u[1] - v[1])


# ---------------------------------------------------------------------------
# brute-force oracle on random explicit graphs


def floyd_warshall(vs, edges):
    inf = float("inf")
    d = {(a, b): (0 if a == b else inf) for a in vs for b in vs}
    for a, b in edges:
        d[a, b] = d[b, a] = 1
    for k in vs:
        for a in vs:
            dak = d[a, k]
            if dak == inf:
                continue
            for b in vs:
                if dak + d[k, b] < d[a, b]:
                    d[a, b] = dak + d[k, b]
    return d


def random_model(rng, names, edges):
    adj = {v: set() for v in names}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    k = rng.randint(2, min(6, len(names)))
    seeds = rng.sample(names, k)
    owner = {s: i for i, s in enumerate(seeds)}
    sets = [{s} for s in seeds]
    for _ in range(rng.randint(0, 8)):
        i = rng.randrange(k)
        frontier = sorted({u for v in sets[i] for u in adj[v] if u not in owner})
        if frontier:
            u = rng.choice(frontier)
            owner[u] = i
            sets[i].add(u)
    used = set()
    pattern_edges, paths = [], {}
    pairs = list(itertools.combinations(range(k), 2))
    rng.shuffle(pairs)
    for i, j in pairs:
        if rng.random() < 0.3:
            continue
        parent = {v: None for v in sorted(sets[i])}
        queue = list(parent)
        hit = None
        for v in queue:
            for u in sorted(adj[v]):
                if u in parent:
                    continue
                if owner.get(u) == j:
                    parent[u] = v
                    hit = u
                    break
                if u in owner or u in used:
                    continue
                parent[u] = v
                queue.append(u)
            if hit:
                break
        if hit is None:
            continue
        path = [hit]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        path.reverse()
        used.update(path[1:-1])
        e = tuple(sorted((f"s{i}", f"s{j}")))
        pattern_edges.append(e)
        paths[e] = tuple(path) if e[0] == f"s{i}" else tuple(reversed(path))
    pattern = PatternDescriptor.explicit([f"s{i}" for i in range(k)], pattern_edges)
    return MinorModel(pattern, {f"s{i}": frozenset(sets[i]) for i in range(k)}, paths)


@st.composite
def graph_and_model(draw):
    n = draw(st.integers(3, 40))
    names = [f"v{i}" for i in range(n)]
    p = draw(st.floats(0.03, 0.35))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    edges = [e for e in itertools.combinations(names, 2) if rng.random() < p]
    return names, edges, random_model(rng, names, edges)


@settings(max_examples=250, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(graph_and_model())
def test_fatness_matches_all_pairs_oracle(case):
    names, edges, m = case
    g = explicit(edges, names)
    assert validate_model(g, m).valid
    d = floyd_warshall(names, edges)
    expected = oracle_fatness(m, lambda u, v: d[u, v])
    rep = fatness(g, m)
    assert rep.achieved_K == expected
    assert rep.exact
    if expected is not None:
        first, second, dist = rep.violating_pair
        assert dist == expected


@settings(max_examples=80, deadline=None)
@given(graph_and_model())
def test_fatness_one_and_two_match_direct_scan(case):
    names, edges, m = case
    g = explicit(edges, names)
    adjacent = {frozenset(e) for e in edges}
    shared = touching = False
    for (ka, A), (kb, B) in itertools.combinations(_elements(m), 2):
        if _exempt(ka, kb):
            continue
        if A & B:
            shared = True
        if any(frozenset((u, v)) in adjacent for u in A for v in B):
            touching = True
    rep = fatness(g, m)
    assert rep.at_least(1) == (not shared)
    assert rep.at_least(2) == (not shared and not touching)


# ---------------------------------------------------------------------------
# validity


def p3():
    g = explicit([("a", "b"), ("b", "c")])
    pattern = PatternDescriptor.explicit(["a", "b", "c"], [("a", "b"), ("b", "c")])
    sets = {x: frozenset({x}) for x in "abc"}
    paths = {("a", "b"): ("a", "b"), ("b", "c"): ("b", "c")}
    return g, MinorModel(pattern, sets, paths)


def test_identity_model_of_path_is_valid_and_one_fat():
    g, m = p3()
    assert validate_model(g, m).valid
    rep = fatness(g, m)
    assert rep.achieved_K == 1
    assert rep.violating_pair == ("V[a]", "V[b]", 1)


def test_two_far_singletons_in_grid():
    g = grid(10)
    m = MinorModel(PatternDescriptor.explicit(["p", "q"], []), {"p": {(0, 0)}, "q": {(0, 5)}}, {})
    assert fatness(g, m).achieved_K == 5


def _clause(g, m):
    return validate_model(g, m).clause


def test_validity_clauses_are_named():
    g, m = p3()
    bad = MinorModel(m.pattern, {**m.branch_sets, "c": frozenset({"b", "c"})}, m.branch_paths)
    assert _clause(g, bad) == "disjoint"
    bad = MinorModel(m.pattern, {k: v for k, v in m.branch_sets.items() if k != "c"}, m.branch_paths)
    assert _clause(g, bad) == "coverage"
    bad = MinorModel(m.pattern, {**m.branch_sets, "c": frozenset()}, m.branch_paths)
    assert _clause(g, bad) == "nonempty"
    bad = MinorModel(m.pattern, m.branch_sets, {("a", "b"): ("a", "b")})
    assert _clause(g, bad) == "coverage"

    g4 = explicit([("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")])
    pat = PatternDescriptor.explicit(["x", "y"], [("x", "y")])
    assert _clause(g4, MinorModel(pat, {"x": {"a", "c"}, "y": {"e"}}, {("x", "y"): ("c", "d", "e")})) == "connected"
    assert _clause(g4, MinorModel(pat, {"x": {"a"}, "y": {"e"}}, {("x", "y"): ("a", "c", "d", "e")})) == "path"
    assert _clause(g4, MinorModel(pat, {"x": {"a"}, "y": {"e"}}, {("x", "y"): ("a", "b", "c")})) == "endpoints"
    pat3 = PatternDescriptor.explicit(["x", "y", "z"], [("x", "y")])
    m3 = MinorModel(pat3, {"x": {"a"}, "y": {"e"}, "z": {"c"}}, {("x", "y"): ("a", "b", "c", "d", "e")})
    assert _clause(g4, m3) == "interior"

    gs = explicit([("a", "m"), ("m", "b"), ("m", "c"), ("m", "d")])
    pat = PatternDescriptor.explicit(["a", "b", "c", "d"], [("a", "b"), ("c", "d")])
    m = MinorModel(
        pat,
        {x: {x} for x in "abcd"},
        {("a", "b"): ("a", "m", "b"), ("c", "d"): ("c", "m", "d")},
    )
    rep = validate_model(gs, m)
    assert rep.clause == "internally_disjoint" and rep.vertex == "m"


def test_out_of_window_vertex_is_indeterminate():
    g = grid(3)
    m = MinorModel(PatternDescriptor.explicit(["p"], []), {"p": {(0, 0), (9, 9)}}, {})
    rep = validate_model(g, m)
    assert rep.status == "indeterminate" and rep.vertex == (9, 9)


def test_fatness_rejects_invalid_model():
    g, m = p3()
    bad = MinorModel(m.pattern, {**m.branch_sets, "c": frozenset({"b"})}, m.branch_paths)
    with pytest.raises(InvalidModelError):
        fatness(g, bad)


def test_paths_sharing_an_end_set_are_not_exempt():
    g = grid(10)
    pattern = PatternDescriptor.explicit(["o", "p", "q"], [("o", "p"), ("o", "q")])
    m = MinorModel(
        pattern,
        {"o": {(0, 0)}, "p": {(3, 0)}, "q": {(0, 3)}},
        {("o", "p"): ((0, 0), (1, 0), (2, 0), (3, 0)), ("o", "q"): ((0, 0), (0, 1), (0, 2), (0, 3))},
    )
    rep = fatness(g, m)
    assert rep.achieved_K == 2
    assert rep.violating_pair == ("E[o~p]", "E[o~q]", 2)


def test_model_json_round_trip():
    g = grid(30)
    m = lattice_model(3, 3, 6, 1)
    back = MinorModel.from_json(g, m.to_json(g))
    assert back.branch_sets == m.branch_sets and back.branch_paths == m.branch_paths


# ---------------------------------------------------------------------------
# lattice fixtures, ultra-fatness, submodels


@pytest.mark.parametrize("S,a", [(6, 1), (10, 2), (7, 1), (5, 0), (9, 3)])
def test_lattice_fatness_formula(S, a):
    g = grid(80)
    m = lattice_model(3, 4, S, a)
    assert validate_model(g, m).valid
    expected = oracle_fatness(m, l1)
    assert expected == min(2 * a + 2, S - 2 * a)
    assert fatness(g, m).achieved_K == expected


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 9), st.integers(0, 2), st.integers(0, 4))
def test_submodel_beyond_never_decreases_fatness(S, a, K):
    if S - 2 * a < 1:
        return
    g = grid(80)
    m = lattice_model(4, 4, S, a)
    base = fatness(g, m).achieved_K
    sub = fatness(g, submodel_beyond(m, K)).achieved_K
    assert sub is None or sub >= base


def test_submodel_beyond_basic_cases():
    m = lattice_model(4, 4, 6, 1)
    assert submodel_beyond(m, 0) is m
    top = submodel_beyond(m, 4)
    assert top.pattern.vertices() == [] and top.branch_sets == {}
    sub = submodel_beyond(m, 2)
    kept = set(sub.pattern.vertices())
    assert kept == {(c, h) for c in range(4) for h in range(4) if c >= 2 or h >= 2}
    for (x, y) in sub.branch_paths:
        assert x in kept and y in kept
    with pytest.raises(UsageError):
        submodel_beyond(m, 5)


def test_ultrafat_rows_match_submodel_fatness():
    g = grid(80)
    m = lattice_model(5, 5, 4, 0)  # 2-fat everywhere
    table = ultrafat_table(g, m, 3)
    assert [r.K for r in table.rows] == [0, 1, 2, 3]
    assert [r.passed for r in table.rows] == [True, True, True, False]
    assert table.passes_up_to() == 2
    bad = table.rows[3]
    sub = submodel_beyond(m, 3)
    assert bad.min_distance == oracle_fatness(sub, l1) == 2
    assert bad.witness[2] == 2
    for r in table.rows[1:]:
        assert r.passed == fatness(g, submodel_beyond(m, r.K)).at_least(r.K)


def test_ultrafat_row_zero_is_validity():
    g = grid(40)
    m = lattice_model(3, 3, 6, 1)
    broken = MinorModel(m.pattern, {**m.branch_sets, (0, 0): frozenset()}, m.branch_paths)
    table = ultrafat_table(g, broken, 3)
    assert len(table.rows) == 1 and not table.rows[0].passed
    assert ultrafat_table(g, m, 3).rows[0].passed


def test_uniformly_fat_lattice_is_ultrafat():
    g = grid(60)
    m = lattice_model(4, 4, 6, 1)
    assert ultrafat_table(g, m, 4).passed
    assert fatness(g, submodel_beyond(m, 2)).achieved_K >= 2


def test_ultrafat_needs_halfgrid_pattern():
    g, m = p3()
    with pytest.raises(UsageError):
        ultrafat_table(g, m, 2)


# ---------------------------------------------------------------------------
# divergence probe


def test_divergence_probe_on_fat_lattice():
    g = grid(80)
    m = lattice_model(5, 5, 6, 1)
    pairs = [((0, 0), (0, 1)), ((0, 0), (0, 2)), ((0, 0), (2, 2)), ((0, 0), (4, 4)), ((1, 1), (1, 1))]
    probe = divergence_probe(g, m, pairs)
    assert [r.pattern_distance for r in probe.rows] == [1, 2, 4, 8, 0]
    assert probe.rows[-1].ambient_distance == 0
    assert probe.trend == "nondecreasing sample"
    assert probe.branch_sets_finite


def test_divergence_probe_flags_flat_distances():
    names = [f"l{i}" for i in range(5)]
    g = explicit(list(itertools.combinations(names, 2)))
    pattern = PatternDescriptor.explicit(names, [(names[i], names[i + 1]) for i in range(4)])
    m = MinorModel(
        pattern,
        {x: {x} for x in names},
        {(names[i], names[i + 1]): (names[i], names[i + 1]) for i in range(4)},
    )
    probe = divergence_probe(g, m, [("l0", f"l{k}") for k in range(1, 5)])
    assert [r.ambient_distance for r in probe.rows] == [1, 1, 1, 1]
    assert probe.trend == "non-diverging sample"
    with pytest.raises(UsageError):
        divergence_probe(g, m, [("l0", "nope")])


# ---------------------------------------------------------------------------
# contraction of hexagonal subdivisions


def hex_identity(rows, cols, height):
    """The hexagonal half-grid as its own subdivision."""
    columns = tuple(tuple((c, y) for y in range(height)) for c in range(cols))
    horizontals, attach = {}, {}
    order = tuple(fig1_order(rows, cols))
    for c, h in order:
        y = hex_row(c, h)
        horizontals[(c, h)] = ((c, y), (c + 1, y))
        attach[(c, h)] = (y, y)
    return HexSubdivision(rows, cols, columns, tuple(range(cols)), horizontals, attach, order)


def test_contract_identity_hex_subdivision():
    g = instantiate_graph(GeneratorSpec("hexhalfgrid", {}), Window(None, 30))
    h = hex_identity(3, 3, 12)
    m = contract_hex_subdivision(g, h, FatnessSchedule.constant(1, 3))
    assert validate_model(g, m).valid
    assert fatness(g, m).at_least(1)
    assert m.branch_sets[(1, 0)] == frozenset({(1, 0), (1, 1)})


def test_contract_rejects_tight_spacing():
    g = instantiate_graph(GeneratorSpec("hexhalfgrid", {}), Window(None, 30))
    h = hex_identity(3, 3, 12)
    with pytest.raises(ConstructionError, match="spacing infeasible"):
        contract_hex_subdivision(g, h, FatnessSchedule.constant(3, 3))


def test_contract_rejects_short_rays():
    g = instantiate_graph(GeneratorSpec("hexhalfgrid", {}), Window(None, 30))
    h = hex_identity(3, 3, 5)
    with pytest.raises(ConstructionError, match="spacing infeasible"):
        contract_hex_subdivision(g, h, FatnessSchedule.constant(1, 3))


# ---------------------------------------------------------------------------
# regridding


def test_regrid_graded_lattice_is_ultrafat():
    g = grid(90)
    old = lattice_model(4, 11, 6, 1)  # 4-fat, so every column submodel is graded-fat
    new = regrid_ultrafat(g, old, 4, 4)
    assert new.pattern.rows == 4 and new.pattern.cols == 4
    assert validate_model(g, new).valid
    assert ultrafat_table(g, new, 4).passed
    # new set (n, k) contains old sets (n + 2k, n) and (n + 2k + 1, n)
    assert old.branch_sets[(5, 1)] <= new.branch_sets[(1, 2)]
    assert old.branch_sets[(6, 1)] <= new.branch_sets[(1, 2)]


def test_regrid_default_size_and_degenerate_source():
    g = grid(90)
    new = regrid_ultrafat(g, lattice_model(4, 11, 6, 1))
    assert (new.pattern.rows, new.pattern.cols) == (4, 4)
    single = lattice_model(3, 1, 6, 1)
    out = regrid_ultrafat(g, single)
    assert (out.pattern.rows, out.pattern.cols) == (1, 1)
    assert ultrafat_table(g, out, 4).passed


def test_regrid_requires_graded_fatness():
    g = grid(90)
    with pytest.raises(PreconditionError, match="graded-fatness"):
        regrid_ultrafat(g, lattice_model(4, 11, 4, 0), 4, 4)
    with pytest.raises(UsageError):
        regrid_ultrafat(g, lattice_model(4, 11, 6, 1), 4, 5)


# ---------------------------------------------------------------------------
# diverging rays


def square_rows_model(cols=6, rows=3, step=10):
    """Column c runs along the horizontal line y = c^2."""
    sets, paths = {}, {}
    for c in range(cols):
        y = c * c
        for h in range(rows):
            sets[(c, h)] = frozenset({(step * h, y)})
            if h + 1 < rows:
                paths[((c, h), (c, h + 1))] = tuple((x, y) for x in range(step * h, step * (h + 1) + 1))
            if c + 1 < cols:
                paths[((c, h), (c + 1, h))] = tuple((step * h, t) for t in range(y, (c + 1) ** 2 + 1))
    return MinorModel(PatternDescriptor.halfgrid(rows, cols), sets, paths)


def test_extract_rays_on_square_rows():
    g = grid(80)
    m = square_rows_model()
    assert validate_model(g, m).valid
    out = extract_diverging_rays(g, m, 6)
    assert len(out.rays) == 6
    for i, j in itertools.combinations(range(6), 2):
        assert out.separations[i][j] == j * j - i * i >= max(i, j)
    for c, R in enumerate(out.rays):
        assert all(v[1] == c * c for v in R.prefix)
    assert sorted(out.tail_separations) == [1, 2]
    for K, table in out.tail_separations.items():
        # tails stay on the same horizontal lines
        for i, j in itertools.combinations(range(6), 2):
            assert table[i][j] == j * j - i * i


def test_extract_single_ray_and_bad_count():
    g = grid(80)
    m = square_rows_model()
    out = extract_diverging_rays(g, m, 1)
    assert len(out.rays) == 1 and out.separations == ((0,),)
    with pytest.raises(UsageError):
        extract_diverging_rays(g, m, 7)
