from __future__ import annotations

import copy
import json

import pytest

from coarsegrid import __version__
from coarsegrid.certificates import SCHEMA_VERSION, Verdict, check_certificate, dumps, safe_check
from coarsegrid.cli import main
from coarsegrid.demos import NOT_CHECKED, run_demo
from coarsegrid.errors import UsageError
from coarsegrid.graph_core import instantiate_graph, spec_from_descriptor
from coarsegrid.minor_model import MinorModel


def run(argv, capsys):
    rc = main(argv)
    out, err = capsys.readouterr()
    return rc, out, err


@pytest.fixture(scope="module")
def cert_k2(tmp_path_factory):
    path = tmp_path_factory.mktemp("cert") / "k2.json"
    rc = main(["halfgrid", "--graph", "grid2d", "--radius", "120", "--mode", "kfat", "--K", "2",
               "--rows", "2", "--cols", "2", "--out", str(path)])
    assert rc == 0
    return path


# ---------------------------------------------------------------------------
# certificates


def test_certificate_envelope(cert_k2):
    data = json.loads(cert_k2.read_text())
    assert data["schema_version"] == SCHEMA_VERSION
    assert data["tool"] == {"name": "coarsegrid", "version": __version__}
    assert data["kind"] == "halfgrid"
    assert data["claims"] == {"valid": True, "fatness_at_least": 2}
    assert cert_k2.read_text() == dumps(data)
    for key in ("graph", "family", "connectors", "hex_subdivision", "model", "schedule", "reports"):
        assert key in data


def test_round_trip_verifies(cert_k2):
    v = check_certificate(cert_k2)
    assert v.status == "verified" and v.exit_code == 0
    assert "fatness" in v.detail


def test_rerun_is_byte_identical(cert_k2, tmp_path):
    again = tmp_path / "again.json"
    main(["halfgrid", "--graph", "grid2d", "--radius", "120", "--mode", "kfat", "--K", "2",
          "--rows", "2", "--cols", "2", "--out", str(again)])
    assert again.read_bytes() == cert_k2.read_bytes()


def test_single_vertex_mutation_is_refuted(cert_k2):
    data = json.loads(cert_k2.read_text())
    sets = data["model"]["branch_sets"]
    donor = sets["0,0"][0]
    sets["1,0"].append(donor)
    v = check_certificate(data)
    assert v.status == "refuted" and v.exit_code == 2
    assert v.witness["clause"] == "disjoint"
    assert v.witness["vertex"] == donor
    assert v.witness["element"] in ("V[0,0]", "V[1,0]")


def test_overclaimed_fatness_is_refuted_with_true_distance(cert_k2):
    data = json.loads(cert_k2.read_text())
    achieved = data["reports"]["fatness"]["achieved_K"]
    data["claims"]["fatness_at_least"] = achieved + 1
    v = check_certificate(data)
    assert v.status == "refuted"
    assert v.witness["distance"] == achieved
    # the witness names two elements whose grid distance really is that small
    spec, window = spec_from_descriptor(data["graph"])
    g = instantiate_graph(spec, window)
    m = MinorModel.from_json(g, data["model"])

    def members(name):
        kind, key = name[0], name[2:-1]
        if kind == "V":
            return next(s for x, s in m.branch_sets.items() if ",".join(map(str, x)) == key)
        return next(p[1:-1] for e, p in m.branch_paths.items()
                    if "~".join(",".join(map(str, x)) for x in e) == key)

    A, B = members(v.witness["first"]), members(v.witness["second"])
    assert min(abs(a[0] - b[0]) + abs(a[1] - b[1]) for a in A for b in B) == achieved


def test_claim_beyond_horizon_is_indeterminate(cert_k2):
    data = json.loads(cert_k2.read_text())
    data["claims"]["fatness_at_least"] = 10_000
    v = check_certificate(data)
    assert v.status == "indeterminate" and v.exit_code == 1
    assert v.line().startswith("indeterminate(")


def test_out_of_window_vertex_is_indeterminate(cert_k2):
    data = json.loads(cert_k2.read_text())
    data["model"]["branch_sets"]["0,0"].append("5000,5000")
    assert check_certificate(data).status == "indeterminate"


def test_schema_and_claim_errors(cert_k2, tmp_path):
    data = json.loads(cert_k2.read_text())
    bad = copy.deepcopy(data)
    bad["schema_version"] = 99
    with pytest.raises(UsageError, match="schema_version"):
        check_certificate(bad)
    bad = copy.deepcopy(data)
    del bad["claims"]
    with pytest.raises(UsageError):
        check_certificate(bad)
    bad = copy.deepcopy(data)
    bad["claims"]["fatness_at_least"] = -1
    verdict, err = safe_check(bad)
    assert verdict is None and isinstance(err, UsageError)
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    with pytest.raises(UsageError):
        check_certificate(junk)


def test_verdict_lines():
    assert Verdict("verified", "valid").line() == "verified: valid"
    v = Verdict("refuted", "bad", {"clause": "disjoint"})
    assert v.line() == 'refuted({"clause": "disjoint"}): bad' and v.exit_code == 2
    assert v.to_json()["witness"] == {"clause": "disjoint"}


# ---------------------------------------------------------------------------
# CLI exit codes


def test_cli_check_exit_codes(cert_k2, tmp_path, capsys):
    rc, out, _ = run(["check", str(cert_k2)], capsys)
    assert rc == 0 and out.startswith("verified")

    data = json.loads(cert_k2.read_text())
    data["model"]["branch_sets"]["1,0"].append(data["model"]["branch_sets"]["0,0"][0])
    mutated = tmp_path / "mutated.json"
    mutated.write_text(dumps(data))
    rc, out, _ = run(["check", str(mutated)], capsys)
    assert rc == 2 and out.startswith("refuted(")

    data = json.loads(cert_k2.read_text())
    data["claims"]["fatness_at_least"] = 10_000
    far = tmp_path / "far.json"
    far.write_text(dumps(data))
    rc, out, _ = run(["check", str(far)], capsys)
    assert rc == 1 and out.startswith("indeterminate(")

    data["schema_version"] = 7
    far.write_text(dumps(data))
    rc, _, err = run(["check", str(far)], capsys)
    assert rc == 3 and "schema_version" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["halfgrid", "--graph", "grid2d", "--mode", "kfat", "--K", "1", "--rows", "2"],
        ["halfgrid", "--graph", "grid2d", "--mode", "sideways", "--rows", "2", "--cols", "2"],
        ["generate", "--graph", "nosuchgraph"],
        ["generate", "--graph", "grid2d", "--param", "oops"],
        ["generate", "--graph", "grid2d", "--radius", "-1"],
        ["generate", "--graph", "cycle_spokes", "--param", "n=2"],
        ["demo", "nosuchdemo"],
        ["check", "/nonexistent/cert.json"],
        ["family", "--graph", "grid2d", "--count", "0"],
    ],
)
def test_cli_usage_errors_exit_3(argv, capsys):
    rc, _, _ = run(argv, capsys)
    assert rc == 3


def test_cli_construction_and_precondition_exit_1(capsys):
    rc, _, err = run(["halfgrid", "--graph", "grid2d", "--radius", "15", "--mode", "kfat", "--K", "3",
                      "--rows", "4", "--cols", "4"], capsys)
    assert rc == 1 and "hint:" in err
    rc, _, err = run(["halfgrid", "--graph", "hexhalfgrid", "--radius", "15", "--mode", "kfat", "--K", "1",
                      "--rows", "2", "--cols", "2"], capsys)
    assert rc == 1 and "automorphism" in err


def test_cli_generate(capsys):
    rc, out, _ = run(["generate", "--graph", "hexhalfgrid", "--radius", "2"], capsys)
    assert rc == 0
    data = json.loads(out)
    assert data["kind"] == "window"
    assert sorted(map(sorted, data["edges"])) == sorted(
        map(sorted, [["0,0", "1,0"], ["0,0", "0,1"], ["1,0", "1,1"], ["0,1", "0,2"]])
    )


def test_cli_rays_and_family(tmp_path, capsys):
    rc, out, err = run(["rays", "--graph", "grid2d", "--radius", "20", "--K", "2", "--profile", "5"], capsys)
    assert rc == 0 and "2-fat certificate ok" in err
    data = json.loads(out)
    assert data["ray"]["prefix"][:3] == ["0,0", "1,0", "2,0"]
    assert data["embedding_profile"]["table"]["5"] == 5

    out_path = tmp_path / "fam.json"
    rc, _, err = run(["family", "--graph", "grid2d", "--radius", "40", "--count", "3", "--out", str(out_path)], capsys)
    assert rc == 0 and "3 rays" in err
    fam = json.loads(out_path.read_text())["family"]
    assert len(fam["rays"]) == 3

    rc, _, err = run(["family", "--graph", "cycle_spokes", "--param", "n=24", "--radius", "30",
                      "--auto", "rotate:4", "--auto", "rotate:8"], capsys)
    assert rc == 0 and "3 rays" in err


def test_cli_halfgrid_with_family_file(tmp_path, capsys):
    fam_path = tmp_path / "fam.json"
    assert main(["family", "--graph", "grid2d", "--radius", "120", "--count", "8", "--out", str(fam_path)]) == 0
    cert = tmp_path / "cert.json"
    rc, _, err = run(["halfgrid", "--graph", "grid2d", "--radius", "120", "--mode", "kfat", "--K", "1",
                      "--rows", "2", "--cols", "2", "--family", str(fam_path), "--out", str(cert)], capsys)
    assert rc == 0 and "K-fat: 1 (measured fatness" in err
    assert check_certificate(cert).status == "verified"


# ---------------------------------------------------------------------------
# demos


@pytest.mark.parametrize("demo", ["example41", "example42", "tightness"])
def test_demos_pass(demo):
    rep = run_demo(demo)
    assert rep.passed
    verdicts = {f.fact: f.verdict for f in rep.facts}
    assert NOT_CHECKED in verdicts.values()
    assert all(v in ("pass", NOT_CHECKED) for v in verdicts.values())


def test_demo_cli_writes_report(tmp_path, capsys):
    out = tmp_path / "demo.json"
    rc, text, _ = run(["demo", "tightness", "--out", str(out)], capsys)
    assert rc == 0 and "[pass] pipeline-rejects" in text
    data = json.loads(out.read_text())
    assert data["kind"] == "demo" and data["demo"] == "tightness"
