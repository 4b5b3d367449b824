"""Self-contained certificate files and their independent re-verification.

A certificate carries the graph descriptor, the construction record and the
final model.  ``check_certificate`` trusts none of the construction: it
rebuilds the window from the descriptor and recomputes validity and
distances from scratch.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import CoarseGridError, InvalidModelError, OutOfWindowError, UsageError
from .graph_core import GraphHandle, instantiate_graph, spec_from_descriptor
from .minor_model import MinorModel, fatness, ultrafat_table, validate_model

SCHEMA_VERSION = 1
TOOL = "coarsegrid"


def dumps(data: dict) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def envelope(kind: str, body: dict) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "tool": {"name": TOOL, "version": __version__}, "kind": kind}
    out.update(body)
    return out


@dataclass
class Certificate:
    data: dict
    model: MinorModel | None = None
    summary: str = ""
    elapsed: float = 0.0
    extras: dict = field(default_factory=dict)

    def dumps(self) -> str:
        return dumps(self.data)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def for_halfgrid(
        cls,
        g: GraphHandle,
        *,
        mode,
        K,
        rows,
        cols,
        cap,
        family,
        schedule,
        connectors,
        aux,
        hexsub,
        report,
        model,
        measured,
        seed,
        elapsed,
    ) -> "Certificate":
        claims = {"valid": True}
        if mode == "kfat":
            claims["fatness_at_least"] = K
            achieved = measured["fatness"]["achieved_K"]
            summary = f"K-fat: {K} (measured fatness {achieved}; {elapsed:.1f}s)"
        else:
            claims["ultrafat_up_to"] = cap
            summary = f"ultra-fat up to: {cap} ({rows}x{cols}; {elapsed:.1f}s)"
        hex_json = {
            "rows": hexsub.rows,
            "cols": hexsub.cols,
            "family_indices": list(hexsub.family_indices),
            "order": [list(r) for r in hexsub.order],
            "horizontals": [
                {
                    "rung": list(r),
                    "path": g.tokens(hexsub.horizontals[r]),
                    "attach": list(hexsub.attach[r]),
                    "connector": hexsub.connectors.get(r),
                }
                for r in hexsub.order
                if r in hexsub.horizontals
            ],
        }
        body = {
            "graph": g.descriptor(),
            "mode": mode,
            "K": K,
            "rows": rows,
            "cols": cols,
            "seed": seed,
            "schedule": schedule.to_json(),
            "family": family.to_json(g),
            "connectors": [c.to_json(g) for c in connectors],
            "auxiliary": aux.summary(),
            "hex_subdivision": hex_json,
            "model": model.to_json(g),
            "claims": claims,
            "reports": {"assembly": report.to_json(), **measured},
        }
        extras = {"family": family, "hexsub": hexsub, "report": report, "connectors": connectors}
        return cls(envelope("halfgrid", body), model, summary, elapsed, extras)


@dataclass(frozen=True)
class Verdict:
    """Outcome of re-verification; ``status`` is verified, refuted or indeterminate."""

    status: str
    detail: str
    witness: dict | None = None

    @property
    def exit_code(self) -> int:
        return {"verified": 0, "refuted": 2}.get(self.status, 1)

    def to_json(self) -> dict:
        out = {"status": self.status, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    def line(self) -> str:
        if self.status == "refuted" and self.witness:
            return f"refuted({json.dumps(self.witness, sort_keys=True)}): {self.detail}"
        if self.status == "indeterminate":
            return f"indeterminate({self.detail})"
        return f"{self.status}: {self.detail}"


def load_certificate(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate {path}: {exc}") from exc
    _check_schema(data)
    return data


def _check_schema(data) -> None:
    if not isinstance(data, dict):
        raise UsageError("certificate must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise UsageError(f"unsupported schema_version {data.get('schema_version')!r}; expected {SCHEMA_VERSION}")
    for key in ("graph", "model", "claims"):
        if key not in data:
            raise UsageError(f"certificate lacks field {key!r}")
    if not isinstance(data["claims"], dict):
        raise UsageError("claims must be an object")


def check_certificate(source: str | Path | dict) -> Verdict:
    """Re-verify a certificate's claims from its graph descriptor alone."""
    data = source if isinstance(source, dict) else load_certificate(source)
    _check_schema(data)
    spec, window = spec_from_descriptor(data["graph"])
    g = instantiate_graph(spec, window)
    claims = data["claims"]
    try:
        model = MinorModel.from_json(g, data["model"])
    except OutOfWindowError as exc:
        return Verdict("indeterminate", f"model vertex {exc.vertex!r} lies outside the window")
    rep = validate_model(g, model)
    if rep.status == "indeterminate":
        return Verdict("indeterminate", f"{rep.clause}: {rep.detail}")
    if not rep.valid:
        w = {"clause": rep.clause, "element": rep.element}
        if rep.vertex is not None:
            w["vertex"] = g.token(rep.vertex)
        return Verdict("refuted", f"model is not valid: {rep.detail}", w)
    notes = ["valid"]
    if "fatness_at_least" in claims:
        K = claims["fatness_at_least"]
        if not isinstance(K, int) or K < 0:
            raise UsageError("fatness_at_least must be a nonnegative integer")
        if K > g.horizon:
            return Verdict("indeterminate", f"claimed fatness {K} exceeds the window horizon {g.horizon}")
        try:
            f = fatness(g, model)
        except InvalidModelError as exc:  # pragma: no cover - validated above
            return Verdict("refuted", str(exc))
        if not f.at_least(K):
            a, b, d = f.violating_pair
            w = {"first": a, "second": b, "distance": d}
            if f.exact:
                return Verdict("refuted", f"fatness is {d}, claimed at least {K}", w)
            return Verdict("indeterminate", f"windowed fatness {d} is below {K} but not exact")
        if not f.exact:
            return Verdict("indeterminate", f"fatness {f.achieved_K} measured but not exact in the window")
        notes.append(f"fatness {f.achieved_K} >= {K}")
    if "ultrafat_up_to" in claims:
        Kmax = claims["ultrafat_up_to"]
        if not isinstance(Kmax, int) or Kmax < 0:
            raise UsageError("ultrafat_up_to must be a nonnegative integer")
        if model.pattern.kind != "halfgrid_portion":
            raise UsageError("ultrafat claims need a halfgrid_portion model")
        if Kmax > g.horizon:
            return Verdict("indeterminate", f"claimed ultra-fat level {Kmax} exceeds the window horizon {g.horizon}")
        table = ultrafat_table(g, model, Kmax)
        for row in table.rows:
            if not row.passed:
                w = None
                if row.witness is not None:
                    w = {"level": row.K, "first": row.witness[0], "second": row.witness[1], "distance": row.witness[2]}
                if row.exact:
                    return Verdict("refuted", f"submodel beyond level {row.K} is not {row.K}-fat", w)
                return Verdict("indeterminate", f"level {row.K} fails in the window but not exactly")
            if not row.exact:
                return Verdict("indeterminate", f"level {row.K} measured but not exact in the window")
        notes.append(f"ultra-fat rows 0..{table.rows[-1].K} pass")
    return Verdict("verified", "; ".join(notes))


def safe_check(source) -> tuple[Verdict | None, CoarseGridError | None]:
    try:
        return check_certificate(source), None
    except CoarseGridError as exc:
        return None, exc
