"""Command-line interface.

Exit codes: 0 success or verified, 1 construction failure or indeterminate
verdict, 2 refuted, 3 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .certificates import check_certificate, dumps, envelope
from .demos import DEMOS, run_demo
from .errors import CoarseGridError, UsageError
from .graph_core import GeneratorSpec, GraphHandle, Window, instantiate_graph, load_edge_list, window_dump
from .halin_pipeline import auto_family, pipeline_halfgrid
from .ray_families import RayFamily
from .rays import embedding_profile, fat_ray_certificate, geodesic_ray


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _param(text: str) -> tuple[str, object]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return key, int(value)
    except ValueError:
        return key, value


def _graph_args(p: argparse.ArgumentParser, radius: int) -> None:
    p.add_argument("--graph", required=True, help="generator name (grid2d, halfgrid, hexhalfgrid, cycle_spokes, ...)")
    p.add_argument("--radius", type=int, default=radius, help="window radius around the basepoint")
    p.add_argument("--basepoint", default=None, help="basepoint token (default: the generator's)")
    p.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=VALUE",
                   help="generator parameter, e.g. n=24 or K=3 (repeatable)")
    p.add_argument("--edges", default=None, help="edge-list file for the explicit generator")
    p.add_argument("--seed", type=int, default=None, help="recorded but unused; every algorithm is deterministic")
    p.add_argument("--out", default=None, help="output file (default: standard output)")


def _graph(args) -> GraphHandle:
    if args.radius < 0:
        raise UsageError("--radius must be nonnegative")
    edges = load_edge_list(args.edges) if args.edges else ()
    spec = GeneratorSpec(args.graph, dict(args.param), edges)
    return instantiate_graph(spec, Window(args.basepoint, args.radius))


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coarsegrid", description="Fat half-grid minors from families of far-apart rays.")
    parser.add_argument("--version", action="version", version=f"coarsegrid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="dump a window of a generator")
    _graph_args(p, 5)

    p = sub.add_parser("rays", help="geodesic ray with fat-ray certificate and embedding profile")
    _graph_args(p, 40)
    p.add_argument("--base", default=None, help="start vertex token (default: basepoint)")
    p.add_argument("--K", type=int, default=1, help="fatness level to certify")
    p.add_argument("--profile", type=int, default=None, metavar="L", help="embedding profile up to L")

    p = sub.add_parser("family", help="ray family from automorphism data")
    _graph_args(p, 60)
    p.add_argument("--auto", action="append", default=None, metavar="ID",
                   help="automorphism id, e.g. translate:1,0 or rotate:8 (repeatable; default: generator's)")
    p.add_argument("--count", type=int, default=4, help="number of rays (non-elliptic case)")

    p = sub.add_parser("halfgrid", help="build and certify a fat half-grid model")
    _graph_args(p, 200)
    p.add_argument("--mode", choices=("kfat", "ultrafat"), required=True)
    p.add_argument("--K", type=int, default=None, help="fatness for kfat mode")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--family", default=None, help="ray family file (default: built from automorphisms)")
    p.add_argument("--auto", action="append", default=None, metavar="ID", help="automorphism id (repeatable)")
    p.add_argument("--spare", type=int, default=1, help="connector supply factor")
    p.add_argument("--cap", type=int, default=None, help="ultrafat schedule cap (default: max(rows, cols))")

    p = sub.add_parser("check", help="re-verify a certificate from scratch")
    p.add_argument("path")

    p = sub.add_parser("demo", help="measured facts on the counterexample graphs")
    p.add_argument("id", choices=DEMOS)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--n", type=int, default=None, help="truncation for example41")
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--out", default=None)
    return parser


def _cmd_generate(args) -> int:
    g = _graph(args)
    _emit(args, dumps(envelope("window", window_dump(g))))
    return 0


def _cmd_rays(args) -> int:
    g = _graph(args)
    base = g.parse(args.base) if args.base else g.basepoint
    R = geodesic_ray(g, base)
    cert = fat_ray_certificate(g, R, args.K)
    body = {"graph": g.descriptor(), "ray": R.to_json(g), "fat_certificate": cert.to_json()}
    if args.profile is not None:
        body["embedding_profile"] = embedding_profile(g, R, args.profile).to_json()
    _emit(args, dumps(envelope("ray", body)))
    _note(f"ray of {len(R)} vertices; {args.K}-fat certificate {'ok' if cert.ok else 'failed'}")
    return 0


def _cmd_family(args) -> int:
    g = _graph(args)
    if args.count < 1:
        raise UsageError("--count must be positive")
    fam = auto_family(g, args.count, args.auto)
    _emit(args, dumps(envelope("family", {"graph": g.descriptor(), "family": fam.to_json(g)})))
    _note(f"{len(fam.rays)} rays; min separation {fam.min_separation()}; violations {len(fam.violations())}")
    return 0


def _cmd_halfgrid(args) -> int:
    g = _graph(args)
    source = None
    if args.family:
        try:
            data = json.loads(Path(args.family).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read family file: {exc}") from exc
        source = RayFamily.from_json(g, data.get("family", data))
    cert = pipeline_halfgrid(
        g, args.mode, args.rows, args.cols, K=args.K, source=source, automorphisms=args.auto,
        spare=args.spare, cap=args.cap, seed=args.seed,
    )
    if args.out:
        cert.write(args.out)
    else:
        sys.stdout.write(cert.dumps())
    _note(cert.summary)
    return 0


def _cmd_check(args) -> int:
    t0 = time.perf_counter()
    verdict = check_certificate(args.path)
    print(f"{verdict.line()} ({time.perf_counter() - t0:.1f}s)")
    return verdict.exit_code


def _cmd_demo(args) -> int:
    rep = run_demo(args.id, K=args.K, n=args.n, radius=args.radius)
    for line in rep.lines():
        print(line)
    if args.out:
        Path(args.out).write_text(dumps(envelope("demo", rep.to_json())))
    return 0 if rep.passed else 2


COMMANDS = {
    "generate": _cmd_generate,
    "rays": _cmd_rays,
    "family": _cmd_family,
    "halfgrid": _cmd_halfgrid,
    "check": _cmd_check,
    "demo": _cmd_demo,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except CoarseGridError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
