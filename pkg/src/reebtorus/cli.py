"""Command line front end.

``reebtorus [analyze] (--mesh PATH | --builtin ID --n INT) [--report PATH] [--dot PATH]``
runs the full pipeline.  Exit codes: 0 Splits, 2 inconclusive hypothesis,
3 not applicable, 4 invalid input or I/O failure.

Other subcommands: ``export`` writes a sampled builtin as mesh JSON,
``lemma-check`` runs the exhaustive sink check on small trees and
``random-check`` runs the orientation checks on seeded random tree fields.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .surface import MeshError, SamplerError, load_mesh, random_tree_field, sample_torus, save_mesh
from .verdict import INCONCLUSIVE, SPLITS, Verdict, analyze, invalid_input

log = logging.getLogger("reebtorus")

EXIT_SPLITS = 0
EXIT_INCONCLUSIVE = 2
EXIT_NOT_APPLICABLE = 3
EXIT_INVALID = 4

SUBCOMMANDS = ("analyze", "export", "lemma-check", "random-check")


def exit_code(verdict: Verdict) -> int:
    if verdict.conclusion == SPLITS:
        return EXIT_SPLITS
    if verdict.conclusion == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    if verdict.is_invalid_input:
        return EXIT_INVALID
    return EXIT_NOT_APPLICABLE


def _nonneg_float(text: str) -> float:
    x = float(text)
    if not x >= 0:
        raise argparse.ArgumentTypeError("must be a nonnegative number")
    return x


def _add_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--mesh", type=Path, help="mesh JSON with 'triangles' and 'values'")
    src.add_argument("--builtin", metavar="ID", help="sinsin, sinsin_scaled[a,b,c,d], height or twosaddle")
    p.add_argument("--n", type=int, help="grid resolution for --builtin (even, at least 8)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reebtorus", description=__doc__.splitlines()[0])
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command")

    a = sub.add_parser("analyze", help="run the pipeline and report the verdict")
    _add_source(a)
    a.add_argument("--report", type=Path, help="write the verdict JSON here (default: stdout)")
    a.add_argument("--dot", type=Path, help="write the (oriented) Reeb graph as DOT")
    a.add_argument("--level-tol", type=_nonneg_float, default=0.0, help="snap critical levels closer than this")
    a.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)

    e = sub.add_parser("export", help="write a builtin field as mesh JSON")
    e.add_argument("--builtin", metavar="ID")
    e.add_argument("--random-tree", action="store_true", help="export a seeded random tree field instead")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--out", type=Path, required=True)

    lc = sub.add_parser("lemma-check", help="exhaustive sink check on labeled trees")
    lc.add_argument("--max-n", type=int, default=7)

    rc = sub.add_parser("random-check", help="orientation checks on random tree fields")
    rc.add_argument("--seed", type=int, default=0)
    rc.add_argument("--count", type=int, default=10)
    rc.add_argument("--n", type=int, default=16)
    return parser


def _load(args) -> "tuple[Optional[object], Optional[str]]":
    try:
        if args.mesh is not None:
            if args.n is not None:
                raise SamplerError("--n only applies to --builtin")
            return load_mesh(args.mesh), None
        if args.n is None:
            raise SamplerError("--builtin needs --n")
        return sample_torus(args.builtin, args.n), None
    except OSError as exc:
        return None, f"cannot read {exc.filename}: {exc.strerror}"
    except (MeshError, SamplerError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def cmd_analyze(args) -> int:
    mesh, error = _load(args)
    if mesh is None:
        print(f"reebtorus: {error}", file=sys.stderr)
        verdict = Verdict(None, None, False, False, None, 0, False, invalid_input(error))
    else:
        log.info("mesh: %d vertices, %d triangles", mesh.vertex_count, mesh.triangle_count)
        verdict = analyze(mesh, args.level_tol)
        if verdict.graph is not None:
            log.info("Reeb graph: %d vertices, %d edges", verdict.graph.vertex_count, verdict.graph.edge_count)
    log.info("conclusion: %s", verdict.conclusion)
    try:
        if args.report is not None:
            _write(args.report, verdict.to_json())
        else:
            sys.stdout.write(verdict.to_json())
        dot = verdict.dot()
        if args.dot is not None and dot is not None:
            _write(args.dot, dot)
    except OSError as exc:
        print(f"reebtorus: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    return exit_code(verdict)


def cmd_export(args) -> int:
    try:
        if args.random_tree:
            mesh = random_tree_field(args.n, args.seed)
        elif args.builtin:
            mesh = sample_torus(args.builtin, args.n)
        else:
            raise SamplerError("need --builtin or --random-tree")
        save_mesh(mesh, args.out)
    except (SamplerError, MeshError) as exc:
        print(f"reebtorus: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"reebtorus: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    return 0


def cmd_lemma_check(args) -> int:
    from .treelib import MAX_ENUMERATION_N, exhaustive_check

    if not 1 <= args.max_n <= MAX_ENUMERATION_N:
        print(f"reebtorus: --max-n must be in 1..{MAX_ENUMERATION_N}", file=sys.stderr)
        return EXIT_INVALID
    ok = True
    for n in range(1, args.max_n + 1):
        r = exhaustive_check(n)
        print(
            f"n={n} trees={r.trees} oriented={r.oriented} outdeg<=1={r.outdeg1} "
            f"min_sinks={r.min_sinks} sink_counts_outdeg<=1={list(r.outdeg1_sink_counts)} "
            f"{'ok' if r.ok else 'FAIL'}"
        )
        ok &= r.ok
    return 0 if ok else 1


def cmd_random_check(args) -> int:
    from .orient import OrientError, check_sink_complement, find_sink, orient_tree
    from .reeb import build_reeb, is_tree

    seed, done, failures = args.seed, 0, 0
    while done < args.count:
        try:
            mesh = random_tree_field(args.n, seed)
        except SamplerError as exc:
            print(f"reebtorus: {exc}", file=sys.stderr)
            return EXIT_INVALID
        graph = build_reeb(mesh)
        seed += 1
        if not is_tree(graph):
            continue
        done += 1
        try:
            tree = orient_tree(mesh, graph)
            sink = find_sink(tree)
            pieces_ok = [check_sink_complement(mesh, graph, v) for v in range(graph.vertex_count)]
            good = pieces_ok == [v == sink for v in range(graph.vertex_count)]
        except OrientError as exc:
            good, sink = False, None
            log.info("seed %d: %s", seed - 1, exc)
        failures += not good
        print(json.dumps({"seed": seed - 1, "vertices": graph.vertex_count, "sink": sink, "ok": good}))
    return 0 if failures == 0 else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    # "analyze" is the default subcommand
    first = next((a for a in argv if a not in ("-v", "--verbose")), None)
    if first is not None and first not in SUBCOMMANDS and first not in ("-h", "--help"):
        argv.insert(0, "analyze")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else 0
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_INVALID
    handler = {
        "analyze": cmd_analyze,
        "export": cmd_export,
        "lemma-check": cmd_lemma_check,
        "random-check": cmd_random_check,
    }[args.command]
    return handler(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
