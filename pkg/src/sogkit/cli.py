"""Command line front end: ``sogkit <command> ...``.

Every command is a thin adapter over a library call.  Results are printed
as JSON (or DOT with ``--format dot``) to stdout, or written atomically to
``--out``.  Exit status is 0 for ok, 1 for a failed check or bad input,
2 for usage errors and 3 for a search that ran out of time.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .canonical import (
    ConstructionError,
    NoNiceCopy,
    decode_coloring,
    find_illegal_pairs,
    represent_blocked_on_star,
    represent_blocked_on_subdivision,
    represent_empty_blocked_subpaths,
)
from .gadget import (
    BlockedLabels,
    GadgetParams,
    build_blocked_graph,
    build_empty_blocked,
    params_for_leafage,
    reduction_params_for_tree,
)
from .graph import Coloring, Graph, find_k_coloring
from .search import (
    HostConstraint,
    SearchConfig,
    SearchStatus,
    audit_gadget_lemmas,
    audit_spanbranch,
    find_representation,
)
from .tree import HostTree, Representation, analyze_tree, verify_representation

log = logging.getLogger("sogkit")

EXIT = {"ok": 0, "fail": 1, "timeout": 3}


@dataclass
class CommandOutcome:
    status: str = "ok"
    artifacts: list[str] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    result: object = None

    def __post_init__(self):
        if self.status not in EXIT:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def exit_code(self) -> int:
        return EXIT[self.status]


class InputError(Exception):
    """Bad input file: unreadable, malformed JSON or wrong shape."""


def fail(*messages: str, result=None) -> CommandOutcome:
    return CommandOutcome("fail", diagnostics=list(messages) or ["failed"], result=result)


# -- io -------------------------------------------------------------------


def load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc


def _unwrap(data, key: str):
    if isinstance(data, dict) and key in data and isinstance(data[key], dict):
        return data[key]
    return data


def load_graph(path: str) -> Graph:
    try:
        return Graph.from_dict(_unwrap(load_json(path), "graph"))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_tree(path: str) -> HostTree:
    data = _unwrap(load_json(path), "tree")
    try:
        return HostTree.from_dict(_unwrap(data, "host") if "nodes" not in data else data)
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_rep(path: str) -> Representation:
    try:
        return Representation.from_dict(_unwrap(load_json(path), "representation"))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_labels(path: str) -> BlockedLabels:
    try:
        return BlockedLabels.from_dict(_unwrap(load_json(path), "labels"))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_coloring(path: str, k: int) -> Coloring:
    data = _unwrap(load_json(path), "coloring")
    try:
        return Coloring({str(v): int(c) for v, c in data.items()}, k)
    except (AttributeError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file next to ``path`` and rename it into place."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, outcome: CommandOutcome, payload, dot: str | None = None) -> CommandOutcome:
    if args.format == "dot" and dot is not None:
        text = dot
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        write_atomic(args.out, text)
        outcome.artifacts.append(args.out)
    else:
        sys.stdout.write(text)
    outcome.result = payload
    return outcome


# -- commands ---------------------------------------------------------------


def cmd_reduce(args) -> CommandOutcome:
    g = load_graph(args.input)
    if args.empty:
        blocked, labels = build_empty_blocked(g)
    elif args.tree:
        p, _ = reduction_params_for_tree(load_tree(args.tree))
        blocked, labels = build_blocked_graph(g, p)
    elif args.d is not None:
        blocked, labels = build_blocked_graph(g, GadgetParams(args.d, args.u))
    else:
        if args.k is None:
            return fail("reduce needs one of --k, --tree, --d or --empty")
        blocked, labels = build_blocked_graph(g, params_for_leafage(args.k))
    payload = {
        "graph": blocked.to_dict(),
        "labels": labels.to_dict(),
        "counts": {"vertices": len(blocked), "edges": len(blocked.edges)},
    }
    return _emit(args, CommandOutcome(), payload, blocked.to_dot("blocked"))


def _coloring_for(args, g: Graph, k: int) -> Coloring | None:
    if args.coloring:
        return load_coloring(args.coloring, k)
    return find_k_coloring(g, k)


def cmd_represent(args) -> CommandOutcome:
    g = load_graph(args.graph)
    if args.mode == "subdivision":
        if not args.tree:
            return fail("--mode subdivision needs --tree")
        t = load_tree(args.tree)
        p, k = reduction_params_for_tree(t)
        if args.k is not None and args.k != k:
            return fail(f"--k {args.k} does not match the tree's leafage {k}")
    else:
        if args.k is None:
            return fail(f"--mode {args.mode} needs --k")
        k = args.k
    c = _coloring_for(args, g, k)
    if c is None:
        return fail(f"graph has no proper {k}-colouring")
    if args.mode == "star":
        p = GadgetParams(k, 0)
        rep = represent_blocked_on_star(g, c, p)
        blocked, labels = build_blocked_graph(g, p)
    elif args.mode == "subdivision":
        rep = represent_blocked_on_subdivision(t, g, c)
        blocked, labels = build_blocked_graph(g, p)
    else:
        rep = represent_empty_blocked_subpaths(g, c, k)
        blocked, labels = build_empty_blocked(g)
    outcome = CommandOutcome()
    if args.blocked_out:
        bundle = {"graph": blocked.to_dict(), "labels": labels.to_dict()}
        write_atomic(args.blocked_out, json.dumps(bundle, indent=2) + "\n")
        outcome.artifacts.append(args.blocked_out)
    return _emit(args, outcome, rep.to_dict(), rep.to_dot())


def cmd_verify(args) -> CommandOutcome:
    rep = load_rep(args.rep)
    g = load_graph(args.graph)
    try:
        verdict = verify_representation(rep, g, args.relation)
    except ValueError as exc:
        return fail(str(exc))
    payload = {
        "ok": verdict.ok,
        "missing": [list(e) for e in verdict.missing],
        "extra": [list(e) for e in verdict.extra],
    }
    if verdict.ok:
        return _emit(args, CommandOutcome(), payload)
    outcome = fail(f"{len(verdict.missing)} missing and {len(verdict.extra)} extra edges")
    return _emit(args, outcome, payload)


def cmd_decode(args) -> CommandOutcome:
    rep = load_rep(args.rep)
    labels = load_labels(args.labels)
    g = load_graph(args.graph)
    try:
        decoded = decode_coloring(rep, labels, g, args.k)
    except NoNiceCopy as exc:
        return _emit(args, fail(str(exc)), {"ok": False, "diagnostics": exc.diagnostics})
    payload = {
        "ok": True,
        "copy": decoded.copy,
        "coloring": dict(decoded.coloring.assignment),
        "witnesses": {str(c): w for c, w in decoded.witnesses.items()},
        "illegal_pairs": [list(p) for p in find_illegal_pairs(rep, labels, g)]
        if labels.params is not None else [],
    }
    return _emit(args, CommandOutcome(), payload)


def _constraint(args) -> HostConstraint:
    if args.tree:
        kind = "sub" if args.subdivisions else "fixed"
        return HostConstraint(kind, base=load_tree(args.tree))
    if args.leafage is not None:
        return HostConstraint("leafage", args.leafage)
    if args.max_degree is not None:
        return HostConstraint("max_degree", args.max_degree)
    return HostConstraint()


def cmd_recognize(args) -> CommandOutcome:
    g = load_graph(args.graph)
    cfg = SearchConfig(
        max_host_nodes=args.max_host,
        host_constraint=_constraint(args),
        relation=args.relation,
        paths_only=args.paths_only,
        time_budget=args.budget,
        jobs=args.jobs,
    )
    result = find_representation(g, cfg)
    if result.status is SearchStatus.FOUND:
        outcome = CommandOutcome()
    elif result.status is SearchStatus.TIMEOUT:
        outcome = CommandOutcome("timeout", diagnostics=["time budget exhausted"])
    else:
        outcome = fail(f"no representation on admissible hosts with at most {args.max_host} nodes")
    dot = result.representation.to_dot() if result.representation else None
    return _emit(args, outcome, result.to_dict(), dot)


def cmd_audit(args) -> CommandOutcome:
    cfg = SearchConfig(max_host_nodes=args.max_host, time_budget=args.budget, jobs=args.jobs)
    if args.lemma == "spanbranch":
        report = audit_spanbranch(cfg, offset=1 if args.negative_control else 2)
    else:
        report = audit_gadget_lemmas(args.d, cfg)
    payload = report.to_dict()
    if report.timed_out:
        outcome = CommandOutcome("timeout", diagnostics=["time budget exhausted"])
    elif args.negative_control:
        # the control is expected to produce counterexamples
        outcome = CommandOutcome() if report.counterexamples else fail("negative control found nothing")
    elif report.counterexamples:
        outcome = fail(f"{len(report.counterexamples)} counterexamples")
    else:
        outcome = CommandOutcome()
    return _emit(args, outcome, payload)


def cmd_analyze(args) -> CommandOutcome:
    t = load_tree(args.tree)
    return _emit(args, CommandOutcome(), analyze_tree(t).to_dict(), t.to_dot())


def cmd_export(args) -> CommandOutcome:
    data = load_json(args.input)
    try:
        if isinstance(data, dict) and "subtrees" in data:
            obj = Representation.from_dict(data)
        elif isinstance(data, dict) and "nodes" in data:
            obj = HostTree.from_dict(data)
        else:
            obj = Graph.from_dict(_unwrap(data, "graph"))
    except (ValueError, TypeError) as exc:
        return fail(f"{args.input}: {exc}")
    return _emit(args, CommandOutcome(), obj.to_dict(), obj.to_dot())


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "dot"), default="json")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for searches")
    common.add_argument("--budget", type=float, default=None, help="time budget in seconds")

    parser = argparse.ArgumentParser(prog="sogkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="build a blocked graph")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--tree", help="take gadget parameters from this host tree")
    p.add_argument("--d", type=int)
    p.add_argument("--u", type=int, default=0)
    p.add_argument("--empty", action="store_true", help="no gadget (subpath variant)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("represent", parents=[common], help="build a representation from a colouring")
    p.add_argument("--mode", choices=("star", "subdivision", "subpaths"), required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--tree")
    p.add_argument("--k", type=int)
    p.add_argument("--coloring", help="JSON object vertex -> colour; searched for if omitted")
    p.add_argument("--blocked-out", help="also write the target blocked graph and labels")
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("verify", parents=[common], help="check a representation against a graph")
    p.add_argument("--rep", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--relation", choices=("overlap", "intersection"), default="overlap")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decode", parents=[common], help="read a colouring off a representation")
    p.add_argument("--rep", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("recognize", parents=[common], help="search for a representation")
    p.add_argument("--graph", required=True)
    p.add_argument("--relation", choices=("overlap", "intersection"), default="overlap")
    p.add_argument("--leafage", type=int)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--tree", help="fixed host, or base tree with --subdivisions")
    p.add_argument("--subdivisions", action="store_true")
    p.add_argument("--max-host", type=int, default=8)
    p.add_argument("--paths-only", action="store_true")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("audit", parents=[common], help="exhaustive lemma audits")
    p.add_argument("--lemma", choices=("containment", "leaves", "spanbranch"), required=True)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--max-host", type=int, default=8)
    p.add_argument("--negative-control", action="store_true")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("analyze", parents=[common], help="leaves, twigs and lastbranches of a tree")
    p.add_argument("--tree", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", parents=[common], help="convert a graph, tree or representation")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("SOGKIT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def run(argv: Sequence[str] | None = None) -> CommandOutcome:
    """Parse ``argv`` and run the command.  Usage errors raise ``SystemExit(2)``."""
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        build_parser().error("--jobs must be positive")
    try:
        return args.func(args)
    except InputError as exc:
        return fail(str(exc))
    except ConstructionError as exc:
        return fail(f"internal construction error: {exc}")
    except ValueError as exc:
        return fail(str(exc))


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    outcome = run(argv)
    for msg in outcome.diagnostics:
        print(f"sogkit: {msg}", file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
