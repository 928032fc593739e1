"""Command-line pipeline: traces in, decompositions, sagas, and DSL out.

Stages pass artifacts as files so runs are scriptable and reproducible:

    mono2ddd decompose --accesses a.json --weights 1,0,0,0 -n 2 -o dec.json
    mono2ddd sagas --accesses a.json --decomposition dec.json -o sagas.json
    mono2ddd to-cml --accesses a.json --decomposition dec.json -o out.cml

Exit codes: 0 success, 1 bad input or bad usage, 2 internal error. Outputs
are byte-reproducible; `--stamp` opts in to a generation timestamp.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone

from . import cml as cml_mod
from . import diagrams
from .decompose import (
    SimilarityWeights,
    decompose,
    decomposition_to_json,
    parse_decomposition,
)
from .dddmap import NAMING_HEURISTICS, build_ddd_model
from .errors import ContractError, Mono2DddError
from .ingest import parse_model
from .measures import measure, rank_decompositions, report_tsv, search_candidates
from .saga import (
    ORCHESTRATOR_POLICIES,
    parse_sagas,
    refactor_model,
    sagas_to_json,
    stats_tsv,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ContractError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(path: str | None, text: str, stamp_prefix: str | None = None) -> None:
    if stamp_prefix is not None:
        text = stamp_prefix + text
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ContractError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _stamp(args, comment: str) -> str | None:
    if not getattr(args, "stamp", False):
        return None
    now = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return comment.format(now) + "\n"


def _parse_weights(raw: str) -> SimilarityWeights:
    parts = raw.split(",")
    if len(parts) != 4:
        raise ContractError(
            f"--weights needs four comma-separated numbers (access,write,read,sequence), got {raw!r}"
        )
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ContractError(f"--weights has a non-numeric part: {raw!r}") from exc
    return SimilarityWeights(*values)


def _parse_n_list(raw: str) -> list[int]:
    try:
        values = [int(p) for p in raw.split(",") if p.strip() != ""]
    except ValueError as exc:
        raise ContractError(f"--n must be comma-separated integers, got {raw!r}") from exc
    if not values:
        raise ContractError("--n lists no cluster counts")
    return values


def _load_model(args):
    accesses = _read(args.accesses)
    structure = _read(args.structure) if args.structure else None
    return parse_model(accesses, structure)


def _load_sagas(args, model, decomposition):
    if getattr(args, "sagas", None):
        return parse_sagas(_read(args.sagas))
    policy = getattr(args, "orchestrator", "first")
    return [saga for saga, _ in refactor_model(model, decomposition, policy)]


def _cmd_decompose(args) -> int:
    model = _load_model(args)
    result = decompose(model, _parse_weights(args.weights), args.n)
    _write(args.output, decomposition_to_json(result))
    return 0


def _cmd_search(args) -> int:
    model = _load_model(args)
    measured = search_candidates(model, args.step, _parse_n_list(args.n))
    if args.candidates:
        lines = ["weights\tn\tcohesion\tcoupling\tcomplexity"]
        for d, report in measured:
            weights = ",".join(f"{w:g}" for w in d.weights.as_tuple())
            lines.append(
                f"{weights}\t{d.n}\t{report.cohesion:.6f}"
                f"\t{report.coupling:.6f}\t{report.complexity:.6f}"
            )
        _write(args.candidates, "\n".join(lines) + "\n")
    best = rank_decompositions(measured, args.top)
    _write(args.output, decomposition_to_json(best))
    return 0


def _cmd_assess(args) -> int:
    model = _load_model(args)
    decomposition = parse_decomposition(_read(args.decomposition))
    report = measure(model, decomposition)
    _write(args.output, report_tsv(report), _stamp(args, "# generated {}"))
    return 0


def _cmd_sagas(args) -> int:
    model = _load_model(args)
    decomposition = parse_decomposition(_read(args.decomposition))
    pairs = refactor_model(model, decomposition, args.orchestrator)
    tsv = stats_tsv([stats for _, stats in pairs])
    if args.output:
        _write(args.output, sagas_to_json([saga for saga, _ in pairs]))
    if args.output != "-":
        _write("-", tsv, _stamp(args, "# generated {}"))
    return 0


def _cmd_to_cml(args) -> int:
    model = _load_model(args)
    decomposition = parse_decomposition(_read(args.decomposition))
    sagas = _load_sagas(args, model, decomposition)
    ddd = build_ddd_model(model, decomposition, sagas, args.naming, args.map_name)
    doc = cml_mod.document_from_ddd(ddd)
    _write(args.output, cml_mod.emit_document(doc), _stamp(args, "// generated {}"))
    return 0


def _cmd_diagram(args) -> int:
    if args.format == "bpmn":
        if not args.cml or not args.coordination:
            raise ContractError("--format bpmn needs --cml and --coordination")
        doc = cml_mod.parse_document(_read(args.cml))
        text = diagrams.coordination_bpmn(doc, args.coordination)
        _write(args.output, text, _stamp(args, "# generated {}"))
        return 0
    if args.cml:
        doc = cml_mod.parse_document(_read(args.cml))
        text = diagrams.document_dot(doc)
    else:
        if not args.accesses or not args.decomposition:
            raise ContractError(
                "--format dot needs either --cml or --accesses with --decomposition"
            )
        model = _load_model(args)
        decomposition = parse_decomposition(_read(args.decomposition))
        text = diagrams.decomposition_dot(model, decomposition)
    _write(args.output, text, _stamp(args, "// generated {}"))
    return 0


def _cmd_cml_merge(args) -> int:
    doc = cml_mod.parse_document(_read(args.input))
    merged = cml_mod.merge_bounded_contexts(doc, args.a, args.b)
    _write(args.output, cml_mod.emit_document(merged), _stamp(args, "// generated {}"))
    return 0


def _parse_partition(raw: str) -> list[list[str]]:
    parts = []
    for chunk in raw.split("/"):
        members = [m.strip() for m in chunk.split(",") if m.strip()]
        parts.append(members)
    return parts


def _cmd_cml_split(args) -> int:
    doc = cml_mod.parse_document(_read(args.input))
    split = cml_mod.split_aggregate(doc, args.context, _parse_partition(args.parts))
    _write(args.output, cml_mod.emit_document(split), _stamp(args, "// generated {}"))
    return 0


def _add_model_arguments(parser, structure_required=False):
    parser.add_argument("--accesses", required=True, help="accesses JSON file")
    parser.add_argument(
        "--structure",
        required=structure_required,
        help="entity structure file (JSON or the mini DSL)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mono2ddd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="cluster entities into one decomposition")
    _add_model_arguments(p)
    p.add_argument("--weights", default="1,0,0,0", help="access,write,read,sequence")
    p.add_argument("-n", type=int, required=True, help="number of clusters")
    p.add_argument("-o", "--output", default="-", help="decomposition JSON ('-' = stdout)")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("search", help="grid-search weights and pick the best candidate")
    _add_model_arguments(p)
    p.add_argument("--step", type=float, default=0.5, help="weight grid step")
    p.add_argument("--n", default="2,3", help="comma-separated cluster counts")
    p.add_argument("--top", type=int, default=100, help="short-list size for the pick")
    p.add_argument("--candidates", help="optional TSV dump of every scored candidate")
    p.add_argument("-o", "--output", default="-", help="winning decomposition JSON")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("assess", help="measure a decomposition (TSV)")
    _add_model_arguments(p)
    p.add_argument("--decomposition", required=True, help="decomposition JSON file")
    p.add_argument("-o", "--output", default="-", help="TSV output")
    p.add_argument("--stamp", action="store_true", help="prepend a timestamp line")
    p.set_defaults(func=_cmd_assess)

    p = sub.add_parser("sagas", help="refactor functionalities into sagas")
    _add_model_arguments(p)
    p.add_argument("--decomposition", required=True)
    p.add_argument(
        "--orchestrator",
        choices=ORCHESTRATOR_POLICIES,
        default="first",
        help="orchestrator pick: first step's cluster, or the most-accessed one",
    )
    p.add_argument(
        "-o",
        "--output",
        help="sagas JSON file; the reduction TSV prints to stdout ('-' = JSON to stdout)",
    )
    p.add_argument("--stamp", action="store_true", help="prepend a timestamp line")
    p.set_defaults(func=_cmd_sagas)

    p = sub.add_parser("to-cml", help="generate the DSL document")
    _add_model_arguments(p)
    p.add_argument("--decomposition", required=True)
    p.add_argument("--sagas", help="sagas JSON (computed on the fly when omitted)")
    p.add_argument("--naming", choices=NAMING_HEURISTICS, default="full-trace")
    p.add_argument("--orchestrator", choices=ORCHESTRATOR_POLICIES, default="first")
    p.add_argument("--map-name", default="Decomposition", help="ContextMap identifier")
    p.add_argument("-o", "--output", default="-", help=".cml output")
    p.add_argument("--stamp", action="store_true", help="prepend a timestamp comment")
    p.set_defaults(func=_cmd_to_cml)

    p = sub.add_parser("diagram", help="render a context map (dot) or saga lanes (bpmn)")
    p.add_argument("--format", choices=("dot", "bpmn"), required=True)
    p.add_argument("--accesses", help="accesses JSON (dot from a decomposition)")
    p.add_argument("--structure", help="entity structure file")
    p.add_argument("--decomposition", help="decomposition JSON (dot view)")
    p.add_argument("--cml", help=".cml document (dot from relationships, bpmn)")
    p.add_argument("--coordination", help="coordination name (bpmn)")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--stamp", action="store_true", help="prepend a timestamp comment")
    p.set_defaults(func=_cmd_diagram)

    p = sub.add_parser("cml", help="refactor an existing .cml document")
    cml_sub = p.add_subparsers(dest="cml_command", required=True)

    m = cml_sub.add_parser("merge", help="merge two bounded contexts")
    m.add_argument("--in", dest="input", required=True, help=".cml input")
    m.add_argument("-a", required=True, help="first context (kept position)")
    m.add_argument("-b", required=True, help="second context")
    m.add_argument("-o", "--output", default="-")
    m.add_argument("--stamp", action="store_true")
    m.set_defaults(func=_cmd_cml_merge)

    s = cml_sub.add_parser("split", help="split a context's aggregate")
    s.add_argument("--in", dest="input", required=True, help=".cml input")
    s.add_argument("--context", required=True)
    s.add_argument(
        "--parts",
        required=True,
        help="partition: entity names comma-separated, parts '/'-separated (A,B/C)",
    )
    s.add_argument("-o", "--output", default="-")
    s.add_argument("--stamp", action="store_true")
    s.set_defaults(func=_cmd_cml_split)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr, end="")
        return 1
    except Mono2DddError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except Exception as exc:  # noqa: BLE001 - contract: internal faults exit 2
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
