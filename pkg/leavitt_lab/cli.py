from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from pydantic import BaseModel, ValidationError

from .algebra import Element, LeavittAlgebra
from .checkers import (
    Found,
    block_units_certificate,
    bounded_regularity_search,
    classify,
    corner,
    extend_principal_homomorphism,
    is_left_p_injective_at,
    is_p_injective_at,
    recheck_certificate,
    regularity_witness,
    search_certificate,
    verify_xrava_identity,
)
from .config import Settings, get_settings
from .errors import InputFileError, LeavittError, PreconditionViolation
from .findim import finite_view
from .graph import Graph, find_cycle, parse_graph
from .logging import configure_logging, run_context
from .metrics import write_metrics
from .report import Certificate, OperationReport, load_report, render_json, verdict_report
from .scalar import Field
from .structure import decompose, laurent_of_loop, loop_counterexample_certificate, to_matrices

log = logging.getLogger(__name__)

CHECK = "✓"
CROSS = "✗"
DOT = "·"
EVAL_OPS = ("normalize", "add", "sub", "mul", "star", "unit")


@dataclass
class Outcome:
    lines: list[str]
    report: BaseModel
    exit_code: int = 0


@dataclass
class Context:
    settings: Settings
    graph: Graph
    graph_text: str
    algebra: LeavittAlgebra

    def parse(self, text: str) -> Element:
        return self.algebra.parse(text)

    def report(self, command: str, result: dict, evidence: Iterable[Certificate] = ()) -> OperationReport:
        return OperationReport(
            command=command,
            graph=self.graph_text,
            field=self.algebra.field.spec,
            seed=self.settings.seed,
            result=result,
            evidence=list(evidence),
        )


def _span(elements: Sequence[object]) -> str:
    return "span{" + ", ".join(str(x) for x in elements) + "}" if elements else "{0}"


def _mark(ok: bool) -> str:
    return CHECK if ok else CROSS


def load_context(path: str, settings: Settings) -> Context:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFileError(f"cannot read graph file '{path}': {exc.strerror or exc}") from exc
    graph = parse_graph(text)
    return Context(settings, graph, text, LeavittAlgebra(graph, Field.from_spec(settings.field)))


# -- subcommands --------------------------------------------------------------------


def cmd_classify(args: argparse.Namespace, ctx: Context) -> Outcome:
    s = ctx.settings
    verdict = classify(
        ctx.graph,
        ctx.algebra.field,
        seed=s.seed,
        samples=s.samples,
        dim_cap=s.dim_cap,
        search_max_len=s.search_max_len,
    )
    report = verdict_report(verdict, graph_text=ctx.graph_text, seed=s.seed)
    if verdict.cycle is None:
        head = f"Acyclic; regular; P-injective; locally matricial; dim {verdict.dimension}"
    else:
        tail = "exact certificate attached" if verdict.exact else "bounded-search evidence attached"
        head = (
            f"Cyclic({'.'.join(verdict.cycle)}); not regular; not P-injective; "
            f"not locally matricial; {tail}"
        )
    held = sum(1 for c in verdict.evidence if c.holds)
    lines = [head, f"evidence: {len(verdict.evidence)} certificates, {held} hold"]
    return Outcome(lines, report)


def cmd_eval(args: argparse.Namespace, ctx: Context) -> Outcome:
    algebra = ctx.algebra
    operands = [ctx.parse(text) for text in args.expressions]
    op = args.op
    if op in ("normalize", "star") and len(operands) != 1:
        raise PreconditionViolation(f"'{op}' takes exactly one expression")
    if op in ("add", "sub", "mul") and len(operands) < 2:
        raise PreconditionViolation(f"'{op}' needs at least two expressions")
    if op == "normalize":
        value = operands[0]
    elif op == "star":
        value = algebra.star(operands[0])
    elif op == "add":
        value = algebra.sum(operands)
    elif op == "sub":
        value = operands[0]
        for other in operands[1:]:
            value = value - other
    elif op == "mul":
        value = algebra.product(*operands)
    else:
        value = algebra.local_unit(operands)
    result = {"op": op, "inputs": [str(a) for a in operands], "value": str(value)}
    return Outcome([str(value)], ctx.report("eval", result))


def cmd_witness(args: argparse.Namespace, ctx: Context) -> Outcome:
    s = ctx.settings
    a = ctx.parse(args.expression)
    if find_cycle(ctx.graph) is not None:
        max_len = args.max_len if args.max_len is not None else s.search_max_len
        outcome = bounded_regularity_search(a, max_len, dim_cap=s.dim_cap)
        certificate = search_certificate(a, outcome)
        if isinstance(outcome, Found):
            lines = [f"r = {outcome.witness.r}", f"a{DOT}r{DOT}a = a {CHECK}"]
        else:
            lines = [
                f"no witness in the span of {outcome.span_size} monomials of length <= {max_len}",
                "(evidence only: the search is truncated)",
            ]
        return Outcome(lines, ctx.report("witness", {"a": str(a), **certificate.payload}, [certificate]))
    witness = regularity_witness(a, dim_cap=s.dim_cap)
    evidence = [witness.certificate()]
    lines = [f"r = {witness.r}", f"a{DOT}r{DOT}a = a {CHECK}"]
    if args.xrava:
        view = finite_view(ctx.algebra, s.dim_cap)
        for x in view.elements_of(view.left_annihilator(view.right_annihilator(a))):
            check = verify_xrava_identity(a, witness.r, x, dim_cap=s.dim_cap)
            evidence.append(check.certificate())
            lines.append(f"x = {x}: x{DOT}r{DOT}a{DOT}v = x {_mark(check.holds)}")
    failed = any(not c.holds for c in evidence)
    result = {"a": str(a), "r": str(witness.r)}
    return Outcome(lines, ctx.report("witness", result, evidence), 3 if failed else 0)


def cmd_pinj(args: argparse.Namespace, ctx: Context) -> Outcome:
    s = ctx.settings
    a = ctx.parse(args.expression)
    if args.left:
        check = is_left_p_injective_at(a, dim_cap=s.dim_cap)
        names = ("r_R l_R(a)", "aR")
    else:
        check = is_p_injective_at(a, dim_cap=s.dim_cap)
        names = ("l_R r_R(a)", "Ra")
    view = check.view
    lines = [
        f"{names[0]} = {_span(view.elements_of(check.double_annihilator))}",
        f"{names[1]} = {_span(view.elements_of(check.principal_ideal))}",
        f"{names[0]} = {names[1]}: {'true' if check.holds else 'false'}",
    ]
    evidence = [check.certificate()]
    result: dict[str, object] = {"a": str(a), "holds": check.holds}
    if args.extend is not None:
        d = ctx.parse(args.extend)
        extension = extend_principal_homomorphism(a, d, dim_cap=s.dim_cap)
        evidence.append(extension.certificate())
        if extension.status == "extended":
            lines.append(f"f(a{DOT}t) = d{DOT}t extends to R as x -> ({extension.c}){DOT}x")
        elif extension.status == "not_well_defined":
            lines.append(f"f is not well defined: a{DOT}t = 0 but d{DOT}t != 0 for t = {extension.obstruction}")
        else:
            lines.append("f is well defined but does not extend to R")
        result["extension"] = extension.status
    return Outcome(lines, ctx.report("pinj", result, evidence))


def cmd_annihilate(args: argparse.Namespace, ctx: Context) -> Outcome:
    view = finite_view(ctx.algebra, ctx.settings.dim_cap)
    a = ctx.parse(args.expression)
    spaces = {
        "r_R(a)": view.right_annihilator(a),
        "l_R(a)": view.left_annihilator_of_element(a),
        "Ra": view.principal_left_ideal(a),
        "aR": view.principal_right_ideal(a),
    }
    lines = [f"{name} = {_span(view.elements_of(space))}" for name, space in spaces.items()]
    result = {"a": str(a), **{name: view.describe(space) for name, space in spaces.items()}}
    return Outcome(lines, ctx.report("annihilate", result))


def cmd_decompose(args: argparse.Namespace, ctx: Context) -> Outcome:
    decomposition = decompose(ctx.algebra, dim_cap=ctx.settings.dim_cap)
    lines = [
        f"block {block.vertex}: M_{block.size}(K) over paths [{', '.join(str(p) for p in block.paths)}]"
        for block in decomposition.blocks
    ]
    lines.append(f"dim {decomposition.dimension}")
    units = block_units_certificate(decomposition)
    result: dict[str, object] = {
        "blocks": {block.vertex: [str(p) for p in block.paths] for block in decomposition.blocks},
        "dimension": decomposition.dimension,
    }
    if args.expression is not None:
        a = ctx.parse(args.expression)
        matrices = to_matrices(a, decomposition)
        result["element"] = str(a)
        result["matrices"] = matrices.payload()
        for vertex, rows in matrices.payload().items():
            lines.append(f"{vertex}:")
            lines.extend("  [" + " ".join(row) + "]" for row in rows)
    return Outcome(lines, ctx.report("decompose", result, [units]), 0 if units.holds else 3)


def cmd_counterexample(args: argparse.Namespace, ctx: Context) -> Outcome:
    facts = loop_counterexample_certificate(ctx.algebra)
    field_ = ctx.algebra.field
    loop = ctx.graph.edges[0].id
    lines = [
        f"a = {facts.element} -> {facts.image}",
        f"(i) lowest term of {facts.image} has coefficient {field_.format(facts.lowest[1])} != 0, "
        f"so r_R(a) = 0 and {loop}^* is in l_R r_R(a) {_mark(facts.annihilator_is_zero)}",
        f"(ii) evaluation at 1: a -> {field_.format(facts.value_at_one)}, "
        f"{loop}^* -> {field_.format(facts.ghost_value_at_one)}, so {loop}^* is not in Ra "
        f"{_mark(facts.ghost_outside_ideal)}",
    ]
    certificate = facts.certificate()
    result = {"a": str(facts.element), "laurent": str(laurent_of_loop(facts.element)), "holds": facts.holds}
    return Outcome(lines, ctx.report("counterexample", result, [certificate]), 0 if facts.holds else 3)


def cmd_corner(args: argparse.Namespace, ctx: Context) -> Outcome:
    handle = corner(ctx.parse(args.idempotent), dim_cap=ctx.settings.dim_cap)
    elements = [ctx.parse(text) for text in args.elements] or list(handle.basis)
    certificate = handle.certificate(elements)
    lines = [f"eRe = {_span(handle.basis)}", f"dim {handle.dim}"]
    for x in elements:
        lines.append(f"P-injective at {x} within eRe {_mark(handle.is_p_injective_at(x).holds)}")
    result = {"e": str(handle.unit), "dim": handle.dim, "holds": certificate.holds}
    return Outcome(lines, ctx.report("corner", result, [certificate]), 0 if certificate.holds else 3)


def cmd_recheck(args: argparse.Namespace, settings: Settings) -> Outcome:
    try:
        raw = Path(args.report).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFileError(f"cannot read report '{args.report}': {exc.strerror or exc}") from exc
    report = load_report(raw)
    graph = parse_graph(report.graph)
    algebra = LeavittAlgebra(graph, Field.from_spec(report.field))
    results = []
    for certificate in report.evidence:
        ok = recheck_certificate(certificate, algebra, dim_cap=settings.dim_cap)
        results.append({"kind": certificate.kind, "recheck": certificate.recheck, "ok": ok})
    lines = [f"{r['kind']} ({r['recheck']}): {'ok' if r['ok'] else 'FAILED'}" for r in results]
    all_ok = all(r["ok"] for r in results)
    lines.append(f"{len(results)} certificates rechecked, {'all reproduce' if all_ok else 'some failed'}")
    summary = OperationReport(
        command="recheck",
        graph=report.graph,
        field=report.field,
        seed=report.seed,
        result={"source_command": report.command, "certificates": results, "ok": all_ok},
    )
    return Outcome(lines, summary, 0 if all_ok else 3)


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leavitt-lab", description="Exact computations in Leavitt path algebras"
    )
    parser.add_argument("--field", help="coefficient field: q or fp:<prime>")
    parser.add_argument("--seed", type=int, help="sampling seed")
    parser.add_argument("--dim-cap", type=int, help="refuse bases larger than this")
    parser.add_argument("--format", choices=("text", "json"), dest="output_format")
    parser.add_argument("--samples", type=int, help="sampled elements per classification")
    parser.add_argument("--log-level")
    parser.add_argument("--metrics-file", help="write Prometheus text metrics here")
    sub = parser.add_subparsers(dest="command", required=True)

    classify_cmd = sub.add_parser("classify", help="Decide regularity, P-injectivity and matriciality")
    classify_cmd.add_argument("graph")
    classify_cmd.set_defaults(func=cmd_classify)

    eval_cmd = sub.add_parser("eval", help="Evaluate an algebra operation")
    eval_cmd.add_argument("graph")
    eval_cmd.add_argument("op", choices=EVAL_OPS)
    eval_cmd.add_argument("expressions", nargs="+")
    eval_cmd.set_defaults(func=cmd_eval)

    witness_cmd = sub.add_parser("witness", help="Find r with a*r*a = a")
    witness_cmd.add_argument("graph")
    witness_cmd.add_argument("expression")
    witness_cmd.add_argument("--max-len", type=int, help="search bound for cyclic graphs")
    witness_cmd.add_argument("--xrava", action="store_true", help="also check x = x*r*a*v on l_R r_R(a)")
    witness_cmd.set_defaults(func=cmd_witness)

    pinj_cmd = sub.add_parser("pinj", help="Check l_R r_R(a) = Ra")
    pinj_cmd.add_argument("graph")
    pinj_cmd.add_argument("expression")
    pinj_cmd.add_argument("--left", action="store_true", help="check r_R l_R(a) = aR instead")
    pinj_cmd.add_argument("--extend", metavar="D", help="extend f(a*t) = D*t to the whole algebra")
    pinj_cmd.set_defaults(func=cmd_pinj)

    ann_cmd = sub.add_parser("annihilate", help="Annihilators and principal ideals of an element")
    ann_cmd.add_argument("graph")
    ann_cmd.add_argument("expression")
    ann_cmd.set_defaults(func=cmd_annihilate)

    dec_cmd = sub.add_parser("decompose", help="Matrix blocks of an acyclic graph")
    dec_cmd.add_argument("graph")
    dec_cmd.add_argument("expression", nargs="?")
    dec_cmd.set_defaults(func=cmd_decompose)

    ce_cmd = sub.add_parser("counterexample", help="Exact certificate that v - c is not regular on the loop")
    ce_cmd.add_argument("graph")
    ce_cmd.set_defaults(func=cmd_counterexample)

    corner_cmd = sub.add_parser("corner", help="P-injectivity inside the corner eRe")
    corner_cmd.add_argument("graph")
    corner_cmd.add_argument("idempotent")
    corner_cmd.add_argument("elements", nargs="*")
    corner_cmd.set_defaults(func=cmd_corner)

    recheck_cmd = sub.add_parser("recheck", help="Re-verify every certificate in a JSON report")
    recheck_cmd.add_argument("report")
    recheck_cmd.set_defaults(func=None)
    return parser


def _settings_from(args: argparse.Namespace) -> Settings:
    return get_settings(
        field=args.field,
        seed=args.seed,
        dim_cap=args.dim_cap,
        output_format=args.output_format,
        samples=args.samples,
        log_level=args.log_level,
        metrics_file=args.metrics_file,
    )


def _run(args: argparse.Namespace, settings: Settings) -> Outcome:
    if args.command == "recheck":
        return cmd_recheck(args, settings)
    handler: Callable[[argparse.Namespace, Context], Outcome] = args.func
    return handler(args, load_context(args.graph, settings))


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = _settings_from(args)
    except ValidationError as exc:
        for error in exc.errors():
            print(f"error: {error['loc'][0]}: {error['msg']}", file=sys.stderr)
        return 2
    configure_logging(settings.log_level)
    with run_context():
        log.info("command started", extra={"command": args.command})
        try:
            outcome = _run(args, settings)
        except LeavittError as exc:
            log.info("command failed", extra={"command": args.command, "error": type(exc).__name__})
            print(f"error: {exc}", file=sys.stderr)
            return exc.exit_code
        except Exception:
            log.exception("internal error")
            return 1
        finally:
            if settings.metrics_file:
                write_metrics(settings.metrics_file)
    if settings.output_format == "json":
        sys.stdout.write(render_json(outcome.report))
    else:
        print("\n".join(outcome.lines))
    return outcome.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
