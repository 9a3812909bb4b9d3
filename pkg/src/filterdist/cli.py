"""Command-line surface: generate zoo specs, apply templates, emit reports,
comparison tables and Fig-style distribution curves as CSV.

Every subcommand is a thin composition of library operations; no numeric
logic lives here.  Exit status 1 signals a domain or usage error with a
diagnostic on stderr, 2 an I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .archspec import (
    FilterDistError,
    extract_filter_plan,
    parse_architecture,
    serialize_architecture,
)
from .costmodel import (
    compare_templates,
    cost_report,
    render_comparison_csv,
    render_comparison_text,
    render_report_csv,
    render_report_text,
    report_as_dict,
)
from .templates import ALL_TEMPLATES, TemplateId, apply_template, template_counts
from .zoo import DATASETS, FAMILIES, ZooModelId, build_model

DISTRIBUTION_CSV_HEADER = "template,layer_index,filters"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract reserves 2 for I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="filterdist",
                     description="Filter distribution templates over CNN descriptions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zoo", parents=[], help="write a built-in model description")
    p.add_argument("--model", required=True, choices=FAMILIES)
    p.add_argument("--dataset", required=True, choices=DATASETS)
    p.add_argument("--out", required=True)

    p = sub.add_parser("apply", help="apply one template to a spec file")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--template", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="print the cost report for a spec file")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--batch", type=int, default=128)
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")

    p = sub.add_parser("compare", help="compare templates on one architecture")
    _add_source_flags(p)
    p.add_argument("--templates", required=True, nargs="+")
    p.add_argument("--batch", type=int, default=128)
    p.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("distribution", help="write per-layer filter counts as CSV")
    _add_source_flags(p)
    p.add_argument("--templates", required=True, nargs="+")
    p.add_argument("--out", required=True)

    return parser


def _add_source_flags(p):
    p.add_argument("--in", dest="in_path")
    p.add_argument("--model", choices=FAMILIES)
    p.add_argument("--dataset", choices=DATASETS)


def _load_source(args):
    if args.in_path is not None:
        if args.model or args.dataset:
            raise FilterDistError("give either --in or --model/--dataset, not both")
        return parse_architecture(_read(args.in_path))
    if args.model and args.dataset:
        return build_model(ZooModelId(args.model, args.dataset))
    raise FilterDistError("an input is required: --in <path> or --model and --dataset")


def _parse_templates(tokens) -> list[TemplateId]:
    flat = []
    for item in tokens:
        flat.extend(t for t in item.split(",") if t)
    out = []
    for token in flat:
        if token == "all":
            for t in ALL_TEMPLATES:
                if t not in out:
                    out.append(t)
            continue
        t = TemplateId.from_token(token)
        if t not in out:
            out.append(t)
    if not out:
        raise FilterDistError("no templates given")
    return out


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _cmd_zoo(args) -> None:
    arch = build_model(ZooModelId(args.model, args.dataset))
    _write(args.out, serialize_architecture(arch))


def _cmd_apply(args) -> None:
    arch = parse_architecture(_read(args.in_path))
    template = TemplateId.from_token(args.template)
    _write(args.out, serialize_architecture(apply_template(arch, template)))


def _cmd_report(args) -> None:
    arch = parse_architecture(_read(args.in_path))
    report = cost_report(arch, args.batch)
    if args.format == "text":
        sys.stdout.write(render_report_text(report))
    elif args.format == "csv":
        sys.stdout.write(render_report_csv(report))
    else:
        sys.stdout.write(json.dumps(report_as_dict(report), indent=2) + "\n")


def _cmd_compare(args) -> None:
    arch = _load_source(args)
    rows = compare_templates(arch, _parse_templates(args.templates), args.batch)
    render = render_comparison_text if args.format == "text" else render_comparison_csv
    sys.stdout.write(render(rows))


def _cmd_distribution(args) -> None:
    arch = _load_source(args)
    plan = extract_filter_plan(arch)
    lines = [DISTRIBUTION_CSV_HEADER]
    for template in _parse_templates(args.templates):
        counts = template_counts(template, plan.counts)
        lines.extend(
            f"{template.token},{index},{count}"
            for index, count in enumerate(counts, 1)
        )
    _write(args.out, "\n".join(lines) + "\n")


_COMMANDS = {
    "zoo": _cmd_zoo,
    "apply": _cmd_apply,
    "report": _cmd_report,
    "compare": _cmd_compare,
    "distribution": _cmd_distribution,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except FilterDistError as exc:
        print(f"filterdist: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"filterdist: i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
