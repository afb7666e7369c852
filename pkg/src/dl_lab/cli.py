"""Command-line driver: dl-lab <command> --config <path> --out <dir>."""
from __future__ import annotations

import argparse
import sys

from .errors import DLLabError
from .io import dumps_document, hamiltonian_to_document, atomic_write_text
from .models import ModelDescriptor, build_model
from .runner import COMMANDS, FORMATS, emit_report, list_models, load_config, run


def _parse_value(raw: str):
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dl-lab",
                                     description="frustration-free Hamiltonian checks")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        cmd = sub.add_parser(command, help=f"run the {command} pipeline")
        cmd.add_argument("--config", required=True, help="run configuration document")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--format", default=None, choices=FORMATS)
        cmd.add_argument("--quiet", action="store_true")
    model = sub.add_parser("model", help="enumerate or emit bundled models")
    model_sub = model.add_subparsers(dest="model_command", required=True)
    model_sub.add_parser("list", help="list bundled model descriptors")
    emit = model_sub.add_parser("emit", help="write a model as a document")
    emit.add_argument("--name", required=True)
    emit.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                      help="model parameter, repeatable")
    emit.add_argument("--out", required=True, help="output file path")
    return parser


def _model_main(args) -> int:
    if args.model_command == "list":
        for descriptor in list_models():
            facts = ", ".join(f"{k}={v}" for k, v in descriptor.expected) or "-"
            print(f"{descriptor.label():40s} expected: {facts}")
        return 0
    params = {}
    for item in args.set:
        if "=" not in item:
            print(f"bad --set value {item!r}, expected KEY=VALUE", file=sys.stderr)
            return 2
        key, _, raw = item.partition("=")
        params[key] = _parse_value(raw)
    descriptor = ModelDescriptor.make(args.name, **params)
    h = build_model(descriptor)
    atomic_write_text(args.out, dumps_document(hamiltonian_to_document(h)) + "\n")
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "model":
            return _model_main(args)
        config = load_config(args.config, out_dir=args.out, out_format=args.format,
                             quiet=args.quiet)
        report = run(config)
        report, paths = emit_report(report, config.out_dir, config.out_format)
        if not config.quiet:
            for record in report.records:
                measured = "" if record.measured is None else f" measured={record.measured:.6g}"
                bound = "" if record.bound is None else f" bound={record.bound:.6g}"
                print(f"[{record.status:>19s}] {record.name}{measured}{bound}")
            print(f"overall: {'pass' if report.overall_pass else 'FAIL'}")
            for path in paths:
                print(f"wrote {path}")
        return 0 if report.overall_pass else 1
    except DLLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
