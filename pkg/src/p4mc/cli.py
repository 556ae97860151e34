"""Command-line driver: compile, check, tdg, and run subcommands.

Exit codes: 0 success, 1 content errors (lex/parse/semantic diagnostics,
malformed configs, invalid rules or packets), 2 I/O failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import target_config, tdg as tdg_mod
from .engine import new_switch, parse_rules_json
from .errors import (
    CompileError,
    EngineError,
    LexError,
    MalformedConfig,
    ParseError,
    SemanticError,
)
from .toolchain import CompileOutput, compile_source

OK = 0
CONTENT_ERROR = 1
IO_ERROR = 2


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _compile(path: str) -> CompileOutput | int:
    """Compile a source file, printing diagnostics; int result is an exit code."""
    try:
        text = _read_text(path)
    except OSError as exc:
        print(f"{path}: {exc.strerror or exc}", file=sys.stderr)
        return IO_ERROR
    try:
        return compile_source(text)
    except (LexError, ParseError) as exc:
        print(f"{path}:{exc.span}: error: {exc.message}", file=sys.stderr)
        return CONTENT_ERROR
    except SemanticError as exc:
        for diag in exc.diagnostics:
            print(diag.render(path), file=sys.stderr)
        return CONTENT_ERROR
    except CompileError as exc:
        print(f"{path}: error: {exc}", file=sys.stderr)
        return CONTENT_ERROR


def cmd_compile(args: argparse.Namespace) -> int:
    result = _compile(args.source)
    if isinstance(result, int):
        return result
    text = target_config.dumps(result.config)
    try:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        print(f"{args.output}: {exc.strerror or exc}", file=sys.stderr)
        return IO_ERROR
    return OK


def cmd_check(args: argparse.Namespace) -> int:
    result = _compile(args.source)
    return result if isinstance(result, int) else OK


def cmd_tdg(args: argparse.Namespace) -> int:
    result = _compile(args.source)
    if isinstance(result, int):
        return result
    graph, stages = result.tdg, result.stages
    incoming: dict[int, list[str]] = {node.node_id: [] for node in graph.nodes}
    for edge in graph.edges:
        incoming[edge.dst].append(edge.kind)
    width = max((len(node.name) for node in graph.nodes), default=4)
    for node in graph.nodes:
        kinds = ",".join(sorted(set(incoming[node.node_id]))) or "-"
        stage = stages.stages[node.node_id]
        print(f"{node.name:<{width}}  stage {stage}  {kinds}")
    print(f"depth {stages.depth}")
    if args.dot is not None:
        try:
            with open(args.dot, "w", encoding="utf-8") as handle:
                handle.write(tdg_mod.export_dot(graph, stages))
        except OSError as exc:
            print(f"{args.dot}: {exc.strerror or exc}", file=sys.stderr)
            return IO_ERROR
    return OK


def _parse_packets(text: str, path: str) -> list[bytes] | int:
    packets: list[bytes] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            packets.append(bytes.fromhex(line))
        except ValueError:
            print(f"{path}:{lineno}: error: invalid hex packet", file=sys.stderr)
            return CONTENT_ERROR
    return packets


def _load_rules(switch, text: str, path: str) -> int:
    """All-or-nothing rule loading; every invalid rule is reported."""
    try:
        rules = parse_rules_json(text)
    except EngineError as exc:
        print(f"{path}: error: {exc}", file=sys.stderr)
        return CONTENT_ERROR
    failures = 0
    for index, rule in enumerate(rules):
        try:
            switch.insert_rule(rule)
        except EngineError as exc:
            print(f"{path}: rules[{index}]: error: {exc}", file=sys.stderr)
            failures += 1
    return CONTENT_ERROR if failures else OK


def cmd_run(args: argparse.Namespace) -> int:
    try:
        config_text = _read_text(args.config)
    except OSError as exc:
        print(f"{args.config}: {exc.strerror or exc}", file=sys.stderr)
        return IO_ERROR
    try:
        config = target_config.loads(config_text)
    except MalformedConfig as exc:
        print(f"{args.config}: error: {exc.detail}", file=sys.stderr)
        return CONTENT_ERROR
    switch = new_switch(config)
    if args.rules is not None:
        try:
            rules_text = _read_text(args.rules)
        except OSError as exc:
            print(f"{args.rules}: {exc.strerror or exc}", file=sys.stderr)
            return IO_ERROR
        status = _load_rules(switch, rules_text, args.rules)
        if status != OK:
            return status
    try:
        packets_text = _read_text(args.packets)
    except OSError as exc:
        print(f"{args.packets}: {exc.strerror or exc}", file=sys.stderr)
        return IO_ERROR
    packets = _parse_packets(packets_text, args.packets)
    if isinstance(packets, int):
        return packets
    process = switch.process_packet_staged if args.staged else switch.process_packet
    trace_lines: list[str] = []
    for index, packet in enumerate(packets):
        verdict = process(args.port, packet)
        print(verdict.line())
        if args.trace is not None:
            for event in verdict.trace:
                trace_lines.append(
                    json.dumps({"packet": index, "event": event.kind, **event.detail})
                )
    if args.trace is not None:
        try:
            with open(args.trace, "w", encoding="utf-8") as handle:
                handle.write("".join(line + "\n" for line in trace_lines))
        except OSError as exc:
            print(f"{args.trace}: {exc.strerror or exc}", file=sys.stderr)
            return IO_ERROR
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="p4mc", description="Compile and run match+action dataplane programs."
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_compile = sub.add_parser("compile", help="compile a source file to config JSON")
    p_compile.add_argument("source", help="source program path")
    p_compile.add_argument("-o", "--output", required=True, help="config JSON output path")
    p_compile.set_defaults(func=cmd_compile)

    p_check = sub.add_parser("check", help="compile without emitting output")
    p_check.add_argument("source", help="source program path")
    p_check.set_defaults(func=cmd_check)

    p_tdg = sub.add_parser("tdg", help="print table dependency stages")
    p_tdg.add_argument("source", help="source program path")
    p_tdg.add_argument("--dot", default=None, help="also write a DOT graph here")
    p_tdg.set_defaults(func=cmd_tdg)

    p_run = sub.add_parser("run", help="run packets through a configured switch")
    p_run.add_argument("config", help="config JSON path")
    p_run.add_argument("--rules", default=None, help="rules JSON path")
    p_run.add_argument("--packets", required=True, help="hex packets path")
    p_run.add_argument("--port", type=int, default=0, help="ingress port (default 0)")
    p_run.add_argument("--trace", default=None, help="write a JSON-lines trace here")
    p_run.add_argument("--staged", action="store_true", help="use the staged executor")
    p_run.set_defaults(func=cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
