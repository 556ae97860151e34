"""End-to-end compilation pipeline: source text to TargetConfig."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .frontend import parse_program
from .parser_compiler import ParserProgram, compile_parser
from .semantics import CheckedProgram, check
from .target_config import TargetConfig, emit
from .tdg import StageAssignment, Tdg, assign_stages, build_tdg


@dataclass(frozen=True)
class CompileOutput:
    prog: CheckedProgram
    parser: ParserProgram
    tdg: Tdg
    stages: StageAssignment
    config: TargetConfig


def compile_source(text: str) -> CompileOutput:
    """Run every pass; raises LexError/ParseError/SemanticError/CompileError."""
    prog = check(parse_program(text))
    pp = compile_parser(prog)
    graph = build_tdg(prog)
    stages = assign_stages(graph)
    config = emit(prog, pp, graph, stages)
    return CompileOutput(prog, pp, graph, stages, config)


def compile_file(path: str | Path) -> CompileOutput:
    return compile_source(Path(path).read_text(encoding="utf-8"))
