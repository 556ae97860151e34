"""p4mc: a compiler and software switch for a match+action dataplane language.

The pipeline mirrors the two operational phases of a programmable switch:
configure (parse, check, derive the parser state table and table dependency
graph, emit a target config) and populate/run (install rules, process
packets with either the reference or the staged executor).
"""

from .engine import Rule, Switch, Verdict, new_switch, parse_rules_json
from .frontend import parse_program
from .semantics import CheckedProgram, check
from .target_config import TargetConfig, dumps, load, loads
from .toolchain import CompileOutput, compile_file, compile_source

__version__ = "0.1.0"

__all__ = [
    "CheckedProgram",
    "CompileOutput",
    "Rule",
    "Switch",
    "TargetConfig",
    "Verdict",
    "__version__",
    "check",
    "compile_file",
    "compile_source",
    "dumps",
    "load",
    "loads",
    "new_switch",
    "parse_program",
    "parse_rules_json",
]
