"""Exception hierarchy shared by the compiler and the switch runtime."""

from __future__ import annotations

from dataclasses import dataclass


class P4mcError(Exception):
    """Base class for every error raised by this package."""


@dataclass(frozen=True)
class Span:
    """1-based source position (line, column)."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass
class Diagnostic:
    span: Span
    message: str
    severity: str = "error"

    def render(self, origin: str) -> str:
        return f"{origin}:{self.span.line}:{self.span.col}: {self.severity}: {self.message}"


class LexError(P4mcError):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class ParseError(P4mcError):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class SemanticError(P4mcError):
    """Carries every problem found by the checker, not just the first."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        summary = "; ".join(f"{d.span}: {d.message}" for d in diagnostics)
        super().__init__(summary)


class CompileError(P4mcError):
    """Errors from the lowering passes (parser table, dependency graph, emit)."""


class MissingStartState(CompileError):
    pass


class CyclicParserGraph(CompileError):
    pass


class UndeclaredNextState(CompileError):
    pass


class CycleDetected(CompileError):
    pass


class InternalInconsistency(CompileError):
    pass


class MalformedConfig(P4mcError):
    """Rejected target configuration. `kind` is version, schema or reference;
    `path` points at the offending element."""

    def __init__(self, kind: str, path: str, message: str):
        super().__init__(f"{kind} error at {path}: {message}")
        self.kind = kind
        self.path = path
        self.detail = message


class EngineError(P4mcError):
    """Base class for populate-phase and processing errors."""


class NotConfigured(EngineError):
    pass


class UnknownTable(EngineError):
    pass


class UnknownAction(EngineError):
    pass


class UnknownRuleId(EngineError):
    pass


class TableFull(EngineError):
    pass


class DuplicateExactKey(EngineError):
    pass


class TypeMismatch(EngineError):
    """Ill-typed rule or default action. `kind` is one of arity, width,
    match-kind, priority, param."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class ActionOnInvalidHeader(EngineError):
    """A primitive touched a field of an invalid header.

    Packet processing never raises this: the primitive is skipped, the
    event lands in the trace and metadata.ingress_error is set. The class
    exists so callers can construct/inspect the condition uniformly.
    """

    def __init__(self, primitive: str, header: str):
        super().__init__(f"{primitive} on invalid header {header}")
        self.primitive = primitive
        self.header = header
