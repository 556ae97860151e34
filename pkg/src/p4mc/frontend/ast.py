"""Untyped syntax tree.

Every node carries the span of its first token. Spans are excluded from
equality so that two parses of equivalent text compare equal regardless of
layout (this is what the pretty-print round-trip property relies on).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..errors import Span

# A table with no max_size attribute gets this capacity.
DEFAULT_MAX_SIZE = 1024

# Next-state name used for the terminal parser transition. "stop" is a
# keyword, so no declared state can collide with it.
STOP = "stop"


def _span_field():
    return field(compare=False, repr=False)


@dataclass
class FieldSpec:
    name: str
    width: int
    span: Span = _span_field()


@dataclass
class HeaderDecl:
    name: str
    fields: list[FieldSpec]
    span: Span = _span_field()


@dataclass
class MetadataDecl:
    """Program-declared extra metadata fields (same shape as `fields`)."""

    fields: list[FieldSpec]
    span: Span = _span_field()


@dataclass
class SwitchCase:
    value: int
    next_state: str
    span: Span = _span_field()


@dataclass
class TransitionBody:
    """Unconditional transition; `next_state` may be STOP."""

    next_state: str


@dataclass
class SwitchBody:
    field: str  # field of the state's own header
    cases: list[SwitchCase]
    default: str | None  # None: no default clause (unhandled values stop)


@dataclass
class ParserStateDecl:
    name: str
    body: TransitionBody | SwitchBody
    span: Span = _span_field()


@dataclass
class RefName:
    """A bare or dotted name: `vid`, `vlan.vid`, `mTag`."""

    parts: tuple[str, ...]
    span: Span = _span_field()

    def __str__(self) -> str:
        return ".".join(self.parts)


@dataclass
class ReadSpec:
    target: RefName
    kind: str  # exact | ternary | valid | lpm
    span: Span = _span_field()


@dataclass
class TableDecl:
    name: str
    reads: list[ReadSpec]
    actions: list[str]
    max_size: int
    span: Span = _span_field()


@dataclass
class ConstArg:
    value: int
    span: Span = _span_field()


@dataclass
class NameArg:
    ref: RefName


Arg = Union[ConstArg, NameArg]


@dataclass
class PrimitiveCall:
    name: str
    args: list[Arg]
    span: Span = _span_field()


PRIMITIVES = frozenset(
    ["set_field", "copy_field", "add_header", "remove_header", "increment", "checksum"]
)


@dataclass
class ActionDecl:
    name: str
    params: list[str]
    body: list[PrimitiveCall]
    span: Span = _span_field()


@dataclass
class PredDefined:
    ref: RefName


@dataclass
class PredValid:
    ref: RefName


@dataclass
class PredMiss:
    table: str
    span: Span = _span_field()


@dataclass
class PredEq:
    ref: RefName
    value: int


@dataclass
class PredNot:
    arg: "Pred"


@dataclass
class PredAnd:
    left: "Pred"
    right: "Pred"


@dataclass
class PredOr:
    left: "Pred"
    right: "Pred"


Pred = Union[PredDefined, PredValid, PredMiss, PredEq, PredNot, PredAnd, PredOr]


@dataclass
class ApplyStmt:
    table: str
    span: Span = _span_field()


@dataclass
class IfStmt:
    pred: Pred
    then_body: list["Stmt"]
    else_body: list["Stmt"]
    span: Span = _span_field()


Stmt = Union[ApplyStmt, IfStmt]


@dataclass
class ControlDecl:
    name: str
    body: list[Stmt]
    span: Span = _span_field()


@dataclass
class Ast:
    """All declarations of one source program, in source order."""

    headers: list[HeaderDecl]
    metadata: list[MetadataDecl]
    parsers: list[ParserStateDecl]
    tables: list[TableDecl]
    actions: list[ActionDecl]
    controls: list[ControlDecl]
