"""Trace events recorded while a packet moves through the switch."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PARSE = "PARSE"
PARSE_ERROR = "PARSE_ERROR"
TABLE = "TABLE"
PRIMITIVE = "PRIMITIVE"
PREDICATE = "PREDICATE"
ACTION_ERROR = "ACTION_ERROR"
DEPARSE = "DEPARSE"


@dataclass(frozen=True)
class TraceEvent:
    kind: str
    detail: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"event": self.kind, **self.detail})


def parse_event(header: str, offset: int, width: int) -> TraceEvent:
    return TraceEvent(PARSE, {"header": header, "offset": offset, "width": width})


def parse_error_event(reason: str) -> TraceEvent:
    return TraceEvent(PARSE_ERROR, {"reason": reason})


def table_event(
    table: str, node: str, outcome: str, rule_id: int | None, action: str | None
) -> TraceEvent:
    return TraceEvent(
        TABLE,
        {"table": table, "node": node, "outcome": outcome, "rule": rule_id, "action": action},
    )


def primitive_event(op: str, target: str, old: Any, new: Any) -> TraceEvent:
    return TraceEvent(PRIMITIVE, {"op": op, "target": target, "old": old, "new": new})


def predicate_event(text: str, value: bool) -> TraceEvent:
    return TraceEvent(PREDICATE, {"text": text, "value": value})


def action_error_event(primitive: str, header: str) -> TraceEvent:
    return TraceEvent(ACTION_ERROR, {"primitive": primitive, "header": header})


def deparse_event(payload_bits: int, nbytes: int, egress: int | None) -> TraceEvent:
    detail: dict[str, Any] = {"payload_bits": payload_bits, "bytes": nbytes}
    if egress is not None:
        detail["egress"] = egress
    return TraceEvent(DEPARSE, detail)
