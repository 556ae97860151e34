"""Software-switch runtime: rules, packet state, and the two executors."""

from .packet import PacketState
from .rules import ExactKey, LpmKey, Rule, TernaryKey, ValidKey, parse_rules_json
from .switch import (
    DROP,
    EGRESS,
    HIT,
    MISS,
    NOT_APPLIED,
    TO_CPU,
    Switch,
    Verdict,
    new_switch,
    pred_text,
)
from .tables import InstalledRule, TableRuntime
from .trace import TraceEvent

__all__ = [
    "DROP",
    "EGRESS",
    "ExactKey",
    "HIT",
    "InstalledRule",
    "LpmKey",
    "MISS",
    "NOT_APPLIED",
    "PacketState",
    "Rule",
    "Switch",
    "TO_CPU",
    "TableRuntime",
    "TernaryKey",
    "TraceEvent",
    "ValidKey",
    "Verdict",
    "new_switch",
    "parse_rules_json",
    "pred_text",
]
