"""Rule records and the JSON rules-file reader."""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import TypeMismatch


@dataclass(frozen=True)
class ExactKey:
    value: int


@dataclass(frozen=True)
class TernaryKey:
    value: int
    mask: int


@dataclass(frozen=True)
class LpmKey:
    value: int
    prefix_len: int


@dataclass(frozen=True)
class ValidKey:
    value: bool


KeyComponent = ExactKey | TernaryKey | LpmKey | ValidKey


@dataclass(frozen=True)
class Rule:
    """One candidate table entry, not yet validated against a table."""

    table: str
    key: tuple[KeyComponent, ...]
    action: str
    params: tuple[int, ...] = ()
    priority: int | None = None


def _hex_int(value: object, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, str):
        raise TypeMismatch("schema", f"{where}: expected a hex string")
    try:
        return int(value, 16)
    except ValueError:
        raise TypeMismatch("schema", f"{where}: invalid hex literal {value!r}") from None


def _key_component(raw: object, where: str) -> KeyComponent:
    if isinstance(raw, bool):
        return ValidKey(raw)
    if isinstance(raw, str):
        return ExactKey(_hex_int(raw, where))
    if isinstance(raw, dict):
        keys = set(raw)
        if keys == {"value", "mask"}:
            return TernaryKey(_hex_int(raw["value"], where), _hex_int(raw["mask"], where))
        if keys == {"value", "prefix_len"}:
            plen = raw["prefix_len"]
            if isinstance(plen, bool) or not isinstance(plen, int):
                raise TypeMismatch("schema", f"{where}: prefix_len must be an integer")
            return LpmKey(_hex_int(raw["value"], where), plen)
        raise TypeMismatch(
            "schema", f"{where}: object key must have value+mask or value+prefix_len"
        )
    raise TypeMismatch("schema", f"{where}: unsupported key component")


def _rule(raw: object, where: str) -> Rule:
    if not isinstance(raw, dict):
        raise TypeMismatch("schema", f"{where}: expected an object")
    unknown = set(raw) - {"table", "priority", "key", "action", "params"}
    if unknown:
        raise TypeMismatch("schema", f"{where}: unknown field {sorted(unknown)[0]!r}")
    for name in ("table", "action"):
        if not isinstance(raw.get(name), str):
            raise TypeMismatch("schema", f"{where}: {name} must be a string")
    key_raw = raw.get("key")
    if not isinstance(key_raw, list):
        raise TypeMismatch("schema", f"{where}: key must be an array")
    key = tuple(
        _key_component(item, f"{where}.key[{i}]") for i, item in enumerate(key_raw)
    )
    params_raw = raw.get("params", [])
    if not isinstance(params_raw, list):
        raise TypeMismatch("schema", f"{where}: params must be an array")
    params = tuple(
        _hex_int(item, f"{where}.params[{i}]") for i, item in enumerate(params_raw)
    )
    priority = raw.get("priority")
    if priority is not None and (isinstance(priority, bool) or not isinstance(priority, int)):
        raise TypeMismatch("schema", f"{where}: priority must be an integer")
    return Rule(raw["table"], key, raw["action"], params, priority)


def parse_rules_json(text: str) -> list[Rule]:
    """Read a rules file: a JSON array of rule objects.

    Values and masks are hex strings; valid-match components are JSON
    booleans; lpm components carry an integer prefix_len.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TypeMismatch("schema", f"rules file is not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise TypeMismatch("schema", "rules file must be a JSON array")
    return [_rule(item, f"rules[{i}]") for i, item in enumerate(data)]
