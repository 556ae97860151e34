"""Installed-rule storage and match selection for one table."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DuplicateExactKey, TableFull, TypeMismatch, UnknownAction
from ..semantics import ReadKey
from ..target_config import ConfigTable, TargetConfig
from .rules import ExactKey, KeyComponent, LpmKey, Rule, TernaryKey, ValidKey

EXACT = "exact"
TERNARY = "ternary"
LPM = "lpm"
VALID = "valid"


def _prefix_mask(prefix_len: int, width: int) -> int:
    if prefix_len == 0:
        return 0
    return ((1 << prefix_len) - 1) << (width - prefix_len)


@dataclass(frozen=True)
class InstalledRule:
    rule_id: int
    key: tuple[KeyComponent, ...]
    action: str
    params: tuple[int, ...]
    priority: int
    prefix_sum: int


class TableRuntime:
    """Rules installed against one ConfigTable, with its match discipline."""

    def __init__(self, config: TargetConfig, spec: ConfigTable) -> None:
        self.config = config
        self.spec = spec
        self.rules: dict[int, InstalledRule] = {}
        self.default: tuple[str, tuple[int, ...]] | None = None
        self.is_exact = all(read.kind in (EXACT, VALID) for read in spec.reads)
        self._exact_index: dict[tuple[object, ...], int] = {}

    def _field_width(self, read: ReadKey) -> int:
        assert read.field is not None
        return read.field.width

    def _check_component(self, raw: KeyComponent, read: ReadKey, where: str) -> KeyComponent:
        """Validate one key component against the read it binds to.

        Ternary and lpm components are normalized so bits outside the mask
        or prefix are zero.
        """
        if read.kind == VALID:
            if not isinstance(raw, ValidKey):
                raise TypeMismatch("match-kind", f"{where}: expected a valid (boolean) key")
            return raw
        width = self._field_width(read)
        limit = 1 << width
        if read.kind == EXACT:
            if not isinstance(raw, ExactKey):
                raise TypeMismatch("match-kind", f"{where}: expected an exact key")
            if not 0 <= raw.value < limit:
                raise TypeMismatch("width", f"{where}: value does not fit {width} bits")
            return raw
        if read.kind == TERNARY:
            if not isinstance(raw, TernaryKey):
                raise TypeMismatch("match-kind", f"{where}: expected a ternary key")
            if not 0 <= raw.value < limit or not 0 <= raw.mask < limit:
                raise TypeMismatch("width", f"{where}: value or mask does not fit {width} bits")
            return TernaryKey(raw.value & raw.mask, raw.mask)
        if not isinstance(raw, LpmKey):
            raise TypeMismatch("match-kind", f"{where}: expected an lpm key")
        if not 0 <= raw.prefix_len <= width:
            raise TypeMismatch("width", f"{where}: prefix_len outside 0..{width}")
        if not 0 <= raw.value < limit:
            raise TypeMismatch("width", f"{where}: value does not fit {width} bits")
        mask = _prefix_mask(raw.prefix_len, width)
        return LpmKey(raw.value & mask, raw.prefix_len)

    def validate(self, rule: Rule) -> tuple[tuple[KeyComponent, ...], int, int]:
        """Check a rule against this table; returns (key, priority, prefix_sum)."""
        if rule.action not in self.spec.actions:
            raise UnknownAction(
                f"action {rule.action!r} is not an action of table {self.spec.name!r}"
            )
        if len(rule.key) != len(self.spec.reads):
            raise TypeMismatch(
                "arity",
                f"table {self.spec.name!r} expects {len(self.spec.reads)} key components, "
                f"got {len(rule.key)}",
            )
        key = tuple(
            self._check_component(raw, read, f"key[{i}]")
            for i, (raw, read) in enumerate(zip(rule.key, self.spec.reads))
        )
        if self.is_exact:
            priority = 0
        else:
            if rule.priority is None:
                raise TypeMismatch(
                    "priority",
                    f"table {self.spec.name!r} has ternary or lpm reads; "
                    "rules must carry a priority",
                )
            priority = rule.priority
        self._check_params(rule.action, rule.params)
        prefix_sum = sum(c.prefix_len for c in key if isinstance(c, LpmKey))
        return key, priority, prefix_sum

    def _check_params(self, action: str, params: tuple[int, ...]) -> None:
        caction = self.config.action(action)
        if len(params) != len(caction.params):
            raise TypeMismatch(
                "arity",
                f"action {action!r} expects {len(caction.params)} params, got {len(params)}",
            )
        for value, (name, width) in zip(params, caction.params):
            if not 0 <= value < (1 << width):
                raise TypeMismatch(
                    "width", f"param {name!r} of action {action!r} does not fit {width} bits"
                )

    def _exact_key(self, key: tuple[KeyComponent, ...]) -> tuple[object, ...]:
        return tuple(
            c.value if isinstance(c, ExactKey) else bool(c.value)  # type: ignore[union-attr]
            for c in key
        )

    def insert(self, rule_id: int, rule: Rule) -> None:
        key, priority, prefix_sum = self.validate(rule)
        if self.is_exact:
            lookup = self._exact_key(key)
            if lookup in self._exact_index:
                raise DuplicateExactKey(
                    f"table {self.spec.name!r} already holds a rule with this key"
                )
        if len(self.rules) >= self.spec.max_size:
            raise TableFull(
                f"table {self.spec.name!r} is full ({self.spec.max_size} rules)"
            )
        installed = InstalledRule(rule_id, key, rule.action, rule.params, priority, prefix_sum)
        self.rules[rule_id] = installed
        if self.is_exact:
            self._exact_index[self._exact_key(key)] = rule_id

    def remove(self, rule_id: int) -> None:
        installed = self.rules.pop(rule_id)
        if self.is_exact:
            del self._exact_index[self._exact_key(installed.key)]

    def set_default(self, action: str, params: tuple[int, ...]) -> None:
        if action not in self.spec.actions:
            raise UnknownAction(
                f"action {action!r} is not an action of table {self.spec.name!r}"
            )
        self._check_params(action, params)
        self.default = (action, params)

    def _component_matches(self, comp: KeyComponent, read: ReadKey, value: object) -> bool:
        if isinstance(comp, ValidKey):
            return comp.value == value
        assert isinstance(value, int)
        if isinstance(comp, ExactKey):
            return comp.value == value
        if isinstance(comp, TernaryKey):
            return (value & comp.mask) == comp.value
        width = self._field_width(read)
        return (value & _prefix_mask(comp.prefix_len, width)) == comp.value

    def lookup(self, values: tuple[object, ...]) -> InstalledRule | None:
        """Best matching rule: longest total prefix, then priority, then lowest id."""
        if self.is_exact:
            rule_id = self._exact_index.get(values)
            return self.rules[rule_id] if rule_id is not None else None
        best: InstalledRule | None = None
        best_key: tuple[int, int, int] | None = None
        for installed in self.rules.values():
            if not all(
                self._component_matches(comp, read, value)
                for comp, read, value in zip(installed.key, self.spec.reads, values)
            ):
                continue
            sort_key = (-installed.prefix_sum, -installed.priority, installed.rule_id)
            if best_key is None or sort_key < best_key:
                best, best_key = installed, sort_key
        return best
