"""The software switch: rule management and the two packet executors."""

from __future__ import annotations

from dataclasses import dataclass

from .. import tdg as tdg_mod
from ..errors import MalformedConfig, NotConfigured, UnknownRuleId, UnknownTable
from ..parser_compiler import simulate_parse
from ..semantics import (
    FieldRef,
    PAnd,
    PDefined,
    PEq,
    PMiss,
    PNot,
    POr,
    RPred,
    PValid,
    RApply,
    RIf,
    RStmt,
)
from ..target_config import VERSION, TargetConfig
from . import trace
from .actions import execute_action
from .packet import PacketState
from .rules import Rule
from .tables import TableRuntime, VALID

EGRESS = "egress"
DROP = "drop"
TO_CPU = "to_cpu"

NOT_APPLIED = "not_applied"
MISS = "miss"
HIT = "hit"

INGRESS_PORT = "ingress_port"
EGRESS_SPEC = "egress_spec"
INGRESS_ERROR = "ingress_error"
TO_CPU_FIELD = "to_cpu"


@dataclass(frozen=True)
class Verdict:
    kind: str
    egress: int | None
    data: bytes
    trace: tuple[trace.TraceEvent, ...]

    def line(self) -> str:
        if self.kind == EGRESS:
            return f"egress={self.egress} bytes={self.data.hex()}"
        if self.kind == TO_CPU:
            return f"TO_CPU bytes={self.data.hex()}"
        return f"DROP bytes={self.data.hex()}"


def pred_text(pred: RPred) -> str:
    if isinstance(pred, PDefined):
        return f"defined({pred.field})"
    if isinstance(pred, PValid):
        return f"valid({pred.header})"
    if isinstance(pred, PMiss):
        return f"miss({pred.table})"
    if isinstance(pred, PEq):
        return f"{pred.field} == {pred.value:#x}"
    if isinstance(pred, PNot):
        return f"!({pred_text(pred.arg)})"
    if isinstance(pred, PAnd):
        return f"({pred_text(pred.left)} && {pred_text(pred.right)})"
    assert isinstance(pred, POr)
    return f"({pred_text(pred.left)} || {pred_text(pred.right)})"


@dataclass(frozen=True)
class _Decision:
    node_id: int
    action: str | None
    params: tuple[int, ...]


class Switch:
    """One configured switch instance with installed rules."""

    def __init__(self, config: TargetConfig | None) -> None:
        if config is not None and config.version != VERSION:
            raise MalformedConfig(
                "version", "version", f"unsupported version {config.version!r}"
            )
        self.config = config
        self.tables: dict[str, TableRuntime] = {}
        self._rule_tables: dict[int, str] = {}
        self._next_id = 1
        if config is not None:
            self.tables = {
                spec.name: TableRuntime(config, spec) for spec in config.tables
            }
            self._parser = config.parser_program()
            self._stage_groups = _pipeline_stages(config)
            self._branch_preds = _branch_pred_ids(config.control_body)

    def _require_config(self) -> TargetConfig:
        if self.config is None:
            raise NotConfigured("switch has no target configuration loaded")
        return self.config

    def _runtime(self, table: str) -> TableRuntime:
        self._require_config()
        runtime = self.tables.get(table)
        if runtime is None:
            raise UnknownTable(f"no table named {table!r} in the configuration")
        return runtime

    def insert_rule(self, rule: Rule) -> int:
        runtime = self._runtime(rule.table)
        rule_id = self._next_id
        runtime.insert(rule_id, rule)
        self._next_id += 1
        self._rule_tables[rule_id] = rule.table
        return rule_id

    def remove_rule(self, rule_id: int) -> None:
        self._require_config()
        table = self._rule_tables.pop(rule_id, None)
        if table is None:
            raise UnknownRuleId(f"no installed rule with id {rule_id}")
        self.tables[table].remove(rule_id)

    def set_default(self, table: str, action: str, params: tuple[int, ...] = ()) -> None:
        self._runtime(table).set_default(action, params)

    def _ingress(self, port: int, data: bytes) -> tuple[PacketState, dict[int, str]]:
        config = self._require_config()
        result = simulate_parse(self._parser, data)
        state = PacketState.from_parse(config, data, result)
        for name, offset, width in result.headers:
            state.trace.append(trace.parse_event(name, offset, width))
        if result.error is not None:
            state.trace.append(trace.parse_error_event(result.error))
            state.write_field(self._meta_field(INGRESS_ERROR), 1)
        state.write_field(self._meta_field(INGRESS_PORT), port & 0xFFFF)
        outcomes = {app.node_id: NOT_APPLIED for app in config.applications}
        return state, outcomes

    def _meta_field(self, name: str) -> FieldRef:
        ref = self._require_config().metadata.find(name)
        assert ref is not None
        return ref

    def _eval_pred(
        self, pred: RPred, fields: PacketState, outcomes: dict[int, str]
    ) -> bool:
        """Field atoms read `fields`; miss atoms read the live outcome map."""
        if isinstance(pred, PDefined):
            return fields.is_defined(pred.field)
        if isinstance(pred, PValid):
            return fields.is_valid(pred.header)
        if isinstance(pred, PMiss):
            return outcomes[pred.node_id] != HIT
        if isinstance(pred, PEq):
            return fields.read_field(pred.field) == pred.value
        if isinstance(pred, PNot):
            return not self._eval_pred(pred.arg, fields, outcomes)
        if isinstance(pred, PAnd):
            return self._eval_pred(pred.left, fields, outcomes) and self._eval_pred(
                pred.right, fields, outcomes
            )
        assert isinstance(pred, POr)
        return self._eval_pred(pred.left, fields, outcomes) or self._eval_pred(
            pred.right, fields, outcomes
        )

    def _read_key(self, fields: PacketState, table: TableRuntime) -> tuple[object, ...]:
        values: list[object] = []
        for read in table.spec.reads:
            if read.kind == VALID:
                values.append(fields.is_valid(read.header))
            else:
                assert read.field is not None
                values.append(fields.read_field(read.field))
        return tuple(values)

    def _lookup(
        self,
        fields: PacketState,
        node_id: int,
        outcomes: dict[int, str],
        event_sink: list[trace.TraceEvent],
    ) -> _Decision:
        config = self._require_config()
        app = config.applications[node_id]
        runtime = self.tables[app.table]
        rule = runtime.lookup(self._read_key(fields, runtime))
        if rule is not None:
            outcomes[node_id] = HIT
            event_sink.append(
                trace.table_event(app.table, app.label, HIT, rule.rule_id, rule.action)
            )
            return _Decision(node_id, rule.action, rule.params)
        outcomes[node_id] = MISS
        action, params = runtime.default if runtime.default is not None else (None, ())
        event_sink.append(trace.table_event(app.table, app.label, MISS, None, action))
        return _Decision(node_id, action, params)

    def _commit(self, state: PacketState, decision: _Decision) -> None:
        if decision.action is None:
            return
        config = self._require_config()
        execute_action(state, config.action(decision.action), decision.params)

    def process_packet(self, ingress_port: int, data: bytes) -> Verdict:
        """Reference executor: tables applied one at a time in control order."""
        state, outcomes = self._ingress(ingress_port, data)
        self._walk(self._require_config().control_body, state, outcomes)
        return self._egress(state)

    def _walk(
        self, stmts: tuple[RStmt, ...], state: PacketState, outcomes: dict[int, str]
    ) -> None:
        for stmt in stmts:
            if isinstance(stmt, RApply):
                decision = self._lookup(state, stmt.node_id, outcomes, state.trace)
                self._commit(state, decision)
            else:
                assert isinstance(stmt, RIf)
                value = self._eval_pred(stmt.pred, state, outcomes)
                state.trace.append(trace.predicate_event(pred_text(stmt.pred), value))
                self._walk(stmt.then_body if value else stmt.else_body, state, outcomes)

    def process_packet_staged(self, ingress_port: int, data: bytes) -> Verdict:
        """Pipeline executor: whole stages run against the pre-stage state.

        Within one stage every lookup and guard reads the snapshot taken at
        stage entry (miss() outcomes are read live, in control order), then
        the selected actions commit in control order.

        Each branch predicate is evaluated once, when the first node it
        guards comes up, and the value is reused by every later node under
        that branch. The sequential interpreter decides an `if` once at its
        position in the program, so a node whose own actions overwrite the
        atoms of an enclosing predicate must not flip that branch for the
        nodes after it.
        """
        state, outcomes = self._ingress(ingress_port, data)
        config = self._require_config()
        pred_cache: dict[int, bool] = {}

        def branch_value(pred: RPred, snapshot: PacketState) -> bool:
            key = id(pred)
            if key in self._branch_preds:
                if key not in pred_cache:
                    pred_cache[key] = self._eval_pred(pred, snapshot, outcomes)
                return pred_cache[key]
            # Else-branch guards arrive as a PNot wrapped around the RIf
            # predicate by the checker; share the wrapped evaluation.
            assert isinstance(pred, PNot)
            return not branch_value(pred.arg, snapshot)

        for group in self._stage_groups:
            snapshot = state.snapshot()
            decisions: list[_Decision | None] = []
            for node_id in group:
                app = config.applications[node_id]
                if not all(branch_value(p, snapshot) for p in app.guard):
                    decisions.append(None)
                    continue
                decisions.append(
                    self._lookup(snapshot, node_id, outcomes, state.trace)
                )
            for decision in decisions:
                if decision is not None:
                    self._commit(state, decision)
        return self._egress(state)

    def _egress(self, state: PacketState) -> Verdict:
        data = state.deparse()
        to_cpu = state.metadata_field(TO_CPU_FIELD)
        if to_cpu is not None and state.read_field(to_cpu) != 0:
            state.trace.append(trace.deparse_event(state.payload_bits, len(data), None))
            return Verdict(TO_CPU, None, data, tuple(state.trace))
        egress_spec = self._meta_field(EGRESS_SPEC)
        if state.is_defined(egress_spec):
            egress = state.read_field(egress_spec)
            state.trace.append(
                trace.deparse_event(state.payload_bits, len(data), egress)
            )
            return Verdict(EGRESS, egress, data, tuple(state.trace))
        state.trace.append(trace.deparse_event(state.payload_bits, len(data), None))
        return Verdict(DROP, None, data, tuple(state.trace))


def new_switch(config: TargetConfig) -> Switch:
    """Instantiate a switch from a loaded target configuration."""
    return Switch(config)


def _branch_pred_ids(stmts: tuple[RStmt, ...]) -> frozenset[int]:
    """Identities of every RIf predicate object in the control body.

    Guard conjunctions share these objects: then-branch guards carry the
    predicate itself, else-branch guards carry one PNot around it. The
    staged executor keys its once-per-packet evaluation cache on them.
    """
    ids: set[int] = set()

    def walk(body: tuple[RStmt, ...]) -> None:
        for stmt in body:
            if isinstance(stmt, RIf):
                ids.add(id(stmt.pred))
                walk(stmt.then_body)
                walk(stmt.else_body)

    walk(stmts)
    return frozenset(ids)


def _may_error(config: TargetConfig, table_name: str) -> bool:
    """True when some action of the table can fault at runtime.

    Field-writing primitives fault when an operand names an invalid header;
    metadata is always valid, so only non-metadata operands can fault. A
    fault writes metadata.ingress_error without that write appearing in the
    action body, so stage grouping must treat it as a potential write.
    """
    spec = config.table(table_name)
    assert spec is not None
    meta = config.metadata.name
    for name in spec.actions:
        action = config.action(name)
        assert action is not None
        for call in action.body:
            if call.name in ("add_header", "remove_header"):
                continue
            for arg in call.args:
                if isinstance(arg, FieldRef) and arg.header != meta:
                    return True
    return False


def _pipeline_stages(config: TargetConfig) -> list[list[int]]:
    """Stage groups for the pipeline executor, in execution order.

    Grouping starts from the dependency graph plus two families of
    equivalence constraints the classified edges do not carry:

    - a node stays at or before any later node whose writes (including a
      potential fault write of ingress_error) overlap its match, guard, or
      action reads; overwriting must not migrate ahead of the read it
      would disturb (weight 0 suffices: same-stage lookups read the
      pre-stage snapshot and commits keep control order);
    - a node whose match or guard reads ingress_error goes strictly after
      any earlier node that can fault, since the fault write is invisible
      to the dependency classification.
    """
    graph = tdg_mod.build_tdg(config)
    nodes = graph.nodes
    count = len(nodes)
    error_atom = ("field", config.metadata.name, "ingress_error")
    fault = [_may_error(config, node.table) for node in nodes]
    weights: dict[tuple[int, int], int] = {}
    for edge in graph.edges:
        weight = 0 if edge.kind == tdg_mod.PREDICATION else 1
        key = (edge.src, edge.dst)
        weights[key] = max(weights.get(key, 0), weight)
    for i in range(count):
        reads_i = nodes[i].match_reads | nodes[i].predicate_atoms | nodes[i].action_reads
        for j in range(i + 1, count):
            writes_j = set(nodes[j].writes)
            if fault[j]:
                writes_j.add(error_atom)
            if reads_i & writes_j:
                weights.setdefault((i, j), 0)
            if fault[i] and error_atom in (
                nodes[j].match_reads | nodes[j].predicate_atoms
            ):
                weights[(i, j)] = max(weights.get((i, j), 0), 1)
    stage = [0] * count
    for j in range(count):
        stage[j] = max(
            (stage[i] + w for (i, jj), w in weights.items() if jj == j),
            default=0,
        )
    groups: dict[int, list[int]] = {}
    for node_id, value in enumerate(stage):
        groups.setdefault(value, []).append(node_id)
    return [groups[value] for value in sorted(groups)]
