"""Target configuration: the serialized contract between compiler and switch.

A TargetConfig is self-contained: the engine executes it without access to
the source program. Serialization is JSON with a fixed key order (two
compiles of the same source are byte-identical); every packet/field value
and mask is rendered as a 0x-hex string so widths beyond JSON's 53-bit
number range are safe and golden files diff cleanly.

Only tables the control program actually applies (and the actions those
tables list) are emitted; a program whose control body is empty compiles to
a parser-only configuration.

The schema is documented in docs/formats.md. Format version: "p4mc-1".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .errors import InternalInconsistency, MalformedConfig
from .parser_compiler import (
    ParserProgram,
    StateExtraction,
    StateTableEntry,
    deparse_order,
)
from .semantics import (
    Application,
    CheckedProgram,
    Const,
    FieldRef,
    HeaderLayout,
    HeaderRef,
    Operand,
    PAnd,
    PDefined,
    PEq,
    PMiss,
    PNot,
    POr,
    PValid,
    Param,
    RApply,
    RCall,
    RIf,
    ReadKey,
    RPred,
    RStmt,
    STANDARD_METADATA,
    action_param_signature,
    derive_applications,
)
from .tdg import StageAssignment, Tdg

VERSION = "p4mc-1"


@dataclass(frozen=True)
class ConfigTable:
    name: str
    reads: tuple[ReadKey, ...]
    actions: tuple[str, ...]
    max_size: int
    stage: int  # stage of the table's first application


@dataclass(frozen=True)
class ConfigAction:
    name: str
    params: tuple[tuple[str, int], ...]  # (name, inferred width)
    body: tuple[RCall, ...]


@dataclass(frozen=True)
class TargetConfig:
    version: str
    headers: tuple[HeaderLayout, ...]
    metadata: HeaderLayout
    parser_start: str
    parser_rows: tuple[StateTableEntry, ...]
    parser_plan: tuple[StateExtraction, ...]
    deparse_order: tuple[str, ...]
    tables: tuple[ConfigTable, ...]
    actions: tuple[ConfigAction, ...]
    entry: str
    control_body: tuple[RStmt, ...]
    applications: tuple[Application, ...]
    node_stages: tuple[int, ...]  # indexed by node_id
    stage_count: int

    def parser_program(self) -> ParserProgram:
        return ParserProgram(
            self.parser_rows,
            {e.state: e for e in self.parser_plan},
            self.parser_start,
        )

    def header(self, name: str) -> HeaderLayout | None:
        if name == self.metadata.name:
            return self.metadata
        for h in self.headers:
            if h.name == name:
                return h
        return None

    def table(self, name: str) -> ConfigTable | None:
        for t in self.tables:
            if t.name == name:
                return t
        return None

    def action(self, name: str) -> ConfigAction | None:
        for a in self.actions:
            if a.name == name:
                return a
        return None


def emit(
    prog: CheckedProgram, pp: ParserProgram, tdg: Tdg, stages: StageAssignment
) -> TargetConfig:
    """Assemble compiled artifacts; raises InternalInconsistency when the
    pieces were not derived from the same program."""
    apps = derive_applications(prog.control_body)
    if apps != prog.applications:
        raise InternalInconsistency("control body and application list disagree")
    if len(tdg.nodes) != len(apps):
        raise InternalInconsistency(
            f"dependency graph has {len(tdg.nodes)} nodes, control has {len(apps)}"
        )
    for node, app in zip(tdg.nodes, apps):
        if node.node_id != app.node_id or node.table != app.table:
            raise InternalInconsistency(
                f"dependency node {node.name!r} does not match application "
                f"{app.label!r}"
            )
        if prog.table(node.table) is None:
            raise InternalInconsistency(f"dependency node on unknown table {node.table!r}")
    if set(stages.stages) != {a.node_id for a in apps}:
        raise InternalInconsistency("stage assignment does not cover the applications")
    state_names = {s.name for s in prog.parser_states}
    for state in pp.plan:
        if state not in state_names:
            raise InternalInconsistency(f"parser plan mentions unknown state {state!r}")

    node_stages = tuple(stages.stages[a.node_id] for a in apps)
    applied = {a.table for a in apps}
    first_stage: dict[str, int] = {}
    for app in apps:
        first_stage.setdefault(app.table, stages.stages[app.node_id])
    tables = tuple(
        ConfigTable(t.name, t.reads, t.actions, t.max_size, first_stage[t.name])
        for t in prog.tables
        if t.name in applied
    )
    used_actions = {name for t in tables for name in t.actions}
    actions = tuple(
        ConfigAction(a.name, tuple(action_param_signature(prog, a.name)), a.body)
        for a in prog.actions
        if a.name in used_actions
    )
    plan = tuple(pp.plan[s.name] for s in prog.parser_states)
    return TargetConfig(
        version=VERSION,
        headers=prog.headers,
        metadata=prog.metadata,
        parser_start=pp.start,
        parser_rows=pp.entries,
        parser_plan=plan,
        deparse_order=tuple(deparse_order(prog)),
        tables=tables,
        actions=actions,
        entry=prog.entry,
        control_body=prog.control_body,
        applications=apps,
        node_stages=node_stages,
        stage_count=stages.depth,
    )


# -- serialization ------------------------------------------------------------


def _hex(value: int) -> str:
    return f"{value:#x}"


def _operand_json(op: Operand) -> dict[str, Any]:
    if isinstance(op, Const):
        return {"kind": "const", "value": _hex(op.value)}
    if isinstance(op, Param):
        return {"kind": "param", "name": op.name, "index": op.index}
    if isinstance(op, FieldRef):
        return {"kind": "field", "header": op.header, "field": op.field}
    if isinstance(op, HeaderRef):
        return {"kind": "header", "name": op.name}
    raise InternalInconsistency(f"unknown operand {op!r}")


def _pred_json(pred: RPred) -> dict[str, Any]:
    if isinstance(pred, PDefined):
        return {"defined": {"header": pred.field.header, "field": pred.field.field}}
    if isinstance(pred, PValid):
        return {"valid": pred.header}
    if isinstance(pred, PMiss):
        return {"miss": {"table": pred.table, "node": pred.node_id}}
    if isinstance(pred, PEq):
        return {
            "eq": {
                "header": pred.field.header,
                "field": pred.field.field,
                "value": _hex(pred.value),
            }
        }
    if isinstance(pred, PNot):
        return {"not": _pred_json(pred.arg)}
    if isinstance(pred, PAnd):
        return {"and": [_pred_json(pred.left), _pred_json(pred.right)]}
    if isinstance(pred, POr):
        return {"or": [_pred_json(pred.left), _pred_json(pred.right)]}
    raise InternalInconsistency(f"unknown predicate {pred!r}")


def _stmt_json(stmt: RStmt) -> dict[str, Any]:
    if isinstance(stmt, RApply):
        return {"apply": {"node": stmt.node_id, "table": stmt.table}}
    return {
        "if": {
            "pred": _pred_json(stmt.pred),
            "then": [_stmt_json(s) for s in stmt.then_body],
            "else": [_stmt_json(s) for s in stmt.else_body],
        }
    }


def to_json(cfg: TargetConfig) -> dict[str, Any]:
    return {
        "version": cfg.version,
        "headers": [
            {
                "name": h.name,
                "fields": [
                    {"name": f.field, "offset": f.offset, "width": f.width}
                    for f in h.fields
                ],
            }
            for h in cfg.headers
        ],
        "metadata": {
            "fields": [
                {"name": f.field, "offset": f.offset, "width": f.width}
                for f in cfg.metadata.fields
            ]
        },
        "parser": {
            "start": cfg.parser_start,
            "rows": [
                {
                    "state": r.current_state,
                    "value": _hex(r.lookup_value),
                    "mask": _hex(r.lookup_mask),
                    "next": r.next_state,
                    "priority": r.priority,
                }
                for r in cfg.parser_rows
            ],
            "plan": [
                {
                    "state": e.state,
                    "header": e.header,
                    "header_width": e.header_width,
                    "select_offset": e.select_offset,
                    "select_width": e.select_width,
                }
                for e in cfg.parser_plan
            ],
        },
        "deparse_order": list(cfg.deparse_order),
        "tables": [
            {
                "name": t.name,
                "reads": [
                    {
                        "kind": k.kind,
                        "header": k.header,
                        "field": k.field.field if k.field else None,
                    }
                    for k in t.reads
                ],
                "actions": list(t.actions),
                "max_size": t.max_size,
                "stage": t.stage,
            }
            for t in cfg.tables
        ],
        "actions": [
            {
                "name": a.name,
                "params": [{"name": n, "width": w} for n, w in a.params],
                "body": [
                    {"op": c.name, "args": [_operand_json(op) for op in c.args]}
                    for c in a.body
                ],
            }
            for a in cfg.actions
        ],
        "control": {
            "entry": cfg.entry,
            "body": [_stmt_json(s) for s in cfg.control_body],
        },
        "stages": {
            "count": cfg.stage_count,
            "nodes": [
                {
                    "node": a.node_id,
                    "label": a.label,
                    "table": a.table,
                    "stage": cfg.node_stages[a.node_id],
                }
                for a in cfg.applications
            ],
        },
    }


def dumps(cfg: TargetConfig) -> str:
    return json.dumps(to_json(cfg), indent=2) + "\n"


# -- deserialization -----------------------------------------------------------


class _Reader:
    """JSON navigation that reports a path with every complaint."""

    def __init__(self, data: Any):
        self.data = data

    @staticmethod
    def fail(kind: str, path: str, message: str) -> "MalformedConfig":
        return MalformedConfig(kind, path, message)

    def get(self, obj: Any, key: str, path: str, typ: type | tuple) -> Any:
        if not isinstance(obj, dict):
            raise self.fail("schema", path, "expected an object")
        if key not in obj:
            raise self.fail("schema", f"{path}.{key}" if path else key, "missing key")
        value = obj[key]
        child = f"{path}.{key}" if path else key
        if not isinstance(value, typ) or isinstance(value, bool):
            raise self.fail("schema", child, f"expected {getattr(typ, '__name__', typ)}")
        return value

    def get_list(self, obj: Any, key: str, path: str) -> list:
        return self.get(obj, key, path, list)

    def hex_int(self, obj: Any, key: str, path: str) -> int:
        raw = self.get(obj, key, path, str)
        child = f"{path}.{key}" if path else key
        if not raw.startswith("0x"):
            raise self.fail("schema", child, f"expected 0x-hex string, got {raw!r}")
        try:
            return int(raw, 16)
        except ValueError:
            raise self.fail("schema", child, f"bad hex literal {raw!r}") from None

    def opt(self, obj: Any, key: str, path: str, typ: type) -> Any:
        value = self.get(obj, key, path, (typ, type(None)))
        return value


def _load_layout(r: _Reader, obj: Any, name: str, path: str) -> HeaderLayout:
    fields = []
    offset = 0
    for i, f in enumerate(r.get_list(obj, "fields", path)):
        fpath = f"{path}.fields[{i}]"
        fname = r.get(f, "name", fpath, str)
        width = r.get(f, "width", fpath, int)
        declared_offset = r.get(f, "offset", fpath, int)
        if width < 1:
            raise r.fail("schema", f"{fpath}.width", "width must be positive")
        if declared_offset != offset:
            raise r.fail(
                "schema",
                f"{fpath}.offset",
                f"offset {declared_offset} does not match running sum {offset}",
            )
        fields.append(FieldRef(name, fname, offset, width))
        offset += width
    return HeaderLayout(name, tuple(fields), offset)


def loads(data: str | bytes) -> TargetConfig:
    """Parse and validate a serialized config; inverse of dumps."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedConfig("schema", "", f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedConfig("schema", "", f"not valid JSON: {exc}") from None
    r = _Reader(doc)
    if not isinstance(doc, dict):
        raise r.fail("schema", "", "top level must be an object")
    version = r.get(doc, "version", "", str)
    if version != VERSION:
        raise r.fail("version", "version", f"unsupported version {version!r}")

    headers: list[HeaderLayout] = []
    header_names: set[str] = set()
    for i, h in enumerate(r.get_list(doc, "headers", "")):
        path = f"headers[{i}]"
        name = r.get(h, "name", path, str)
        if name in header_names:
            raise r.fail("schema", f"{path}.name", f"duplicate header {name!r}")
        header_names.add(name)
        headers.append(_load_layout(r, h, name, path))

    metadata = _load_layout(r, r.get(doc, "metadata", "", dict), "metadata", "metadata")
    std = metadata.fields[: len(STANDARD_METADATA)]
    if [(f.field, f.width) for f in std] != list(STANDARD_METADATA):
        raise r.fail(
            "schema", "metadata.fields", "must begin with the standard fields"
        )

    def resolve_header(name: str, path: str) -> HeaderLayout:
        if name == "metadata":
            return metadata
        for h in headers:
            if h.name == name:
                return h
        raise r.fail("reference", path, f"unknown header {name!r}")

    def resolve_field(hname: str, fname: str, path: str) -> FieldRef:
        layout = resolve_header(hname, path)
        fld = layout.find(fname)
        if fld is None:
            raise r.fail("reference", path, f"header {hname!r} has no field {fname!r}")
        return fld

    parser_obj = r.get(doc, "parser", "", dict)
    parser_start = r.get(parser_obj, "start", "parser", str)
    plan: list[StateExtraction] = []
    plan_states: set[str] = set()
    for i, e in enumerate(r.get_list(parser_obj, "plan", "parser")):
        path = f"parser.plan[{i}]"
        state = r.get(e, "state", path, str)
        if state in plan_states:
            raise r.fail("schema", f"{path}.state", f"duplicate state {state!r}")
        plan_states.add(state)
        header = r.opt(e, "header", path, str)
        header_width = r.get(e, "header_width", path, int)
        if header is not None:
            layout = resolve_header(header, f"{path}.header")
            if layout.width != header_width:
                raise r.fail(
                    "schema",
                    f"{path}.header_width",
                    f"header {header!r} is {layout.width} bits, not {header_width}",
                )
        elif header_width != 0:
            raise r.fail("schema", f"{path}.header_width", "must be 0 without a header")
        select_offset = r.opt(e, "select_offset", path, int)
        select_width = r.opt(e, "select_width", path, int)
        if (select_offset is None) != (select_width is None):
            raise r.fail(
                "schema", path, "select_offset and select_width must appear together"
            )
        if select_width is not None and select_offset + select_width > header_width:
            raise r.fail("schema", path, "select field exceeds the header")
        plan.append(
            StateExtraction(state, header, header_width, select_offset, select_width)
        )
    if parser_start not in plan_states:
        raise r.fail("reference", "parser.start", f"unknown state {parser_start!r}")

    rows: list[StateTableEntry] = []
    for i, row in enumerate(r.get_list(parser_obj, "rows", "parser")):
        path = f"parser.rows[{i}]"
        state = r.get(row, "state", path, str)
        if state not in plan_states:
            raise r.fail("reference", f"{path}.state", f"unknown state {state!r}")
        nxt = r.get(row, "next", path, str)
        if nxt != "stop" and nxt not in plan_states:
            raise r.fail("reference", f"{path}.next", f"unknown state {nxt!r}")
        rows.append(
            StateTableEntry(
                state,
                r.hex_int(row, "value", path),
                r.hex_int(row, "mask", path),
                nxt,
                r.get(row, "priority", path, int),
            )
        )

    deparse: list[str] = []
    for i, name in enumerate(r.get_list(doc, "deparse_order", "")):
        path = f"deparse_order[{i}]"
        if not isinstance(name, str):
            raise r.fail("schema", path, "expected header name")
        resolve_header(name, path)
        deparse.append(name)

    actions: list[ConfigAction] = []
    action_names: set[str] = set()
    for i, a in enumerate(r.get_list(doc, "actions", "")):
        path = f"actions[{i}]"
        name = r.get(a, "name", path, str)
        if name in action_names:
            raise r.fail("schema", f"{path}.name", f"duplicate action {name!r}")
        action_names.add(name)
        params: list[tuple[str, int]] = []
        for j, p in enumerate(r.get_list(a, "params", path)):
            ppath = f"{path}.params[{j}]"
            params.append((r.get(p, "name", ppath, str), r.get(p, "width", ppath, int)))
        param_index = {pname: idx for idx, (pname, _w) in enumerate(params)}
        body: list[RCall] = []
        for j, c in enumerate(r.get_list(a, "body", path)):
            cpath = f"{path}.body[{j}]"
            op = r.get(c, "op", cpath, str)
            args: list[Operand] = []
            for k, arg in enumerate(r.get_list(c, "args", cpath)):
                apath = f"{cpath}.args[{k}]"
                kind = r.get(arg, "kind", apath, str)
                if kind == "const":
                    args.append(Const(r.hex_int(arg, "value", apath)))
                elif kind == "param":
                    pname = r.get(arg, "name", apath, str)
                    index = r.get(arg, "index", apath, int)
                    if param_index.get(pname) != index:
                        raise r.fail(
                            "reference", apath, f"action has no param {pname!r} at {index}"
                        )
                    args.append(Param(pname, index))
                elif kind == "field":
                    args.append(
                        resolve_field(
                            r.get(arg, "header", apath, str),
                            r.get(arg, "field", apath, str),
                            apath,
                        )
                    )
                elif kind == "header":
                    hname = r.get(arg, "name", apath, str)
                    resolve_header(hname, apath)
                    args.append(HeaderRef(hname))
                else:
                    raise r.fail("schema", f"{apath}.kind", f"unknown kind {kind!r}")
            body.append(RCall(op, tuple(args)))
        actions.append(ConfigAction(name, tuple(params), tuple(body)))

    tables: list[ConfigTable] = []
    table_names: set[str] = set()
    for i, t in enumerate(r.get_list(doc, "tables", "")):
        path = f"tables[{i}]"
        name = r.get(t, "name", path, str)
        if name in table_names:
            raise r.fail("schema", f"{path}.name", f"duplicate table {name!r}")
        table_names.add(name)
        reads: list[ReadKey] = []
        for j, k in enumerate(r.get_list(t, "reads", path)):
            kpath = f"{path}.reads[{j}]"
            kind = r.get(k, "kind", kpath, str)
            if kind not in ("exact", "ternary", "lpm", "valid"):
                raise r.fail("schema", f"{kpath}.kind", f"unknown match kind {kind!r}")
            hname = r.get(k, "header", kpath, str)
            fname = r.opt(k, "field", kpath, str)
            if kind == "valid":
                if fname is not None:
                    raise r.fail("schema", f"{kpath}.field", "valid match takes no field")
                resolve_header(hname, kpath)
                reads.append(ReadKey("valid", hname, None))
            else:
                if fname is None:
                    raise r.fail("schema", f"{kpath}.field", "field required")
                fld = resolve_field(hname, fname, kpath)
                reads.append(ReadKey(kind, hname, fld))
        acts: list[str] = []
        for j, aname in enumerate(r.get_list(t, "actions", path)):
            apath = f"{path}.actions[{j}]"
            if not isinstance(aname, str):
                raise r.fail("schema", apath, "expected action name")
            if aname not in action_names:
                raise r.fail("reference", apath, f"unknown action {aname!r}")
            acts.append(aname)
        max_size = r.get(t, "max_size", path, int)
        if max_size < 1:
            raise r.fail("schema", f"{path}.max_size", "must be positive")
        stage = r.get(t, "stage", path, int)
        tables.append(ConfigTable(name, tuple(reads), tuple(acts), max_size, stage))

    control_obj = r.get(doc, "control", "", dict)
    entry = r.get(control_obj, "entry", "control", str)
    next_node = 0

    def load_pred(obj: Any, path: str) -> RPred:
        if not isinstance(obj, dict) or len(obj) != 1:
            raise r.fail("schema", path, "predicate must be a single-key object")
        kind, payload = next(iter(obj.items()))
        if kind == "defined":
            return PDefined(
                resolve_field(
                    r.get(payload, "header", path, str),
                    r.get(payload, "field", path, str),
                    path,
                )
            )
        if kind == "valid":
            if not isinstance(payload, str):
                raise r.fail("schema", path, "valid takes a header name")
            resolve_header(payload, path)
            return PValid(payload)
        if kind == "miss":
            table = r.get(payload, "table", path, str)
            if table not in table_names:
                raise r.fail("reference", path, f"unknown table {table!r}")
            return PMiss(table, r.get(payload, "node", path, int))
        if kind == "eq":
            fld = resolve_field(
                r.get(payload, "header", path, str),
                r.get(payload, "field", path, str),
                path,
            )
            return PEq(fld, r.hex_int(payload, "value", path))
        if kind == "not":
            return PNot(load_pred(payload, f"{path}.not"))
        if kind in ("and", "or"):
            if not isinstance(payload, list) or len(payload) != 2:
                raise r.fail("schema", path, f"{kind} takes two operands")
            left = load_pred(payload[0], f"{path}.{kind}[0]")
            right = load_pred(payload[1], f"{path}.{kind}[1]")
            return PAnd(left, right) if kind == "and" else POr(left, right)
        raise r.fail("schema", path, f"unknown predicate kind {kind!r}")

    def load_stmts(items: Any, path: str) -> tuple[RStmt, ...]:
        nonlocal next_node
        if not isinstance(items, list):
            raise r.fail("schema", path, "expected statement list")
        out: list[RStmt] = []
        for i, s in enumerate(items):
            spath = f"{path}[{i}]"
            if not isinstance(s, dict) or len(s) != 1:
                raise r.fail("schema", spath, "statement must be a single-key object")
            kind, payload = next(iter(s.items()))
            if kind == "apply":
                table = r.get(payload, "table", spath, str)
                if table not in table_names:
                    raise r.fail("reference", f"{spath}.table", f"unknown table {table!r}")
                node = r.get(payload, "node", spath, int)
                if node != next_node:
                    raise r.fail(
                        "schema",
                        f"{spath}.node",
                        f"node ids must be pre-order; expected {next_node}, got {node}",
                    )
                next_node += 1
                out.append(RApply(node, table))
            elif kind == "if":
                pred = load_pred(r.get(payload, "pred", spath, dict), f"{spath}.pred")
                then_body = load_stmts(r.get_list(payload, "then", spath), f"{spath}.then")
                else_body = load_stmts(r.get_list(payload, "else", spath), f"{spath}.else")
                out.append(RIf(pred, then_body, else_body))
            else:
                raise r.fail("schema", spath, f"unknown statement kind {kind!r}")
        return tuple(out)

    control_body = load_stmts(r.get_list(control_obj, "body", "control"), "control.body")
    applications = derive_applications(control_body)
    app_ids = {a.node_id for a in applications}

    def check_miss(pred: RPred, path: str) -> None:
        if isinstance(pred, PMiss):
            if pred.node_id not in app_ids:
                raise r.fail("reference", path, f"miss() bound to unknown node {pred.node_id}")
        elif isinstance(pred, PNot):
            check_miss(pred.arg, path)
        elif isinstance(pred, (PAnd, POr)):
            check_miss(pred.left, path)
            check_miss(pred.right, path)

    def sweep(stmts: tuple[RStmt, ...], path: str) -> None:
        for i, stmt in enumerate(stmts):
            if isinstance(stmt, RIf):
                check_miss(stmt.pred, f"{path}[{i}].pred")
                sweep(stmt.then_body, f"{path}[{i}].then")
                sweep(stmt.else_body, f"{path}[{i}].else")

    sweep(control_body, "control.body")

    stages_obj = r.get(doc, "stages", "", dict)
    stage_count = r.get(stages_obj, "count", "stages", int)
    node_stage_map: dict[int, int] = {}
    labels = {a.node_id: a.label for a in applications}
    for i, n in enumerate(r.get_list(stages_obj, "nodes", "stages")):
        path = f"stages.nodes[{i}]"
        node = r.get(n, "node", path, int)
        if node not in app_ids:
            raise r.fail("reference", f"{path}.node", f"unknown node {node}")
        if node in node_stage_map:
            raise r.fail("schema", f"{path}.node", f"duplicate node {node}")
        label = r.get(n, "label", path, str)
        if label != labels[node]:
            raise r.fail(
                "schema", f"{path}.label", f"expected {labels[node]!r}, got {label!r}"
            )
        table = r.get(n, "table", path, str)
        if table != applications[node].table:
            raise r.fail("schema", f"{path}.table", "does not match the application")
        node_stage_map[node] = r.get(n, "stage", path, int)
    if set(node_stage_map) != app_ids:
        raise r.fail("schema", "stages.nodes", "must cover every application exactly once")
    node_stages = tuple(node_stage_map[a.node_id] for a in applications)

    # control must only apply tables the config carries, and vice versa the
    # tables' stage entries must match the stage table
    applied = {a.table for a in applications}
    for i, t in enumerate(tables):
        if t.name not in applied:
            raise r.fail(
                "reference", f"tables[{i}].name", f"table {t.name!r} is never applied"
            )
        first = next(a for a in applications if a.table == t.name)
        if node_stage_map[first.node_id] != t.stage:
            raise r.fail(
                "schema",
                f"tables[{i}].stage",
                "does not match the stage of the table's first application",
            )

    return TargetConfig(
        version=version,
        headers=tuple(headers),
        metadata=metadata,
        parser_start=parser_start,
        parser_rows=tuple(rows),
        parser_plan=tuple(plan),
        deparse_order=tuple(deparse),
        tables=tuple(tables),
        actions=tuple(actions),
        entry=entry,
        control_body=control_body,
        applications=applications,
        node_stages=node_stages,
        stage_count=stage_count,
    )


def load(data: bytes) -> TargetConfig:
    return loads(data)
