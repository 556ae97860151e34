"""Name resolution and type checking.

Turns a frontend Ast into a CheckedProgram: a span-free, fully resolved
representation that the parser compiler, dependency analysis, config emitter
and the switch runtime all consume directly. Every diagnostic found is
collected; SemanticError carries the complete list.

Naming rules:
- headers, parser states, tables, actions and controls each live in their
  own namespace (a parser state deliberately shares its header's name)
- `metadata` is a reserved always-valid pseudo-header holding the three
  standard fields (ingress_port:16, egress_spec:16, ingress_error:1)
  followed by any program-declared extras
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Union

from .errors import Diagnostic, SemanticError, Span, UnknownAction
from .frontend import ast

METADATA = "metadata"

# (name, width) of the always-present metadata fields, in layout order.
STANDARD_METADATA = (("ingress_port", 16), ("egress_spec", 16), ("ingress_error", 1))

PARAM_DEFAULT_WIDTH = 64


@dataclass(frozen=True)
class FieldRef:
    """A resolved field: owning header, bit offset within it, bit width."""

    header: str
    field: str
    offset: int
    width: int

    def __str__(self) -> str:
        return f"{self.header}.{self.field}"


@dataclass(frozen=True)
class HeaderLayout:
    name: str
    fields: tuple[FieldRef, ...]
    width: int  # total bits

    def find(self, name: str) -> FieldRef | None:
        for f in self.fields:
            if f.field == name:
                return f
        return None


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Param:
    name: str
    index: int  # position in the action's parameter list


@dataclass(frozen=True)
class HeaderRef:
    name: str


Operand = Union[Const, Param, FieldRef, HeaderRef]


@dataclass(frozen=True)
class RCall:
    name: str
    args: tuple[Operand, ...]


@dataclass(frozen=True)
class Action:
    name: str
    params: tuple[str, ...]
    body: tuple[RCall, ...]


@dataclass(frozen=True)
class ReadKey:
    """One table-key component; `field` is None exactly for kind `valid`."""

    kind: str  # exact | ternary | lpm | valid
    header: str
    field: FieldRef | None


@dataclass(frozen=True)
class Table:
    name: str
    reads: tuple[ReadKey, ...]
    actions: tuple[str, ...]
    max_size: int


@dataclass(frozen=True)
class STransition:
    next_state: str  # may be ast.STOP


@dataclass(frozen=True)
class SSwitch:
    field: FieldRef  # select field of the state's own header
    cases: tuple[tuple[int, str], ...]
    default: str | None


@dataclass(frozen=True)
class ParserState:
    name: str
    header: str | None  # None only for `start`
    body: STransition | SSwitch


@dataclass(frozen=True)
class PDefined:
    field: FieldRef


@dataclass(frozen=True)
class PValid:
    header: str


@dataclass(frozen=True)
class PMiss:
    """miss(table), bound to the latest preceding application of `table`."""

    table: str
    node_id: int


@dataclass(frozen=True)
class PEq:
    field: FieldRef
    value: int


@dataclass(frozen=True)
class PNot:
    arg: "RPred"


@dataclass(frozen=True)
class PAnd:
    left: "RPred"
    right: "RPred"


@dataclass(frozen=True)
class POr:
    left: "RPred"
    right: "RPred"


RPred = Union[PDefined, PValid, PMiss, PEq, PNot, PAnd, POr]


@dataclass(frozen=True)
class RApply:
    node_id: int
    table: str


@dataclass(frozen=True)
class RIf:
    pred: RPred
    then_body: tuple["RStmt", ...]
    else_body: tuple["RStmt", ...]


RStmt = Union[RApply, RIf]


@dataclass(frozen=True)
class Application:
    """One table application site, with its accumulated guard conjunction."""

    node_id: int
    table: str
    label: str  # table name; `name__k` for the k-th reapplication
    guard: tuple[RPred, ...]


@dataclass(frozen=True)
class CheckedProgram:
    headers: tuple[HeaderLayout, ...]  # declaration order, metadata excluded
    metadata: HeaderLayout
    parser_states: tuple[ParserState, ...]
    tables: tuple[Table, ...]
    actions: tuple[Action, ...]
    entry: str
    control_body: tuple[RStmt, ...]
    applications: tuple[Application, ...]

    def header(self, name: str) -> HeaderLayout | None:
        if name == METADATA:
            return self.metadata
        for h in self.headers:
            if h.name == name:
                return h
        return None

    def table(self, name: str) -> Table | None:
        for t in self.tables:
            if t.name == name:
                return t
        return None

    def action(self, name: str) -> Action | None:
        for a in self.actions:
            if a.name == name:
                return a
        return None

    def parser_state(self, name: str) -> ParserState | None:
        for s in self.parser_states:
            if s.name == name:
                return s
        return None


def _layout(name: str, specs: list[tuple[str, int]]) -> HeaderLayout:
    fields = []
    offset = 0
    for fname, width in specs:
        fields.append(FieldRef(name, fname, offset, width))
        offset += width
    return HeaderLayout(name, tuple(fields), offset)


class _Checker:
    def __init__(self, tree: ast.Ast):
        self.tree = tree
        self.diagnostics: list[Diagnostic] = []
        self.headers: dict[str, HeaderLayout] = {}
        self.header_order: list[HeaderLayout] = []
        self.metadata: HeaderLayout = _layout(METADATA, list(STANDARD_METADATA))
        self.tables: dict[str, Table] = {}
        self.table_order: list[Table] = []
        self.actions: dict[str, Action] = {}
        self.action_order: list[Action] = []
        self.states: dict[str, ParserState] = {}
        self.state_order: list[ParserState] = []

    def error(self, span: Span, message: str) -> None:
        self.diagnostics.append(Diagnostic(span, message))

    # -- headers ---------------------------------------------------------

    def check_headers(self) -> None:
        for decl in self.tree.headers:
            if decl.name == METADATA:
                self.error(decl.span, f"header name {METADATA!r} is reserved")
                continue
            if decl.name in self.headers:
                self.error(decl.span, f"duplicate header {decl.name!r}")
                continue
            layout = _layout(decl.name, [(f.name, f.width) for f in decl.fields])
            self.headers[decl.name] = layout
            self.header_order.append(layout)

    def check_metadata(self) -> None:
        standard = dict(STANDARD_METADATA)
        extras: list[tuple[str, int]] = []
        extra_widths: dict[str, int] = {}
        for decl in self.tree.metadata:
            for f in decl.fields:
                if f.name in standard:
                    if f.width != standard[f.name]:
                        self.error(
                            f.span,
                            f"metadata field {f.name!r} is standard with width "
                            f"{standard[f.name]}, cannot redeclare as {f.width}",
                        )
                    continue
                if f.name in extra_widths:
                    if f.width != extra_widths[f.name]:
                        self.error(
                            f.span,
                            f"metadata field {f.name!r} redeclared with width "
                            f"{f.width}, previously {extra_widths[f.name]}",
                        )
                    continue
                extra_widths[f.name] = f.width
                extras.append((f.name, f.width))
        self.metadata = _layout(METADATA, list(STANDARD_METADATA) + extras)

    # -- shared resolution helpers -----------------------------------------

    def resolve_field(self, ref: ast.RefName) -> FieldRef | None:
        if len(ref.parts) != 2:
            self.error(ref.span, f"expected field reference, got {ref}")
            return None
        hname, fname = ref.parts
        layout = self.metadata if hname == METADATA else self.headers.get(hname)
        if layout is None:
            self.error(ref.span, f"unknown header {hname!r}")
            return None
        fld = layout.find(fname)
        if fld is None:
            self.error(ref.span, f"header {hname!r} has no field {fname!r}")
            return None
        return fld

    def resolve_header(self, ref: ast.RefName, context: str) -> str | None:
        if len(ref.parts) != 1:
            self.error(ref.span, f"expected header reference in {context}, got {ref}")
            return None
        name = ref.parts[0]
        if name == METADATA:
            self.error(ref.span, f"{context} cannot name {METADATA!r}")
            return None
        if name not in self.headers:
            self.error(ref.span, f"unknown header {name!r}")
            return None
        return name

    def check_const_width(self, span: Span, value: int, fld: FieldRef, what: str) -> None:
        if value >= 1 << fld.width:
            self.error(
                span,
                f"{what} {value:#x} does not fit field {fld} of width {fld.width}",
            )

    # -- parser states ------------------------------------------------------

    def check_parsers(self) -> None:
        for decl in self.tree.parsers:
            if decl.name in self.states:
                self.error(decl.span, f"duplicate parser state {decl.name!r}")
                continue
            header: str | None
            if decl.name == "start":
                header = None
            elif decl.name in self.headers:
                header = decl.name
            else:
                self.error(
                    decl.span,
                    f"parser state {decl.name!r} has no matching header declaration",
                )
                continue
            body: STransition | SSwitch
            if isinstance(decl.body, ast.TransitionBody):
                body = STransition(decl.body.next_state)
            else:
                if header is None:
                    self.error(decl.span, "state 'start' extracts no header and cannot switch")
                    continue
                layout = self.headers[header]
                fld = layout.find(decl.body.field)
                if fld is None:
                    self.error(
                        decl.span,
                        f"header {header!r} has no field {decl.body.field!r} to switch on",
                    )
                    continue
                for case in decl.body.cases:
                    if case.value >= 1 << fld.width:
                        self.error(
                            case.span,
                            f"case constant {case.value:#x} does not fit "
                            f"field {fld} of width {fld.width}",
                        )
                body = SSwitch(
                    fld,
                    tuple((c.value, c.next_state) for c in decl.body.cases),
                    decl.body.default,
                )
            state = ParserState(decl.name, header, body)
            self.states[decl.name] = state
            self.state_order.append(state)

    # -- tables ----------------------------------------------------------------

    def check_tables(self) -> None:
        declared_actions = {a.name for a in self.tree.actions}
        for decl in self.tree.tables:
            if decl.name in self.tables:
                self.error(decl.span, f"duplicate table {decl.name!r}")
                continue
            reads: list[ReadKey] = []
            for spec in decl.reads:
                if spec.kind == "valid":
                    header = self.resolve_header(spec.target, "valid match")
                    if header is not None:
                        reads.append(ReadKey("valid", header, None))
                else:
                    fld = self.resolve_field(spec.target)
                    if fld is not None:
                        reads.append(ReadKey(spec.kind, fld.header, fld))
            actions: list[str] = []
            for name in decl.actions:
                if name not in declared_actions:
                    self.error(decl.span, f"table {decl.name!r} lists unknown action {name!r}")
                    continue
                if name in actions:
                    self.error(decl.span, f"table {decl.name!r} lists action {name!r} twice")
                    continue
                actions.append(name)
            table = Table(decl.name, tuple(reads), tuple(actions), decl.max_size)
            self.tables[decl.name] = table
            self.table_order.append(table)

    # -- actions ------------------------------------------------------------------

    def _value_operand(self, call_name: str, arg: ast.Arg, params: dict[str, int],
                       fld: FieldRef | None, what: str) -> Operand | None:
        """Resolve a value/mask/delta position: integer constant or parameter."""
        if isinstance(arg, ast.ConstArg):
            if fld is not None:
                self.check_const_width(arg.span, arg.value, fld, what)
            return Const(arg.value)
        ref = arg.ref
        if len(ref.parts) == 1 and ref.parts[0] in params:
            return Param(ref.parts[0], params[ref.parts[0]])
        self.error(
            ref.span,
            f"{call_name} {what} must be an integer or a parameter, got {ref}",
        )
        return None

    def _field_operand(self, arg: ast.Arg, what: str) -> FieldRef | None:
        if isinstance(arg, ast.ConstArg):
            self.error(arg.span, f"expected field reference for {what}, got integer")
            return None
        return self.resolve_field(arg.ref)

    def check_actions(self) -> None:
        for decl in self.tree.actions:
            if decl.name in self.actions:
                self.error(decl.span, f"duplicate action {decl.name!r}")
                continue
            params = {name: i for i, name in enumerate(decl.params)}
            body: list[RCall] = []
            ok = True
            for call in decl.body:
                rcall = self.check_call(call, params)
                if rcall is None:
                    ok = False
                else:
                    body.append(rcall)
            if not ok:
                continue
            action = Action(decl.name, tuple(decl.params), tuple(body))
            self.actions[decl.name] = action
            self.action_order.append(action)

    def check_call(self, call: ast.PrimitiveCall, params: dict[str, int]) -> RCall | None:
        name = call.name
        args = call.args

        def arity_error(expected: str) -> None:
            self.error(call.span, f"{name} takes {expected} arguments, got {len(args)}")

        if name == "set_field":
            if len(args) not in (2, 3):
                arity_error("2 or 3")
                return None
            fld = self._field_operand(args[0], "set_field target")
            if fld is None:
                return None
            value = self._value_operand(name, args[1], params, fld, "value")
            resolved: list[Operand] = [fld]
            if value is None:
                return None
            resolved.append(value)
            if len(args) == 3:
                mask = self._value_operand(name, args[2], params, fld, "mask")
                if mask is None:
                    return None
                resolved.append(mask)
            return RCall(name, tuple(resolved))
        if name == "copy_field":
            if len(args) != 2:
                arity_error("2")
                return None
            dst = self._field_operand(args[0], "copy_field destination")
            src = self._field_operand(args[1], "copy_field source")
            if dst is None or src is None:
                return None
            return RCall(name, (dst, src))
        if name in ("add_header", "remove_header"):
            if len(args) != 1:
                arity_error("1")
                return None
            arg = args[0]
            if isinstance(arg, ast.ConstArg):
                self.error(arg.span, f"expected header reference for {name}, got integer")
                return None
            header = self.resolve_header(arg.ref, name)
            if header is None:
                return None
            return RCall(name, (HeaderRef(header),))
        if name == "increment":
            if len(args) != 2:
                arity_error("2")
                return None
            fld = self._field_operand(args[0], "increment target")
            if fld is None:
                return None
            # deltas wrap modulo 2**width, so any 64-bit constant is legal
            delta = self._value_operand(name, args[1], params, None, "delta")
            if delta is None:
                return None
            return RCall(name, (fld, delta))
        if name == "checksum":
            if len(args) < 2:
                arity_error("at least 2")
                return None
            target = self._field_operand(args[0], "checksum target")
            sources = [self._field_operand(a, "checksum source") for a in args[1:]]
            if target is None or any(s is None for s in sources):
                return None
            return RCall(name, (target, *sources))
        raise AssertionError(f"parser admitted unknown primitive {name}")

    # -- control -----------------------------------------------------------------

    def check_controls(self) -> tuple[str, tuple[RStmt, ...], tuple[Application, ...]]:
        names: set[str] = set()
        entry_decl: ast.ControlDecl | None = None
        for decl in self.tree.controls:
            if decl.name in names:
                self.error(decl.span, f"duplicate control {decl.name!r}")
                continue
            names.add(decl.name)
            if decl.name == "main":
                entry_decl = decl
        if entry_decl is None:
            if len(self.tree.controls) == 1:
                entry_decl = self.tree.controls[0]
            elif not self.tree.controls:
                self.error(Span(1, 1), "program declares no control")
            else:
                self.error(
                    self.tree.controls[0].span,
                    "multiple controls and none named 'main'; cannot pick an entry",
                )
        entry_body: tuple[RStmt, ...] = ()
        applications: tuple[Application, ...] = ()
        entry_name = entry_decl.name if entry_decl is not None else ""
        for decl in self.tree.controls:
            body, apps = self.check_control_body(decl)
            if decl is entry_decl:
                entry_body, applications = body, apps
        return entry_name, entry_body, applications

    def check_control_body(
        self, decl: ast.ControlDecl
    ) -> tuple[tuple[RStmt, ...], tuple[Application, ...]]:
        applications: list[Application] = []
        last_applied: dict[str, int] = {}
        apply_counts: dict[str, int] = {}

        def walk(stmts: list[ast.Stmt], guard: tuple[RPred, ...]) -> tuple[RStmt, ...]:
            out: list[RStmt] = []
            for stmt in stmts:
                if isinstance(stmt, ast.ApplyStmt):
                    if stmt.table not in self.tables and not any(
                        t.name == stmt.table for t in self.tree.tables
                    ):
                        self.error(stmt.span, f"control applies unknown table {stmt.table!r}")
                        continue
                    node_id = len(applications)
                    count = apply_counts.get(stmt.table, 0) + 1
                    apply_counts[stmt.table] = count
                    label = stmt.table if count == 1 else f"{stmt.table}__{count}"
                    applications.append(Application(node_id, stmt.table, label, guard))
                    last_applied[stmt.table] = node_id
                    out.append(RApply(node_id, stmt.table))
                else:
                    pred = self.check_pred(stmt.pred, stmt.span, last_applied)
                    if pred is None:
                        continue
                    then_body = walk(stmt.then_body, guard + (pred,))
                    else_body = walk(stmt.else_body, guard + (PNot(pred),))
                    out.append(RIf(pred, then_body, else_body))
            return tuple(out)

        body = walk(decl.body, ())
        return body, tuple(applications)

    def check_pred(
        self, pred: ast.Pred, span: Span, last_applied: dict[str, int]
    ) -> RPred | None:
        if isinstance(pred, ast.PredDefined):
            fld = self.resolve_field(pred.ref)
            return None if fld is None else PDefined(fld)
        if isinstance(pred, ast.PredValid):
            header = self.resolve_header(pred.ref, "valid()")
            return None if header is None else PValid(header)
        if isinstance(pred, ast.PredMiss):
            if pred.table not in self.tables and not any(
                t.name == pred.table for t in self.tree.tables
            ):
                self.error(pred.span, f"miss() names unknown table {pred.table!r}")
                return None
            if pred.table not in last_applied:
                self.error(
                    pred.span,
                    f"miss({pred.table}) has no preceding application of {pred.table!r}",
                )
                return None
            return PMiss(pred.table, last_applied[pred.table])
        if isinstance(pred, ast.PredEq):
            fld = self.resolve_field(pred.ref)
            if fld is None:
                return None
            self.check_const_width(pred.ref.span, pred.value, fld, "comparison constant")
            return PEq(fld, pred.value)
        if isinstance(pred, ast.PredNot):
            arg = self.check_pred(pred.arg, span, last_applied)
            return None if arg is None else PNot(arg)
        if isinstance(pred, (ast.PredAnd, ast.PredOr)):
            left = self.check_pred(pred.left, span, last_applied)
            right = self.check_pred(pred.right, span, last_applied)
            if left is None or right is None:
                return None
            ctor = PAnd if isinstance(pred, ast.PredAnd) else POr
            return ctor(left, right)
        raise AssertionError(f"unknown predicate node {pred!r}")

    # -- driver ---------------------------------------------------------------------

    def run(self) -> CheckedProgram:
        self.check_headers()
        self.check_metadata()
        self.check_parsers()
        self.check_actions()
        self.check_tables()
        entry, body, applications = self.check_controls()
        if self.diagnostics:
            ordered = sorted(
                self.diagnostics, key=lambda d: (d.span.line, d.span.col, d.message)
            )
            raise SemanticError(ordered)
        return CheckedProgram(
            headers=tuple(self.header_order),
            metadata=self.metadata,
            parser_states=tuple(self.state_order),
            tables=tuple(self.table_order),
            actions=tuple(self.action_order),
            entry=entry,
            control_body=body,
            applications=applications,
        )


def check(tree: ast.Ast) -> CheckedProgram:
    """Resolve and validate `tree`; raises SemanticError with all findings."""
    return _Checker(tree).run()


def derive_applications(body: tuple[RStmt, ...]) -> tuple[Application, ...]:
    """Rebuild the flattened application list from a resolved control body.

    Pre-order walk mirroring the checker's; given a body produced by check()
    or loaded from a config, this reproduces `CheckedProgram.applications`
    exactly (node ids, labels and guard conjunctions).
    """
    apps: list[Application] = []
    counts: dict[str, int] = {}

    def walk(stmts: tuple[RStmt, ...], guard: tuple[RPred, ...]) -> None:
        for stmt in stmts:
            if isinstance(stmt, RApply):
                count = counts.get(stmt.table, 0) + 1
                counts[stmt.table] = count
                label = stmt.table if count == 1 else f"{stmt.table}__{count}"
                apps.append(Application(stmt.node_id, stmt.table, label, guard))
            else:
                walk(stmt.then_body, guard + (stmt.pred,))
                walk(stmt.else_body, guard + (PNot(stmt.pred),))

    walk(body, ())
    return tuple(apps)


def action_param_signature(prog: CheckedProgram, action: str) -> list[tuple[str, int]]:
    """Ordered (param, width) list; widths inferred from use sites.

    A param used as a set_field value or mask takes the target field's width;
    used at several widths it takes the maximum; never used it defaults to 64
    (increment deltas wrap, so they do not constrain the width downward).
    """
    decl = prog.action(action)
    if decl is None:
        raise UnknownAction(f"unknown action {action!r}")
    widths: dict[str, int] = {}

    def observe(name: str, width: int) -> None:
        widths[name] = max(widths.get(name, 0), width)

    for call in decl.body:
        if call.name == "set_field":
            fld = call.args[0]
            assert isinstance(fld, FieldRef)
            for arg in call.args[1:]:
                if isinstance(arg, Param):
                    observe(arg.name, fld.width)
        elif call.name == "increment":
            fld, delta = call.args
            assert isinstance(fld, FieldRef)
            if isinstance(delta, Param):
                observe(delta.name, fld.width)
    return [(p, widths.get(p, PARAM_DEFAULT_WIDTH)) for p in decl.params]


# Read/write atoms for the intra-action analysis: a field, or a header's
# validity bit. add_header's field zeroing is deliberately not treated as a
# field write (it initializes, it cannot race with a same-action primitive
# in any surprising way), so add_mTag yields exactly its one real conflict.
_FieldAtom = tuple[str, str, str]


def _call_atoms(call: RCall) -> tuple[set[_FieldAtom], set[_FieldAtom]]:
    reads: set[_FieldAtom] = set()
    writes: set[_FieldAtom] = set()

    def fatom(f: FieldRef) -> _FieldAtom:
        return ("field", f.header, f.field)

    if call.name == "set_field":
        writes.add(fatom(call.args[0]))
        if len(call.args) == 3:  # masked variant keeps unmasked bits
            reads.add(fatom(call.args[0]))
    elif call.name == "copy_field":
        writes.add(fatom(call.args[0]))
        reads.add(fatom(call.args[1]))
    elif call.name in ("add_header", "remove_header"):
        header = call.args[0]
        assert isinstance(header, HeaderRef)
        writes.add(("valid", header.name, ""))
    elif call.name == "increment":
        writes.add(fatom(call.args[0]))
        reads.add(fatom(call.args[0]))
    elif call.name == "checksum":
        writes.add(fatom(call.args[0]))
        for src in call.args[1:]:
            reads.add(fatom(src))
    return reads, writes


def _atom_text(atom: _FieldAtom) -> str:
    kind, header, field = atom
    return f"{header}.{field}" if kind == "field" else f"valid({header})"


def validate_action_parallelism(prog: CheckedProgram) -> list[Diagnostic]:
    """Warn on primitive pairs whose parallel execution would be a race.

    Flags every ordered pair (i earlier than j) where one side writes bits
    the other touches. The engine resolves these deterministically with
    two-phase (read-all-then-write-all, listing-order writes) semantics;
    the warnings point out where that choice is observable.
    """
    warnings: list[Diagnostic] = []
    for action in prog.actions:
        effects = [_call_atoms(call) for call in action.body]
        for i in range(len(effects)):
            reads_i, writes_i = effects[i]
            for j in range(i + 1, len(effects)):
                reads_j, writes_j = effects[j]
                for atoms, what in (
                    (reads_i & writes_j, "read, then written"),
                    (writes_i & reads_j, "written, then read"),
                    (writes_i & writes_j, "written twice"),
                ):
                    for atom in sorted(atoms):
                        warnings.append(
                            Diagnostic(
                                Span(0, 0),
                                f"action {action.name!r}: {_atom_text(atom)} is "
                                f"{what} by {action.body[i].name} (#{i + 1}) and "
                                f"{action.body[j].name} (#{j + 1}); parallel "
                                "primitive semantics would be ambiguous, "
                                "two-phase order applies",
                                severity="warning",
                            )
                        )
    return warnings


# -- CheckedProgram -> Ast (for the idempotence property and `p4mc compile --dump`) --


def _pred_to_ast(pred: RPred) -> ast.Pred:
    span = Span(0, 0)
    if isinstance(pred, PDefined):
        return ast.PredDefined(ast.RefName((pred.field.header, pred.field.field), span))
    if isinstance(pred, PValid):
        return ast.PredValid(ast.RefName((pred.header,), span))
    if isinstance(pred, PMiss):
        return ast.PredMiss(pred.table, span)
    if isinstance(pred, PEq):
        return ast.PredEq(ast.RefName((pred.field.header, pred.field.field), span), pred.value)
    if isinstance(pred, PNot):
        return ast.PredNot(_pred_to_ast(pred.arg))
    if isinstance(pred, PAnd):
        return ast.PredAnd(_pred_to_ast(pred.left), _pred_to_ast(pred.right))
    if isinstance(pred, POr):
        return ast.PredOr(_pred_to_ast(pred.left), _pred_to_ast(pred.right))
    raise AssertionError(f"unknown predicate {pred!r}")


def _stmts_to_ast(stmts: tuple[RStmt, ...]) -> list[ast.Stmt]:
    span = Span(0, 0)
    out: list[ast.Stmt] = []
    for stmt in stmts:
        if isinstance(stmt, RApply):
            out.append(ast.ApplyStmt(stmt.table, span))
        else:
            out.append(
                ast.IfStmt(
                    _pred_to_ast(stmt.pred),
                    _stmts_to_ast(stmt.then_body),
                    _stmts_to_ast(stmt.else_body),
                    span,
                )
            )
    return out


def _operand_to_ast(op: Operand) -> ast.Arg:
    span = Span(0, 0)
    if isinstance(op, Const):
        return ast.ConstArg(op.value, span)
    if isinstance(op, Param):
        return ast.NameArg(ast.RefName((op.name,), span))
    if isinstance(op, FieldRef):
        return ast.NameArg(ast.RefName((op.header, op.field), span))
    return ast.NameArg(ast.RefName((op.name,), span))


def to_ast(prog: CheckedProgram) -> ast.Ast:
    """Rebuild an Ast from a CheckedProgram; check(parse(format(to_ast(p)))) == p."""
    span = Span(0, 0)
    headers = [
        ast.HeaderDecl(
            h.name, [ast.FieldSpec(f.field, f.width, span) for f in h.fields], span
        )
        for h in prog.headers
    ]
    extras = prog.metadata.fields[len(STANDARD_METADATA):]
    metadata = (
        [ast.MetadataDecl([ast.FieldSpec(f.field, f.width, span) for f in extras], span)]
        if extras
        else []
    )
    parsers = []
    for state in prog.parser_states:
        body: ast.TransitionBody | ast.SwitchBody
        if isinstance(state.body, STransition):
            body = ast.TransitionBody(state.body.next_state)
        else:
            body = ast.SwitchBody(
                state.body.field.field,
                [ast.SwitchCase(v, nxt, span) for v, nxt in state.body.cases],
                state.body.default,
            )
        parsers.append(ast.ParserStateDecl(state.name, body, span))
    tables = []
    for t in prog.tables:
        reads = []
        for key in t.reads:
            if key.kind == "valid":
                reads.append(ast.ReadSpec(ast.RefName((key.header,), span), "valid", span))
            else:
                assert key.field is not None
                reads.append(
                    ast.ReadSpec(
                        ast.RefName((key.header, key.field.field), span), key.kind, span
                    )
                )
        tables.append(ast.TableDecl(t.name, reads, list(t.actions), t.max_size, span))
    actions = [
        ast.ActionDecl(
            a.name,
            list(a.params),
            [
                ast.PrimitiveCall(c.name, [_operand_to_ast(op) for op in c.args], span)
                for c in a.body
            ],
            span,
        )
        for a in prog.actions
    ]
    controls = [ast.ControlDecl(prog.entry, _stmts_to_ast(prog.control_body), span)]
    return ast.Ast(headers, metadata, parsers, tables, actions, controls)
