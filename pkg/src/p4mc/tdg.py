"""Table dependency graph: build, classify, stage, export.

Nodes are table *applications* (a table applied twice is cloned with a
``__k`` suffix). Dependencies between an earlier node `a` and a later node
`b` are classified with MATCH > ACTION > PREDICATION precedence:

  MATCH        b's match keys or guard predicate read something a may write;
               b's lookup cannot start until a's actions commit
  ACTION       a and b write overlapping bits, or b's actions read bits a
               writes; lookups may overlap but commits must stay ordered
  PREDICATION  b runs only on a's hit/miss outcome (a bound miss() guard)
               and shares no data; b may match in a's stage, its commit is
               simply predicated on the outcome

Stage assignment is longest-path layering with weight 1 on MATCH/ACTION
edges and 0 on PREDICATION edges, which is depth-minimal under the
constraint set.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import CycleDetected
from .semantics import (
    Action,
    CheckedProgram,
    FieldRef,
    HeaderRef,
    PAnd,
    PDefined,
    PEq,
    PMiss,
    PNot,
    POr,
    PValid,
    RPred,
    Table,
)

MATCH = "MATCH"
ACTION = "ACTION"
PREDICATION = "PREDICATION"

# Atoms: ("field", header, field) for field bits, ("valid", header, "") for
# a header's validity bit.
Atom = tuple[str, str, str]


def _field_atom(f: FieldRef) -> Atom:
    return ("field", f.header, f.field)


def _valid_atom(header: str) -> Atom:
    return ("valid", header, "")


def action_write_atoms(prog: CheckedProgram, action: Action) -> set[Atom]:
    """Everything `action` may write; add/remove of a header counts as
    writing its validity bit and every one of its fields."""
    out: set[Atom] = set()
    for call in action.body:
        if call.name in ("set_field", "copy_field", "increment", "checksum"):
            target = call.args[0]
            assert isinstance(target, FieldRef)
            out.add(_field_atom(target))
        else:  # add_header / remove_header
            header = call.args[0]
            assert isinstance(header, HeaderRef)
            out.add(_valid_atom(header.name))
            layout = prog.header(header.name)
            if layout is not None:
                for f in layout.fields:
                    out.add(_field_atom(f))
    return out


def action_read_atoms(action: Action) -> set[Atom]:
    out: set[Atom] = set()
    for call in action.body:
        if call.name == "copy_field":
            src = call.args[1]
            assert isinstance(src, FieldRef)
            out.add(_field_atom(src))
        elif call.name == "set_field" and len(call.args) == 3:
            out.add(_field_atom(call.args[0]))  # masked set keeps old bits
        elif call.name == "increment":
            out.add(_field_atom(call.args[0]))
        elif call.name == "checksum":
            for src in call.args[1:]:
                assert isinstance(src, FieldRef)
                out.add(_field_atom(src))
    return out


def match_read_atoms(table: Table) -> set[Atom]:
    out: set[Atom] = set()
    for key in table.reads:
        if key.kind == "valid":
            out.add(_valid_atom(key.header))
        else:
            assert key.field is not None
            out.add(_field_atom(key.field))
    return out


def pred_atoms(pred: RPred) -> set[Atom]:
    if isinstance(pred, PDefined):
        return {_field_atom(pred.field)}
    if isinstance(pred, PValid):
        return {_valid_atom(pred.header)}
    if isinstance(pred, PEq):
        return {_field_atom(pred.field)}
    if isinstance(pred, PMiss):
        return set()  # outcome signal, not data
    if isinstance(pred, PNot):
        return pred_atoms(pred.arg)
    if isinstance(pred, (PAnd, POr)):
        return pred_atoms(pred.left) | pred_atoms(pred.right)
    raise AssertionError(f"unknown predicate {pred!r}")


def _miss_bindings(pred: RPred) -> set[int]:
    if isinstance(pred, PMiss):
        return {pred.node_id}
    if isinstance(pred, PNot):
        return _miss_bindings(pred.arg)
    if isinstance(pred, (PAnd, POr)):
        return _miss_bindings(pred.left) | _miss_bindings(pred.right)
    return set()


@dataclass(frozen=True)
class TdgNode:
    node_id: int  # position in control order
    name: str  # table name, `table__k` for reapplications
    table: str
    match_reads: frozenset[Atom]
    action_reads: frozenset[Atom]
    writes: frozenset[Atom]
    predicate: tuple[RPred, ...]  # guard conjunction, outermost first

    @property
    def read_set(self) -> frozenset[Atom]:
        return self.match_reads | self.action_reads

    @property
    def predicate_atoms(self) -> frozenset[Atom]:
        atoms: set[Atom] = set()
        for p in self.predicate:
            atoms |= pred_atoms(p)
        return frozenset(atoms)

    @property
    def outcome_dependencies(self) -> frozenset[int]:
        """node_ids whose hit/miss outcome the guard consults."""
        ids: set[int] = set()
        for p in self.predicate:
            ids |= _miss_bindings(p)
        return frozenset(ids)


@dataclass(frozen=True)
class TdgEdge:
    src: int  # node_id
    dst: int
    kind: str  # MATCH | ACTION | PREDICATION


@dataclass(frozen=True)
class Tdg:
    nodes: tuple[TdgNode, ...]
    edges: tuple[TdgEdge, ...]

    def node_by_name(self, name: str) -> TdgNode:
        for node in self.nodes:
            if node.name == name:
                return node
        raise KeyError(name)


def classify_dependencies(a: TdgNode, b: TdgNode) -> str | None:
    """Edge kind for the ordered pair (a earlier, b later), or None."""
    if (b.match_reads | b.predicate_atoms) & a.writes:
        return MATCH
    if (b.writes & a.writes) or (b.action_reads & a.writes):
        return ACTION
    if a.node_id in b.outcome_dependencies:
        return PREDICATION
    return None


def build_tdg(prog: CheckedProgram) -> Tdg:
    nodes: list[TdgNode] = []
    for app in prog.applications:
        table = prog.table(app.table)
        assert table is not None
        writes: set[Atom] = set()
        action_reads: set[Atom] = set()
        for action_name in table.actions:
            action = prog.action(action_name)
            assert action is not None
            writes |= action_write_atoms(prog, action)
            action_reads |= action_read_atoms(action)
        nodes.append(
            TdgNode(
                app.node_id,
                app.label,
                app.table,
                frozenset(match_read_atoms(table)),
                frozenset(action_reads),
                frozenset(writes),
                app.guard,
            )
        )
    edges: list[TdgEdge] = []
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            kind = classify_dependencies(a, b)
            if kind is not None:
                edges.append(TdgEdge(a.node_id, b.node_id, kind))
    return Tdg(tuple(nodes), tuple(edges))


@dataclass(frozen=True)
class StageAssignment:
    stages: dict[int, int]  # node_id -> stage
    labels: dict[str, int]  # node name -> stage
    depth: int


def assign_stages(tdg: Tdg) -> StageAssignment:
    """Longest-path layering; MATCH/ACTION edges weigh 1, PREDICATION 0."""
    incoming: dict[int, list[TdgEdge]] = {n.node_id: [] for n in tdg.nodes}
    indegree: dict[int, int] = {n.node_id: 0 for n in tdg.nodes}
    for edge in tdg.edges:
        incoming[edge.dst].append(edge)
        indegree[edge.dst] += 1

    # Kahn's algorithm; build_tdg cannot produce cycles (edges always point
    # forward in control order) but hand-built graphs get a clean error.
    order: list[int] = []
    queue = deque(sorted(nid for nid, deg in indegree.items() if deg == 0))
    outgoing: dict[int, list[TdgEdge]] = {n.node_id: [] for n in tdg.nodes}
    for edge in tdg.edges:
        outgoing[edge.src].append(edge)
    pending = dict(indegree)
    while queue:
        nid = queue.popleft()
        order.append(nid)
        for edge in outgoing[nid]:
            pending[edge.dst] -= 1
            if pending[edge.dst] == 0:
                queue.append(edge.dst)
    if len(order) != len(tdg.nodes):
        raise CycleDetected("dependency graph contains a cycle")

    stages: dict[int, int] = {}
    for nid in order:
        stage = 0
        for edge in incoming[nid]:
            weight = 0 if edge.kind == PREDICATION else 1
            stage = max(stage, stages[edge.src] + weight)
        stages[nid] = stage
    labels = {node.name: stages[node.node_id] for node in tdg.nodes}
    depth = max(stages.values()) + 1 if stages else 0
    return StageAssignment(stages, labels, depth)


def export_dot(tdg: Tdg, stages: StageAssignment) -> str:
    """Deterministic DOT rendering; nodes in control order."""
    lines = ["digraph tdg {"]
    for node in tdg.nodes:
        stage = stages.stages.get(node.node_id, 0)
        lines.append(f'    "{node.name}" [label="{node.name}\\nstage={stage}"];')
    names = {node.node_id: node.name for node in tdg.nodes}
    for edge in sorted(tdg.edges, key=lambda e: (e.src, e.dst)):
        lines.append(
            f'    "{names[edge.src]}" -> "{names[edge.dst]}" [label="{edge.kind}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
