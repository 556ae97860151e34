import itertools
import re

import pytest

from p4mc.errors import CycleDetected
from p4mc.semantics import (
    PAnd,
    PDefined,
    PEq,
    PMiss,
    PNot,
    POr,
    PValid,
)
from p4mc.tdg import (
    ACTION,
    MATCH,
    PREDICATION,
    Tdg,
    TdgEdge,
    TdgNode,
    assign_stages,
    build_tdg,
    export_dot,
)


def _pred_fields(pred, out):
    if isinstance(pred, PDefined) or isinstance(pred, PEq):
        out.add(("field", pred.field.header, pred.field.field))
    elif isinstance(pred, PValid):
        out.add(("valid", pred.header, ""))
    elif isinstance(pred, PNot):
        _pred_fields(pred.arg, out)
    elif isinstance(pred, (PAnd, POr)):
        _pred_fields(pred.left, out)
        _pred_fields(pred.right, out)


def _pred_misses(pred, out):
    if isinstance(pred, PMiss):
        out.add(pred.node_id)
    elif isinstance(pred, PNot):
        _pred_misses(pred.arg, out)
    elif isinstance(pred, (PAnd, POr)):
        _pred_misses(pred.left, out)
        _pred_misses(pred.right, out)


def oracle_edges(prog):
    """Re-derive the dependency edges straight from the checked IR.

    Deliberately independent of the tdg module's atom helpers: reads the
    primitive bodies, table keys, and guards directly and applies the
    MATCH > ACTION > PREDICATION precedence.
    """
    facts = []
    for app in prog.applications:
        table = prog.table(app.table)
        match_reads = set()
        for key in table.reads:
            if key.kind == "valid":
                match_reads.add(("valid", key.header, ""))
            else:
                match_reads.add(("field", key.header, key.field.field))
        writes, action_reads = set(), set()
        for name in table.actions:
            for call in prog.action(name).body:
                if call.name in ("add_header", "remove_header"):
                    header = call.args[0].name
                    writes.add(("valid", header, ""))
                    for f in prog.header(header).fields:
                        writes.add(("field", header, f.field))
                    continue
                target = call.args[0]
                writes.add(("field", target.header, target.field))
                if call.name == "copy_field":
                    src = call.args[1]
                    action_reads.add(("field", src.header, src.field))
                elif call.name == "set_field" and len(call.args) == 3:
                    action_reads.add(("field", target.header, target.field))
                elif call.name == "increment":
                    action_reads.add(("field", target.header, target.field))
                elif call.name == "checksum":
                    for src in call.args[1:]:
                        action_reads.add(("field", src.header, src.field))
        pred_fields, misses = set(), set()
        for p in app.guard:
            _pred_fields(p, pred_fields)
            _pred_misses(p, misses)
        facts.append((app.node_id, match_reads, action_reads, writes, pred_fields, misses))

    edges = set()
    for (i, mr_a, ar_a, w_a, pf_a, m_a), (j, mr_b, ar_b, w_b, pf_b, m_b) in (
        (a, b) for a in facts for b in facts if a[0] < b[0]
    ):
        if (mr_b | pf_b) & w_a:
            edges.add((i, j, MATCH))
        elif (w_b & w_a) or (ar_b & w_a):
            edges.add((i, j, ACTION))
        elif i in m_b:
            edges.add((i, j, PREDICATION))
    return edges


def min_depth_exhaustive(count: int, edges) -> int:
    """Smallest depth over every stage assignment satisfying the edge rules."""
    best = count
    for stages in itertools.product(range(count), repeat=count):
        ok = True
        for src, dst, kind in edges:
            if kind == PREDICATION:
                ok = stages[dst] >= stages[src]
            else:
                ok = stages[dst] > stages[src]
            if not ok:
                break
        if ok:
            best = min(best, max(stages) + 1 if count else 0)
    return best


def test_edges_match_independent_oracle(mtag_edge, mtag_parallel):
    for out in (mtag_edge, mtag_parallel):
        got = {(e.src, e.dst, e.kind) for e in out.tdg.edges}
        assert got == oracle_edges(out.prog)


def test_literal_program_edges_are_all_match(mtag_edge):
    edges = {(e.src, e.dst): e.kind for e in mtag_edge.tdg.edges}
    assert edges == {
        (0, 1): MATCH,
        (0, 2): MATCH,
        (0, 3): MATCH,
        (1, 2): MATCH,
        (1, 3): MATCH,
        (2, 3): MATCH,
    }


def test_literal_program_stages_and_depth(mtag_edge):
    stages = assign_stages(mtag_edge.tdg)
    assert stages.labels == {
        "source_check": 0,
        "local_switching": 1,
        "mTag_table": 2,
        "egress_check": 3,
    }
    assert stages.depth == 4


def test_parallel_variant_shares_a_stage(mtag_parallel):
    stages = assign_stages(mtag_parallel.tdg)
    labels = stages.labels
    assert labels["local_switching"] == labels["mTag_table"]
    assert labels["source_check"] < labels["local_switching"]
    assert labels["egress_check"] > labels["mTag_table"]
    assert stages.depth == 3
    kinds = {(e.src, e.dst): e.kind for e in mtag_parallel.tdg.edges}
    assert kinds[(1, 2)] == PREDICATION


def test_depth_is_minimal_by_exhaustive_search(mtag_edge, mtag_parallel):
    for out in (mtag_edge, mtag_parallel):
        stages = assign_stages(out.tdg)
        edges = [(e.src, e.dst, e.kind) for e in out.tdg.edges]
        assert stages.depth == min_depth_exhaustive(len(out.tdg.nodes), edges)


def test_stage_of_every_node_is_earliest_feasible(mtag_edge):
    stages = assign_stages(mtag_edge.tdg)
    for node in mtag_edge.tdg.nodes:
        incoming = [e for e in mtag_edge.tdg.edges if e.dst == node.node_id]
        floor = 0
        for e in incoming:
            weight = 0 if e.kind == PREDICATION else 1
            floor = max(floor, stages.stages[e.src] + weight)
        assert stages.stages[node.node_id] == floor


def test_cycle_detected_on_hand_built_graph():
    node = TdgNode(0, "t", "t", frozenset(), frozenset(), frozenset(), ())
    other = TdgNode(1, "u", "u", frozenset(), frozenset(), frozenset(), ())
    cyclic = Tdg(
        (node, other),
        (TdgEdge(0, 1, MATCH), TdgEdge(1, 0, MATCH)),
    )
    with pytest.raises(CycleDetected):
        assign_stages(cyclic)


def test_empty_graph_has_depth_zero():
    stages = assign_stages(Tdg((), ()))
    assert stages.depth == 0
    assert stages.stages == {}


def test_export_dot_structure(mtag_edge):
    stages = assign_stages(mtag_edge.tdg)
    dot = export_dot(mtag_edge.tdg, stages)
    assert dot.startswith("digraph tdg {")
    assert dot.endswith("}\n")
    assert dot.count("{") == dot.count("}")
    for node in mtag_edge.tdg.nodes:
        assert re.search(
            rf'"{node.name}" \[label="{node.name}\\nstage=\d+"\];', dot
        )
    edge_lines = [ln for ln in dot.splitlines() if "->" in ln]
    assert len(edge_lines) == len(mtag_edge.tdg.edges)
    assert all(re.search(r'\[label="(MATCH|ACTION|PREDICATION)"\];', ln) for ln in edge_lines)
    names = {n.node_id: n.name for n in mtag_edge.tdg.nodes}
    expected = [
        f'    "{names[e.src]}" -> "{names[e.dst]}" [label="{e.kind}"];'
        for e in sorted(mtag_edge.tdg.edges, key=lambda e: (e.src, e.dst))
    ]
    assert edge_lines == expected
