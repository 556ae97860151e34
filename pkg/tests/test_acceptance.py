"""End-to-end acceptance gate.

Each test covers one release criterion and prints a single PASS/FAIL line
on the real stdout (past pytest's capture) so the run log shows the gate
at a glance.  Budgets are wall-clock upper bounds asserted inside the
timed block.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager

import pytest

from p4mc import compile_file, new_switch, parse_rules_json
from p4mc.engine import EGRESS, Rule
from p4mc.engine.rules import ExactKey, TernaryKey
from p4mc.errors import (
    DuplicateExactKey,
    TableFull,
    TypeMismatch,
    UnknownAction,
    UnknownTable,
)
from p4mc.frontend.ast import STOP
from p4mc.parser_compiler import simulate_parse
from p4mc.tdg import MATCH, PREDICATION, assign_stages

from conftest import MTAG_EDGE, MTAG_RULES
from randprog import run_trial
from test_engine import GOLDEN_IN, GOLDEN_OUT
from test_parser_compiler import recursive_parse
from test_tdg import min_depth_exhaustive


@contextmanager
def criterion(capsys, num: int, label: str, budget: float):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget, f"criterion {num} took {elapsed:.2f}s (budget {budget}s)"
    except BaseException:
        with capsys.disabled():
            print(f"criterion {num} ({label}): FAIL")
        raise
    with capsys.disabled():
        print(f"criterion {num} ({label}): PASS ({elapsed:.2f}s)")


def _bits(data: bytes, offset: int, width: int) -> int:
    value = 0
    for i in range(width):
        pos = offset + i
        value = (value << 1) | ((data[pos // 8] >> (7 - pos % 8)) & 1)
    return value


def test_criterion_1_parser_state_table_rows(capsys):
    with criterion(capsys, 1, "parser state-table rows", budget=1.0):
        out = compile_file(MTAG_EDGE)
        rows = [
            (e.current_state, e.lookup_value, e.lookup_mask, e.next_state)
            for e in out.parser.entries
            if e.current_state in ("vlan", "mTag")
        ]
        assert rows == [
            ("vlan", 0xAAAA, 0xFFFF, "mTag"),
            ("vlan", 0x0800, 0xFFFF, "ipv4"),
            ("vlan", 0, 0, STOP),
            ("mTag", 0x0800, 0xFFFF, "ipv4"),
            ("mTag", 0, 0, STOP),
        ]


def test_criterion_2_edge_tagging_semantics(mtag_edge, capsys):
    with criterion(capsys, 2, "edge tagging semantics", budget=1.0):
        sw = new_switch(mtag_edge.config)
        rules = parse_rules_json(MTAG_RULES.read_text())
        for rule in rules:
            sw.insert_rule(rule)
        tag_rule = next(r for r in rules if r.action == "add_mTag")

        verdict = sw.process_packet(1, GOLDEN_IN)
        assert verdict.kind == EGRESS
        assert verdict.data == GOLDEN_OUT

        before = simulate_parse(mtag_edge.parser, GOLDEN_IN)
        after = simulate_parse(mtag_edge.parser, verdict.data)
        names = [h[0] for h in after.headers]
        assert names == ["ethernet", "vlan", "mTag", "ipv4"]

        offsets = {name: off for name, off, _ in after.headers}
        vlan_etype = _bits(verdict.data, offsets["vlan"] + 16, 16)
        mtag = offsets["mTag"]
        fields = [_bits(verdict.data, mtag + i * 8, 8) for i in range(4)]
        mtag_etype = _bits(verdict.data, mtag + 32, 16)
        original = {name: off for name, off, _ in before.headers}
        original_vlan_etype = _bits(GOLDEN_IN, original["vlan"] + 16, 16)

        assert vlan_etype == 0xAAAA
        assert mtag_etype == original_vlan_etype
        assert tuple(fields) == tag_rule.params[:4]
        assert verdict.egress == tag_rule.params[4]


def test_criterion_3_stage_parallelism(mtag_edge, mtag_parallel, capsys):
    with criterion(capsys, 3, "stage parallelism", budget=5.0):
        literal = assign_stages(mtag_edge.tdg)
        assert literal.labels == {
            "source_check": 0,
            "local_switching": 1,
            "mTag_table": 2,
            "egress_check": 3,
        }
        assert literal.depth == 4
        kinds = {(e.src, e.dst): e.kind for e in mtag_edge.tdg.edges}
        assert kinds == {
            (0, 1): MATCH,
            (0, 2): MATCH,
            (0, 3): MATCH,
            (1, 2): MATCH,
            (1, 3): MATCH,
            (2, 3): MATCH,
        }

        parallel = assign_stages(mtag_parallel.tdg)
        labels = parallel.labels
        assert labels["local_switching"] == labels["mTag_table"]
        assert labels["source_check"] < labels["local_switching"]
        assert labels["egress_check"] > labels["mTag_table"]
        edge_kinds = {(e.src, e.dst): e.kind for e in mtag_parallel.tdg.edges}
        assert edge_kinds[(1, 2)] == PREDICATION

        for out, stages in ((mtag_edge, literal), (mtag_parallel, parallel)):
            edges = [(e.src, e.dst, e.kind) for e in out.tdg.edges]
            assert stages.depth == min_depth_exhaustive(len(out.tdg.nodes), edges)


def test_criterion_4_staged_sequential_equivalence(capsys):
    with criterion(capsys, 4, "staged/sequential equivalence", budget=60.0):
        seen = set()
        for seed in range(1000):
            seen.update(run_trial(seed))
        assert {"egress", "drop", "to_cpu"} <= seen


def test_criterion_5_parser_oracle_equivalence(mtag_edge, capsys):
    with criterion(capsys, 5, "parser oracle equivalence", budget=10.0):
        rng = random.Random(20140201)
        for _ in range(10_000):
            data = rng.randbytes(rng.randrange(0, 96))
            got = simulate_parse(mtag_edge.parser, data)
            headers, final, consumed, error = recursive_parse(mtag_edge.prog, data)
            assert got.headers == tuple(headers)
            assert got.final == final
            assert got.consumed_bits == consumed
            assert (got.error is None) == (error is None)


def _tag_rule(i: int) -> Rule:
    return Rule(
        table="mTag_table",
        key=(ExactKey(i), ExactKey(10)),
        action="add_mTag",
        params=(1, 2, 3, 4, i & 0xFFFF),
    )


def test_criterion_6_populate_phase_contracts(mtag_edge, corpus, capsys):
    with criterion(capsys, 6, "populate-phase contracts", budget=30.0):
        sw = new_switch(mtag_edge.config)
        for i in range(19_999):
            sw.insert_rule(_tag_rule(i))
        sw.insert_rule(_tag_rule(19_999))
        with pytest.raises(TableFull):
            sw.insert_rule(_tag_rule(20_000))

        with pytest.raises(UnknownTable):
            sw.insert_rule(
                Rule(table="nope", key=(ExactKey(1),), action="add_mTag")
            )
        with pytest.raises(UnknownAction):
            sw.insert_rule(
                Rule(
                    table="mTag_table",
                    key=(ExactKey(1), ExactKey(1)),
                    action="set_egress",
                    params=(1,),
                )
            )
        with pytest.raises(TypeMismatch):
            sw.insert_rule(
                Rule(table="mTag_table", key=(ExactKey(1),), action="add_mTag",
                     params=(1, 2, 3, 4, 5))
            )
        with pytest.raises(TypeMismatch):
            sw.insert_rule(
                Rule(
                    table="mTag_table",
                    key=(ExactKey(1), TernaryKey(1, 1)),
                    action="add_mTag",
                    params=(1, 2, 3, 4, 5),
                )
            )
        with pytest.raises(TypeMismatch):
            sw.insert_rule(
                Rule(
                    table="mTag_table",
                    key=(ExactKey(1), ExactKey(1 << 12)),
                    action="add_mTag",
                    params=(1, 2, 3, 4, 5),
                )
            )
        with pytest.raises(DuplicateExactKey):
            sw.insert_rule(_tag_rule(0))

        empty = new_switch(mtag_edge.config)
        for pkt in corpus:
            assert empty.process_packet(1, pkt).data == pkt
            assert empty.process_packet_staged(1, pkt).data == pkt
