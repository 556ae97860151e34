import json

import pytest

from p4mc.errors import MalformedConfig
from p4mc.frontend import parse_program
from p4mc.semantics import check
from p4mc.target_config import VERSION, dumps, load, loads
from p4mc.toolchain import compile_source


def test_round_trip_preserves_the_config(mtag_edge):
    text = dumps(mtag_edge.config)
    assert loads(text) == mtag_edge.config


def test_dump_load_dump_is_byte_identical(mtag_edge):
    once = dumps(mtag_edge.config)
    assert dumps(loads(once)) == once
    assert once.endswith("\n")


def test_load_accepts_bytes(mtag_edge):
    text = dumps(mtag_edge.config)
    assert load(text.encode()) == mtag_edge.config


def test_version_and_hex_conventions(mtag_edge):
    doc = json.loads(dumps(mtag_edge.config))
    assert doc["version"] == VERSION
    for row in doc["parser"]["rows"]:
        assert row["value"].startswith("0x")
        assert row["mask"].startswith("0x")


def test_only_applied_tables_are_emitted():
    src = (
        "header h { fields { f : 8; } }\n"
        "parser start { h; }\nparser h { stop; }\n"
        "action nop() { }\naction ghost_act() { }\n"
        "table used { reads { h.f : exact; } actions { nop; } }\n"
        "table unused { actions { ghost_act; } }\n"
        "control main() { table(used); }\n"
    )
    cfg = compile_source(src).config
    assert [t.name for t in cfg.tables] == ["used"]
    assert [a.name for a in cfg.actions] == ["nop"]


def test_table_stage_matches_first_application(mtag_edge):
    stages = {t.name: t.stage for t in mtag_edge.config.tables}
    assert stages == {
        "source_check": 0,
        "local_switching": 1,
        "mTag_table": 2,
        "egress_check": 3,
    }
    assert mtag_edge.config.stage_count == 4


def _doc(mtag_edge) -> dict:
    return json.loads(dumps(mtag_edge.config))


def _expect(doc, kind: str, path_fragment: str):
    with pytest.raises(MalformedConfig) as exc:
        loads(json.dumps(doc))
    assert exc.value.kind == kind
    assert path_fragment in exc.value.path
    return exc.value


def test_reject_wrong_version(mtag_edge):
    doc = _doc(mtag_edge)
    doc["version"] = "p4mc-0"
    err = _expect(doc, "version", "version")
    assert "p4mc-0" in err.detail


def test_reject_missing_key(mtag_edge):
    doc = _doc(mtag_edge)
    del doc["parser"]
    _expect(doc, "schema", "parser")


def test_reject_bad_hex_string(mtag_edge):
    doc = _doc(mtag_edge)
    doc["parser"]["rows"][0]["value"] = "zz"
    _expect(doc, "schema", "parser.rows[0].value")


def test_reject_bad_field_offset(mtag_edge):
    doc = _doc(mtag_edge)
    doc["headers"][1]["fields"][2]["offset"] = 5
    _expect(doc, "schema", "headers[1].fields[2].offset")


def test_reject_unknown_header_reference(mtag_edge):
    doc = _doc(mtag_edge)
    doc["tables"][2]["reads"][0]["header"] = "nope"
    _expect(doc, "reference", "tables[2].reads[0]")


def test_reject_unknown_action_reference(mtag_edge):
    doc = _doc(mtag_edge)
    doc["tables"][2]["actions"][0] = "nope"
    _expect(doc, "reference", "tables[2].actions[0]")


def test_reject_bad_match_kind(mtag_edge):
    doc = _doc(mtag_edge)
    doc["tables"][2]["reads"][0]["kind"] = "fuzzy"
    _expect(doc, "schema", "tables[2].reads[0].kind")


def test_reject_non_preorder_node_ids(mtag_edge):
    doc = _doc(mtag_edge)
    doc["control"]["body"][0]["apply"]["node"] = 5
    _expect(doc, "schema", "node")


def test_reject_stage_below_dependency_floor(mtag_edge):
    doc = _doc(mtag_edge)
    doc["stages"]["nodes"][2]["stage"] = 9
    with pytest.raises(MalformedConfig):
        loads(json.dumps(doc))


def test_reject_metadata_without_standard_prefix(mtag_edge):
    doc = _doc(mtag_edge)
    doc["metadata"]["fields"] = doc["metadata"]["fields"][1:]
    _expect(doc, "schema", "metadata")


def test_reject_non_object_document():
    with pytest.raises(MalformedConfig) as exc:
        loads("[]")
    assert exc.value.kind == "schema"


def test_reject_invalid_json():
    with pytest.raises(MalformedConfig) as exc:
        loads("{not json")
    assert exc.value.kind == "schema"


def test_parser_only_program_has_no_tables():
    # a control with zero statements compiles to a parser-only config
    src = (
        "header h { fields { f : 8; } }\n"
        "parser start { h; }\nparser h { stop; }\n"
        "action nop() { }\n"
        "table t { actions { nop; } }\n"
        "control main() { }\n"
    )
    cfg = compile_source(src).config
    assert cfg.tables == ()
    assert cfg.actions == ()
    assert cfg.stage_count == 0
    assert loads(dumps(cfg)) == cfg


def test_parser_program_reconstruction(mtag_edge):
    cfg = loads(dumps(mtag_edge.config))
    pp = cfg.parser_program()
    assert pp.start == "start"
    assert pp.entries == mtag_edge.parser.entries
    assert set(pp.plan) == set(mtag_edge.parser.plan)
