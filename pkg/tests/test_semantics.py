import pytest

from p4mc.errors import SemanticError, UnknownAction
from p4mc.frontend import format_program, parse_program
from p4mc.semantics import (
    METADATA,
    PARAM_DEFAULT_WIDTH,
    STANDARD_METADATA,
    action_param_signature,
    check,
    to_ast,
    validate_action_parallelism,
)

MTAG = open("programs/mtag_edge.p4").read()


def check_src(src: str):
    return check(parse_program(src))


def errors_of(src: str) -> list[str]:
    with pytest.raises(SemanticError) as exc:
        check_src(src)
    return [d.message for d in exc.value.diagnostics]


def test_header_layout_offsets_match_width_sums():
    prog = check_src(MTAG)
    tree = parse_program(MTAG)
    for decl in tree.headers:
        layout = prog.header(decl.name)
        running = 0
        for spec, ref in zip(decl.fields, layout.fields):
            assert ref.field == spec.name
            assert ref.width == spec.width
            assert ref.offset == running
            running += spec.width
        assert layout.width == running


def test_standard_metadata_fields_come_first():
    prog = check_src(MTAG)
    names = [(f.field, f.width) for f in prog.metadata.fields]
    assert names[: len(STANDARD_METADATA)] == list(STANDARD_METADATA)
    assert names[len(STANDARD_METADATA):] == [("was_mtagged", 1), ("to_cpu", 1)]
    offsets = [f.offset for f in prog.metadata.fields]
    assert offsets == [0, 16, 32, 33, 34]
    assert prog.metadata.name == METADATA


def test_redeclared_standard_field_must_keep_width():
    src = (
        "header h { fields { f : 8; } }\n"
        "metadata { ingress_port : 16; }\n"
        "parser start { h; }\nparser h { stop; }\n"
        "action nop() { }\n"
        "table t { actions { nop; } }\n"
        "control main() { table(t); }\n"
    )
    prog = check_src(src)  # same width: accepted, not duplicated
    assert [f.field for f in prog.metadata.fields] == [
        "ingress_port",
        "egress_spec",
        "ingress_error",
    ]
    assert any(
        "ingress_port" in m for m in errors_of(src.replace(": 16;", ": 8;"))
    )


def test_application_labels_and_guards():
    prog = check_src(MTAG)
    assert [a.label for a in prog.applications] == [
        "source_check",
        "local_switching",
        "mTag_table",
        "egress_check",
    ]
    assert [a.node_id for a in prog.applications] == [0, 1, 2, 3]
    assert [len(a.guard) for a in prog.applications] == [0, 1, 2, 1]


def test_reapplied_table_gets_cloned_label():
    src = (
        "header h { fields { f : 8; } }\n"
        "parser start { h; }\nparser h { stop; }\n"
        "action nop() { }\n"
        "table t { reads { h.f : exact; } actions { nop; } }\n"
        "control main() { table(t); table(t); table(t); }\n"
    )
    prog = check_src(src)
    assert [a.label for a in prog.applications] == ["t", "t__2", "t__3"]


def test_miss_binds_to_latest_preceding_application():
    src = (
        "header h { fields { f : 8; } }\n"
        "parser start { h; }\nparser h { stop; }\n"
        "action nop() { }\n"
        "table t { reads { h.f : exact; } actions { nop; } }\n"
        "control main() { table(t); table(t); if (miss(t)) { table(t); } }\n"
    )
    prog = check_src(src)
    guard = prog.applications[2].guard
    assert len(guard) == 1
    assert guard[0].node_id == 1


def test_add_mtag_param_signature():
    prog = check_src(MTAG)
    assert action_param_signature(prog, "add_mTag") == [
        ("up1", 8),
        ("up2", 8),
        ("down1", 8),
        ("down2", 8),
        ("egr_spec", 16),
    ]
    assert action_param_signature(prog, "set_egress") == [("egr_spec", 16)]
    with pytest.raises(UnknownAction):
        action_param_signature(prog, "mystery")


def test_unused_param_defaults_to_64_bits():
    src = (
        "header h { fields { f : 8; } }\n"
        "parser start { h; }\nparser h { stop; }\n"
        "action a(x) { }\n"
        "table t { actions { a; } }\n"
        "control main() { table(t); }\n"
    )
    prog = check_src(src)
    assert action_param_signature(prog, "a") == [("x", PARAM_DEFAULT_WIDTH)]


def test_add_mtag_parallelism_warning_is_exactly_one():
    prog = check_src(MTAG)
    warnings = validate_action_parallelism(prog)
    mtag_warnings = [w for w in warnings if "add_mTag" in w.message]
    assert len(mtag_warnings) == 1
    assert "vlan.ethertype" in mtag_warnings[0].message
    # strip_mtag touches mTag's validity bit and a mTag field: distinct atoms
    assert not any("strip_mtag" in w.message for w in warnings)
    assert all(w.severity == "warning" for w in warnings)


PRELUDE = (
    "header h { fields { f : 8; g : 4; } }\n"
    "parser start { h; }\nparser h { stop; }\n"
)


@pytest.mark.parametrize(
    "src, fragment",
    [
        ("header metadata { fields { f : 1; } }", "metadata"),
        ("header h { fields { f : 1; } }\nheader h { fields { f : 1; } }", "duplicate"),
        (PRELUDE + "action nop() { }\ntable t { actions { nop; } }", "control"),
        (
            PRELUDE
            + "action a() { set_field(h.f, 0x100); }\n"
            + "table t { actions { a; } }\ncontrol main() { table(t); }",
            "fit",
        ),
        (
            PRELUDE
            + "action a() { add_header(metadata); }\n"
            + "table t { actions { a; } }\ncontrol main() { table(t); }",
            "metadata",
        ),
        (
            PRELUDE
            + "action a() { set_field(h.missing, 1); }\n"
            + "table t { actions { a; } }\ncontrol main() { table(t); }",
            "missing",
        ),
        (
            PRELUDE
            + "action nop() { }\ntable t { reads { x.f : exact; } actions { nop; } }\n"
            + "control main() { table(t); }",
            "x",
        ),
        (
            PRELUDE
            + "action nop() { }\ntable t { actions { nop; ghost; } }\n"
            + "control main() { table(t); }",
            "ghost",
        ),
        (
            PRELUDE
            + "action nop() { }\ntable t { actions { nop; } }\n"
            + "control main() { table(ghost); }",
            "ghost",
        ),
        (
            PRELUDE
            + "action nop() { }\ntable t { actions { nop; } }\n"
            + "control main() { if (miss(t)) { table(t); } }",
            "miss",
        ),
        (
            PRELUDE
            + "action nop() { }\ntable t { actions { nop; } }\n"
            + "control main() { if (h.f == 0x1ff) { table(t); } }",
            "fit",
        ),
        (
            "header h { fields { f : 8; } }\nparser start { h; }\n"
            "parser h { switch(missing) { case 1: stop; } }\n"
            "action nop() { }\ntable t { actions { nop; } }\n"
            "control main() { table(t); }",
            "missing",
        ),
        (
            "header h { fields { f : 4; } }\nparser start { h; }\n"
            "parser h { switch(f) { case 0x1f: stop; } }\n"
            "action nop() { }\ntable t { actions { nop; } }\n"
            "control main() { table(t); }",
            "fit",
        ),
    ],
)
def test_semantic_errors(src: str, fragment: str):
    assert any(fragment in m for m in errors_of(src))


def test_diagnostics_are_ordered_by_position():
    src = (
        PRELUDE
        + "action a() { set_field(h.zzz, 1); set_field(h.yyy, 1); }\n"
        + "table t { actions { a; } }\ncontrol main() { table(t); }"
    )
    with pytest.raises(SemanticError) as exc:
        check_src(src)
    spans = [(d.span.line, d.span.col) for d in exc.value.diagnostics]
    assert spans == sorted(spans)
    assert len(spans) >= 2


def test_checked_program_survives_ast_round_trip():
    prog = check_src(MTAG)
    rebuilt = check(parse_program(format_program(to_ast(prog))))
    assert rebuilt == prog
