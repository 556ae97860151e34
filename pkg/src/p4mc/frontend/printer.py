"""Pretty-printer: Ast -> source text.

Re-parsing the output yields an Ast equal to the input (spans excluded
from comparison), which the test suite checks on every sample program.
"""

from __future__ import annotations

from . import ast

_INDENT = "    "


def _fmt_pred(p: ast.Pred) -> str:
    if isinstance(p, ast.PredDefined):
        return f"defined({p.ref})"
    if isinstance(p, ast.PredValid):
        return f"valid({p.ref})"
    if isinstance(p, ast.PredMiss):
        return f"miss({p.table})"
    if isinstance(p, ast.PredEq):
        return f"{p.ref} == {p.value:#x}"
    if isinstance(p, ast.PredNot):
        return f"!({_fmt_pred(p.arg)})"
    if isinstance(p, ast.PredAnd):
        return f"({_fmt_pred(p.left)} && {_fmt_pred(p.right)})"
    if isinstance(p, ast.PredOr):
        return f"({_fmt_pred(p.left)} || {_fmt_pred(p.right)})"
    raise TypeError(f"unknown predicate node {p!r}")


def _fmt_arg(a: ast.Arg) -> str:
    if isinstance(a, ast.ConstArg):
        return f"{a.value:#x}"
    return str(a.ref)


def _emit_stmts(stmts: list[ast.Stmt], depth: int, out: list[str]) -> None:
    pad = _INDENT * depth
    for stmt in stmts:
        if isinstance(stmt, ast.ApplyStmt):
            out.append(f"{pad}table({stmt.table});")
        else:
            out.append(f"{pad}if ({_fmt_pred(stmt.pred)}) {{")
            _emit_stmts(stmt.then_body, depth + 1, out)
            if stmt.else_body:
                out.append(f"{pad}}} else {{")
                _emit_stmts(stmt.else_body, depth + 1, out)
            out.append(f"{pad}}}")


def _emit_fields(fields: list[ast.FieldSpec], out: list[str]) -> None:
    for f in fields:
        out.append(f"{_INDENT * 2}{f.name} : {f.width};")


def format_program(tree: ast.Ast) -> str:
    """Render `tree` as source text."""
    out: list[str] = []
    for hdr in tree.headers:
        out.append(f"header {hdr.name} {{")
        out.append(f"{_INDENT}fields {{")
        _emit_fields(hdr.fields, out)
        out.append(f"{_INDENT}}}")
        out.append("}")
        out.append("")
    for meta in tree.metadata:
        out.append("metadata {")
        for f in meta.fields:
            out.append(f"{_INDENT}{f.name} : {f.width};")
        out.append("}")
        out.append("")
    for state in tree.parsers:
        out.append(f"parser {state.name} {{")
        body = state.body
        if isinstance(body, ast.TransitionBody):
            out.append(f"{_INDENT}{body.next_state};")
        else:
            out.append(f"{_INDENT}switch({body.field}) {{")
            for case in body.cases:
                out.append(f"{_INDENT * 2}case {case.value:#x}: {case.next_state};")
            if body.default is not None:
                out.append(f"{_INDENT * 2}default: {body.default};")
            out.append(f"{_INDENT}}}")
        out.append("}")
        out.append("")
    for table in tree.tables:
        out.append(f"table {table.name} {{")
        if table.reads:
            out.append(f"{_INDENT}reads {{")
            for spec in table.reads:
                out.append(f"{_INDENT * 2}{spec.target} : {spec.kind};")
            out.append(f"{_INDENT}}}")
        out.append(f"{_INDENT}actions {{")
        for act in table.actions:
            out.append(f"{_INDENT * 2}{act};")
        out.append(f"{_INDENT}}}")
        out.append(f"{_INDENT}max_size : {table.max_size};")
        out.append("}")
        out.append("")
    for action in tree.actions:
        params = ", ".join(action.params)
        out.append(f"action {action.name}({params}) {{")
        for call in action.body:
            args = ", ".join(_fmt_arg(a) for a in call.args)
            out.append(f"{_INDENT}{call.name}({args});")
        out.append("}")
        out.append("")
    for control in tree.controls:
        out.append(f"control {control.name}() {{")
        _emit_stmts(control.body, 1, out)
        out.append("}")
        out.append("")
    return "\n".join(out)
