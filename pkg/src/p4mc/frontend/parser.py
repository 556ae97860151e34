"""Recursive-descent parser producing the untyped Ast.

The grammar follows the concrete syntax of the source listings:

    program       : decl+
    decl          : header_decl | metadata_decl | parser_decl
                  | table_decl | action_decl | control_decl
    header_decl   : "header" IDENT "{" "fields" "{" field_spec+ "}" "}"
    metadata_decl : "metadata" "{" field_spec+ "}"
    field_spec    : IDENT ":" INT ";"
    parser_decl   : "parser" IDENT "{" parser_body "}"
    parser_body   : "stop" ";" | IDENT ";"
                  | "switch" "(" IDENT ")" "{" case* default? "}"
    case          : "case" INT ":" next ";"
    default       : "default" ":" next ";"
    next          : IDENT | "stop"
    table_decl    : "table" IDENT "{" table_attr* "}"
    table_attr    : "reads" "{" read_spec* "}"
                  | "actions" "{" (IDENT ";")* "}"
                  | "max_size" ":" INT ";"
    read_spec     : ref ":" match_kind ";"
    action_decl   : "action" IDENT "(" params? ")" "{" prim_call* "}"
    prim_call     : IDENT "(" args? ")" ";"
    control_decl  : "control" IDENT "(" ")" "{" stmt* "}"
    stmt          : "table" "(" IDENT ")" ";"
                  | "if" "(" pred ")" "{" stmt* "}" ("else" "{" stmt* "}")?
    pred          : and_pred ("||" and_pred)*
    and_pred      : unary_pred ("&&" unary_pred)*
    unary_pred    : "!" unary_pred | "(" pred ")"
                  | "defined" "(" ref ")" | "valid" "(" IDENT ")"
                  | "miss" "(" IDENT ")" | ref "==" INT
    ref           : IDENT ("." IDENT)?

Name resolution is deferred entirely to the semantic checker; this module
only enforces shape-level invariants (unique field names per header, unique
case constants, unique action params, known primitive names, at least one
action per table, positive widths and sizes).
"""

from __future__ import annotations

from ..errors import ParseError
from . import ast
from .lexer import Token, tokenize

_MATCH_KINDS = ("exact", "ternary", "valid", "lpm")


def _describe(tok: Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    return repr(tok.text)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing -------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {what}, found {_describe(tok)}", tok.span)
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        return self.expect("ident", what)

    def expect_int(self, what: str = "integer") -> Token:
        return self.expect("int", what)

    # -- entry point -----------------------------------------------------

    def parse_program(self) -> ast.Ast:
        out = ast.Ast([], [], [], [], [], [])
        if self.at("eof"):
            raise ParseError("expected declaration", self.peek().span)
        while not self.at("eof"):
            tok = self.peek()
            if tok.kind == "header":
                out.headers.append(self.header_decl())
            elif tok.kind == "ident" and tok.text == "metadata" and self.peek(1).kind == "lbrace":
                out.metadata.append(self.metadata_decl())
            elif tok.kind == "parser":
                out.parsers.append(self.parser_decl())
            elif tok.kind == "table":
                out.tables.append(self.table_decl())
            elif tok.kind == "action":
                out.actions.append(self.action_decl())
            elif tok.kind == "control":
                out.controls.append(self.control_decl())
            else:
                raise ParseError(f"expected declaration, found {_describe(tok)}", tok.span)
        return out

    # -- headers and metadata ---------------------------------------------

    def field_specs(self, owner: str) -> list[ast.FieldSpec]:
        fields: list[ast.FieldSpec] = []
        seen: set[str] = set()
        while self.at("ident"):
            name_tok = self.advance()
            if name_tok.text in seen:
                raise ParseError(
                    f"duplicate field {name_tok.text!r} in {owner}", name_tok.span
                )
            seen.add(name_tok.text)
            self.expect("colon", "':'")
            width_tok = self.expect_int("field width")
            if width_tok.value < 1:
                raise ParseError("field width must be at least 1", width_tok.span)
            self.expect("semi", "';'")
            fields.append(ast.FieldSpec(name_tok.text, width_tok.value, name_tok.span))
        if not fields:
            tok = self.peek()
            raise ParseError(f"expected field declaration, found {_describe(tok)}", tok.span)
        return fields

    def header_decl(self) -> ast.HeaderDecl:
        kw = self.advance()
        name = self.expect_ident("header name")
        self.expect("lbrace", "'{'")
        self.expect("fields", "'fields'")
        self.expect("lbrace", "'{'")
        fields = self.field_specs(f"header {name.text!r}")
        self.expect("rbrace", "'}'")
        self.expect("rbrace", "'}'")
        return ast.HeaderDecl(name.text, fields, kw.span)

    def metadata_decl(self) -> ast.MetadataDecl:
        kw = self.advance()  # the `metadata` identifier
        self.expect("lbrace", "'{'")
        fields = self.field_specs("metadata")
        self.expect("rbrace", "'}'")
        return ast.MetadataDecl(fields, kw.span)

    # -- parser states -----------------------------------------------------

    def next_state(self) -> str:
        tok = self.peek()
        if tok.kind == "stop":
            self.advance()
            return ast.STOP
        if tok.kind == "ident":
            self.advance()
            return tok.text
        raise ParseError(f"expected next state, found {_describe(tok)}", tok.span)

    def parser_decl(self) -> ast.ParserStateDecl:
        kw = self.advance()
        name = self.expect_ident("parser state name")
        self.expect("lbrace", "'{'")
        tok = self.peek()
        body: ast.TransitionBody | ast.SwitchBody
        if tok.kind == "switch":
            self.advance()
            self.expect("lparen", "'('")
            field = self.expect_ident("field name")
            self.expect("rparen", "')'")
            self.expect("lbrace", "'{'")
            cases: list[ast.SwitchCase] = []
            seen: set[int] = set()
            default: str | None = None
            while self.at("case"):
                case_kw = self.advance()
                value = self.expect_int("case constant")
                if value.value in seen:
                    raise ParseError(
                        f"duplicate case constant {value.text}", value.span
                    )
                seen.add(value.value)
                self.expect("colon", "':'")
                nxt = self.next_state()
                self.expect("semi", "';'")
                cases.append(ast.SwitchCase(value.value, nxt, case_kw.span))
            if self.at("default"):
                self.advance()
                self.expect("colon", "':'")
                default = self.next_state()
                self.expect("semi", "';'")
            self.expect("rbrace", "'}'")
            body = ast.SwitchBody(field.text, cases, default)
        elif tok.kind in ("stop", "ident"):
            nxt = self.next_state()
            self.expect("semi", "';'")
            body = ast.TransitionBody(nxt)
        else:
            raise ParseError(
                f"expected parser transition, found {_describe(tok)}", tok.span
            )
        self.expect("rbrace", "'}'")
        return ast.ParserStateDecl(name.text, body, kw.span)

    # -- tables ------------------------------------------------------------

    def ref(self, what: str = "field or header reference") -> ast.RefName:
        first = self.expect_ident(what)
        parts = [first.text]
        if self.at("dot"):
            self.advance()
            parts.append(self.expect_ident("field name").text)
        return ast.RefName(tuple(parts), first.span)

    def table_decl(self) -> ast.TableDecl:
        kw = self.advance()
        name = self.expect_ident("table name")
        self.expect("lbrace", "'{'")
        reads: list[ast.ReadSpec] | None = None
        actions: list[str] | None = None
        max_size: int | None = None
        while not self.at("rbrace"):
            tok = self.peek()
            if tok.kind == "reads":
                if reads is not None:
                    raise ParseError("duplicate reads block", tok.span)
                self.advance()
                self.expect("lbrace", "'{'")
                reads = []
                while not self.at("rbrace"):
                    target = self.ref()
                    self.expect("colon", "':'")
                    kind_tok = self.peek()
                    if kind_tok.kind not in _MATCH_KINDS:
                        raise ParseError(
                            f"expected match kind, found {_describe(kind_tok)}",
                            kind_tok.span,
                        )
                    self.advance()
                    if kind_tok.kind == "valid" and len(target.parts) != 1:
                        raise ParseError(
                            "valid match applies to a header, not a field",
                            kind_tok.span,
                        )
                    self.expect("semi", "';'")
                    reads.append(ast.ReadSpec(target, kind_tok.kind, target.span))
                self.expect("rbrace", "'}'")
            elif tok.kind == "actions":
                if actions is not None:
                    raise ParseError("duplicate actions block", tok.span)
                self.advance()
                self.expect("lbrace", "'{'")
                actions = []
                while not self.at("rbrace"):
                    act = self.expect_ident("action name")
                    self.expect("semi", "';'")
                    actions.append(act.text)
                self.expect("rbrace", "'}'")
            elif tok.kind == "max_size":
                if max_size is not None:
                    raise ParseError("duplicate max_size attribute", tok.span)
                self.advance()
                self.expect("colon", "':'")
                size_tok = self.expect_int("table size")
                if size_tok.value < 1:
                    raise ParseError("max_size must be at least 1", size_tok.span)
                self.expect("semi", "';'")
                max_size = size_tok.value
            else:
                raise ParseError(
                    f"expected table attribute, found {_describe(tok)}", tok.span
                )
        close = self.advance()
        if not actions:
            raise ParseError(
                f"table {name.text!r} declares no actions", close.span
            )
        return ast.TableDecl(
            name.text,
            reads if reads is not None else [],
            actions,
            max_size if max_size is not None else ast.DEFAULT_MAX_SIZE,
            kw.span,
        )

    # -- actions -------------------------------------------------------------

    def action_decl(self) -> ast.ActionDecl:
        kw = self.advance()
        name = self.expect_ident("action name")
        self.expect("lparen", "'('")
        params: list[str] = []
        if self.at("ident"):
            params.append(self.advance().text)
            while self.at("comma"):
                self.advance()
                params.append(self.expect_ident("parameter name").text)
        self.expect("rparen", "')'")
        if len(set(params)) != len(params):
            raise ParseError(f"duplicate parameter in action {name.text!r}", name.span)
        self.expect("lbrace", "'{'")
        body: list[ast.PrimitiveCall] = []
        while not self.at("rbrace"):
            body.append(self.primitive_call())
        self.expect("rbrace", "'}'")
        return ast.ActionDecl(name.text, params, body, kw.span)

    def primitive_call(self) -> ast.PrimitiveCall:
        name = self.expect_ident("primitive name")
        if name.text not in ast.PRIMITIVES:
            raise ParseError(f"unknown primitive {name.text!r}", name.span)
        self.expect("lparen", "'('")
        args: list[ast.Arg] = []
        if not self.at("rparen"):
            args.append(self.arg())
            while self.at("comma"):
                self.advance()
                args.append(self.arg())
        self.expect("rparen", "')'")
        self.expect("semi", "';'")
        return ast.PrimitiveCall(name.text, args, name.span)

    def arg(self) -> ast.Arg:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return ast.ConstArg(tok.value, tok.span)
        if tok.kind == "ident":
            return ast.NameArg(self.ref("argument"))
        raise ParseError(f"expected argument, found {_describe(tok)}", tok.span)

    # -- control --------------------------------------------------------------

    def control_decl(self) -> ast.ControlDecl:
        kw = self.advance()
        name = self.expect_ident("control name")
        self.expect("lparen", "'('")
        self.expect("rparen", "')'")
        self.expect("lbrace", "'{'")
        body = self.stmt_list()
        self.expect("rbrace", "'}'")
        return ast.ControlDecl(name.text, body, kw.span)

    def stmt_list(self) -> list[ast.Stmt]:
        stmts: list[ast.Stmt] = []
        while not self.at("rbrace"):
            stmts.append(self.stmt())
        return stmts

    def stmt(self) -> ast.Stmt:
        tok = self.peek()
        if tok.kind == "table":
            self.advance()
            self.expect("lparen", "'('")
            name = self.expect_ident("table name")
            self.expect("rparen", "')'")
            self.expect("semi", "';'")
            return ast.ApplyStmt(name.text, tok.span)
        if tok.kind == "if":
            self.advance()
            self.expect("lparen", "'('")
            pred = self.pred()
            self.expect("rparen", "')'")
            self.expect("lbrace", "'{'")
            then_body = self.stmt_list()
            self.expect("rbrace", "'}'")
            else_body: list[ast.Stmt] = []
            if self.at("else"):
                self.advance()
                self.expect("lbrace", "'{'")
                else_body = self.stmt_list()
                self.expect("rbrace", "'}'")
            return ast.IfStmt(pred, then_body, else_body, tok.span)
        raise ParseError(f"expected statement, found {_describe(tok)}", tok.span)

    # -- predicates -------------------------------------------------------------

    def pred(self) -> ast.Pred:
        left = self.and_pred()
        while self.at("oror"):
            self.advance()
            left = ast.PredOr(left, self.and_pred())
        return left

    def and_pred(self) -> ast.Pred:
        left = self.unary_pred()
        while self.at("andand"):
            self.advance()
            left = ast.PredAnd(left, self.unary_pred())
        return left

    def unary_pred(self) -> ast.Pred:
        tok = self.peek()
        if tok.kind == "bang":
            self.advance()
            return ast.PredNot(self.unary_pred())
        if tok.kind == "lparen":
            self.advance()
            inner = self.pred()
            self.expect("rparen", "')'")
            return inner
        if tok.kind == "defined":
            self.advance()
            self.expect("lparen", "'('")
            ref = self.ref()
            self.expect("rparen", "')'")
            return ast.PredDefined(ref)
        if tok.kind == "valid":
            self.advance()
            self.expect("lparen", "'('")
            name = self.expect_ident("header name")
            self.expect("rparen", "')'")
            return ast.PredValid(ast.RefName((name.text,), name.span))
        if tok.kind == "miss":
            self.advance()
            self.expect("lparen", "'('")
            name = self.expect_ident("table name")
            self.expect("rparen", "')'")
            return ast.PredMiss(name.text, tok.span)
        if tok.kind == "ident":
            ref = self.ref()
            self.expect("eqeq", "'=='")
            value = self.expect_int("comparison constant")
            return ast.PredEq(ref, value.value)
        raise ParseError(f"expected predicate, found {_describe(tok)}", tok.span)


def parse(tokens: list[Token]) -> ast.Ast:
    """Parse a token list (from tokenize) into an Ast."""
    return _Parser(tokens).parse_program()


def parse_program(src: str) -> ast.Ast:
    """tokenize + parse in one step; the usual entry point."""
    return parse(tokenize(src))
