"""Hand-written lexer for the packet-processing language.

Tokens: identifiers, integer literals (decimal and 0x hex), the punctuation
``{ } ( ) : ; , ! .``, the operators ``== && ||`` and the keyword set below.
``//`` starts a comment that runs to end of line. Anything else is a
LexError carrying the offending position.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import LexError, Span

KEYWORDS = frozenset(
    [
        "header",
        "fields",
        "parser",
        "switch",
        "case",
        "default",
        "stop",
        "table",
        "reads",
        "actions",
        "max_size",
        "action",
        "control",
        "if",
        "else",
        "exact",
        "ternary",
        "valid",
        "lpm",
        "defined",
        "miss",
    ]
)

# single-character punctuation -> token kind
_PUNCT = {
    "{": "lbrace",
    "}": "rbrace",
    "(": "lparen",
    ")": "rparen",
    ":": "colon",
    ";": "semi",
    ",": "comma",
    "!": "bang",
    ".": "dot",
}


@dataclass(frozen=True)
class Token:
    kind: str  # punctuation name, "eqeq", "andand", "oror", "int", "ident", keyword, "eof"
    text: str
    value: int | None  # set for "int" tokens
    span: Span

    def __repr__(self) -> str:  # compact, used in parser error messages
        return f"{self.kind}({self.text!r})@{self.span}"


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(text: str) -> list[Token]:
    """Lex `text` into a token list ending with an `eof` token."""
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
            continue
        span = Span(line, col)
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            kind = word if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, None, span))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            if ch == "0" and i + 1 < n and text[i + 1] in "xX":
                j = i + 2
                while j < n and text[j] in "0123456789abcdefABCDEF":
                    j += 1
                if j == i + 2:
                    raise LexError("hex literal needs at least one digit", span)
                value = int(text[i:j], 16)
            else:
                while j < n and text[j].isdigit():
                    j += 1
                value = int(text[i:j], 10)
            if j < n and _is_ident_start(text[j]):
                raise LexError(f"malformed integer literal {text[i:j + 1]!r}", span)
            if value >= 1 << 64:
                raise LexError("integer literal exceeds 64 bits", span)
            tokens.append(Token("int", text[i:j], value, span))
            col += j - i
            i = j
            continue
        if ch == "=" and i + 1 < n and text[i + 1] == "=":
            tokens.append(Token("eqeq", "==", None, span))
            i += 2
            col += 2
            continue
        if ch == "&" and i + 1 < n and text[i + 1] == "&":
            tokens.append(Token("andand", "&&", None, span))
            i += 2
            col += 2
            continue
        if ch == "|" and i + 1 < n and text[i + 1] == "|":
            tokens.append(Token("oror", "||", None, span))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, None, span))
            i += 1
            col += 1
            continue
        raise LexError(f"unexpected character {ch!r}", span)
    tokens.append(Token("eof", "", None, Span(line, col)))
    return tokens
