"""Source-text frontend: lexer, parser, Ast, and pretty-printer."""

from . import ast
from .lexer import Token, tokenize
from .parser import parse, parse_program
from .printer import format_program

__all__ = ["Token", "ast", "format_program", "parse", "parse_program", "tokenize"]
