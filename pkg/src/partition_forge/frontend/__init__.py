"""MiniSol frontend: lexing, parsing, canonical emission, checking."""

from . import nodes
from .checker import Analysis, analyze, check
from .diagnostics import Diagnostic, ParseError
from .parser import parse
from .printer import emit, expr_text, function_header
from .solc import SolcAdapter, solc_check

__all__ = [
    "nodes",
    "parse",
    "emit",
    "expr_text",
    "function_header",
    "check",
    "analyze",
    "Analysis",
    "Diagnostic",
    "ParseError",
    "SolcAdapter",
    "solc_check",
]
