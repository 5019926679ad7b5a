"""Diagnostics shared by the parser and the checker."""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import Span


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Span

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.col}: {self.code}: {self.message}"


class ParseError(Exception):
    """Raised when source text cannot be parsed into a SourceUnit."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))
