"""Tokenizer for MiniSol source text."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto


class TokenType(Enum):
    IDENT = auto()
    NUMBER = auto()
    STRING = auto()
    KEYWORD = auto()
    PUNCT = auto()
    EOF = auto()


KEYWORDS = {
    "pragma", "solidity", "contract", "interface", "struct", "modifier",
    "function", "mapping", "returns", "return", "require", "if", "else",
    "while", "for", "emit", "true", "false", "bool", "address",
    "public", "private", "internal", "external", "view", "pure",
}

# multi-char before single-char, longest match first
PUNCTUATIONS = [
    "=>", "++", "--", "+=", "-=", "*=", "/=", "%=",
    "==", "!=", "<=", ">=", "&&", "||",
    "{", "}", "(", ")", "[", "]", ";", ",", ".", "=",
    "<", ">", "+", "-", "*", "/", "%", "!", "_", "^",
]

UNSUPPORTED_KEYWORDS = {
    "is": "inheritance",
    "assembly": "inline assembly",
    "delete": "delete",
    "try": "try/catch",
    "catch": "try/catch",
    "constructor": "constructors",
    "event": "event declarations",
    "enum": "enum declarations",
    "library": "libraries",
    "using": "using-for directives",
    "payable": "payable functions",
    "new": "contract creation",
}


@dataclass
class Token:
    type: TokenType
    value: str
    line: int
    col: int

    def __repr__(self) -> str:
        return f"Token({self.type.name}, {self.value!r}, {self.line}:{self.col})"


class LexError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class Lexer:
    def __init__(self, source: str):
        self.source = source
        self.pos = 0
        self.line = 1
        self.col = 1

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.source[i] if i < len(self.source) else ""

    def _advance(self, count: int = 1) -> None:
        for _ in range(count):
            if self.pos < len(self.source):
                if self.source[self.pos] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.pos += 1

    def _skip_trivia(self) -> None:
        while self.pos < len(self.source):
            c = self._peek()
            if c in " \t\r\n":
                self._advance()
            elif c == "/" and self._peek(1) == "/":
                while self.pos < len(self.source) and self._peek() != "\n":
                    self._advance()
            elif c == "/" and self._peek(1) == "*":
                self._advance(2)
                while self.pos < len(self.source) and not (
                    self._peek() == "*" and self._peek(1) == "/"
                ):
                    self._advance()
                self._advance(2)
            else:
                return

    def tokens(self) -> list[Token]:
        out = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.type is TokenType.EOF:
                return out

    def _next(self) -> Token:
        self._skip_trivia()
        line, col = self.line, self.col
        if self.pos >= len(self.source):
            return Token(TokenType.EOF, "", line, col)
        c = self._peek()

        if c.isdigit():
            return self._read_number(line, col)
        if c.isalpha() or c == "_":
            return self._read_word(line, col)
        if c == '"':
            return self._read_string(line, col)

        for p in PUNCTUATIONS:
            if self.source.startswith(p, self.pos):
                self._advance(len(p))
                return Token(TokenType.PUNCT, p, line, col)
        raise LexError(f"unexpected character {c!r}", line, col)

    def _read_number(self, line: int, col: int) -> Token:
        start = self.pos
        if self._peek() == "0" and self._peek(1) in "xX":
            self._advance(2)
            while self._peek() and self._peek() in "0123456789abcdefABCDEF":
                self._advance()
        else:
            while self._peek().isdigit():
                self._advance()
        return Token(TokenType.NUMBER, self.source[start:self.pos], line, col)

    def _read_word(self, line: int, col: int) -> Token:
        start = self.pos
        while self._peek().isalnum() or self._peek() == "_":
            self._advance()
        word = self.source[start:self.pos]
        if word == "_":
            # modifier body placeholder, surfaced as punctuation
            return Token(TokenType.PUNCT, "_", line, col)
        if word in KEYWORDS:
            return Token(TokenType.KEYWORD, word, line, col)
        return Token(TokenType.IDENT, word, line, col)

    def _read_string(self, line: int, col: int) -> Token:
        self._advance()
        start = self.pos
        while self.pos < len(self.source) and self._peek() != '"':
            if self._peek() == "\n":
                raise LexError("unterminated string literal", line, col)
            self._advance()
        if self.pos >= len(self.source):
            raise LexError("unterminated string literal", line, col)
        value = self.source[start:self.pos]
        self._advance()
        return Token(TokenType.STRING, value, line, col)


def tokenize(source: str) -> list[Token]:
    return Lexer(source).tokens()
