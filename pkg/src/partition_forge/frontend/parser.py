"""Recursive-descent parser producing MiniSol ASTs.

Statement-level panic recovery lets the parser report several syntax
errors in one pass; any error still makes the parse fail as a whole.
Recognized mainline-Solidity constructs outside the dialect (inheritance,
assembly, dynamic arrays, ...) get a dedicated UnsupportedFeature
diagnostic rather than a generic syntax error.
"""

from __future__ import annotations

from . import nodes as n
from .diagnostics import Diagnostic, ParseError
from .tokens import Token, TokenType, UNSUPPORTED_KEYWORDS, tokenize, LexError

_MAX_ERRORS = 20

_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%="}

# binary operator precedence, higher binds tighter
_BIN_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}


class _Halt(Exception):
    """Internal signal: too many errors or unrecoverable position."""


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.pos = 0
        self.diags: list[Diagnostic] = []
        self._next_id = 0

    # ------------------------------------------------------------ plumbing

    def _peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.toks) - 1)
        return self.toks[i]

    def _at(self, value: str) -> bool:
        t = self._peek()
        return t.value == value and t.type in (TokenType.PUNCT, TokenType.KEYWORD)

    def _advance(self) -> Token:
        t = self.toks[self.pos]
        if self.pos < len(self.toks) - 1:
            self.pos += 1
        return t

    def _accept(self, value: str) -> Token | None:
        if self._at(value):
            return self._advance()
        return None

    def _expect(self, value: str) -> Token:
        if self._at(value):
            return self._advance()
        t = self._peek()
        self._error(f"expected {value!r}, found {t.value!r}", t)
        raise _Halt()

    def _expect_ident(self, what: str = "identifier") -> Token:
        t = self._peek()
        if t.type is TokenType.IDENT:
            return self._advance()
        self._error(f"expected {what}, found {t.value!r}", t)
        raise _Halt()

    def _error(self, message: str, tok: Token, code: str = "SyntaxError") -> None:
        self.diags.append(Diagnostic(code, message, n.Span(tok.line, tok.col)))
        if len(self.diags) >= _MAX_ERRORS:
            raise _Halt()

    def _span(self, tok: Token) -> n.Span:
        return n.Span(tok.line, tok.col)

    def _mk(self, cls, tok: Token, **kw):
        node = cls(nid=self._next_id, span=self._span(tok), **kw)
        self._next_id += 1
        return node

    def _check_unsupported(self, tok: Token) -> None:
        if tok.type is TokenType.IDENT and tok.value in UNSUPPORTED_KEYWORDS:
            self._error(
                f"{UNSUPPORTED_KEYWORDS[tok.value]} are outside the supported dialect",
                tok,
                code="UnsupportedFeature",
            )
            raise _Halt()

    def _sync_stmt(self) -> None:
        """Skip to just past the next ';' or to a closing '}'. """
        depth = 0
        while self._peek().type is not TokenType.EOF:
            t = self._peek()
            if t.value == ";" and depth == 0:
                self._advance()
                return
            if t.value == "{":
                depth += 1
            elif t.value == "}":
                if depth == 0:
                    return
                depth -= 1
            self._advance()

    def _sync_member(self) -> None:
        """Skip to the next top-level contract member boundary."""
        depth = 0
        while self._peek().type is not TokenType.EOF:
            t = self._peek()
            if depth == 0 and t.value in ("function", "modifier", "struct", "}"):
                return
            if t.value == "{":
                depth += 1
            elif t.value == "}":
                if depth == 0:
                    return
                depth -= 1
            self._advance()

    # ------------------------------------------------------------ unit

    def parse_unit(self) -> n.SourceUnit:
        first = self._peek()
        unit = self._mk(n.SourceUnit, first)
        try:
            if self._at("pragma"):
                unit.pragma = self._parse_pragma()
            while self._peek().type is not TokenType.EOF:
                t = self._peek()
                if self._at("interface"):
                    unit.interfaces.append(self._parse_interface())
                elif self._at("contract"):
                    unit.contracts.append(self._parse_contract())
                else:
                    self._check_unsupported(t)
                    self._error(
                        f"expected 'contract' or 'interface', found {t.value!r}", t
                    )
                    raise _Halt()
        except _Halt:
            pass
        if self.diags:
            raise ParseError(self.diags)
        return unit

    def _parse_pragma(self) -> str:
        self._expect("pragma")
        self._expect("solidity")
        parts = []
        while not self._at(";") and self._peek().type is not TokenType.EOF:
            parts.append(self._advance().value)
        self._expect(";")
        return "".join(parts)

    # ------------------------------------------------------------ interface

    def _parse_interface(self) -> n.InterfaceDef:
        kw = self._expect("interface")
        name = self._expect_ident("interface name")
        iface = self._mk(n.InterfaceDef, kw, name=name.value)
        if self._at("is"):
            self._error("inheritance is outside the supported dialect",
                        self._peek(), code="UnsupportedFeature")
            raise _Halt()
        self._expect("{")
        while not self._accept("}"):
            iface.functions.append(self._parse_interface_fn())
        return iface

    def _parse_interface_fn(self) -> n.InterfaceFn:
        kw = self._expect("function")
        name = self._expect_ident("function name")
        fn = self._mk(n.InterfaceFn, kw, name=name.value)
        fn.params = self._parse_params()
        self._expect("external")
        if self._accept("returns"):
            fn.returns = self._parse_return_types()
        self._expect(";")
        return fn

    # ------------------------------------------------------------ contract

    def _parse_contract(self) -> n.ContractDef:
        kw = self._expect("contract")
        name = self._expect_ident("contract name")
        contract = self._mk(n.ContractDef, kw, name=name.value)
        t = self._peek()
        if t.type is TokenType.IDENT and t.value == "is":
            self._error("inheritance is outside the supported dialect", t,
                        code="UnsupportedFeature")
            raise _Halt()
        self._expect("{")
        while not self._accept("}"):
            if self._peek().type is TokenType.EOF:
                self._error("unexpected end of file in contract body", self._peek())
                raise _Halt()
            try:
                self._parse_contract_member(contract)
            except _Halt:
                if len(self.diags) >= _MAX_ERRORS:
                    raise
                self._sync_member()
                if self._at("}"):
                    self._advance()
                    break
        return contract

    def _parse_contract_member(self, contract: n.ContractDef) -> None:
        t = self._peek()
        if self._at("struct"):
            sd = self._parse_struct()
            contract.structs.append(sd)
            contract.member_order.append(sd)
        elif self._at("modifier"):
            md = self._parse_modifier()
            contract.modifiers.append(md)
            contract.member_order.append(md)
        elif self._at("function"):
            fd = self._parse_function()
            contract.functions.append(fd)
            contract.member_order.append(fd)
        else:
            self._check_unsupported(t)
            sv = self._parse_state_var()
            contract.state_vars.append(sv)
            contract.member_order.append(sv)

    def _parse_struct(self) -> n.StructDef:
        kw = self._expect("struct")
        name = self._expect_ident("struct name")
        sd = self._mk(n.StructDef, kw, name=name.value)
        self._expect("{")
        while not self._accept("}"):
            ty = self._parse_type()
            fname = self._expect_ident("field name")
            self._expect(";")
            sd.fields.append(n.StructField(ty, fname.value))
        return sd

    def _parse_state_var(self) -> n.StateVarDecl:
        first = self._peek()
        ty = self._parse_type()
        visibility = "private"
        for vis in ("public", "private", "internal"):
            if self._at(vis):
                self._advance()
                visibility = vis
                break
        name = self._expect_ident("state variable name")
        self._expect(";")
        return self._mk(n.StateVarDecl, first, ty=ty, name=name.value,
                        visibility=visibility)

    def _parse_modifier(self) -> n.ModifierDef:
        kw = self._expect("modifier")
        name = self._expect_ident("modifier name")
        md = self._mk(n.ModifierDef, kw, name=name.value)
        if self._at("("):
            md.params = self._parse_params()
        md.body = self._parse_block()
        return md

    def _parse_function(self) -> n.FunctionDef:
        kw = self._expect("function")
        name = self._expect_ident("function name")
        fn = self._mk(n.FunctionDef, kw, name=name.value)
        fn.params = self._parse_params()
        visibility = None
        while True:
            t = self._peek()
            if t.value in ("external", "public", "internal", "private"):
                if visibility is not None:
                    self._error("duplicate visibility specifier", t)
                    raise _Halt()
                visibility = t.value
                self._advance()
            elif t.value in ("view", "pure"):
                # state-mutability markers are accepted and dropped
                self._advance()
            elif self._at("returns"):
                self._advance()
                fn.returns = self._parse_return_types()
            elif t.type is TokenType.IDENT:
                self._check_unsupported(t)
                inv = n.ModifierInvocation(name=self._advance().value)
                if self._at("("):
                    self._advance()
                    while not self._accept(")"):
                        inv.args.append(self._parse_expr())
                        if not self._at(")"):
                            self._expect(",")
                fn.modifiers.append(inv)
            else:
                break
        if visibility is None:
            self._error(f"function {fn.name!r} needs a visibility specifier",
                        self._peek())
            raise _Halt()
        fn.visibility = visibility
        fn.body = self._parse_block()
        return fn

    def _parse_params(self) -> list[n.Param]:
        self._expect("(")
        params: list[n.Param] = []
        while not self._accept(")"):
            ty = self._parse_type()
            name = self._expect_ident("parameter name")
            params.append(n.Param(ty, name.value))
            if not self._at(")"):
                self._expect(",")
        return params

    def _parse_return_types(self) -> list[n.TypeName]:
        self._expect("(")
        types: list[n.TypeName] = []
        while not self._accept(")"):
            types.append(self._parse_type())
            # a named return value is accepted and the name dropped
            if self._peek().type is TokenType.IDENT:
                self._advance()
            if not self._at(")"):
                self._expect(",")
        return types

    # ------------------------------------------------------------ types

    def _parse_type(self) -> n.TypeName:
        t = self._peek()
        base: n.TypeName
        if self._at("mapping"):
            self._advance()
            self._expect("(")
            key = self._parse_type()
            self._expect("=>")
            value = self._parse_type()
            self._expect(")")
            base = n.MappingType(key, value)
        elif self._at("bool"):
            self._advance()
            base = n.BOOL
        elif self._at("address"):
            self._advance()
            base = n.ADDRESS
        elif t.type is TokenType.IDENT:
            self._advance()
            width = _uint_width(t.value)
            if width is not None:
                base = n.UintType(width)
            elif t.value in ("uint", "int") or t.value.startswith("int"):
                self._error(
                    f"integer type {t.value!r} is outside the supported dialect "
                    "(use uint8/16/32/64/128/256)",
                    t, code="UnsupportedFeature")
                raise _Halt()
            elif t.value in ("string", "bytes") or t.value.startswith("bytes"):
                self._error(f"type {t.value!r} is outside the supported dialect",
                            t, code="UnsupportedFeature")
                raise _Halt()
            else:
                # struct or interface reference; the checker resolves which
                base = n.StructType(t.value)
        else:
            self._error(f"expected type, found {t.value!r}", t)
            raise _Halt()

        while self._at("["):
            self._advance()
            size_tok = self._peek()
            if self._at("]"):
                self._error("dynamic arrays are outside the supported dialect",
                            size_tok, code="UnsupportedFeature")
                raise _Halt()
            if size_tok.type is not TokenType.NUMBER:
                self._error("array length must be an integer literal", size_tok)
                raise _Halt()
            self._advance()
            self._expect("]")
            base = n.ArrayType(base, int(size_tok.value, 0))
        return base

    # ------------------------------------------------------------ statements

    def _parse_block(self) -> list[n.Stmt]:
        self._expect("{")
        stmts: list[n.Stmt] = []
        while not self._accept("}"):
            if self._peek().type is TokenType.EOF:
                self._error("unexpected end of file in block", self._peek())
                raise _Halt()
            try:
                stmts.append(self._parse_stmt())
            except _Halt:
                if len(self.diags) >= _MAX_ERRORS:
                    raise
                self._sync_stmt()
        return stmts

    def _parse_stmt_or_block(self) -> list[n.Stmt]:
        if self._at("{"):
            return self._parse_block()
        return [self._parse_stmt()]

    def _parse_stmt(self) -> n.Stmt:
        t = self._peek()
        self._check_unsupported(t)

        if self._at("if"):
            return self._parse_if()
        if self._at("while"):
            kw = self._advance()
            self._expect("(")
            cond = self._parse_expr()
            self._expect(")")
            body = self._parse_stmt_or_block()
            return self._mk(n.While, kw, cond=cond, body=body)
        if self._at("for"):
            return self._parse_for()
        if self._at("require"):
            kw = self._advance()
            self._expect("(")
            cond = self._parse_expr()
            message = None
            if self._accept(","):
                msg_tok = self._peek()
                if msg_tok.type is not TokenType.STRING:
                    self._error("require message must be a string literal", msg_tok)
                    raise _Halt()
                self._advance()
                message = msg_tok.value
            self._expect(")")
            self._expect(";")
            return self._mk(n.Require, kw, cond=cond, message=message)
        if self._at("return"):
            kw = self._advance()
            values = []
            if not self._at(";"):
                values.append(self._parse_expr())
                while self._accept(","):
                    values.append(self._parse_expr())
            self._expect(";")
            return self._mk(n.Return, kw, values=values)
        if self._at("emit"):
            kw = self._advance()
            name = self._expect_ident("event name")
            self._expect("(")
            args = []
            while not self._accept(")"):
                args.append(self._parse_expr())
                if not self._at(")"):
                    self._expect(",")
            self._expect(";")
            return self._mk(n.Emit, kw, event=name.value, args=args)
        if self._at("_"):
            kw = self._advance()
            self._expect(";")
            return self._mk(n.Placeholder, kw)
        if self._at("("):
            return self._parse_tuple_decl()

        if self._starts_type():
            return self._parse_var_decl()
        return self._parse_expr_stmt()

    def _parse_if(self) -> n.If:
        kw = self._expect("if")
        self._expect("(")
        cond = self._parse_expr()
        self._expect(")")
        then = self._parse_stmt_or_block()
        orelse: list[n.Stmt] = []
        if self._accept("else"):
            if self._at("if"):
                orelse = [self._parse_if()]
            else:
                orelse = self._parse_stmt_or_block()
        return self._mk(n.If, kw, cond=cond, then=then, orelse=orelse)

    def _parse_for(self) -> n.For:
        kw = self._expect("for")
        self._expect("(")
        init: n.Stmt | None = None
        if not self._at(";"):
            if self._starts_type():
                init = self._parse_var_decl()
            else:
                init = self._parse_expr_stmt()
        else:
            self._expect(";")
        cond = None
        if not self._at(";"):
            cond = self._parse_expr()
        self._expect(";")
        post: n.Stmt | None = None
        if not self._at(")"):
            post = self._parse_simple_stmt_no_semi()
        self._expect(")")
        body = self._parse_stmt_or_block()
        return self._mk(n.For, kw, init=init, cond=cond, post=post, body=body)

    def _starts_type(self) -> bool:
        t = self._peek()
        if t.value in ("mapping", "bool", "address"):
            return True
        if t.type is not TokenType.IDENT:
            return False
        if _uint_width(t.value) is not None:
            return True
        # "Ident name" where the next token is also an identifier reads as a
        # declaration of a struct-typed local
        nxt = self._peek(1)
        return nxt.type is TokenType.IDENT and self._peek(2).value in (";", "=")

    def _parse_var_decl(self) -> n.VarDecl:
        first = self._peek()
        ty = self._parse_type()
        name = self._expect_ident("variable name")
        init = None
        if self._accept("="):
            init = self._parse_expr()
        self._expect(";")
        return self._mk(n.VarDecl, first, ty=ty, name=name.value, init=init)

    def _parse_tuple_decl(self) -> n.TupleDecl:
        first = self._expect("(")
        vars_: list[tuple[n.TypeName, str]] = []
        while not self._accept(")"):
            ty = self._parse_type()
            name = self._expect_ident("variable name")
            vars_.append((ty, name.value))
            if not self._at(")"):
                self._expect(",")
        self._expect("=")
        init = self._parse_expr()
        self._expect(";")
        if not isinstance(init, n.Call):
            self._error("tuple declaration requires a call initializer", first)
            raise _Halt()
        return self._mk(n.TupleDecl, first, vars=vars_, init=init)

    def _parse_expr_stmt(self) -> n.Stmt:
        stmt = self._parse_simple_stmt_no_semi()
        self._expect(";")
        return stmt

    def _parse_simple_stmt_no_semi(self) -> n.Stmt:
        first = self._peek()
        expr = self._parse_expr()
        t = self._peek()
        if t.value in _ASSIGN_OPS and t.type is TokenType.PUNCT:
            op = self._advance().value
            value = self._parse_expr()
            return self._mk(n.Assign, first, target=expr, op=op, value=value)
        if t.value in ("++", "--") and t.type is TokenType.PUNCT:
            self._advance()
            one = self._mk(n.IntLit, t, value=1)
            op = "+=" if t.value == "++" else "-="
            return self._mk(n.Assign, first, target=expr, op=op, value=one)
        return self._mk(n.ExprStmt, first, expr=expr)

    # ------------------------------------------------------------ expressions

    def _parse_expr(self, min_prec: int = 1) -> n.Expr:
        left = self._parse_unary()
        while True:
            t = self._peek()
            prec = _BIN_PREC.get(t.value) if t.type is TokenType.PUNCT else None
            if prec is None or prec < min_prec:
                return left
            self._advance()
            right = self._parse_expr(prec + 1)
            left = self._mk(n.Binary, t, op=t.value, left=left, right=right)

    def _parse_unary(self) -> n.Expr:
        t = self._peek()
        if t.value in ("!", "-") and t.type is TokenType.PUNCT:
            self._advance()
            operand = self._parse_unary()
            return self._mk(n.Unary, t, op=t.value, operand=operand)
        return self._parse_postfix()

    def _parse_postfix(self) -> n.Expr:
        expr = self._parse_primary()
        while True:
            if self._at("."):
                self._advance()
                name = self._peek()
                if name.type not in (TokenType.IDENT, TokenType.KEYWORD):
                    self._error("expected member name", name)
                    raise _Halt()
                self._advance()
                expr = self._mk(n.Member, name, obj=expr, name=name.value)
            elif self._at("["):
                tok = self._advance()
                key = self._parse_expr()
                self._expect("]")
                expr = self._mk(n.Index, tok, obj=expr, key=key)
            elif self._at("("):
                tok = self._advance()
                args = []
                while not self._accept(")"):
                    args.append(self._parse_expr())
                    if not self._at(")"):
                        self._expect(",")
                expr = self._make_call(expr, args, tok)
            else:
                return expr

    def _make_call(self, callee: n.Expr, args: list[n.Expr], tok: Token) -> n.Expr:
        # type-conversion syntax: uint64(x), address(x)
        if isinstance(callee, n.Name):
            width = _uint_width(callee.ident)
            if width is not None:
                return self._cast(n.UintType(width), args, tok)
        return self._mk(n.Call, tok, callee=callee, args=args)

    def _cast(self, ty: n.TypeName, args: list[n.Expr], tok: Token) -> n.Expr:
        if len(args) != 1:
            self._error("type conversion takes exactly one argument", tok)
            raise _Halt()
        return self._mk(n.Cast, tok, ty=ty, operand=args[0])

    def _parse_primary(self) -> n.Expr:
        t = self._peek()
        if t.type is TokenType.NUMBER:
            self._advance()
            return self._mk(n.IntLit, t, value=int(t.value, 0))
        if t.type is TokenType.STRING:
            self._advance()
            return self._mk(n.StrLit, t, value=t.value)
        if self._at("true") or self._at("false"):
            self._advance()
            return self._mk(n.BoolLit, t, value=(t.value == "true"))
        if self._at("address"):
            self._advance()
            self._expect("(")
            operand = self._parse_expr()
            self._expect(")")
            return self._mk(n.Cast, t, ty=n.ADDRESS, operand=operand)
        if self._at("("):
            self._advance()
            inner = self._parse_expr()
            self._expect(")")
            return inner
        if t.type is TokenType.IDENT or t.value in ("msg", "block", "this"):
            self._advance()
            return self._mk(n.Name, t, ident=t.value)
        self._check_unsupported(t)
        self._error(f"expected expression, found {t.value!r}", t)
        raise _Halt()


def _uint_width(word: str) -> int | None:
    if word.startswith("uint") and word[4:].isdigit():
        width = int(word[4:])
        if width in n.UINT_WIDTHS:
            return width
    return None


def parse(source: str) -> n.SourceUnit:
    """Parse MiniSol source text into a SourceUnit.

    Raises ParseError (carrying one or more diagnostics) on failure;
    lexer errors are wrapped into the same exception type.
    """
    try:
        return Parser(source).parse_unit()
    except LexError as e:
        raise ParseError(
            [Diagnostic("SyntaxError", e.message, n.Span(e.line, e.col))]
        ) from None
