"""Canonical source emission.

The printer fixes one style: two-space indentation, one statement per
line, always-braced branches, minimal parentheses. Emitting a parsed
unit and re-parsing yields a structurally identical AST, and emission
is a fixed point (emit(parse(emit(u))) == emit(u)).

``node_ids=True`` appends ``// @id:<nid>`` markers to statement lines,
which is how debug output ties report node ids back to source.
"""

from __future__ import annotations

from . import nodes as n
from .parser import _BIN_PREC

_INDENT = "  "


def emit(node, node_ids: bool = False) -> str:
    p = _Printer(node_ids)
    if isinstance(node, n.SourceUnit):
        p.unit(node)
    elif isinstance(node, n.ContractDef):
        p.contract(node)
    elif isinstance(node, n.InterfaceDef):
        p.interface(node)
    elif isinstance(node, n.FunctionDef):
        p.function(node, 0)
    elif isinstance(node, n.ModifierDef):
        p.modifier(node, 0)
    elif isinstance(node, n.Stmt):
        p.stmt(node, 0)
    elif isinstance(node, n.Expr):
        return expr_text(node)
    else:
        raise TypeError(f"cannot emit {type(node).__name__}")
    return "".join(p.out)


def expr_text(e: n.Expr) -> str:
    return _expr(e, 0)


class _Printer:
    def __init__(self, node_ids: bool):
        self.node_ids = node_ids
        self.out: list[str] = []

    def _line(self, depth: int, text: str, nid: int | None = None) -> None:
        mark = f" // @id:{nid}" if self.node_ids and nid is not None else ""
        self.out.append(f"{_INDENT * depth}{text}{mark}\n")

    # ------------------------------------------------------------ top level

    def unit(self, u: n.SourceUnit) -> None:
        if u.pragma:
            self._line(0, f"pragma solidity {u.pragma};")
            self.out.append("\n")
        first = True
        for iface in u.interfaces:
            if not first:
                self.out.append("\n")
            self.interface(iface)
            first = False
        for c in u.contracts:
            if not first:
                self.out.append("\n")
            self.contract(c)
            first = False

    def interface(self, iface: n.InterfaceDef) -> None:
        self._line(0, f"interface {iface.name} {{")
        for fn in iface.functions:
            params = ", ".join(f"{p.ty} {p.name}" for p in fn.params)
            rets = ""
            if fn.returns:
                rets = " returns (" + ", ".join(str(t) for t in fn.returns) + ")"
            self._line(1, f"function {fn.name}({params}) external{rets};")
        self._line(0, "}")

    def contract(self, c: n.ContractDef) -> None:
        self._line(0, f"contract {c.name} {{")
        members = c.member_order if c.member_order else (
            list(c.state_vars) + list(c.structs) + list(c.modifiers)
            + list(c.functions)
        )
        prev = None
        for m in members:
            both_vars = isinstance(m, n.StateVarDecl) and isinstance(
                prev, n.StateVarDecl
            )
            if prev is not None and not both_vars:
                self.out.append("\n")
            if isinstance(m, n.StateVarDecl):
                self._line(1, f"{m.ty} {m.visibility} {m.name};", m.nid)
            elif isinstance(m, n.StructDef):
                self.struct(m, 1)
            elif isinstance(m, n.ModifierDef):
                self.modifier(m, 1)
            elif isinstance(m, n.FunctionDef):
                self.function(m, 1)
            prev = m
        self._line(0, "}")

    def struct(self, sd: n.StructDef, depth: int) -> None:
        self._line(depth, f"struct {sd.name} {{")
        for f in sd.fields:
            self._line(depth + 1, f"{f.ty} {f.name};")
        self._line(depth, "}")

    def modifier(self, md: n.ModifierDef, depth: int) -> None:
        params = ", ".join(f"{p.ty} {p.name}" for p in md.params)
        paren = f"({params})" if md.params else "()"
        self._line(depth, f"modifier {md.name}{paren} {{")
        self.block(md.body, depth + 1)
        self._line(depth, "}")

    def function(self, fn: n.FunctionDef, depth: int) -> None:
        self._line(depth, function_header(fn) + " {", fn.nid)
        self.block(fn.body, depth + 1)
        self._line(depth, "}")

    # ------------------------------------------------------------ statements

    def block(self, stmts: list[n.Stmt], depth: int) -> None:
        for s in stmts:
            self.stmt(s, depth)

    def stmt(self, s: n.Stmt, depth: int) -> None:
        if isinstance(s, n.VarDecl):
            if s.init is None:
                self._line(depth, f"{s.ty} {s.name};", s.nid)
            else:
                self._line(depth, f"{s.ty} {s.name} = {_expr(s.init, 0)};", s.nid)
        elif isinstance(s, n.TupleDecl):
            decls = ", ".join(f"{ty} {name}" for ty, name in s.vars)
            self._line(depth, f"({decls}) = {_expr(s.init, 0)};", s.nid)
        elif isinstance(s, n.Assign):
            target = _expr(s.target, 0)
            if s.op in ("+=", "-=") and isinstance(s.value, n.IntLit) \
                    and s.value.value == 1:
                suffix = "++" if s.op == "+=" else "--"
                self._line(depth, f"{target}{suffix};", s.nid)
            else:
                self._line(depth, f"{target} {s.op} {_expr(s.value, 0)};", s.nid)
        elif isinstance(s, n.If):
            head = f"if ({_expr(s.cond, 0)})"
            if not s.then and not s.orelse:
                self._line(depth, head + " {}", s.nid)
            elif not s.then:
                self._line(depth, head + " {} else {", s.nid)
                self.block(s.orelse, depth + 1)
                self._line(depth, "}")
            else:
                self._line(depth, head + " {", s.nid)
                self.block(s.then, depth + 1)
                if s.orelse:
                    self._line(depth, "} else {")
                    self.block(s.orelse, depth + 1)
                self._line(depth, "}")
        elif isinstance(s, n.While):
            head = f"while ({_expr(s.cond, 0)})"
            if not s.body:
                self._line(depth, head + " {}", s.nid)
            else:
                self._line(depth, head + " {", s.nid)
                self.block(s.body, depth + 1)
                self._line(depth, "}")
        elif isinstance(s, n.For):
            init = _stmt_inline(s.init) if s.init is not None else ""
            cond = _expr(s.cond, 0) if s.cond is not None else ""
            post = _stmt_inline(s.post) if s.post is not None else ""
            head = f"for ({init}; {cond}; {post})"
            if not s.body:
                self._line(depth, head + " {}", s.nid)
            else:
                self._line(depth, head + " {", s.nid)
                self.block(s.body, depth + 1)
                self._line(depth, "}")
        elif isinstance(s, n.Require):
            if s.message is None:
                self._line(depth, f"require({_expr(s.cond, 0)});", s.nid)
            else:
                self._line(
                    depth, f'require({_expr(s.cond, 0)}, "{s.message}");', s.nid
                )
        elif isinstance(s, n.Return):
            if s.values:
                vals = ", ".join(_expr(v, 0) for v in s.values)
                self._line(depth, f"return {vals};", s.nid)
            else:
                self._line(depth, "return;", s.nid)
        elif isinstance(s, n.ExprStmt):
            self._line(depth, f"{_expr(s.expr, 0)};", s.nid)
        elif isinstance(s, n.Emit):
            args = ", ".join(_expr(a, 0) for a in s.args)
            self._line(depth, f"emit {s.event}({args});", s.nid)
        elif isinstance(s, n.Placeholder):
            self._line(depth, "_;", s.nid)
        else:
            raise TypeError(f"cannot emit statement {type(s).__name__}")


def function_header(fn: n.FunctionDef) -> str:
    params = ", ".join(f"{p.ty} {p.name}" for p in fn.params)
    parts = [f"function {fn.name}({params})", fn.visibility]
    for inv in fn.modifiers:
        if inv.args:
            parts.append(f"{inv.name}({', '.join(_expr(a, 0) for a in inv.args)})")
        else:
            parts.append(inv.name)
    if fn.returns:
        parts.append("returns (" + ", ".join(str(t) for t in fn.returns) + ")")
    return " ".join(parts)


def _stmt_inline(s: n.Stmt) -> str:
    if isinstance(s, n.VarDecl) and s.init is not None:
        return f"{s.ty} {s.name} = {_expr(s.init, 0)}"
    if isinstance(s, n.Assign):
        target = _expr(s.target, 0)
        if s.op in ("+=", "-=") and isinstance(s.value, n.IntLit) \
                and s.value.value == 1:
            return f"{target}{'++' if s.op == '+=' else '--'}"
        return f"{target} {s.op} {_expr(s.value, 0)}"
    if isinstance(s, n.ExprStmt):
        return _expr(s.expr, 0)
    raise TypeError(f"cannot inline statement {type(s).__name__}")


_UNARY_PREC = 7
_POSTFIX_PREC = 8


def _expr(e: n.Expr, parent_prec: int) -> str:
    if isinstance(e, n.IntLit):
        return str(e.value)
    if isinstance(e, n.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, n.StrLit):
        return f'"{e.value}"'
    if isinstance(e, n.Name):
        return e.ident
    if isinstance(e, n.Member):
        return f"{_expr(e.obj, _POSTFIX_PREC)}.{e.name}"
    if isinstance(e, n.Index):
        return f"{_expr(e.obj, _POSTFIX_PREC)}[{_expr(e.key, 0)}]"
    if isinstance(e, n.Cast):
        return f"{e.ty}({_expr(e.operand, 0)})"
    if isinstance(e, n.Call):
        args = ", ".join(_expr(a, 0) for a in e.args)
        return f"{_expr(e.callee, _POSTFIX_PREC)}({args})"
    if isinstance(e, n.Unary):
        inner = _expr(e.operand, _UNARY_PREC)
        text = f"{e.op}{inner}"
        return f"({text})" if parent_prec > _UNARY_PREC else text
    if isinstance(e, n.Binary):
        prec = _BIN_PREC[e.op]
        left = _expr(e.left, prec)
        right = _expr(e.right, prec + 1)
        text = f"{left} {e.op} {right}"
        return f"({text})" if parent_prec > prec else text
    raise TypeError(f"cannot emit expression {type(e).__name__}")
