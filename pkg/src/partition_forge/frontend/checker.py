"""Name resolution and type checking.

``analyze`` builds symbol tables and an expression-type table and
collects diagnostics; ``check`` is the thin public wrapper returning
just the diagnostics. Downstream analyses (dependence graphs, symbolic
execution) consume the Analysis object rather than re-deriving types.

Dialect rules enforced here beyond plain typing:
  - calls may appear only as a statement's direct value (declaration
    initializer, assignment RHS, return value, or expression statement),
  - functions named ``*_priv`` or ``*_callback`` must be internal,
  - locals may not shadow anything visible at their declaration point,
  - mapping nesting is at most two deep and mapping keys are scalar.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import nodes as n
from .diagnostics import Diagnostic

UINT256 = n.UintType(256)


@dataclass(frozen=True)
class ContractRefType(n.TypeName):
    """Type of ``this``; only valid under address(...)."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass
class ContractScope:
    contract: n.ContractDef
    state_vars: dict[str, n.TypeName] = field(default_factory=dict)
    state_var_decls: dict[str, n.StateVarDecl] = field(default_factory=dict)
    structs: dict[str, n.StructDef] = field(default_factory=dict)
    modifiers: dict[str, n.ModifierDef] = field(default_factory=dict)
    functions: dict[str, n.FunctionDef] = field(default_factory=dict)


@dataclass
class FunctionScope:
    fn: n.FunctionDef
    params: dict[str, n.TypeName] = field(default_factory=dict)
    locals: dict[str, n.TypeName] = field(default_factory=dict)

    def var_type(self, name: str) -> n.TypeName | None:
        if name in self.params:
            return self.params[name]
        return self.locals.get(name)


@dataclass
class Analysis:
    unit: n.SourceUnit
    diagnostics: list[Diagnostic] = field(default_factory=list)
    interfaces: dict[str, n.InterfaceDef] = field(default_factory=dict)
    scopes: dict[str, ContractScope] = field(default_factory=dict)
    fn_scopes: dict[int, FunctionScope] = field(default_factory=dict)  # by fn nid
    expr_types: dict[int, n.TypeName] = field(default_factory=dict)  # by expr nid

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def scope_of(self, contract: n.ContractDef) -> ContractScope:
        return self.scopes[contract.name]

    def fn_scope(self, fn: n.FunctionDef) -> FunctionScope:
        return self.fn_scopes[fn.nid]

    def type_of(self, e: n.Expr) -> n.TypeName | None:
        return self.expr_types.get(e.nid)


def check(unit: n.SourceUnit) -> list[Diagnostic]:
    """Type-check a unit; empty list means the unit is well formed."""
    return analyze(unit).diagnostics


def analyze(unit: n.SourceUnit) -> Analysis:
    return _Checker(unit).run()


class _Checker:
    def __init__(self, unit: n.SourceUnit):
        self.a = Analysis(unit)

    def _diag(self, code: str, message: str, node) -> None:
        span = node.span if isinstance(node, n.Node) else n.Span(0, 0)
        self.a.diagnostics.append(Diagnostic(code, message, span))

    # ------------------------------------------------------------ driver

    def run(self) -> Analysis:
        for iface in self.a.unit.interfaces:
            if iface.name in self.a.interfaces:
                self._diag("DuplicateName", f"interface {iface.name!r} redeclared",
                           iface)
            self.a.interfaces[iface.name] = iface
        for contract in self.a.unit.contracts:
            if contract.name in self.a.scopes or contract.name in self.a.interfaces:
                self._diag("DuplicateName",
                           f"contract {contract.name!r} redeclared", contract)
                continue
            self._collect_contract(contract)
        for contract in self.a.unit.contracts:
            if contract.name in self.a.scopes:
                self._check_contract(self.a.scopes[contract.name])
        return self.a

    def _collect_contract(self, contract: n.ContractDef) -> None:
        scope = ContractScope(contract)
        self.a.scopes[contract.name] = scope
        for sd in contract.structs:
            if sd.name in scope.structs:
                self._diag("DuplicateName", f"struct {sd.name!r} redeclared", sd)
            scope.structs[sd.name] = sd
        for sv in contract.state_vars:
            if sv.name in scope.state_vars:
                self._diag("DuplicateName",
                           f"state variable {sv.name!r} redeclared", sv)
            ty = self._resolve_type(sv.ty, scope, sv, allow_mapping=True)
            scope.state_vars[sv.name] = ty
            scope.state_var_decls[sv.name] = sv
        for md in contract.modifiers:
            if md.name in scope.modifiers:
                self._diag("DuplicateName", f"modifier {md.name!r} redeclared", md)
            scope.modifiers[md.name] = md
        for fn in contract.functions:
            if fn.name in scope.functions:
                self._diag("DuplicateName", f"function {fn.name!r} redeclared", fn)
            scope.functions[fn.name] = fn

    # ------------------------------------------------------------ types

    def _resolve_type(self, ty: n.TypeName, scope: ContractScope, node,
                      allow_mapping: bool = False, _depth: int = 0) -> n.TypeName:
        if isinstance(ty, n.MappingType):
            if not allow_mapping:
                self._diag("TypeMismatch",
                           "mapping types are only valid for state variables",
                           node)
                return ty
            if _depth >= 2:
                self._diag("UnsupportedFeature",
                           "mappings nest at most two levels deep", node)
                return ty
            if not isinstance(ty.key, (n.UintType, n.AddressType)):
                self._diag("TypeMismatch",
                           f"mapping key must be uintN or address, got {ty.key}",
                           node)
            value = self._resolve_type(ty.value, scope, node,
                                       allow_mapping=True, _depth=_depth + 1)
            return n.MappingType(ty.key, value)
        if isinstance(ty, n.ArrayType):
            if ty.length <= 0:
                self._diag("TypeMismatch", "array length must be positive", node)
            elem = self._resolve_type(ty.elem, scope, node)
            return n.ArrayType(elem, ty.length)
        if isinstance(ty, n.StructType):
            if ty.name in scope.structs:
                return ty
            if ty.name in self.a.interfaces:
                return n.InterfaceType(ty.name)
            self._diag("UnresolvedName", f"unknown type {ty.name!r}", node)
            return ty
        return ty

    # ------------------------------------------------------------ functions

    def _check_contract(self, scope: ContractScope) -> None:
        for md in scope.contract.modifiers:
            self._check_modifier(md, scope)
        for fn in scope.contract.functions:
            self._check_function(fn, scope)

    def _check_modifier(self, md: n.ModifierDef, scope: ContractScope) -> None:
        fscope = FunctionScope(fn=None)  # type: ignore[arg-type]
        for p in md.params:
            fscope.params[p.name] = self._resolve_type(p.ty, scope, md)
        placeholders = sum(
            1 for s in n.walk_stmts(md.body) if isinstance(s, n.Placeholder)
        )
        if placeholders != 1:
            self._diag("UnsupportedFeature",
                       f"modifier {md.name!r} must contain exactly one '_;'", md)
        env = _Env(self, scope, fscope, returns=[])
        env.check_block(md.body, set())

    def _check_function(self, fn: n.FunctionDef, scope: ContractScope) -> None:
        fscope = FunctionScope(fn)
        self.a.fn_scopes[fn.nid] = fscope
        if (fn.name.endswith("_priv") or fn.name.endswith("_callback")) \
                and fn.visibility not in ("internal", "private"):
            self._diag(
                "VisibilityViolation",
                f"function {fn.name!r} must be internal", fn)
        for p in fn.params:
            ty = self._resolve_type(p.ty, scope, fn)
            if isinstance(ty, n.MappingType):
                self._diag("TypeMismatch",
                           f"parameter {p.name!r} cannot have mapping type", fn)
            if p.name in fscope.params:
                self._diag("DuplicateName", f"parameter {p.name!r} redeclared", fn)
            if p.name in scope.state_vars:
                self._diag("DuplicateName",
                           f"parameter {p.name!r} shadows a state variable", fn)
            fscope.params[p.name] = ty
        fn_returns = [self._resolve_type(t, scope, fn) for t in fn.returns]
        fn.returns = fn_returns
        for inv in fn.modifiers:
            md = scope.modifiers.get(inv.name)
            if md is None:
                self._diag("UnresolvedName", f"unknown modifier {inv.name!r}", fn)
                continue
            if len(inv.args) != len(md.params):
                self._diag("ArityMismatch",
                           f"modifier {inv.name!r} expects {len(md.params)} "
                           f"argument(s), got {len(inv.args)}", fn)
                continue
            for arg in inv.args:
                if not isinstance(arg, (n.Name, n.IntLit, n.BoolLit)):
                    self._diag(
                        "UnsupportedFeature",
                        "modifier arguments must be identifiers or literals", fn)
        env = _Env(self, scope, fscope, returns=fn_returns)
        env.check_block(fn.body, set())
        if fn_returns and not _always_returns(fn.body):
            self._diag("ReturnMismatch",
                       f"function {fn.name!r} does not return on all paths", fn)


def _always_returns(stmts: list[n.Stmt]) -> bool:
    for s in stmts:
        if isinstance(s, n.Return):
            return True
        if isinstance(s, n.If) and s.orelse:
            if _always_returns(s.then) and _always_returns(s.orelse):
                return True
    return False


class _Env:
    """Scoped statement/expression checker for one function or modifier."""

    def __init__(self, checker: _Checker, scope: ContractScope,
                 fscope: FunctionScope, returns: list[n.TypeName]):
        self.c = checker
        self.a = checker.a
        self.scope = scope
        self.fscope = fscope
        self.returns = returns

    def _diag(self, code: str, message: str, node) -> None:
        self.c._diag(code, message, node)

    # ------------------------------------------------------------ statements

    def check_block(self, stmts: list[n.Stmt], visible: set[str]) -> None:
        introduced: list[str] = []
        for s in stmts:
            self.check_stmt(s, visible, introduced)
        for name in introduced:
            visible.discard(name)

    def _declare(self, name: str, ty: n.TypeName, visible: set[str],
                 introduced: list[str], node) -> None:
        if name in visible or name in self.fscope.params \
                or name in self.scope.state_vars:
            self._diag("DuplicateName",
                       f"declaration of {name!r} shadows a visible name", node)
            return
        visible.add(name)
        introduced.append(name)
        # name-keyed function-wide table; sibling scopes reusing a name must
        # agree on the type, otherwise downstream name-based dataflow breaks
        prior = self.fscope.locals.get(name)
        if prior is not None and prior != ty:
            self._diag("DuplicateName",
                       f"local {name!r} redeclared with a different type", node)
        self.fscope.locals[name] = ty

    def check_stmt(self, s: n.Stmt, visible: set[str],
                   introduced: list[str]) -> None:
        if isinstance(s, n.VarDecl):
            ty = self.c._resolve_type(s.ty, self.scope, s)
            if isinstance(ty, n.MappingType):
                self._diag("TypeMismatch",
                           "locals cannot have mapping type", s)
            if s.init is not None:
                self.check_value(s.init, ty)
            self._declare(s.name, ty, visible, introduced, s)
        elif isinstance(s, n.TupleDecl):
            tys = [self.c._resolve_type(t, self.scope, s) for t, _ in s.vars]
            rets = self.check_call(s.init, multi_ok=True)
            if rets is not None:
                if len(rets) != len(tys):
                    self._diag("ArityMismatch",
                               f"call returns {len(rets)} value(s), "
                               f"{len(tys)} expected", s)
                else:
                    for got, want in zip(rets, tys):
                        self._require_assignable(got, want, s)
            for (_, name), ty in zip(s.vars, tys):
                self._declare(name, ty, visible, introduced, s)
        elif isinstance(s, n.Assign):
            tty = self.check_lvalue(s.target)
            if s.op != "=" and tty is not None \
                    and not isinstance(tty, n.UintType):
                self._diag("TypeMismatch",
                           f"operator {s.op} needs an integer target", s)
            self.check_value(s.value, tty)
        elif isinstance(s, n.If):
            self.check_expr(s.cond, n.BOOL)
            self.check_block(s.then, visible)
            self.check_block(s.orelse, visible)
        elif isinstance(s, n.While):
            self.check_expr(s.cond, n.BOOL)
            self.check_block(s.body, visible)
        elif isinstance(s, n.For):
            introduced_for: list[str] = []
            if s.init is not None:
                self.check_stmt(s.init, visible, introduced_for)
            if s.cond is not None:
                self.check_expr(s.cond, n.BOOL)
            if s.post is not None:
                self.check_stmt(s.post, visible, introduced_for)
            self.check_block(s.body, visible)
            for name in introduced_for:
                visible.discard(name)
        elif isinstance(s, n.Require):
            self.check_expr(s.cond, n.BOOL)
        elif isinstance(s, n.Return):
            if len(s.values) != len(self.returns):
                self._diag("ReturnMismatch",
                           f"return of {len(s.values)} value(s), "
                           f"{len(self.returns)} declared", s)
            else:
                for v, want in zip(s.values, self.returns):
                    self.check_value(v, want)
        elif isinstance(s, n.ExprStmt):
            if isinstance(s.expr, n.Call):
                self.check_call(s.expr, multi_ok=True, allow_void=True)
            else:
                self._diag("TypeMismatch",
                           "expression statements must be calls", s)
        elif isinstance(s, n.Emit):
            for arg in s.args:
                self.check_expr(arg, None)
        elif isinstance(s, n.Placeholder):
            if self.fscope.fn is not None:
                self._diag("UnsupportedFeature",
                           "'_;' is only valid inside a modifier body", s)

    # ------------------------------------------------------------ values

    def check_value(self, e: n.Expr, expected: n.TypeName | None) -> None:
        """A statement's direct value: the one place calls are allowed."""
        if isinstance(e, n.Call):
            rets = self.check_call(e, multi_ok=False)
            if rets is not None and expected is not None:
                self._require_assignable(rets[0], expected, e)
            return
        self.check_expr(e, expected)

    def check_lvalue(self, e: n.Expr) -> n.TypeName | None:
        ty = self.check_expr(e, None, lvalue=True)
        if ty is not None and isinstance(ty, (n.MappingType, n.InterfaceType)):
            self._diag("TypeMismatch", f"cannot assign a whole {ty} value", e)
            return None
        return ty

    # ------------------------------------------------------------ calls

    def check_call(self, call: n.Call, multi_ok: bool,
                   allow_void: bool = False) -> list[n.TypeName] | None:
        callee = call.callee
        if isinstance(callee, n.Name):
            fn = self.scope.functions.get(callee.ident)
            if fn is None:
                self._diag("UnresolvedName",
                           f"unknown function {callee.ident!r}", call)
                for a in call.args:
                    self.check_expr(a, None)
                return None
            if fn.visibility == "external":
                self._diag("VisibilityViolation",
                           f"external function {fn.name!r} cannot be called "
                           "internally", call)
            sig_params = [self.c._resolve_type(p.ty, self.scope, call)
                          for p in fn.params]
            rets = [self.c._resolve_type(t, self.scope, call)
                    for t in fn.returns]
        elif isinstance(callee, n.Member):
            obj_ty = self.check_expr(callee.obj, None)
            if not isinstance(obj_ty, n.InterfaceType):
                if obj_ty is not None:
                    self._diag("TypeMismatch",
                               f"{obj_ty} value is not callable", call)
                return None
            iface = self.a.interfaces[obj_ty.name]
            target = next((f for f in iface.functions
                           if f.name == callee.name), None)
            if target is None:
                self._diag("UnresolvedName",
                           f"interface {obj_ty.name!r} has no function "
                           f"{callee.name!r}", call)
                return None
            sig_params = [self.c._resolve_type(p.ty, self.scope, call)
                          for p in target.params]
            rets = [self.c._resolve_type(t, self.scope, call)
                    for t in target.returns]
        else:
            self._diag("TypeMismatch", "expression is not callable", call)
            return None

        if len(call.args) != len(sig_params):
            self._diag("ArityMismatch",
                       f"call expects {len(sig_params)} argument(s), "
                       f"got {len(call.args)}", call)
        else:
            for arg, want in zip(call.args, sig_params):
                self.check_expr(arg, want)
        if len(rets) > 1 and not multi_ok:
            self._diag("TypeMismatch",
                       "multi-value call needs a tuple declaration", call)
        if not rets and not allow_void:
            self._diag("TypeMismatch",
                       "call in value position returns nothing", call)
            return None
        return rets

    # ------------------------------------------------------------ expressions

    def check_expr(self, e: n.Expr, expected: n.TypeName | None,
                   lvalue: bool = False) -> n.TypeName | None:
        ty = self._infer(e, expected, lvalue)
        if ty is not None:
            self.a.expr_types[e.nid] = ty
            if expected is not None:
                self._require_assignable(ty, expected, e)
        return ty

    def _infer(self, e: n.Expr, expected: n.TypeName | None,
               lvalue: bool = False) -> n.TypeName | None:
        if isinstance(e, n.IntLit):
            if isinstance(expected, n.UintType):
                if e.value >= (1 << expected.bits):
                    self._diag("TypeMismatch",
                               f"literal {e.value} does not fit {expected}", e)
                return expected
            if isinstance(expected, n.AddressType):
                return n.ADDRESS
            return UINT256
        if isinstance(e, n.BoolLit):
            return n.BOOL
        if isinstance(e, n.StrLit):
            self._diag("TypeMismatch",
                       "string literals are only valid as require messages", e)
            return None
        if isinstance(e, n.Name):
            return self._name_type(e, lvalue)
        if isinstance(e, n.Member):
            return self._member_type(e)
        if isinstance(e, n.Index):
            obj_ty = self.check_expr(e.obj, None, lvalue=lvalue)
            if isinstance(obj_ty, n.MappingType):
                self.check_expr(e.key, obj_ty.key)
                return obj_ty.value
            if isinstance(obj_ty, n.ArrayType):
                key_ty = self.check_expr(e.key, None)
                if key_ty is not None and not isinstance(key_ty, n.UintType):
                    self._diag("TypeMismatch",
                               f"array index must be an integer, got {key_ty}", e)
                return obj_ty.elem
            if obj_ty is not None:
                self._diag("TypeMismatch", f"{obj_ty} value is not indexable", e)
            return None
        if isinstance(e, n.Unary):
            if e.op == "!":
                self.check_expr(e.operand, n.BOOL)
                return n.BOOL
            ty = self.check_expr(e.operand, expected
                                 if isinstance(expected, n.UintType) else None)
            if ty is not None and not isinstance(ty, n.UintType):
                self._diag("TypeMismatch", f"unary '-' needs an integer", e)
                return None
            return ty
        if isinstance(e, n.Binary):
            return self._binary_type(e)
        if isinstance(e, n.Cast):
            return self._cast_type(e)
        if isinstance(e, n.Call):
            self._diag("TypeMismatch",
                       "calls are only allowed as a statement's direct value", e)
            return None
        return None

    def _name_type(self, e: n.Name, lvalue: bool) -> n.TypeName | None:
        name = e.ident
        if name == "this":
            return ContractRefType(self.scope.contract.name)
        if name in ("msg", "block"):
            self._diag("TypeMismatch", f"{name!r} cannot be used alone", e)
            return None
        ty = self.fscope.var_type(name)
        if ty is None:
            ty = self.scope.state_vars.get(name)
        if ty is None:
            self._diag("UnresolvedName", f"unknown name {name!r}", e)
            return None
        return ty

    def _member_type(self, e: n.Member) -> n.TypeName | None:
        if isinstance(e.obj, n.Name):
            if e.obj.ident == "msg":
                if e.name == "sender":
                    return n.ADDRESS
                self._diag("UnresolvedName", f"unknown member msg.{e.name}", e)
                return None
            if e.obj.ident == "block":
                if e.name in ("timestamp", "number"):
                    return UINT256
                self._diag("UnresolvedName", f"unknown member block.{e.name}", e)
                return None
        obj_ty = self.check_expr(e.obj, None)
        if isinstance(obj_ty, n.StructType):
            sd = self.scope.structs.get(obj_ty.name)
            if sd is not None:
                for f in sd.fields:
                    if f.name == e.name:
                        return self.c._resolve_type(f.ty, self.scope, e)
                self._diag("UnresolvedName",
                           f"struct {obj_ty.name!r} has no field {e.name!r}", e)
                return None
        if isinstance(obj_ty, n.InterfaceType):
            self._diag("TypeMismatch",
                       "interface members can only be called", e)
            return None
        if obj_ty is not None:
            self._diag("TypeMismatch", f"{obj_ty} value has no members", e)
        return None

    def _binary_type(self, e: n.Binary) -> n.TypeName | None:
        op = e.op
        if op in ("&&", "||"):
            self.check_expr(e.left, n.BOOL)
            self.check_expr(e.right, n.BOOL)
            return n.BOOL
        lt = self.check_expr(e.left, None)
        # literals on either side adopt the other operand's width
        rt = self.check_expr(
            e.right, lt if isinstance(lt, (n.UintType, n.AddressType))
            and isinstance(e.right, n.IntLit) else None)
        if isinstance(e.left, n.IntLit) and isinstance(rt, n.UintType) \
                and lt == UINT256:
            lt = self.check_expr(e.left, rt)
        if op in ("==", "!="):
            if lt is not None and rt is not None and not _comparable(lt, rt):
                self._diag("TypeMismatch", f"cannot compare {lt} with {rt}", e)
            return n.BOOL
        if op in ("<", "<=", ">", ">="):
            for side, ty in ((e.left, lt), (e.right, rt)):
                if ty is not None and not isinstance(ty, n.UintType):
                    self._diag("TypeMismatch",
                               f"ordering needs integers, got {ty}", side)
            return n.BOOL
        # arithmetic
        for side, ty in ((e.left, lt), (e.right, rt)):
            if ty is not None and not isinstance(ty, n.UintType):
                self._diag("TypeMismatch",
                           f"operator {op} needs integers, got {ty}", side)
                return None
        if lt is None or rt is None:
            return None
        return lt if lt.bits >= rt.bits else rt  # type: ignore[union-attr]

    def _cast_type(self, e: n.Cast) -> n.TypeName | None:
        if isinstance(e.ty, n.AddressType):
            inner = self.check_expr(e.operand, None)
            if isinstance(inner, (ContractRefType, n.AddressType)) or (
                    isinstance(e.operand, n.IntLit)):
                return n.ADDRESS
            self._diag("TypeMismatch",
                       "address(...) accepts this, an address, or a literal", e)
            return None
        if isinstance(e.ty, n.UintType):
            inner = self.check_expr(e.operand, None)
            if inner is not None and not isinstance(inner, n.UintType):
                self._diag("TypeMismatch",
                           f"cannot convert {inner} to {e.ty}", e)
                return None
            return e.ty
        self._diag("TypeMismatch", f"cannot convert to {e.ty}", e)
        return None

    def _require_assignable(self, got: n.TypeName, want: n.TypeName,
                            node) -> None:
        if got == want:
            return
        if isinstance(got, n.UintType) and isinstance(want, n.UintType):
            if got.bits <= want.bits:
                return
            self._diag("TypeMismatch",
                       f"implicit narrowing from {got} to {want} "
                       f"(use {want}(...))", node)
            return
        self._diag("TypeMismatch", f"expected {want}, got {got}", node)


def _comparable(a: n.TypeName, b: n.TypeName) -> bool:
    if isinstance(a, n.UintType) and isinstance(b, n.UintType):
        return True
    return a == b
