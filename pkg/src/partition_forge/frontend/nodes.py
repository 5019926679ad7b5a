"""AST node definitions for the MiniSol dialect.

Every node carries a unique integer id (``nid``) and a source span.
Ids are assigned by the parser in preorder and are stable for a given
source text; analyses and reports refer to statements by nid.

Type names are plain frozen values, not AST nodes: they carry no id
and compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, is_dataclass


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class TypeName:
    def __str__(self) -> str:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class UintType(TypeName):
    bits: int

    def __str__(self) -> str:
        return f"uint{self.bits}"


@dataclass(frozen=True)
class BoolType(TypeName):
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class AddressType(TypeName):
    def __str__(self) -> str:
        return "address"


@dataclass(frozen=True)
class MappingType(TypeName):
    key: TypeName
    value: TypeName

    def __str__(self) -> str:
        return f"mapping({self.key} => {self.value})"


@dataclass(frozen=True)
class ArrayType(TypeName):
    elem: TypeName
    length: int

    def __str__(self) -> str:
        return f"{self.elem}[{self.length}]"


@dataclass(frozen=True)
class StructType(TypeName):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class InterfaceType(TypeName):
    name: str

    def __str__(self) -> str:
        return self.name


UINT_WIDTHS = (8, 16, 32, 64, 128, 256)
BOOL = BoolType()
ADDRESS = AddressType()


# ---------------------------------------------------------------- base


@dataclass(frozen=True)
class Span:
    line: int
    col: int


@dataclass
class Node:
    nid: int
    span: Span


# ---------------------------------------------------------------- expressions


@dataclass
class Expr(Node):
    pass


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class StrLit(Expr):
    value: str


@dataclass
class Name(Expr):
    ident: str


@dataclass
class Member(Expr):
    obj: Expr
    name: str


@dataclass
class Index(Expr):
    obj: Expr
    key: Expr


@dataclass
class Unary(Expr):
    op: str  # "!" or "-"
    operand: Expr


@dataclass
class Binary(Expr):
    op: str  # || && == != < <= > >= + - * / %
    left: Expr
    right: Expr


@dataclass
class Cast(Expr):
    ty: TypeName
    operand: Expr


@dataclass
class Call(Expr):
    callee: Expr  # Name for internal calls, Member for interface calls
    args: list[Expr] = field(default_factory=list)


# ---------------------------------------------------------------- statements


@dataclass
class Stmt(Node):
    pass


@dataclass
class VarDecl(Stmt):
    ty: TypeName
    name: str
    init: Expr | None = None


@dataclass
class TupleDecl(Stmt):
    """``(uint64 a, bool b) = f(...);`` destructuring of a multi-return call."""

    vars: list[tuple[TypeName, str]]
    init: Call = None  # type: ignore[assignment]


@dataclass
class Assign(Stmt):
    target: Expr
    op: str  # = += -= *= /= %=
    value: Expr


@dataclass
class If(Stmt):
    cond: Expr
    then: list[Stmt] = field(default_factory=list)
    orelse: list[Stmt] = field(default_factory=list)


@dataclass
class While(Stmt):
    cond: Expr
    body: list[Stmt] = field(default_factory=list)


@dataclass
class For(Stmt):
    init: Stmt | None
    cond: Expr | None
    post: Stmt | None
    body: list[Stmt] = field(default_factory=list)


@dataclass
class Require(Stmt):
    cond: Expr
    message: str | None = None


@dataclass
class Return(Stmt):
    values: list[Expr] = field(default_factory=list)


@dataclass
class ExprStmt(Stmt):
    expr: Expr


@dataclass
class Emit(Stmt):
    event: str
    args: list[Expr] = field(default_factory=list)


@dataclass
class Placeholder(Stmt):
    """The ``_;`` marker inside a modifier body."""


# ---------------------------------------------------------------- declarations


@dataclass
class Param:
    ty: TypeName
    name: str


@dataclass
class StateVarDecl(Node):
    ty: TypeName
    name: str
    visibility: str = "private"  # private | public | internal


@dataclass
class StructField:
    ty: TypeName
    name: str


@dataclass
class StructDef(Node):
    name: str
    fields: list[StructField] = field(default_factory=list)


@dataclass
class ModifierDef(Node):
    name: str
    params: list[Param] = field(default_factory=list)
    body: list[Stmt] = field(default_factory=list)


@dataclass
class ModifierInvocation:
    name: str
    args: list[Expr] = field(default_factory=list)


@dataclass
class FunctionDef(Node):
    name: str
    params: list[Param] = field(default_factory=list)
    returns: list[TypeName] = field(default_factory=list)
    visibility: str = "public"  # external | public | internal | private
    modifiers: list[ModifierInvocation] = field(default_factory=list)
    body: list[Stmt] = field(default_factory=list)


@dataclass
class InterfaceFn(Node):
    name: str
    params: list[Param] = field(default_factory=list)
    returns: list[TypeName] = field(default_factory=list)


@dataclass
class InterfaceDef(Node):
    name: str
    functions: list[InterfaceFn] = field(default_factory=list)


@dataclass
class ContractDef(Node):
    name: str
    state_vars: list[StateVarDecl] = field(default_factory=list)
    structs: list[StructDef] = field(default_factory=list)
    modifiers: list[ModifierDef] = field(default_factory=list)
    functions: list[FunctionDef] = field(default_factory=list)
    # source order of member declarations, for faithful printing
    member_order: list[Node] = field(default_factory=list)


@dataclass
class SourceUnit(Node):
    pragma: str | None = None
    interfaces: list[InterfaceDef] = field(default_factory=list)
    contracts: list[ContractDef] = field(default_factory=list)


# ---------------------------------------------------------------- helpers

_SKIP_FIELDS = {"nid", "span", "member_order"}


def struct_eq(a, b) -> bool:
    """Structural equality ignoring node ids and spans."""
    if type(a) is not type(b):
        return False
    if is_dataclass(a):
        for f in fields(a):
            if f.name in _SKIP_FIELDS:
                continue
            if not struct_eq(getattr(a, f.name), getattr(b, f.name)):
                return False
        return True
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(struct_eq(x, y) for x, y in zip(a, b))
    return a == b


def walk(node):
    """Yield node and every dataclass descendant, preorder."""
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        children = []
        if is_dataclass(cur) and not isinstance(cur, TypeName):
            for f in fields(cur):
                if f.name == "member_order":
                    continue
                val = getattr(cur, f.name)
                if isinstance(val, (list, tuple)):
                    children.extend(v for v in val if is_dataclass(v))
                elif is_dataclass(val):
                    children.append(val)
        stack.extend(reversed(children))


def walk_stmts(stmts: list[Stmt]):
    """Yield every statement in a body, preorder, including nested ones."""
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            yield from walk_stmts(s.orelse)
        elif isinstance(s, While):
            yield from walk_stmts(s.body)
        elif isinstance(s, For):
            if s.init is not None:
                yield s.init
            if s.post is not None:
                yield s.post
            yield from walk_stmts(s.body)


def walk_exprs(e: Expr):
    yield e
    if isinstance(e, Member):
        yield from walk_exprs(e.obj)
    elif isinstance(e, Index):
        yield from walk_exprs(e.obj)
        yield from walk_exprs(e.key)
    elif isinstance(e, Unary):
        yield from walk_exprs(e.operand)
    elif isinstance(e, Binary):
        yield from walk_exprs(e.left)
        yield from walk_exprs(e.right)
    elif isinstance(e, Cast):
        yield from walk_exprs(e.operand)
    elif isinstance(e, Call):
        yield from walk_exprs(e.callee)
        for a in e.args:
            yield from walk_exprs(a)


def stmt_exprs(s: Stmt):
    """Top-level expressions owned by a statement (not descending into bodies)."""
    if isinstance(s, VarDecl):
        return [s.init] if s.init is not None else []
    if isinstance(s, TupleDecl):
        return [s.init]
    if isinstance(s, Assign):
        return [s.target, s.value]
    if isinstance(s, (If, While)):
        return [s.cond]
    if isinstance(s, For):
        return [s.cond] if s.cond is not None else []
    if isinstance(s, Require):
        return [s.cond]
    if isinstance(s, Return):
        return list(s.values)
    if isinstance(s, ExprStmt):
        return [s.expr]
    if isinstance(s, Emit):
        return list(s.args)
    return []
