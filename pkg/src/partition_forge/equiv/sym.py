"""Symbolic values: width-aware expression trees with light folding.

Sorts are tuples: ("bool",), ("bv", width), ("array", key_sort,
value_sort). Bitvector arithmetic wraps at its width. Constructors
fold constants and a few identities so path conditions stay readable
and structural equality catches more matches; they never change
semantics.

External-call results are `CallSym` leaves tagged with the interface
variable, the function, the 1-based call position on the path, and
the return-slot index, so the equivalence checker can align call
sequences across two programs. To a solver they are plain variables.
"""

from __future__ import annotations

from dataclasses import dataclass

BOOL = ("bool",)


def BV(width: int) -> tuple:
    return ("bv", width)


def ARRAY(key_sort: tuple, value_sort: tuple) -> tuple:
    return ("array", key_sort, value_sort)


def is_bv(sort) -> bool:
    return sort[0] == "bv"


def bv_width(sort) -> int:
    assert sort[0] == "bv", sort
    return sort[1]


@dataclass(frozen=True)
class SymValue:
    """Base of all symbolic nodes; subclasses carry their own sort."""


@dataclass(frozen=True)
class Const(SymValue):
    value: int
    sort: tuple

    def __post_init__(self):
        if self.sort[0] == "bv":
            object.__setattr__(self, "value", self.value & _mask(self.sort[1]))
        elif self.sort == BOOL:
            object.__setattr__(self, "value", 1 if self.value else 0)

    def __repr__(self):
        if self.sort == BOOL:
            return "true" if self.value else "false"
        return f"{self.value}#{self.sort[1]}"


@dataclass(frozen=True)
class Var(SymValue):
    name: str
    sort: tuple

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class CallSym(SymValue):
    name: str
    sort: tuple
    callee: str  # interface variable base
    iface: str
    fn: str
    index: int  # 1-based position of the call along its path
    slot: int  # return-value position

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class App(SymValue):
    op: str
    args: tuple
    sort: tuple

    def __repr__(self):
        return f"({self.op} {' '.join(map(repr, self.args))})"


TRUE = Const(1, BOOL)
FALSE = Const(0, BOOL)


def _mask(width: int) -> int:
    return (1 << width) - 1


def bv(value: int, width: int) -> Const:
    return Const(value, BV(width))


def _is_const(v: SymValue) -> bool:
    return isinstance(v, Const)


def _bin_width(a: SymValue, b: SymValue) -> int:
    wa, wb = bv_width(a.sort), bv_width(b.sort)
    if wa != wb:
        raise ValueError(f"width mismatch: {wa} vs {wb} in {a!r} / {b!r}")
    return wa


def mk_add(a: SymValue, b: SymValue) -> SymValue:
    w = _bin_width(a, b)
    if _is_const(a) and _is_const(b):
        return bv(a.value + b.value, w)
    if _is_const(a) and a.value == 0:
        return b
    if _is_const(b) and b.value == 0:
        return a
    return App("add", (a, b), BV(w))


def mk_sub(a: SymValue, b: SymValue) -> SymValue:
    w = _bin_width(a, b)
    if _is_const(a) and _is_const(b):
        return bv(a.value - b.value, w)
    if _is_const(b) and b.value == 0:
        return a
    if a == b:
        return bv(0, w)
    return App("sub", (a, b), BV(w))


def mk_mul(a: SymValue, b: SymValue) -> SymValue:
    w = _bin_width(a, b)
    if _is_const(a) and _is_const(b):
        return bv(a.value * b.value, w)
    for x, y in ((a, b), (b, a)):
        if _is_const(x):
            if x.value == 0:
                return bv(0, w)
            if x.value == 1:
                return y
    return App("mul", (a, b), BV(w))


def mk_udiv(a: SymValue, b: SymValue) -> SymValue:
    """Total division: x / 0 = 0."""
    w = _bin_width(a, b)
    if _is_const(a) and _is_const(b):
        return bv(a.value // b.value if b.value else 0, w)
    if _is_const(b) and b.value == 1:
        return a
    return App("udiv", (a, b), BV(w))


def mk_urem(a: SymValue, b: SymValue) -> SymValue:
    """Total remainder: x % 0 = 0."""
    w = _bin_width(a, b)
    if _is_const(a) and _is_const(b):
        return bv(a.value % b.value if b.value else 0, w)
    return App("urem", (a, b), BV(w))


_CMP = {
    "ltu": lambda x, y: x < y,
    "leu": lambda x, y: x <= y,
    "gtu": lambda x, y: x > y,
    "geu": lambda x, y: x >= y,
}


def mk_cmp(op: str, a: SymValue, b: SymValue) -> SymValue:
    _bin_width(a, b)
    if _is_const(a) and _is_const(b):
        return TRUE if _CMP[op](a.value, b.value) else FALSE
    if a == b:
        return TRUE if op in ("leu", "geu") else FALSE
    return App(op, (a, b), BOOL)


def mk_eq(a: SymValue, b: SymValue) -> SymValue:
    if a.sort != b.sort:
        raise ValueError(f"sort mismatch in eq: {a.sort} vs {b.sort}")
    if a == b:
        return TRUE
    if _is_const(a) and _is_const(b):
        return TRUE if a.value == b.value else FALSE
    return App("eq", (a, b), BOOL)


def mk_ne(a: SymValue, b: SymValue) -> SymValue:
    return mk_not(mk_eq(a, b))


def mk_not(a: SymValue) -> SymValue:
    if _is_const(a):
        return FALSE if a.value else TRUE
    if isinstance(a, App) and a.op == "not":
        return a.args[0]
    return App("not", (a,), BOOL)


def mk_and(*parts: SymValue) -> SymValue:
    out = []
    for p in parts:
        if _is_const(p):
            if p.value == 0:
                return FALSE
            continue
        if isinstance(p, App) and p.op == "and":
            out.extend(p.args)
        elif p not in out:
            out.append(p)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return App("and", tuple(out), BOOL)


def mk_or(*parts: SymValue) -> SymValue:
    out = []
    for p in parts:
        if _is_const(p):
            if p.value != 0:
                return TRUE
            continue
        if isinstance(p, App) and p.op == "or":
            out.extend(p.args)
        elif p not in out:
            out.append(p)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return App("or", tuple(out), BOOL)


def mk_ite(c: SymValue, a: SymValue, b: SymValue) -> SymValue:
    if a.sort != b.sort:
        raise ValueError(f"ite arms differ: {a.sort} vs {b.sort}")
    if _is_const(c):
        return a if c.value else b
    if a == b:
        return a
    return App("ite", (c, a, b), a.sort)


def mk_const_array(sort: tuple, default: SymValue) -> SymValue:
    """Array mapping every key to one default value."""
    assert sort[0] == "array" and default.sort == sort[2]
    return App("K", (default,), sort)


def mk_select(arr: SymValue, key: SymValue) -> SymValue:
    assert arr.sort[0] == "array", arr.sort
    if key.sort != arr.sort[1]:
        raise ValueError(f"key sort {key.sort} vs array key {arr.sort[1]}")
    if isinstance(arr, App) and arr.op == "store":
        base, skey, sval = arr.args
        if skey == key:
            return sval
        if _is_const(skey) and _is_const(key):
            return mk_select(base, key)  # definitely different cells
    if isinstance(arr, App) and arr.op == "K":
        return arr.args[0]
    return App("select", (arr, key), arr.sort[2])


def mk_store(arr: SymValue, key: SymValue, value: SymValue) -> SymValue:
    assert arr.sort[0] == "array", arr.sort
    if key.sort != arr.sort[1] or value.sort != arr.sort[2]:
        raise ValueError("store sort mismatch")
    if isinstance(arr, App) and arr.op == "store" and arr.args[1] == key:
        return App("store", (arr.args[0], key, value), arr.sort)
    return App("store", (arr, key, value), arr.sort)


def mk_resize(a: SymValue, width: int) -> SymValue:
    """Zero-extend or truncate a bitvector to the target width."""
    w = bv_width(a.sort)
    if w == width:
        return a
    if _is_const(a):
        return bv(a.value, width)
    op = "zext" if width > w else "trunc"
    return App(op, (a,), BV(width))


def free_vars(v: SymValue, acc: dict | None = None) -> dict[str, SymValue]:
    """All Var/CallSym leaves by name (deterministic dict order)."""
    if acc is None:
        acc = {}
    stack = [v]
    seen: set[int] = set()
    while stack:
        cur = stack.pop()
        if id(cur) in seen:
            continue
        seen.add(id(cur))
        if isinstance(cur, (Var, CallSym)):
            if cur.name not in acc:
                acc[cur.name] = cur
        elif isinstance(cur, App):
            stack.extend(reversed(cur.args))
    return acc
