"""Compilation to the register kernels for finite-domain checking.

Everything is shrunk onto a small domain: every uint width becomes
`Domain.width` bits, addresses range over [0, n_addr), and an
address-keyed mapping becomes one register per address. Two functions
compiled against one shared layout read their inputs from the same
registers, so the enumeration kernels can drive both over identical
valuations and compare final state and returns register by register.

compile_function lowers a call-free function body (internal calls are
inlined). compile_formula lowers a boolean symbolic term, for deciding
satisfiability by enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._kernels import ops as o
from ..frontend import nodes as n
from ..frontend.checker import Analysis
from ..graphs.cfg import _IdAllocator, expand_function, max_node_id
from . import sym as s


class CompileError(Exception):
    pass


class UnsupportedForFiniteDomain(CompileError):
    pass


@dataclass(frozen=True)
class Domain:
    """Finite interpretation: uints at `width` bits, `n_addr` addresses."""

    width: int = 4
    n_addr: int = 2
    max_valuations: int = 1 << 26
    checked_arith: bool = False

    def __post_init__(self):
        if not 1 <= self.width <= 6:
            raise ValueError("width must be in 1..6")
        if not 1 <= self.n_addr <= 4:
            raise ValueError("n_addr must be in 1..4")
        if self.n_addr > (1 << self.width):
            raise ValueError("n_addr must fit in the uint domain")

    def card(self, ty: n.TypeName) -> int:
        if isinstance(ty, n.UintType):
            return 1 << self.width
        if isinstance(ty, n.BoolType):
            return 2
        if isinstance(ty, n.AddressType):
            return self.n_addr
        raise UnsupportedForFiniteDomain(f"no finite domain for {ty}")


@dataclass(frozen=True)
class Slot:
    name: str
    reg: int
    card: int


@dataclass
class Layout:
    """Shared register map for one comparison."""

    domain: Domain
    slots: list[Slot] = field(default_factory=list)  # enumerated inputs
    scalars: dict[str, int] = field(default_factory=dict)
    mappings: dict[str, int] = field(default_factory=dict)  # name -> base reg
    ret_regs: list[int] = field(default_factory=list)
    cmp_regs: list[int] = field(default_factory=list)
    n_fixed: int = 0  # inputs plus return slots; temps start here

    @property
    def var_regs(self) -> list[int]:
        return [sl.reg for sl in self.slots]

    @property
    def var_cards(self) -> list[int]:
        return [sl.card for sl in self.slots]

    def valuations(self) -> int:
        total = 1
        for sl in self.slots:
            total *= sl.card
        return total

    def witness(self, vals) -> dict:
        """Turn an enumeration tuple back into a named valuation."""
        out: dict = {}
        for sl, v in zip(self.slots, vals):
            if "[" in sl.name:
                base, rest = sl.name.split("[", 1)
                key = int(rest[:-1])
                out.setdefault(base, {})[key] = int(v)
            else:
                out[sl.name] = int(v)
        return out


def env_names_used(fn: n.FunctionDef, contract: n.ContractDef) -> set[str]:
    """Environment values an expanded function can read."""
    alloc = _IdAllocator(10_000_000)
    expanded = expand_function(fn, contract, alloc)
    used: set[str] = set()
    for node in n.walk(expanded):
        if isinstance(node, n.Member) and isinstance(node.obj, n.Name):
            if node.obj.ident in ("msg", "block"):
                used.add(f"{node.obj.ident}.{node.name}")
        elif isinstance(node, n.Name) and node.ident == "this":
            used.add("this")
    return used


def build_layout(contract: n.ContractDef, analysis: Analysis,
                 fn: n.FunctionDef, env_names: set[str],
                 domain: Domain) -> Layout:
    """Register layout for comparing two functions of this signature.

    env_names must be the union over both functions being compared.
    """
    lay = Layout(domain=domain)
    reg = 0

    def add_slot(name: str, card: int) -> int:
        nonlocal reg
        lay.slots.append(Slot(name, reg, card))
        reg += 1
        return reg - 1

    scope = analysis.scopes[contract.name]
    for name, ty in scope.state_vars.items():
        if isinstance(ty, n.InterfaceType):
            continue  # unusable without external calls; reads fail later
        if isinstance(ty, n.StructType):
            sd = scope.structs[ty.name]
            for f in sd.fields:
                r = add_slot(f"{name}.{f.name}", domain.card(f.ty))
                lay.scalars[f"{name}.{f.name}"] = r
                lay.cmp_regs.append(r)
            continue
        if isinstance(ty, n.MappingType):
            if not isinstance(ty.key, n.AddressType):
                raise UnsupportedForFiniteDomain(
                    f"mapping {name} is not address-keyed")
            card = domain.card(ty.value)
            base = None
            for i in range(domain.n_addr):
                r = add_slot(f"{name}[{i}]", card)
                base = r if base is None else base
                lay.cmp_regs.append(r)
            lay.mappings[name] = base
            continue
        r = add_slot(name, domain.card(ty))
        lay.scalars[name] = r
        lay.cmp_regs.append(r)
    for p in fn.params:
        r = add_slot(p.name, domain.card(p.ty))
        lay.scalars[p.name] = r
    for env in sorted(env_names):
        card = domain.n_addr if env in ("msg.sender", "this") \
            else (1 << domain.width)
        r = add_slot(env, card)
        lay.scalars[env] = r
    for _ in fn.returns:
        lay.ret_regs.append(reg)
        lay.cmp_regs.append(reg)
        reg += 1
    lay.n_fixed = reg
    return lay


@dataclass(frozen=True)
class Program:
    code: np.ndarray  # (n, 5) int64
    nregs: int

    @property
    def fuel_per_run(self) -> int:
        # loops make static bounds impossible; this is generous for the
        # contract sizes at hand and fuel exhaustion is reported, not hidden
        return max(10_000, 50 * len(self.code))


def compile_function(fn: n.FunctionDef, unit: n.SourceUnit,
                     contract: n.ContractDef, analysis: Analysis,
                     layout: Layout) -> Program:
    comp = _FnCompiler(unit, contract, analysis, layout)
    return comp.compile(fn)


_ARITH = {"+": (o.ADD, o.ADDC), "-": (o.SUB, o.SUBC), "*": (o.MUL, o.MULC),
          "/": (o.DIV, o.DIVC), "%": (o.MOD, o.MODC)}
_CMPOPS = {"<": o.LTU, "<=": o.LEU, ">": o.GTU, ">=": o.GEU,
           "==": o.EQ, "!=": o.NE}


class _Emitter:
    def __init__(self, first_temp: int):
        self.rows: list[list[int]] = []
        self.next_reg = first_temp

    def temp(self) -> int:
        r = self.next_reg
        self.next_reg += 1
        return r

    def emit(self, op, a=0, b=0, c=0, d=0) -> int:
        self.rows.append([op, a, b, c, d])
        return len(self.rows) - 1

    def label(self) -> int:
        """Placeholder jump target, patched later."""
        return -1

    def patch(self, row: int, target: int) -> None:
        self.rows[row][1] = target

    @property
    def here(self) -> int:
        return len(self.rows)


class _Frame:
    def __init__(self, names: dict[str, int], ret_regs: list[int]):
        self.names = names  # locals and params -> reg
        self.ret_regs = ret_regs
        self.end_jumps: list[int] = []  # rows jumping to the frame end


class _FnCompiler:
    def __init__(self, unit, contract, analysis, layout: Layout):
        self.unit = unit
        self.contract = contract
        self.analysis = analysis
        self.scope = analysis.scopes[contract.name]
        self.lay = layout
        self.dom = layout.domain
        self.alloc = _IdAllocator(max_node_id(unit) + 1)
        self.e = _Emitter(layout.n_fixed)
        self.frames: list[_Frame] = []

    # ------------------------------------------------------------ driver

    def compile(self, fn: n.FunctionDef) -> Program:
        e = self.e
        for r in self.lay.ret_regs:
            e.emit(o.CONST, r, 0)
        expanded = expand_function(fn, self.contract, self.alloc)
        frame = _Frame({}, self.lay.ret_regs)
        for p in expanded.params:
            reg = e.temp()
            e.emit(o.MOV, reg, self.lay.scalars[p.name])
            frame.names[p.name] = reg
        self.frames.append(frame)
        self._stmts(expanded.body)
        self.frames.pop()
        end = e.here
        for row in frame.end_jumps:
            e.patch(row, end)
        e.emit(o.HALT)
        code = np.array(e.rows, dtype=np.int64).reshape(-1, 5)
        return Program(code=code, nregs=e.next_reg)

    # ------------------------------------------------------------ statements

    def _stmts(self, stmts) -> None:
        for st in stmts:
            self._stmt(st)

    def _stmt(self, st) -> None:
        e = self.e
        if isinstance(st, n.VarDecl):
            reg = e.temp()
            self.frames[-1].names[st.name] = reg
            if st.init is None:
                e.emit(o.CONST, reg, 0)
            elif isinstance(st.init, n.Call):
                rets = self._call(st.init)
                e.emit(o.MOV, reg, rets[0])
            else:
                e.emit(o.MOV, reg, self._expr(st.init))
        elif isinstance(st, n.TupleDecl):
            rets = self._call(st.init)
            for (_ty, name), src in zip(st.vars, rets):
                reg = e.temp()
                self.frames[-1].names[name] = reg
                e.emit(o.MOV, reg, src)
        elif isinstance(st, n.Assign):
            self._assign(st)
        elif isinstance(st, n.If):
            cond = self._expr(st.cond)
            jz = e.emit(o.JZ, e.label(), cond)
            self._stmts(st.then)
            if st.orelse:
                jend = e.emit(o.JMP, e.label())
                e.patch(jz, e.here)
                self._stmts(st.orelse)
                e.patch(jend, e.here)
            else:
                e.patch(jz, e.here)
        elif isinstance(st, n.While):
            head = e.here
            cond = self._expr(st.cond)
            jz = e.emit(o.JZ, e.label(), cond)
            self._stmts(st.body)
            e.emit(o.JMP, head)
            e.patch(jz, e.here)
        elif isinstance(st, n.For):
            if st.init is not None:
                self._stmt(st.init)
            head = e.here
            jz = None
            if st.cond is not None:
                cond = self._expr(st.cond)
                jz = e.emit(o.JZ, e.label(), cond)
            self._stmts(st.body)
            if st.post is not None:
                self._stmt(st.post)
            e.emit(o.JMP, head)
            if jz is not None:
                e.patch(jz, e.here)
        elif isinstance(st, n.Require):
            cond = self._expr(st.cond)
            jnz = e.emit(o.JNZ, e.label(), cond)
            e.emit(o.REVERT)
            e.patch(jnz, e.here)
        elif isinstance(st, n.Return):
            frame = self.frames[-1]
            for target, v in zip(frame.ret_regs, st.values):
                e.emit(o.MOV, target, self._expr(v))
            frame.end_jumps.append(e.emit(o.JMP, e.label()))
        elif isinstance(st, n.ExprStmt):
            if isinstance(st.expr, n.Call):
                self._call(st.expr)
        elif isinstance(st, n.Emit):
            pass
        else:
            raise UnsupportedForFiniteDomain(type(st).__name__)

    def _assign(self, st: n.Assign) -> None:
        e = self.e
        if isinstance(st.value, n.Call):
            if st.op != "=":
                raise UnsupportedForFiniteDomain("compound assign from call")
            value = self._call(st.value)[0]
        else:
            value = self._expr(st.value)
        target = st.target
        if st.op != "=":
            cur = self._expr(target)
            merged = e.temp()
            wrap, checked = _ARITH[st.op[0]]
            opcode = checked if self.dom.checked_arith else wrap
            e.emit(opcode, merged, cur, value, self.dom.width)
            value = merged
        if isinstance(target, n.Name) or isinstance(target, n.Member):
            e.emit(o.MOV, self._scalar_reg(target), value)
        elif isinstance(target, n.Index):
            base, key = self._mapping_access(target)
            e.emit(o.STON, value, key, base, self.dom.n_addr)
        else:
            raise UnsupportedForFiniteDomain("assignment target")

    # ------------------------------------------------------------ calls

    def _call(self, call: n.Call) -> list[int]:
        if isinstance(call.callee, n.Member):
            raise UnsupportedForFiniteDomain(
                "external calls cannot be enumerated")
        if not isinstance(call.callee, n.Name):
            raise UnsupportedForFiniteDomain("computed call target")
        if len(self.frames) > 16:
            raise UnsupportedForFiniteDomain("call depth limit hit")
        target = self.scope.functions.get(call.callee.ident)
        if target is None:
            raise CompileError(f"unknown function {call.callee.ident}")
        e = self.e
        arg_regs = [self._expr(a) for a in call.args]
        expanded = expand_function(target, self.contract, self.alloc)
        frame = _Frame({}, [])
        for p, src in zip(expanded.params, arg_regs):
            reg = e.temp()
            e.emit(o.MOV, reg, src)
            frame.names[p.name] = reg
        for _ in expanded.returns:
            reg = e.temp()
            e.emit(o.CONST, reg, 0)
            frame.ret_regs.append(reg)
        self.frames.append(frame)
        self._stmts(expanded.body)
        self.frames.pop()
        end = e.here
        for row in frame.end_jumps:
            e.patch(row, end)
        return frame.ret_regs

    # ------------------------------------------------------------ expressions

    def _expr(self, ex: n.Expr) -> int:
        e = self.e
        if isinstance(ex, n.IntLit):
            ty = self.analysis.type_of(ex)
            mod = self.dom.n_addr if isinstance(ty, n.AddressType) \
                else (1 << self.dom.width)
            reg = e.temp()
            e.emit(o.CONST, reg, ex.value % mod)
            return reg
        if isinstance(ex, n.BoolLit):
            reg = e.temp()
            e.emit(o.CONST, reg, 1 if ex.value else 0)
            return reg
        if isinstance(ex, (n.Name, n.Member)):
            return self._scalar_reg(ex)
        if isinstance(ex, n.Index):
            base, key = self._mapping_access(ex)
            reg = e.temp()
            e.emit(o.SELN, reg, key, base, self.dom.n_addr)
            return reg
        if isinstance(ex, n.Unary):
            v = self._expr(ex.operand)
            reg = e.temp()
            if ex.op == "!":
                e.emit(o.NOT, reg, v)
            elif ex.op == "-":
                zero = e.temp()
                e.emit(o.CONST, zero, 0)
                e.emit(o.SUB, reg, zero, v, self.dom.width)
            else:
                raise UnsupportedForFiniteDomain(f"unary {ex.op}")
            return reg
        if isinstance(ex, n.Binary):
            return self._binary(ex)
        if isinstance(ex, n.Cast):
            v = self._expr(ex.operand)
            src_ty = self.analysis.type_of(ex.operand)
            reg = e.temp()
            if isinstance(ex.ty, n.AddressType) and not isinstance(
                    src_ty, n.AddressType):
                mod = e.temp()
                e.emit(o.CONST, mod, self.dom.n_addr)
                e.emit(o.MOD, reg, v, mod)
            else:
                # widths are uniform here, so uint casts copy
                e.emit(o.MOV, reg, v)
            return reg
        if isinstance(ex, n.Call):
            raise UnsupportedForFiniteDomain("call in expression position")
        raise UnsupportedForFiniteDomain(type(ex).__name__)

    def _binary(self, ex: n.Binary) -> int:
        e = self.e
        a = self._expr(ex.left)
        b = self._expr(ex.right)
        reg = e.temp()
        if ex.op in _ARITH:
            wrap, checked = _ARITH[ex.op]
            opcode = checked if self.dom.checked_arith else wrap
            e.emit(opcode, reg, a, b, self.dom.width)
        elif ex.op in _CMPOPS:
            e.emit(_CMPOPS[ex.op], reg, a, b)
        elif ex.op == "&&":
            # operands are side-effect free, so strict evaluation is safe
            e.emit(o.BAND, reg, a, b)
        elif ex.op == "||":
            e.emit(o.BOR, reg, a, b)
        else:
            raise UnsupportedForFiniteDomain(f"binary {ex.op}")
        return reg

    def _scalar_reg(self, ex: n.Expr) -> int:
        if isinstance(ex, n.Name):
            for frame in reversed(self.frames[-1:]):
                if ex.ident in frame.names:
                    return frame.names[ex.ident]
            if ex.ident in self.lay.scalars:
                return self.lay.scalars[ex.ident]
            raise CompileError(f"unknown name {ex.ident}")
        if isinstance(ex, n.Member) and isinstance(ex.obj, n.Name):
            key = f"{ex.obj.ident}.{ex.name}"
            if key in self.lay.scalars:
                return self.lay.scalars[key]
            raise UnsupportedForFiniteDomain(f"member {key}")
        raise UnsupportedForFiniteDomain("scalar reference")

    def _mapping_access(self, ex: n.Index) -> tuple[int, int]:
        if not isinstance(ex.obj, n.Name):
            raise UnsupportedForFiniteDomain("nested mapping access")
        base = self.lay.mappings.get(ex.obj.ident)
        if base is None:
            raise UnsupportedForFiniteDomain(
                f"{ex.obj.ident} is not an enumerable mapping")
        key = self._expr(ex.key)
        return base, key


# ------------------------------------------------------------------ formulas


def compile_formula(formula: s.SymValue, domain: Domain,
                    addr_width: int = 160):
    """Lower a boolean term to a program deciding it by enumeration.

    Returns (Program, layout) where layout.slots names the free
    variables; the program leaves 0/1 in the register after the last
    input slot (exposed as layout.ret_regs[0]).
    """
    if formula.sort != s.BOOL:
        raise CompileError("formula must be boolean")
    comp = _FormulaCompiler(domain, addr_width)
    return comp.compile(formula)


class _FormulaCompiler:
    def __init__(self, domain: Domain, addr_width: int):
        self.dom = domain
        self.addr_width = addr_width
        self.lay = Layout(domain=domain)
        self.cache: dict[int, object] = {}

    def _is_addr(self, sort: tuple) -> bool:
        return s.is_bv(sort) and s.bv_width(sort) == self.addr_width

    def _slot_card(self, sort: tuple) -> int:
        if sort == s.BOOL:
            return 2
        if self._is_addr(sort):
            return self.dom.n_addr
        if s.is_bv(sort):
            return 1 << self.dom.width
        raise CompileError(f"cannot enumerate sort {sort}")

    def compile(self, formula: s.SymValue):
        lay = self.lay
        reg = 0
        for name, leaf in sorted(s.free_vars(formula).items()):
            if leaf.sort[0] == "array":
                if not self._is_addr(leaf.sort[1]):
                    raise UnsupportedForFiniteDomain(
                        f"array {name} is not address-keyed")
                card = self._slot_card(leaf.sort[2])
                base = reg
                for i in range(self.dom.n_addr):
                    lay.slots.append(Slot(f"{name}[{i}]", reg, card))
                    reg += 1
                lay.mappings[name] = base
            else:
                lay.slots.append(Slot(name, reg, self._slot_card(leaf.sort)))
                lay.scalars[name] = reg
                reg += 1
        lay.n_fixed = reg
        self.e = _Emitter(reg)
        out = self._term(formula)
        lay.ret_regs = [out]
        code = np.array(self.e.rows, dtype=np.int64).reshape(-1, 5)
        return Program(code=code, nregs=self.e.next_reg), lay

    def _mask_const(self, value: int, sort: tuple) -> int:
        if sort == s.BOOL:
            return 1 if value else 0
        if self._is_addr(sort):
            return value % self.dom.n_addr
        return value % (1 << self.dom.width)

    def _term(self, t: s.SymValue):
        """Compile a term; scalars give a reg, arrays give a base reg."""
        key = id(t)
        if key in self.cache:
            return self.cache[key]
        out = self._term_uncached(t)
        self.cache[key] = out
        return out

    def _term_uncached(self, t: s.SymValue):
        e = self.e
        dom = self.dom
        if isinstance(t, s.Const):
            if t.sort[0] == "array":
                raise CompileError("constant arrays use K nodes")
            reg = e.temp()
            e.emit(o.CONST, reg, self._mask_const(t.value, t.sort))
            return reg
        if isinstance(t, (s.Var, s.CallSym)):
            if t.sort[0] == "array":
                return self.lay.mappings[t.name]
            return self.lay.scalars[t.name]
        if not isinstance(t, s.App):
            raise CompileError(f"cannot compile {t!r}")
        op = t.op
        if op == "K":
            default = self._term(t.args[0])
            base = e.temp()
            for i in range(dom.n_addr - 1):
                e.temp()
            for i in range(dom.n_addr):
                e.emit(o.MOV, base + i, default)
            return base
        if op == "store":
            src = self._term(t.args[0])
            key_reg = self._term(t.args[1])
            val = self._term(t.args[2])
            base = e.temp()
            for i in range(dom.n_addr - 1):
                e.temp()
            for i in range(dom.n_addr):
                e.emit(o.MOV, base + i, src + i)
            e.emit(o.STON, val, key_reg, base, dom.n_addr)
            return base
        if op == "select":
            base = self._term(t.args[0])
            key_reg = self._term(t.args[1])
            reg = e.temp()
            e.emit(o.SELN, reg, key_reg, base, dom.n_addr)
            return reg
        if op in ("eq", "ne") and t.args[0].sort[0] == "array":
            return self._array_eq(t.args[0], t.args[1], negate=(op == "ne"))
        if op in ("zext", "trunc"):
            inner = self._term(t.args[0])
            reg = e.temp()
            if self._is_addr(t.sort) and not self._is_addr(t.args[0].sort):
                mod = e.temp()
                e.emit(o.CONST, mod, dom.n_addr)
                e.emit(o.MOD, reg, inner, mod)
            else:
                e.emit(o.MOV, reg, inner)
            return reg
        if op == "ite":
            c = self._term(t.args[0])
            if t.sort[0] == "array":
                a = self._term(t.args[1])
                b = self._term(t.args[2])
                base = e.temp()
                for i in range(dom.n_addr - 1):
                    e.temp()
                for i in range(dom.n_addr):
                    e.emit(o.ITE, base + i, c, a + i, b + i)
                return base
            a = self._term(t.args[1])
            b = self._term(t.args[2])
            reg = e.temp()
            e.emit(o.ITE, reg, c, a, b)
            return reg
        args = [self._term(x) for x in t.args]
        reg = e.temp()
        if op in ("add", "sub", "mul"):
            code = {"add": o.ADD, "sub": o.SUB, "mul": o.MUL}[op]
            width = dom.width if not self._is_addr(t.sort) else dom.width
            e.emit(code, reg, args[0], args[1], width)
            if self._is_addr(t.sort):
                mod = e.temp()
                e.emit(o.CONST, mod, dom.n_addr)
                e.emit(o.MOD, reg, reg, mod)
            return reg
        if op == "udiv":
            e.emit(o.DIV, reg, args[0], args[1])
            return reg
        if op == "urem":
            e.emit(o.MOD, reg, args[0], args[1])
            return reg
        if op in ("ltu", "leu", "gtu", "geu"):
            code = {"ltu": o.LTU, "leu": o.LEU,
                    "gtu": o.GTU, "geu": o.GEU}[op]
            e.emit(code, reg, args[0], args[1])
            return reg
        if op == "eq":
            e.emit(o.EQ, reg, args[0], args[1])
            return reg
        if op == "not":
            e.emit(o.NOT, reg, args[0])
            return reg
        if op == "and":
            e.emit(o.MOV, reg, args[0])
            for more in args[1:]:
                e.emit(o.BAND, reg, reg, more)
            return reg
        if op == "or":
            e.emit(o.MOV, reg, args[0])
            for more in args[1:]:
                e.emit(o.BOR, reg, reg, more)
            return reg
        raise CompileError(f"cannot compile op {op}")

    def _array_eq(self, a: s.SymValue, b: s.SymValue, negate: bool) -> int:
        e = self.e
        base_a = self._term(a)
        base_b = self._term(b)
        reg = e.temp()
        cell = e.temp()
        first = True
        for i in range(self.dom.n_addr):
            e.emit(o.EQ, cell, base_a + i, base_b + i)
            if first:
                e.emit(o.MOV, reg, cell)
                first = False
            else:
                e.emit(o.BAND, reg, reg, cell)
        if negate:
            e.emit(o.NOT, reg, reg)
        return reg
