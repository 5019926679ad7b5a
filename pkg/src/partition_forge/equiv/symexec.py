"""Bounded symbolic execution over function bodies.

Every state variable, parameter, and environment value starts as a
fresh symbol named after itself, so two executions over the same
contract share their initial symbols by construction. Execution forks
at branches, unrolls loops to a configured bound (paths that would
iterate further end at the loop as marked bound-hit summaries),
inlines internal calls, and models external interface calls as
uninterpreted per-path results logged for later alignment.

`require` forks a reverted path carrying the initial store: reverted
executions publish no state. Arithmetic wraps at declared widths;
checked mode forks an overflow-revert path per operation instead.

Unsupported here: struct-valued mappings, struct or composite
parameters, recursion past the inline depth cap.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..frontend import nodes as n
from ..frontend.checker import Analysis, analyze
from ..graphs.cfg import _IdAllocator, expand_function, max_node_id
from . import sym as s
from .sym import SymValue


class SymExecError(Exception):
    pass


class UnsupportedConstruct(SymExecError):
    pass


class Timeout(SymExecError):
    pass


@dataclass(frozen=True)
class ExecConfig:
    loop_unroll: int = 5
    time_budget: float = 600.0
    checked_arith: bool = False
    addr_width: int = 160
    max_paths: int = 4096
    max_inline_depth: int = 16
    # when set, every uint computes at this width; used to mirror the
    # finite-domain semantics exactly, constant folding included
    width_override: int | None = None

    def __post_init__(self):
        if self.loop_unroll < 1:
            raise ValueError("loop_unroll must be >= 1")
        if self.width_override is not None and not (
                1 <= self.width_override <= 62):
            raise ValueError("width_override must be in 1..62")

    def uint_width(self, declared: int) -> int:
        return self.width_override or declared


@dataclass(frozen=True)
class CallRecord:
    callee: str  # interface-typed variable the call went through
    iface: str
    fn: str
    index: int  # 1-based position along the path
    args: tuple
    results: tuple  # CallSym per declared return


@dataclass(frozen=True)
class PathSummary:
    path_condition: SymValue
    store: dict
    returns: tuple
    call_log: tuple
    reverted: bool = False
    bound_hit: bool = False


@dataclass
class _State:
    pc: SymValue
    store: dict
    locals: dict
    call_log: tuple
    call_count: int = 0


def type_sort(ty: n.TypeName, cfg: ExecConfig) -> tuple:
    if isinstance(ty, n.UintType):
        return s.BV(cfg.uint_width(ty.bits))
    if isinstance(ty, n.BoolType):
        return s.BOOL
    if isinstance(ty, n.AddressType):
        return s.BV(cfg.addr_width)
    if isinstance(ty, n.MappingType):
        return s.ARRAY(type_sort(ty.key, cfg), type_sort(ty.value, cfg))
    if isinstance(ty, n.ArrayType):
        return s.ARRAY(s.BV(cfg.uint_width(256)), type_sort(ty.elem, cfg))
    raise UnsupportedConstruct(f"no symbolic sort for {ty}")


ENV_VARS = ("msg.sender", "block.timestamp", "block.number", "this")


def env_sort(name: str, cfg: ExecConfig) -> tuple:
    if name in ("msg.sender", "this"):
        return s.BV(cfg.addr_width)
    return s.BV(cfg.uint_width(256))


def initial_store(contract: n.ContractDef, analysis: Analysis,
                  cfg: ExecConfig) -> dict[str, SymValue]:
    """Symbolic store shared by every execution over this contract."""
    scope = analysis.scopes[contract.name]
    store: dict[str, SymValue] = {}
    for name, ty in scope.state_vars.items():
        if isinstance(ty, n.InterfaceType):
            continue  # handles carry no value; calls are logged instead
        if isinstance(ty, n.StructType):
            sd = scope.structs[ty.name]
            for f in sd.fields:
                fty = f.ty
                if isinstance(fty, (n.StructType, n.MappingType)):
                    raise UnsupportedConstruct(
                        f"nested composite in struct {ty.name}")
                store[f"{name}.{f.name}"] = s.Var(
                    f"{name}.{f.name}", type_sort(fty, cfg))
            continue
        if isinstance(ty, n.MappingType) and isinstance(
                ty.value, (n.StructType, n.ArrayType)):
            raise UnsupportedConstruct("mapping to composite values")
        store[name] = s.Var(name, type_sort(ty, cfg))
    for env in ENV_VARS:
        store[env] = s.Var(env, env_sort(env, cfg))
    return store


def sym_exec(fn: n.FunctionDef, unit: n.SourceUnit, cfg: ExecConfig,
             analysis: Analysis | None = None,
             contract: n.ContractDef | None = None) -> list[PathSummary]:
    if analysis is None:
        analysis = analyze(unit)
        if not analysis.ok:
            raise SymExecError("unit does not type-check")
    if contract is None:
        contract = next(c for c in unit.contracts
                        if any(f.nid == fn.nid for f in c.functions))
    ex = _Executor(unit, contract, analysis, cfg)
    return ex.run(fn)


class _Executor:
    def __init__(self, unit, contract, analysis, cfg: ExecConfig):
        self.unit = unit
        self.contract = contract
        self.analysis = analysis
        self.scope = analysis.scopes[contract.name]
        self.cfg = cfg
        self.alloc = _IdAllocator(max_node_id(unit) + 1)
        self.deadline = time.monotonic() + cfg.time_budget
        self.paths: list[PathSummary] = []
        self.initial: dict[str, SymValue] = {}

    # ------------------------------------------------------------ driver

    def run(self, fn: n.FunctionDef) -> list[PathSummary]:
        self.initial = initial_store(self.contract, self.analysis, self.cfg)
        for p in fn.params:
            if not isinstance(p.ty, (n.UintType, n.BoolType, n.AddressType)):
                raise UnsupportedConstruct(
                    f"parameter {p.name} of {fn.name} is not scalar")
        expanded = expand_function(fn, self.contract, self.alloc)
        state = _State(
            pc=s.TRUE,
            store=dict(self.initial),
            locals={p.name: s.Var(p.name, type_sort(p.ty, self.cfg))
                    for p in expanded.params},
            call_log=(),
        )
        for end, rets in self._exec_block(expanded.body, state, depth=0):
            self._finish(end, rets, expanded)
        return self.paths

    def _finish(self, state: _State, rets, fn: n.FunctionDef) -> None:
        self._add_path(PathSummary(
            path_condition=state.pc,
            store=dict(state.store),
            returns=self._fit_returns(rets, fn.returns),
            call_log=state.call_log,
        ))

    def _fit_returns(self, rets, declared) -> tuple:
        sorts = [type_sort(t, self.cfg) for t in declared]
        if rets is None:
            # fall-through end: declared returns default to zero
            return tuple(self._zero(sort) for sort in sorts)
        return tuple(self._coerce(v, sort) for v, sort in zip(rets, sorts))

    def _add_path(self, path: PathSummary) -> None:
        self.paths.append(path)
        if len(self.paths) > self.cfg.max_paths:
            raise UnsupportedConstruct(
                f"more than {self.cfg.max_paths} paths")

    def _zero(self, sort) -> SymValue:
        return s.Const(0, sort)

    def _tick(self) -> None:
        if time.monotonic() > self.deadline:
            raise Timeout("symbolic execution exceeded its time budget")

    # ------------------------------------------------------------ blocks

    def _exec_block(self, stmts, state: _State, depth: int):
        """Yield (state, returns|None) terminal pairs for this block.

        returns None means fall-through; a tuple means a Return fired.
        """
        if state.pc is s.FALSE:
            return  # infeasible continuation, nothing to explore
        if not stmts:
            yield state, None
            return
        head, rest = stmts[0], stmts[1:]
        for out_state, rets in self._exec_stmt(head, state, depth):
            if rets is not None:
                yield out_state, rets
            else:
                yield from self._exec_block(rest, out_state, depth)

    def _exec_stmt(self, st, state: _State, depth: int):
        self._tick()
        if isinstance(st, n.VarDecl):
            yield from self._exec_vardecl(st, state, depth)
        elif isinstance(st, n.TupleDecl):
            yield from self._exec_tupledecl(st, state, depth)
        elif isinstance(st, n.Assign):
            yield from self._exec_assign(st, state, depth)
        elif isinstance(st, n.If):
            cond = self._eval(st.cond, state)
            then_pc = s.mk_and(state.pc, cond)
            else_pc = s.mk_and(state.pc, s.mk_not(cond))
            if then_pc is not s.FALSE:
                yield from self._exec_block(
                    st.then, self._fork(state, then_pc), depth)
            if else_pc is not s.FALSE:
                orelse = st.orelse or []
                yield from self._exec_block(
                    orelse, self._fork(state, else_pc), depth)
        elif isinstance(st, n.While):
            yield from self._exec_loop(
                st, None, state, depth, self.cfg.loop_unroll)
        elif isinstance(st, n.For):
            if st.init is not None:
                for cur, _r in self._exec_stmt(st.init, state, depth):
                    yield from self._exec_loop(
                        st, st.post, cur, depth, self.cfg.loop_unroll)
            else:
                yield from self._exec_loop(
                    st, st.post, state, depth, self.cfg.loop_unroll)
        elif isinstance(st, n.Require):
            cond = self._eval(st.cond, state)
            fail_pc = s.mk_and(state.pc, s.mk_not(cond))
            if fail_pc is not s.FALSE:
                self._add_path(PathSummary(
                    path_condition=fail_pc,
                    store=dict(self.initial),
                    returns=(),
                    call_log=state.call_log,
                    reverted=True,
                ))
            ok_pc = s.mk_and(state.pc, cond)
            if ok_pc is not s.FALSE:
                yield self._fork(state, ok_pc), None
        elif isinstance(st, n.Return):
            yield from self._exec_return(st, state, depth)
        elif isinstance(st, n.ExprStmt):
            if isinstance(st.expr, n.Call):
                for out_state, _vals in self._exec_call(st.expr, state, depth):
                    yield out_state, None
            else:
                yield state, None
        elif isinstance(st, n.Emit):
            yield state, None
        elif isinstance(st, n.Placeholder):
            raise UnsupportedConstruct("loose '_;' outside modifier")
        else:
            raise UnsupportedConstruct(type(st).__name__)

    def _exec_loop(self, st, post, state: _State, depth: int, budget: int):
        cond = self._eval(st.cond, state) if st.cond is not None else s.TRUE
        exit_pc = s.mk_and(state.pc, s.mk_not(cond))
        if exit_pc is not s.FALSE:
            yield self._fork(state, exit_pc), None
        enter_pc = s.mk_and(state.pc, cond)
        if enter_pc is s.FALSE:
            return
        entered = self._fork(state, enter_pc)
        if budget == 0:
            # would iterate beyond the unroll bound: record and stop here
            self._add_path(PathSummary(
                path_condition=entered.pc,
                store=entered.store,
                returns=(),
                call_log=entered.call_log,
                bound_hit=True,
            ))
            return
        for after_body, rets in self._exec_block(st.body, entered, depth):
            if rets is not None:
                yield after_body, rets
                continue
            if post is not None:
                for cur, _r in self._exec_stmt(post, after_body, depth):
                    yield from self._exec_loop(
                        st, post, cur, depth, budget - 1)
            else:
                yield from self._exec_loop(
                    st, post, after_body, depth, budget - 1)

    def _exec_return(self, st: n.Return, state: _State, depth: int):
        """A call may stand as a whole return value; `return f();` with
        a multi-valued f forwards the entire tuple."""
        states: list[tuple[_State, list]] = [(state, [])]
        for v in st.values:
            nxt: list[tuple[_State, list]] = []
            if isinstance(v, n.Call):
                for cur, acc in states:
                    for out_state, vals in self._exec_call(v, cur, depth):
                        if len(st.values) == 1:
                            nxt.append((out_state, list(vals)))
                        else:
                            nxt.append((out_state, acc + [vals[0]]))
            else:
                for cur, acc in states:
                    nxt.append((cur, acc + [self._eval(v, cur)]))
            states = nxt
        for cur, acc in states:
            yield cur, tuple(acc)

    # ------------------------------------------------------------ statements

    def _exec_vardecl(self, st: n.VarDecl, state: _State, depth: int):
        sort = type_sort(st.ty, self.cfg)
        if st.init is None:
            state.locals[st.name] = self._zero(sort)
            yield state, None
        elif isinstance(st.init, n.Call):
            for out_state, vals in self._exec_call(st.init, state, depth):
                out_state.locals[st.name] = self._coerce(vals[0], sort)
                yield out_state, None
        else:
            state.locals[st.name] = self._coerce(
                self._eval(st.init, state), sort)
            yield state, None

    def _exec_tupledecl(self, st: n.TupleDecl, state: _State, depth: int):
        for out_state, vals in self._exec_call(st.init, state, depth):
            for (ty, name), v in zip(st.vars, vals):
                sort = type_sort(ty, self.cfg)
                out_state.locals[name] = self._coerce(v, sort)
            yield out_state, None

    def _exec_assign(self, st: n.Assign, state: _State, depth: int):
        if isinstance(st.value, n.Call):
            if st.op != "=":
                raise UnsupportedConstruct("compound assign from a call")
            for out_state, vals in self._exec_call(st.value, state, depth):
                self._write(st.target, vals[0], out_state)
                yield out_state, None
            return
        value = self._eval(st.value, state)
        if st.op != "=":
            current = self._eval(st.target, state)
            current, value = self._level(current, value)
            value = self._arith(st.op[0], current, value, state)
        target_sort = self._target_sort(st.target)
        self._write(st.target, self._coerce(value, target_sort), state)
        yield state, None

    def _target_sort(self, target: n.Expr) -> tuple:
        ty = self.analysis.type_of(target)
        if ty is None:
            raise SymExecError("untyped assignment target")
        return type_sort(ty, self.cfg)

    def _write(self, target: n.Expr, value: SymValue, state: _State) -> None:
        if isinstance(target, n.Name):
            name = target.ident
            if name in state.locals:
                state.locals[name] = value
            elif name in state.store:
                state.store[name] = value
            else:
                raise SymExecError(f"write to unknown name {name}")
            return
        if isinstance(target, n.Member):
            base = target.obj
            if isinstance(base, n.Name):
                key = f"{base.ident}.{target.name}"
                if key in state.store:
                    state.store[key] = value
                    return
                if key in state.locals:
                    state.locals[key] = value
                    return
            raise UnsupportedConstruct("unsupported member write")
        if isinstance(target, n.Index):
            arr_expr = target.obj
            key = self._eval(target.key, state)
            arr = self._eval_ref(arr_expr, state)
            key = self._coerce(key, arr.sort[1])
            updated = s.mk_store(arr, key, self._coerce(value, arr.sort[2]))
            self._write_ref(arr_expr, updated, state)
            return
        raise UnsupportedConstruct("unsupported assignment target")

    def _eval_ref(self, e: n.Expr, state: _State) -> SymValue:
        """Evaluate an expression that denotes an array value."""
        if isinstance(e, n.Name):
            if e.ident in state.locals:
                return state.locals[e.ident]
            if e.ident in state.store:
                return state.store[e.ident]
            raise SymExecError(f"unknown array {e.ident}")
        if isinstance(e, n.Index):
            outer = self._eval_ref(e.obj, state)
            key = self._coerce(self._eval(e.key, state), outer.sort[1])
            return s.mk_select(outer, key)
        if isinstance(e, n.Member):
            base = e.obj
            if isinstance(base, n.Name):
                key = f"{base.ident}.{e.name}"
                if key in state.store:
                    return state.store[key]
        raise UnsupportedConstruct("unsupported array reference")

    def _write_ref(self, e: n.Expr, value: SymValue, state: _State) -> None:
        if isinstance(e, n.Name):
            self._write(e, value, state)
            return
        if isinstance(e, n.Index):
            outer = self._eval_ref(e.obj, state)
            key = self._coerce(self._eval(e.key, state), outer.sort[1])
            self._write_ref(e.obj, s.mk_store(outer, key, value), state)
            return
        raise UnsupportedConstruct("unsupported nested store target")

    # ------------------------------------------------------------ calls

    def _exec_call(self, call: n.Call, state: _State, depth: int):
        """Yield (state, tuple_of_results) per continuation."""
        if isinstance(call.callee, n.Name):
            yield from self._exec_internal(call, state, depth)
        elif isinstance(call.callee, n.Member):
            yield self._exec_external(call, state)
        else:
            raise UnsupportedConstruct("call through a computed target")

    def _exec_internal(self, call: n.Call, state: _State, depth: int):
        if depth >= self.cfg.max_inline_depth:
            raise UnsupportedConstruct("internal call depth limit hit")
        name = call.callee.ident
        target = self.scope.functions.get(name)
        if target is None:
            raise SymExecError(f"unknown internal function {name}")
        expanded = expand_function(target, self.contract, self.alloc)
        args = [self._eval(a, state) for a in call.args]
        callee_locals = {}
        for p, v in zip(expanded.params, args):
            sort = type_sort(p.ty, self.cfg)
            callee_locals[p.name] = self._coerce(v, sort)
        saved_locals = state.locals
        inner = replace_locals(state, callee_locals)
        for end, rets in self._exec_block(expanded.body, inner, depth + 1):
            fitted = self._fit_returns(rets, expanded.returns)
            yield replace_locals(end, dict(saved_locals)), fitted

    def _exec_external(self, call: n.Call, state: _State):
        member = call.callee
        base = member.obj
        if not isinstance(base, n.Name):
            raise UnsupportedConstruct("external call through an expression")
        iface_ty = self.analysis.type_of(base)
        iface_name = iface_ty.name if iface_ty is not None else "?"
        iface = self.analysis.interfaces.get(iface_name)
        target = None
        if iface is not None:
            target = next(
                (f for f in iface.functions if f.name == member.name), None)
        if target is None:
            raise SymExecError(
                f"unresolved external call {base.ident}.{member.name}")
        args = tuple(self._eval(a, state) for a in call.args)
        index = state.call_count + 1
        results = tuple(
            s.CallSym(
                name=f"call!{base.ident}.{member.name}!{index}!r{slot}",
                sort=type_sort(t, self.cfg),
                callee=base.ident,
                iface=iface_name,
                fn=member.name,
                index=index,
                slot=slot,
            )
            for slot, t in enumerate(target.returns)
        )
        record = CallRecord(
            callee=base.ident, iface=iface_name, fn=member.name,
            index=index, args=args, results=results,
        )
        new_state = _State(
            pc=state.pc,
            store=state.store,
            locals=state.locals,
            call_log=state.call_log + (record,),
            call_count=index,
        )
        return new_state, results

    # ------------------------------------------------------------ expressions

    def _eval(self, e: n.Expr, state: _State) -> SymValue:
        if isinstance(e, n.IntLit):
            ty = self.analysis.type_of(e)
            if isinstance(ty, n.AddressType):
                width = self.cfg.addr_width
            elif isinstance(ty, n.UintType):
                width = self.cfg.uint_width(ty.bits)
            else:
                width = self.cfg.uint_width(256)
            return s.bv(e.value, width)
        if isinstance(e, n.BoolLit):
            return s.TRUE if e.value else s.FALSE
        if isinstance(e, n.Name):
            name = e.ident
            if name in state.locals:
                return state.locals[name]
            if name in state.store:
                return state.store[name]
            raise SymExecError(f"unknown name {name}")
        if isinstance(e, n.Member):
            if isinstance(e.obj, n.Name):
                key = f"{e.obj.ident}.{e.name}"
                if key in state.store:
                    return state.store[key]
                if key in state.locals:
                    return state.locals[key]
            raise UnsupportedConstruct("unsupported member read")
        if isinstance(e, n.Index):
            arr = self._eval_ref(e.obj, state)
            key = self._coerce(self._eval(e.key, state), arr.sort[1])
            return s.mk_select(arr, key)
        if isinstance(e, n.Unary):
            v = self._eval(e.operand, state)
            if e.op == "!":
                return s.mk_not(v)
            if e.op == "-":
                return s.mk_sub(s.bv(0, s.bv_width(v.sort)), v)
            raise UnsupportedConstruct(f"unary {e.op}")
        if isinstance(e, n.Binary):
            return self._eval_binary(e, state)
        if isinstance(e, n.Cast):
            v = self._eval(e.operand, state)
            if isinstance(e.ty, n.UintType):
                return s.mk_resize(v, self.cfg.uint_width(e.ty.bits))
            if isinstance(e.ty, n.AddressType):
                return s.mk_resize(v, self.cfg.addr_width)
            raise UnsupportedConstruct(f"cast to {e.ty}")
        if isinstance(e, n.Call):
            raise UnsupportedConstruct("call in expression position")
        raise UnsupportedConstruct(type(e).__name__)

    def _eval_binary(self, e: n.Binary, state: _State) -> SymValue:
        op = e.op
        if op == "&&":
            return s.mk_and(self._eval(e.left, state),
                            self._eval(e.right, state))
        if op == "||":
            return s.mk_or(self._eval(e.left, state),
                           self._eval(e.right, state))
        a, b = self._operands(e.left, e.right, state)
        if op in ("==", "!="):
            a, b = self._level(a, b)
            return s.mk_eq(a, b) if op == "==" else s.mk_ne(a, b)
        if op in ("<", "<=", ">", ">="):
            a, b = self._level(a, b)
            cmp = {"<": "ltu", "<=": "leu", ">": "gtu", ">=": "geu"}[op]
            return s.mk_cmp(cmp, a, b)
        if op in ("+", "-", "*", "/", "%"):
            a, b = self._level(a, b)
            return self._arith(op, a, b, state)
        raise UnsupportedConstruct(f"binary {op}")

    def _operands(self, left: n.Expr, right: n.Expr, state: _State):
        """Evaluate a binary's operands, letting a bare integer literal
        adopt the other side's width when the value fits."""
        lit_l = isinstance(left, n.IntLit)
        lit_r = isinstance(right, n.IntLit)
        if lit_l and not lit_r:
            b = self._eval(right, state)
            return self._literal_at(left, b.sort), b
        if lit_r and not lit_l:
            a = self._eval(left, state)
            return a, self._literal_at(right, a.sort)
        return self._eval(left, state), self._eval(right, state)

    def _literal_at(self, lit: n.IntLit, sort: tuple) -> SymValue:
        if s.is_bv(sort) and lit.value < (1 << s.bv_width(sort)):
            return s.Const(lit.value, sort)
        ty = self.analysis.type_of(lit)
        width = self.cfg.uint_width(
            ty.bits if isinstance(ty, n.UintType) else 256)
        return s.bv(lit.value, width)

    def _level(self, a: SymValue, b: SymValue):
        """Zero-extend the narrower bitvector operand."""
        if s.is_bv(a.sort) and s.is_bv(b.sort):
            wa, wb = s.bv_width(a.sort), s.bv_width(b.sort)
            if wa < wb:
                a = s.mk_resize(a, wb)
            elif wb < wa:
                b = s.mk_resize(b, wa)
        return a, b

    def _arith(self, op: str, a: SymValue, b: SymValue,
               state: _State) -> SymValue:
        a, b = self._level(a, b)
        if not self.cfg.checked_arith:
            return {
                "+": s.mk_add, "-": s.mk_sub, "*": s.mk_mul,
                "/": s.mk_udiv, "%": s.mk_urem,
            }[op](a, b)
        # checked mode: the live path narrows past the overflow case,
        # which becomes its own reverted path
        w = s.bv_width(a.sort)
        if op == "+":
            result = s.mk_add(a, b)
            overflow = s.mk_cmp("ltu", result, a)
        elif op == "-":
            result = s.mk_sub(a, b)
            overflow = s.mk_cmp("gtu", b, a)
        elif op == "*":
            result = s.mk_mul(a, b)
            back = s.mk_udiv(result, b)
            overflow = s.mk_and(
                s.mk_ne(b, s.bv(0, w)), s.mk_ne(back, a))
        else:
            result = (s.mk_udiv if op == "/" else s.mk_urem)(a, b)
            overflow = s.mk_eq(b, s.bv(0, w))
        fail_pc = s.mk_and(state.pc, overflow)
        if fail_pc is not s.FALSE:
            self._add_path(PathSummary(
                path_condition=fail_pc,
                store=dict(self.initial),
                returns=(),
                call_log=state.call_log,
                reverted=True,
            ))
        state.pc = s.mk_and(state.pc, s.mk_not(overflow))
        return result

    # ------------------------------------------------------------ plumbing

    def _fork(self, state: _State, pc: SymValue) -> _State:
        return _State(
            pc=pc,
            store=dict(state.store),
            locals=dict(state.locals),
            call_log=state.call_log,
            call_count=state.call_count,
        )

    def _coerce(self, v: SymValue, sort: tuple) -> SymValue:
        if v.sort == sort:
            return v
        if s.is_bv(v.sort) and s.is_bv(sort):
            return s.mk_resize(v, sort[1])
        raise SymExecError(f"cannot coerce {v.sort} to {sort}")


def replace_locals(state: _State, new_locals: dict) -> _State:
    return _State(
        pc=state.pc,
        store=state.store,
        locals=new_locals,
        call_log=state.call_log,
        call_count=state.call_count,
    )
