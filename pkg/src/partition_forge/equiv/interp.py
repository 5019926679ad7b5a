"""Concrete execution by constant folding the symbolic executor.

A valuation assigns integers to every scalar (state variables,
parameters, environment values) and key/value tables to mappings.
Running the executor over a store of constants folds every branch
condition, so exactly one feasible path survives; its summary is the
concrete outcome. Sharing the executor guarantees the concrete and
symbolic semantics can never drift apart.

External call results come from a supplied table keyed by
(callee variable, function name, 1-based call index); a missing entry
aborts the run, since inventing results would make the outcome
meaningless.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..frontend import nodes as n
from ..frontend.checker import Analysis, analyze
from ..graphs.cfg import expand_function
from . import sym as s
from .symexec import (ExecConfig, SymExecError, _Executor, _State,
                      initial_store, type_sort)


class MissingCallResult(SymExecError):
    pass


@dataclass(frozen=True)
class ConcreteOutcome:
    reverted: bool
    store: dict  # scalar name -> int, mapping name -> dict[int, int]
    returns: tuple
    calls: tuple  # (callee, fn, index, args) actually made


def run_concrete(fn: n.FunctionDef, unit: n.SourceUnit, cfg: ExecConfig,
                 valuation: dict, args: dict | None = None,
                 call_results: dict | None = None,
                 analysis: Analysis | None = None,
                 contract: n.ContractDef | None = None,
                 concrete_fuel: int = 10_000) -> ConcreteOutcome:
    """Run fn under a concrete valuation.

    valuation maps store names (state vars, flattened struct fields,
    environment names) to ints or, for mappings, to {key: value}
    dicts; missing names default to zero. Parameter values are read
    from valuation too, unless given separately via args.
    """
    if analysis is None:
        analysis = analyze(unit)
        if not analysis.ok:
            raise SymExecError("unit does not type-check")
    if contract is None:
        contract = next(c for c in unit.contracts
                        if any(f.nid == fn.nid for f in c.functions))
    # loops must run to completion on concrete inputs; the unroll bound
    # becomes a plain fuel cap
    run_cfg = replace(cfg, loop_unroll=concrete_fuel)
    ex = _ConcreteExecutor(unit, contract, analysis, run_cfg,
                           valuation, args or {}, call_results or {})
    paths = ex.run(fn)
    live = [p for p in paths if p.path_condition is s.TRUE]
    if len(live) != 1:
        raise SymExecError(
            f"expected one feasible concrete path, found {len(live)}")
    path = live[0]
    if path.bound_hit:
        raise SymExecError("concrete execution ran out of loop fuel")
    return ConcreteOutcome(
        reverted=path.reverted,
        store=_flatten_store(path.store),
        returns=tuple(_const_value(v) for v in path.returns),
        calls=tuple((c.callee, c.fn, c.index,
                     tuple(_const_value(a) for a in c.args))
                    for c in path.call_log),
    )


class _ConcreteExecutor(_Executor):
    def __init__(self, unit, contract, analysis, cfg, valuation, args,
                 call_results):
        super().__init__(unit, contract, analysis, cfg)
        self.valuation = valuation
        self.args = args
        self.call_results = call_results

    def run(self, fn: n.FunctionDef):
        symbolic = initial_store(self.contract, self.analysis, self.cfg)
        self.initial = {
            name: _concretize(var.sort, self.valuation.get(name, 0))
            for name, var in symbolic.items()
        }
        expanded = expand_function(fn, self.contract, self.alloc)
        locals_ = {}
        for p in expanded.params:
            sort = type_sort(p.ty, self.cfg)
            raw = self.args.get(p.name, self.valuation.get(p.name, 0))
            locals_[p.name] = _concretize(sort, raw)
        state = _State(
            pc=s.TRUE,
            store=dict(self.initial),
            locals=locals_,
            call_log=(),
        )
        for end, rets in self._exec_block(expanded.body, state, depth=0):
            self._finish(end, rets, expanded)
        return self.paths

    def _exec_external(self, call, state):
        new_state, results = super()._exec_external(call, state)
        record = new_state.call_log[-1]
        key = (record.callee, record.fn, record.index)
        if key not in self.call_results:
            raise MissingCallResult(f"no result supplied for {key}")
        vals = self.call_results[key]
        if len(vals) != len(results):
            raise MissingCallResult(f"result arity mismatch for {key}")
        concrete = tuple(
            _concretize(r.sort, v) for r, v in zip(results, vals))
        return new_state, concrete


def _concretize(sort: tuple, raw) -> s.SymValue:
    if sort[0] == "array":
        table = raw if isinstance(raw, dict) else {}
        arr = s.mk_const_array(sort, _concretize(sort[2], 0))
        for key in sorted(table):
            arr = s.mk_store(arr, _concretize(sort[1], key),
                             _concretize(sort[2], table[key]))
        return arr
    return s.Const(int(raw), sort)


def _const_value(v: s.SymValue):
    if not isinstance(v, s.Const):
        raise SymExecError(f"value did not fold to a constant: {v!r}")
    return v.value


def _flatten_store(store: dict) -> dict:
    out = {}
    for name, v in store.items():
        if v.sort[0] == "array":
            out[name] = _array_table(v)
        else:
            out[name] = _const_value(v)
    return out


def _array_table(v: s.SymValue) -> dict:
    """Collapse a store chain over a constant array to {key: value}."""
    table: dict = {}
    pending = []
    while isinstance(v, s.App) and v.op == "store":
        pending.append((v.args[1], v.args[2]))
        v = v.args[0]
    if not (isinstance(v, s.App) and v.op == "K"):
        raise SymExecError("mapping did not fold to concrete cells")
    default = _const_value(v.args[0])
    for key, val in reversed(pending):
        table[_const_value(key)] = _const_value(val)
    return {k: val for k, val in table.items() if val != default}
