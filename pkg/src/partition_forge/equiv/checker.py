"""Functional equivalence of two functions over one contract state.

Both sides are symbolically executed from a shared initial store
(state variables, parameters, and environment values become identical
symbols), their behaviors are folded into one disequality formula,
and a solver looks for an input that makes the behaviors differ:
final state, return values, revert outcome, or the sequence of
external calls and their arguments.

Verdict discipline:

- `not_equivalent` is only reported after the candidate model replays
  concretely on both sides and the outcomes really diverge. A model
  that fails to replay downgrades to `unknown`.
- `equivalent` is only reported when the disequality is unsatisfiable
  and every loop-bound-hit path condition is unsatisfiable too, so no
  feasible behavior was left unexplored.
- With the finite-domain solver both answers are exact for the
  shrunken interpretation (every uint at `domain.width` bits,
  addresses drawn from `domain.n_addr` values); with an SMT solver
  they hold at the declared widths.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..frontend import nodes as n
from ..frontend.checker import analyze
from . import sym as s
from .brute import resolve_function, state_signature
from .interp import run_concrete
from .solvers import FiniteDomainSolver, SatResult
from .symexec import (ENV_VARS, ExecConfig, PathSummary, SymExecError,
                      initial_store, sym_exec, type_sort)


@dataclass(frozen=True)
class EquivResult:
    verdict: str  # "equivalent" | "not_equivalent" | "unknown"
    witness: dict | None = None
    reason: str | None = None
    solver: str = ""
    queries: int = 0
    paths_a: int = 0
    paths_b: int = 0
    elapsed: float = 0.0


class SignatureMismatch(ValueError):
    """The two functions cannot be compared at all."""


def check_equivalence(
    unit_a: n.SourceUnit, contract_a: str, fn_a: str,
    unit_b: n.SourceUnit, contract_b: str, fn_b: str,
    solver=None,
    loop_unroll: int = 5,
    time_budget: float = 600.0,
    checked_arith: bool = False,
    max_paths: int = 4096,
) -> EquivResult:
    t0 = time.perf_counter()
    if solver is None:
        solver = FiniteDomainSolver()
    an_a = _checked_analysis(unit_a, "first")
    an_b = _checked_analysis(unit_b, "second")
    ca, fa = resolve_function(unit_a, contract_a, fn_a)
    cb, fb = resolve_function(unit_b, contract_b, fn_b)
    _require_same_signature(fa, fb)
    if state_signature(ca, an_a) != state_signature(cb, an_b):
        raise SignatureMismatch("contract state layouts differ")

    cfg = _exec_config(solver, loop_unroll, time_budget, checked_arith,
                       max_paths)

    def done(verdict, witness=None, reason=None, queries=0,
             pa=0, pb=0):
        return EquivResult(
            verdict=verdict, witness=witness, reason=reason,
            solver=getattr(solver, "name", type(solver).__name__),
            queries=queries, paths_a=pa, paths_b=pb,
            elapsed=time.perf_counter() - t0)

    try:
        paths_a = sym_exec(fa, unit_a, cfg, analysis=an_a, contract=ca)
        paths_b = sym_exec(fb, unit_b, cfg, analysis=an_b, contract=cb)
    except SymExecError as exc:
        return done("unknown", reason=f"symbolic execution failed: {exc}")

    store_a = initial_store(ca, an_a, cfg)
    store_b = initial_store(cb, an_b, cfg)
    if set(store_a) != set(store_b):
        raise SignatureMismatch("contract state layouts differ")
    state_names = sorted(set(store_a) - set(ENV_VARS))
    ret_sorts = [type_sort(t, cfg) for t in fa.returns]

    normal_a = [p for p in paths_a if not p.reverted and not p.bound_hit]
    normal_b = [p for p in paths_b if not p.reverted and not p.bound_hit]
    revert_a = [p for p in paths_a if p.reverted]
    revert_b = [p for p in paths_b if p.reverted]
    bound = [p for p in paths_a + paths_b if p.bound_hit]

    has_calls = any(p.call_log for p in normal_a + normal_b)
    if has_calls:
        formulas = _pair_queries(normal_a, revert_a, normal_b, revert_b,
                                 state_names)
    else:
        formulas = [_merged_diff(normal_a, revert_a, normal_b, revert_b,
                                 state_names, store_a, ret_sorts)]

    queries = 0
    inconclusive = None
    for formula in formulas:
        if formula is s.FALSE:
            continue
        queries += 1
        res: SatResult = solver.check(formula)
        if res.status == "unknown":
            inconclusive = inconclusive or res.reason
            continue
        if res.status != "sat":
            continue
        witness, verdict_reason = _replay_witness(
            res.model, cfg,
            (fa, unit_a, ca, an_a), (fb, unit_b, cb, an_b),
            paths_a + paths_b)
        if witness is not None:
            return done("not_equivalent", witness=witness,
                        reason=verdict_reason, queries=queries,
                        pa=len(paths_a), pb=len(paths_b))
        inconclusive = inconclusive or (
            f"candidate model did not replay as a difference: "
            f"{verdict_reason}")
    if inconclusive is not None:
        return done("unknown", reason=inconclusive, queries=queries,
                    pa=len(paths_a), pb=len(paths_b))

    # disequality unsatisfiable; behaviors past the loop bound are
    # still unexamined, so those regions must be unreachable
    if bound:
        reach = s.mk_or(*[p.path_condition for p in bound])
        queries += 1
        res2 = solver.check(reach)
        if res2.status != "unsat":
            why = (res2.reason if res2.status == "unknown"
                   else "loop bound reached on a feasible path")
            return done("unknown", reason=why, queries=queries,
                        pa=len(paths_a), pb=len(paths_b))
    return done("equivalent", queries=queries,
                pa=len(paths_a), pb=len(paths_b))


def _checked_analysis(unit: n.SourceUnit, which: str):
    analysis = analyze(unit)
    if not analysis.ok:
        msgs = "; ".join(str(d) for d in analysis.diagnostics[:3])
        raise SignatureMismatch(f"{which} unit does not type-check: {msgs}")
    return analysis


def _require_same_signature(fa: n.FunctionDef, fb: n.FunctionDef) -> None:
    sig_a = [(p.name, str(p.ty)) for p in fa.params]
    sig_b = [(p.name, str(p.ty)) for p in fb.params]
    if sig_a != sig_b:
        raise SignatureMismatch(
            f"parameter lists differ: {sig_a} vs {sig_b}")
    if [str(t) for t in fa.returns] != [str(t) for t in fb.returns]:
        raise SignatureMismatch("return types differ")


def _exec_config(solver, loop_unroll: int, time_budget: float,
                 checked_arith: bool, max_paths: int) -> ExecConfig:
    if isinstance(solver, FiniteDomainSolver):
        return ExecConfig(
            loop_unroll=loop_unroll, time_budget=time_budget,
            checked_arith=checked_arith, max_paths=max_paths,
            addr_width=solver.addr_width,
            width_override=solver.domain.width)
    return ExecConfig(
        loop_unroll=loop_unroll, time_budget=time_budget,
        checked_arith=checked_arith, max_paths=max_paths)


# ------------------------------------------------------------- formulas


def _merged_diff(normal_a, revert_a, normal_b, revert_b,
                 state_names, init_store, ret_sorts) -> s.SymValue:
    """Single disequality for call-free sides.

    Each side folds to one value per state variable and return slot
    (ITE chains guarded by path conditions, defaulting to the initial
    symbol), so the whole comparison is one formula. Inputs that only
    reach bound-hit paths fall through to the defaults on both sides
    and cannot create a spurious difference.
    """
    rev_a = s.mk_or(*[p.path_condition for p in revert_a])
    rev_b = s.mk_or(*[p.path_condition for p in revert_b])
    diffs = []
    for name in state_names:
        va = _fold_value(normal_a, lambda p: p.store[name],
                         init_store[name])
        vb = _fold_value(normal_b, lambda p: p.store[name],
                         init_store[name])
        diffs.append(s.mk_ne(va, vb))
    for i, sort in enumerate(ret_sorts):
        default = _zero(sort)
        ra = _fold_value(normal_a, lambda p: p.returns[i], default)
        rb = _fold_value(normal_b, lambda p: p.returns[i], default)
        diffs.append(s.mk_ne(ra, rb))
    return s.mk_or(
        s.mk_and(rev_a, s.mk_not(rev_b)),
        s.mk_and(rev_b, s.mk_not(rev_a)),
        s.mk_and(s.mk_not(rev_a), s.mk_not(rev_b), s.mk_or(*diffs)),
    )


def _fold_value(paths, pick, default: s.SymValue) -> s.SymValue:
    value = default
    for p in paths:
        value = s.mk_ite(p.path_condition, pick(p), value)
    return value


def _zero(sort: tuple) -> s.SymValue:
    if sort == s.BOOL:
        return s.FALSE
    if s.is_bv(sort):
        return s.Const(0, sort)
    raise SymExecError(f"no default for return sort {sort}")


def _call_tags(p: PathSummary) -> tuple:
    return tuple((c.callee, c.fn, len(c.args)) for c in p.call_log)


def _conjuncts(pc: s.SymValue) -> tuple:
    if isinstance(pc, s.App) and pc.op == "and":
        return pc.args
    return (pc,)


def _contradictory(pc_a: s.SymValue, pc_b: s.SymValue) -> bool:
    """True when one side asserts a condition the other negates.

    Branch forks produce exactly `c` on one arm and `(not c)` on the
    other, so this catches most cross-path pairs without touching a
    solver.
    """
    ca, cb = _conjuncts(pc_a), _conjuncts(pc_b)
    for t in ca:
        if isinstance(t, s.App) and t.op == "not" and t.args[0] in cb:
            return True
    for t in cb:
        if isinstance(t, s.App) and t.op == "not" and t.args[0] in ca:
            return True
    return False


def _pair_queries(normal_a, revert_a, normal_b, revert_b,
                  state_names) -> list[s.SymValue]:
    """Disequality per path pair, for sides making external calls.

    One merged query would drag every variable of every path into a
    single enumeration; per-pair queries stay over each pair's own
    variables. Matching call sequences contribute argument, state,
    and return disequalities; a pair whose call sequences differ is a
    behavioral difference wherever the joint condition holds, since
    calls are externally visible. Results of matching calls are
    shared symbols, which models a deterministic environment
    answering both sides alike. Likely-divergent pairs come first so
    a witness turns up early.
    """
    matched, mismatched, reverts = [], [], []
    for pa in normal_a:
        for pb in normal_b:
            joint = s.mk_and(pa.path_condition, pb.path_condition)
            if joint is s.FALSE or _contradictory(
                    pa.path_condition, pb.path_condition):
                continue
            if _call_tags(pa) != _call_tags(pb):
                mismatched.append(joint)
                continue
            diffs = []
            for ca, cb in zip(pa.call_log, pb.call_log):
                for x, y in zip(ca.args, cb.args):
                    diffs.append(s.mk_ne(x, y))
            for name in state_names:
                diffs.append(s.mk_ne(pa.store[name], pb.store[name]))
            for ra, rb in zip(pa.returns, pb.returns):
                diffs.append(s.mk_ne(ra, rb))
            matched.append(s.mk_and(joint, s.mk_or(*diffs)))
    for one, other in ((revert_a, normal_b), (revert_b, normal_a)):
        for pa in one:
            for pb in other:
                if _contradictory(pa.path_condition, pb.path_condition):
                    continue
                reverts.append(
                    s.mk_and(pa.path_condition, pb.path_condition))
    return matched + reverts + mismatched


# -------------------------------------------------------------- replay


def _collect_call_results(paths, model: dict) -> dict:
    """Environment answers per (callee, fn, index), from the model.

    Result symbols missing from the model were unconstrained; zero is
    as good an environment as any.
    """
    out: dict = {}
    for p in paths:
        for rec in p.call_log:
            key = (rec.callee, rec.fn, rec.index)
            if key not in out:
                out[key] = tuple(
                    model.get(cs.name, 0) for cs in rec.results)
    return out


def _replay_witness(model: dict, cfg: ExecConfig, side_a, side_b,
                    all_paths) -> tuple[dict | None, str]:
    """Run both sides concretely on the model; confirm divergence.

    Returns (witness, how-they-differ) on success, (None, why-not)
    otherwise.
    """
    call_results = _collect_call_results(all_paths, model)
    outcomes = []
    for fn, unit, contract, analysis in (side_a, side_b):
        try:
            outcomes.append(run_concrete(
                fn, unit, cfg, model, call_results=call_results,
                analysis=analysis, contract=contract))
        except SymExecError as exc:
            return None, str(exc)
    oa, ob = outcomes
    witness = {k: v for k, v in model.items()
               if not k.startswith("call!")}
    if oa.reverted != ob.reverted:
        return witness, "one side reverts and the other does not"
    if oa.reverted:
        return None, "both sides revert"
    if oa.calls != ob.calls:
        return witness, "external call sequences differ"
    if oa.store != ob.store:
        return witness, "final states differ"
    if oa.returns != ob.returns:
        return witness, "return values differ"
    return None, "outcomes agree"
