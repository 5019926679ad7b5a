"""Exhaustive equivalence checking over a small finite domain.

Both functions are compiled against one shared register layout and run
over every valuation of initial state, parameters, and environment.
Two runs agree when they end the same way (normal or reverted) and,
for normal endings, leave identical state and returns; a reverted run
publishes nothing, so its registers are not compared.

The verdict is exact for the shrunken semantics (uints at
Domain.width bits, Domain.n_addr addresses). It serves as the ground
truth the symbolic route is tested against, and as the default
decision procedure when no SMT solver binary is available.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import _kernels
from .._kernels import ops as o
from ..frontend import nodes as n
from ..frontend.checker import Analysis, analyze
from .bytecode import (CompileError, Domain, Layout, Program, build_layout,
                       compile_function, env_names_used)


class DomainTooLarge(Exception):
    pass


@dataclass(frozen=True)
class BruteResult:
    verdict: str  # equivalent | not_equivalent | inconclusive
    witness: dict | None = None
    valuations: int = 0
    reason: str | None = None


def resolve_function(unit: n.SourceUnit, contract_name: str,
                     fn_name: str) -> tuple[n.ContractDef, n.FunctionDef]:
    contract = next(
        (c for c in unit.contracts if c.name == contract_name), None)
    if contract is None:
        raise ValueError(f"no contract named {contract_name}")
    fn = next((f for f in contract.functions if f.name == fn_name), None)
    if fn is None:
        raise ValueError(f"no function {contract_name}.{fn_name}")
    return contract, fn


def state_signature(contract: n.ContractDef, analysis: Analysis) -> list:
    scope = analysis.scopes[contract.name]
    return sorted((name, str(ty)) for name, ty in scope.state_vars.items()
                  if not isinstance(ty, n.InterfaceType))


def brute_force_equivalence(
    unit_a: n.SourceUnit, contract_a: str, fn_a: str,
    unit_b: n.SourceUnit, contract_b: str, fn_b: str,
    domain: Domain | None = None,
    analysis_a: Analysis | None = None,
    analysis_b: Analysis | None = None,
) -> BruteResult:
    domain = domain or Domain()
    if analysis_a is None:
        analysis_a = analyze(unit_a)
    if analysis_b is None:
        analysis_b = analyze(unit_b)
    if not analysis_a.ok or not analysis_b.ok:
        raise ValueError("both units must type-check")
    ca, fa = resolve_function(unit_a, contract_a, fn_a)
    cb, fb = resolve_function(unit_b, contract_b, fn_b)

    sig_a = [(str(p.ty)) for p in fa.params]
    sig_b = [(str(p.ty)) for p in fb.params]
    if sig_a != sig_b or [p.name for p in fa.params] != \
            [p.name for p in fb.params]:
        raise ValueError("functions have different parameter lists")
    if [str(t) for t in fa.returns] != [str(t) for t in fb.returns]:
        raise ValueError("functions have different return types")
    if state_signature(ca, analysis_a) != state_signature(cb, analysis_b):
        raise ValueError("contracts declare different state")

    env = env_names_used(fa, ca) | env_names_used(fb, cb)
    layout = build_layout(ca, analysis_a, fa, env, domain)
    if layout.valuations() > domain.max_valuations:
        raise DomainTooLarge(
            f"{layout.valuations()} valuations exceed the cap "
            f"{domain.max_valuations}")
    if len(layout.slots) > o.MAX_SCAN_VARS:
        raise DomainTooLarge(f"{len(layout.slots)} enumerated variables")

    prog_a = compile_function(fa, unit_a, ca, analysis_a, layout)
    prog_b = compile_function(fb, unit_b, cb, analysis_b, layout)
    return run_pair(prog_a, prog_b, layout)


def run_pair(prog_a: Program, prog_b: Program, layout: Layout) -> BruteResult:
    nregs = max(prog_a.nregs, prog_b.nregs)
    fuel = max(prog_a.fuel_per_run, prog_b.fuel_per_run)
    status, vals, oa, ob = _kernels.scan_pair(
        prog_a.code, prog_b.code, nregs,
        layout.var_regs, layout.var_cards, layout.cmp_regs, fuel)
    total = layout.valuations()
    if status == 0:
        return BruteResult("equivalent", valuations=total)
    if status == 1:
        if oa != ob:
            reason = "one run reverted and the other did not"
        else:
            reason = "final state or returns differ"
        return BruteResult("not_equivalent", witness=layout.witness(vals),
                           valuations=total, reason=reason)
    return BruteResult(
        "inconclusive", witness=layout.witness(vals), valuations=total,
        reason="a run exhausted its fuel or trapped")
