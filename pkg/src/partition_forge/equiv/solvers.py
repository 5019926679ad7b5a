"""Satisfiability backends behind one interface.

`check(formula)` answers sat, unsat, or unknown. A sat answer carries
a model: scalar names map to ints, array names to {key: value}
tables. The finite-domain backend decides formulas exactly over a
shrunken interpretation by compiling them to straightline bytecode
and enumerating every valuation, so its models are complete and its
unsat answers are definitive for that domain. The process backend
drives any SMT-LIB 2 solver binary over a pipe at full widths; its
models are reconstructed from get-value queries and may miss array
cells, which callers must treat as best effort.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass, field

from .. import _kernels as kernels
from .._kernels import ops as o
from . import smtlib
from . import sym as s
from .bytecode import CompileError, Domain, compile_formula


@dataclass(frozen=True)
class SatResult:
    status: str  # "sat" | "unsat" | "unknown"
    model: dict | None = None
    reason: str | None = None


class FiniteDomainSolver:
    """Complete decision procedure over a finite interpretation.

    Every uint ranges over `domain.width` bits and every address over
    `domain.n_addr` values, so formulas compiled against the matching
    execution config are decided, never guessed.
    """

    name = "finite-domain"

    def __init__(self, domain: Domain | None = None, addr_width: int = 160):
        self.domain = domain or Domain()
        self.addr_width = addr_width

    def check(self, formula: s.SymValue) -> SatResult:
        if isinstance(formula, s.Const):
            return (SatResult("sat", model={}) if formula.value
                    else SatResult("unsat"))
        try:
            prog, lay = compile_formula(formula, self.domain,
                                        self.addr_width)
        except CompileError as exc:
            return SatResult("unknown", reason=str(exc))
        if len(lay.slots) > o.MAX_SCAN_VARS:
            return SatResult(
                "unknown",
                reason=f"{len(lay.slots)} inputs exceed the scan limit")
        total = lay.valuations()
        if total > self.domain.max_valuations:
            return SatResult(
                "unknown",
                reason=f"{total} valuations exceed the enumeration budget")
        try:
            vals = kernels.scan_sat(prog.code, prog.nregs, lay.var_regs,
                                    lay.var_cards, lay.ret_regs[0],
                                    prog.fuel_per_run)
        except (RuntimeError, ValueError) as exc:
            return SatResult("unknown", reason=str(exc))
        if vals is None:
            return SatResult("unsat")
        return SatResult("sat", model=lay.witness(vals))


@dataclass
class _Query:
    """One get-value request and where its answer lands in the model."""

    term: str
    scalar: str | None = None
    cell: tuple | None = None  # (array, key kind, key ref)


class ProcessSolver:
    """One-shot SMT-LIB 2 query against an external solver binary."""

    name = "smt-process"

    def __init__(self, command: tuple[str, ...] = ("z3", "-in"),
                 timeout: float = 60.0):
        self.command = tuple(command)
        self.timeout = timeout

    def check(self, formula: s.SymValue) -> SatResult:
        if isinstance(formula, s.Const):
            return (SatResult("sat", model={}) if formula.value
                    else SatResult("unsat"))
        queries = self._plan_queries(formula)
        script = smtlib.check_sat_script(formula, [q.term for q in queries])
        try:
            proc = subprocess.run(
                self.command, input=script, capture_output=True,
                text=True, timeout=self.timeout)
        except FileNotFoundError:
            return SatResult(
                "unknown", reason=f"solver binary not found: "
                f"{self.command[0]}")
        except subprocess.TimeoutExpired:
            return SatResult(
                "unknown", reason=f"solver timed out after {self.timeout}s")
        status, values = smtlib.parse_response(proc.stdout, len(queries))
        if status == "unsat":
            return SatResult("unsat")
        if status != "sat":
            return SatResult(
                "unknown",
                reason=proc.stderr.strip() or "solver answered unknown")
        if values is None:
            return SatResult("unknown",
                             reason="sat, but the model was unreadable")
        return self._assemble(queries, values)

    def _plan_queries(self, formula: s.SymValue) -> list[_Query]:
        """Scalars directly; array cells at every plausible key.

        Plausible keys: scalar variables of the key sort, plus literal
        keys used with that array anywhere in the formula.
        """
        leaves = s.free_vars(formula)
        scalars = {name: leaf for name, leaf in leaves.items()
                   if leaf.sort[0] != "array"}
        arrays = {name: leaf for name, leaf in leaves.items()
                  if leaf.sort[0] == "array"}
        queries = [
            _Query(term=smtlib.quote(name), scalar=name)
            for name in sorted(scalars)
        ]
        if not arrays:
            return queries
        const_keys = _literal_keys(formula)
        for name in sorted(arrays):
            key_sort = arrays[name].sort[1]
            for sc in sorted(scalars):
                if scalars[sc].sort == key_sort:
                    queries.append(_Query(
                        term=f"(select {smtlib.quote(name)} "
                             f"{smtlib.quote(sc)})",
                        cell=(name, "var", sc)))
            for value in sorted(const_keys.get(name, ())):
                term = f"(_ bv{value} {s.bv_width(key_sort)})"
                queries.append(_Query(
                    term=f"(select {smtlib.quote(name)} {term})",
                    cell=(name, "const", value)))
        return queries

    def _assemble(self, queries: list[_Query],
                  values: list[int]) -> SatResult:
        model: dict = {}
        for q, v in zip(queries, values):
            if q.scalar is not None:
                model[q.scalar] = v
        for q, v in zip(queries, values):
            if q.cell is None:
                continue
            arr, kind, ref = q.cell
            key = model.get(ref) if kind == "var" else ref
            if key is None:
                return SatResult(
                    "unknown", reason=f"model misses key source {ref}")
            model.setdefault(arr, {})[key] = v
        return SatResult("sat", model=model)


def _literal_keys(formula: s.SymValue) -> dict[str, set[int]]:
    """Constant keys selected or stored per named array."""
    out: dict[str, set[int]] = {}
    stack = [formula]
    seen: set[int] = set()
    while stack:
        t = stack.pop()
        if id(t) in seen or not isinstance(t, s.App):
            continue
        seen.add(id(t))
        if t.op in ("select", "store"):
            base, key = t.args[0], t.args[1]
            while isinstance(base, s.App) and base.op in ("store", "ite"):
                base = base.args[0] if base.op == "store" else base.args[1]
            if isinstance(base, (s.Var, s.CallSym)) and isinstance(
                    key, s.Const):
                out.setdefault(base.name, set()).add(key.value)
        stack.extend(t.args)
    return out
