"""Test-corpus generators: random typed programs and security mutants.

random_pair produces small compilable function pairs for cross-
checking the symbolic equivalence checker against brute-force
enumeration: the second program is either a faithful copy or a
single-site mutation of the first, so the pair population contains
both equivalent and inequivalent cases without either verdict being
assumed. Programs stay inside what both checkers support: scalar
uints, one address-keyed mapping, branching, bounded arithmetic, no
external calls.

security_mutants plants privileged statements into the public part
of a partitioned candidate: copies of the candidate's own privileged
statements where they still compile, plus direct writes to sensitive
state. Every returned mutant parses and type-checks, so a rejection
can only come from the security rule itself.
"""

from __future__ import annotations

import random
import re

from .frontend import analyze, check, parse
from .frontend import nodes as n
from .frontend.printer import emit
from .graphs.pdg import build_pdgs
from .taint import AnnotationSet, identify

_OPS = ("+", "-", "*", "/", "%")
_CMPS = ("<", "<=", ">", ">=", "==", "!=")


class ProgramGen:
    """Deterministic random generator for one-function contracts."""

    def __init__(self, seed: int, max_stmts: int = 15):
        self.rng = random.Random(seed)
        self.max_stmts = max_stmts

    # ------------------------------------------------------ expressions

    def _atom(self, scope: list[str]) -> str:
        r = self.rng
        if scope and r.random() < 0.7:
            return r.choice(scope)
        return str(r.randrange(0, 16))

    def _expr(self, scope: list[str], depth: int = 0) -> str:
        r = self.rng
        if depth >= 2 or r.random() < 0.4:
            return self._atom(scope)
        a = self._expr(scope, depth + 1)
        b = self._expr(scope, depth + 1)
        return f"({a} {r.choice(_OPS)} {b})"

    def _cond(self, scope: list[str]) -> str:
        a = self._expr(scope, 1)
        b = self._expr(scope, 1)
        return f"{a} {self.rng.choice(_CMPS)} {b}"

    # ------------------------------------------------------- statements

    def _stmts(self, scope: list[str], budget: int, depth: int,
               lines: list[str], indent: str) -> int:
        r = self.rng
        used = 0
        while used < budget:
            kind = r.random()
            if kind < 0.22 and depth < 2 and budget - used >= 3:
                inner = r.randrange(1, min(4, budget - used - 1) + 1)
                lines.append(f"{indent}if ({self._cond(scope)}) {{")
                used += 1
                used += self._stmts(list(scope), inner, depth + 1,
                                    lines, indent + "  ")
                if r.random() < 0.5 and used < budget:
                    lines.append(f"{indent}}} else {{")
                    inner2 = r.randrange(1, min(3, budget - used) + 1)
                    used += self._stmts(list(scope), inner2, depth + 1,
                                        lines, indent + "  ")
                lines.append(indent + "}")
            elif kind < 0.32:
                name = f"t{len(scope)}"
                lines.append(f"{indent}uint64 {name} = "
                             f"{self._expr(scope)};")
                scope.append(name)
                used += 1
            elif kind < 0.44:
                lines.append(f"{indent}require({self._cond(scope)}, "
                             f"\"guard\");")
                used += 1
            elif kind < 0.58:
                lines.append(f"{indent}m[msg.sender] = "
                             f"{self._expr(scope)};")
                used += 1
            elif kind < 0.68 and scope:
                tgt = self.rng.choice(scope)
                lines.append(f"{indent}{tgt} = {self._expr(scope)};")
                used += 1
            elif kind < 0.78:
                lines.append(f"{indent}s0 = m[msg.sender];")
                used += 1
            else:
                tgt = r.choice(("s0", "s1"))
                op = r.choice(("=", "+=", "-="))
                lines.append(f"{indent}{tgt} {op} {self._expr(scope)};")
                used += 1
        return used

    def program(self) -> str:
        r = self.rng
        n_params = r.randrange(0, 3)
        params = ", ".join(f"uint64 p{i}" for i in range(n_params))
        scope = ["s0", "s1"] + [f"p{i}" for i in range(n_params)]
        lines: list[str] = []
        budget = r.randrange(3, self.max_stmts + 1)
        self._stmts(scope, budget, 0, lines, "    ")
        if r.random() < 0.4:
            lines.append(f"    return {self._expr(scope)};")
            ret = " returns (uint64)"
        else:
            ret = ""
        body = "\n".join(lines)
        return (
            "contract Gen {\n"
            "  uint64 public s0;\n"
            "  uint64 public s1;\n"
            "  mapping(address => uint64) private m;\n"
            f"  function f({params}) external{ret} {{\n"
            f"{body}\n"
            "  }\n"
            "}\n")

    # -------------------------------------------------------- mutation

    def mutate(self, source: str) -> str:
        r = self.rng
        swaps = [
            (" + ", " - "), (" - ", " + "), (" * ", " + "),
            ("<= ", "< "), (" < ", " <= "), (" > ", " >= "),
            ("== ", "!= "), (" += ", " -= "),
        ]
        r.shuffle(swaps)
        for old, new in swaps:
            spots = [m.start() for m in re.finditer(re.escape(old), source)]
            if spots:
                at = r.choice(spots)
                return source[:at] + new + source[at + len(old):]
        digits = [m for m in re.finditer(r"\b\d+\b", source[source.index("{"):])]
        if digits:
            m = r.choice(digits)
            off = source.index("{")
            val = (int(m.group()) + 1) % 16
            return (source[:off + m.start()] + str(val)
                    + source[off + m.end():])
        return source

    def pair(self) -> tuple[str, str, bool]:
        """(source_a, source_b, mutated). Compilable by construction;
        regenerates on the rare type-check failure."""
        for _ in range(50):
            src = self.program()
            try:
                unit = parse(src)
            except Exception:
                continue
            if check(unit):
                continue
            if self.rng.random() < 0.45:
                return src, src, False
            mut = self.mutate(src)
            try:
                mut_unit = parse(mut)
            except Exception:
                return src, src, False
            if check(mut_unit):
                return src, src, False
            return src, mut, mut != src
        raise RuntimeError("generator failed to produce a typed program")


def _seed_touches(ann: AnnotationSet, state_vars: dict) -> list[str]:
    out = []
    for var in sorted(ann.sensitive_vars):
        ty = state_vars.get(var)
        if isinstance(ty, n.MappingType):
            cell = f"{var}[msg.sender]"
            out.append(f"{cell} = 0;")
            out.append(f"{cell} = {cell};")
            out.append(f"{cell} = {cell} + 1;")
            out.append(f"{cell} += 0;")
            out.append(f"{ty.value} probe_{var} = {cell};")
            out.append(f'require({cell} >= 0, "probe");')
        elif isinstance(ty, n.BoolType):
            out.append(f"{var} = {var};")
            out.append(f"{var} = true;")
            out.append(f"bool probe_{var} = {var};")
        elif isinstance(ty, n.UintType):
            out.append(f"{var} = {var};")
            out.append(f"{var} = 0;")
            out.append(f"{var} = {var} + 1;")
            out.append(f"{var} += 0;")
            out.append(f"{ty} probe_{var} = {var};")
            out.append(f'require({var} >= 0, "probe");')
    return out


def security_mutants(candidate_source: str, ann: AnnotationSet,
                     entry: str, limit: int = 40) -> list[str]:
    """Compilable variants of a partitioned candidate with at least
    one privileged statement placed on the public side."""
    unit = parse(candidate_source)
    if check(unit):
        raise ValueError("candidate must type-check")
    pdgs = build_pdgs(unit, analyze(unit))
    report = identify(ann, pdgs)
    per_fn = pdgs.by_contract[ann.contract]
    priv_name = f"{entry}_priv"
    cb_name = f"{entry}_callback"

    contract = next(c for c in unit.contracts if c.name == ann.contract)
    fns = {f.name: f for f in contract.functions}
    scope = pdgs.analysis.scopes[ann.contract]

    # statements of the privileged function that are themselves
    # privileged and reference nothing local to it
    movable: list[str] = []
    if priv_name in per_fn:
        pdg = per_fn[priv_name]
        delta = report.delta(priv_name)
        priv_fn = fns[priv_name]
        param_map = _sender_param(priv_fn)
        for nid in pdg.order:
            if nid not in delta:
                continue
            stmt = pdg.nodes[nid].stmt
            if isinstance(stmt, (n.If, n.While, n.For)):
                continue
            text = emit(stmt).splitlines()[0]
            names = {x.ident for e in n.stmt_exprs(stmt)
                     for x in n.walk_exprs(e) if isinstance(x, n.Name)}
            if isinstance(stmt, n.VarDecl):
                continue
            if not names <= (set(scope.state_vars) | set(param_map)):
                continue
            for old, new in param_map.items():
                text = re.sub(rf"\b{old}\b", new, text)
            movable.append(text)

    seeds = _seed_touches(ann, scope.state_vars)
    snippets = list(dict.fromkeys(movable + seeds))

    mutants: list[str] = []
    targets = [name for name in (entry, cb_name) if name in fns]
    for snippet in snippets:
        for target in targets:
            for position in ("first", "last"):
                mutated = _insert_stmt(candidate_source, unit, ann.contract,
                                       target, snippet, position)
                if mutated is None:
                    continue
                try:
                    munit = parse(mutated)
                except Exception:
                    continue
                if check(munit):
                    continue
                mutants.append(mutated)
                if len(mutants) >= limit:
                    return mutants
    return mutants


def _sender_param(fn: n.FunctionDef) -> dict[str, str]:
    for p in fn.params:
        if isinstance(p.ty, n.AddressType):
            return {p.name: "msg.sender"}
    return {}


def _insert_stmt(source: str, unit: n.SourceUnit, contract: str,
                 fn_name: str, snippet: str, position: str) -> str | None:
    import copy

    wrapped = f"contract __m__ {{ function __f__() external {{ {snippet} }} }}"
    try:
        stmt = parse(wrapped).contracts[0].functions[0].body[0]
    except Exception:
        return None
    new_unit = copy.deepcopy(unit)
    target = next(c for c in new_unit.contracts if c.name == contract)
    fn = next(f for f in target.functions if f.name == fn_name)
    stmt = copy.deepcopy(stmt)
    if position == "first":
        fn.body.insert(0, stmt)
    else:
        fn.body.append(stmt)
    return emit(new_unit)
