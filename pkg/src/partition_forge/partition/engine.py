"""Candidate generation loop: prompt, compile-fix, security repair.

One round produces at most one candidate. The backend's reply is
reduced to its most plausible code block, grafted into the original
unit when the model answered with bare functions, and pushed through
the compiler. Compile diagnostics go back to the backend as fix
prompts, at most max_fix_tries - 1 times. Whatever compiles is shape-
checked (same entry signature, internal `<entry>_priv`, entry invokes
it) and then security-checked by rerunning sensitivity analysis on
the candidate itself; an insecure candidate becomes the bad-partition
exhibit in the next round's prompt.

Budgets: at most max_candidates rounds, and per round at most
1 + (max_fix_tries - 1) backend calls. The loop also stops early on a
fixed point, when an unchanged prompt reproduces a candidate already
seen byte for byte.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field, replace

from ..frontend import nodes as n
from ..frontend import ParseError, analyze, check, parse
from ..frontend.printer import emit
from ..graphs.pdg import build_pdgs
from ..taint import AnnotationError, AnnotationSet, identify
from .backends import GeneratorBackend
from .prompts import (BadPartition, GenerationContext,
                      render_fix_prompt, render_generation_prompt)


@dataclass(frozen=True)
class SecurityVerdict:
    status: str  # "secure" | "insecure"
    reason: str | None = None
    offending: tuple[int, ...] = ()


@dataclass
class PartitionCandidate:
    ident: int
    source: str
    contract: str
    entry: str
    has_callback: bool
    fix_count: int
    round: int
    security: str = "unchecked"  # unchecked | secure | insecure
    security_reason: str | None = None

    @property
    def priv_name(self) -> str:
        return f"{self.entry}_priv"

    @property
    def callback_name(self) -> str:
        return f"{self.entry}_callback"


@dataclass
class GenerationStats:
    rounds: int = 0
    prompts_sent: int = 0
    fix_calls: int = 0
    duplicates: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)


@dataclass
class GenerationResult:
    candidates: list[PartitionCandidate]
    stats: GenerationStats


_FENCE = re.compile(r"```[a-zA-Z]*\n(.*?)```", re.DOTALL)
_CODE_START = re.compile(
    r"^\s*(pragma\b|interface\b|contract\b|function\b|modifier\b)",
    re.MULTILINE)


def extract_code(text: str) -> str:
    """Pull the code out of a model reply.

    Fenced blocks win, longest parseable first; otherwise the reply
    itself, trimmed to the first line that starts like code. Returns
    the best guess even when nothing parses, so the compile loop can
    report an honest diagnostic on it.
    """
    blocks = [m.group(1).strip() for m in _FENCE.finditer(text)]
    blocks.sort(key=len, reverse=True)
    plain = text.strip()
    m = _CODE_START.search(plain)
    trimmed = plain[m.start():].strip() if m else plain
    for cand in blocks + [trimmed, plain]:
        if cand and _parses(cand):
            return cand
    if blocks:
        return blocks[0]
    return trimmed


def _parses(code: str) -> bool:
    try:
        parse(code)
        return True
    except ParseError:
        pass
    try:
        parse("contract __graft__ {\n" + code + "\n}")
        return True
    except ParseError:
        return False


def normalize_candidate(code: str, original: n.SourceUnit,
                        contract: str, entry: str) -> tuple[str | None, list]:
    """Turn extracted code into a full compilable unit.

    A reply holding a complete unit is used as is. Bare functions are
    grafted into a copy of the original unit in place of the entry
    function. Returns (source, diagnostics); source is None when the
    code does not parse at all.
    """
    unit = None
    try:
        unit = parse(code)
    except ParseError as exc:
        unit = None
        parse_diag = exc
    if unit is not None and unit.contracts:
        src = code
    else:
        try:
            wrapper = parse("contract __graft__ {\n" + code + "\n}")
        except ParseError:
            return None, [parse_diag if unit is None else
                          ParseError("reply contains no contract")]
        fns = wrapper.contracts[0].functions
        if not fns:
            return None, [ParseError("reply contains no functions")]
        src = _graft(original, contract, entry, fns)
    try:
        grafted = parse(src)
    except ParseError as exc:
        return None, [exc]
    return src, check(grafted)


def _graft(original: n.SourceUnit, contract: str, entry: str,
           fns: list[n.FunctionDef]) -> str:
    unit = copy.deepcopy(original)
    target = next(c for c in unit.contracts if c.name == contract)
    old = next((f for f in target.functions if f.name == entry), None)
    incoming = {f.name for f in fns}
    kept = [f for f in target.functions
            if f is not old and f.name not in incoming]
    target.functions = kept + list(fns)
    if target.member_order:
        order = []
        for m in target.member_order:
            if m is old:
                order.extend(fns)
            elif isinstance(m, n.FunctionDef) and m.name in incoming:
                continue
            elif not isinstance(m, n.FunctionDef) \
                    or any(m is k for k in kept):
                order.append(m)
        for f in fns:
            if not any(f is m for m in order):
                order.append(f)
        target.member_order = order
    return emit(unit)


def check_shape(source: str, original: n.SourceUnit, contract: str,
                entry: str) -> tuple[str | None, bool]:
    """(problem, has_callback). problem is None when the shape holds:
    entry keeps its signature and visibility, `<entry>_priv` exists and
    is internal, the entry's body invokes it, and the callback, when
    present, is internal too.
    """
    unit = parse(source)
    cand = next((c for c in unit.contracts if c.name == contract), None)
    if cand is None:
        return f"contract {contract} missing from candidate", False
    fns = {f.name: f for f in cand.functions}
    orig_contract = next(c for c in original.contracts
                         if c.name == contract)
    orig_entry = next(f for f in orig_contract.functions
                      if f.name == entry)

    new_entry = fns.get(entry)
    if new_entry is None:
        return f"entry function {entry} missing", False
    if new_entry.visibility != orig_entry.visibility:
        return f"entry visibility changed to {new_entry.visibility}", False
    if [str(p.ty) for p in new_entry.params] != \
            [str(p.ty) for p in orig_entry.params]:
        return "entry parameter types changed", False
    if [str(t) for t in new_entry.returns] != \
            [str(t) for t in orig_entry.returns]:
        return "entry return types changed", False

    priv = fns.get(f"{entry}_priv")
    if priv is None:
        return f"privileged function {entry}_priv missing", False
    if priv.visibility != "internal":
        return f"{entry}_priv must be internal, is {priv.visibility}", False

    callback = fns.get(f"{entry}_callback")
    if callback is not None and callback.visibility != "internal":
        return (f"{entry}_callback must be internal, "
                f"is {callback.visibility}"), False

    if not _calls_to(new_entry, priv.name):
        return f"entry never invokes {priv.name}", False
    return None, callback is not None


def _calls_to(fn: n.FunctionDef, callee: str) -> list[n.Call]:
    out = []
    for st in n.walk_stmts(fn.body):
        for sub in n.walk(st):
            if (isinstance(sub, n.Call) and isinstance(sub.callee, n.Name)
                    and sub.callee.ident == callee):
                out.append(sub)
    return out


def validate_security(source: str, ann: AnnotationSet,
                      entry: str) -> SecurityVerdict:
    """Re-derive sensitivity on the candidate and demand a clean
    public side.

    Secure means: no privileged statement in the entry, the callback,
    or anything they reach through internal calls without passing
    through `<entry>_priv`; and every argument the entry hands to the
    privileged function is caller data (an entry parameter,
    msg.sender, or a literal), never derived state.
    """
    try:
        unit = parse(source)
    except ParseError as exc:
        return SecurityVerdict("insecure", f"does not parse: {exc}")
    if check(unit):
        return SecurityVerdict("insecure", "does not type-check")
    try:
        pdgs = build_pdgs(unit, analyze(unit))
        report = identify(ann, pdgs)
    except AnnotationError as exc:
        return SecurityVerdict(
            "insecure", f"sensitivity analysis failed: {exc}")

    contract = next(c for c in unit.contracts if c.name == ann.contract)
    fns = {f.name: f for f in contract.functions}
    priv_name = f"{entry}_priv"
    public_side = [name for name in (entry, f"{entry}_callback")
                   if name in fns]
    if entry not in fns:
        return SecurityVerdict("insecure", f"entry {entry} missing")

    seen: set[str] = set()
    frontier = list(public_side)
    while frontier:
        name = frontier.pop()
        if name in seen or name == priv_name:
            continue
        seen.add(name)
        for st in n.walk_stmts(fns[name].body):
            for sub in n.walk(st):
                if (isinstance(sub, n.Call)
                        and isinstance(sub.callee, n.Name)
                        and sub.callee.ident in fns
                        and sub.callee.ident not in seen):
                    frontier.append(sub.callee.ident)

    offending: list[int] = []
    dirty: list[str] = []
    for name in sorted(seen - {priv_name}):
        delta = report.delta(name)
        if delta:
            offending.extend(sorted(delta))
            dirty.append(name)
    if offending:
        return SecurityVerdict(
            "insecure",
            "privileged statements remain on the public side in "
            + ", ".join(dirty), tuple(offending))

    entry_params = {p.name for p in fns[entry].params}
    for call in _calls_to(fns[entry], priv_name):
        for arg in call.args:
            if not _caller_data(arg, entry_params):
                return SecurityVerdict(
                    "insecure",
                    f"privileged call argument is not caller data: "
                    f"{_expr_text(arg)}")
    return SecurityVerdict("secure")


def _caller_data(e: n.Expr, params: set[str]) -> bool:
    if isinstance(e, (n.IntLit, n.BoolLit, n.StrLit)):
        return True
    if isinstance(e, n.Name):
        return e.ident in params
    if (isinstance(e, n.Member) and e.name == "sender"
            and isinstance(e.obj, n.Name) and e.obj.ident == "msg"):
        return True
    return False


def _expr_text(e: n.Expr) -> str:
    from ..frontend.printer import expr_text
    return expr_text(e)


def generate_candidates(ctx: GenerationContext, backend: GeneratorBackend,
                        original: n.SourceUnit, ann: AnnotationSet,
                        entry: str, max_candidates: int = 10,
                        max_fix_tries: int = 10) -> GenerationResult:
    """Run the full generation loop for one entry function."""
    if max_candidates < 1 or max_fix_tries < 1:
        raise ValueError("budgets must be at least 1")
    stats = GenerationStats()
    candidates: list[PartitionCandidate] = []
    seen_sources: dict[str, int] = {}
    bad: BadPartition | None = None
    prev_prompt: str | None = None

    for rnd in range(max_candidates):
        stats.rounds += 1
        prompt = render_generation_prompt(replace(ctx, bad_partition=bad))
        reply = backend.complete(prompt)
        stats.prompts_sent += 1

        code = extract_code(reply)
        source, diags = normalize_candidate(code, original, ann.contract,
                                            entry)
        fix_count = 0
        while diags and fix_count < max_fix_tries - 1:
            fix = render_fix_prompt(code, diags)
            reply = backend.complete(fix)
            stats.prompts_sent += 1
            stats.fix_calls += 1
            fix_count += 1
            code = extract_code(reply)
            source, diags = normalize_candidate(code, original,
                                                ann.contract, entry)
        if diags:
            stats.rejected.append(
                (rnd, f"still broken after {fix_count} fixes: {diags[0]}"))
            if prompt == prev_prompt:
                break
            prev_prompt = prompt
            continue

        problem, has_callback = check_shape(source, original, ann.contract,
                                            entry)
        if problem is not None:
            stats.rejected.append((rnd, f"shape: {problem}"))
            if prompt == prev_prompt:
                break
            prev_prompt = prompt
            continue

        if source in seen_sources:
            stats.duplicates += 1
            if prompt == prev_prompt:
                break
            prev_prompt = prompt
            continue

        verdict = validate_security(source, ann, entry)
        cand = PartitionCandidate(
            ident=len(candidates), source=source, contract=ann.contract,
            entry=entry, has_callback=has_callback, fix_count=fix_count,
            round=rnd, security=verdict.status,
            security_reason=verdict.reason)
        candidates.append(cand)
        seen_sources[source] = cand.ident

        if verdict.status == "insecure":
            bad = BadPartition(code=source,
                               explanation=verdict.reason or "insecure")
        prev_prompt = prompt

    return GenerationResult(candidates=candidates, stats=stats)
