"""Backward program slices over a function's dependence graph.

A slice is the closure of a criterion set under reversed control and
data dependence: starting from the criterion, pull in every node some
criterion member transitively depends on. Dependence is reflexive, so
the criterion is always contained in its own slice. Synthetic
entry/exit nodes participate in dependence but are never slice
members; only statement nodes are.

The privileged slice uses the privileged nodes as criterion, the
normal slice their complement, so together they cover the function and
overlap exactly on the shared scaffolding both sides need (typically
guards and the definitions feeding them).

Rendering produces compilable function text: kept statements appear in
original source order inside their original control structure, guards
of surviving branches are always retained, branches left empty render
as ``{}``, loop headers travel as a unit, and declarations without
initializers are re-emitted when any kept statement mentions them.
Modifier bodies are already spliced into the dependence graph, so the
rendered signature carries no modifier invocations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .frontend import nodes as n
from .frontend.printer import emit
from .graphs.cfg import ENTRY, EXIT
from .graphs.pdg import Pdg


@dataclass(frozen=True)
class Slice:
    function: str
    kind: str  # privileged | normal
    nodes: tuple[int, ...]  # statement nids in source order
    rendered: str

    @property
    def node_set(self) -> frozenset[int]:
        return frozenset(self.nodes)


def normal_criterion(pdg: Pdg, delta: frozenset[int]) -> frozenset[int]:
    return frozenset(pdg.order) - delta


def compute_slice(pdg: Pdg, criterion, kind: str = "privileged") -> Slice:
    bad = set(criterion) - set(pdg.order)
    if bad:
        raise ValueError(f"criterion nodes not in pdg: {sorted(bad)}")

    # reverse dependence: node -> nodes it depends on
    back: dict[int, set[int]] = {}
    for (c, d) in pdg.control_edges:
        back.setdefault(d, set()).add(c)
    for (m, u, _base) in pdg.data_edges:
        back.setdefault(u, set()).add(m)

    keep: set[int] = set(criterion)
    frontier = list(keep)
    while frontier:
        cur = frontier.pop()
        for dep in back.get(cur, ()):
            if dep in (ENTRY, EXIT):
                continue
            if dep not in keep:
                keep.add(dep)
                frontier.append(dep)

    ordered = tuple(nid for nid in pdg.order if nid in keep)
    return Slice(pdg.fn.name, kind, ordered, _render(pdg, keep))


def render_slice(pdg: Pdg, s: Slice) -> str:
    return _render(pdg, set(s.nodes))


def _render(pdg: Pdg, keep: set[int]) -> str:
    fn = pdg.fn  # modifier-expanded copy
    body = _filter_block(fn.body, keep)
    mentioned = _mentioned_bases(body)
    body = _add_bare_decls(fn.body, body, mentioned)
    keeps_return = any(isinstance(s, n.Return) for s in n.walk_stmts(body))
    rendered_fn = n.FunctionDef(
        nid=fn.nid,
        span=fn.span,
        name=fn.name,
        params=list(fn.params),
        returns=list(fn.returns) if keeps_return else [],
        visibility=fn.visibility,
        modifiers=[],
        body=body,
    )
    return emit(rendered_fn)


def _filter_block(stmts: list[n.Stmt], keep: set[int]) -> list[n.Stmt]:
    out: list[n.Stmt] = []
    for s in stmts:
        if isinstance(s, n.VarDecl) and s.init is None:
            continue  # re-added afterwards if still mentioned
        if isinstance(s, n.If):
            if s.nid not in keep:
                continue
            out.append(n.If(
                nid=s.nid, span=s.span, cond=s.cond,
                then=_filter_block(s.then, keep),
                orelse=_filter_block(s.orelse, keep) if s.orelse is not None else None,
            ))
        elif isinstance(s, n.While):
            if s.nid not in keep:
                continue
            out.append(n.While(
                nid=s.nid, span=s.span, cond=s.cond,
                body=_filter_block(s.body, keep),
            ))
        elif isinstance(s, n.For):
            if s.nid not in keep:
                continue
            # header travels as a unit so the loop variable stays declared
            out.append(n.For(
                nid=s.nid, span=s.span, init=s.init, cond=s.cond, post=s.post,
                body=_filter_block(s.body, keep),
            ))
        else:
            if s.nid in keep:
                out.append(s)
    return out


def _mentioned_bases(stmts: list[n.Stmt]) -> set[str]:
    bases: set[str] = set()
    for s in stmts:
        for e in n.stmt_exprs(s):
            for x in n.walk_exprs(e):
                if isinstance(x, n.Name):
                    bases.add(x.ident)
        if isinstance(s, n.VarDecl):
            bases.add(s.name)
        if isinstance(s, n.If):
            bases |= _mentioned_bases(s.then)
            if s.orelse is not None:
                bases |= _mentioned_bases(s.orelse)
        elif isinstance(s, n.While):
            bases |= _mentioned_bases(s.body)
        elif isinstance(s, n.For):
            if s.init is not None:
                bases |= _mentioned_bases([s.init])
            if s.post is not None:
                bases |= _mentioned_bases([s.post])
            bases |= _mentioned_bases(s.body)
    return bases


def _add_bare_decls(original: list[n.Stmt], filtered: list[n.Stmt],
                    mentioned: set[str]) -> list[n.Stmt]:
    """Re-insert initializer-less declarations whose names survive."""

    def sub(block: list[n.Stmt], fblock: list[n.Stmt]) -> list[n.Stmt]:
        res: list[n.Stmt] = []
        fmap = {s.nid: s for s in fblock}
        for s in block:
            if isinstance(s, n.VarDecl) and s.init is None:
                if s.name in mentioned:
                    res.append(s)
                continue
            kept = fmap.get(s.nid)
            if kept is None:
                continue
            if isinstance(s, n.If) and isinstance(kept, n.If):
                res.append(n.If(
                    nid=kept.nid, span=kept.span, cond=kept.cond,
                    then=sub(s.then, kept.then),
                    orelse=sub(s.orelse, kept.orelse)
                    if s.orelse is not None and kept.orelse is not None else kept.orelse,
                ))
            elif isinstance(s, n.While) and isinstance(kept, n.While):
                res.append(n.While(nid=kept.nid, span=kept.span, cond=kept.cond,
                                   body=sub(s.body, kept.body)))
            elif isinstance(s, n.For) and isinstance(kept, n.For):
                res.append(n.For(nid=kept.nid, span=kept.span, init=kept.init,
                                 cond=kept.cond, post=kept.post,
                                 body=sub(s.body, kept.body)))
            else:
                res.append(kept)
        return res

    return sub(original, filtered)
