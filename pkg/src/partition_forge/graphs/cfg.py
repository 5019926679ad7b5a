"""Control-flow graphs over MiniSol function bodies.

Functions are expanded before graph construction: modifier bodies are
spliced at their ``_;`` placeholder (outermost modifier first), with
modifier parameters substituted by the invocation arguments. Spliced
statements receive fresh node ids so every id stays unique within the
unit; their spans still point at the modifier definition.

CFG nodes are executable statements identified by nid. Bare
declarations (``uint64 x;``) declare scope but execute nothing, so they
are not nodes. Three synthetic nodes frame the graph: ENTRY, EXIT and
REVERT (the target of failing require edges and of runtime panics).
"""

from __future__ import annotations

import copy
import dataclasses
from dataclasses import dataclass, field

from ..frontend import nodes as n

ENTRY = -1
EXIT = -2
REVERT = -3


@dataclass
class Cfg:
    fn: n.FunctionDef  # expanded function
    stmts: dict[int, n.Stmt] = field(default_factory=dict)
    succ: dict[int, list[int]] = field(default_factory=dict)
    pred: dict[int, list[int]] = field(default_factory=dict)
    order: list[int] = field(default_factory=list)  # statement nids, source order

    def add_edge(self, a: int, b: int) -> None:
        if b not in self.succ.setdefault(a, []):
            self.succ[a].append(b)
        if a not in self.pred.setdefault(b, []):
            self.pred[b].append(a)

    @property
    def node_ids(self) -> list[int]:
        return [ENTRY, EXIT, REVERT] + self.order


class _IdAllocator:
    def __init__(self, start: int):
        self.next_id = start

    def take(self) -> int:
        nid = self.next_id
        self.next_id += 1
        return nid


def max_node_id(unit: n.SourceUnit) -> int:
    best = 0
    for node in n.walk(unit):
        if isinstance(node, n.Node):
            best = max(best, node.nid)
    return best


def _clone(node, alloc: _IdAllocator, subst: dict[str, n.Expr]):
    """Deep-copy an AST fragment with fresh nids, substituting names."""
    if isinstance(node, n.Name) and node.ident in subst:
        return _clone(subst[node.ident], alloc, {})
    if isinstance(node, list):
        return [_clone(x, alloc, subst) for x in node]
    if isinstance(node, tuple):
        return tuple(_clone(x, alloc, subst) for x in node)
    if isinstance(node, n.TypeName):
        return node  # types are immutable
    if not isinstance(node, n.Node):
        return copy.deepcopy(node)
    kw = {}
    for f in dataclasses.fields(node):
        if f.name == "nid":
            kw["nid"] = alloc.take()
        elif f.name == "span":
            kw["span"] = node.span
        else:
            kw[f.name] = _clone(getattr(node, f.name), alloc, subst)
    return type(node)(**kw)


def expand_function(
    fn: n.FunctionDef,
    contract: n.ContractDef,
    alloc: _IdAllocator,
) -> n.FunctionDef:
    """Return a copy of fn with modifier bodies spliced around the body."""
    modifiers = {m.name: m for m in contract.modifiers}
    body = fn.body
    for inv in reversed(fn.modifiers):
        md = modifiers.get(inv.name)
        if md is None:
            continue
        subst = {p.name: arg for p, arg in zip(md.params, inv.args)}
        spliced: list[n.Stmt] = []
        _splice(md.body, body, alloc, subst, spliced)
        body = spliced
    expanded = n.FunctionDef(
        nid=fn.nid,
        span=fn.span,
        name=fn.name,
        params=list(fn.params),
        returns=list(fn.returns),
        visibility=fn.visibility,
        modifiers=[],
        body=body,
    )
    return expanded


def _splice(mod_body, inner: list[n.Stmt], alloc, subst, out: list[n.Stmt]) -> None:
    for s in mod_body:
        if isinstance(s, n.Placeholder):
            out.extend(inner)
            continue
        cloned = _clone(s, alloc, subst)
        cloned = _splice_nested(cloned, inner, alloc)
        out.append(cloned)


def _splice_nested(stmt: n.Stmt, inner: list[n.Stmt], alloc) -> n.Stmt:
    """Replace a ``_;`` nested inside a cloned compound statement."""

    def fix(block: list[n.Stmt]) -> list[n.Stmt]:
        out: list[n.Stmt] = []
        for s in block:
            if isinstance(s, n.Placeholder):
                out.extend(inner)
            else:
                out.append(_splice_nested(s, inner, alloc))
        return out

    if isinstance(stmt, n.If):
        stmt.then = fix(stmt.then)
        stmt.orelse = fix(stmt.orelse)
    elif isinstance(stmt, n.While):
        stmt.body = fix(stmt.body)
    elif isinstance(stmt, n.For):
        stmt.body = fix(stmt.body)
    return stmt


def build_cfg(fn: n.FunctionDef) -> Cfg:
    """Build the CFG of an already-expanded function."""
    cfg = Cfg(fn)
    exits = _seq(fn.body, [ENTRY], cfg)
    for src in exits:
        cfg.add_edge(src, EXIT)
    cfg.add_edge(REVERT, EXIT)
    if EXIT not in cfg.succ:
        cfg.succ[EXIT] = []
    return cfg


def _register(stmt: n.Stmt, cfg: Cfg) -> int:
    cfg.stmts[stmt.nid] = stmt
    cfg.order.append(stmt.nid)
    return stmt.nid


def _seq(stmts: list[n.Stmt], dangling: list[int], cfg: Cfg) -> list[int]:
    """Wire a statement list; returns the dangling exits of the sequence."""
    for s in stmts:
        dangling = _stmt(s, dangling, cfg)
    return dangling


def _stmt(s: n.Stmt, dangling: list[int], cfg: Cfg) -> list[int]:
    if isinstance(s, n.VarDecl) and s.init is None:
        return dangling  # scope declaration, nothing executes

    if isinstance(s, n.If):
        nid = _register(s, cfg)
        for d in dangling:
            cfg.add_edge(d, nid)
        then_exits = _seq(s.then, [nid], cfg)
        else_exits = _seq(s.orelse, [nid], cfg) if s.orelse else [nid]
        return then_exits + else_exits

    if isinstance(s, n.While):
        nid = _register(s, cfg)
        for d in dangling:
            cfg.add_edge(d, nid)
        body_exits = _seq(s.body, [nid], cfg)
        for d in body_exits:
            cfg.add_edge(d, nid)
        return [nid]

    if isinstance(s, n.For):
        if s.init is not None:
            dangling = _stmt(s.init, dangling, cfg)
        nid = _register(s, cfg)
        for d in dangling:
            cfg.add_edge(d, nid)
        body_exits = _seq(s.body, [nid], cfg)
        if s.post is not None:
            body_exits = _stmt(s.post, body_exits, cfg)
        for d in body_exits:
            cfg.add_edge(d, nid)
        return [nid]

    if isinstance(s, n.Require):
        nid = _register(s, cfg)
        for d in dangling:
            cfg.add_edge(d, nid)
        cfg.add_edge(nid, REVERT)
        return [nid]

    if isinstance(s, n.Return):
        nid = _register(s, cfg)
        for d in dangling:
            cfg.add_edge(d, nid)
        cfg.add_edge(nid, EXIT)
        return []

    # straight-line statements
    nid = _register(s, cfg)
    for d in dangling:
        cfg.add_edge(d, nid)
    return [nid]


def postdominators(cfg: Cfg) -> dict[int, set[int]]:
    """Postdominator sets (including the node itself) over the CFG."""
    ids = cfg.node_ids
    full = set(ids)
    pdom: dict[int, set[int]] = {nid: set(full) for nid in ids}
    pdom[EXIT] = {EXIT}
    changed = True
    while changed:
        changed = False
        for nid in reversed(ids):
            if nid == EXIT:
                continue
            succs = cfg.succ.get(nid, [])
            if succs:
                new = set(full)
                for s in succs:
                    new &= pdom[s]
            else:
                new = set()
            new.add(nid)
            if new != pdom[nid]:
                pdom[nid] = new
                changed = True
    return pdom


def control_dependence(cfg: Cfg) -> set[tuple[int, int]]:
    """Edges (c, nid): nid is control-dependent on branch node c."""
    pdom = postdominators(cfg)
    edges: set[tuple[int, int]] = set()
    for c in cfg.node_ids:
        succs = cfg.succ.get(c, [])
        if len(succs) < 2:
            continue
        for nid in cfg.order:
            if nid == c or nid in pdom[c]:
                continue
            if any(nid in pdom[s] for s in succs):
                edges.add((c, nid))
    return edges
