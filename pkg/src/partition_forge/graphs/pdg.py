"""Program dependence graphs.

Each function yields one PDG: its CFG statement nodes plus synthetic
entry/exit, control-dependence edges from the postdominator relation,
and data-dependence edges from reaching definitions.

Variable references are tracked by base identifier. Reads keep their
member path for explainability (``pos.x`` reads base ``pos`` with path
``('x',)``); writes through an index or member are abstracted to the
base and treated as weak updates (``bids[k1] = v`` generates a
definition of ``bids`` without killing other keys' definitions), while
scalar writes kill. Environment values (``msg.sender``, block fields)
are bases defined at entry.

External interface calls read their callee handle and every argument,
define their assignment targets, and also write the callee handle:
the call may mutate state behind the interface, and a later read
through the same handle depends on it. Internal calls read arguments
and define targets only; cross-function effects are the sensitivity
analysis' job.

``is_dependent(a, b, pdg)`` asks whether value flow can carry ``a``
into ``b`` inside one PDG: it is the reflexive-transitive closure of
single-node transfers (a node reads x, with a reaching definition of
x, and writes y), which is exactly a chain of data edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..frontend import nodes as n
from ..frontend.checker import Analysis, analyze
from .cfg import ENTRY, EXIT, REVERT, Cfg, _IdAllocator, build_cfg, \
    control_dependence, expand_function, max_node_id


@dataclass(frozen=True)
class VarRef:
    base: str
    path: tuple[str, ...] = ()

    def __str__(self) -> str:
        return ".".join((self.base,) + self.path)


@dataclass
class PdgNode:
    nid: int
    stmt: n.Stmt | None  # None for synthetic nodes
    reads: frozenset[VarRef]
    writes: frozenset[VarRef]

    @property
    def rw(self) -> frozenset[VarRef]:
        return self.reads | self.writes


@dataclass
class Pdg:
    contract: str
    fn: n.FunctionDef  # expanded: modifiers spliced, none left on the signature
    fn_original: n.FunctionDef
    cfg: Cfg
    nodes: dict[int, PdgNode] = field(default_factory=dict)
    control_edges: set[tuple[int, int]] = field(default_factory=set)
    data_edges: set[tuple[int, int, str]] = field(default_factory=set)
    order: list[int] = field(default_factory=list)
    _flow: dict[str, set[str]] | None = None
    _flow_closure: dict[str, set[str]] | None = None

    @property
    def stmt_ids(self) -> list[int]:
        return list(self.order)

    def node(self, nid: int) -> PdgNode:
        return self.nodes[nid]

    def flow_graph(self) -> dict[str, set[str]]:
        """base -> bases its value can reach in one node transfer."""
        if self._flow is None:
            flow: dict[str, set[str]] = {}
            for (_, use, base) in self.data_edges:
                node = self.nodes[use]
                for w in node.writes:
                    flow.setdefault(base, set()).add(w.base)
            self._flow = flow
        return self._flow

    def flow_reach(self, base: str) -> set[str]:
        if self._flow_closure is None:
            self._flow_closure = {}
        cached = self._flow_closure.get(base)
        if cached is not None:
            return cached
        flow = self.flow_graph()
        seen = {base}
        frontier = [base]
        while frontier:
            cur = frontier.pop()
            for nxt in flow.get(cur, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        self._flow_closure[base] = seen
        return seen


def is_dependent(a: str, b: str, pdg: Pdg) -> bool:
    """True iff a (possibly empty) chain of data edges carries a into b."""
    if a == b:
        return True
    return b in pdg.flow_reach(a)


@dataclass
class PdgSet:
    unit: n.SourceUnit
    analysis: Analysis
    by_contract: dict[str, dict[str, Pdg]] = field(default_factory=dict)

    def contract(self, name: str) -> dict[str, Pdg]:
        return self.by_contract[name]

    def all_pdgs(self) -> list[Pdg]:
        out = []
        for cname in sorted(self.by_contract):
            fns = self.by_contract[cname]
            out.extend(fns[fname] for fname in fns)
        return out

    def get(self, contract: str, fn: str) -> Pdg | None:
        return self.by_contract.get(contract, {}).get(fn)


def build_pdgs(unit: n.SourceUnit, analysis: Analysis | None = None) -> PdgSet:
    if analysis is None:
        analysis = analyze(unit)
    pdgs = PdgSet(unit, analysis)
    alloc = _IdAllocator(max_node_id(unit) + 1)
    for contract in unit.contracts:
        per_fn: dict[str, Pdg] = {}
        for fn in contract.functions:
            per_fn[fn.name] = _build_one(fn, contract, analysis, alloc)
        pdgs.by_contract[contract.name] = per_fn
    return pdgs


def build_pdg(
    fn: n.FunctionDef, contract: n.ContractDef, analysis: Analysis
) -> Pdg:
    alloc = _IdAllocator(max_node_id(analysis.unit) + 1)
    return _build_one(fn, contract, analysis, alloc)


def _build_one(fn, contract, analysis, alloc) -> Pdg:
    expanded = expand_function(fn, contract, alloc)
    cfg = build_cfg(expanded)
    pdg = Pdg(contract=contract.name, fn=expanded, fn_original=fn, cfg=cfg)
    scope = analysis.scopes[contract.name]
    state_types = scope.state_vars

    # accesses per node
    for nid in cfg.order:
        stmt = cfg.stmts[nid]
        reads, writes = _accesses(stmt, state_types)
        pdg.nodes[nid] = PdgNode(nid, stmt, frozenset(reads), frozenset(writes))
    pdg.order = list(cfg.order)

    # synthetic nodes; entry defines initial values of everything readable
    params = [p.name for p in expanded.params]
    entry_writes = set(state_types) | set(params)
    for stmt in n.walk_stmts(expanded.body):
        if isinstance(stmt, n.VarDecl) and stmt.init is None:
            entry_writes.add(stmt.name)
    for node in pdg.nodes.values():
        for ref in node.reads:
            if ref.base in _ENV_BASES:
                entry_writes.add(ref.base)
    pdg.nodes[ENTRY] = PdgNode(
        ENTRY, None,
        frozenset(VarRef(p) for p in params),
        frozenset(VarRef(b) for b in sorted(entry_writes)),
    )
    pdg.nodes[EXIT] = PdgNode(EXIT, None, frozenset(), frozenset())

    pdg.control_edges = control_dependence(cfg)
    pdg.data_edges = _data_edges(pdg, state_types, analysis)
    return pdg


_ENV_BASES = {"msg.sender", "block.timestamp", "block.number", "this"}


def _accesses(stmt, state_types) -> tuple[set[VarRef], set[VarRef]]:
    reads: set[VarRef] = set()
    writes: set[VarRef] = set()

    def read_expr(e: n.Expr | None) -> None:
        if e is None:
            return
        if isinstance(e, n.Call):
            _call_effects(e, None, reads, writes)
            return
        for ref in _expr_reads(e):
            reads.add(ref)

    if isinstance(stmt, n.VarDecl):
        if stmt.init is not None:
            if isinstance(stmt.init, n.Call):
                _call_effects(stmt.init, [VarRef(stmt.name)], reads, writes)
            else:
                read_expr(stmt.init)
                writes.add(VarRef(stmt.name))
        return reads, writes
    if isinstance(stmt, n.TupleDecl):
        targets = [VarRef(name) for _, name in stmt.vars]
        _call_effects(stmt.init, targets, reads, writes)
        return reads, writes
    if isinstance(stmt, n.Assign):
        base, path, index_reads = _lvalue_parts(stmt.target)
        reads |= index_reads
        if isinstance(stmt.value, n.Call):
            _call_effects(stmt.value, [VarRef(base)], reads, writes)
        else:
            read_expr(stmt.value)
        writes.add(VarRef(base))
        if stmt.op != "=":
            reads.add(VarRef(base, path))
        return reads, writes
    if isinstance(stmt, (n.If, n.While)):
        read_expr(stmt.cond)
        return reads, writes
    if isinstance(stmt, n.For):
        read_expr(stmt.cond)
        return reads, writes
    if isinstance(stmt, n.Require):
        read_expr(stmt.cond)
        return reads, writes
    if isinstance(stmt, n.Return):
        for v in stmt.values:
            read_expr(v)
        return reads, writes
    if isinstance(stmt, n.ExprStmt):
        if isinstance(stmt.expr, n.Call):
            _call_effects(stmt.expr, [], reads, writes)
        return reads, writes
    if isinstance(stmt, n.Emit):
        for a in stmt.args:
            read_expr(a)
        return reads, writes
    return reads, writes


def _call_effects(call: n.Call, targets, reads, writes) -> None:
    """Reads/writes of a call in value position; targets may be None."""
    for a in call.args:
        for ref in _expr_reads(a):
            reads.add(ref)
    if isinstance(call.callee, n.Member):
        # external interface call through a handle expression
        for ref in _expr_reads(call.callee.obj):
            reads.add(ref)
        handle = _base_of(call.callee.obj)
        if handle is not None:
            writes.add(VarRef(handle))
    if targets:
        for t in targets:
            writes.add(t)


def _lvalue_parts(e: n.Expr) -> tuple[str, tuple[str, ...], set[VarRef]]:
    """Base name, member path, and reads performed by index expressions."""
    path: list[str] = []
    index_reads: set[VarRef] = set()
    cur = e
    while True:
        if isinstance(cur, n.Name):
            return cur.ident, tuple(reversed(path)), index_reads
        if isinstance(cur, n.Member):
            path.append(cur.name)
            cur = cur.obj
        elif isinstance(cur, n.Index):
            path.append("[]")
            index_reads |= set(_expr_reads(cur.key))
            cur = cur.obj
        else:
            raise ValueError(f"not an lvalue: {type(cur).__name__}")


def _base_of(e: n.Expr) -> str | None:
    while isinstance(e, (n.Member, n.Index)):
        e = e.obj
    if isinstance(e, n.Name):
        return e.ident
    return None


def _expr_reads(e: n.Expr) -> list[VarRef]:
    """VarRefs read by a call-free expression, field-sensitive."""
    out: list[VarRef] = []

    def visit(x: n.Expr, path: tuple[str, ...] = ()) -> None:
        if isinstance(x, n.Name):
            if x.ident == "this":
                out.append(VarRef("this"))
            elif x.ident not in ("msg", "block"):
                out.append(VarRef(x.ident, path))
            return
        if isinstance(x, n.Member):
            if isinstance(x.obj, n.Name) and x.obj.ident in ("msg", "block"):
                out.append(VarRef(f"{x.obj.ident}.{x.name}"))
                return
            visit(x.obj, (x.name,) + path)
            return
        if isinstance(x, n.Index):
            visit(x.obj, ("[]",) + path)
            visit(x.key)
            return
        if isinstance(x, n.Unary):
            visit(x.operand)
        elif isinstance(x, n.Binary):
            visit(x.left)
            visit(x.right)
        elif isinstance(x, n.Cast):
            visit(x.operand)
        elif isinstance(x, n.Call):
            # nested calls are rejected by the checker; read args defensively
            for a in x.args:
                visit(a)
            if isinstance(x.callee, n.Member):
                visit(x.callee.obj)
        # literals read nothing

    visit(e)
    return out


def _data_edges(pdg: Pdg, state_types, analysis) -> set[tuple[int, int, str]]:
    cfg = pdg.cfg
    # weak updates never kill: composites (a keyed write leaves other keys
    # alive) and interface handles (a call mutates state behind the handle
    # without rebinding it)
    weak = (n.MappingType, n.ArrayType, n.StructType, n.InterfaceType)
    weak_bases = {name for name, ty in state_types.items() if isinstance(ty, weak)}
    fscope = analysis.fn_scopes.get(pdg.fn_original.nid)
    if fscope is not None:
        for table in (fscope.params, fscope.locals):
            for name, ty in table.items():
                if isinstance(ty, weak):
                    weak_bases.add(name)

    def gen(nid: int) -> set[tuple[int, str]]:
        return {(nid, w.base) for w in pdg.nodes[nid].writes}

    def strong_writes(nid: int) -> set[str]:
        node = pdg.nodes[nid]
        out = {w.base for w in node.writes if w.base not in weak_bases}
        # a scalar write through a member or index path is still weak
        if node.stmt is not None and isinstance(node.stmt, n.Assign):
            base, path, _ = _lvalue_parts(node.stmt.target)
            if path:
                out.discard(base)
        return out

    ids = [ENTRY] + list(cfg.order) + [EXIT, REVERT]
    in_sets: dict[int, set[tuple[int, str]]] = {i: set() for i in ids}
    out_sets: dict[int, set[tuple[int, str]]] = {i: set() for i in ids}
    out_sets[ENTRY] = gen(ENTRY)

    changed = True
    while changed:
        changed = False
        for nid in cfg.order:
            new_in = set()
            for p in cfg.pred.get(nid, []):
                if p == REVERT:
                    continue
                new_in |= out_sets.get(p, set())
            kills = strong_writes(nid)
            new_out = gen(nid) | {
                (m, b) for (m, b) in new_in if b not in kills
            }
            if new_in != in_sets[nid] or new_out != out_sets[nid]:
                in_sets[nid] = new_in
                out_sets[nid] = new_out
                changed = True

    edges: set[tuple[int, int, str]] = set()
    for nid in cfg.order:
        node = pdg.nodes[nid]
        read_bases = {r.base for r in node.reads}
        for (m, b) in in_sets[nid]:
            if b in read_bases:
                edges.add((m, nid, b))
    return edges


# ---------------------------------------------------------------- dot export


def to_dot(pdg: Pdg) -> str:
    from ..frontend.printer import emit

    def label(nid: int) -> str:
        if nid == ENTRY:
            return "entry"
        if nid == EXIT:
            return "exit"
        node = pdg.nodes[nid]
        text = emit(node.stmt).splitlines()[0].strip()
        if len(text) > 40:
            text = text[:37] + "..."
        text = text.replace("\\", "\\\\").replace('"', '\\"')
        return f"{nid}: {text}"

    lines = [f'digraph "{pdg.contract}.{pdg.fn.name}" {{',
             '  node [shape=box fontname="monospace"];']
    for nid in [ENTRY] + pdg.order:
        lines.append(f'  n{nid} [label="{label(nid)}"];')
    for (c, d) in sorted(pdg.control_edges):
        lines.append(f"  n{c} -> n{d} [style=dashed color=blue];")
    for (m, u, base) in sorted(pdg.data_edges):
        lines.append(f'  n{m} -> n{u} [label="{base}" color=darkgreen];')
    lines.append("}")
    return "\n".join(lines) + "\n"
