"""Rule-based partitioning at slice boundaries.

Splits one function into the privileged/callback shape without any
text generation: the longest all-normal suffix of top-level
statements becomes `<fn>_callback`, everything before it (modifiers
already expanded in) becomes `<fn>_priv`, and the entry shrinks to
the two calls. Values the suffix needs from earlier statements travel
as privileged returns; `msg.sender` uses inside the privileged part
are rewritten to an explicit `user` parameter so the only data
flowing into the privileged function is what the caller already had.

The output is source text, meant to be re-parsed and validated like
any generated candidate. Functions that return values keep their
whole body privileged (the entry just forwards), trading codebase
ratio for simplicity.
"""

from __future__ import annotations

import copy
from dataclasses import fields, is_dataclass

from ..frontend import nodes as n
from ..frontend.printer import emit
from ..graphs.pdg import Pdg

_SPAN = n.Span(0, 0)


def _subtree_nids(stmt: n.Stmt) -> set[int]:
    return {s.nid for s in n.walk_stmts([stmt])}


def _names_read(stmts: list[n.Stmt]) -> set[str]:
    out: set[str] = set()
    for node in n.walk_stmts(stmts):
        for sub in n.walk(node):
            if isinstance(sub, n.Name):
                out.add(sub.ident)
    return out


def _uses_msg_sender(stmts: list[n.Stmt]) -> bool:
    for node in n.walk_stmts(stmts):
        for sub in n.walk(node):
            if (isinstance(sub, n.Member) and sub.name == "sender"
                    and isinstance(sub.obj, n.Name)
                    and sub.obj.ident == "msg"):
                return True
    return False


def _all_idents(fn: n.FunctionDef) -> set[str]:
    names = {p.name for p in fn.params}
    for node in n.walk_stmts(fn.body):
        for sub in n.walk(node):
            if isinstance(sub, n.Name):
                names.add(sub.ident)
            elif isinstance(sub, n.VarDecl):
                names.add(sub.name)
            elif isinstance(sub, n.TupleDecl):
                names.update(name for _, name in sub.vars)
    return names


def _swap_msg_sender(node, replacement: str) -> None:
    """Rewrite msg.sender reads to a plain name, in place."""
    if not is_dataclass(node) or isinstance(node, n.TypeName):
        return
    for f in fields(node):
        if f.name == "member_order":
            continue
        val = getattr(node, f.name)
        if isinstance(val, list):
            for i, item in enumerate(val):
                if _is_msg_sender(item):
                    val[i] = n.Name(nid=0, span=_SPAN, ident=replacement)
                elif is_dataclass(item):
                    _swap_msg_sender(item, replacement)
        elif _is_msg_sender(val):
            setattr(node, f.name,
                    n.Name(nid=0, span=_SPAN, ident=replacement))
        elif is_dataclass(val):
            _swap_msg_sender(val, replacement)


def _is_msg_sender(v) -> bool:
    return (isinstance(v, n.Member) and v.name == "sender"
            and isinstance(v.obj, n.Name) and v.obj.ident == "msg")


def _top_level_locals(stmts: list[n.Stmt]) -> list[tuple[n.TypeName, str]]:
    out = []
    for st in stmts:
        if isinstance(st, n.VarDecl):
            out.append((st.ty, st.name))
        elif isinstance(st, n.TupleDecl):
            out.extend(st.vars)
    return out


def mechanical_partition(unit: n.SourceUnit, contract_name: str,
                         pdg: Pdg, delta: frozenset[int]) -> str:
    """Source text of the unit with pdg's function split at the slice
    boundary. delta holds privileged statement nids in pdg's numbering.
    """
    if not delta:
        raise ValueError("nothing to partition: empty privileged set")
    contract = next(c for c in unit.contracts if c.name == contract_name)
    fn = pdg.fn  # modifier-expanded
    original = next(f for f in contract.functions if f.name == fn.name)

    body = [copy.deepcopy(st) for st in fn.body]
    split = len(fn.body)
    if not original.returns:
        while split > 0 and not (_subtree_nids(fn.body[split - 1]) & delta):
            split -= 1
    priv_stmts = body[:split]
    suffix = body[split:]

    taken = _all_idents(fn)
    user = "user"
    while user in taken:
        user += "_"

    priv_params: list[n.Param] = []
    if _uses_msg_sender(priv_stmts):
        priv_params.append(n.Param(ty=n.ADDRESS, name=user))
        for st in priv_stmts:
            _swap_msg_sender(st, user)
    priv_reads = _names_read(fn.body[:split])
    for p in fn.params:
        if p.name in priv_reads:
            priv_params.append(n.Param(ty=p.ty, name=p.name))

    suffix_reads = _names_read(fn.body[split:])
    exports = [(ty, name) for ty, name in _top_level_locals(fn.body[:split])
               if name in suffix_reads]

    priv_returns = list(original.returns) if original.returns else [
        ty for ty, _ in exports]
    priv_body = priv_stmts
    if exports:
        priv_body = priv_stmts + [n.Return(
            nid=0, span=_SPAN,
            values=[n.Name(nid=0, span=_SPAN, ident=name)
                    for _, name in exports])]
    priv_fn = n.FunctionDef(
        nid=0, span=_SPAN, name=f"{fn.name}_priv",
        params=priv_params, returns=priv_returns,
        visibility="internal", modifiers=[], body=priv_body)

    callback_fn = None
    if suffix:
        cb_params = [n.Param(ty=ty, name=name) for ty, name in exports]
        cb_params += [n.Param(ty=p.ty, name=p.name) for p in fn.params
                      if p.name in suffix_reads]
        callback_fn = n.FunctionDef(
            nid=0, span=_SPAN, name=f"{fn.name}_callback",
            params=cb_params, returns=[],
            visibility="internal", modifiers=[], body=suffix)

    entry_body = _entry_body(fn, original, priv_fn, callback_fn, exports,
                             user)
    entry = n.FunctionDef(
        nid=0, span=_SPAN, name=fn.name,
        params=[n.Param(ty=p.ty, name=p.name) for p in original.params],
        returns=list(original.returns),
        visibility=original.visibility, modifiers=[], body=entry_body)

    return _reassemble(unit, contract, original, entry, priv_fn,
                       callback_fn)


def _entry_body(fn, original, priv_fn, callback_fn, exports,
                user: str) -> list[n.Stmt]:
    def priv_call() -> n.Call:
        args: list[n.Expr] = []
        for p in priv_fn.params:
            if p.name == user:
                args.append(n.Member(
                    nid=0, span=_SPAN,
                    obj=n.Name(nid=0, span=_SPAN, ident="msg"),
                    name="sender"))
            else:
                args.append(n.Name(nid=0, span=_SPAN, ident=p.name))
        return n.Call(nid=0, span=_SPAN,
                      callee=n.Name(nid=0, span=_SPAN,
                                    ident=priv_fn.name),
                      args=args)

    body: list[n.Stmt] = []
    if original.returns:
        body.append(n.Return(nid=0, span=_SPAN, values=[priv_call()]))
        return body
    if not exports:
        body.append(n.ExprStmt(nid=0, span=_SPAN, expr=priv_call()))
    elif len(exports) == 1:
        ty, name = exports[0]
        body.append(n.VarDecl(nid=0, span=_SPAN, ty=ty, name=name,
                              init=priv_call()))
    else:
        body.append(n.TupleDecl(nid=0, span=_SPAN,
                                vars=list(exports), init=priv_call()))
    if callback_fn is not None:
        args = [n.Name(nid=0, span=_SPAN, ident=p.name)
                for p in callback_fn.params]
        body.append(n.ExprStmt(
            nid=0, span=_SPAN,
            expr=n.Call(nid=0, span=_SPAN,
                        callee=n.Name(nid=0, span=_SPAN,
                                      ident=callback_fn.name),
                        args=args)))
    return body


def _reassemble(unit, contract, original, entry, priv_fn,
                callback_fn) -> str:
    new_fns = []
    for f in contract.functions:
        if f is original:
            new_fns.append(entry)
            new_fns.append(priv_fn)
            if callback_fn is not None:
                new_fns.append(callback_fn)
        else:
            new_fns.append(f)
    order = []
    for m in (contract.member_order or []):
        if m is original:
            order.append(entry)
            order.append(priv_fn)
            if callback_fn is not None:
                order.append(callback_fn)
        else:
            order.append(m)
    new_contract = n.ContractDef(
        nid=contract.nid, span=contract.span, name=contract.name,
        state_vars=list(contract.state_vars),
        structs=list(contract.structs),
        modifiers=list(contract.modifiers),
        functions=new_fns, member_order=order)
    new_unit = n.SourceUnit(
        nid=unit.nid, span=unit.span,
        interfaces=list(unit.interfaces),
        contracts=[new_contract if c is contract else c
                   for c in unit.contracts])
    return emit(new_unit)


def partition_for(unit: n.SourceUnit, contract_name: str, fn_name: str,
                  pdgs, report) -> str:
    """Convenience wrapper keyed by names: split fn_name using the
    privileged nodes the sensitivity report assigns to it."""
    pdg = pdgs.by_contract[contract_name][fn_name]
    return mechanical_partition(unit, contract_name, pdg,
                                report.delta(fn_name))
