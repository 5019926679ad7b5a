"""SMT-LIB 2 emission and response parsing.

Emission is deterministic: free symbols are always |bar-quoted|
(names contain '.', '[', '!'), declarations come out sorted by name,
and bitvector constants use the (_ bvN w) form. Division and
remainder are wrapped to the total semantics used everywhere else in
this package (x / 0 = 0, x % 0 = 0), overriding the SMT-LIB bvudiv
and bvurem conventions for zero divisors.

The response parser covers what solvers print for (check-sat) plus
(get-value ...): a verdict token, then an s-expression of term/value
pairs with values in (_ bvN w), #x.., #b.., true, or false form.
"""

from __future__ import annotations

from . import sym as s


class EmitError(Exception):
    pass


def quote(name: str) -> str:
    if "|" in name or "\\" in name:
        raise EmitError(f"symbol not representable: {name!r}")
    return f"|{name}|"


def sort_smt(sort: tuple) -> str:
    if sort == s.BOOL:
        return "Bool"
    if sort[0] == "bv":
        return f"(_ BitVec {sort[1]})"
    if sort[0] == "array":
        return f"(Array {sort_smt(sort[1])} {sort_smt(sort[2])})"
    raise EmitError(f"no SMT sort for {sort}")


_OPS = {
    "add": "bvadd",
    "sub": "bvsub",
    "mul": "bvmul",
    "ltu": "bvult",
    "leu": "bvule",
    "gtu": "bvugt",
    "geu": "bvuge",
    "eq": "=",
    "not": "not",
    "and": "and",
    "or": "or",
    "ite": "ite",
    "select": "select",
    "store": "store",
}


def _const_smt(c: s.Const) -> str:
    if c.sort == s.BOOL:
        return "true" if c.value else "false"
    return f"(_ bv{c.value} {s.bv_width(c.sort)})"


def term_smt(term: s.SymValue, memo: dict[int, str] | None = None) -> str:
    """Render one term. Iterative so shared or deep trees stay linear."""
    if memo is None:
        memo = {}
    stack = [term]
    while stack:
        t = stack.pop()
        if id(t) in memo:
            continue
        if isinstance(t, s.Const):
            memo[id(t)] = _const_smt(t)
            continue
        if isinstance(t, (s.Var, s.CallSym)):
            memo[id(t)] = quote(t.name)
            continue
        if not isinstance(t, s.App):
            raise EmitError(f"cannot render {t!r}")
        pending = [a for a in t.args if id(a) not in memo]
        if pending:
            stack.append(t)
            stack.extend(pending)
            continue
        args = [memo[id(a)] for a in t.args]
        memo[id(t)] = _app_smt(t, args)
    return memo[id(term)]


def _app_smt(t: s.App, args: list[str]) -> str:
    op = t.op
    if op in ("udiv", "urem"):
        w = s.bv_width(t.sort)
        zero = f"(_ bv0 {w})"
        fn = "bvudiv" if op == "udiv" else "bvurem"
        return (f"(ite (= {args[1]} {zero}) {zero} "
                f"({fn} {args[0]} {args[1]}))")
    if op == "zext":
        grow = s.bv_width(t.sort) - s.bv_width(t.args[0].sort)
        return f"((_ zero_extend {grow}) {args[0]})"
    if op == "trunc":
        return f"((_ extract {s.bv_width(t.sort) - 1} 0) {args[0]})"
    if op == "K":
        return f"((as const {sort_smt(t.sort)}) {args[0]})"
    name = _OPS.get(op)
    if name is None:
        raise EmitError(f"no SMT form for op {op}")
    return f"({name} {' '.join(args)})"


def declarations(terms) -> list[str]:
    """Sorted declare-const lines for every free symbol in terms."""
    leaves: dict[str, s.SymValue] = {}
    for t in terms:
        s.free_vars(t, leaves)
    return [
        f"(declare-const {quote(name)} {sort_smt(leaf.sort)})"
        for name, leaf in sorted(leaves.items())
    ]


def check_sat_script(formula: s.SymValue,
                     value_terms: list[str] | None = None) -> str:
    """Full single-query script: declare, assert, check, get values.

    value_terms are pre-rendered SMT terms whose model values the
    caller wants back, in order.
    """
    lines = ["(set-logic QF_ABV)", "(set-option :produce-models true)"]
    lines.extend(declarations([formula]))
    lines.append(f"(assert {term_smt(formula)})")
    lines.append("(check-sat)")
    if value_terms:
        lines.append(f"(get-value ({' '.join(value_terms)}))")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------- responses


def _tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            yield ch
            i += 1
        elif ch == "|":
            j = text.index("|", i + 1)
            yield text[i:j + 1]
            i = j + 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            yield text[i:j + 1]
            i = j + 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j]
            i = j


def _read_sexpr(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise ValueError("unexpected end of solver output")
    tok = tokens[pos]
    if tok == "(":
        out = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            node, pos = _read_sexpr(tokens, pos)
            out.append(node)
        return out, pos + 1
    if tok == ")":
        raise ValueError("unbalanced parenthesis in solver output")
    return tok, pos + 1


def value_int(node) -> int:
    """Numeric value of a model term: (_ bvN w), #x.., #b.., bools."""
    if isinstance(node, list):
        if len(node) == 3 and node[0] == "_" and node[1].startswith("bv"):
            return int(node[1][2:])
        raise ValueError(f"unrecognized model value {node!r}")
    if node.startswith("#x"):
        return int(node[2:], 16)
    if node.startswith("#b"):
        return int(node[2:], 2)
    if node == "true":
        return 1
    if node == "false":
        return 0
    if node.isdigit():
        return int(node)
    raise ValueError(f"unrecognized model value {node!r}")


def parse_response(text: str, expected: int) -> tuple[str, list[int] | None]:
    """(status, values) from a check-sat + get-value transcript.

    values line up positionally with the requested terms; None when
    the verdict is not sat or the model section is unusable.
    """
    tokens = list(_tokenize(text))
    pos = 0
    status = None
    while pos < len(tokens):
        node, pos = _read_sexpr(tokens, pos)
        if node in ("sat", "unsat", "unknown"):
            status = node
            break
        if isinstance(node, str):
            continue
        if node and node[0] == "error":
            return "unknown", None
    if status is None:
        return "unknown", None
    if status != "sat" or expected == 0:
        return status, None
    try:
        node, pos = _read_sexpr(tokens, pos)
    except ValueError:
        return status, None
    if not isinstance(node, list) or len(node) != expected:
        return status, None
    try:
        values = [value_int(pair[1]) for pair in node
                  if isinstance(pair, list) and len(pair) == 2]
    except ValueError:
        return status, None
    if len(values) != expected:
        return status, None
    return status, values
