"""Reference evaluator in plain Python.

Semantics must match `_speed.pyx` instruction for instruction; the
shared-table consistency test runs random programs through both.
"""

from __future__ import annotations

from . import ops as o

BACKEND = "pure"


def run(code, regs, fuel: int) -> int:
    """Execute until a stop op; returns the outcome code.

    `code` is any sequence of 5-int rows, `regs` a mutable int sequence.
    """
    prog = [(int(r[0]), int(r[1]), int(r[2]), int(r[3]), int(r[4]))
            for r in code]
    n = len(prog)
    pc = 0
    while fuel > 0:
        fuel -= 1
        if pc >= n:
            return o.OUTCOME_NORMAL
        op, a, b, c, d = prog[pc]
        pc += 1
        if op == o.CONST:
            regs[a] = b
        elif op == o.MOV:
            regs[a] = regs[b]
        elif op == o.ADD:
            regs[a] = (regs[b] + regs[c]) & ((1 << d) - 1)
        elif op == o.SUB:
            regs[a] = (regs[b] - regs[c]) & ((1 << d) - 1)
        elif op == o.MUL:
            regs[a] = (regs[b] * regs[c]) & ((1 << d) - 1)
        elif op == o.DIV:
            regs[a] = regs[b] // regs[c] if regs[c] != 0 else 0
        elif op == o.MOD:
            regs[a] = regs[b] % regs[c] if regs[c] != 0 else 0
        elif op == o.LTU:
            regs[a] = 1 if regs[b] < regs[c] else 0
        elif op == o.LEU:
            regs[a] = 1 if regs[b] <= regs[c] else 0
        elif op == o.EQ:
            regs[a] = 1 if regs[b] == regs[c] else 0
        elif op == o.NE:
            regs[a] = 1 if regs[b] != regs[c] else 0
        elif op == o.GTU:
            regs[a] = 1 if regs[b] > regs[c] else 0
        elif op == o.GEU:
            regs[a] = 1 if regs[b] >= regs[c] else 0
        elif op == o.NOT:
            regs[a] = 0 if regs[b] != 0 else 1
        elif op == o.BAND:
            regs[a] = 1 if (regs[b] != 0 and regs[c] != 0) else 0
        elif op == o.BOR:
            regs[a] = 1 if (regs[b] != 0 or regs[c] != 0) else 0
        elif op == o.ITE:
            regs[a] = regs[c] if regs[b] != 0 else regs[d]
        elif op == o.JMP:
            pc = a
        elif op == o.JZ:
            if regs[b] == 0:
                pc = a
        elif op == o.JNZ:
            if regs[b] != 0:
                pc = a
        elif op == o.SELN:
            key = regs[b]
            if key >= d:
                return o.OUTCOME_TRAP
            regs[a] = regs[c + key]
        elif op == o.STON:
            key = regs[b]
            if key >= d:
                return o.OUTCOME_TRAP
            regs[c + key] = regs[a]
        elif op == o.CAST:
            regs[a] = regs[b] & ((1 << d) - 1)
        elif op == o.REVERT:
            return o.OUTCOME_REVERT
        elif op == o.TRAP:
            return o.OUTCOME_TRAP
        elif op == o.HALT:
            return o.OUTCOME_NORMAL
        elif op == o.ADDC:
            v = regs[b] + regs[c]
            if v > ((1 << d) - 1):
                return o.OUTCOME_REVERT
            regs[a] = v
        elif op == o.SUBC:
            if regs[c] > regs[b]:
                return o.OUTCOME_REVERT
            regs[a] = regs[b] - regs[c]
        elif op == o.MULC:
            v = regs[b] * regs[c]
            if v > ((1 << d) - 1):
                return o.OUTCOME_REVERT
            regs[a] = v
        elif op == o.DIVC:
            if regs[c] == 0:
                return o.OUTCOME_REVERT
            regs[a] = regs[b] // regs[c]
        elif op == o.MODC:
            if regs[c] == 0:
                return o.OUTCOME_REVERT
            regs[a] = regs[b] % regs[c]
        else:
            return o.OUTCOME_TRAP
    return o.OUTCOME_FUEL


def scan_sat(code, nregs: int, var_regs, var_cards, out_reg: int,
             fuel: int):
    """Enumerate assignments; return the first making out_reg nonzero.

    Returns a value tuple aligned with var_regs, or None. Runs that
    revert or trap do not satisfy. Raises on fuel exhaustion.
    """
    k = len(var_regs)
    if k > o.MAX_SCAN_VARS:
        raise ValueError(f"too many variables to enumerate: {k}")
    regs = [0] * nregs
    vals = [0] * k
    while True:
        for i in range(k):
            regs[var_regs[i]] = vals[i]
        outcome = run(code, regs, fuel)
        if outcome == o.OUTCOME_FUEL:
            raise RuntimeError("formula evaluation ran out of fuel")
        if outcome == o.OUTCOME_NORMAL and regs[out_reg] != 0:
            return tuple(vals)
        i = 0
        while i < k:
            vals[i] += 1
            if vals[i] < var_cards[i]:
                break
            vals[i] = 0
            i += 1
        if i == k:
            return None


def scan_pair(code_a, code_b, nregs: int, var_regs, var_cards,
              cmp_regs, fuel: int):
    """Run two programs over every valuation and compare behavior.

    Equal means: same outcome, and when both end normally the compared
    registers match pairwise. Reverted runs compare equal regardless
    of registers (state rolls back). Returns
    (status, vals, outcome_a, outcome_b) with status 0 when every
    valuation agreed (vals None), 1 on the first disagreement, 2 when
    either side hit the fuel limit or trapped.
    """
    k = len(var_regs)
    if k > o.MAX_SCAN_VARS:
        raise ValueError(f"too many variables to enumerate: {k}")
    regs_a = [0] * nregs
    regs_b = [0] * nregs
    vals = [0] * k
    while True:
        for i in range(k):
            regs_a[var_regs[i]] = vals[i]
            regs_b[var_regs[i]] = vals[i]
        oa = run(code_a, regs_a, fuel)
        ob = run(code_b, regs_b, fuel)
        if oa >= o.OUTCOME_FUEL or ob >= o.OUTCOME_FUEL:
            return (2, tuple(vals), oa, ob)
        if oa != ob:
            return (1, tuple(vals), oa, ob)
        if oa == o.OUTCOME_NORMAL:
            for r in cmp_regs:
                if regs_a[r] != regs_b[r]:
                    return (1, tuple(vals), oa, ob)
        i = 0
        while i < k:
            vals[i] += 1
            if vals[i] < var_cards[i]:
                break
            vals[i] = 0
            i += 1
        if i == k:
            return (0, None, 0, 0)


def levenshtein(a: bytes, b: bytes) -> int:
    """Classic edit distance between two byte strings."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[-1]
