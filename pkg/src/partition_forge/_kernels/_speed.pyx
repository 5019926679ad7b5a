# cython: language_level=3
"""Compiled evaluator. Instruction semantics mirror pure.py exactly;
the shared-table consistency test exercises both on random programs.
"""

from libc.stdint cimport int64_t, uint64_t

import numpy as np

BACKEND = "cython"

# opcode values duplicated from ops.py; _verify_table() checks the copy
cdef enum:
    _CONST = 0
    _MOV = 1
    _ADD = 2
    _SUB = 3
    _MUL = 4
    _DIV = 5
    _MOD = 6
    _LTU = 7
    _LEU = 8
    _EQ = 9
    _NE = 10
    _GTU = 11
    _GEU = 12
    _NOT = 13
    _BAND = 14
    _BOR = 15
    _ITE = 16
    _JMP = 17
    _JZ = 18
    _JNZ = 19
    _SELN = 20
    _STON = 21
    _CAST = 22
    _REVERT = 23
    _TRAP = 24
    _HALT = 25
    _ADDC = 26
    _SUBC = 27
    _MULC = 28
    _DIVC = 29
    _MODC = 30
    _OUT_NORMAL = 0
    _OUT_REVERT = 1
    _OUT_FUEL = 2
    _OUT_TRAP = 3
    _MAX_SCAN_VARS = 64




def _verify_table(table):
    """Raise if the opcode numbering here drifted from ops.py."""
    pairs = [
        ("CONST", _CONST), ("MOV", _MOV), ("ADD", _ADD), ("SUB", _SUB),
        ("MUL", _MUL), ("DIV", _DIV), ("MOD", _MOD), ("LTU", _LTU),
        ("LEU", _LEU), ("EQ", _EQ), ("NE", _NE), ("GTU", _GTU),
        ("GEU", _GEU), ("NOT", _NOT), ("BAND", _BAND), ("BOR", _BOR),
        ("ITE", _ITE), ("JMP", _JMP), ("JZ", _JZ), ("JNZ", _JNZ),
        ("SELN", _SELN), ("STON", _STON), ("CAST", _CAST),
        ("REVERT", _REVERT), ("TRAP", _TRAP), ("HALT", _HALT),
        ("ADDC", _ADDC), ("SUBC", _SUBC), ("MULC", _MULC),
        ("DIVC", _DIVC), ("MODC", _MODC),
    ]
    for name, value in pairs:
        if table[name] != value:
            raise RuntimeError(
                f"opcode table mismatch for {name}: "
                f"ops.py={table[name]} compiled={value}")


cdef int _run(const int64_t[:, ::1] code, int64_t* regs, long fuel) noexcept nogil:
    cdef long n = code.shape[0]
    cdef long pc = 0
    cdef int64_t op, a, b, c, d
    cdef uint64_t ua, ub, mask, v, key
    while fuel > 0:
        fuel -= 1
        if pc >= n:
            return _OUT_NORMAL
        op = code[pc, 0]
        a = code[pc, 1]
        b = code[pc, 2]
        c = code[pc, 3]
        d = code[pc, 4]
        pc += 1
        if op == _CONST:
            regs[a] = b
        elif op == _MOV:
            regs[a] = regs[b]
        elif op == _ADD:
            mask = ((<uint64_t>1) << d) - 1
            regs[a] = <int64_t>(((<uint64_t>regs[b]) + (<uint64_t>regs[c])) & mask)
        elif op == _SUB:
            mask = ((<uint64_t>1) << d) - 1
            regs[a] = <int64_t>(((<uint64_t>regs[b]) - (<uint64_t>regs[c])) & mask)
        elif op == _MUL:
            mask = ((<uint64_t>1) << d) - 1
            regs[a] = <int64_t>(((<uint64_t>regs[b]) * (<uint64_t>regs[c])) & mask)
        elif op == _DIV:
            ub = <uint64_t>regs[c]
            regs[a] = 0 if ub == 0 else <int64_t>((<uint64_t>regs[b]) / ub)
        elif op == _MOD:
            ub = <uint64_t>regs[c]
            regs[a] = 0 if ub == 0 else <int64_t>((<uint64_t>regs[b]) % ub)
        elif op == _LTU:
            regs[a] = 1 if (<uint64_t>regs[b]) < (<uint64_t>regs[c]) else 0
        elif op == _LEU:
            regs[a] = 1 if (<uint64_t>regs[b]) <= (<uint64_t>regs[c]) else 0
        elif op == _EQ:
            regs[a] = 1 if regs[b] == regs[c] else 0
        elif op == _NE:
            regs[a] = 1 if regs[b] != regs[c] else 0
        elif op == _GTU:
            regs[a] = 1 if (<uint64_t>regs[b]) > (<uint64_t>regs[c]) else 0
        elif op == _GEU:
            regs[a] = 1 if (<uint64_t>regs[b]) >= (<uint64_t>regs[c]) else 0
        elif op == _NOT:
            regs[a] = 0 if regs[b] != 0 else 1
        elif op == _BAND:
            regs[a] = 1 if (regs[b] != 0 and regs[c] != 0) else 0
        elif op == _BOR:
            regs[a] = 1 if (regs[b] != 0 or regs[c] != 0) else 0
        elif op == _ITE:
            regs[a] = regs[c] if regs[b] != 0 else regs[d]
        elif op == _JMP:
            pc = a
        elif op == _JZ:
            if regs[b] == 0:
                pc = a
        elif op == _JNZ:
            if regs[b] != 0:
                pc = a
        elif op == _SELN:
            key = <uint64_t>regs[b]
            if key >= <uint64_t>d:
                return _OUT_TRAP
            regs[a] = regs[c + <int64_t>key]
        elif op == _STON:
            key = <uint64_t>regs[b]
            if key >= <uint64_t>d:
                return _OUT_TRAP
            regs[c + <int64_t>key] = regs[a]
        elif op == _CAST:
            mask = ((<uint64_t>1) << d) - 1
            regs[a] = <int64_t>((<uint64_t>regs[b]) & mask)
        elif op == _REVERT:
            return _OUT_REVERT
        elif op == _TRAP:
            return _OUT_TRAP
        elif op == _HALT:
            return _OUT_NORMAL
        elif op == _ADDC:
            mask = ((<uint64_t>1) << d) - 1
            v = (<uint64_t>regs[b]) + (<uint64_t>regs[c])
            if v > mask:
                return _OUT_REVERT
            regs[a] = <int64_t>v
        elif op == _SUBC:
            if (<uint64_t>regs[c]) > (<uint64_t>regs[b]):
                return _OUT_REVERT
            regs[a] = <int64_t>((<uint64_t>regs[b]) - (<uint64_t>regs[c]))
        elif op == _MULC:
            mask = ((<uint64_t>1) << d) - 1
            ua = <uint64_t>regs[b]
            ub = <uint64_t>regs[c]
            v = ua * ub
            if ub != 0 and v / ub != ua:
                return _OUT_REVERT
            if v > mask:
                return _OUT_REVERT
            regs[a] = <int64_t>v
        elif op == _DIVC:
            ub = <uint64_t>regs[c]
            if ub == 0:
                return _OUT_REVERT
            regs[a] = <int64_t>((<uint64_t>regs[b]) / ub)
        elif op == _MODC:
            ub = <uint64_t>regs[c]
            if ub == 0:
                return _OUT_REVERT
            regs[a] = <int64_t>((<uint64_t>regs[b]) % ub)
        else:
            return _OUT_TRAP
    return _OUT_FUEL


def run(code, regs, long fuel):
    cdef const int64_t[:, ::1] cview = np.ascontiguousarray(code, dtype=np.int64)
    arr = np.asarray(regs, dtype=np.int64)
    cdef int64_t[::1] rview = arr
    cdef int outcome = _run(cview, &rview[0], fuel)
    if arr is not regs:
        # caller passed a list; copy results back
        for i in range(len(regs)):
            regs[i] = arr[i]
    return outcome


def scan_sat(code, long nregs, var_regs, var_cards, long out_reg,
             long fuel):
    cdef const int64_t[:, ::1] cview = np.ascontiguousarray(code, dtype=np.int64)
    cdef const int64_t[::1] vr = np.ascontiguousarray(var_regs, dtype=np.int64)
    cdef const int64_t[::1] vc = np.ascontiguousarray(var_cards, dtype=np.int64)
    cdef long k = vr.shape[0]
    if k > _MAX_SCAN_VARS:
        raise ValueError(f"too many variables to enumerate: {k}")
    regs_arr = np.zeros(nregs, dtype=np.int64)
    cdef int64_t[::1] regs = regs_arr
    cdef int64_t vals[_MAX_SCAN_VARS]
    cdef long i
    cdef int outcome
    for i in range(k):
        vals[i] = 0
    while True:
        for i in range(k):
            regs[vr[i]] = vals[i]
        outcome = _run(cview, &regs[0], fuel)
        if outcome == _OUT_FUEL:
            raise RuntimeError("formula evaluation ran out of fuel")
        if outcome == _OUT_NORMAL and regs[out_reg] != 0:
            return tuple(vals[i] for i in range(k))
        i = 0
        while i < k:
            vals[i] += 1
            if vals[i] < vc[i]:
                break
            vals[i] = 0
            i += 1
        if i == k:
            return None


def scan_pair(code_a, code_b, long nregs, var_regs, var_cards,
              cmp_regs, long fuel):
    cdef const int64_t[:, ::1] ca = np.ascontiguousarray(code_a, dtype=np.int64)
    cdef const int64_t[:, ::1] cb = np.ascontiguousarray(code_b, dtype=np.int64)
    cdef const int64_t[::1] vr = np.ascontiguousarray(var_regs, dtype=np.int64)
    cdef const int64_t[::1] vc = np.ascontiguousarray(var_cards, dtype=np.int64)
    cdef const int64_t[::1] cr = np.ascontiguousarray(cmp_regs, dtype=np.int64)
    cdef long k = vr.shape[0]
    if k > _MAX_SCAN_VARS:
        raise ValueError(f"too many variables to enumerate: {k}")
    ra_arr = np.zeros(nregs, dtype=np.int64)
    rb_arr = np.zeros(nregs, dtype=np.int64)
    cdef int64_t[::1] ra = ra_arr
    cdef int64_t[::1] rb = rb_arr
    cdef int64_t vals[_MAX_SCAN_VARS]
    cdef long i, j, ncmp = cr.shape[0]
    cdef int oa, ob
    cdef bint mismatch
    for i in range(k):
        vals[i] = 0
    while True:
        for i in range(k):
            ra[vr[i]] = vals[i]
            rb[vr[i]] = vals[i]
        oa = _run(ca, &ra[0], fuel)
        ob = _run(cb, &rb[0], fuel)
        if oa >= _OUT_FUEL or ob >= _OUT_FUEL:
            return (2, tuple(vals[i] for i in range(k)), oa, ob)
        if oa != ob:
            return (1, tuple(vals[i] for i in range(k)), oa, ob)
        if oa == _OUT_NORMAL:
            mismatch = False
            for j in range(ncmp):
                if ra[cr[j]] != rb[cr[j]]:
                    mismatch = True
                    break
            if mismatch:
                return (1, tuple(vals[i] for i in range(k)), oa, ob)
        i = 0
        while i < k:
            vals[i] += 1
            if vals[i] < vc[i]:
                break
            vals[i] = 0
            i += 1
        if i == k:
            return (0, None, 0, 0)


def levenshtein(bytes a, bytes b):
    cdef const unsigned char[::1] va = a
    cdef const unsigned char[::1] vb = b
    cdef long la = len(a), lb = len(b)
    if la < lb:
        va, vb = vb, va
        la, lb = lb, la
    if lb == 0:
        return la
    prev_arr = np.arange(lb + 1, dtype=np.int64)
    cur_arr = np.zeros(lb + 1, dtype=np.int64)
    cdef int64_t[::1] prev = prev_arr
    cdef int64_t[::1] cur = cur_arr
    cdef long i, j
    cdef int64_t cost, best
    for i in range(1, la + 1):
        cur[0] = i
        for j in range(1, lb + 1):
            cost = 0 if va[i - 1] == vb[j - 1] else 1
            best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            if prev[j - 1] + cost < best:
                best = prev[j - 1] + cost
            cur[j] = best
        prev, cur = cur, prev
    return prev[lb]
