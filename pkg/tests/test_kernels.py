import random

import numpy as np
import pytest

from partition_forge import _kernels as k
from partition_forge._kernels import ops as o
from partition_forge._kernels import pure

try:
    from partition_forge._kernels import _speed
except ImportError:  # pragma: no cover - extension not built
    _speed = None

IMPLS = [pure] + ([_speed] if _speed is not None else [])


def _arr(rows):
    return np.asarray(rows, dtype=np.int64)


def _regs(n):
    return np.zeros(n, dtype=np.int64)


def _run(impl, rows, regs, fuel=10_000):
    r = np.asarray(regs, dtype=np.int64)
    out = impl.run(_arr(rows), r, fuel)
    return out, list(int(x) for x in r)


def _ref_levenshtein(a: bytes, b: bytes) -> int:
    # quadratic DP, written independently of the kernel
    m, n = len(a), len(b)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        d[i][0] = i
    for j in range(n + 1):
        d[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            sub = d[i - 1][j - 1] + (a[i - 1] != b[j - 1])
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, sub)
    return d[m][n]


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.BACKEND)
class TestEvaluator:
    def test_wrapping_add(self, impl):
        rows = [
            (o.CONST, 0, 15, 0, 0),
            (o.CONST, 1, 3, 0, 0),
            (o.ADD, 2, 0, 1, 4),
            (o.HALT, 0, 0, 0, 0),
        ]
        out, regs = _run(impl, rows, _regs(3))
        assert out == o.OUTCOME_NORMAL
        assert regs[2] == 2  # (15 + 3) mod 16

    def test_checked_add_reverts_on_overflow(self, impl):
        rows = [
            (o.CONST, 0, 15, 0, 0),
            (o.CONST, 1, 3, 0, 0),
            (o.ADDC, 2, 0, 1, 4),
            (o.HALT, 0, 0, 0, 0),
        ]
        out, _ = _run(impl, rows, _regs(3))
        assert out == o.OUTCOME_REVERT

    def test_division_by_zero_conventions(self, impl):
        rows = [
            (o.CONST, 0, 9, 0, 0),
            (o.CONST, 1, 0, 0, 0),
            (o.DIV, 2, 0, 1, 0),
            (o.MOD, 3, 0, 1, 0),
            (o.HALT, 0, 0, 0, 0),
        ]
        out, regs = _run(impl, rows, _regs(4))
        assert out == o.OUTCOME_NORMAL
        assert regs[2] == 0 and regs[3] == 0
        out, _ = _run(impl, [(o.CONST, 0, 9, 0, 0), (o.CONST, 1, 0, 0, 0),
                             (o.DIVC, 2, 0, 1, 0), (o.HALT, 0, 0, 0, 0)],
                      _regs(3))
        assert out == o.OUTCOME_REVERT

    def test_branching(self, impl):
        # regs[1] = 7 if regs[0] != 0 else 9
        rows = [
            (o.JZ, 3, 0, 0, 0),
            (o.CONST, 1, 7, 0, 0),
            (o.JMP, 4, 0, 0, 0),
            (o.CONST, 1, 9, 0, 0),
            (o.HALT, 0, 0, 0, 0),
        ]
        out, regs = _run(impl, rows, [1, 0])
        assert (out, regs[1]) == (o.OUTCOME_NORMAL, 7)
        out, regs = _run(impl, rows, [0, 0])
        assert (out, regs[1]) == (o.OUTCOME_NORMAL, 9)

    def test_select_store_trap_out_of_range(self, impl):
        rows = [(o.SELN, 0, 1, 2, 3), (o.HALT, 0, 0, 0, 0)]
        out, regs = _run(impl, rows, [0, 1, 10, 11, 12])
        assert (out, regs[0]) == (o.OUTCOME_NORMAL, 11)
        out, _ = _run(impl, rows, [0, 3, 10, 11, 12])
        assert out == o.OUTCOME_TRAP
        rows = [(o.STON, 0, 1, 2, 3), (o.HALT, 0, 0, 0, 0)]
        out, regs = _run(impl, rows, [42, 2, 0, 0, 0])
        assert (out, regs[4]) == (o.OUTCOME_NORMAL, 42)
        out, _ = _run(impl, rows, [42, 5, 0, 0, 0])
        assert out == o.OUTCOME_TRAP

    def test_fuel_exhaustion(self, impl):
        rows = [(o.JMP, 0, 0, 0, 0)]
        out = impl.run(_arr(rows), _regs(1), 100)
        assert out == o.OUTCOME_FUEL

    def test_falling_off_end_is_normal(self, impl):
        rows = [(o.CONST, 0, 5, 0, 0)]
        out, regs = _run(impl, rows, _regs(1))
        assert (out, regs[0]) == (o.OUTCOME_NORMAL, 5)


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.BACKEND)
class TestScans:
    def _parity_program(self):
        # sat iff x + y == 5 over 3-bit vars; x in r0, y in r1
        return _arr([
            (o.ADD, 2, 0, 1, 3),
            (o.CONST, 3, 5, 0, 0),
            (o.EQ, 4, 2, 3, 0),
            (o.HALT, 0, 0, 0, 0),
        ])

    def test_scan_sat_finds_witness(self, impl):
        code = self._parity_program()
        got = impl.scan_sat(code, 5, _arr([0, 1]), _arr([8, 8]), 4, 10_000)
        assert got is not None
        x, y = (int(v) for v in got)
        assert (x + y) % 8 == 5

    def test_scan_sat_exhausts_to_none(self, impl):
        # x < 0 is never true for unsigned x
        code = _arr([
            (o.CONST, 1, 0, 0, 0),
            (o.LTU, 2, 0, 1, 0),
            (o.HALT, 0, 0, 0, 0),
        ])
        got = impl.scan_sat(code, 3, _arr([0]), _arr([16]), 2, 10_000)
        assert got is None

    def test_scan_sat_reverted_runs_do_not_satisfy(self, impl):
        # always "true" but every run reverts
        code = _arr([
            (o.CONST, 1, 1, 0, 0),
            (o.REVERT, 0, 0, 0, 0),
        ])
        got = impl.scan_sat(code, 2, _arr([0]), _arr([4]), 1, 10_000)
        assert got is None

    def test_scan_pair_agreement(self, impl):
        # x + x versus 2 * x at width 4
        a = _arr([(o.ADD, 1, 0, 0, 4), (o.HALT, 0, 0, 0, 0)])
        b = _arr([(o.CONST, 2, 2, 0, 0), (o.MUL, 1, 0, 2, 4),
                  (o.HALT, 0, 0, 0, 0)])
        status, vals, oa, ob = impl.scan_pair(
            a, b, 3, _arr([0]), _arr([16]), _arr([1]), 10_000)
        assert status == 0 and vals is None

    def test_scan_pair_reports_first_disagreement(self, impl):
        # x + 1 versus x - 1 diverge everywhere; first valuation is 0
        a = _arr([(o.CONST, 2, 1, 0, 0), (o.ADD, 1, 0, 2, 4),
                  (o.HALT, 0, 0, 0, 0)])
        b = _arr([(o.CONST, 2, 1, 0, 0), (o.SUB, 1, 0, 2, 4),
                  (o.HALT, 0, 0, 0, 0)])
        status, vals, oa, ob = impl.scan_pair(
            a, b, 3, _arr([0]), _arr([16]), _arr([1]), 10_000)
        assert status == 1
        assert tuple(int(v) for v in vals) == (0,)
        assert oa == ob == o.OUTCOME_NORMAL

    def test_scan_pair_outcome_mismatch(self, impl):
        # one side reverts when x == 3
        a = _arr([(o.HALT, 0, 0, 0, 0)])
        b = _arr([(o.CONST, 1, 3, 0, 0), (o.EQ, 2, 0, 1, 0),
                  (o.JZ, 4, 2, 0, 0), (o.REVERT, 0, 0, 0, 0),
                  (o.HALT, 0, 0, 0, 0)])
        status, vals, oa, ob = impl.scan_pair(
            a, b, 3, _arr([0]), _arr([8]), _arr([]), 10_000)
        assert status == 1
        assert tuple(int(v) for v in vals) == (3,)
        assert {oa, ob} == {o.OUTCOME_NORMAL, o.OUTCOME_REVERT}

    def test_scan_pair_reverts_compare_equal(self, impl):
        # both revert with different register contents: still equal
        a = _arr([(o.CONST, 1, 1, 0, 0), (o.REVERT, 0, 0, 0, 0)])
        b = _arr([(o.CONST, 1, 2, 0, 0), (o.REVERT, 0, 0, 0, 0)])
        status, vals, _, _ = impl.scan_pair(
            a, b, 2, _arr([0]), _arr([4]), _arr([1]), 10_000)
        assert status == 0 and vals is None

    def test_scan_pair_fuel_is_inconclusive(self, impl):
        a = _arr([(o.JMP, 0, 0, 0, 0)])
        b = _arr([(o.HALT, 0, 0, 0, 0)])
        status, vals, oa, ob = impl.scan_pair(
            a, b, 2, _arr([0]), _arr([4]), _arr([]), 50)
        assert status == 2
        assert oa == o.OUTCOME_FUEL

    def test_scan_rejects_too_many_vars(self, impl):
        nvars = o.MAX_SCAN_VARS + 1
        code = _arr([(o.HALT, 0, 0, 0, 0)])
        with pytest.raises(ValueError):
            impl.scan_sat(code, nvars + 1, _arr(range(nvars)),
                          _arr([2] * nvars), 0, 100)


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.BACKEND)
def test_levenshtein_against_reference(impl):
    rng = random.Random(7)
    cases = [(b"", b""), (b"", b"abc"), (b"kitten", b"sitting"),
             (b"flaw", b"lawn"), (b"abc", b"abc")]
    for _ in range(60):
        na, nb = rng.randrange(0, 24), rng.randrange(0, 24)
        a = bytes(rng.randrange(97, 103) for _ in range(na))
        b = bytes(rng.randrange(97, 103) for _ in range(nb))
        cases.append((a, b))
    for a, b in cases:
        assert impl.levenshtein(a, b) == _ref_levenshtein(a, b)


@pytest.mark.skipif(_speed is None, reason="compiled extension not built")
def test_backends_agree_on_random_programs():
    """Random straight-line programs produce identical outcomes and
    registers under both evaluators."""
    rng = random.Random(2024)
    binops = [o.ADD, o.SUB, o.MUL, o.DIV, o.MOD, o.LTU, o.LEU, o.EQ,
              o.NE, o.GTU, o.GEU, o.BAND, o.BOR, o.ADDC, o.SUBC,
              o.MULC, o.DIVC, o.MODC]
    for _ in range(300):
        nregs = 6
        rows = []
        for _ in range(rng.randrange(1, 12)):
            kind = rng.random()
            if kind < 0.25:
                rows.append((o.CONST, rng.randrange(nregs),
                             rng.randrange(16), 0, 0))
            elif kind < 0.35:
                rows.append((o.MOV, rng.randrange(nregs),
                             rng.randrange(nregs), 0, 0))
            else:
                rows.append((rng.choice(binops), rng.randrange(nregs),
                             rng.randrange(nregs), rng.randrange(nregs), 4))
        rows.append((o.HALT, 0, 0, 0, 0))
        start = [rng.randrange(16) for _ in range(nregs)]

        ra = np.asarray(start, dtype=np.int64)
        rb = np.asarray(start, dtype=np.int64)
        oa = pure.run(_arr(rows), ra, 1000)
        ob = _speed.run(_arr(rows), rb, 1000)
        assert oa == ob, o.disassemble(rows)
        if oa == o.OUTCOME_NORMAL:
            assert list(ra) == list(rb), o.disassemble(rows)


@pytest.mark.skipif(_speed is None, reason="compiled extension not built")
def test_verify_table_rejects_mismatch():
    good = {name: code for code, name in o.OP_NAMES.items()}
    _speed._verify_table(dict(good))
    bad = dict(good)
    bad["ADD"], bad["SUB"] = bad["SUB"], bad["ADD"]
    with pytest.raises(RuntimeError):
        _speed._verify_table(bad)


def test_package_selects_a_backend():
    assert k.BACKEND in ("pure", "cython")
    assert k.levenshtein(b"abc", b"axc") == 1
