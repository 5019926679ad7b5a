"""Timing comparison between the compiled kernels and the fallback.

Workloads mirror what the pipeline actually does with the kernels:
exhaustive model scans over compiled difference formulas (the finite-
domain solver's inner loop) and edit distances between contract-sized
sources (the ranker's x_edit). Both implementations run the same
inputs; results report the speedup of the compiled extension, or note
that only the fallback is available.
"""

from __future__ import annotations

import time
from statistics import median

from ._kernels import ops, pure
from .equiv import Domain, compile_formula
from .equiv import sym as s


def _implementations():
    impls = [("pure", pure)]
    try:
        from ._kernels import _speed
        _speed._verify_table(
            {name: code for code, name in ops.OP_NAMES.items()})
        impls.append(("cython", _speed))
    except ImportError:
        pass
    return impls


def _scan_formula(width: int, n_vars: int):
    """Unsatisfiable formula over n_vars variables: an unsigned sum
    can never be below zero, so the scan must visit the whole cube
    without ever reporting a model."""
    xs = [s.Var(f"x{i}", s.BV(width)) for i in range(n_vars)]
    total = xs[0]
    for x in xs[1:]:
        total = s.mk_add(total, x)
    return s.mk_cmp("ltu", total, s.bv(0, width))


def _time(fn, repeat: int) -> float:
    best = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best.append(time.perf_counter() - t0)
    return median(best)


def run_benchmarks(repeat: int = 5, scale: float = 1.0):
    impls = _implementations()
    if len(impls) == 1:
        yield "compiled extension not available; timing fallback only"
    dom = Domain(width=4, n_addr=2)

    n_vars = max(2, int(4 * scale))
    formula = _scan_formula(4, n_vars)
    prog, lay = compile_formula(formula, dom)
    yield (f"scan_sat: exhaustive scan of {n_vars} four-bit variables "
           f"({1 << (4 * n_vars)} valuations)")
    times = {}
    for name, impl in impls:
        t = _time(lambda: impl.scan_sat(
            prog.code, prog.n_regs, lay.var_regs, lay.var_cards,
            lay.ret_regs[0], prog.fuel_per_run), repeat)
        times[name] = t
        yield f"  {name:7s} {t * 1e3:9.2f} ms"
    if len(times) == 2:
        yield f"  speedup {times['pure'] / times['cython']:.1f}x"

    base = ("function bid(uint64 value) external { "
            "uint64 existing = bids[msg.sender]; "
            "if (existing > 0) { bids[msg.sender] = existing + value; } "
            "else { counter++; bids[msg.sender] = value; } } ")
    a = (base * max(1, int(8 * scale))).encode()
    b = a.replace(b"existing", b"current")
    yield f"levenshtein: {len(a)} x {len(b)} bytes"
    times = {}
    for name, impl in impls:
        t = _time(lambda: impl.levenshtein(a, b), repeat)
        times[name] = t
        yield f"  {name:7s} {t * 1e3:9.2f} ms"
    if len(times) == 2:
        yield f"  speedup {times['pure'] / times['cython']:.1f}x"
