"""Bytecode evaluation and edit-distance kernels.

The compiled extension is preferred when it imported cleanly and its
opcode numbering matches ops.py; otherwise the pure-Python evaluator
takes over. Setting PARTITION_FORGE_PURE=1 forces the fallback, which
the benchmark and the consistency tests use to compare both.
"""

import os

from . import ops
from . import pure as _pure

if os.environ.get("PARTITION_FORGE_PURE") == "1":
    _impl = _pure
else:
    try:
        from . import _speed as _impl  # type: ignore[no-redef]
        _impl._verify_table({name: code for code, name in ops.OP_NAMES.items()})
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
run = _impl.run
scan_sat = _impl.scan_sat
scan_pair = _impl.scan_pair
levenshtein = _impl.levenshtein

__all__ = ["ops", "BACKEND", "run", "scan_sat", "scan_pair", "levenshtein"]
