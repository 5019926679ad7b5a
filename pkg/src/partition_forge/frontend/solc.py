"""Adapter for validating emitted units with an external Solidity compiler.

The built-in checker is the source of truth for the dialect; this
adapter exists so emitted code can additionally be pushed through a real
``solc`` binary when one is available. It shells out, parses the JSON
error stream, and maps compiler errors onto Diagnostic records. When no
binary is configured or found, ``solc_check`` reports cleanly that it
was skipped instead of failing.
"""

from __future__ import annotations

import json
import shutil
import subprocess
from dataclasses import dataclass, field

from .diagnostics import Diagnostic
from .nodes import Span


@dataclass
class SolcResult:
    ran: bool
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


class SolcAdapter:
    def __init__(self, binary: str | None = None, timeout: float = 30.0):
        self.binary = binary or shutil.which("solc")
        self.timeout = timeout

    def available(self) -> bool:
        return self.binary is not None

    def compile_source(self, source: str) -> SolcResult:
        if self.binary is None:
            return SolcResult(ran=False)
        request = {
            "language": "Solidity",
            "sources": {"unit.sol": {"content": source}},
            "settings": {"outputSelection": {"*": {"*": []}}},
        }
        try:
            proc = subprocess.run(
                [self.binary, "--standard-json"],
                input=json.dumps(request).encode(),
                capture_output=True,
                timeout=self.timeout,
            )
            payload = json.loads(proc.stdout.decode() or "{}")
        except (OSError, subprocess.TimeoutExpired, json.JSONDecodeError):
            return SolcResult(ran=False)
        diags = []
        for err in payload.get("errors", []):
            if err.get("severity") != "error":
                continue
            loc = err.get("sourceLocation") or {}
            offset = loc.get("start", 0) or 0
            line = source.count("\n", 0, offset) + 1
            col = offset - (source.rfind("\n", 0, offset) + 1) + 1
            diags.append(Diagnostic(
                code="SolcError",
                message=err.get("message", "unknown compiler error"),
                span=Span(line, col),
            ))
        return SolcResult(ran=True, diagnostics=diags)


def solc_check(source: str, binary: str | None = None) -> SolcResult:
    return SolcAdapter(binary).compile_source(source)
