"""Text-generation backends the partition engine drives.

Every backend maps one prompt string to one completion string. The
engine never sees transport details, so tests can swap a scripted
or replaying stand-in for the live HTTP client. Replay files are
keyed by the sha256 of the prompt, which also makes recorded runs
byte-reproducible.
"""

from __future__ import annotations

import hashlib
import os
import re
from pathlib import Path
from typing import Protocol


class BackendUnavailable(RuntimeError):
    """The backend cannot produce a completion for this prompt."""


class GeneratorBackend(Protocol):
    name: str

    def complete(self, prompt: str) -> str: ...


def prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class HttpBackend:
    """Chat-completions client over a single-turn user message."""

    name = "http"

    def __init__(self, url: str | None = None, model: str | None = None,
                 api_key_env: str = "PARTITION_FORGE_API_KEY",
                 timeout: float = 120.0):
        self.url = url or os.environ.get(
            "PARTITION_FORGE_API_URL",
            "http://localhost:8000/v1/chat/completions")
        self.model = model or os.environ.get(
            "PARTITION_FORGE_MODEL", "gpt-4")
        self.api_key_env = api_key_env
        self.timeout = timeout

    def complete(self, prompt: str) -> str:
        import httpx

        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        try:
            resp = httpx.post(self.url, json=payload, headers=headers,
                              timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise BackendUnavailable(f"http backend failed: {exc}") from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendUnavailable(
                f"http backend returned malformed response: {exc}") from exc


class ReplayBackend:
    """Serves completions recorded earlier, keyed by prompt hash."""

    name = "replay"

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def complete(self, prompt: str) -> str:
        path = self.directory / f"{prompt_key(prompt)}.txt"
        try:
            return path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise BackendUnavailable(
                f"no recorded completion for prompt "
                f"{prompt_key(prompt)[:12]}... in {self.directory}")


class RecordingBackend:
    """Wraps a live backend and saves every exchange for replay."""

    name = "recording"

    def __init__(self, inner: GeneratorBackend, directory: str | Path):
        self.inner = inner
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def complete(self, prompt: str) -> str:
        text = self.inner.complete(prompt)
        path = self.directory / f"{prompt_key(prompt)}.txt"
        path.write_text(text, encoding="utf-8")
        return text


class ScriptedBackend:
    """Returns canned responses in order; remembers prompts it saw."""

    name = "scripted"

    def __init__(self, responses: list[str]):
        self.responses = list(responses)
        self.prompts: list[str] = []

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        if not self.responses:
            raise BackendUnavailable("scripted backend ran out of responses")
        return self.responses.pop(0)


_FN_IN_PROMPT = re.compile(
    r"\[function code to be partitioned\]:\s*function\s+(\w+)\s*\(")
_FN_IN_FIX = re.compile(r"\[incorrect code\][\s\S]*?function\s+(\w+)\s*\(")


class MockBackend:
    """Deterministic offline stand-in: answers partition prompts by
    running the rule-based splitter on the original source.

    The mock reads which function the prompt asks about, recomputes
    sensitivity on the pristine source it was constructed with, and
    emits the mechanical split. Fix prompts return the same split,
    which parses by construction.
    """

    name = "mock"

    def __init__(self, source: str, annotations_text: str):
        from ..frontend import analyze, parse
        from ..graphs.pdg import build_pdgs
        from ..taint import identify, parse_annotations
        from .mechanical import partition_for

        self._unit = parse(source)
        self._analysis = analyze(self._unit)
        self._pdgs = build_pdgs(self._unit, self._analysis)
        ann = parse_annotations(annotations_text, "mock")
        self._report = identify(ann, self._pdgs)
        self._contract = ann.contract
        self._partition_for = partition_for
        self._cache: dict[str, str] = {}

    def complete(self, prompt: str) -> str:
        m = _FN_IN_PROMPT.search(prompt) or _FN_IN_FIX.search(prompt)
        if not m:
            raise BackendUnavailable(
                "mock backend could not find a function name in the prompt")
        fn = m.group(1)
        if fn.endswith("_priv") or fn.endswith("_callback"):
            fn = fn.rsplit("_", 1)[0]
        if fn not in self._cache:
            try:
                self._cache[fn] = self._partition_for(
                    self._unit, self._contract, fn, self._pdgs,
                    self._report)
            except (KeyError, StopIteration, ValueError) as exc:
                raise BackendUnavailable(
                    f"mock backend cannot partition {fn}: {exc}") from exc
        return self._cache[fn]


def make_backend(kind: str, *, replay_dir: str | Path | None = None,
                 record_dir: str | Path | None = None,
                 source: str | None = None,
                 annotations_text: str | None = None) -> GeneratorBackend:
    """Build the backend the CLI asked for."""
    if kind == "http":
        backend: GeneratorBackend = HttpBackend()
        if record_dir is not None:
            backend = RecordingBackend(backend, record_dir)
        return backend
    if kind == "replay":
        if replay_dir is None:
            raise ValueError("replay backend needs a recordings directory")
        return ReplayBackend(replay_dir)
    if kind == "mock":
        if source is None or annotations_text is None:
            raise ValueError("mock backend needs source and annotations")
        return MockBackend(source, annotations_text)
    raise ValueError(f"unknown backend kind: {kind!r}")
