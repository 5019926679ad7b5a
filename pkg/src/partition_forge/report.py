"""Run reports: one machine-readable document per pipeline run.

The machine format is versioned JSON (`report-v1`) with sorted keys,
so byte-identical inputs give byte-identical bytes. Wall-clock
numbers live under keys named "timings" or "elapsed"; rendering with
include_timings=False strips those recursively, which is what the
replay-determinism guarantee is stated over.

The human format is a small fixed-width table: per-function rows and
one aggregate row with the TP / FP / Hit / precision / success-rate
counters. TP counts candidates verified equivalent, FP candidates
refuted; unknown verdicts join neither side and precision is taken
over TP + FP only. success_rate is reported only when the annotation
file supplied a ground-truth function list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA = "report-v1"


@dataclass
class CandidateOutcome:
    ident: int
    round: int
    fix_count: int
    security: str
    security_reason: str | None
    has_callback: bool
    source_file: str | None = None
    score: float | None = None
    x_edit: float | None = None
    y_priv_ratio: float | None = None
    y_density: float | None = None
    rank: int | None = None
    equivalence: dict[str, Any] | None = None

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "id": self.ident,
            "round": self.round,
            "fix_count": self.fix_count,
            "security": self.security,
            "security_reason": self.security_reason,
            "has_callback": self.has_callback,
            "source_file": self.source_file,
            "score": _round(self.score),
            "x_edit": _round(self.x_edit),
            "y_priv_ratio": _round(self.y_priv_ratio),
            "y_density": _round(self.y_density),
            "rank": self.rank,
            "equivalence": self.equivalence,
        }


@dataclass
class FunctionRecord:
    name: str
    delta_size: int
    delta_nodes: list[int]
    slice_privileged: str
    slice_normal: str
    candidates: list[CandidateOutcome] = field(default_factory=list)
    generation: dict[str, Any] = field(default_factory=dict)
    top_k: list[int] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def secure_count(self) -> int:
        return sum(1 for c in self.candidates if c.security == "secure")

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "function": self.name,
            "delta_size": self.delta_size,
            "delta_nodes": self.delta_nodes,
            "slice_privileged": self.slice_privileged,
            "slice_normal": self.slice_normal,
            "candidates": [c.to_json_dict() for c in self.candidates],
            "secure_count": self.secure_count,
            "generation": self.generation,
            "top_k": self.top_k,
            "notes": self.notes,
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
        }


@dataclass
class Aggregate:
    sensitive_functions: int = 0
    partitions: int = 0
    tp: int = 0
    fp: int = 0
    unknown: int = 0
    hit: int = 0
    ground_truth: int | None = None

    @property
    def precision(self) -> float | None:
        checked = self.tp + self.fp
        return self.tp / checked if checked else None

    @property
    def success_rate(self) -> float | None:
        if not self.ground_truth:
            return None
        return self.hit / self.ground_truth

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "sensitive_functions": self.sensitive_functions,
            "partitions": self.partitions,
            "tp": self.tp,
            "fp": self.fp,
            "unknown": self.unknown,
            "hit": self.hit,
            "ground_truth": self.ground_truth,
            "precision": _round(self.precision),
            "success_rate": _round(self.success_rate),
        }


@dataclass
class RunReport:
    contract: str
    source_path: str
    config: dict[str, Any]
    seeds: list[str]
    sensitive_functions: list[str]
    functions: list[FunctionRecord] = field(default_factory=list)
    aggregate: Aggregate = field(default_factory=Aggregate)
    timings: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "contract": self.contract,
            "source_path": self.source_path,
            "config": self.config,
            "seeds": self.seeds,
            "sensitive_functions": self.sensitive_functions,
            "functions": [f.to_json_dict() for f in self.functions],
            "aggregate": self.aggregate.to_json_dict(),
            "notes": self.notes,
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
        }


def _round(v: float | None) -> float | None:
    return None if v is None else round(v, 6)


_TIMING_KEYS = frozenset({"timings", "elapsed"})


def strip_timings(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: strip_timings(v) for k, v in obj.items()
                if k not in _TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timings(v) for v in obj]
    return obj


def compute_aggregate(functions: list[FunctionRecord],
                      ground_truth: int | None) -> Aggregate:
    agg = Aggregate(ground_truth=ground_truth)
    agg.sensitive_functions = len(functions)
    for fn in functions:
        agg.partitions += len(fn.candidates)
        fn_hit = False
        for cand in fn.candidates:
            eq = cand.equivalence
            if eq is None:
                continue
            verdict = eq.get("verdict")
            if verdict == "equivalent":
                agg.tp += 1
                fn_hit = True
            elif verdict == "not_equivalent":
                agg.fp += 1
            else:
                agg.unknown += 1
        if fn_hit:
            agg.hit += 1
    return agg


def render_machine(report: RunReport, include_timings: bool = True) -> bytes:
    doc = report.to_json_dict()
    if not include_timings:
        doc = strip_timings(doc)
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


_COLUMNS = ("#Sensitive Func", "#Partitions", "TP", "FP", "#Hit",
            "Precision", "Success rate")


def render_human(report: RunReport) -> str:
    lines = []
    lines.append(f"contract {report.contract} ({report.source_path})")
    lines.append(f"seeds: {', '.join(report.seeds) or '(none)'}")
    lines.append("")
    for fn in report.functions:
        sel = ", ".join(f"cand-{i}" for i in fn.top_k) or "(none)"
        lines.append(f"function {fn.name}: delta={fn.delta_size} "
                     f"candidates={len(fn.candidates)} "
                     f"secure={fn.secure_count} top-k=[{sel}]")
        for cand in fn.candidates:
            eq = cand.equivalence
            verdict = eq["verdict"] if eq else "unchecked"
            rank = f" rank={cand.rank}" if cand.rank is not None else ""
            score = f" score={cand.score:.4f}" if cand.score is not None \
                else ""
            lines.append(f"  cand-{cand.ident}: {cand.security}"
                         f"{score}{rank} equivalence={verdict}")
        for note in fn.notes:
            lines.append(f"  note: {note}")
    lines.append("")
    agg = report.aggregate
    prec = f"{agg.precision:.2f}" if agg.precision is not None else "-"
    rate = f"{agg.success_rate:.2f}" if agg.success_rate is not None else "-"
    values = (str(agg.sensitive_functions), str(agg.partitions),
              str(agg.tp), str(agg.fp), str(agg.hit), prec, rate)
    widths = [max(len(c), len(v)) for c, v in zip(_COLUMNS, values)]
    lines.append(" | ".join(c.ljust(w) for c, w in zip(_COLUMNS, widths)))
    lines.append("-+-".join("-" * w for w in widths))
    lines.append(" | ".join(v.ljust(w) for v, w in zip(values, widths)))
    lines.append("")
    return "\n".join(lines)


def report_render(report: RunReport, format: str = "machine",
                  include_timings: bool = True) -> bytes:
    if format == "machine":
        return render_machine(report, include_timings)
    if format == "human":
        return render_human(report).encode("utf-8")
    raise ValueError(f"unknown report format: {format!r}")
