"""End-to-end orchestration: locate, slice, generate, rank, verify.

One run handles one annotated contract. Per sensitive entry point the
pipeline renders the generation context, drives the backend through
the candidate loop, scores whatever survived, selects the Top-K, and
verifies those candidates against the original function (all secure
candidates instead when check_all is set). Every compiled candidate
is written under candidates/, the verified selection under selected/,
and the run report in both machine and human form at the output root.

Exit-code policy lives in exit_code_for: 0 for a clean run even when
some candidate fails verification, 4 when a sensitive function ended
up with no secure candidate at all. Input problems raise InputError
(exit 2) and backend outages raise BackendUnavailable (exit 3).
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .equiv import EquivResult, FiniteDomainSolver, SignatureMismatch, \
    check_equivalence
from .equiv.smtlib import EmitError, check_sat_script
from .frontend import ParseError, analyze, check, parse
from .frontend import nodes as n
from .frontend.printer import emit
from .graphs.pdg import build_pdgs
from .partition import (GenerationContext, GenerationResult,
                        generate_candidates, load_seed_examples,
                        make_backend)
from .ranking import DEFAULT_WEIGHTS, ScoreWeights, measure, rank_top_k, \
    score
from .report import (CandidateOutcome, FunctionRecord, RunReport,
                     compute_aggregate, render_human, render_machine)
from .slicing import compute_slice, normal_criterion
from .taint import AnnotationError, identify, load_annotations


class InputError(ValueError):
    """Contract or annotations cannot be used. Maps to exit code 2."""


@dataclass
class PipelineConfig:
    contract_path: str
    annotations_path: str
    top_k: int = 3
    max_candidates: int = 10
    max_fix_tries: int = 10
    loop_unroll: int = 5
    check_timeout_secs: float = 600.0
    backend: str = "mock"
    replay_dir: str | None = None
    record_dir: str | None = None
    weights: ScoreWeights = field(default_factory=lambda: DEFAULT_WEIGHTS)
    out_dir: str = "out"
    check_all: bool = False
    dump_smt: bool = False
    workers: int = 1
    strict_taint: bool = False

    def to_json_dict(self) -> dict:
        return {
            "contract": self.contract_path,
            "annotations": self.annotations_path,
            "top_k": self.top_k,
            "max_candidates": self.max_candidates,
            "max_fix_tries": self.max_fix_tries,
            "loop_unroll": self.loop_unroll,
            "check_timeout_secs": self.check_timeout_secs,
            "backend": self.backend,
            "weights": list(self.weights.as_tuple()),
            "check_all": self.check_all,
            "dump_smt": self.dump_smt,
            "workers": self.workers,
            "strict_taint": self.strict_taint,
        }


class _DumpingSolver:
    """Writes each query as an SMT-LIB script before delegating."""

    def __init__(self, inner, directory: Path):
        self.inner = inner
        self.directory = directory
        self.counter = 0
        self.name = getattr(inner, "name", type(inner).__name__)

    def check(self, formula):
        self.counter += 1
        try:
            script = check_sat_script(formula, [])
        except EmitError as exc:
            script = f"; could not emit query: {exc}\n"
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / f"query-{self.counter:03d}.smt2"
        path.write_text(script, encoding="utf-8")
        return self.inner.check(formula)


def run(cfg: PipelineConfig) -> RunReport:
    t_start = time.perf_counter()
    source, ann, unit = _load_inputs(cfg)
    analysis = analyze(unit)
    pdgs = build_pdgs(unit, analysis)
    try:
        sens = identify(ann, pdgs, strict=cfg.strict_taint)
    except AnnotationError as exc:
        raise InputError(str(exc)) from exc

    ann_text = Path(cfg.annotations_path).read_text(encoding="utf-8")
    backend = make_backend(
        cfg.backend, replay_dir=cfg.replay_dir, record_dir=cfg.record_dir,
        source=source, annotations_text=ann_text)

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    contract = next(c for c in unit.contracts if c.name == ann.contract)
    targets = []
    notes = []
    for fn in contract.functions:
        if not sens.is_sensitive(fn.name):
            continue
        if fn.visibility not in ("external", "public"):
            notes.append(f"{fn.name} is sensitive but {fn.visibility}; "
                         "only entry points are partitioned")
            continue
        targets.append(fn.name)

    seeds = load_seed_examples()

    def handle(fn_name: str) -> FunctionRecord:
        return _partition_function(
            cfg, out, backend, unit, ann, pdgs, sens, seeds, source,
            fn_name)

    if cfg.workers > 1 and len(targets) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(handle, targets))
    else:
        records = [handle(name) for name in targets]

    ground_truth = len(ann.ground_truth) if ann.ground_truth else None
    report = RunReport(
        contract=ann.contract,
        source_path=cfg.contract_path,
        config=cfg.to_json_dict(),
        seeds=sorted(sens.seeds),
        sensitive_functions=sorted(sens.sensitive_functions),
        functions=records,
        aggregate=compute_aggregate(records, ground_truth),
        notes=notes,
    )
    report.timings["total"] = time.perf_counter() - t_start

    (out / "report.json").write_bytes(render_machine(report))
    (out / "report.txt").write_text(render_human(report), encoding="utf-8")
    return report


def _load_inputs(cfg: PipelineConfig):
    try:
        source = Path(cfg.contract_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read contract: {exc}") from exc
    try:
        ann = load_annotations(cfg.annotations_path)
    except OSError as exc:
        raise InputError(f"cannot read annotations: {exc}") from exc
    except AnnotationError as exc:
        raise InputError(str(exc)) from exc
    try:
        unit = parse(source)
    except ParseError as exc:
        raise InputError(f"contract does not parse: {exc}") from exc
    diags = check(unit)
    if diags:
        raise InputError("contract does not type-check: "
                         + "; ".join(str(d) for d in diags))
    return source, ann, unit


def _stmt_line(stmt: n.Stmt) -> str:
    text = emit(stmt).splitlines()[0]
    return text.rstrip(" {")


def _partition_function(cfg, out: Path, backend, unit, ann, pdgs, sens,
                        seeds, source: str, fn_name: str) -> FunctionRecord:
    t0 = time.perf_counter()
    pdg = pdgs.by_contract[ann.contract][fn_name]
    delta = sens.delta(fn_name)
    ordered_delta = [nid for nid in pdg.order if nid in delta]

    priv_slice = compute_slice(pdg, delta, "privileged")
    norm_slice = compute_slice(pdg, normal_criterion(pdg, delta), "normal")
    ctx = GenerationContext(
        func_code=emit(pdg.fn),
        privilege_stmts=tuple(_stmt_line(pdg.nodes[nid].stmt)
                              for nid in ordered_delta),
        slice_normal=norm_slice.rendered,
        slice_priv=priv_slice.rendered,
        seed_examples=seeds,
    )

    record = FunctionRecord(
        name=fn_name,
        delta_size=len(delta),
        delta_nodes=ordered_delta,
        slice_privileged=priv_slice.rendered,
        slice_normal=norm_slice.rendered,
    )

    t_gen = time.perf_counter()
    result: GenerationResult = generate_candidates(
        ctx, backend, unit, ann, fn_name,
        max_candidates=cfg.max_candidates,
        max_fix_tries=cfg.max_fix_tries)
    record.generation = {
        "rounds": result.stats.rounds,
        "prompts_sent": result.stats.prompts_sent,
        "fix_calls": result.stats.fix_calls,
        "duplicates": result.stats.duplicates,
        "rejected": [{"round": r, "reason": why}
                     for r, why in result.stats.rejected],
    }
    record.timings["generate"] = time.perf_counter() - t_gen

    cand_dir = out / "candidates" / fn_name
    cand_dir.mkdir(parents=True, exist_ok=True)
    outcomes: dict[int, CandidateOutcome] = {}
    for cand in result.candidates:
        rel = f"candidates/{fn_name}/cand-{cand.ident}.sol"
        (out / rel).write_text(cand.source, encoding="utf-8")
        outcomes[cand.ident] = CandidateOutcome(
            ident=cand.ident, round=cand.round, fix_count=cand.fix_count,
            security=cand.security, security_reason=cand.security_reason,
            has_callback=cand.has_callback, source_file=rel)
        record.candidates.append(outcomes[cand.ident])

    t_rank = time.perf_counter()
    secure = [c for c in result.candidates if c.security == "secure"]
    records = []
    for cand in secure:
        try:
            rec = measure(cand.source, source, ann, fn_name, cand.ident)
        except (ValueError, AnnotationError) as exc:
            record.notes.append(f"cand-{cand.ident} not scored: {exc}")
            continue
        records.append(rec)
        oc = outcomes[cand.ident]
        oc.x_edit = rec.x_edit
        oc.y_priv_ratio = rec.y_priv_ratio
        oc.y_density = rec.y_density
        oc.score = score(rec, cfg.weights)
    top = rank_top_k(records, cfg.top_k, cfg.weights)
    record.top_k = [r.candidate for r in top]
    for rank, rec in enumerate(top):
        outcomes[rec.candidate].rank = rank
    record.timings["rank"] = time.perf_counter() - t_rank

    by_ident = {c.ident: c for c in result.candidates}
    to_check = [by_ident[r.candidate] for r in top]
    if cfg.check_all:
        checked_ids = {c.ident for c in to_check}
        to_check += [c for c in secure if c.ident not in checked_ids]

    t_verify = time.perf_counter()
    for cand in to_check:
        solver = FiniteDomainSolver()
        if cfg.dump_smt:
            solver = _DumpingSolver(
                solver, out / "smt" / fn_name / f"cand-{cand.ident}")
        eq = _check_candidate(unit, ann.contract, fn_name, cand.source,
                              solver, cfg)
        outcomes[cand.ident].equivalence = _equiv_json(eq)
    record.timings["verify"] = time.perf_counter() - t_verify

    sel_dir = out / "selected" / fn_name
    for rank, rec in enumerate(top):
        cand = by_ident[rec.candidate]
        sel_dir.mkdir(parents=True, exist_ok=True)
        path = sel_dir / f"rank-{rank}-cand-{cand.ident}.sol"
        path.write_text(cand.source, encoding="utf-8")

    record.timings["total"] = time.perf_counter() - t0
    return record


def _check_candidate(unit, contract: str, fn_name: str, cand_source: str,
                     solver, cfg: PipelineConfig) -> EquivResult:
    try:
        cand_unit = parse(cand_source)
    except ParseError as exc:  # engine guarantees this parses
        return EquivResult(verdict="unknown",
                           reason=f"candidate does not parse: {exc}")
    try:
        return check_equivalence(
            unit, contract, fn_name, cand_unit, contract, fn_name,
            solver=solver, loop_unroll=cfg.loop_unroll,
            time_budget=cfg.check_timeout_secs)
    except SignatureMismatch as exc:
        return EquivResult(verdict="unknown", reason=str(exc))


def _equiv_json(eq: EquivResult) -> dict:
    return {
        "verdict": eq.verdict,
        "reason": eq.reason,
        "witness": _json_witness(eq.witness),
        "solver": eq.solver,
        "queries": eq.queries,
        "paths": [eq.paths_a, eq.paths_b],
        "elapsed": round(eq.elapsed, 6),
    }


def _json_witness(w: dict | None):
    if w is None:
        return None
    out = {}
    for key, val in sorted(w.items(), key=lambda kv: str(kv[0])):
        if isinstance(val, dict):
            out[str(key)] = {str(k): v for k, v in
                             sorted(val.items(), key=lambda kv: str(kv[0]))}
        else:
            out[str(key)] = val
    return out


def exit_code_for(report: RunReport) -> int:
    for fn in report.functions:
        if fn.secure_count == 0:
            return 4
    return 0
