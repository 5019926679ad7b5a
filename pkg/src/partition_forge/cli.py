"""Command line interface.

`partition-forge run` drives the whole pipeline on one annotated
contract. Exit codes: 0 success, 2 unusable input, 3 backend outage,
4 no secure candidate for some sensitive function (the report is
still written in that case). `partition-forge bench` compares the
compiled kernels against the pure-Python fallback.
"""

from __future__ import annotations

import sys

import click

from .partition.backends import BackendUnavailable
from .pipeline import InputError, PipelineConfig, exit_code_for, run
from .ranking import DEFAULT_WEIGHTS, ScoreWeights

EXIT_INPUT = 2
EXIT_BACKEND = 3
EXIT_NO_SECURE = 4


@click.group()
def main():
    """Privilege separation for annotated contracts."""


def _parse_weights(_ctx, _param, value: str | None) -> ScoreWeights:
    if value is None:
        return DEFAULT_WEIGHTS
    parts = value.split(",")
    if len(parts) != 3:
        raise click.BadParameter("expected three comma-separated numbers")
    try:
        a, b, c = (float(p) for p in parts)
        return ScoreWeights(a, b, c)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


@main.command("run")
@click.option("--contract", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Contract source file.")
@click.option("--annotations", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Annotation file naming the sensitive state variables.")
@click.option("--top-k", default=3, show_default=True,
              help="How many ranked candidates to keep and verify.")
@click.option("--max-candidates", default=10, show_default=True,
              help="Generation rounds per function.")
@click.option("--max-fix-tries", default=10, show_default=True,
              help="Total backend calls per candidate, generation "
                   "included.")
@click.option("--loop-unroll", default=5, show_default=True,
              help="Loop unrolling bound for equivalence checking.")
@click.option("--timeout", "timeout_secs", default=600.0,
              show_default=True,
              help="Equivalence budget per candidate, in seconds.")
@click.option("--backend", default="mock", show_default=True,
              type=click.Choice(["http", "replay", "mock"]),
              help="Where completions come from.")
@click.option("--weights", callback=_parse_weights, default=None,
              help="Ranking weights a,b,c summing to 1 "
                   "[default: 0.594,0.192,0.214].")
@click.option("--out", "out_dir", default="out", show_default=True,
              type=click.Path(file_okay=False),
              help="Output directory.")
@click.option("--check-all", is_flag=True,
              help="Verify every secure candidate, not only the Top-K.")
@click.option("--dump-smt", is_flag=True,
              help="Write each solver query as an SMT-LIB script.")
@click.option("--replay-dir", type=click.Path(file_okay=False),
              help="Recorded completions for --backend replay.")
@click.option("--record-dir", type=click.Path(file_okay=False),
              help="Record HTTP completions here for later replay.")
@click.option("--workers", default=1, show_default=True,
              help="Functions partitioned in parallel.")
@click.option("--strict-taint", is_flag=True,
              help="Single-sweep sensitivity propagation.")
def run_cmd(contract, annotations, top_k, max_candidates, max_fix_tries,
            loop_unroll, timeout_secs, backend, weights, out_dir,
            check_all, dump_smt, replay_dir, record_dir, workers,
            strict_taint):
    """Partition one contract and verify the selected candidates."""
    if backend == "replay" and not replay_dir:
        raise click.UsageError("--backend replay needs --replay-dir")
    cfg = PipelineConfig(
        contract_path=contract,
        annotations_path=annotations,
        top_k=top_k,
        max_candidates=max_candidates,
        max_fix_tries=max_fix_tries,
        loop_unroll=loop_unroll,
        check_timeout_secs=timeout_secs,
        backend=backend,
        replay_dir=replay_dir,
        record_dir=record_dir,
        weights=weights,
        out_dir=out_dir,
        check_all=check_all,
        dump_smt=dump_smt,
        workers=workers,
        strict_taint=strict_taint,
    )
    try:
        report = run(cfg)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except BackendUnavailable as exc:
        click.echo(f"error: backend unavailable: {exc}", err=True)
        sys.exit(EXIT_BACKEND)

    click.echo((out_dir and f"report written to {out_dir}/report.json")
               or "done")
    code = exit_code_for(report)
    if code:
        bad = [f.name for f in report.functions if f.secure_count == 0]
        click.echo(f"no secure candidate for: {', '.join(bad)}", err=True)
    sys.exit(code)


@main.command("bench")
@click.option("--repeat", default=5, show_default=True,
              help="Timing repetitions per kernel.")
@click.option("--scale", default=1.0, show_default=True,
              help="Work multiplier for larger runs.")
def bench_cmd(repeat, scale):
    """Compare compiled kernels against the pure-Python fallback."""
    from .bench import run_benchmarks

    for line in run_benchmarks(repeat=repeat, scale=scale):
        click.echo(line)


if __name__ == "__main__":
    main()
