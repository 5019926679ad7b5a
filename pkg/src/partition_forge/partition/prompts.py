"""Prompt rendering for partition generation and grammar fixing.

Templates are fixed byte-for-byte (golden-file tested): the generator
sees the same words every run, including their original spellings
("critera", "priviledged"), so recorded completions replay exactly.
The bad-partition block defaults to the literal null marker and is
filled in only on repair rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class SeedExample:
    original: str
    partitioned: str


@dataclass(frozen=True)
class BadPartition:
    code: str
    explanation: str


@dataclass(frozen=True)
class GenerationContext:
    func_code: str
    privilege_stmts: tuple[str, ...]
    slice_normal: str
    slice_priv: str
    seed_examples: tuple[SeedExample, ...]
    bad_partition: BadPartition | None = None


_HEADER = """\
Suppose you are an expert developer for Solidity smart contracts. \
There is a code transformation task of smart contract function \
([function code to be partitioned]) where two program slices, i.e., \
the normal and privileged slices ([normal slice] and [priviledged \
slice]), have been given.
In our slicing, slicing critera are a sequence of program statements \
that are labelled privileged ([privileged statements]).
Your job is to transform the original contract function to a new \
variant encompassing these two program slices. The new function \
variant MUST be functionally equivalent with the original one."""

_STEPS = """\
Please STRICTLY follow the below actions step by step:
1. MUST identify all the privilege statements including conditional \
checks shared between the two program slices.
2. MUST base on the provided privileged and normal slice for creating \
new sub functions. Privileged slice-based sub function in the form of \
"XXX_priv" contains all the identified privileged statements. If \
priviledged functions need to yield return value, there must be a \
normal callback function in the form of "XXX_callback" to process the \
return value. If there are normal statements to execute after the \
priviledged sub function, there must be a normal callback function in \
the form of "XXX_callback" to process the normal statements.
3. NOTE if modifier statements contain privileged statements, then \
modifier statements MUST be included in the privileged sub function.
4. TRY to reduce those normal, i.e., non-privileged, statements in \
privileged sub functions as many as possible.
5. All the resulting code MUST satisfy the grammar of Solidity \
programming language."""

_FOOTER = """\
You MUST output all the result in plain text format.
Only output the transformed contract code, and avoid unnecessary \
text description."""

_RULE = "---"


def render_generation_prompt(ctx: GenerationContext) -> str:
    if not ctx.privilege_stmts:
        raise ValueError("nothing to partition: no privileged statements")
    parts = []
    for i, seed in enumerate(ctx.seed_examples, start=1):
        parts.append(f"Example {i} original contract:")
        parts.append(seed.original.rstrip("\n"))
        parts.append(f"Example {i} partitioned contract:")
        parts.append(seed.partitioned.rstrip("\n"))
        parts.append(_RULE)
    parts.append(_HEADER)
    parts.append(_RULE)
    parts.append("[function code to be partitioned]: "
                 + ctx.func_code.rstrip("\n"))
    parts.append("[privileged statements]:\n"
                 + "\n".join(ctx.privilege_stmts))
    parts.append("[normal slice]: " + ctx.slice_normal.rstrip("\n"))
    parts.append("[priviledged slice]: " + ctx.slice_priv.rstrip("\n"))
    parts.append(_RULE)
    if ctx.bad_partition is None:
        parts.append("Bad partition output: // default is null")
    else:
        parts.append("Bad partition output:")
        parts.append("[one unsecure partition]: "
                     + ctx.bad_partition.code.rstrip("\n"))
        parts.append("[explanation]: " + ctx.bad_partition.explanation)
    parts.append(_RULE)
    parts.append(_STEPS)
    parts.append(_RULE)
    parts.append(_FOOTER)
    return "\n".join(parts) + "\n"


def render_fix_prompt(code: str, diagnostics: list) -> str:
    if not diagnostics:
        raise ValueError("no diagnostics to fix")
    msgs = "\n".join(str(d) for d in diagnostics)
    parts = [
        "You are an expert Solidity developer. Your task is to fix "
        "grammar errors ([compiler error message]) in the given "
        "Solidity smart contract code ([incorrect code]) while "
        "ensuring the logic and functionality remain intact.",
        _RULE,
        "[incorrect code]: " + code.rstrip("\n"),
        "[compiler error message]:\n" + msgs,
        _RULE,
        "All the resulting code MUST satisfy the grammar of Solidity "
        "programming language.",
        "MUST Output only the Fixed Code: Provide the corrected "
        "Solidity code in proper format, and Avoid unnecessary text "
        "description.",
    ]
    return "\n".join(parts) + "\n"


def load_seed_examples() -> tuple[SeedExample, ...]:
    """The two bundled hand-written partition exemplars."""
    root = resources.files(__package__) / "seeds"
    out = []
    for stem in ("tally", "escrow"):
        original = (root / f"{stem}_original.sol").read_text()
        partitioned = (root / f"{stem}_partitioned.sol").read_text()
        out.append(SeedExample(original=original, partitioned=partitioned))
    return tuple(out)
