"""Partition generation: prompts, backends, candidate loop."""

from .backends import (BackendUnavailable, GeneratorBackend, HttpBackend,
                       MockBackend, RecordingBackend, ReplayBackend,
                       ScriptedBackend, make_backend, prompt_key)
from .engine import (GenerationResult, GenerationStats, PartitionCandidate,
                     SecurityVerdict, check_shape, extract_code,
                     generate_candidates, normalize_candidate,
                     validate_security)
from .mechanical import mechanical_partition, partition_for
from .prompts import (BadPartition, GenerationContext, SeedExample,
                      load_seed_examples, render_fix_prompt,
                      render_generation_prompt)

__all__ = [
    "BackendUnavailable",
    "BadPartition",
    "GenerationContext",
    "GenerationResult",
    "GenerationStats",
    "GeneratorBackend",
    "HttpBackend",
    "MockBackend",
    "PartitionCandidate",
    "RecordingBackend",
    "ReplayBackend",
    "ScriptedBackend",
    "SecurityVerdict",
    "SeedExample",
    "check_shape",
    "extract_code",
    "generate_candidates",
    "load_seed_examples",
    "make_backend",
    "mechanical_partition",
    "normalize_candidate",
    "partition_for",
    "prompt_key",
    "render_fix_prompt",
    "render_generation_prompt",
    "validate_security",
]
