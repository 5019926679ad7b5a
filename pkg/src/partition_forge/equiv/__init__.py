"""Equivalence checking: symbolic execution, solvers, brute force."""

from .brute import (BruteResult, DomainTooLarge, brute_force_equivalence,
                    resolve_function, state_signature)
from .bytecode import (CompileError, Domain, UnsupportedForFiniteDomain,
                       compile_formula, compile_function)
from .checker import EquivResult, SignatureMismatch, check_equivalence
from .interp import ConcreteOutcome, MissingCallResult, run_concrete
from .solvers import FiniteDomainSolver, ProcessSolver, SatResult
from .symexec import (CallRecord, ExecConfig, PathSummary, SymExecError,
                      Timeout, UnsupportedConstruct, sym_exec)

__all__ = [
    "BruteResult",
    "CallRecord",
    "CompileError",
    "ConcreteOutcome",
    "Domain",
    "DomainTooLarge",
    "EquivResult",
    "ExecConfig",
    "FiniteDomainSolver",
    "MissingCallResult",
    "PathSummary",
    "ProcessSolver",
    "SatResult",
    "SignatureMismatch",
    "SymExecError",
    "Timeout",
    "UnsupportedConstruct",
    "UnsupportedForFiniteDomain",
    "brute_force_equivalence",
    "check_equivalence",
    "compile_formula",
    "compile_function",
    "resolve_function",
    "run_concrete",
    "state_signature",
    "sym_exec",
]
