"""Control-flow and program-dependence graph construction."""

from .cfg import (
    ENTRY,
    EXIT,
    REVERT,
    Cfg,
    build_cfg,
    control_dependence,
    expand_function,
    max_node_id,
    postdominators,
)
from .pdg import Pdg, PdgNode, PdgSet, VarRef, build_pdg, build_pdgs, \
    is_dependent, to_dot

__all__ = [
    "ENTRY", "EXIT", "REVERT", "Cfg", "build_cfg", "control_dependence",
    "expand_function", "max_node_id", "postdominators",
    "Pdg", "PdgNode", "PdgSet", "VarRef", "build_pdg", "build_pdgs",
    "is_dependent", "to_dot",
]
