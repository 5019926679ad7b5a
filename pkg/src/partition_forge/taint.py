"""Sensitive-function and privileged-statement identification.

Seeds are developer-annotated sensitive state variables. A forward pass
marks a node as a sink when any variable it reads or writes depends on
a seed (a pure overwrite of a seed counts: write access is privileged,
and the report's notes record that choice). A backward pass marks a
node as a source when it writes a variable that flows into something a
sink reads. Privileged nodes are sinks plus sources; a function is
sensitive when it has any.

Dependence is value flow between variable bases inside one function's
PDG, reflexive and transitive. Composite types widen by construction:
taint on one mapping key or struct member taints the base, because
dependence is computed at base granularity.

Two propagation modes:

  - default: iterate to fixpoint. Data-typed state variables that
    receive seed-derived flow become seeds themselves (storage outlives
    the call, so a laundered copy is as sensitive as the original);
    interface handles never do. New sources' own reads extend the
    backward demand until stable. Demand crosses functions only
    through state variables, since equal local names in different
    functions are different variables.
  - strict: one forward sweep and one backward sweep, demand matched
    by bare name in every PDG. Mirrors the published algorithm shape.

Declassified variables neither seed nor transmit flow and are removed
from every view.

Annotation files are flat key/value text, one field per line::

    contract: BlindAuction
    sensitive: bids, highestBid
    declassified:
    ground_truth: bid

`declassified` and `ground_truth` are optional. `ground_truth` names
the functions expected to be sensitive; it is reporting metadata and
never influences the analysis. Blank lines and `#` comments are
ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .frontend import nodes as n
from .graphs.pdg import Pdg, PdgSet


class AnnotationError(ValueError):
    pass


class UnresolvedAnnotation(AnnotationError):
    def __init__(self, name: str, why: str = "does not name a state variable"):
        super().__init__(f"annotation {name!r} {why}")
        self.name = name


class EmptyContract(AnnotationError):
    def __init__(self, contract: str):
        super().__init__(f"contract {contract!r} has no functions to analyze")
        self.contract = contract


@dataclass(frozen=True)
class AnnotationSet:
    contract: str
    sensitive_vars: frozenset[str]
    declassified_vars: frozenset[str] = frozenset()
    ground_truth: frozenset[str] = frozenset()

    def __post_init__(self):
        overlap = self.sensitive_vars & self.declassified_vars
        if overlap:
            raise AnnotationError(
                f"variables cannot be both sensitive and declassified: "
                f"{', '.join(sorted(overlap))}"
            )


_ANN_KEYS = ("contract", "sensitive", "declassified", "ground_truth")


def parse_annotations(text: str, origin: str = "<string>") -> AnnotationSet:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in _ANN_KEYS:
            raise AnnotationError(
                f"{origin}:{lineno}: expected 'key: value' with key in "
                f"{_ANN_KEYS}, got {raw.strip()!r}"
            )
        if key in fields:
            raise AnnotationError(f"{origin}:{lineno}: duplicate key {key!r}")
        fields[key] = value.strip()

    if "contract" not in fields or not fields["contract"]:
        raise AnnotationError(f"{origin}: missing 'contract' field")
    if "sensitive" not in fields:
        raise AnnotationError(f"{origin}: missing 'sensitive' field")

    def names(key: str) -> frozenset[str]:
        value = fields.get(key, "")
        out = []
        for part in value.split(","):
            part = part.strip()
            if not part:
                continue
            if not (part[0].isalpha() or part[0] == "_") \
                    or not part.replace("_", "a").isalnum():
                raise AnnotationError(
                    f"{origin}: {key} entry {part!r} is not an identifier"
                )
            out.append(part)
        return frozenset(out)

    return AnnotationSet(
        contract=fields["contract"],
        sensitive_vars=names("sensitive"),
        declassified_vars=names("declassified"),
        ground_truth=names("ground_truth"),
    )


def load_annotations(path: str | Path) -> AnnotationSet:
    path = Path(path)
    return parse_annotations(path.read_text(), origin=str(path))


@dataclass
class SensitivityReport:
    contract: str
    annotations: AnnotationSet
    seeds: frozenset[str]
    sensitive_functions: frozenset[str]
    privileged_nodes: dict[str, frozenset[int]]
    sink_nodes: dict[str, frozenset[int]]
    source_nodes: dict[str, frozenset[int]]
    strict: bool
    notes: tuple[str, ...] = ()

    def delta(self, fn: str) -> frozenset[int]:
        return self.privileged_nodes.get(fn, frozenset())

    def is_sensitive(self, fn: str) -> bool:
        return fn in self.sensitive_functions


_NOTE_WRITE_SINK = (
    "a write to a seed-dependent variable is privileged even when it "
    "only overwrites (kills) the old value"
)


def identify(ann: AnnotationSet, pdgs: PdgSet, strict: bool = False) -> SensitivityReport:
    per_fn = pdgs.by_contract.get(ann.contract)
    if per_fn is None:
        raise UnresolvedAnnotation(ann.contract, "does not name a contract")
    if not per_fn:
        raise EmptyContract(ann.contract)

    scope = pdgs.analysis.scopes[ann.contract]
    for name in sorted(ann.sensitive_vars | ann.declassified_vars):
        if name not in scope.state_vars:
            raise UnresolvedAnnotation(name)

    declassified = set(ann.declassified_vars)
    reach = _ReachCache(declassified)

    reseedable = {
        name for name, ty in scope.state_vars.items()
        if not isinstance(ty, n.InterfaceType) and name not in declassified
    }

    seeds = set(ann.sensitive_vars) - declassified
    while True:
        sinks = {fname: _forward(pdg, seeds, reach)
                 for fname, pdg in per_fn.items()}
        if strict:
            break
        received: set[str] = set()
        for pdg in per_fn.values():
            for v in seeds:
                received |= reach.of(pdg, v) & reseedable
        if received <= seeds:
            break
        seeds |= received

    state_vars = set(scope.state_vars)
    sources = _backward(per_fn, sinks, reach, state_vars, strict)

    privileged = {}
    for fname in per_fn:
        privileged[fname] = frozenset(sinks[fname] | sources[fname])
    sensitive = frozenset(f for f, nodes in privileged.items() if nodes)

    return SensitivityReport(
        contract=ann.contract,
        annotations=ann,
        seeds=frozenset(seeds),
        sensitive_functions=sensitive,
        privileged_nodes=privileged,
        sink_nodes={f: frozenset(s) for f, s in sinks.items()},
        source_nodes={f: frozenset(s) for f, s in sources.items()},
        strict=strict,
        notes=(_NOTE_WRITE_SINK,),
    )


class _ReachCache:
    """Forward value-flow reach per PDG, with declassified bases cut."""

    def __init__(self, declassified: set[str]):
        self.declassified = declassified
        self._per_pdg: dict[int, dict[str, set[str]]] = {}

    def of(self, pdg: Pdg, base: str) -> set[str]:
        if base in self.declassified:
            return set()
        table = self._per_pdg.setdefault(id(pdg), {})
        cached = table.get(base)
        if cached is not None:
            return cached
        flow = pdg.flow_graph()
        seen = {base}
        frontier = [base]
        while frontier:
            cur = frontier.pop()
            for nxt in flow.get(cur, ()):
                if nxt in seen or nxt in self.declassified:
                    continue
                seen.add(nxt)
                frontier.append(nxt)
        table[base] = seen
        return seen

    def carries(self, pdg: Pdg, src: str, dst: str) -> bool:
        if dst in self.declassified:
            return False
        return dst in self.of(pdg, src)


def _forward(pdg: Pdg, seeds: set[str], reach: _ReachCache) -> set[int]:
    tainted: set[str] = set()
    for v in seeds:
        tainted |= reach.of(pdg, v)
    out = set()
    for nid in pdg.order:
        node = pdg.nodes[nid]
        if any(ref.base in tainted for ref in node.rw):
            out.add(nid)
    return out


def _backward(per_fn, sinks, reach, state_vars, strict) -> dict[str, set[int]]:
    sources: dict[str, set[int]] = {fname: set() for fname in per_fn}

    # demand: variables whose writers become privileged, tagged with the
    # function whose sink read them so locals stay function-scoped
    demand: set[tuple[str, str]] = set()
    for fname, pdg in per_fn.items():
        for nid in sinks[fname]:
            for ref in pdg.nodes[nid].reads:
                demand.add((fname, ref.base))

    while True:
        new_demand: set[tuple[str, str]] = set()
        for fname, pdg in per_fn.items():
            wanted = set()
            for origin, rd in demand:
                if origin == fname:
                    wanted.add(rd)
                elif strict or rd in state_vars:
                    wanted.add(rd)
            if not wanted:
                continue
            for nid in pdg.order:
                if nid in sources[fname]:
                    continue
                node = pdg.nodes[nid]
                hit = any(
                    reach.carries(pdg, w.base, rd)
                    for w in node.writes for rd in wanted
                )
                if hit:
                    sources[fname].add(nid)
                    for ref in node.reads:
                        new_demand.add((fname, ref.base))
        if strict or new_demand <= demand:
            break
        demand |= new_demand

    return sources
