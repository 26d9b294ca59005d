"""Configuration assembly and analysis over typed block models.

Covers wiring of provided/required ports, pattern application by merge,
structural validation, alternative enumeration against a repository,
traceability queries, capability coverage, viewpoint-filtered views, and
DOT export of views and trace trees.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Mapping

from .core import (
    Aspect,
    BlockKind,
    BuildingBlock,
    ConcernLayer,
    Connection,
    Model,
    Origin,
    Port,
    PortDirection,
    PortRef,
    TraceKind,
    TraceLink,
    connection_key,
    port_compatible,
    trace_key,
    trace_pair_permitted,
)
from .errors import (
    AlreadyBound,
    AnchorKindMismatch,
    AnchorUnbound,
    DuplicateId,
    InvalidViewpoint,
    MergeConflict,
    TypeMismatch,
    UnknownElement,
)

if TYPE_CHECKING:
    from .repository import ReferenceRepository


@dataclass(frozen=True)
class PatternAnchor:
    """A block id the pattern expects to find in the target model."""

    id: str
    layer: ConcernLayer
    kind: BlockKind


@dataclass(frozen=True)
class Pattern:
    """A self-contained sub-model template, applied to a model by merge."""

    id: str
    blocks: tuple[BuildingBlock, ...] = ()
    connections: frozenset[Connection] = frozenset()
    traces: frozenset[TraceLink] = frozenset()
    anchors: tuple[PatternAnchor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "connections", frozenset(self.connections))
        object.__setattr__(self, "traces", frozenset(self.traces))
        object.__setattr__(self, "anchors", tuple(self.anchors))
        known = set()
        for block in self.blocks:
            if block.id in known:
                raise ValueError(f"pattern '{self.id}': duplicate block id '{block.id}'")
            known.add(block.id)
        for anchor in self.anchors:
            if anchor.id in known:
                raise ValueError(f"pattern '{self.id}': anchor id '{anchor.id}' clashes with a block id")
            known.add(anchor.id)
        for conn in self.connections:
            for ref in (conn.source, conn.target):
                if ref.block not in known:
                    raise ValueError(
                        f"pattern '{self.id}': connection endpoint '{ref.block}' is neither a "
                        f"pattern block nor an anchor"
                    )
        for link in self.traces:
            for endpoint in (link.source, link.target):
                if endpoint not in known:
                    raise ValueError(
                        f"pattern '{self.id}': trace endpoint '{endpoint}' is neither a "
                        f"pattern block nor an anchor"
                    )

    def anchor_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.anchors)


@dataclass(frozen=True)
class Viewpoint:
    """A (subject layer, aspect) lens onto a model."""

    subject: ConcernLayer
    aspect: Aspect
    name: str = ""


@dataclass(frozen=True)
class View:
    """The model subset a viewpoint selects: elements plus induced relations."""

    viewpoint: Viewpoint
    elements: tuple[str, ...]
    connections: tuple[Connection, ...] = ()
    traces: tuple[TraceLink, ...] = ()


class CoverageStatus(Enum):
    COVERED = "covered"
    PARTIALLY_COVERED = "partially_covered"
    UNCOVERED = "uncovered"


@dataclass(frozen=True)
class CapabilityCoverage:
    capability_id: str
    status: CoverageStatus
    witnesses: tuple[tuple[str, ...], ...] = ()


@dataclass(frozen=True)
class CoverageReport:
    """Per-capability coverage statuses with witness trace chains."""

    entries: tuple[CapabilityCoverage, ...]

    def status_of(self, capability_id: str) -> CoverageStatus:
        for entry in self.entries:
            if entry.capability_id == capability_id:
                return entry.status
        raise UnknownElement(f"no capability '{capability_id}' in coverage report")


@dataclass(frozen=True)
class ValidationReport:
    """Findings from structural validation; the model is valid iff all lists are empty."""

    unbound_required: tuple[str, ...] = ()
    multiply_bound: tuple[str, ...] = ()
    type_mismatches: tuple[str, ...] = ()
    illegal_traces: tuple[str, ...] = ()
    dangling: tuple[str, ...] = ()

    @property
    def is_valid(self) -> bool:
        return not (
            self.unbound_required
            or self.multiply_bound
            or self.type_mismatches
            or self.illegal_traces
            or self.dangling
        )

    def findings(self) -> list[str]:
        out = []
        out.extend(f"unbound required port: {f}" for f in self.unbound_required)
        out.extend(f"multiply bound required port: {f}" for f in self.multiply_bound)
        out.extend(f"type mismatch: {f}" for f in self.type_mismatches)
        out.extend(f"illegal trace: {f}" for f in self.illegal_traces)
        out.extend(f"dangling reference: {f}" for f in self.dangling)
        return out


class TraceDirection(Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class TraceNode:
    """One node of a trace tree; `link` is the kind of the edge that led here."""

    block_id: str
    link: TraceKind | None
    children: tuple["TraceNode", ...] = ()

    def node_ids(self) -> list[str]:
        out = [self.block_id]
        for child in self.children:
            out.extend(child.node_ids())
        return out


def connect(model: Model, provided_ref: PortRef, required_ref: PortRef) -> Model:
    """Wire a provided port to a required port, returning the new model.

    Raises UnknownElement for missing endpoints, TypeMismatch when the ports
    are not compatible, and AlreadyBound when the required port already has a
    provider.
    """
    provided = _resolve_port(model, provided_ref)
    required = _resolve_port(model, required_ref)
    if not port_compatible(provided, required):
        raise TypeMismatch(
            f"{provided_ref.block}:{provided_ref.port} ({provided.direction.value} "
            f"'{provided.interface_type}') cannot feed {required_ref.block}:{required_ref.port} "
            f"({required.direction.value} '{required.interface_type}')"
        )
    for conn in model.connections:
        if conn.target == required_ref:
            raise AlreadyBound(
                f"required port {required_ref.block}:{required_ref.port} is already bound"
            )
    connection = Connection(source=provided_ref, target=required_ref)
    return replace(model, connections=model.connections | {connection})


def _resolve_port(model: Model, ref: PortRef) -> Port:
    block = model.block(ref.block)
    port = block.find_port(ref.port)
    if port is None:
        raise UnknownElement(f"block '{ref.block}' has no port '{ref.port}'")
    return port


def apply_pattern(
    model: Model,
    pattern: Pattern,
    anchor_bindings: Mapping[str, str] | None = None,
    *,
    force_theirs: bool = False,
) -> Model:
    """Merge a pattern into the model, substituting anchors per the bindings.

    The result is the union of model and pattern content. A pattern block
    whose id already exists in the model is deduplicated when equal and a
    MergeConflict otherwise; ``force_theirs`` replaces the model's element
    instead. Application is idempotent.
    """
    bindings = dict(anchor_bindings or {})
    unknown = set(bindings) - set(pattern.anchor_ids())
    if unknown:
        raise ValueError(f"bindings name unknown anchors: {sorted(unknown)}")
    substitution: dict[str, str] = {}
    for anchor in pattern.anchors:
        if anchor.id not in bindings:
            raise AnchorUnbound(f"pattern '{pattern.id}': anchor '{anchor.id}' is unbound")
        target_id = bindings[anchor.id]
        target = model.blocks.get(target_id)
        if target is None:
            raise AnchorUnbound(
                f"pattern '{pattern.id}': anchor '{anchor.id}' is bound to missing block '{target_id}'"
            )
        if target.layer is not anchor.layer or target.kind is not anchor.kind:
            raise AnchorKindMismatch(
                f"anchor '{anchor.id}' expects {anchor.layer.value}/{anchor.kind.value}, "
                f"but '{target_id}' is {target.layer.value}/{target.kind.value}"
            )
        substitution[anchor.id] = target_id

    blocks = dict(model.blocks)
    for block in pattern.blocks:
        existing = blocks.get(block.id)
        if existing is None:
            blocks[block.id] = block
        elif existing == block:
            continue
        elif force_theirs:
            blocks[block.id] = block
        else:
            raise MergeConflict(
                f"block '{block.id}' already exists with different content"
            )

    def sub(block_id: str) -> str:
        return substitution.get(block_id, block_id)

    connections = set(model.connections)
    for conn in pattern.connections:
        connections.add(
            Connection(
                source=PortRef(sub(conn.source.block), conn.source.port),
                target=PortRef(sub(conn.target.block), conn.target.port),
            )
        )
    traces = set(model.traces)
    for link in pattern.traces:
        traces.add(TraceLink(kind=link.kind, source=sub(link.source), target=sub(link.target)))
    return replace(model, blocks=blocks, connections=frozenset(connections), traces=frozenset(traces))


def validate_configuration(model: Model) -> ValidationReport:
    """Check interface wiring and trace legality; total, never raises."""
    unbound: list[str] = []
    multiply: list[str] = []
    mismatches: list[str] = []
    illegal: list[str] = []
    dangling: list[str] = []

    bound_count: dict[PortRef, int] = {}
    for conn in model.sorted_connections():
        source = model.port(conn.source)
        target = model.port(conn.target)
        broken = False
        for ref, port in ((conn.source, source), (conn.target, target)):
            if ref.block not in model.blocks:
                dangling.append(f"connection endpoint block '{ref.block}' does not exist")
                broken = True
            elif port is None:
                dangling.append(f"connection endpoint port '{ref.block}:{ref.port}' does not exist")
                broken = True
        if broken:
            continue
        if not port_compatible(source, target):
            mismatches.append(
                f"{conn.source.block}:{conn.source.port} ({source.direction.value} "
                f"'{source.interface_type}') -> {conn.target.block}:{conn.target.port} "
                f"({target.direction.value} '{target.interface_type}')"
            )
        bound_count[conn.target] = bound_count.get(conn.target, 0) + 1

    for block in model.sorted_blocks():
        for port in block.ports:
            if port.direction is not PortDirection.REQUIRED:
                continue
            ref = PortRef(block.id, port.id)
            count = bound_count.get(ref, 0)
            if count == 0:
                unbound.append(f"{block.id}:{port.id} ('{port.interface_type}')")
            elif count > 1:
                multiply.append(f"{block.id}:{port.id} bound {count} times")

    for link in model.sorted_traces():
        source = model.blocks.get(link.source)
        target = model.blocks.get(link.target)
        if source is None or target is None:
            missing = link.source if source is None else link.target
            dangling.append(f"trace endpoint block '{missing}' does not exist")
            continue
        if not trace_pair_permitted(source.layer, target.layer, link.kind):
            illegal.append(
                f"{link.kind.value} {link.source} ({source.layer.value}) -> "
                f"{link.target} ({target.layer.value})"
            )

    return ValidationReport(
        unbound_required=tuple(unbound),
        multiply_bound=tuple(multiply),
        type_mismatches=tuple(mismatches),
        illegal_traces=tuple(illegal),
        dangling=tuple(dangling),
    )


def enumerate_alternatives(model: Model, repo: "ReferenceRepository", slot: str) -> list[Model]:
    """One model per repository block asset plug-compatible with the slot block.

    Plug-compatibility means equal layer, kind, and port signature. The
    current model is element 0 when the slot block itself matches one of the
    assets; with no matching assets the list holds only the current model.
    """
    return [m for _, m in enumerate_alternatives_with_slots(model, repo, slot)]


def enumerate_alternatives_with_slots(
    model: Model, repo: "ReferenceRepository", slot: str
) -> list[tuple[str, Model]]:
    """Like enumerate_alternatives, but pairs each model with its slot block id."""
    slot_block = model.block(slot)
    signature = (slot_block.layer, slot_block.kind, slot_block.port_signature())
    results: list[tuple[str, Model]] = []
    original_first: list[tuple[str, Model]] = []
    for asset in repo.block_assets():
        candidate = asset.block
        if (candidate.layer, candidate.kind, candidate.port_signature()) != signature:
            continue
        swapped = _swap_block(model, slot, candidate)
        if swapped == model:
            original_first.append((candidate.id, swapped))
        else:
            results.append((candidate.id, swapped))
    ordered = original_first + sorted(results, key=lambda pair: pair[0])
    if not ordered:
        return [(slot, model)]
    return ordered


def _swap_block(model: Model, slot: str, candidate: BuildingBlock) -> Model:
    """Replace the slot block with the candidate, rewiring incident references."""
    replacement = replace(candidate, origin=Origin.ADOPTED)
    if replacement.id != slot and replacement.id in model.blocks:
        raise DuplicateId(
            f"cannot swap '{slot}' for '{replacement.id}': id already present in model"
        )
    old = model.blocks[slot]
    port_map = _match_ports(old, replacement)

    blocks = dict(model.blocks)
    del blocks[slot]
    blocks[replacement.id] = replacement

    def sub_ref(ref: PortRef) -> PortRef:
        if ref.block != slot:
            return ref
        return PortRef(replacement.id, port_map.get(ref.port, ref.port))

    connections = frozenset(
        Connection(source=sub_ref(c.source), target=sub_ref(c.target)) for c in model.connections
    )
    traces = frozenset(
        TraceLink(
            kind=t.kind,
            source=replacement.id if t.source == slot else t.source,
            target=replacement.id if t.target == slot else t.target,
        )
        for t in model.traces
    )
    return replace(model, blocks=blocks, connections=connections, traces=traces)


def _match_ports(old: BuildingBlock, new: BuildingBlock) -> dict[str, str]:
    """Map old port ids onto new ones with the same (direction, type), in sorted order."""
    groups: dict[tuple[str, str], list[str]] = {}
    for port in new.ports:
        groups.setdefault((port.direction.value, port.interface_type), []).append(port.id)
    for ids in groups.values():
        ids.sort()
    mapping: dict[str, str] = {}
    for port in sorted(old.ports, key=lambda p: p.id):
        bucket = groups[(port.direction.value, port.interface_type)]
        mapping[port.id] = bucket.pop(0)
    return mapping


def trace(model: Model, element_id: str, direction: TraceDirection) -> TraceNode:
    """Follow trace links from an element, up toward Strategic or down toward Resource.

    The result is a tree with unique nodes (cycle-safe) and children ordered
    by block id.
    """
    if element_id not in model.blocks:
        raise UnknownElement(f"model '{model.id}' has no block '{element_id}'")
    visited = {element_id}

    def expand(block_id: str, via: TraceKind | None) -> TraceNode:
        steps = []
        for link in model.traces:
            if direction is TraceDirection.UP and link.source == block_id:
                steps.append((link.target, link.kind))
            elif direction is TraceDirection.DOWN and link.target == block_id:
                steps.append((link.source, link.kind))
        children = []
        for child_id, kind in sorted(steps, key=lambda s: (s[0], s[1].value)):
            if child_id in visited or child_id not in model.blocks:
                continue
            visited.add(child_id)
            children.append(expand(child_id, kind))
        return TraceNode(block_id=block_id, link=via, children=tuple(children))

    return expand(element_id, None)


def capability_coverage(model: Model) -> CoverageReport:
    """Classify every capability by how far trace chains reach down the layers."""
    entries = []
    for block in model.sorted_blocks():
        if block.kind is not BlockKind.CAPABILITY:
            continue
        tree = trace(model, block.id, TraceDirection.DOWN)
        layers = {
            model.blocks[node_id].layer for node_id in tree.node_ids() if node_id != block.id
        }
        if ConcernLayer.RESOURCE in layers:
            status = CoverageStatus.COVERED
        elif ConcernLayer.OPERATIONAL in layers or ConcernLayer.SERVICE in layers:
            status = CoverageStatus.PARTIALLY_COVERED
        else:
            status = CoverageStatus.UNCOVERED
        entries.append(
            CapabilityCoverage(
                capability_id=block.id,
                status=status,
                witnesses=tuple(_witness_chains(model, tree)),
            )
        )
    return CoverageReport(entries=tuple(entries))


def _witness_chains(model: Model, tree: TraceNode) -> list[tuple[str, ...]]:
    chains: list[tuple[str, ...]] = []

    def walk(node: TraceNode, prefix: tuple[str, ...]):
        path = prefix + (node.block_id,)
        if model.blocks[node.block_id].layer is ConcernLayer.RESOURCE:
            chains.append(path)
        for child in node.children:
            walk(child, path)

    walk(tree, ())
    return chains


def viewpoint_valid(viewpoint: Viewpoint) -> bool:
    """Capability concerns carry no behavior, so (Strategic, Behavior) is invalid."""
    return not (
        viewpoint.subject is ConcernLayer.STRATEGIC and viewpoint.aspect is Aspect.BEHAVIOR
    )


_REQUIREMENT_KINDS = frozenset({TraceKind.MAPS_TO, TraceKind.EXHIBITS})
_BEHAVIOR_KINDS = frozenset({TraceKind.PERFORMS, TraceKind.IMPLEMENTS})


def extract_view(model: Model, viewpoint: Viewpoint) -> View:
    """Select the subject layer's blocks and the aspect-filtered relations among them."""
    if not viewpoint_valid(viewpoint):
        raise InvalidViewpoint(
            f"({viewpoint.subject.value}, {viewpoint.aspect.value}) is not a valid viewpoint"
        )
    element_set = {
        block.id for block in model.blocks.values() if block.layer is viewpoint.subject
    }
    if viewpoint.aspect is Aspect.PARAMETERS:
        element_set = {bid for bid in element_set if model.blocks[bid].parameters}
    connections: tuple[Connection, ...] = ()
    traces: tuple[TraceLink, ...] = ()
    if viewpoint.aspect is Aspect.STRUCTURE:
        connections = tuple(
            c
            for c in model.sorted_connections()
            if c.source.block in element_set and c.target.block in element_set
        )
    elif viewpoint.aspect is Aspect.REQUIREMENTS:
        traces = tuple(
            t
            for t in model.sorted_traces()
            if t.kind in _REQUIREMENT_KINDS and t.source in element_set and t.target in element_set
        )
    elif viewpoint.aspect is Aspect.BEHAVIOR:
        traces = tuple(
            t
            for t in model.sorted_traces()
            if t.kind in _BEHAVIOR_KINDS and t.source in element_set and t.target in element_set
        )
    return View(
        viewpoint=viewpoint,
        elements=tuple(sorted(element_set)),
        connections=connections,
        traces=traces,
    )


def export_dot(item) -> str:
    """Render a View or a TraceNode tree as a deterministic DOT digraph."""
    if isinstance(item, View):
        return _view_dot(item)
    if isinstance(item, TraceNode):
        return _trace_dot(item)
    raise TypeError(f"cannot export {type(item).__name__} as DOT")


def _view_dot(view: View) -> str:
    lines = ["digraph view {"]
    for element in view.elements:
        lines.append(f'  "{element}";')
    for conn in sorted(view.connections, key=connection_key):
        lines.append(
            f'  "{conn.source.block}" -> "{conn.target.block}" '
            f'[label="{conn.source.port}->{conn.target.port}"];'
        )
    for link in sorted(view.traces, key=trace_key):
        lines.append(f'  "{link.source}" -> "{link.target}" [label="{link.kind.value}", style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _trace_dot(tree: TraceNode) -> str:
    nodes: list[str] = []
    edges: list[str] = []

    def walk(node: TraceNode):
        nodes.append(node.block_id)
        for child in node.children:
            edges.append(
                f'  "{node.block_id}" -> "{child.block_id}" [label="{child.link.value}"];'
            )
            walk(child)

    walk(tree)
    lines = ["digraph trace {"]
    lines.extend(f'  "{node}";' for node in nodes)
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
