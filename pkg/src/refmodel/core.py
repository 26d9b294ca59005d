"""Typed building-block model: concern layers, ports, blocks, trace links, models.

Everything here is an immutable value; operations return new models instead of
mutating. Blocks are bound to exactly one concern layer, ports carry nominal
interface types, and cross-layer trace links are restricted to a fixed table of
permitted (source layer, target layer, kind) triples.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Union

from .errors import DuplicateId, IllegalTraceKind, UnknownElement

Scalar = Union[str, int, float, bool]


class ConcernLayer(Enum):
    STRATEGIC = "strategic"
    OPERATIONAL = "operational"
    SERVICE = "service"
    RESOURCE = "resource"


class Aspect(Enum):
    STRUCTURE = "structure"
    BEHAVIOR = "behavior"
    PARAMETERS = "parameters"
    REQUIREMENTS = "requirements"


class PortDirection(Enum):
    PROVIDED = "provided"
    REQUIRED = "required"


class BlockKind(Enum):
    CAPABILITY = "capability"
    OPERATIONAL_PERFORMER = "operational_performer"
    OPERATIONAL_ACTIVITY = "operational_activity"
    SERVICE = "service"
    RESOURCE_CONFIGURATION = "resource_configuration"
    RESOURCE_COMPONENT = "resource_component"
    FUNCTION = "function"
    ALGORITHM_BLOCK = "algorithm_block"


class Origin(Enum):
    REFERENCE_ASSET = "reference_asset"
    ADOPTED = "adopted"
    ADAPTED = "adapted"
    EXTENDED = "extended"


class TraceKind(Enum):
    EXHIBITS = "exhibits"
    MAPS_TO = "maps_to"
    PERFORMS = "performs"
    IMPLEMENTS = "implements"


_KIND_LAYER = {
    BlockKind.CAPABILITY: ConcernLayer.STRATEGIC,
    BlockKind.OPERATIONAL_PERFORMER: ConcernLayer.OPERATIONAL,
    BlockKind.OPERATIONAL_ACTIVITY: ConcernLayer.OPERATIONAL,
    BlockKind.SERVICE: ConcernLayer.SERVICE,
    BlockKind.RESOURCE_CONFIGURATION: ConcernLayer.RESOURCE,
    BlockKind.RESOURCE_COMPONENT: ConcernLayer.RESOURCE,
    BlockKind.FUNCTION: ConcernLayer.RESOURCE,
    BlockKind.ALGORITHM_BLOCK: ConcernLayer.RESOURCE,
}


def layer_for_kind(kind: BlockKind) -> ConcernLayer:
    """The single concern layer a block of this kind must live on."""
    return _KIND_LAYER[kind]


@dataclass(frozen=True)
class Port:
    """A typed interface point on a block; matching is nominal by token."""

    id: str
    direction: PortDirection
    interface_type: str
    layer: ConcernLayer

    def __post_init__(self):
        if not self.id:
            raise ValueError("port id must be non-empty")
        if not self.interface_type:
            raise ValueError(f"port '{self.id}': interface_type must be a non-empty token")


@dataclass(frozen=True)
class BuildingBlock:
    """A reusable, typed model element carrying ports and flat parameters."""

    id: str
    name: str
    layer: ConcernLayer
    kind: BlockKind
    ports: tuple[Port, ...] = ()
    parameters: Mapping[str, Scalar] = field(default_factory=dict)
    origin: Origin = Origin.REFERENCE_ASSET

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(self.ports))
        object.__setattr__(self, "parameters", dict(self.parameters))
        if not self.id:
            raise ValueError("block id must be non-empty")
        if layer_for_kind(self.kind) is not self.layer:
            raise ValueError(
                f"block '{self.id}': kind {self.kind.value} belongs on layer "
                f"{layer_for_kind(self.kind).value}, not {self.layer.value}"
            )
        seen = set()
        for port in self.ports:
            if port.id in seen:
                raise ValueError(f"block '{self.id}': duplicate port id '{port.id}'")
            seen.add(port.id)
            if port.layer is not self.layer:
                raise ValueError(
                    f"block '{self.id}': port '{port.id}' is on layer {port.layer.value}, "
                    f"but ports must share the owning block's layer {self.layer.value}"
                )

    def find_port(self, port_id: str) -> Port | None:
        for port in self.ports:
            if port.id == port_id:
                return port
        return None

    def port_signature(self) -> tuple[tuple[str, str], ...]:
        """Sorted multiset of (direction, interface type); the plug-compatibility key."""
        return tuple(sorted((p.direction.value, p.interface_type) for p in self.ports))


@dataclass(frozen=True)
class PortRef:
    """Address of one port: (block id, port id)."""

    block: str
    port: str


@dataclass(frozen=True)
class Connection:
    """A wire from a provided port to a required port with equal interface types."""

    source: PortRef
    target: PortRef


@dataclass(frozen=True)
class TraceLink:
    """A cross-layer realization relation between two blocks."""

    kind: TraceKind
    source: str
    target: str


# Permitted (source layer, target layer, kind) triples for trace links.
PERMITTED_TRACE_PAIRS = frozenset(
    {
        (ConcernLayer.OPERATIONAL, ConcernLayer.STRATEGIC, TraceKind.EXHIBITS),
        (ConcernLayer.RESOURCE, ConcernLayer.STRATEGIC, TraceKind.EXHIBITS),
        (ConcernLayer.SERVICE, ConcernLayer.STRATEGIC, TraceKind.MAPS_TO),
        (ConcernLayer.OPERATIONAL, ConcernLayer.OPERATIONAL, TraceKind.PERFORMS),
        (ConcernLayer.RESOURCE, ConcernLayer.RESOURCE, TraceKind.PERFORMS),
        (ConcernLayer.RESOURCE, ConcernLayer.SERVICE, TraceKind.IMPLEMENTS),
        (ConcernLayer.SERVICE, ConcernLayer.OPERATIONAL, TraceKind.IMPLEMENTS),
    }
)


def trace_pair_permitted(source: ConcernLayer, target: ConcernLayer, kind: TraceKind) -> bool:
    return (source, target, kind) in PERMITTED_TRACE_PAIRS


@dataclass(frozen=True)
class Model:
    """An identified set of blocks plus the connections and traces between them."""

    id: str
    blocks: Mapping[str, BuildingBlock] = field(default_factory=dict)
    connections: frozenset[Connection] = frozenset()
    traces: frozenset[TraceLink] = frozenset()

    def __post_init__(self):
        blocks = dict(self.blocks)
        for key, block in blocks.items():
            if key != block.id:
                raise ValueError(f"model '{self.id}': key '{key}' does not match block id '{block.id}'")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "connections", frozenset(self.connections))
        object.__setattr__(self, "traces", frozenset(self.traces))

    def block(self, block_id: str) -> BuildingBlock:
        try:
            return self.blocks[block_id]
        except KeyError:
            raise UnknownElement(f"model '{self.id}' has no block '{block_id}'") from None

    def port(self, ref: PortRef) -> Port | None:
        block = self.blocks.get(ref.block)
        return block.find_port(ref.port) if block else None

    def sorted_blocks(self) -> list[BuildingBlock]:
        return [self.blocks[key] for key in sorted(self.blocks)]

    def sorted_connections(self) -> list[Connection]:
        return sorted(self.connections, key=connection_key)

    def sorted_traces(self) -> list[TraceLink]:
        return sorted(self.traces, key=trace_key)


def connection_key(conn: Connection) -> tuple[str, str, str, str]:
    return (conn.source.block, conn.source.port, conn.target.block, conn.target.port)


def trace_key(link: TraceLink) -> tuple[str, str, str]:
    return (link.kind.value, link.source, link.target)


def add_block(model: Model, block: BuildingBlock) -> Model:
    """Return a copy of the model with one more block.

    Raises DuplicateId if the block's id is already taken.
    """
    if block.id in model.blocks:
        raise DuplicateId(f"model '{model.id}' already contains block '{block.id}'")
    blocks = dict(model.blocks)
    blocks[block.id] = block
    return replace(model, blocks=blocks)


def port_compatible(provided: Port, required: Port) -> bool:
    """True iff the pair can be wired: provided->required with equal type tokens."""
    return (
        provided.direction is PortDirection.PROVIDED
        and required.direction is PortDirection.REQUIRED
        and provided.interface_type == required.interface_type
    )


def add_trace(model: Model, link: TraceLink) -> Model:
    """Return a copy of the model with one more trace link.

    The link is accepted only if both endpoints exist and the
    (source layer, target layer, kind) triple is in the permitted table.
    """
    source = model.block(link.source)
    target = model.block(link.target)
    if not trace_pair_permitted(source.layer, target.layer, link.kind):
        raise IllegalTraceKind(
            f"{link.kind.value} from {source.layer.value} to {target.layer.value} is not permitted"
        )
    return replace(model, traces=model.traces | {link})
