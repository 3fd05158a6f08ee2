"""Temporal scene graph over interaction events.

The graph is a directed multigraph: one node per entity id, one edge per
event, so a pair that interacts five times contributes ten edges. Edges
keep their full event metadata plus the raw serialized record, which lets
downstream verbalization quote the event exactly as extracted. Iteration
order everywhere is deterministic: nodes sort by id, edges by
(frame, seq).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .detlog import entity_class
from .events import InteractionEvent
from .narrative import format_timestamp


@dataclass(frozen=True)
class EventEdge:
    """One directed subject -> object edge carrying a single event."""

    subject: str
    object: str
    kind: str
    timestamp: float
    frame: int
    seq: int
    raw: str

    @property
    def key(self) -> tuple[int, int]:
        return (self.frame, self.seq)


@dataclass(frozen=True)
class EntityNode:
    id: str
    cls: str
    degree: int


def _edge_from_event(e: InteractionEvent) -> EventEdge:
    return EventEdge(subject=e.subject, object=e.object, kind=e.kind,
                     timestamp=e.timestamp, frame=e.frame, seq=e.seq,
                     raw=json.dumps(e.to_record(), separators=(", ", ":")))


class TemporalSceneGraph:
    """Immutable-after-build index of events by entity.

    Build once with :func:`build_graph`; lookups are O(1) per entity and
    edges come back in chronological (frame, seq) order.
    """

    def __init__(self, edges: Iterable[EventEdge]) -> None:
        self._edges: tuple[EventEdge, ...] = tuple(
            sorted(edges, key=lambda e: e.key))
        by_entity: dict[str, list[EventEdge]] = {}
        classes: dict[str, str] = {}
        for edge in self._edges:
            for node in (edge.subject, edge.object):
                by_entity.setdefault(node, []).append(edge)
                classes.setdefault(node, entity_class(node))
        self._by_entity = {k: tuple(v) for k, v in by_entity.items()}
        self._classes = classes

    @property
    def n_nodes(self) -> int:
        return len(self._by_entity)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def edges(self) -> tuple[EventEdge, ...]:
        return self._edges

    def nodes(self) -> tuple[EntityNode, ...]:
        return tuple(EntityNode(id=eid, cls=self._classes[eid],
                                degree=len(self._by_entity[eid]))
                     for eid in sorted(self._by_entity))

    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self._by_entity

    def incident_edges(self, entity_id: str) -> tuple[EventEdge, ...]:
        """Edges touching an entity as subject or object; () if unknown."""
        return self._by_entity.get(entity_id, ())

    def entities_by_class(self, cls: str) -> tuple[str, ...]:
        want = cls.lower()
        return tuple(eid for eid in sorted(self._by_entity)
                     if self._classes[eid] == want)

    def node_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._by_entity))


def build_graph(events: Sequence[InteractionEvent]) -> TemporalSceneGraph:
    """Index an event log into a temporal scene graph (linear time)."""
    return TemporalSceneGraph(_edge_from_event(e) for e in events)


def export_dot(graph: TemporalSceneGraph) -> str:
    """Graphviz rendering with deterministic byte output."""
    lines = ["digraph tsg {"]
    for node in graph.nodes():
        lines.append(f'  "{node.id}" [label="{node.id}"];')
    for edge in graph.edges():
        label = f"{edge.kind}@{format_timestamp(edge.timestamp)}"
        lines.append(f'  "{edge.subject}" -> "{edge.object}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
