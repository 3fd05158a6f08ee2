"""
The temporal scene graph
========================

Events become edges of a directed multigraph keyed by (frame, seq).
Nodes are entities; parallel edges are fine, one per event.
"""

from seg import InteractionEvent, build_graph, export_dot

raw = [
    (2.0, 2, "START", "person-1", "cup-3"),
    (10.0, 10, "END", "person-1", "cup-3"),
    (12.0, 12, "START", "person-1", "bowl-2"),
    (20.0, 20, "END", "person-1", "bowl-2"),
    (30.0, 30, "START", "person-1", "bowl-2"),
    (38.0, 38, "END", "person-1", "bowl-2"),
]
events = [InteractionEvent(timestamp=ts, frame=f, kind=k, subject=s,
                           object=o, seq=0)
          for ts, f, k, s, o in raw]

g = build_graph(events)
print(f"{g.n_nodes} nodes, {g.n_edges} edges")
for node in g.nodes():
    print(f"  {node.id}: class={node.cls} degree={node.degree}")

# every edge keeps its raw record text, so narratives can be rebuilt
first = g.edges()[0]
print("first edge record:", first.raw)

# ego view of one entity
print("edges touching bowl-2:",
      [(e.kind, e.frame) for e in g.incident_edges("bowl-2")])

# DOT export for graphviz
print(export_dot(g))
