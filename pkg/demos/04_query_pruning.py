"""
Query-aware pruning
===================

A question usually touches a couple of entities. Pruning keeps only the
edges near them: entities named in the query anchor a 1-hop subgraph;
when nothing anchors, a token-overlap score with threshold tau takes over.
"""

from seg import (ExtractionConfig, build_graph, extract_events, generate,
                 prune, standard_scenario)

scenario = generate(standard_scenario(seed=7))
events = extract_events(scenario.log, ExtractionConfig(beta=scenario.spec.beta))
graph = build_graph(events)
print(f"workload: {graph.n_edges} events, {graph.n_nodes} entities")

queries = [
    "When did person-3 pick up the cup-13?",  # ids anchor directly
    "who touched a laptop today",             # class name anchors all laptops
    "did anything start",                     # no anchors: lexical fallback
    "qqq zzz",                                # nothing matches at all
]

for q in queries:
    result = prune(graph, q)
    kept = len(result.events)
    print(f"\nquery: {q!r}")
    print(f"  mode={result.mode} kept={kept}/{result.total_events} "
          f"compression={result.compression:.3f}")
    if result.anchors:
        print(f"  anchors: {sorted(result.anchors)}")
    for e in result.events[:3]:
        print(f"    {e.kind:>5} {e.subject} / {e.object} @ frame {e.frame}")
