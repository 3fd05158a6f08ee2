"""
Narratives and token budgets
============================

Whatever survives pruning is verbalized into one deterministic line per
event. The token estimate is what the cost accounting in the eval harness
runs on when a backend does not report its own numbers.
"""

from seg import (build_graph, estimate_tokens, pair_intervals, prune,
                 verbalize)
from seg.events import InteractionEvent

raw = [
    (2.5, 5, "START", "person-1", "cup-3"),
    (10.0, 20, "END", "person-1", "cup-3"),
    (12.25, 25, "START", "person-1", "bowl-2"),
    (20.0, 40, "END", "person-1", "bowl-2"),
]
events = [InteractionEvent(timestamp=ts, frame=f, kind=k, subject=s,
                           object=o, seq=0)
          for ts, f, k, s, o in raw]

narrative = verbalize(events)
print(narrative.text)
print()

# two estimators: utf-8 bytes / 4 (default) and whitespace words
print("bytes estimate:", narrative.estimated_tokens)
print("words estimate:", estimate_tokens(narrative.text, "words"))

# pruning first shrinks the narrative, and with it the budget
graph = build_graph(events)
pruned = prune(graph, "what happened with bowl-2?")
smaller = verbalize(pruned.events)
print(f"\npruned narrative ({smaller.estimated_tokens} tokens):")
print(smaller.text)

# START/END pairs also fold into closed intervals with durations
print()
for iv in pair_intervals(events):
    print(f"{iv.subject} with {iv.object}: t={iv.start_ts}s..{iv.end_ts}s "
          f"({iv.duration}s)")
