"""Query-aware graph pruning.

Given a natural-language query, select the slice of the scene graph worth
verbalizing. Two retrieval routes, tried in order:

ANCHOR: tokens that literally name a node id, plus content words that
    name a node class, become anchor entities; the result is every edge
    incident to an anchor (the 1-hop neighborhood). Anchors take absolute
    precedence; the lexical route is never consulted when any exist.
LEXICAL: otherwise each edge is scored by token overlap,
    score = |content_tokens ∩ T(e)| / |content_tokens|, and edges with
    score >= tau survive. T(e) holds the subject id, subject class,
    object id, object class, and the lowercase kind word.

Either way results are deduped by event hash (kind, subject, object,
frame), sorted chronologically, and reported with a compression ratio
C = 1 - retained/total. A query with no usable tokens, or a lexical pass
that retrieves nothing, yields mode EMPTY rather than an error: "no
evidence" is a meaningful outcome the evaluation layer must see.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .detlog import entity_class
from .errors import UndefinedScoreError
from .graph import EventEdge, TemporalSceneGraph

ANCHOR = "ANCHOR"
LEXICAL = "LEXICAL"
EMPTY = "EMPTY"

_TOKEN_RE = re.compile(r"[a-z0-9_-]+")


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The fixed stopword list shipped with the package."""
    text = resources.files("seg").joinpath("stopwords.txt").read_text("utf-8")
    words = [line.strip() for line in text.splitlines()
             if line.strip() and not line.startswith("#")]
    return frozenset(words)


@dataclass(frozen=True)
class QueryTokens:
    raw: str
    tokens: tuple[str, ...]
    content_tokens: frozenset[str]


def tokenize(q: str, use_stopwords: bool = True) -> QueryTokens:
    """Lowercase a query into tokens and content tokens.

    Tokens are maximal runs of letters, digits, underscores, and hyphens,
    with leading/trailing hyphens stripped so entity ids like person-4
    survive as single tokens. With use_stopwords=False, content tokens
    are simply all tokens.
    """
    tokens = []
    for m in _TOKEN_RE.finditer(q.lower()):
        tok = m.group(0).strip("-")
        if tok:
            tokens.append(tok)
    content = set(tokens)
    if use_stopwords:
        content -= stopwords()
    return QueryTokens(raw=q, tokens=tuple(tokens),
                       content_tokens=frozenset(content))


@dataclass(frozen=True)
class PruneConfig:
    tau: float = 0.3
    use_stopwords: bool = True
    max_events: int | None = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.tau <= 1.0):
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if self.max_events is not None and self.max_events < 0:
            raise ValueError(f"max_events must be >= 0, got {self.max_events}")


def find_anchors(g: TemporalSceneGraph,
                 q: QueryTokens) -> tuple[set[str], set[str]]:
    """(anchors_id, anchors_class): nodes named by id or by class."""
    anchors_id = {tok for tok in q.tokens if g.has_entity(tok)}
    anchors_class: set[str] = set()
    for tok in q.content_tokens:
        anchors_class.update(g.entities_by_class(tok))
    return anchors_id, anchors_class


def event_tokens(e: EventEdge) -> frozenset[str]:
    """T(e): ids, classes, and the kind word; never more than 5 tokens."""
    return frozenset({
        e.subject,
        entity_class(e.subject),
        e.object,
        entity_class(e.object),
        e.kind.lower(),
    })


def lexical_score(q: QueryTokens, e: EventEdge) -> float:
    """Overlap ratio |content ∩ T(e)| / |content|, in [0, 1]."""
    if not q.content_tokens:
        raise UndefinedScoreError(
            f"query {q.raw!r} has no content tokens to score")
    return len(q.content_tokens & event_tokens(e)) / len(q.content_tokens)


def event_hash(e: EventEdge) -> tuple[str, str, str, int]:
    return (e.kind, e.subject, e.object, e.frame)


def _dedupe(edges: Sequence[EventEdge]) -> list[EventEdge]:
    """Keep the first of each event hash, preserving (frame, seq) order."""
    seen: set[tuple[str, str, str, int]] = set()
    out: list[EventEdge] = []
    for e in sorted(edges, key=lambda e: e.key):
        h = event_hash(e)
        if h not in seen:
            seen.add(h)
            out.append(e)
    return out


@dataclass(frozen=True)
class PruneResult:
    events: tuple[EventEdge, ...]
    anchors: frozenset[str]
    mode: str
    compression: float
    total_events: int

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "anchors": sorted(self.anchors),
            "compression": self.compression,
            "events": [json.loads(e.raw) for e in self.events],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


def prune(g: TemporalSceneGraph, q: str,
          cfg: PruneConfig | None = None) -> PruneResult:
    """Run the two-route retrieval over a built graph."""
    cfg = cfg or PruneConfig()
    total = g.n_edges
    qt = tokenize(q, use_stopwords=cfg.use_stopwords)

    anchors_id, anchors_class = find_anchors(g, qt)
    anchors = anchors_id | anchors_class
    if anchors:
        mode = ANCHOR
        pool: list[EventEdge] = []
        for a in sorted(anchors):
            pool.extend(g.incident_edges(a))
        selected = _dedupe(pool)
    elif qt.content_tokens:
        mode = LEXICAL
        selected = _dedupe([e for e in g.edges()
                            if lexical_score(qt, e) >= cfg.tau])
        if not selected:
            mode = EMPTY
    else:
        mode = EMPTY
        selected = []

    if cfg.max_events is not None and len(selected) > cfg.max_events:
        selected = selected[:cfg.max_events]

    compression = 1.0 - len(selected) / max(total, 1)
    return PruneResult(events=tuple(selected),
                       anchors=frozenset(anchors) if mode == ANCHOR else frozenset(),
                       mode=mode, compression=compression, total_events=total)
