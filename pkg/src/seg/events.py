"""Proximity-interaction extraction.

Walks a detection log once and compresses it into START/END interaction
events. Two entities interact at a frame when the Euclidean distance
between their bbox centroids is at most ``delta`` pixels (inclusive), and
at least one of them belongs to the focus class. A START is emitted at
the first close frame of a pair; the matching END only after the pair has
been apart, or either member absent, for more than ``beta`` consecutive
log frames (hysteresis, so brief occlusions and tracker flicker do not
split one interaction into many). The END carries the frame at which the
gap was confirmed, i.e. the (beta+1)-th consecutive apart frame. Pairs
still active when the log ends are closed with an END at the final frame.

Roles are canonical: the focus-class entity is the subject; when both
members are focus class, the lower track id is the subject. Per frame,
emissions are ordered by (subject, object); ``seq`` is a global emission
counter, so sorting by (frame, seq) reproduces extraction order exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .detlog import Detection, DetectionLog, normalize_label, parse_entity_id
from .errors import SchemaError

START = "START"
END = "END"


@dataclass(frozen=True)
class ExtractionConfig:
    """Knobs for the proximity extractor.

    delta: interaction radius in pixels (100 for normal footage, 200 is
        a sensible choice for wide-angle scenes).
    beta: hysteresis in log frames; an interaction survives gaps of up
        to beta consecutive apart/absent frames.
    focus_class: only pairs involving this class are considered.
    """

    delta: float = 100.0
    beta: int = 5
    focus_class: str = "person"

    def __post_init__(self) -> None:
        if not (self.delta > 0 and self.delta == self.delta):
            raise ValueError(f"delta must be a positive number, got {self.delta}")
        if not isinstance(self.beta, int) or self.beta < 0:
            raise ValueError(f"beta must be a non-negative integer, got {self.beta}")
        object.__setattr__(self, "focus_class", normalize_label(self.focus_class))


@dataclass(frozen=True)
class InteractionEvent:
    """One symbolic START or END record."""

    timestamp: float
    frame: int
    kind: str
    subject: str
    object: str
    seq: int

    def to_record(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "frame": self.frame,
            "type": self.kind,
            "subject": self.subject,
            "object": self.object,
            "seq": self.seq,
        }

    @classmethod
    def from_record(cls, rec: dict, path: str = "$") -> "InteractionEvent":
        if not isinstance(rec, dict):
            raise SchemaError(path, "expected an object")
        for key in ("timestamp", "frame", "type", "subject", "object", "seq"):
            if key not in rec:
                raise SchemaError(f"{path}.{key}", "missing")
        kind = rec["type"]
        if kind not in (START, END):
            raise SchemaError(f"{path}.type", f"expected START or END, got {kind!r}")
        ts = rec["timestamp"]
        if not isinstance(ts, (int, float)) or isinstance(ts, bool):
            raise SchemaError(f"{path}.timestamp", "expected a number")
        frame = rec["frame"]
        if not isinstance(frame, int) or isinstance(frame, bool):
            raise SchemaError(f"{path}.frame", "expected an integer")
        seq = rec["seq"]
        if not isinstance(seq, int) or isinstance(seq, bool):
            raise SchemaError(f"{path}.seq", "expected an integer")
        for key in ("subject", "object"):
            try:
                parse_entity_id(rec[key])
            except (TypeError, ValueError):
                raise SchemaError(f"{path}.{key}",
                                  f"not a canonical entity id: {rec[key]!r}")
        return cls(timestamp=float(ts), frame=frame, kind=kind,
                   subject=rec["subject"], object=rec["object"], seq=seq)


def events_to_json(events: Sequence[InteractionEvent]) -> str:
    """Serialize events as the on-disk array-of-records document."""
    return json.dumps([e.to_record() for e in events], indent=2) + "\n"


def events_from_json(source: bytes | str) -> tuple[InteractionEvent, ...]:
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise SchemaError("$", "event log must be a JSON array")
    return tuple(InteractionEvent.from_record(rec, path=f"[{i}]")
                 for i, rec in enumerate(doc))


def load_events(path: str) -> tuple[InteractionEvent, ...]:
    with open(path, "rb") as fh:
        return events_from_json(fh.read())


def pair_distance(a: Detection, b: Detection) -> float:
    """Euclidean distance between two detections' centroids."""
    ax, ay = a.centroid
    bx, by = b.centroid
    return float(np.hypot(ax - bx, ay - by))


def canonical_roles(id_a: str, id_b: str, cfg: ExtractionConfig) -> tuple[str, str]:
    """Order a pair as (subject, object) under the focus-class rule."""
    cls_a, track_a = parse_entity_id(id_a)
    cls_b, track_b = parse_entity_id(id_b)
    a_focus = cls_a == cfg.focus_class
    b_focus = cls_b == cfg.focus_class
    if a_focus and b_focus:
        return (id_a, id_b) if track_a <= track_b else (id_b, id_a)
    if a_focus:
        return id_a, id_b
    if b_focus:
        return id_b, id_a
    raise ValueError(f"neither {id_a} nor {id_b} is focus class {cfg.focus_class!r}")


def _close_pairs(dets: Sequence[Detection], cfg: ExtractionConfig) -> set[tuple[str, str]]:
    """Canonical pairs whose centroid distance is within delta this frame."""
    if not dets:
        return set()
    ids = [d.entity_id for d in dets]
    focus = [i for i, d in enumerate(dets) if d.label == cfg.focus_class]
    if not focus:
        return set()
    cents = np.array([d.centroid for d in dets], dtype=np.float64)
    d2_max = cfg.delta * cfg.delta
    out: set[tuple[str, str]] = set()
    for i in focus:
        diff = cents - cents[i]
        d2 = diff[:, 0] ** 2 + diff[:, 1] ** 2
        for j in np.nonzero(d2 <= d2_max)[0]:
            if j == i:
                continue
            out.add(canonical_roles(ids[i], ids[int(j)], cfg))
    return out


def extract_events(log: DetectionLog,
                   cfg: ExtractionConfig | None = None) -> tuple[InteractionEvent, ...]:
    """Run the START/END state machine over a detection log."""
    cfg = cfg or ExtractionConfig()
    active: dict[tuple[str, str], int] = {}
    events: list[InteractionEvent] = []
    seq = 0

    def emit(kind: str, pair: tuple[str, str], fr_frame: int, fr_ts: float) -> None:
        nonlocal seq
        events.append(InteractionEvent(timestamp=fr_ts, frame=fr_frame, kind=kind,
                                       subject=pair[0], object=pair[1], seq=seq))
        seq += 1

    for fr in log.frames:
        close = _close_pairs(fr.detections, cfg)
        for pair in sorted(set(active) | close):
            if pair in close:
                if pair not in active:
                    emit(START, pair, fr.frame, fr.timestamp)
                active[pair] = 0
            else:
                apart = active[pair] + 1
                if apart > cfg.beta:
                    emit(END, pair, fr.frame, fr.timestamp)
                    del active[pair]
                else:
                    active[pair] = apart

    if log.frames and active:
        last = log.frames[-1]
        for pair in sorted(active):
            emit(END, pair, last.frame, last.timestamp)

    return tuple(events)


def active_pairs_at_end(events: Iterable[InteractionEvent]) -> set[tuple[str, str]]:
    """Pairs whose most recent event is a START (useful for diagnostics)."""
    state: dict[tuple[str, str], str] = {}
    for e in sorted(events, key=lambda e: (e.frame, e.seq)):
        state[(e.subject, e.object)] = e.kind
    return {pair for pair, kind in state.items() if kind == START}
