"""Verbalization of event lists and token-cost accounting.

The narrative hands the model one terse clause per event:

    Interaction log: 3 events spanning t=0.4s to t=12.3s.
    [t=0.4s, frame 2] person-1 STARTED interacting with cup-3.
    ...

The template is deliberately rigid: byte-identical input produces
byte-identical output, so context budgets measured on it are
reproducible. Token counts are estimated as ceil(utf8_bytes / 4) by
default, with a whitespace word count as the alternative; every report
downstream records which estimator produced its numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

from .errors import AlternationError

ESTIMATORS = ("bytes", "words")


def format_timestamp(ts: float) -> str:
    """Seconds to at most 3 decimals, trailing zeros dropped (12.300 -> 12.3)."""
    out = f"{ts:.3f}".rstrip("0").rstrip(".")
    return out if out else "0"


class _EventLike(Protocol):
    timestamp: float
    frame: int
    kind: str
    subject: str
    object: str


@dataclass(frozen=True)
class Narrative:
    lines: tuple[str, ...]
    estimated_tokens: int
    source_event_count: int

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


def event_line(e: _EventLike) -> str:
    verb = "STARTED" if e.kind == "START" else "ENDED"
    return (f"[t={format_timestamp(e.timestamp)}s, frame {e.frame}] "
            f"{e.subject} {verb} interacting with {e.object}.")


def verbalize(events: Sequence[_EventLike], estimator: str = "bytes") -> Narrative:
    """Render events (already in chronological order) as a narrative."""
    if events:
        t0 = format_timestamp(events[0].timestamp)
        t1 = format_timestamp(events[-1].timestamp)
        header = (f"Interaction log: {len(events)} events "
                  f"spanning t={t0}s to t={t1}s.")
        lines = [header] + [event_line(e) for e in events]
    else:
        lines = ["Interaction log: 0 events."]
    text = "\n".join(lines)
    return Narrative(lines=tuple(lines),
                     estimated_tokens=estimate_tokens(text, estimator),
                     source_event_count=len(events))


def estimate_tokens(text: str, estimator: str = "bytes") -> int:
    """Proxy token count: ceil(utf8 bytes / 4), or whitespace words."""
    if estimator == "bytes":
        return math.ceil(len(text.encode("utf-8")) / 4)
    if estimator == "words":
        return len(text.split())
    raise ValueError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")


@dataclass(frozen=True)
class Interval:
    """A paired START/END span for one (subject, object)."""

    subject: str
    object: str
    start_ts: float
    end_ts: float
    duration: float
    open: bool


def pair_intervals(events: Sequence[_EventLike]) -> tuple[Interval, ...]:
    """Match each START with the next END of the same pair.

    A trailing START without an END becomes an open interval ending at
    the last event's timestamp. Two STARTs or two ENDs in a row for one
    pair violate the alternation contract and raise.
    """
    if not events:
        return ()
    last_ts = events[-1].timestamp
    open_start: dict[tuple[str, str], float] = {}
    intervals: list[tuple[float, Interval]] = []
    for e in events:
        pair = (e.subject, e.object)
        if e.kind == "START":
            if pair in open_start:
                raise AlternationError(
                    f"two STARTs without END for {pair} at frame {e.frame}")
            open_start[pair] = e.timestamp
        elif e.kind == "END":
            if pair not in open_start:
                raise AlternationError(
                    f"END without START for {pair} at frame {e.frame}")
            start = open_start.pop(pair)
            intervals.append((start, Interval(
                subject=e.subject, object=e.object, start_ts=start,
                end_ts=e.timestamp, duration=e.timestamp - start, open=False)))
        else:
            raise AlternationError(f"unknown event kind {e.kind!r}")
    for pair, start in open_start.items():
        intervals.append((start, Interval(
            subject=pair[0], object=pair[1], start_ts=start, end_ts=last_ts,
            duration=last_ts - start, open=True)))
    intervals.sort(key=lambda item: item[0])
    return tuple(iv for _, iv in intervals)
