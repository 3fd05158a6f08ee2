"""Detection-log ingest: parsing, validation, and entity identity.

A detection log is the JSON hand-off between any detector/tracker and this
package::

    {
      "video": {"path": str, "fps": number, "width": int, "height": int},
      "frames": [
        {"frame": int, "timestamp": number,
         "detections": [{"id": int, "label": str,
                         "bbox": [x1, y1, x2, y2]}]}
      ]
    }

``timestamp`` may be omitted per frame, in which case it is derived as
``frame / fps``. Bounding boxes are pixel floats; centroids are kept in
floating point with no rounding. The unit of identity is the (label,
track id) pair, rendered canonically as ``<label>-<track_id>`` (for
example ``person-1``, ``cup-3``). Labels are lowercased, and whitespace
or hyphens inside a label become underscores so an entity id stays a
single query token and parses unambiguously at its final hyphen.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import FrameOrderError, IdentityConflictError, SchemaError

_ENTITY_ID_RE = re.compile(r"^([a-z0-9_]+)-([0-9]+)$")
_LABEL_JUNK_RE = re.compile(r"[\s-]+")


def normalize_label(label: str) -> str:
    """Canonical form of an object-class label.

    Lowercase, with runs of whitespace or hyphens collapsed to a single
    underscore (``"TV Monitor"`` -> ``"tv_monitor"``).
    """
    cleaned = _LABEL_JUNK_RE.sub("_", label.strip().lower()).strip("_")
    if not cleaned:
        raise ValueError(f"empty label after normalization: {label!r}")
    return cleaned


def make_entity_id(label: str, track_id: int) -> str:
    """Render the canonical entity id ``<label>-<track_id>``."""
    if track_id < 0:
        raise ValueError(f"track id must be non-negative, got {track_id}")
    return f"{normalize_label(label)}-{track_id}"


def parse_entity_id(text: str) -> tuple[str, int]:
    """Split a canonical entity id back into (label, track_id)."""
    m = _ENTITY_ID_RE.match(text)
    if m is None:
        raise ValueError(f"not a canonical entity id: {text!r}")
    return m.group(1), int(m.group(2))


def entity_class(entity_id: str) -> str:
    """The object-class component of a canonical entity id."""
    return parse_entity_id(entity_id)[0]


def centroid(bbox: tuple[float, float, float, float]) -> tuple[float, float]:
    """Arithmetic midpoint of an (x1, y1, x2, y2) box."""
    x1, y1, x2, y2 = bbox
    return ((x1 + x2) / 2.0, (y1 + y2) / 2.0)


@dataclass(frozen=True)
class Detection:
    """One tracked detection inside a frame."""

    track_id: int
    label: str
    bbox: tuple[float, float, float, float]

    @property
    def centroid(self) -> tuple[float, float]:
        return centroid(self.bbox)

    @property
    def entity_id(self) -> str:
        return f"{self.label}-{self.track_id}"


def entity_id(det: Detection) -> str:
    """Canonical entity id for a detection (label already normalized)."""
    return det.entity_id


@dataclass(frozen=True)
class FrameRecord:
    """All detections observed at one video frame."""

    frame: int
    timestamp: float
    detections: tuple[Detection, ...]


@dataclass(frozen=True)
class VideoMeta:
    path: str
    fps: float
    width: int
    height: int


@dataclass(frozen=True)
class DetectionLog:
    """A validated, immutable detection log.

    Frames are ordered by strictly increasing frame index; a parsed log is
    safe to share across threads.
    """

    video: VideoMeta
    frames: tuple[FrameRecord, ...]

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    def entities(self) -> set[str]:
        """All entity ids appearing anywhere in the log."""
        out: set[str] = set()
        for fr in self.frames:
            for det in fr.detections:
                out.add(det.entity_id)
        return out

    def span(self) -> float:
        """Timestamp of the last frame (0.0 for an empty log)."""
        return self.frames[-1].timestamp if self.frames else 0.0


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(path, message)


def _number(value: Any, path: str) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool),
            path, f"expected a number, got {type(value).__name__}")
    f = float(value)
    _expect(math.isfinite(f), path, "must be finite")
    return f


def _integer(value: Any, path: str) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool),
            path, f"expected an integer, got {type(value).__name__}")
    return value


def parse_detection_log(source: bytes | str | dict) -> DetectionLog:
    """Parse and validate a detection-log document.

    ``source`` may be raw JSON bytes/text or an already-decoded dict.
    Raises :class:`SchemaError` naming the offending path,
    :class:`IdentityConflictError` when one track id carries two labels,
    and :class:`FrameOrderError` for non-monotone frames or timestamps.
    """
    if isinstance(source, (bytes, str)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from exc
    else:
        doc = source
    _expect(isinstance(doc, dict), "$", "top level must be an object")

    video = doc.get("video")
    _expect(isinstance(video, dict), "video", "missing or not an object")
    path = video.get("path", "")
    _expect(isinstance(path, str), "video.path", "expected a string")
    fps = _number(video.get("fps"), "video.fps")
    _expect(fps > 0, "video.fps", "must be > 0")
    width = _integer(video.get("width"), "video.width")
    height = _integer(video.get("height"), "video.height")
    _expect(width > 0, "video.width", "must be > 0")
    _expect(height > 0, "video.height", "must be > 0")
    meta = VideoMeta(path=path, fps=fps, width=width, height=height)

    raw_frames = doc.get("frames")
    _expect(isinstance(raw_frames, list), "frames", "missing or not an array")

    label_by_track: dict[int, str] = {}
    frames: list[FrameRecord] = []
    prev_frame = -1
    prev_ts = -math.inf
    for i, raw in enumerate(raw_frames):
        fpath = f"frames[{i}]"
        _expect(isinstance(raw, dict), fpath, "expected an object")
        frame_idx = _integer(raw.get("frame"), f"{fpath}.frame")
        _expect(frame_idx >= 0, f"{fpath}.frame", "must be >= 0")
        if frame_idx <= prev_frame:
            raise FrameOrderError(
                f"{fpath}.frame: index {frame_idx} not greater than previous {prev_frame}"
            )
        if "timestamp" in raw:
            ts = _number(raw["timestamp"], f"{fpath}.timestamp")
            _expect(ts >= 0, f"{fpath}.timestamp", "must be >= 0")
        else:
            ts = frame_idx / fps
        if ts < prev_ts:
            raise FrameOrderError(
                f"{fpath}.timestamp: {ts} decreases from previous {prev_ts}"
            )

        raw_dets = raw.get("detections")
        _expect(isinstance(raw_dets, list), f"{fpath}.detections",
                "missing or not an array")
        dets: list[Detection] = []
        seen_ids: set[str] = set()
        for j, rd in enumerate(raw_dets):
            dpath = f"{fpath}.detections[{j}]"
            _expect(isinstance(rd, dict), dpath, "expected an object")
            track = _integer(rd.get("id"), f"{dpath}.id")
            _expect(track >= 0, f"{dpath}.id", "must be >= 0")
            raw_label = rd.get("label")
            _expect(isinstance(raw_label, str) and raw_label.strip() != "",
                    f"{dpath}.label", "expected a non-empty string")
            try:
                label = normalize_label(raw_label)
            except ValueError:
                raise SchemaError(f"{dpath}.label",
                                  f"label {raw_label!r} is empty after normalization")
            bbox_raw = rd.get("bbox")
            _expect(isinstance(bbox_raw, list) and len(bbox_raw) == 4,
                    f"{dpath}.bbox", "expected an array of 4 numbers")
            x1, y1, x2, y2 = (_number(v, f"{dpath}.bbox[{k}]")
                              for k, v in enumerate(bbox_raw))
            _expect(x1 <= x2, f"{dpath}.bbox", f"x1 {x1} > x2 {x2}")
            _expect(y1 <= y2, f"{dpath}.bbox", f"y1 {y1} > y2 {y2}")

            known = label_by_track.get(track)
            if known is not None and known != label:
                raise IdentityConflictError(
                    f"{dpath}: track {track} labeled {label!r} but "
                    f"previously {known!r}"
                )
            label_by_track[track] = label

            det = Detection(track_id=track, label=label, bbox=(x1, y1, x2, y2))
            if det.entity_id in seen_ids:
                raise SchemaError(dpath,
                                  f"entity {det.entity_id} appears twice in frame {frame_idx}")
            seen_ids.add(det.entity_id)
            dets.append(det)

        frames.append(FrameRecord(frame=frame_idx, timestamp=ts,
                                  detections=tuple(dets)))
        prev_frame = frame_idx
        prev_ts = ts

    return DetectionLog(video=meta, frames=tuple(frames))


def render_detection_log(log: DetectionLog) -> dict:
    """Plain-dict form of a log, matching the on-disk schema exactly."""
    return {
        "video": {
            "path": log.video.path,
            "fps": log.video.fps,
            "width": log.video.width,
            "height": log.video.height,
        },
        "frames": [
            {
                "frame": fr.frame,
                "timestamp": fr.timestamp,
                "detections": [
                    {"id": d.track_id, "label": d.label, "bbox": list(d.bbox)}
                    for d in fr.detections
                ],
            }
            for fr in log.frames
        ],
    }


def detection_log_to_json(log: DetectionLog) -> str:
    return json.dumps(render_detection_log(log), indent=2) + "\n"


def load_detection_log(path: str) -> DetectionLog:
    with open(path, "rb") as fh:
        return parse_detection_log(fh.read())


def iter_detections(log: DetectionLog) -> Iterable[tuple[FrameRecord, Detection]]:
    for fr in log.frames:
        for det in fr.detections:
            yield fr, det
