"""Shared builders for test fixtures."""

from __future__ import annotations

from seg.detlog import Detection, DetectionLog, FrameRecord, VideoMeta
from seg.events import InteractionEvent


def det(track_id: int, label: str, cx: float, cy: float,
        half: float = 20.0) -> Detection:
    return Detection(track_id=track_id, label=label,
                     bbox=(cx - half, cy - half, cx + half, cy + half))


def make_log(frames: list[tuple[int, list[Detection]]],
             fps: float = 1.0) -> DetectionLog:
    """Build a log from (frame_index, detections) pairs; ts = frame/fps."""
    recs = tuple(FrameRecord(frame=f, timestamp=f / fps, detections=tuple(dets))
                 for f, dets in frames)
    return DetectionLog(video=VideoMeta(path="test://clip", fps=fps,
                                        width=2000, height=2000),
                        frames=recs)


def two_entity_log(close_frames: set[int], n_frames: int,
                   first_frame: int = 1, fps: float = 1.0,
                   absent_frames: set[int] | None = None) -> DetectionLog:
    """person-1 and cup-3: near when frame in close_frames, far otherwise."""
    absent = absent_frames or set()
    frames = []
    for f in range(first_frame, first_frame + n_frames):
        dets = [det(1, "person", 100.0, 100.0)]
        if f not in absent:
            if f in close_frames:
                dets.append(det(3, "cup", 130.0, 140.0))
            else:
                dets.append(det(3, "cup", 900.0, 900.0))
        frames.append((f, dets))
    return make_log(frames, fps=fps)


def ev(kind: str, subject: str, obj: str, frame: int, seq: int,
       ts: float | None = None) -> InteractionEvent:
    return InteractionEvent(timestamp=frame * 1.0 if ts is None else ts,
                            frame=frame, kind=kind, subject=subject,
                            object=obj, seq=seq)


def star_events() -> list[InteractionEvent]:
    """person-1 interacts twice with bowl-2 and once with cup-3: 6 events."""
    return [
        ev("START", "person-1", "cup-3", 2, 0),
        ev("END", "person-1", "cup-3", 10, 1),
        ev("START", "person-1", "bowl-2", 12, 2),
        ev("END", "person-1", "bowl-2", 20, 3),
        ev("START", "person-1", "bowl-2", 30, 4),
        ev("END", "person-1", "bowl-2", 38, 5),
    ]
