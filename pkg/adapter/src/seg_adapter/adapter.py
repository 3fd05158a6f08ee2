"""Video file -> detection-log JSON.

The output is the exact schema the `seg` package ingests: video metadata
plus per-frame detections with persistent integer ids. This module stops
at that boundary on purpose; events and graphs belong downstream.
"""

import json
from dataclasses import dataclass

import cv2

from .detector import load_detector
from .errors import AdapterError
from .tracker import CentroidTracker

DEVICE_ORDER = ("cuda", "mps", "cpu")


def resolve_device(preference: tuple[str, ...] = DEVICE_ORDER) -> str:
    """First available device in preference order; cpu always works."""
    for want in preference:
        if want == "cpu":
            return "cpu"
        if want in ("cuda", "mps") and _torch_has(want):
            return want
    return "cpu"


def _torch_has(kind: str) -> bool:
    try:
        import torch
    except ImportError:
        return False
    if kind == "cuda":
        return bool(torch.cuda.is_available())
    return bool(getattr(torch.backends, "mps", None)
                and torch.backends.mps.is_available())


@dataclass(frozen=True)
class AdapterConfig:
    video: str
    model: str = "color-blob"
    device_preference: tuple[str, ...] = DEVICE_ORDER
    stride: int = 1
    confidence: float = 0.25

    def __post_init__(self):
        if not (isinstance(self.stride, int)
                and not isinstance(self.stride, bool) and self.stride >= 1):
            raise ValueError(f"stride must be an integer >= 1, "
                             f"got {self.stride!r}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must be in (0,1), "
                             f"got {self.confidence!r}")


def run_adapter(cfg: AdapterConfig, out: str | None = None,
                annotate: str | None = None) -> dict:
    """Process the whole video; return (and optionally write) the log doc.

    Sampled frames keep their original indices, so timestamps stay
    frame/fps regardless of stride. A sampled frame with nothing in it
    still appears, with an empty detections array.
    """
    device = resolve_device(cfg.device_preference)
    detector = load_detector(cfg.model, cfg.confidence, device=device)
    tracker = CentroidTracker()

    cap = cv2.VideoCapture(cfg.video)
    if not cap.isOpened():
        raise AdapterError(f"cannot decode video {cfg.video!r}")
    fps = cap.get(cv2.CAP_PROP_FPS)
    if not fps or fps <= 0:
        cap.release()
        raise AdapterError(f"video {cfg.video!r} reports no frame rate")
    width = int(cap.get(cv2.CAP_PROP_FRAME_WIDTH))
    height = int(cap.get(cv2.CAP_PROP_FRAME_HEIGHT))

    writer = None
    if annotate is not None:
        writer = cv2.VideoWriter(annotate, cv2.VideoWriter_fourcc(*"MJPG"),
                                 fps / cfg.stride, (width, height))

    frames = []
    index = 0
    try:
        while True:
            ok, frame = cap.read()
            if not ok:
                break
            if index % cfg.stride == 0:
                tracked = tracker.update(detector.detect(frame))
                frames.append({
                    "frame": index,
                    "timestamp": index / fps,
                    "detections": [
                        {"id": tid, "label": det.label,
                         "bbox": list(det.bbox)}
                        for tid, det in tracked
                    ],
                })
                if writer is not None:
                    writer.write(_annotate(frame, tracked))
            index += 1
    finally:
        cap.release()
        if writer is not None:
            writer.release()

    if not frames:
        raise AdapterError(f"video {cfg.video!r} contains no frames")

    doc = {
        "video": {"path": cfg.video, "fps": fps,
                  "width": width, "height": height},
        "frames": frames,
    }
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return doc


def _annotate(frame, tracked):
    out = frame.copy()
    for tid, det in tracked:
        x1, y1, x2, y2 = (int(v) for v in det.bbox)
        cv2.rectangle(out, (x1, y1), (x2, y2), (255, 255, 255), 1)
        cv2.putText(out, f"{det.label}-{tid}", (x1, max(y1 - 4, 10)),
                    cv2.FONT_HERSHEY_SIMPLEX, 0.4, (255, 255, 255), 1)
    return out
