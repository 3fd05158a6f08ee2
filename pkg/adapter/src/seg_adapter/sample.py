"""Deterministic sample clip for demos and the integration test.

A red square (person) crosses the frame, lingers next to a static green
square (cup), then drifts off past a blue square (bowl) before everything
leaves the scene. Centroid distances are chosen around the default 100px
interaction threshold downstream.
"""

import math

import cv2
import numpy as np

WIDTH, HEIGHT = 320, 240

CUP_CENTER = (230.0, 120.0)
BOWL_CENTER = (60.0, 210.0)

RED_BGR = (0, 0, 230)
GREEN_BGR = (0, 230, 0)
BLUE_BGR = (230, 0, 0)


def _lerp(a: float, b: float, t: float) -> float:
    return a + (b - a) * t


def person_center(ts: float, seconds: float) -> tuple[float, float] | None:
    """Scripted trajectory; None once the person has left the scene."""
    blank_from = seconds - 1.0
    if ts >= blank_from:
        return None
    if ts < 3.0:
        t = ts / 3.0
        return (_lerp(40.0, 170.0, t), _lerp(60.0, 116.0, t))
    if ts < 8.0:
        # dwell ~60px from the cup: inside the 100px threshold, but the
        # rectangles stay separate so neither blob occludes the other
        return (170.0 + 4.0 * math.sin(ts * 2.0),
                116.0 + 3.0 * math.cos(ts * 2.0))
    t = (ts - 8.0) / (blank_from - 8.0)
    return (_lerp(170.0, 40.0, t), _lerp(116.0, 200.0, t))


def _rect(frame, center, half_w, half_h, color):
    cx, cy = center
    cv2.rectangle(frame, (int(cx - half_w), int(cy - half_h)),
                  (int(cx + half_w), int(cy + half_h)), color, -1)


def make_sample_clip(path: str, seconds: float = 12.0, fps: float = 10.0) -> str:
    """Write an MJPG .avi; the last second holds empty frames."""
    if seconds < 10.0:
        raise ValueError(f"sample clip must run >= 10s, got {seconds}")
    writer = cv2.VideoWriter(path, cv2.VideoWriter_fourcc(*"MJPG"), fps,
                             (WIDTH, HEIGHT))
    if not writer.isOpened():
        raise OSError(f"cannot open video writer for {path!r}")
    n_frames = int(round(seconds * fps))
    blank_from = seconds - 1.0
    for i in range(n_frames):
        ts = i / fps
        frame = np.zeros((HEIGHT, WIDTH, 3), np.uint8)
        if ts < blank_from:
            _rect(frame, CUP_CENTER, 18, 18, GREEN_BGR)
            _rect(frame, BOWL_CENTER, 20, 20, BLUE_BGR)
        center = person_center(ts, seconds)
        if center is not None:
            _rect(frame, center, 25, 22, RED_BGR)
        writer.write(frame)
    writer.release()
    return path
