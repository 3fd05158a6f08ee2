"""Frame-level detection.

The bundled detector finds saturated color blobs and maps each hue band to
a class label. It needs no downloaded weights, which keeps the adapter
fully self-contained; anything that turns a frame into labeled boxes can
replace it through ``load_detector``.
"""

from dataclasses import dataclass

import cv2
import numpy as np

from .errors import AdapterError

# hue bands in OpenCV HSV (H in 0..180); red wraps around 0
COLOR_BANDS: dict[str, tuple[tuple[tuple[int, int, int],
                                   tuple[int, int, int]], ...]] = {
    "person": (((0, 120, 120), (10, 255, 255)),
               ((170, 120, 120), (180, 255, 255))),
    "cup": (((50, 120, 120), (70, 255, 255)),),
    "bowl": (((110, 120, 120), (130, 255, 255)),),
}

# blob area at which confidence saturates; ~45x45 px
FULL_CONFIDENCE_AREA = 2000.0


@dataclass(frozen=True)
class RawDetection:
    """One untracked box: label, pixel bbox (x1, y1, x2, y2), confidence."""

    label: str
    bbox: tuple[float, float, float, float]
    confidence: float

    @property
    def centroid(self) -> tuple[float, float]:
        x1, y1, x2, y2 = self.bbox
        return ((x1 + x2) / 2.0, (y1 + y2) / 2.0)


class ColorBlobDetector:
    def __init__(self, confidence: float = 0.25, device: str = "cpu"):
        if not 0.0 < confidence < 1.0:
            raise AdapterError(f"confidence must be in (0,1), got {confidence}")
        self.confidence = confidence
        # a color mask has no weights to move; kept for interface parity
        self.device = device

    def detect(self, frame_bgr: np.ndarray) -> list[RawDetection]:
        hsv = cv2.cvtColor(frame_bgr, cv2.COLOR_BGR2HSV)
        found: list[RawDetection] = []
        for label, bands in COLOR_BANDS.items():
            mask = np.zeros(hsv.shape[:2], np.uint8)
            for lo, hi in bands:
                mask |= cv2.inRange(hsv, lo, hi)
            contours, _ = cv2.findContours(mask, cv2.RETR_EXTERNAL,
                                           cv2.CHAIN_APPROX_SIMPLE)
            for contour in contours:
                x, y, w, h = cv2.boundingRect(contour)
                conf = min(1.0, (w * h) / FULL_CONFIDENCE_AREA)
                if conf >= self.confidence:
                    found.append(RawDetection(
                        label=label,
                        bbox=(float(x), float(y), float(x + w), float(y + h)),
                        confidence=conf))
        found.sort(key=lambda d: (d.label, d.bbox))
        return found


def load_detector(model: str, confidence: float,
                  device: str = "cpu") -> ColorBlobDetector:
    if model == "color-blob":
        return ColorBlobDetector(confidence=confidence, device=device)
    raise AdapterError(f"unknown model {model!r}; available: color-blob")
