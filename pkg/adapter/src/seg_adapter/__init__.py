"""Detector adapter: video files in, seg detection logs out."""

from .adapter import (DEVICE_ORDER, AdapterConfig, resolve_device,
                      run_adapter)
from .detector import (COLOR_BANDS, ColorBlobDetector, RawDetection,
                       load_detector)
from .errors import AdapterError
from .sample import make_sample_clip
from .tracker import CentroidTracker

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "COLOR_BANDS",
    "CentroidTracker",
    "ColorBlobDetector",
    "DEVICE_ORDER",
    "RawDetection",
    "load_detector",
    "make_sample_clip",
    "resolve_device",
    "run_adapter",
]
