"""Persistent identities over per-frame detections.

Greedy nearest-centroid matching, scoped per label so a cup is never
matched to a person track. Track ids are unique across labels and never
reused; a track that goes unseen simply waits at its last position.
"""

import math

from .detector import RawDetection


class CentroidTracker:
    def __init__(self, max_distance: float = 150.0):
        if max_distance <= 0:
            raise ValueError(f"max_distance must be > 0, got {max_distance}")
        self.max_distance = max_distance
        self._positions: dict[int, tuple[float, float]] = {}
        self._labels: dict[int, str] = {}
        self._next_id = 1

    def update(self, detections: list[RawDetection]) \
            -> list[tuple[int, RawDetection]]:
        """Assign a track id to every detection, in detection order."""
        candidates = []
        for i, det in enumerate(detections):
            for tid, pos in self._positions.items():
                if self._labels[tid] != det.label:
                    continue
                dist = math.dist(det.centroid, pos)
                if dist <= self.max_distance:
                    candidates.append((dist, i, tid))
        candidates.sort()

        assigned: dict[int, int] = {}
        used_tracks: set[int] = set()
        for dist, i, tid in candidates:
            if i in assigned or tid in used_tracks:
                continue
            assigned[i] = tid
            used_tracks.add(tid)

        out = []
        for i, det in enumerate(detections):
            tid = assigned.get(i)
            if tid is None:
                tid = self._next_id
                self._next_id += 1
                self._labels[tid] = det.label
            self._positions[tid] = det.centroid
            out.append((tid, det))
        return out
