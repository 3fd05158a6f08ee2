"""
Detection logs: the raw input format
====================================

A detection log is what a tracker hands us: per-frame bounding boxes with
persistent (label, track id) identities. Everything downstream works on
this one structure.
"""

from seg import detection_log_to_json, parse_detection_log

doc = {
    "video": {"path": "kitchen.mp4", "fps": 2.0, "width": 1280, "height": 720},
    "frames": [
        {"frame": 0, "detections": [
            {"id": 1, "label": "Person", "bbox": [100, 100, 160, 240]},
            {"id": 3, "label": "coffee cup", "bbox": [400, 300, 440, 340]},
        ]},
        {"frame": 1, "detections": [
            {"id": 1, "label": "Person", "bbox": [360, 120, 420, 260]},
            {"id": 3, "label": "coffee cup", "bbox": [400, 300, 440, 340]},
        ]},
        {"frame": 2, "detections": [
            {"id": 1, "label": "Person", "bbox": [380, 140, 440, 280]},
        ]},
    ],
}

log = parse_detection_log(doc)

# labels are normalized, so "Person" and "coffee cup" become stable ids
print("entities:", sorted(log.entities()))
print("frames:", log.n_frames, " span:", log.span(), "seconds")

# timestamps default to frame / fps when the log does not carry them
for fr in log.frames:
    positions = {d.entity_id: d.centroid for d in fr.detections}
    print(f"t={fr.timestamp}s", positions)

# round-trip back to JSON (this is the on-disk format `seg extract` reads)
print(detection_log_to_json(log)[:120], "...")
