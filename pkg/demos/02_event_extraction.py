"""
From positions to START/END events
==================================

Two centroids within delta pixels of each other count as interacting.
The beta hysteresis keeps brief separations from ending an interaction:
an END fires only after beta+1 consecutive apart frames.
"""

from seg import ExtractionConfig, extract_events, parse_detection_log

# person-1 approaches cup-2, wobbles away for two frames, comes back,
# then leaves for good
positions = [
    (0, (100, 100)),
    (1, (380, 300)),   # close from here on (cup sits at 400,300)
    (2, (390, 300)),
    (3, (600, 300)),   # apart
    (4, (610, 300)),   # apart
    (5, (395, 300)),   # back
    (6, (390, 300)),
    (7, (900, 300)),   # gone
    (8, (900, 300)),
    (9, (900, 300)),
]

doc = {
    "video": {"path": "demo", "fps": 1.0, "width": 1000, "height": 600},
    "frames": [
        {"frame": f, "detections": [
            {"id": 1, "label": "person",
             "bbox": [x - 20, y - 20, x + 20, y + 20]},
            {"id": 2, "label": "cup", "bbox": [380, 280, 420, 320]},
        ]}
        for f, (x, y) in positions
    ],
}
log = parse_detection_log(doc)

for beta in (0, 3):
    events = extract_events(log, ExtractionConfig(delta=100.0, beta=beta))
    print(f"beta={beta}:")
    for e in events:
        print(f"  frame {e.frame}: {e.kind} {e.subject} / {e.object}")

# with beta=0 the two-frame wobble splits the visit in two; with beta=3
# it is bridged, and the final END lands on the last frame because the
# log runs out before the 4 apart frames needed to confirm a departure
