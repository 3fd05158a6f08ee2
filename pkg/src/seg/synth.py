"""Synthetic detection logs with planted, provable ground truth.

A scenario places every entity at a fixed home on a wide grid (800px
spacing). During a planted interaction the object entity sits within
10px of its subject's home; during a planted gap run it jumps 400px
away; at all other times everyone stays home. Per-frame positions get a
bounded radial jitter (norm <= jitter). The margins are deliberate:
interacting pairs stay within 50px, everything else stays beyond 300px,
so against the 100px extraction radius no boundary case can flip under
jitter up to 20px.

Because geometry is controlled, the expected START/END stream is
computable without running the extractor: per pair, take the planted
close-frame set, merge runs separated by gaps of at most beta, emit
START at each run's first frame and END at the (beta+1)-th apart frame
after it (or at the final frame when the log ends first). That plan is
the independent oracle the extraction tests compare against, and the
source of the generated QA pairs, so every answer is derivable from the
gold events alone.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .detlog import Detection, DetectionLog, FrameRecord, VideoMeta
from .errors import InfeasibleSpecError, SchemaError
from .events import InteractionEvent, events_to_json
from .narrative import format_timestamp

OBJECT_LABELS = ("cup", "bowl", "plate", "book", "phone",
                 "bottle", "laptop", "remote", "ball", "box")

CATEGORIES = ("ordering", "interaction", "duration", "causal")

_PERSON_HALF = (30.0, 70.0)
_OBJECT_HALF = (20.0, 20.0)
_GRID = 800.0
_VISIT_MAX = 10.0
_GAP_OFFSET = (400.0, 0.0)


@dataclass(frozen=True)
class PlantedInteraction:
    """One intended interaction: subject and object close over a frame span.

    gap_runs lists (frame, length) stretches strictly inside the span
    where the pair is pushed far apart, for exercising hysteresis.
    """

    subject: str
    object: str
    start_frame: int
    end_frame: int
    gap_runs: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class QAItem:
    question: str
    answer: str
    category: str


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    n_entities: int
    n_people: int
    duration: int
    fps: float
    planted: tuple[PlantedInteraction, ...]
    jitter: float = 10.0
    beta: int = 5


@dataclass(frozen=True)
class GeneratedScenario:
    spec: ScenarioSpec
    log: DetectionLog
    gold_events: tuple[InteractionEvent, ...]
    qa: tuple[QAItem, ...]


def entity_universe(spec: ScenarioSpec) -> tuple[tuple[str, str], ...]:
    """(entity_id, label) for every entity: people first, then objects."""
    out = [(f"person-{i}", "person") for i in range(1, spec.n_people + 1)]
    for k in range(spec.n_entities - spec.n_people):
        label = OBJECT_LABELS[k % len(OBJECT_LABELS)]
        out.append((f"{label}-{spec.n_people + 1 + k}", label))
    return tuple(out)


def _canonical_plant(p: PlantedInteraction) -> PlantedInteraction:
    """Put the focus entity first; among two people, the lower track id."""
    s_person = p.subject.startswith("person-")
    o_person = p.object.startswith("person-")
    if not s_person and not o_person:
        raise InfeasibleSpecError(
            f"plant {p.subject}/{p.object} involves no person")
    swap = (not s_person and o_person) or (
        s_person and o_person
        and int(p.subject.rsplit("-", 1)[1]) > int(p.object.rsplit("-", 1)[1]))
    if swap:
        return PlantedInteraction(subject=p.object, object=p.subject,
                                  start_frame=p.start_frame,
                                  end_frame=p.end_frame, gap_runs=p.gap_runs)
    return p


def validate_spec(spec: ScenarioSpec) -> tuple[PlantedInteraction, ...]:
    """Check feasibility and return plants in canonical role order."""
    if spec.n_people < 1:
        raise InfeasibleSpecError("need at least one person")
    if spec.n_entities < spec.n_people:
        raise InfeasibleSpecError("n_entities smaller than n_people")
    if spec.duration < 1:
        raise InfeasibleSpecError("duration must be at least one frame")
    if spec.fps <= 0:
        raise InfeasibleSpecError("fps must be positive")
    if not (0.0 <= spec.jitter <= 20.0):
        raise InfeasibleSpecError("jitter must be within [0, 20] px")
    if spec.beta < 0:
        raise InfeasibleSpecError("beta must be non-negative")

    known = {eid for eid, _ in entity_universe(spec)}
    plants: list[PlantedInteraction] = []
    for p in spec.planted:
        if p.subject == p.object:
            raise InfeasibleSpecError(f"plant pairs {p.subject} with itself")
        for eid in (p.subject, p.object):
            if eid not in known:
                raise InfeasibleSpecError(f"plant references unknown entity {eid}")
        if not (0 <= p.start_frame < p.end_frame < spec.duration):
            raise InfeasibleSpecError(
                f"plant span [{p.start_frame}, {p.end_frame}] outside "
                f"0..{spec.duration - 1}")
        for gf, glen in p.gap_runs:
            if glen < 1:
                raise InfeasibleSpecError("gap run length must be >= 1")
            if not (p.start_frame < gf and gf + glen - 1 < p.end_frame):
                raise InfeasibleSpecError(
                    f"gap run ({gf}, {glen}) not strictly inside "
                    f"[{p.start_frame}, {p.end_frame}]")
        plants.append(_canonical_plant(p))

    # Overlapping plants may not share an entity: a shared member would
    # have to be in two places, or would co-locate two visitors and
    # create interactions nobody planted.
    for i in range(len(plants)):
        for j in range(i + 1, len(plants)):
            a, b = plants[i], plants[j]
            if a.start_frame <= b.end_frame and b.start_frame <= a.end_frame:
                shared = {a.subject, a.object} & {b.subject, b.object}
                if shared:
                    raise InfeasibleSpecError(
                        f"plants {i} and {j} overlap in time and share "
                        f"{sorted(shared)}")
    return tuple(plants)


def _close_positions(plant: PlantedInteraction) -> set[int]:
    pos = set(range(plant.start_frame, plant.end_frame + 1))
    for gf, glen in plant.gap_runs:
        pos -= set(range(gf, gf + glen))
    return pos


def interval_oracle(close_positions: Sequence[int], last_position: int,
                    beta: int) -> list[tuple[int, int, bool]]:
    """Expected (start_pos, end_pos, ended_by_log_end) spans for one pair.

    Positions index log records. Runs of close positions separated by at
    most beta apart positions merge into one span; the END lands on the
    (beta+1)-th apart position after the merged run, or on the final
    position when the log runs out first.
    """
    if not close_positions:
        return []
    ordered = sorted(set(close_positions))
    groups: list[tuple[int, int]] = []
    g0 = prev = ordered[0]
    for p in ordered[1:]:
        if p - prev - 1 > beta:
            groups.append((g0, prev))
            g0 = p
        prev = p
    groups.append((g0, prev))

    out = []
    for g0, g1 in groups:
        confirm = g1 + beta + 1
        if confirm <= last_position:
            out.append((g0, confirm, False))
        else:
            out.append((g0, last_position, True))
    return out


def plan_gold_events(spec: ScenarioSpec) -> tuple[InteractionEvent, ...]:
    """Derive the expected event stream from the plan alone (no pixels).

    Emission order replicates the extractor: within a frame, pairs in
    sorted order; end-of-log closures after everything else at the final
    frame.
    """
    plants = validate_spec(spec)
    by_pair: dict[tuple[str, str], set[int]] = {}
    for p in plants:
        by_pair.setdefault((p.subject, p.object), set()).update(_close_positions(p))

    last = spec.duration - 1
    # (position, closure_phase, subject, object, kind)
    boundary: list[tuple[int, int, str, str, str]] = []
    for (subj, obj), close in by_pair.items():
        for start, end, closed_by_eol in interval_oracle(sorted(close), last,
                                                         spec.beta):
            boundary.append((start, 0, subj, obj, "START"))
            boundary.append((end, 1 if closed_by_eol else 0, subj, obj, "END"))
    boundary.sort()

    events = []
    for seq, (pos, _, subj, obj, kind) in enumerate(boundary):
        events.append(InteractionEvent(timestamp=pos / spec.fps, frame=pos,
                                       kind=kind, subject=subj, object=obj,
                                       seq=seq))
    return tuple(events)


def _home_grid(n: int) -> np.ndarray:
    cols = max(1, math.ceil(math.sqrt(n)))
    homes = np.empty((n, 2), dtype=np.float64)
    for k in range(n):
        homes[k, 0] = 100.0 + _GRID * (k % cols)
        homes[k, 1] = 100.0 + _GRID * (k // cols)
    return homes


def generate_log(spec: ScenarioSpec) -> DetectionLog:
    """Render the scenario into a detection log (all entities, every frame)."""
    plants = validate_spec(spec)
    universe = entity_universe(spec)
    index = {eid: k for k, (eid, _) in enumerate(universe)}
    n = len(universe)
    homes = _home_grid(n)

    rng = np.random.default_rng(spec.seed)
    visit_angle = rng.uniform(0.0, 2.0 * math.pi, size=len(plants))
    visit_radius = rng.uniform(0.0, _VISIT_MAX, size=len(plants))
    jit_angle = rng.uniform(0.0, 2.0 * math.pi, size=(spec.duration, n))
    jit_radius = rng.uniform(0.0, spec.jitter, size=(spec.duration, n))

    pos = np.empty((spec.duration, n, 2), dtype=np.float64)
    pos[:] = homes[None, :, :]
    for k, p in enumerate(plants):
        host = homes[index[p.subject]]
        visitor = index[p.object]
        offset = np.array([visit_radius[k] * math.cos(visit_angle[k]),
                           visit_radius[k] * math.sin(visit_angle[k])])
        pos[p.start_frame:p.end_frame + 1, visitor] = host + offset
        for gf, glen in p.gap_runs:
            pos[gf:gf + glen, visitor] = host + np.array(_GAP_OFFSET)
    pos[:, :, 0] += jit_radius * np.cos(jit_angle)
    pos[:, :, 1] += jit_radius * np.sin(jit_angle)

    halves = np.array([_PERSON_HALF if label == "person" else _OBJECT_HALF
                       for _, label in universe])
    tracks = [int(eid.rsplit("-", 1)[1]) for eid, _ in universe]
    labels = [label for _, label in universe]

    frames = []
    for f in range(spec.duration):
        dets = []
        for k in range(n):
            cx, cy = pos[f, k]
            hx, hy = halves[k]
            dets.append(Detection(track_id=tracks[k], label=labels[k],
                                  bbox=(cx - hx, cy - hy, cx + hx, cy + hy)))
        frames.append(FrameRecord(frame=f, timestamp=f / spec.fps,
                                  detections=tuple(dets)))

    width = int(homes[:, 0].max() + 700)
    height = int(homes[:, 1].max() + 700)
    meta = VideoMeta(path=f"synthetic://seed-{spec.seed}", fps=spec.fps,
                     width=width, height=height)
    return DetectionLog(video=meta, frames=tuple(frames))


def plan_qa(gold: Sequence[InteractionEvent]) -> tuple[QAItem, ...]:
    """Derive the QA set from gold events alone.

    Four templates, one category each: first start time (ordering),
    first stop time (interaction), total interaction time (duration),
    and the next partner after an ending (causal).
    """
    pairs: dict[tuple[str, str], list[InteractionEvent]] = {}
    for e in gold:
        pairs.setdefault((e.subject, e.object), []).append(e)

    ordering, interaction, duration, causal = [], [], [], []
    for (subj, obj) in sorted(pairs):
        evs = pairs[(subj, obj)]
        first_start = next(e for e in evs if e.kind == "START")
        first_end = next(e for e in evs if e.kind == "END")
        ordering.append(QAItem(
            question=f"When did {subj} first start interacting with {obj}?",
            answer=f"t={format_timestamp(first_start.timestamp)}s",
            category="ordering"))
        interaction.append(QAItem(
            question=f"When did {subj} first stop interacting with {obj}?",
            answer=f"t={format_timestamp(first_end.timestamp)}s",
            category="interaction"))

        total = 0.0
        start_ts: float | None = None
        for e in evs:
            if e.kind == "START":
                start_ts = e.timestamp
            elif start_ts is not None:
                total += e.timestamp - start_ts
                start_ts = None
        duration.append(QAItem(
            question=f"For how long did {subj} interact with {obj} in total?",
            answer=f"{format_timestamp(total)}s",
            category="duration"))

        end_seq = first_end.seq
        following = next((e for e in gold
                          if e.seq > end_seq and e.kind == "START"
                          and e.subject == subj), None)
        if following is not None:
            causal.append(QAItem(
                question=(f"What did {subj} start interacting with "
                          f"right after ending with {obj}?"),
                answer=following.object,
                category="causal"))

    return tuple(ordering + interaction + duration + causal)


def generate(spec: ScenarioSpec) -> GeneratedScenario:
    """Log, gold events, and QA for one scenario; deterministic per seed."""
    gold = plan_gold_events(spec)
    log = generate_log(spec)
    return GeneratedScenario(spec=spec, log=log, gold_events=gold,
                             qa=plan_qa(gold))


def qa_to_json(qa: Sequence[QAItem]) -> str:
    return json.dumps([{"question": q.question, "answer": q.answer,
                        "category": q.category} for q in qa], indent=2) + "\n"


def qa_from_json(source: bytes | str) -> tuple[QAItem, ...]:
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise SchemaError("$", "QA set must be a JSON array")
    items = []
    for i, rec in enumerate(doc):
        if not isinstance(rec, dict):
            raise SchemaError(f"[{i}]", "expected an object")
        for key in ("question", "answer", "category"):
            if not isinstance(rec.get(key), str):
                raise SchemaError(f"[{i}].{key}", "missing or not a string")
        if rec["category"] not in CATEGORIES:
            raise SchemaError(f"[{i}].category",
                              f"expected one of {CATEGORIES}, got {rec['category']!r}")
        items.append(QAItem(question=rec["question"], answer=rec["answer"],
                            category=rec["category"]))
    return tuple(items)


def write_scenario(scn: GeneratedScenario, out_dir: str) -> dict[str, str]:
    """Write detections.json, gold_events.json, qa.json; returns the paths."""
    from .detlog import detection_log_to_json
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "detections": os.path.join(out_dir, "detections.json"),
        "gold_events": os.path.join(out_dir, "gold_events.json"),
        "qa": os.path.join(out_dir, "qa.json"),
    }
    with open(paths["detections"], "w", encoding="utf-8") as fh:
        fh.write(detection_log_to_json(scn.log))
    with open(paths["gold_events"], "w", encoding="utf-8") as fh:
        fh.write(events_to_json(scn.gold_events))
    with open(paths["qa"], "w", encoding="utf-8") as fh:
        fh.write(qa_to_json(scn.qa))
    return paths


def _sequential_plants(person: str, objects: Sequence[str], *,
                       first_start: int = 10, length: int = 40,
                       stride: int = 70) -> list[PlantedInteraction]:
    plants = []
    for j, obj in enumerate(objects):
        start = first_start + j * stride
        plants.append(PlantedInteraction(subject=person, object=obj,
                                         start_frame=start,
                                         end_frame=start + length - 1))
    return plants


def standard_scenario(seed: int = 0) -> ScenarioSpec:
    """The reference workload: 12 people, 5 objects each, fps 5, 600 frames.

    Every person visits their five objects one after another early in the
    video, so the final 30 seconds are quiet. 120 gold events, 228 QA.
    """
    n_people = 12
    per_person = 5
    n_entities = n_people + n_people * per_person
    plants: list[PlantedInteraction] = []
    for i in range(1, n_people + 1):
        base = n_people + 1 + (i - 1) * per_person
        objects = []
        for j in range(per_person):
            k = (i - 1) * per_person + j
            objects.append(f"{OBJECT_LABELS[k % len(OBJECT_LABELS)]}-{base + j}")
        plants.extend(_sequential_plants(f"person-{i}", objects))
    return ScenarioSpec(seed=seed, n_entities=n_entities, n_people=n_people,
                        duration=600, fps=5.0, planted=tuple(plants),
                        jitter=10.0, beta=5)


def heavy_scenario(seed: int = 0) -> ScenarioSpec:
    """A 350-event workload: one busy person among 31 background people.

    person-1 visits 20 objects; each other person visits 5. Sized so an
    anchored query touching person-1 keeps 40 of 350 events.
    """
    n_people = 32
    star_objects = 20
    per_person = 5
    n_objects = star_objects + (n_people - 1) * per_person
    n_entities = n_people + n_objects

    plants: list[PlantedInteraction] = []
    base = n_people + 1
    star_ids = []
    for k in range(star_objects):
        star_ids.append(f"{OBJECT_LABELS[k % len(OBJECT_LABELS)]}-{base + k}")
    plants.extend(_sequential_plants("person-1", star_ids))
    base += star_objects
    for i in range(2, n_people + 1):
        objects = []
        for j in range(per_person):
            k = star_objects + (i - 2) * per_person + j
            objects.append(f"{OBJECT_LABELS[k % len(OBJECT_LABELS)]}-{base + (i - 2) * per_person + j}")
        plants.extend(_sequential_plants(f"person-{i}", objects))
    return ScenarioSpec(seed=seed, n_entities=n_entities, n_people=n_people,
                        duration=1400, fps=5.0, planted=tuple(plants),
                        jitter=10.0, beta=5)


def tiny_scenario(seed: int = 0) -> ScenarioSpec:
    """A quick smoke workload: 2 people, 4 objects, 120 frames."""
    plants = (
        _sequential_plants("person-1", ("cup-3", "bowl-4"), length=25, stride=40)
        + _sequential_plants("person-2", ("plate-5", "book-6"),
                             first_start=20, length=25, stride=40))
    return ScenarioSpec(seed=seed, n_entities=6, n_people=2, duration=120,
                        fps=5.0, planted=tuple(plants), jitter=10.0, beta=5)


_FUZZ_FPS = (2.0, 4.0, 5.0, 10.0, 25.0)


def random_spec(seed: int) -> ScenarioSpec:
    """A small random-but-feasible scenario for fuzzing the extractor.

    Every 100th seed scales up to stress larger casts and longer logs.
    Plants are rejection-sampled so no two overlapping plants share an
    entity, keeping the geometry unambiguous.
    """
    rng = np.random.default_rng(seed ^ 0x5EED)
    big = seed % 100 == 99
    n_people = int(rng.integers(1, 4)) if not big else int(rng.integers(3, 8))
    n_objects = int(rng.integers(2, 9)) if not big else int(rng.integers(20, 45))
    duration = int(rng.integers(40, 221)) if not big else int(rng.integers(800, 2001))
    fps = float(_FUZZ_FPS[int(rng.integers(0, len(_FUZZ_FPS)))])
    beta = int(rng.integers(0, 8))
    jitter = float(rng.uniform(0.0, 15.0))
    n_entities = n_people + n_objects

    universe = [f"person-{i}" for i in range(1, n_people + 1)]
    for k in range(n_objects):
        universe.append(f"{OBJECT_LABELS[k % len(OBJECT_LABELS)]}-{n_people + 1 + k}")

    plants: list[PlantedInteraction] = []
    attempts = int(rng.integers(1, 7)) if not big else int(rng.integers(6, 15))
    for _ in range(attempts):
        subj = universe[int(rng.integers(0, n_people))]
        obj = universe[int(rng.integers(0, n_entities))]
        if subj == obj:
            continue
        start = int(rng.integers(0, duration - 2))
        length = int(rng.integers(2, min(60, duration - start) + 1))
        end = start + length - 1
        clash = False
        for p in plants:
            if p.start_frame <= end and start <= p.end_frame:
                if {subj, obj} & {p.subject, p.object}:
                    clash = True
                    break
        if clash:
            continue
        gap_runs: list[tuple[int, int]] = []
        if length >= 5 and rng.random() < 0.6:
            for _ in range(int(rng.integers(1, 3))):
                glen = int(rng.integers(1, beta + 4))
                lo, hi = start + 1, end - glen
                if lo > hi:
                    continue
                gf = int(rng.integers(lo, hi + 1))
                ok = all(gf + glen - 1 < g0 or g0 + gl - 1 < gf
                         for g0, gl in gap_runs)
                if ok:
                    gap_runs.append((gf, glen))
        plants.append(PlantedInteraction(subject=subj, object=obj,
                                         start_frame=start, end_frame=end,
                                         gap_runs=tuple(sorted(gap_runs))))

    return ScenarioSpec(seed=seed, n_entities=n_entities, n_people=n_people,
                        duration=duration, fps=fps, planted=tuple(plants),
                        jitter=jitter, beta=beta)
