import json

import numpy as np
import pytest

from seg.errors import SchemaError
from seg.events import (ExtractionConfig, InteractionEvent, canonical_roles,
                        events_from_json, events_to_json, extract_events,
                        pair_distance)

from helpers import det, make_log, two_entity_log
from oracles import oracle_close_pairs, oracle_events

CLOSE = set(range(2, 8)) | set(range(11, 16))


def kinds_and_frames(events):
    return [(e.kind, e.frame) for e in events]


class TestConfig:
    def test_defaults(self):
        cfg = ExtractionConfig()
        assert (cfg.delta, cfg.beta, cfg.focus_class) == (100.0, 5, "person")

    @pytest.mark.parametrize("kwargs", [
        {"delta": 0.0}, {"delta": -5.0}, {"delta": float("nan")},
        {"beta": -1}, {"beta": 1.5}, {"focus_class": "  "},
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            ExtractionConfig(**kwargs)

    def test_focus_class_normalized(self):
        assert ExtractionConfig(focus_class="Person").focus_class == "person"


class TestProximity:
    def test_distance_is_euclidean(self):
        a = det(1, "person", 0.0, 0.0)
        b = det(2, "cup", 60.0, 80.0)
        assert pair_distance(a, b) == 100.0

    def test_threshold_is_inclusive(self):
        # centroids exactly 100px apart still interact
        log = make_log([(0, [det(1, "person", 0.0, 0.0),
                             det(3, "cup", 60.0, 80.0)])])
        events = extract_events(log)
        assert kinds_and_frames(events) == [("START", 0), ("END", 0)]

    def test_just_past_threshold_is_apart(self):
        log = make_log([(0, [det(1, "person", 0.0, 0.0),
                             det(3, "cup", 60.0, 80.25)])])
        assert extract_events(log) == ()

    def test_non_focus_pairs_ignored(self):
        log = make_log([(0, [det(3, "cup", 0.0, 0.0),
                             det(4, "bowl", 1.0, 0.0)])])
        assert extract_events(log) == ()

    def test_focus_class_configurable(self):
        log = make_log([(0, [det(3, "cup", 0.0, 0.0),
                             det(4, "bowl", 1.0, 0.0)])])
        events = extract_events(log, ExtractionConfig(focus_class="cup"))
        assert [(e.subject, e.object) for e in events] == [("cup-3", "bowl-4")] * 2


class TestRoles:
    def test_focus_entity_is_subject(self):
        cfg = ExtractionConfig()
        assert canonical_roles("cup-3", "person-1", cfg) == ("person-1", "cup-3")
        assert canonical_roles("person-1", "cup-3", cfg) == ("person-1", "cup-3")

    def test_two_focus_entities_lower_track_leads(self):
        cfg = ExtractionConfig()
        assert canonical_roles("person-9", "person-2", cfg) == ("person-2", "person-9")

    def test_neither_focus_rejected(self):
        with pytest.raises(ValueError):
            canonical_roles("cup-3", "bowl-4", ExtractionConfig())

    def test_extraction_orders_person_pair(self):
        log = make_log([(0, [det(7, "person", 0.0, 0.0),
                             det(2, "person", 10.0, 0.0)])])
        events = extract_events(log)
        assert (events[0].subject, events[0].object) == ("person-2", "person-7")


class TestHysteresis:
    """One pair close on frames 2-7 and 11-15 of a 20-frame stream."""

    def test_beta_5_rides_through_both_gaps(self):
        log = two_entity_log(CLOSE, 20)
        events = extract_events(log, ExtractionConfig(beta=5))
        assert kinds_and_frames(events) == [("START", 2), ("END", 20)]

    def test_beta_2_splits_at_confirmation_frames(self):
        log = two_entity_log(CLOSE, 20)
        events = extract_events(log, ExtractionConfig(beta=2))
        assert kinds_and_frames(events) == [
            ("START", 2), ("END", 10), ("START", 11), ("END", 18)]

    def test_fixture_agrees_with_oracle(self):
        log = two_entity_log(CLOSE, 20)
        for beta in range(0, 8):
            cfg = ExtractionConfig(beta=beta)
            assert extract_events(log, cfg) == oracle_events(log, cfg)

    def test_beta_0_ends_on_first_apart_frame(self):
        log = two_entity_log({2, 3, 4}, 10)
        events = extract_events(log, ExtractionConfig(beta=0))
        assert kinds_and_frames(events) == [("START", 2), ("END", 5)]

    def test_gap_of_exactly_beta_merges(self):
        log = two_entity_log({1, 2, 6, 7}, 12)
        events = extract_events(log, ExtractionConfig(beta=3))
        assert kinds_and_frames(events) == [("START", 1), ("END", 11)]

    def test_gap_of_beta_plus_one_splits(self):
        log = two_entity_log({1, 2, 7, 8}, 14)
        events = extract_events(log, ExtractionConfig(beta=3))
        assert kinds_and_frames(events) == [
            ("START", 1), ("END", 6), ("START", 7), ("END", 12)]

    def test_absence_counts_as_apart(self):
        log = two_entity_log({1, 2, 3, 4, 5, 6, 7, 8}, 12,
                             absent_frames={4, 5, 6, 7, 8, 9, 10})
        events = extract_events(log, ExtractionConfig(beta=2))
        assert kinds_and_frames(events) == [("START", 1), ("END", 6)]

    def test_open_interaction_closed_at_final_frame(self):
        log = two_entity_log({8, 9, 10}, 10)
        events = extract_events(log, ExtractionConfig(beta=5))
        assert kinds_and_frames(events) == [("START", 8), ("END", 10)]

    def test_beta_counts_log_records_not_frame_indices(self):
        # close at records 0-1 and 4-5, but record indices jump by 10
        frames = []
        for pos in range(6):
            close = pos in {0, 1, 4, 5}
            dets = [det(1, "person", 100.0, 100.0),
                    det(3, "cup", 130.0 if close else 900.0, 100.0)]
            frames.append((pos * 10, dets))
        log = make_log(frames)
        events = extract_events(log, ExtractionConfig(beta=2))
        assert kinds_and_frames(events) == [("START", 0), ("END", 50)]


class TestEmissionOrder:
    def test_same_frame_events_sorted_by_pair(self):
        log = make_log([
            (0, [det(1, "person", 0.0, 0.0), det(9, "cup", 10.0, 0.0),
                 det(4, "person", 1000.0, 1000.0), det(7, "bowl", 1010.0, 1000.0)]),
        ])
        events = extract_events(log)
        assert [(e.subject, e.object, e.kind, e.seq) for e in events] == [
            ("person-1", "cup-9", "START", 0),
            ("person-4", "bowl-7", "START", 1),
            ("person-1", "cup-9", "END", 2),
            ("person-4", "bowl-7", "END", 3),
        ]

    def test_seq_is_dense_and_chronological(self):
        log = two_entity_log(CLOSE, 20)
        events = extract_events(log, ExtractionConfig(beta=2))
        assert [e.seq for e in events] == list(range(len(events)))
        assert events == tuple(sorted(events, key=lambda e: (e.frame, e.seq)))

    def test_timestamps_come_from_the_log(self):
        log = two_entity_log({2, 3, 4}, 8, fps=5.0)
        events = extract_events(log, ExtractionConfig(beta=1))
        assert events[0].timestamp == 2 / 5.0
        assert events[1].timestamp == 6 / 5.0


class TestSerialization:
    def test_round_trip(self):
        log = two_entity_log(CLOSE, 20)
        events = extract_events(log, ExtractionConfig(beta=2))
        assert events_from_json(events_to_json(events)) == events

    def test_record_field_names(self):
        e = InteractionEvent(timestamp=1.5, frame=3, kind="START",
                             subject="person-1", object="cup-3", seq=0)
        assert e.to_record() == {"timestamp": 1.5, "frame": 3, "type": "START",
                                 "subject": "person-1", "object": "cup-3",
                                 "seq": 0}

    def test_document_is_a_plain_array(self):
        doc = json.loads(events_to_json([]))
        assert doc == []

    @pytest.mark.parametrize("patch,path", [
        ({"type": "BEGIN"}, "type"),
        ({"subject": "Person-1"}, "subject"),
        ({"frame": "3"}, "frame"),
        ({"seq": None}, "seq"),
    ])
    def test_from_json_validates(self, patch, path):
        rec = {"timestamp": 1.0, "frame": 3, "type": "START",
               "subject": "person-1", "object": "cup-3", "seq": 0}
        rec.update(patch)
        with pytest.raises(SchemaError, match=path):
            events_from_json(json.dumps([rec]))

    def test_not_an_array(self):
        with pytest.raises(SchemaError, match="array"):
            events_from_json("{}")


class TestFuzzAgainstOracle:
    """Random small worlds, including absences, checked pair by pair."""

    LABELS = ["person", "person", "person", "cup", "bowl", "plate"]

    def random_log(self, rng):
        n_entities = int(rng.integers(2, 7))
        n_frames = int(rng.integers(1, 40))
        cells = np.array([[0.0, 0.0], [40.0, 30.0], [90.0, 0.0],
                          [400.0, 400.0], [460.0, 430.0], [900.0, 0.0]])
        frames = []
        for f in range(n_frames):
            dets = []
            for k in range(n_entities):
                if rng.random() < 0.15:
                    continue
                cell = cells[int(rng.integers(0, len(cells)))]
                jitter = rng.uniform(-12.0, 12.0, size=2)
                dets.append(det(k + 1, self.LABELS[k % len(self.LABELS)],
                                float(cell[0] + jitter[0]),
                                float(cell[1] + jitter[1])))
            frames.append((f, dets))
        return make_log(frames)

    def test_close_pair_detection_matches_brute_force(self):
        rng = np.random.default_rng(11)
        cfg = ExtractionConfig()
        from seg.events import _close_pairs
        for _ in range(300):
            log = self.random_log(rng)
            for fr in log.frames:
                assert _close_pairs(fr.detections, cfg) == \
                    oracle_close_pairs(fr.detections, cfg)

    def test_extraction_matches_oracle(self):
        rng = np.random.default_rng(23)
        for i in range(300):
            log = self.random_log(rng)
            cfg = ExtractionConfig(beta=int(rng.integers(0, 7)))
            assert extract_events(log, cfg) == oracle_events(log, cfg), \
                f"mismatch on case {i}"
