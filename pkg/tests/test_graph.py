import json

from seg.graph import build_graph, export_dot

from helpers import ev, star_events


class TestBuild:
    def test_one_edge_per_event(self):
        g = build_graph(star_events())
        assert g.n_nodes == 3
        assert g.n_edges == 6

    def test_edges_in_chronological_order(self):
        events = list(reversed(star_events()))
        g = build_graph(events)
        assert [e.key for e in g.edges()] == sorted(e.key for e in g.edges())

    def test_nodes_sorted_with_class_and_degree(self):
        g = build_graph(star_events())
        nodes = g.nodes()
        assert [n.id for n in nodes] == ["bowl-2", "cup-3", "person-1"]
        assert [n.cls for n in nodes] == ["bowl", "cup", "person"]
        assert {n.id: n.degree for n in nodes} == {
            "person-1": 6, "bowl-2": 4, "cup-3": 2}

    def test_empty(self):
        g = build_graph([])
        assert g.nodes() == ()
        assert g.edges() == ()
        assert g.n_nodes == 0

    def test_edge_carries_event_metadata(self):
        g = build_graph(star_events())
        edge = g.edges()[0]
        assert (edge.subject, edge.object, edge.kind) == \
            ("person-1", "cup-3", "START")
        assert (edge.timestamp, edge.frame, edge.seq) == (2.0, 2, 0)


class TestRawRecord:
    def test_raw_round_trips_to_the_event_record(self):
        events = star_events()
        g = build_graph(events)
        for edge, event in zip(g.edges(), events):
            assert json.loads(edge.raw) == event.to_record()

    def test_raw_is_a_single_compact_line(self):
        edge = build_graph(star_events()).edges()[0]
        assert "\n" not in edge.raw
        assert edge.raw.startswith('{"timestamp":')
        assert '"type":"START"' in edge.raw


class TestLookups:
    def test_incident_edges_cover_both_roles(self):
        g = build_graph(star_events())
        assert len(g.incident_edges("person-1")) == 6
        assert len(g.incident_edges("cup-3")) == 2

    def test_unknown_entity_has_no_edges(self):
        g = build_graph(star_events())
        assert g.incident_edges("ghost-9") == ()
        assert not g.has_entity("ghost-9")

    def test_entities_by_class(self):
        g = build_graph(star_events() + [
            ev("START", "person-4", "cup-8", 50, 6),
            ev("END", "person-4", "cup-8", 55, 7)])
        assert g.entities_by_class("cup") == ("cup-3", "cup-8")
        assert g.entities_by_class("CUP") == ("cup-3", "cup-8")
        assert g.entities_by_class("sofa") == ()

    def test_incident_edges_chronological(self):
        g = build_graph(star_events())
        keys = [e.key for e in g.incident_edges("person-1")]
        assert keys == sorted(keys)


class TestDot:
    def test_deterministic_bytes(self):
        a = export_dot(build_graph(star_events()))
        b = export_dot(build_graph(list(reversed(star_events()))))
        assert a == b

    def test_shape(self):
        dot = export_dot(build_graph(star_events()))
        lines = dot.splitlines()
        assert lines[0] == "digraph tsg {"
        assert lines[-1] == "}"
        assert '  "bowl-2" [label="bowl-2"];' in lines
        assert '  "person-1" -> "cup-3" [label="START@2"];' in lines
        assert dot.count("->") == 6

    def test_empty_graph_still_valid(self):
        dot = export_dot(build_graph([]))
        assert dot == "digraph tsg {\n}\n"
