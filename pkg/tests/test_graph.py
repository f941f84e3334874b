import numpy as np
import pytest

from ringbench import generate
from ringbench.builder import GraphBuilder
from ringbench.errors import ConfigError
from ringbench.graph import (
    drop_relation,
    drop_user_feature,
    project_user_graph,
    validate,
)
from ringbench.schema import NODE_FEATURES


def _mini_graph(n_users=4, n_devices=2, n_ips=2):
    """A tiny hand-built graph with explicit device/IP wiring."""
    b = GraphBuilder()
    b.add_nodes("user", np.zeros((n_users, len(NODE_FEATURES["user"]))))
    b.add_nodes("device", np.zeros((n_devices, len(NODE_FEATURES["device"]))))
    b.add_nodes("ip_address", np.zeros((n_ips, len(NODE_FEATURES["ip_address"]))))
    return b


def test_generated_graph_validates(small_result):
    assert validate(small_result.graph).ok


def test_out_of_range_edge_reported():
    b = _mini_graph()
    b.add_edges("uses_device", [0], [99])
    report = validate(b.freeze())
    assert not report.ok
    assert any("uses_device" in v and "out of range" in v for v in report.violations)


def test_label_without_ring_reported():
    b = GraphBuilder()
    features = np.zeros((2, len(NODE_FEATURES["user"])))
    b.add_nodes("user", features, labels=np.array([1, 0]), ring_id=-1, ring_type=0)
    report = validate(b.freeze())
    assert not report.ok
    assert any("label=1 without ring membership" in v for v in report.violations)


def test_ring_id_ring_type_consistency_reported():
    b = GraphBuilder()
    features = np.zeros((1, len(NODE_FEATURES["user"])))
    b.add_nodes("user", features, labels=0, ring_id=3, ring_type=0)
    report = validate(b.freeze())
    assert any("ring_id >= 0 iff ring_type > 0" in v for v in report.violations)


def test_three_users_on_one_device_project_to_triangle():
    b = _mini_graph(n_users=3, n_devices=1)
    b.add_edges("uses_device", [0, 1, 2], [0, 0, 0])
    proj = project_user_graph(b.freeze())
    u, v = proj.channels["device-share"]
    assert sorted(zip(u.tolist(), v.tolist())) == [(0, 1), (0, 2), (1, 2)]
    assert proj.edge_count("ip-share") == 0


def test_disjoint_users_project_to_nothing():
    b = _mini_graph(n_users=2, n_devices=2, n_ips=2)
    b.add_edges("uses_device", [0, 1], [0, 1])
    b.add_edges("uses_ip", [0, 1], [0, 1])
    proj = project_user_graph(b.freeze())
    assert proj.edge_count("device-share") == 0
    assert proj.edge_count("ip-share") == 0


def _brute_force_projection(graph, relation):
    by_hub = {}
    edge = graph.edges[relation]
    for u, h in zip(edge.src.tolist(), edge.dst.tolist()):
        by_hub.setdefault(h, set()).add(u)
    pairs = set()
    for users in by_hub.values():
        ordered = sorted(users)
        for i in range(len(ordered)):
            for j in range(i + 1, len(ordered)):
                pairs.add((ordered[i], ordered[j]))
    return pairs


def test_projection_matches_brute_force_oracle():
    graph = generate(scale="toy", seed=3).graph
    proj = project_user_graph(graph)
    for channel, relation in (("device-share", "uses_device"),
                              ("ip-share", "uses_ip")):
        u, v = proj.channels[channel]
        assert set(zip(u.tolist(), v.tolist())) == _brute_force_projection(graph, relation)


def test_projection_idempotent(small_result):
    first = project_user_graph(small_result.graph)
    second = project_user_graph(small_result.graph)
    for channel in first.channels:
        assert np.array_equal(first.channels[channel][0], second.channels[channel][0])
        assert np.array_equal(first.channels[channel][1], second.channels[channel][1])


def test_drop_relation_empties_exactly_one(small_result):
    graph = small_result.graph
    dropped = drop_relation(graph, "uses_device")
    assert dropped.edges["uses_device"].m == 0
    for name, edge in dropped.edges.items():
        if name != "uses_device":
            assert edge.m == graph.edges[name].m
    # node tables are shared untouched
    assert dropped.nodes["user"].features is graph.nodes["user"].features


def test_drop_review_pair_drops_both(small_result):
    for alias in ("wrote", "about", "wrote/about"):
        dropped = drop_relation(small_result.graph, alias)
        assert dropped.edges["wrote"].m == 0
        assert dropped.edges["about"].m == 0


def test_drop_unknown_relation():
    with pytest.raises(ConfigError):
        drop_relation(generate(scale="toy", seed=3).graph, "uses_phone")


def test_projection_after_dropping_device_channel(small_result):
    dropped = drop_relation(small_result.graph, "uses_device")
    proj = project_user_graph(dropped)
    assert proj.edge_count("device-share") == 0
    u, v = proj.channels["ip-share"]
    assert set(zip(u.tolist(), v.tolist())) == _brute_force_projection(dropped, "uses_ip")


def test_drop_user_feature_narrows_matrix(small_result):
    graph = small_result.graph
    dropped = drop_user_feature(graph, "distinct_device_count")
    assert dropped.nodes["user"].dim == 9
    assert "distinct_device_count" not in dropped.nodes["user"].feature_names
    names = list(graph.nodes["user"].feature_names)
    names.remove("distinct_device_count")
    assert list(dropped.nodes["user"].feature_names) == names
    assert validate(dropped).ok


def test_drop_unknown_feature():
    with pytest.raises(ConfigError):
        drop_user_feature(generate(scale="toy", seed=3).graph, "shoe_size")


def test_medium_graph_validates(medium_result):
    assert validate(medium_result.graph).ok
