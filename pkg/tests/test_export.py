import json

import numpy as np
import pytest

from ringbench import generate
from ringbench.errors import ValidationError
from ringbench.export import export_bundle, load_bundle
from ringbench.graph import drop_user_feature, validate
from ringbench.rng import make_rng
from ringbench.split import split


def _graphs_equal(a, b):
    for node_type, table in a.nodes.items():
        other = b.nodes[node_type]
        if table.feature_names != other.feature_names:
            return False
        for attr in ("features", "labels", "ring_ids", "ring_types"):
            if not np.array_equal(getattr(table, attr), getattr(other, attr)):
                return False
    for name, edge in a.edges.items():
        other = b.edges[name]
        if not (np.array_equal(edge.src, other.src) and np.array_equal(edge.dst, other.dst)):
            return False
    return True


def test_export_twice_identical_digest(tmp_path, toy_bundle):
    _dir, result, assignment, manifest = toy_bundle
    again = export_bundle(result.graph, result.rings, assignment,
                          result.resolved, tmp_path / "again", result.fraud_rate)
    assert again["bundle_digest"] == manifest["bundle_digest"]
    assert again["file_digests"] == manifest["file_digests"]


def test_regenerated_run_is_byte_identical(tmp_path):
    digests = []
    for sub in ("a", "b"):
        result = generate(scale="toy", seed=31)
        assignment = split(result.graph, result.rings,
                           result.resolved.split_fractions, make_rng(31, "split"))
        manifest = export_bundle(result.graph, result.rings, assignment,
                                 result.resolved, tmp_path / sub, result.fraud_rate)
        digests.append(manifest["bundle_digest"])
    assert digests[0] == digests[1]


def test_manifest_counts_match_tables(toy_bundle):
    _dir, result, _assignment, manifest = toy_bundle
    for node_type, count in manifest["counts"]["nodes"].items():
        assert count == result.graph.nodes[node_type].n
    for relation, count in manifest["counts"]["edges"].items():
        assert count == result.graph.edges[relation].m


def test_load_round_trip(toy_bundle):
    bundle_dir, result, assignment, _manifest = toy_bundle
    graph, rings, loaded_assignment = load_bundle(bundle_dir)
    assert validate(graph).ok
    assert _graphs_equal(graph, result.graph)
    assert len(rings) == len(result.rings)
    for got, want in zip(rings, result.rings):
        assert got.ring_id == want.ring_id
        assert got.ring_type == want.ring_type
        assert np.array_equal(np.sort(got.member_user_ids),
                              np.sort(want.member_user_ids))
    assert np.array_equal(loaded_assignment.user_partition,
                          assignment.user_partition)
    assert loaded_assignment.ring_partition == assignment.ring_partition


def test_reload_then_reexport_identical(tmp_path, toy_bundle):
    bundle_dir, result, assignment, manifest = toy_bundle
    graph, rings, loaded_assignment = load_bundle(bundle_dir)
    again = export_bundle(graph, rings, loaded_assignment, result.resolved,
                          tmp_path / "rt", manifest["observed_fraud_rate"]
                          if "observed_fraud_rate" in manifest else result.fraud_rate)
    assert again["bundle_digest"] == manifest["bundle_digest"]


def test_corrupted_file_fails_digest(tmp_path):
    result = generate(scale="toy", seed=8)
    assignment = split(result.graph, result.rings,
                       result.resolved.split_fractions, make_rng(8, "split"))
    out = tmp_path / "bundle"
    export_bundle(result.graph, result.rings, assignment, result.resolved, out)
    victim = out / "edges_uses_device.csv"
    victim.write_text(victim.read_text(encoding="utf-8") + "9,9\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="digest"):
        load_bundle(out)


def test_missing_manifest(tmp_path):
    with pytest.raises(ValidationError):
        load_bundle(tmp_path)


def test_feature_drop_survives_round_trip(tmp_path):
    result = generate(scale="toy", seed=8)
    assignment = split(result.graph, result.rings,
                       result.resolved.split_fractions, make_rng(8, "split"))
    dropped = drop_user_feature(result.graph, "distinct_device_count")
    out = tmp_path / "dropped"
    export_bundle(dropped, result.rings, assignment, result.resolved, out)
    graph, _rings, _assignment = load_bundle(out)
    assert graph.nodes["user"].dim == 9
    assert "distinct_device_count" not in graph.nodes["user"].feature_names


def test_relation_exclusion_exports_header_only(tmp_path):
    result = generate(scale="toy", seed=8, relation_exclusions=("uses_device",))
    assignment = split(result.graph, result.rings,
                       result.resolved.split_fractions, make_rng(8, "split"))
    out = tmp_path / "ablated"
    export_bundle(result.graph, result.rings, assignment, result.resolved, out)
    assert (out / "edges_uses_device.csv").read_text(encoding="utf-8") == "src_id,dst_id\n"


def test_croissant_rai_fields(toy_bundle):
    bundle_dir, result, _assignment, _manifest = toy_bundle
    doc = json.loads((bundle_dir / "croissant.json").read_text(encoding="utf-8"))
    assert doc["privacy"]["pii_present"] is False
    assert abs(doc["bias"]["observed_fraud_rate"] - result.fraud_rate) < 1e-12
    assert "evade" in doc["prohibited_use"]
    assert doc["intended_use"]


def test_medium_manifest_user_count(tmp_path, medium_result, medium_split):
    manifest = export_bundle(medium_result.graph, medium_result.rings,
                             medium_split, medium_result.resolved,
                             tmp_path / "medium", medium_result.fraud_rate)
    assert manifest["counts"]["nodes"]["user"] == 10_000


def test_small_preset_round_trip(tmp_path, small_result):
    from ringbench.rng import make_rng
    from ringbench.split import split as split_fn

    assignment = split_fn(small_result.graph, small_result.rings,
                          (0.6, 0.2, 0.2), make_rng(42, "split"))
    out = tmp_path / "small"
    manifest = export_bundle(small_result.graph, small_result.rings, assignment,
                             small_result.resolved, out, small_result.fraud_rate)
    graph, rings, loaded = load_bundle(out)
    assert _graphs_equal(graph, small_result.graph)
    again = export_bundle(graph, rings, loaded, small_result.resolved,
                          tmp_path / "small2", small_result.fraud_rate)
    assert again["bundle_digest"] == manifest["bundle_digest"]
