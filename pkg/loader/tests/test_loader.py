import hashlib
import json

import numpy as np
import pytest

from bundleloader import (
    BundleError,
    load_hetero,
    load_ring_members,
    load_ring_partitions,
    load_split_masks,
    read_manifest,
)


def _manifest(bundle_dir):
    return json.loads((bundle_dir / "manifest.json").read_text(encoding="utf-8"))


def test_counts_and_widths_match_manifest(toy_bundle_dir):
    manifest = _manifest(toy_bundle_dir)
    graph = load_hetero(toy_bundle_dir)
    for node_type, count in manifest["counts"]["nodes"].items():
        store = graph.nodes[node_type]
        assert store.num_nodes == count
        assert store.num_features == len(manifest["feature_names"][node_type])
        assert list(store.feature_names) == manifest["feature_names"][node_type]
    for relation, count in manifest["counts"]["edges"].items():
        assert graph.edges[relation].num_edges == count


def test_user_label_sum_matches_manifest_fraud_rate(toy_bundle_dir):
    manifest = _manifest(toy_bundle_dir)
    graph = load_hetero(toy_bundle_dir)
    n_users = manifest["counts"]["nodes"]["user"]
    label_sum = int(graph.nodes["user"].is_fraud.sum())
    expected = manifest["observed_fraud_rate"] * n_users
    assert abs(label_sum - expected) < 0.5


def test_label_sums_match_raw_tables(toy_bundle_dir):
    # independent recount straight from the CSV text
    graph = load_hetero(toy_bundle_dir)
    for node_type in ("user", "booking", "hotel", "review", "loyalty_account"):
        lines = (toy_bundle_dir / f"nodes_{node_type}.csv").read_text(
            encoding="utf-8").splitlines()
        header = lines[0].split(",")
        col = header.index("is_fraud")
        raw = sum(int(line.split(",")[col]) for line in lines[1:])
        assert int(graph.nodes[node_type].is_fraud.sum()) == raw


def test_split_masks_disjoint_and_covering(toy_bundle_dir):
    manifest = _manifest(toy_bundle_dir)
    masks = load_split_masks(toy_bundle_dir)
    n_users = manifest["counts"]["nodes"]["user"]
    total = np.zeros(n_users, dtype=int)
    for mask in masks.values():
        total += mask.astype(int)
    assert (total == 1).all()
    # mask sums equal an independent recount of the split table
    lines = (toy_bundle_dir / "split_users.csv").read_text(
        encoding="utf-8").splitlines()[1:]
    for name, mask in masks.items():
        raw = sum(1 for line in lines if line.endswith(f",{name}"))
        assert int(mask.sum()) == raw


def test_legit_mask_fractions(toy_bundle_dir):
    graph = load_hetero(toy_bundle_dir)
    masks = load_split_masks(toy_bundle_dir)
    legit = graph.nodes["user"].ring_id < 0
    n = int(legit.sum())
    for name, target in (("train", 0.6), ("val", 0.2), ("test", 0.2)):
        got = int((masks[name] & legit).sum()) / n
        assert abs(got - target) <= 0.01 + 1.0 / n


def test_fraud_user_masks_agree_with_ring_partitions(toy_bundle_dir):
    masks = load_split_masks(toy_bundle_dir)
    ring_partition = load_ring_partitions(toy_bundle_dir)
    ring_members = load_ring_members(toy_bundle_dir)
    assert ring_members, "toy bundle must contain rings"
    for ring_id, members in ring_members.items():
        partition = ring_partition[ring_id]
        for uid in members:
            assert masks[partition][uid], (
                f"user {uid} of ring {ring_id} not in {partition}")


def test_tensor_flavor(toy_bundle_dir):
    torch = pytest.importorskip("torch")
    arrays = load_hetero(toy_bundle_dir, flavor="arrays")
    tensors = load_hetero(toy_bundle_dir, flavor="tensor")
    for node_type, store in tensors.nodes.items():
        assert isinstance(store.features, torch.Tensor)
        assert np.array_equal(store.features.numpy(),
                              arrays.nodes[node_type].features)
    made = tensors.edges["made"]
    assert isinstance(made.src, torch.Tensor)
    assert np.array_equal(made.src.numpy(), arrays.edges["made"].src)


def test_multigraph_flavor(toy_bundle_dir):
    nx = pytest.importorskip("networkx")
    manifest = _manifest(toy_bundle_dir)
    g = load_hetero(toy_bundle_dir, flavor="multigraph")
    assert isinstance(g, nx.MultiDiGraph)
    assert g.number_of_nodes() == sum(manifest["counts"]["nodes"].values())
    assert g.number_of_edges() == sum(manifest["counts"]["edges"].values())
    # spot-check one relation's keying
    user0 = ("user", 0)
    assert g.nodes[user0]["node_type"] == "user"


def test_reload_is_elementwise_identical(toy_bundle_dir):
    a = load_hetero(toy_bundle_dir)
    b = load_hetero(toy_bundle_dir)
    for node_type in a.nodes:
        assert np.array_equal(a.nodes[node_type].features, b.nodes[node_type].features)
    for relation in a.edges:
        assert np.array_equal(a.edges[relation].src, b.edges[relation].src)
        assert np.array_equal(a.edges[relation].dst, b.edges[relation].dst)


def test_unsupported_flavor(toy_bundle_dir):
    with pytest.raises(BundleError, match="flavor"):
        load_hetero(toy_bundle_dir, flavor="dgl")


def test_digest_mismatch_detected(tmp_path, toy_bundle_dir):
    import shutil
    copy = tmp_path / "tampered"
    shutil.copytree(toy_bundle_dir, copy)
    victim = copy / "edges_uses_ip.csv"
    victim.write_text(victim.read_text(encoding="utf-8") + "1,1\n", encoding="utf-8")
    with pytest.raises(BundleError, match="digest"):
        load_hetero(copy)


def test_missing_split_file(tmp_path, toy_bundle_dir):
    import shutil
    copy = tmp_path / "nosplit"
    shutil.copytree(toy_bundle_dir, copy)
    (copy / "split_users.csv").unlink()
    with pytest.raises(BundleError, match="missing"):
        load_split_masks(copy)


def test_missing_manifest(tmp_path):
    with pytest.raises(BundleError, match="manifest"):
        read_manifest(tmp_path)


def test_loader_never_writes(toy_bundle_dir):
    before = {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in toy_bundle_dir.iterdir()
    }
    load_hetero(toy_bundle_dir, flavor="arrays")
    load_split_masks(toy_bundle_dir)
    load_ring_partitions(toy_bundle_dir)
    after = {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in toy_bundle_dir.iterdir()
    }
    assert before == after
