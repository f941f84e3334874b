"""Read an exported bundle directory into in-memory graph containers.

The loader depends only on the documented bundle contract: CSV node/edge
tables plus manifest.json with per-file sha256 digests. Every file is
digest-verified before parsing, nothing is ever written back, and feature
column order is taken from the manifest verbatim.

Flavors for load_hetero:
  "arrays"     plain container with numpy arrays (default, no extras)
  "tensor"     the same container with torch tensors (requires torch)
  "multigraph" a networkx MultiDiGraph with (type, id) nodes and
               relation-keyed edges (requires networkx)
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SUPPORTED_SCHEMA_VERSION = 1
FLAVORS = ("arrays", "tensor", "multigraph")
PARTITIONS = ("train", "val", "test")


class BundleError(Exception):
    """Bundle missing, corrupt, or inconsistent with its manifest."""


@dataclass
class NodeStore:
    """One node type: feature matrix plus label / ring vectors."""

    features: object          # (n, d) array or tensor
    is_fraud: object          # (n,)
    ring_id: object           # (n,)
    ring_type: object         # (n,)
    feature_names: tuple[str, ...]

    @property
    def num_nodes(self) -> int:
        return int(self.features.shape[0])

    @property
    def num_features(self) -> int:
        return int(self.features.shape[1])


@dataclass
class EdgeStore:
    """One relation: endpoint index pairs."""

    src_type: str
    dst_type: str
    src: object               # (m,)
    dst: object               # (m,)

    @property
    def num_edges(self) -> int:
        return int(self.src.shape[0])


@dataclass
class HeteroGraph:
    """Heterogeneous graph container mirroring the bundle's tables."""

    nodes: dict[str, NodeStore]
    edges: dict[str, EdgeStore]
    code_tables: dict[str, dict[str, list[str]]] = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)


def _read_verified(root: Path, manifest: dict, name: str) -> str:
    path = root / name
    if not path.exists():
        raise BundleError(f"bundle file missing: {name}")
    data = path.read_bytes()
    expected = manifest["file_digests"].get(name)
    if expected is None:
        raise BundleError(f"{name} is not listed in the manifest")
    actual = hashlib.sha256(data).hexdigest()
    if actual != expected:
        raise BundleError(
            f"digest mismatch for {name}: manifest {expected[:12]}..., "
            f"file {actual[:12]}..."
        )
    return data.decode("utf-8")


def read_manifest(bundle_dir: str | Path) -> dict:
    root = Path(bundle_dir)
    path = root / "manifest.json"
    if not path.exists():
        raise BundleError(f"no manifest.json in {root}")
    manifest = json.loads(path.read_text(encoding="utf-8"))
    version = manifest.get("schema_version")
    if version != SUPPORTED_SCHEMA_VERSION:
        raise BundleError(
            f"unsupported bundle schema version {version!r} "
            f"(supported: {SUPPORTED_SCHEMA_VERSION})"
        )
    return manifest


def _parse_node_table(text: str, feature_names: list[str], name: str):
    lines = text.splitlines()
    expected_header = ",".join(["id", *feature_names, "is_fraud", "ring_id", "ring_type"])
    if lines[0] != expected_header:
        raise BundleError(f"{name}: header does not match the manifest column order")
    n, d = len(lines) - 1, len(feature_names)
    features = np.empty((n, d), dtype=np.float64)
    is_fraud = np.empty(n, dtype=np.int64)
    ring_id = np.empty(n, dtype=np.int64)
    ring_type = np.empty(n, dtype=np.int64)
    for i, line in enumerate(lines[1:]):
        parts = line.split(",")
        if int(parts[0]) != i:
            raise BundleError(f"{name}: ids must be dense and ordered")
        features[i] = [float(x) for x in parts[1:1 + d]]
        is_fraud[i] = int(parts[1 + d])
        ring_id[i] = int(parts[2 + d])
        ring_type[i] = int(parts[3 + d])
    return features, is_fraud, ring_id, ring_type


def _parse_edge_table(text: str, name: str):
    lines = text.splitlines()
    if lines[0] != "src_id,dst_id":
        raise BundleError(f"{name}: unexpected header {lines[0]!r}")
    m = len(lines) - 1
    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    for i, line in enumerate(lines[1:]):
        a, b = line.split(",")
        src[i] = int(a)
        dst[i] = int(b)
    return src, dst


def _load_arrays(bundle_dir: Path, manifest: dict) -> HeteroGraph:
    nodes: dict[str, NodeStore] = {}
    for node_type, feature_names in manifest["feature_names"].items():
        text = _read_verified(bundle_dir, manifest, f"nodes_{node_type}.csv")
        features, is_fraud, ring_id, ring_type = _parse_node_table(
            text, feature_names, f"nodes_{node_type}.csv")
        expected = manifest["counts"]["nodes"][node_type]
        if features.shape[0] != expected:
            raise BundleError(
                f"{node_type}: {features.shape[0]} rows != manifest {expected}")
        nodes[node_type] = NodeStore(features, is_fraud, ring_id, ring_type,
                                     tuple(feature_names))
    edges: dict[str, EdgeStore] = {}
    for relation, (src_type, dst_type) in manifest["relations"].items():
        text = _read_verified(bundle_dir, manifest, f"edges_{relation}.csv")
        src, dst = _parse_edge_table(text, f"edges_{relation}.csv")
        expected = manifest["counts"]["edges"][relation]
        if src.shape[0] != expected:
            raise BundleError(f"{relation}: {src.shape[0]} edges != manifest {expected}")
        edges[relation] = EdgeStore(src_type, dst_type, src, dst)
    return HeteroGraph(nodes=nodes, edges=edges,
                       code_tables=manifest.get("code_tables", {}),
                       manifest=manifest)


def _to_tensor_graph(graph: HeteroGraph) -> HeteroGraph:
    import torch

    nodes = {
        t: NodeStore(
            features=torch.from_numpy(store.features),
            is_fraud=torch.from_numpy(store.is_fraud),
            ring_id=torch.from_numpy(store.ring_id),
            ring_type=torch.from_numpy(store.ring_type),
            feature_names=store.feature_names,
        )
        for t, store in graph.nodes.items()
    }
    edges = {
        r: EdgeStore(store.src_type, store.dst_type,
                     torch.from_numpy(store.src), torch.from_numpy(store.dst))
        for r, store in graph.edges.items()
    }
    return HeteroGraph(nodes=nodes, edges=edges,
                       code_tables=graph.code_tables, manifest=graph.manifest)


def _to_multigraph(graph: HeteroGraph):
    import networkx as nx

    g = nx.MultiDiGraph()
    for node_type, store in graph.nodes.items():
        for i in range(store.num_nodes):
            g.add_node(
                (node_type, i),
                node_type=node_type,
                features=store.features[i],
                is_fraud=int(store.is_fraud[i]),
                ring_id=int(store.ring_id[i]),
                ring_type=int(store.ring_type[i]),
            )
    for relation, store in graph.edges.items():
        src_t, dst_t = store.src_type, store.dst_type
        for s, d in zip(store.src.tolist(), store.dst.tolist()):
            g.add_edge((src_t, s), (dst_t, d), key=relation, relation=relation)
    return g


def load_hetero(bundle_dir: str | Path, flavor: str = "arrays"):
    """Load a bundle into the container selected by flavor.

    "arrays" and "tensor" return a HeteroGraph (numpy- or torch-backed);
    "multigraph" returns a networkx MultiDiGraph whose nodes are
    (type, id) pairs.
    """
    if flavor not in FLAVORS:
        raise BundleError(
            f"unsupported flavor {flavor!r}; supported: {', '.join(FLAVORS)}")
    root = Path(bundle_dir)
    manifest = read_manifest(root)
    graph = _load_arrays(root, manifest)
    if flavor == "arrays":
        return graph
    if flavor == "tensor":
        return _to_tensor_graph(graph)
    return _to_multigraph(graph)


def load_split_masks(bundle_dir: str | Path) -> dict[str, np.ndarray]:
    """Boolean user masks per partition: disjoint, covering all users."""
    root = Path(bundle_dir)
    manifest = read_manifest(root)
    n_users = manifest["counts"]["nodes"]["user"]
    text = _read_verified(root, manifest, "split_users.csv")
    lines = text.splitlines()
    if lines[0] != "user_id,partition":
        raise BundleError(f"split_users.csv: unexpected header {lines[0]!r}")
    masks = {name: np.zeros(n_users, dtype=bool) for name in PARTITIONS}
    seen = np.zeros(n_users, dtype=bool)
    for line in lines[1:]:
        uid_s, partition = line.split(",")
        uid = int(uid_s)
        if partition not in masks:
            raise BundleError(f"unknown partition {partition!r} for user {uid}")
        if seen[uid]:
            raise BundleError(f"user {uid} assigned twice")
        seen[uid] = True
        masks[partition][uid] = True
    if not seen.all():
        raise BundleError("split_users.csv does not cover every user")
    return masks


def load_ring_partitions(bundle_dir: str | Path) -> dict[int, str]:
    """ring_id -> partition name, from split_rings.csv."""
    root = Path(bundle_dir)
    manifest = read_manifest(root)
    text = _read_verified(root, manifest, "split_rings.csv")
    lines = text.splitlines()
    if lines[0] != "ring_id,partition":
        raise BundleError(f"split_rings.csv: unexpected header {lines[0]!r}")
    out: dict[int, str] = {}
    for line in lines[1:]:
        rid_s, partition = line.split(",")
        out[int(rid_s)] = partition
    return out


def load_ring_members(bundle_dir: str | Path) -> dict[int, list[int]]:
    """ring_id -> member user ids, from rings.csv."""
    root = Path(bundle_dir)
    manifest = read_manifest(root)
    text = _read_verified(root, manifest, "rings.csv")
    lines = text.splitlines()
    if lines[0] != "ring_id,ring_type,node_type,node_id,role":
        raise BundleError(f"rings.csv: unexpected header {lines[0]!r}")
    members: dict[int, list[int]] = {}
    for line in lines[1:]:
        rid_s, _rt, node_type, node_id_s, role = line.split(",")
        if role == "member" and node_type == "user":
            members.setdefault(int(rid_s), []).append(int(node_id_s))
    return members
