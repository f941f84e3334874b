"""Bit-stable bundle serialization: CSV tables, manifest, RAI metadata.

Directory layout (all UTF-8, LF line endings, fixed column order):
  nodes_<type>.csv     id, <feature columns>, is_fraud, ring_id, ring_type
  edges_<relation>.csv src_id, dst_id
  rings.csv            ring_id, ring_type, node_type, node_id, role
  split_users.csv      user_id, partition
  split_rings.csv      ring_id, partition
  manifest.json        counts, column orders, code tables, config echo,
                       per-file sha256 digests and the bundle digest
  croissant.json       dataset metadata with responsible-AI fields

Reals are printed with Python's shortest round-trip repr, so a reload
parses to bit-identical float64 values and re-exporting reproduces the
digest byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from ._version import __version__
from .config import ResolvedConfig
from .errors import ValidationError
from .graph import EdgeList, GraphData, NodeTable, validate
from .rings import RingRecord
from .schema import INTEGER_COLUMNS, NODE_TYPES, RELATIONS, RING_TYPE_NAMES
from .split import PARTITIONS, SplitAssignment

SCHEMA_VERSION = 1

_RING_ROLES = (
    ("member", "user", "member_user_ids"),
    ("shared_device", "device", "shared_device_ids"),
    ("shared_ip", "ip_address", "shared_ip_ids"),
    ("ghost_hotel", "hotel", "ghost_hotel_ids"),
    ("mule_loyalty", "loyalty_account", "mule_loyalty_ids"),
)


def _format_columns(table: NodeTable, node_type: str) -> list[list[str]]:
    int_cols = INTEGER_COLUMNS.get(node_type, frozenset())
    columns: list[list[str]] = []
    for idx, name in enumerate(table.feature_names):
        col = table.features[:, idx]
        if name in int_cols:
            columns.append([str(int(v)) for v in col.tolist()])
        else:
            columns.append([repr(v) for v in col.tolist()])
    return columns


def _node_csv(table: NodeTable, node_type: str) -> str:
    header = ",".join(["id", *table.feature_names, "is_fraud", "ring_id", "ring_type"])
    columns = [
        [str(i) for i in range(table.n)],
        *_format_columns(table, node_type),
        [str(int(v)) for v in table.labels.tolist()],
        [str(int(v)) for v in table.ring_ids.tolist()],
        [str(int(v)) for v in table.ring_types.tolist()],
    ]
    lines = [header]
    lines.extend(",".join(row) for row in zip(*columns))
    return "\n".join(lines) + "\n"


def _edge_csv(edge: EdgeList) -> str:
    lines = ["src_id,dst_id"]
    lines.extend(f"{s},{d}" for s, d in zip(edge.src.tolist(), edge.dst.tolist()))
    return "\n".join(lines) + "\n"


def _rings_csv(rings: list[RingRecord]) -> str:
    lines = ["ring_id,ring_type,node_type,node_id,role"]
    for ring in sorted(rings, key=lambda r: r.ring_id):
        for role, node_type, attr in _RING_ROLES:
            for node_id in getattr(ring, attr).tolist():
                lines.append(f"{ring.ring_id},{ring.ring_type},{node_type},{node_id},{role}")
    return "\n".join(lines) + "\n"


def _split_users_csv(assignment: SplitAssignment) -> str:
    lines = ["user_id,partition"]
    names = assignment.partition_names()
    lines.extend(f"{uid},{name}" for uid, name in enumerate(names))
    return "\n".join(lines) + "\n"


def _split_rings_csv(assignment: SplitAssignment) -> str:
    lines = ["ring_id,partition"]
    for ring_id, part in sorted(assignment.ring_partition.items()):
        lines.append(f"{ring_id},{PARTITIONS[part]}")
    return "\n".join(lines) + "\n"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def emit_croissant_rai(resolved: ResolvedConfig, fraud_rate: float,
                       counts: dict[str, int]) -> dict:
    """Dataset metadata document with responsible-AI fields."""
    name = f"ringbench-{resolved.scale_name or resolved.n_users}-seed{resolved.seed}"
    return {
        "@type": "Dataset",
        "conformsTo": "http://mlcommons.org/croissant/RAI/1.0",
        "name": name,
        "description": (
            "Fully synthetic heterogeneous travel-platform graph with labelled "
            "fraud rings (ticketing chargeback stars, ghost-hotel review "
            "cliques, loyalty-drain chains) for benchmarking graph-based "
            "fraud detection."
        ),
        "license": "MIT",
        "version": __version__,
        "recordCounts": counts,
        "privacy": {
            "pii_present": False,
            "statement": (
                "All records are generated by simulation. No real user "
                "accounts, transactions, or personal information were "
                "collected, used, or included; there is no de-anonymization "
                "risk."
            ),
        },
        "bias": {
            "observed_fraud_rate": fraud_rate,
            "statement": (
                "The fraud rate is far above real-world travel fraud rates "
                "(<1%) by design, to support controlled evaluation. Threshold "
                "and class-weight settings must be re-calibrated before any "
                "production use. The country distribution reflects documented "
                "top travel markets and is fully configurable."
            ),
        },
        "intended_use": (
            "Benchmarking and evaluating graph-based fraud detection methods "
            "in research settings. Not intended for production deployment "
            "without re-calibration on real data."
        ),
        "prohibited_use": (
            "Using the ring topology designs as a guide to evade fraud "
            "detection systems; representing generated rings as descriptions "
            "of any real organization."
        ),
    }


def export_bundle(
    graph: GraphData,
    rings: list[RingRecord],
    assignment: SplitAssignment,
    resolved: ResolvedConfig,
    out_dir: str | Path,
    fraud_rate: float | None = None,
) -> dict:
    """Write the full bundle; returns the manifest (with bundle digest)."""
    report = validate(graph)
    if not report.ok:
        raise ValidationError(f"refusing to export an invalid graph:\n{report}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if fraud_rate is None:
        users = graph.nodes["user"]
        fraud_rate = float(users.labels.mean()) if users.n else 0.0

    files: dict[str, str] = {}
    for node_type in NODE_TYPES:
        files[f"nodes_{node_type}.csv"] = _node_csv(graph.nodes[node_type], node_type)
    for relation in RELATIONS:
        files[f"edges_{relation}.csv"] = _edge_csv(graph.edges[relation])
    files["rings.csv"] = _rings_csv(rings)
    files["split_users.csv"] = _split_users_csv(assignment)
    files["split_rings.csv"] = _split_rings_csv(assignment)

    digests = {}
    for name, text in sorted(files.items()):
        data = text.encode("utf-8")
        (out / name).write_bytes(data)
        digests[name] = _sha256(data)
    bundle_digest = _sha256(
        "\n".join(f"{n}:{d}" for n, d in sorted(digests.items())).encode("utf-8")
    )

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "generator": "ringbench",
        "generator_version": __version__,
        "config": resolved.echo(),
        "observed_fraud_rate": fraud_rate,
        "counts": {
            "nodes": {t: graph.nodes[t].n for t in NODE_TYPES},
            "edges": {r: graph.edges[r].m for r in RELATIONS},
            "rings": len(rings),
        },
        "feature_names": {t: list(graph.nodes[t].feature_names) for t in NODE_TYPES},
        "integer_columns": {t: sorted(INTEGER_COLUMNS.get(t, ())) for t in NODE_TYPES},
        "code_tables": {
            t: {col: list(labels) for col, labels in cols.items()}
            for t, cols in graph.code_tables.items()
        },
        "relations": {r: list(sig) for r, sig in RELATIONS.items()},
        "partitions": list(PARTITIONS),
        "ring_type_names": {str(k): v for k, v in RING_TYPE_NAMES.items()},
        "float_format": "python-repr-shortest-roundtrip",
        "file_digests": digests,
        "bundle_digest": bundle_digest,
    }
    croissant = emit_croissant_rai(resolved, fraud_rate, manifest["counts"]["nodes"])
    (out / "croissant.json").write_bytes(
        (json.dumps(croissant, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")
    )
    (out / "manifest.json").write_bytes(
        (json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")
    )
    return manifest


def _parse_node_csv(text: str, feature_names: list[str]) -> NodeTable:
    lines = text.splitlines()
    header = lines[0].split(",")
    expected = ["id", *feature_names, "is_fraud", "ring_id", "ring_type"]
    if header != expected:
        raise ValidationError(f"node table header {header} != manifest {expected}")
    n = len(lines) - 1
    d = len(feature_names)
    features = np.empty((n, d), dtype=np.float64)
    labels = np.empty(n, dtype=np.int8)
    ring_ids = np.empty(n, dtype=np.int32)
    ring_types = np.empty(n, dtype=np.int8)
    for i, line in enumerate(lines[1:]):
        parts = line.split(",")
        features[i] = [float(x) for x in parts[1:1 + d]]
        labels[i] = int(parts[1 + d])
        ring_ids[i] = int(parts[2 + d])
        ring_types[i] = int(parts[3 + d])
    return NodeTable(features, labels, ring_ids, ring_types, tuple(feature_names))


def _parse_edge_csv(text: str, relation: str) -> tuple[np.ndarray, np.ndarray]:
    lines = text.splitlines()
    if lines[0] != "src_id,dst_id":
        raise ValidationError(f"bad edge header in {relation}: {lines[0]!r}")
    m = len(lines) - 1
    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    for i, line in enumerate(lines[1:]):
        a, b = line.split(",")
        src[i] = int(a)
        dst[i] = int(b)
    return src, dst


def load_bundle(bundle_dir: str | Path) -> tuple[GraphData, list[RingRecord], SplitAssignment]:
    """Reload a bundle, verifying every file digest against the manifest."""
    root = Path(bundle_dir)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise ValidationError(f"no manifest.json in {root}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(
            f"bundle schema version {manifest.get('schema_version')} != "
            f"supported {SCHEMA_VERSION}"
        )

    texts: dict[str, str] = {}
    for name, digest in manifest["file_digests"].items():
        data = (root / name).read_bytes()
        actual = _sha256(data)
        if actual != digest:
            raise ValidationError(
                f"digest mismatch for {name}: manifest {digest[:12]}..., "
                f"file {actual[:12]}..."
            )
        texts[name] = data.decode("utf-8")

    nodes: dict[str, NodeTable] = {}
    for node_type in NODE_TYPES:
        table = _parse_node_csv(texts[f"nodes_{node_type}.csv"],
                                manifest["feature_names"][node_type])
        if table.n != manifest["counts"]["nodes"][node_type]:
            raise ValidationError(
                f"{node_type}: row count {table.n} != manifest "
                f"{manifest['counts']['nodes'][node_type]}"
            )
        nodes[node_type] = table
    edges: dict[str, EdgeList] = {}
    for relation, (src_t, dst_t) in RELATIONS.items():
        src, dst = _parse_edge_csv(texts[f"edges_{relation}.csv"], relation)
        if src.shape[0] != manifest["counts"]["edges"][relation]:
            raise ValidationError(f"{relation}: edge count != manifest")
        edges[relation] = EdgeList(relation, src_t, dst_t, src, dst)
    code_tables = {
        t: {col: tuple(labels) for col, labels in cols.items()}
        for t, cols in manifest["code_tables"].items()
    }
    graph = GraphData(nodes=nodes, edges=edges, code_tables=code_tables)

    rings = _parse_rings_csv(texts["rings.csv"])
    assignment = _parse_split(texts["split_users.csv"], texts["split_rings.csv"],
                              manifest, graph.nodes["user"].n)
    return graph, rings, assignment


def _parse_rings_csv(text: str) -> list[RingRecord]:
    lines = text.splitlines()
    if lines[0] != "ring_id,ring_type,node_type,node_id,role":
        raise ValidationError(f"bad rings.csv header: {lines[0]!r}")
    acc: dict[int, dict] = {}
    role_to_attr = {role: attr for role, _t, attr in _RING_ROLES}
    for line in lines[1:]:
        rid_s, rtype_s, _node_type, node_id_s, role = line.split(",")
        rid = int(rid_s)
        entry = acc.setdefault(rid, {
            "ring_type": int(rtype_s),
            **{attr: [] for _r, _t, attr in _RING_ROLES},
        })
        entry[role_to_attr[role]].append(int(node_id_s))
    rings = []
    for rid in sorted(acc):
        entry = acc[rid]
        rings.append(RingRecord(
            ring_id=rid,
            ring_type=entry["ring_type"],
            **{attr: np.array(entry[attr], dtype=np.int64)
               for _r, _t, attr in _RING_ROLES},
        ))
    return rings


def _parse_split(users_text: str, rings_text: str, manifest: dict,
                 n_users: int) -> SplitAssignment:
    part_index = {name: i for i, name in enumerate(PARTITIONS)}
    lines = users_text.splitlines()
    if lines[0] != "user_id,partition":
        raise ValidationError(f"bad split_users.csv header: {lines[0]!r}")
    partition = np.full(n_users, -1, dtype=np.int8)
    for line in lines[1:]:
        uid_s, name = line.split(",")
        partition[int(uid_s)] = part_index[name]
    if (partition < 0).any():
        raise ValidationError("split_users.csv does not cover every user")

    ring_partition: dict[int, int] = {}
    lines = rings_text.splitlines()
    if lines[0] != "ring_id,partition":
        raise ValidationError(f"bad split_rings.csv header: {lines[0]!r}")
    for line in lines[1:]:
        rid_s, name = line.split(",")
        ring_partition[int(rid_s)] = part_index[name]

    fractions = tuple(manifest["config"]["split_fractions"])
    return SplitAssignment(
        user_partition=partition,
        ring_partition=ring_partition,
        fractions=fractions,  # type: ignore[arg-type]
    )
