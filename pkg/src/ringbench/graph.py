"""Heterogeneous property-graph container, validation, projection, ablation.

GraphData is immutable by convention: transforms return new values that
share unchanged arrays. Node ids are dense and 0-based per type; an edge
references (source id, target id) under the relation's fixed signature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .schema import (
    LABELED_TYPES,
    NODE_FEATURES,
    NODE_TYPES,
    PAIRED_RELATIONS,
    RELATIONS,
    CODE_TABLES,
)


@dataclass
class NodeTable:
    """Per-type node store: features plus label / ring ground truth."""

    features: np.ndarray    # (n, d) float64
    labels: np.ndarray      # (n,) int8, 0/1
    ring_ids: np.ndarray    # (n,) int32, -1 = none
    ring_types: np.ndarray  # (n,) int8, 0 = none
    feature_names: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.feature_names.index(name)
        except ValueError:
            raise ConfigError(f"unknown feature column {name!r}") from None
        return self.features[:, idx]


@dataclass
class EdgeList:
    """Directed edges of one relation."""

    relation: str
    src_type: str
    dst_type: str
    src: np.ndarray  # (m,) int64
    dst: np.ndarray  # (m,) int64

    @property
    def m(self) -> int:
        return self.src.shape[0]


@dataclass
class GraphData:
    """The full heterogeneous graph: 9 node tables, 12 edge lists."""

    nodes: dict[str, NodeTable]
    edges: dict[str, EdgeList]
    code_tables: dict[str, dict[str, tuple[str, ...]]] = field(
        default_factory=lambda: {t: dict(cols) for t, cols in CODE_TABLES.items()}
    )

    def num_nodes(self, node_type: str) -> int:
        return self.nodes[node_type].n

    def total_nodes(self) -> int:
        return sum(t.n for t in self.nodes.values())

    def total_edges(self) -> int:
        return sum(e.m for e in self.edges.values())


def empty_edges() -> dict[str, EdgeList]:
    """All 12 relations with empty endpoint arrays."""
    return {
        name: EdgeList(name, src_t, dst_t,
                       np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
        for name, (src_t, dst_t) in RELATIONS.items()
    }


@dataclass
class ValidationReport:
    """Outcome of validate(): ok, or the list of violated invariants."""

    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(self.violations)


def _first_offenders(mask: np.ndarray, limit: int = 5) -> list[int]:
    return np.flatnonzero(mask)[:limit].tolist()


def validate(graph: GraphData) -> ValidationReport:
    """Check every structural invariant; violations become report content."""
    violations: list[str] = []

    for node_type in NODE_TYPES:
        if node_type not in graph.nodes:
            violations.append(f"missing node table: {node_type}")
            continue
        table = graph.nodes[node_type]
        expected = NODE_FEATURES[node_type]
        if node_type == "user":
            # User columns may be ablated; order of the survivors must hold.
            positions = []
            for name in table.feature_names:
                if name not in expected:
                    violations.append(f"user table has unknown column {name!r}")
                    break
                positions.append(expected.index(name))
            else:
                if positions != sorted(positions) or len(set(positions)) != len(positions):
                    violations.append("user feature columns out of schema order")
        elif table.feature_names != expected:
            violations.append(
                f"{node_type} feature columns {list(table.feature_names)} != "
                f"schema {list(expected)}"
            )
        if table.features.shape[1] != len(table.feature_names):
            violations.append(f"{node_type} feature width != feature_names length")
        for arr_name in ("labels", "ring_ids", "ring_types"):
            arr = getattr(table, arr_name)
            if arr.shape[0] != table.n:
                violations.append(f"{node_type}.{arr_name} length != node count")

        ring_mismatch = (table.ring_ids >= 0) != (table.ring_types > 0)
        if ring_mismatch.any():
            ids = _first_offenders(ring_mismatch)
            violations.append(
                f"{node_type}: ring_id >= 0 iff ring_type > 0 violated at ids {ids}"
            )
        if node_type in LABELED_TYPES:
            bad = (table.labels == 1) & (table.ring_ids < 0)
            if bad.any():
                ids = _first_offenders(bad)
                violations.append(
                    f"{node_type}: label=1 without ring membership at ids {ids}"
                )

    for name, (src_t, dst_t) in RELATIONS.items():
        if name not in graph.edges:
            violations.append(f"missing edge list: {name}")
            continue
        edge = graph.edges[name]
        if (edge.src_type, edge.dst_type) != (src_t, dst_t):
            violations.append(
                f"{name}: signature ({edge.src_type}->{edge.dst_type}) != "
                f"({src_t}->{dst_t})"
            )
        if edge.src.shape != edge.dst.shape:
            violations.append(f"{name}: src/dst length mismatch")
            continue
        if edge.m == 0:
            continue
        n_src = graph.nodes[src_t].n if src_t in graph.nodes else 0
        n_dst = graph.nodes[dst_t].n if dst_t in graph.nodes else 0
        bad_src = (edge.src < 0) | (edge.src >= n_src)
        bad_dst = (edge.dst < 0) | (edge.dst >= n_dst)
        if bad_src.any():
            violations.append(
                f"{name}: {int(bad_src.sum())} source ids out of range "
                f"(first at rows {_first_offenders(bad_src)})"
            )
        if bad_dst.any():
            violations.append(
                f"{name}: {int(bad_dst.sum())} target ids out of range "
                f"(first at rows {_first_offenders(bad_dst)})"
            )

    return ValidationReport(violations)


PROJECTION_CHANNELS = ("device-share", "ip-share")
_CHANNEL_RELATION = {"device-share": "uses_device", "ip-share": "uses_ip"}


@dataclass
class ProjectedUserGraph:
    """Undirected user-user co-occurrence graph, one edge set per channel.

    Edges are deduplicated per channel and stored with src < dst; an edge
    exists iff the two users share at least one hub (device or IP).
    """

    n_users: int
    channels: dict[str, tuple[np.ndarray, np.ndarray]]

    def edge_count(self, channel: str) -> int:
        return self.channels[channel][0].shape[0]

    def all_pairs(self) -> set[tuple[int, int]]:
        pairs: set[tuple[int, int]] = set()
        for u, v in self.channels.values():
            pairs.update(zip(u.tolist(), v.tolist()))
        return pairs


def _pairs_through_hubs(src: np.ndarray, dst: np.ndarray, n_users: int) -> tuple[np.ndarray, np.ndarray]:
    """All user pairs sharing a hub, deduplicated, src < dst."""
    if src.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    order = np.argsort(dst, kind="stable")
    hubs = dst[order]
    users = src[order]
    boundaries = np.flatnonzero(np.diff(hubs)) + 1
    groups = np.split(users, boundaries)
    keys: list[np.ndarray] = []
    for group in groups:
        if group.size < 2:
            continue
        members = np.unique(group)
        if members.size < 2:
            continue
        a_idx, b_idx = np.triu_indices(members.size, k=1)
        keys.append(members[a_idx] * n_users + members[b_idx])
    if not keys:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    merged = np.unique(np.concatenate(keys))
    return merged // n_users, merged % n_users


def project_user_graph(graph: GraphData) -> ProjectedUserGraph:
    """Project device and IP co-occurrence onto user-user edges.

    For every hub with user-degree k, all k-choose-2 user pairs receive an
    edge in that hub type's channel; nothing else.
    """
    n_users = graph.nodes["user"].n
    channels: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for channel in PROJECTION_CHANNELS:
        edge = graph.edges[_CHANNEL_RELATION[channel]]
        channels[channel] = _pairs_through_hubs(edge.src, edge.dst, n_users)
    return ProjectedUserGraph(n_users=n_users, channels=channels)


def drop_relation(graph: GraphData, relation: str) -> GraphData:
    """Return a copy with that relation's edge list emptied.

    The review pair (wrote/about) is dropped together; node tables are
    shared untouched.
    """
    if relation in PAIRED_RELATIONS:
        targets = PAIRED_RELATIONS[relation]
    elif relation in RELATIONS:
        targets = (relation,)
    else:
        valid = ", ".join(list(RELATIONS) + ["wrote/about"])
        raise ConfigError(f"unknown relation {relation!r}; valid: {valid}")

    new_edges = dict(graph.edges)
    for name in targets:
        old = new_edges[name]
        new_edges[name] = EdgeList(
            name, old.src_type, old.dst_type,
            np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
        )
    return GraphData(nodes=graph.nodes, edges=new_edges, code_tables=graph.code_tables)


def drop_user_feature(graph: GraphData, feature_name: str) -> GraphData:
    """Return a copy with one user feature column removed, order preserved."""
    users = graph.nodes["user"]
    if feature_name not in users.feature_names:
        raise ConfigError(
            f"unknown user feature {feature_name!r}; "
            f"columns: {', '.join(users.feature_names)}"
        )
    idx = users.feature_names.index(feature_name)
    keep = [i for i in range(users.dim) if i != idx]
    new_users = NodeTable(
        features=users.features[:, keep].copy(),
        labels=users.labels,
        ring_ids=users.ring_ids,
        ring_types=users.ring_types,
        feature_names=tuple(n for n in users.feature_names if n != feature_name),
    )
    new_nodes = dict(graph.nodes)
    new_nodes["user"] = new_users
    return GraphData(nodes=new_nodes, edges=graph.edges, code_tables=graph.code_tables)
