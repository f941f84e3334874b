"""Growable graph under construction; frozen into GraphData once complete."""

from __future__ import annotations

import numpy as np

from .graph import EdgeList, GraphData, NodeTable
from .schema import NODE_FEATURES, RELATIONS


class _NodeAccumulator:
    def __init__(self, node_type: str) -> None:
        self.node_type = node_type
        self.dim = len(NODE_FEATURES[node_type])
        self.feature_chunks: list[np.ndarray] = []
        self.label_chunks: list[np.ndarray] = []
        self.ring_id_chunks: list[np.ndarray] = []
        self.ring_type_chunks: list[np.ndarray] = []
        self.count = 0


class GraphBuilder:
    """Accumulates node rows and edges; freeze() yields the immutable graph."""

    def __init__(self) -> None:
        self._nodes = {t: _NodeAccumulator(t) for t in NODE_FEATURES}
        self._edges: dict[str, tuple[list[np.ndarray], list[np.ndarray]]] = {
            name: ([], []) for name in RELATIONS
        }

    def node_count(self, node_type: str) -> int:
        return self._nodes[node_type].count

    def add_nodes(
        self,
        node_type: str,
        features: np.ndarray,
        labels: int | np.ndarray = 0,
        ring_id: int | np.ndarray = -1,
        ring_type: int | np.ndarray = 0,
    ) -> np.ndarray:
        """Append node rows; returns the assigned ids."""
        acc = self._nodes[node_type]
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != acc.dim:
            raise ValueError(
                f"{node_type} features must be (n, {acc.dim}), got {features.shape}"
            )
        n = features.shape[0]
        acc.feature_chunks.append(features)
        acc.label_chunks.append(np.broadcast_to(np.asarray(labels, dtype=np.int8), (n,)).copy())
        acc.ring_id_chunks.append(np.broadcast_to(np.asarray(ring_id, dtype=np.int32), (n,)).copy())
        acc.ring_type_chunks.append(np.broadcast_to(np.asarray(ring_type, dtype=np.int8), (n,)).copy())
        ids = np.arange(acc.count, acc.count + n, dtype=np.int64)
        acc.count += n
        return ids

    def add_edges(self, relation: str, src, dst) -> None:
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError(f"{relation}: src/dst length mismatch")
        if src.size == 0:
            return
        chunks_src, chunks_dst = self._edges[relation]
        chunks_src.append(src)
        chunks_dst.append(dst)

    def freeze(self) -> GraphData:
        nodes: dict[str, NodeTable] = {}
        for node_type, acc in self._nodes.items():
            if acc.feature_chunks:
                features = np.concatenate(acc.feature_chunks, axis=0)
                labels = np.concatenate(acc.label_chunks)
                ring_ids = np.concatenate(acc.ring_id_chunks)
                ring_types = np.concatenate(acc.ring_type_chunks)
            else:
                features = np.empty((0, acc.dim), dtype=np.float64)
                labels = np.empty(0, dtype=np.int8)
                ring_ids = np.empty(0, dtype=np.int32)
                ring_types = np.empty(0, dtype=np.int8)
            nodes[node_type] = NodeTable(
                features=features,
                labels=labels,
                ring_ids=ring_ids,
                ring_types=ring_types,
                feature_names=NODE_FEATURES[node_type],
            )
        edges: dict[str, EdgeList] = {}
        for name, (src_t, dst_t) in RELATIONS.items():
            chunks_src, chunks_dst = self._edges[name]
            if chunks_src:
                src = np.concatenate(chunks_src)
                dst = np.concatenate(chunks_dst)
            else:
                src = np.empty(0, dtype=np.int64)
                dst = np.empty(0, dtype=np.int64)
            edges[name] = EdgeList(name, src_t, dst_t, src, dst)
        return GraphData(nodes=nodes, edges=edges)
