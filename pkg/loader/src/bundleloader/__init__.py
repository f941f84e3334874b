"""Loader for ringbench CSV bundles into hetero-graph containers."""

from .loader import (
    FLAVORS,
    BundleError,
    EdgeStore,
    HeteroGraph,
    NodeStore,
    load_hetero,
    load_ring_members,
    load_ring_partitions,
    load_split_masks,
    read_manifest,
)

__version__ = "1.0.0"

__all__ = [
    "__version__",
    "BundleError",
    "EdgeStore",
    "FLAVORS",
    "HeteroGraph",
    "NodeStore",
    "load_hetero",
    "load_ring_members",
    "load_ring_partitions",
    "load_split_masks",
    "read_manifest",
]
