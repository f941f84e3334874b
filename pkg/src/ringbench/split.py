"""Ring-stratified train/val/test partitioning with leakage verification.

Rings are assigned whole to one partition, stratified by ring type with
largest-remainder quotas; legitimate users are quota-sliced independently.
A fraud user's partition always equals its ring's partition, so no ring
ever spans two partitions and shared fraud infrastructure cannot leak
between train and test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .graph import GraphData
from .rings import RingRecord
from .schema import RING_TYPE_NAMES

PARTITIONS = ("train", "val", "test")


@dataclass
class SplitAssignment:
    """Per-user and per-ring partition labels (0=train, 1=val, 2=test)."""

    user_partition: np.ndarray          # (n_users,) int8
    ring_partition: dict[int, int]      # ring_id -> partition index
    fractions: tuple[float, float, float]
    warnings: tuple[str, ...] = ()

    def users_in(self, partition: str) -> np.ndarray:
        return np.flatnonzero(self.user_partition == PARTITIONS.index(partition))

    def rings_in(self, partition: str) -> list[int]:
        idx = PARTITIONS.index(partition)
        return [rid for rid, p in sorted(self.ring_partition.items()) if p == idx]

    def partition_names(self) -> list[str]:
        return [PARTITIONS[p] for p in self.user_partition]


def largest_remainder(total: int, fractions) -> list[int]:
    """Integer quotas summing to total; ties break in partition order."""
    exact = [total * f for f in fractions]
    counts = [int(np.floor(x)) for x in exact]
    leftover = total - sum(counts)
    order = sorted(range(len(fractions)),
                   key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def split(
    graph: GraphData,
    rings: list[RingRecord],
    fractions: tuple[float, float, float],
    rng: np.random.Generator,
) -> SplitAssignment:
    """Deterministic ring-stratified split."""
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise ConfigError("split fractions must be three positive numbers")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigError(f"split fractions must sum to 1, got {sum(fractions)!r}")

    users = graph.nodes["user"]
    partition = np.full(users.n, -1, dtype=np.int8)
    ring_partition: dict[int, int] = {}
    warnings: list[str] = []

    by_type: dict[int, list[RingRecord]] = {}
    for ring in sorted(rings, key=lambda r: r.ring_id):
        by_type.setdefault(ring.ring_type, []).append(ring)

    for ring_type, members in sorted(by_type.items()):
        if len(members) < len(PARTITIONS):
            warnings.append(
                f"{RING_TYPE_NAMES[ring_type]}: only {len(members)} rings for "
                f"{len(PARTITIONS)} partitions; stratification is degenerate"
            )
        order = rng.permutation(len(members))
        quotas = largest_remainder(len(members), fractions)
        cursor = 0
        for part_idx, quota in enumerate(quotas):
            for j in order[cursor:cursor + quota]:
                ring = members[j]
                ring_partition[ring.ring_id] = part_idx
                partition[ring.member_user_ids] = part_idx
            cursor += quota

    legit = np.flatnonzero(users.ring_ids < 0)
    legit = legit[rng.permutation(legit.size)]
    quotas = largest_remainder(legit.size, fractions)
    cursor = 0
    for part_idx, quota in enumerate(quotas):
        partition[legit[cursor:cursor + quota]] = part_idx
        cursor += quota

    assert (partition >= 0).all(), "every user must receive a partition"
    return SplitAssignment(
        user_partition=partition,
        ring_partition=ring_partition,
        fractions=fractions,  # type: ignore[arg-type]
        warnings=tuple(warnings),
    )


@dataclass
class LeakageReport:
    """Hubs adjacent to fraud users in more than one partition."""

    leaking_devices: int
    leaking_ips: int
    device_ids: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    ip_ids: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))

    @property
    def clean(self) -> bool:
        return self.leaking_devices == 0 and self.leaking_ips == 0


def _leaking_hubs(graph: GraphData, assignment: SplitAssignment,
                  relation: str, hub_type: str) -> np.ndarray:
    edge = graph.edges[relation]
    fraud_user = graph.nodes["user"].labels == 1
    mask = fraud_user[edge.src]
    hubs = edge.dst[mask]
    parts = assignment.user_partition[edge.src[mask]]
    n_hubs = graph.nodes[hub_type].n
    seen = np.zeros((n_hubs, len(PARTITIONS)), dtype=bool)
    seen[hubs, parts] = True
    return np.flatnonzero(seen.sum(axis=1) > 1)


def verify_no_leakage(graph: GraphData, assignment: SplitAssignment) -> LeakageReport:
    """Count devices/IPs whose fraud neighbors straddle partitions.

    Legitimate users sharing a hub across partitions is not leakage; only
    fraud-adjacent hubs count.
    """
    if assignment.user_partition.shape[0] != graph.nodes["user"].n:
        raise ConfigError("assignment does not cover all users")
    devices = _leaking_hubs(graph, assignment, "uses_device", "device")
    ips = _leaking_hubs(graph, assignment, "uses_ip", "ip_address")
    return LeakageReport(
        leaking_devices=int(devices.size),
        leaking_ips=int(ips.size),
        device_ids=devices,
        ip_ids=ips,
    )
