"""Graph analytics: motif fingerprints, homophily, feature calibration.

All statistics are read-only over the immutable graph. Homophily uses
derived labels: node types without real labels count as fraud when they
belong to a ring; flights never count as fraud.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import GraphData
from .legit import SIMULATION_WINDOW_DAYS
from .rings import RingRecord
from .schema import LABELED_TYPES, RELATIONS, RING_TYPE_NAMES

WINDOW_HOURS = SIMULATION_WINDOW_DAYS * 24.0


# ---------------------------------------------------------------------------
# motif fingerprints

MOTIF_STATISTICS = (
    "users_per_device",
    "users_per_ip",
    "reviews_per_ghost_hotel",
    "loyalty_chain_length",
    "booking_velocity",
    "chargeback_rate",
)


@dataclass(frozen=True)
class MotifRow:
    """mean +- sd of one statistic for one ring type (or the legit baseline)."""

    group: str
    statistic: str
    mean: float
    sd: float
    n: int


@dataclass
class MotifFingerprint:
    rows: list[MotifRow]

    def value(self, group: str, statistic: str) -> MotifRow:
        for row in self.rows:
            if row.group == group and row.statistic == statistic:
                return row
        raise KeyError((group, statistic))

    def to_text(self) -> str:
        out = io.StringIO()
        groups = list(dict.fromkeys(r.group for r in self.rows))
        width = max(len(s) for s in MOTIF_STATISTICS) + 2
        out.write("statistic".ljust(width))
        out.write("".join(g.rjust(18) for g in groups) + "\n")
        for stat in MOTIF_STATISTICS:
            out.write(stat.ljust(width))
            for g in groups:
                try:
                    row = self.value(g, stat)
                    out.write(f"{row.mean:8.2f} ±{row.sd:6.2f}".rjust(18))
                except KeyError:
                    out.write("--".rjust(18))
            out.write("\n")
        return out.getvalue()

    def to_csv(self) -> str:
        lines = ["group,statistic,mean,sd,n"]
        for r in self.rows:
            lines.append(f"{r.group},{r.statistic},{r.mean!r},{r.sd!r},{r.n}")
        return "\n".join(lines) + "\n"


def _mean_sd(values: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return 0.0, 0.0
    return float(np.mean(values)), float(np.std(values))


def _ring_node_ids(graph: GraphData, node_type: str, ring_id: int) -> np.ndarray:
    return np.flatnonzero(graph.nodes[node_type].ring_ids == ring_id)


def _per_ring_stats(graph: GraphData, ring: RingRecord,
                    device_degree: np.ndarray, ip_degree: np.ndarray,
                    hotel_reviews: np.ndarray) -> dict[str, float]:
    rid = ring.ring_id
    stats: dict[str, float] = {}

    devices = _ring_node_ids(graph, "device", rid)
    stats["users_per_device"] = float(device_degree[devices].mean()) if devices.size else 0.0
    ips = _ring_node_ids(graph, "ip_address", rid)
    stats["users_per_ip"] = float(ip_degree[ips].mean()) if ips.size else 0.0

    ghosts = _ring_node_ids(graph, "hotel", rid)
    stats["reviews_per_ghost_hotel"] = (
        float(hotel_reviews[ghosts].mean()) if ghosts.size else 0.0
    )

    loyalty_ring = graph.nodes["loyalty_account"].ring_ids
    transfers = graph.edges["transferred_to"]
    in_ring = loyalty_ring[transfers.src] == rid if transfers.m else np.empty(0, bool)
    stats["loyalty_chain_length"] = float(np.count_nonzero(in_ring))

    bookings = _ring_node_ids(graph, "booking", rid)
    table = graph.nodes["booking"]
    ts_col = table.feature_names.index("timestamp_days")
    cb_col = table.feature_names.index("chargeback_flag")
    if bookings.size:
        ts = table.features[bookings, ts_col]
        span_hours = max((ts.max() - ts.min()) * 24.0, 1e-9) if bookings.size > 1 else WINDOW_HOURS
        stats["booking_velocity"] = bookings.size / span_hours
        stats["chargeback_rate"] = float(table.features[bookings, cb_col].mean())
    else:
        stats["booking_velocity"] = 0.0
        stats["chargeback_rate"] = 0.0
    return stats


def motif_fingerprints(graph: GraphData, rings: list[RingRecord]) -> MotifFingerprint:
    """Per-ring statistics aggregated to mean +- sd per ring type, plus the
    legit baseline computed over the ring-free subgraph."""
    device_degree = np.bincount(graph.edges["uses_device"].dst,
                                minlength=graph.nodes["device"].n)
    ip_degree = np.bincount(graph.edges["uses_ip"].dst,
                            minlength=graph.nodes["ip_address"].n)
    hotel_reviews = np.bincount(graph.edges["about"].dst,
                                minlength=graph.nodes["hotel"].n)

    per_type: dict[str, list[dict[str, float]]] = {n: [] for n in RING_TYPE_NAMES.values()}
    for ring in rings:
        per_type[RING_TYPE_NAMES[ring.ring_type]].append(
            _per_ring_stats(graph, ring, device_degree, ip_degree, hotel_reviews)
        )

    rows: list[MotifRow] = []
    for type_name, stats_list in per_type.items():
        for stat in MOTIF_STATISTICS:
            values = np.array([s[stat] for s in stats_list])
            mean, sd = _mean_sd(values)
            rows.append(MotifRow(type_name, stat, mean, sd, len(stats_list)))

    rows.extend(_legit_baseline(graph, device_degree, ip_degree, hotel_reviews))
    return MotifFingerprint(rows)


def _legit_baseline(graph: GraphData, device_degree, ip_degree, hotel_reviews) -> list[MotifRow]:
    rows: list[MotifRow] = []
    legit_dev = graph.nodes["device"].ring_ids < 0
    rows.append(MotifRow("legit", "users_per_device",
                         *_mean_sd(device_degree[legit_dev]), int(legit_dev.sum())))
    legit_ip = graph.nodes["ip_address"].ring_ids < 0
    rows.append(MotifRow("legit", "users_per_ip",
                         *_mean_sd(ip_degree[legit_ip]), int(legit_ip.sum())))
    legit_hotel = graph.nodes["hotel"].ring_ids < 0
    rows.append(MotifRow("legit", "reviews_per_ghost_hotel",
                         *_mean_sd(hotel_reviews[legit_hotel]), int(legit_hotel.sum())))
    rows.append(MotifRow("legit", "loyalty_chain_length", 0.0, 0.0, 0))

    # per-user booking velocity and chargeback rate over legit bookings
    users = graph.nodes["user"]
    bookings = graph.nodes["booking"]
    made = graph.edges["made"]
    legit_edge = users.ring_ids[made.src] < 0
    owners = made.src[legit_edge]
    booked = made.dst[legit_edge]
    counts = np.bincount(owners, minlength=users.n).astype(float)
    legit_users = users.ring_ids < 0
    velocity = counts[legit_users] / WINDOW_HOURS
    rows.append(MotifRow("legit", "booking_velocity",
                         *_mean_sd(velocity), int(legit_users.sum())))

    cb_col = bookings.feature_names.index("chargeback_flag")
    flags = bookings.features[booked, cb_col]
    cb_sum = np.bincount(owners, weights=flags, minlength=users.n)
    with_bookings = legit_users & (counts > 0)
    per_user_rate = cb_sum[with_bookings] / counts[with_bookings]
    rows.append(MotifRow("legit", "chargeback_rate",
                         *_mean_sd(per_user_rate), int(with_bookings.sum())))
    return rows


# ---------------------------------------------------------------------------
# homophily

HOMOPHILY_RELATIONS = tuple(n for n in RELATIONS if n != "referred")


@dataclass(frozen=True)
class HomophilyRow:
    relation: str
    homophily: float
    fraud_fraud_density: float
    n_edges: int


@dataclass
class HomophilyReport:
    rows: dict[str, HomophilyRow]

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"{'relation':<16}{'homophily':>12}{'fraud_density':>15}{'edges':>10}\n")
        for name in HOMOPHILY_RELATIONS:
            if name in self.rows:
                r = self.rows[name]
                out.write(f"{name:<16}{r.homophily:>12.4f}{r.fraud_fraud_density:>15.4f}"
                          f"{r.n_edges:>10}\n")
            else:
                out.write(f"{name:<16}{'--':>12}{'--':>15}{0:>10}\n")
        return out.getvalue()

    def to_csv(self) -> str:
        lines = ["relation,homophily,fraud_fraud_density,n_edges"]
        for name in HOMOPHILY_RELATIONS:
            if name in self.rows:
                r = self.rows[name]
                lines.append(f"{name},{r.homophily!r},{r.fraud_fraud_density!r},{r.n_edges}")
        return "\n".join(lines) + "\n"


def derived_labels(graph: GraphData, node_type: str) -> np.ndarray:
    """Fraud indicator per node: real labels where they exist, ring
    membership for infrastructure types, never for flights."""
    table = graph.nodes[node_type]
    if node_type == "flight":
        return np.zeros(table.n, dtype=bool)
    if node_type in LABELED_TYPES:
        return table.labels.astype(bool)
    return table.ring_ids >= 0


def homophily(graph: GraphData) -> HomophilyReport:
    """Per-relation same-label edge fraction and fraud-fraud density.

    The user->user referral edge is omitted: both endpoints share a type,
    so its homophily collapses to global prevalence and says nothing about
    ring structure. Empty relations are reported as absent.
    """
    rows: dict[str, HomophilyRow] = {}
    label_cache = {t: derived_labels(graph, t) for t in graph.nodes}
    for name in HOMOPHILY_RELATIONS:
        edge = graph.edges[name]
        if edge.m == 0:
            continue
        src_lab = label_cache[edge.src_type][edge.src]
        dst_lab = label_cache[edge.dst_type][edge.dst]
        same = src_lab == dst_lab
        both = src_lab & dst_lab
        rows[name] = HomophilyRow(
            relation=name,
            homophily=float(same.mean()),
            fraud_fraud_density=float(both.mean()),
            n_edges=edge.m,
        )
    return HomophilyReport(rows)


# ---------------------------------------------------------------------------
# feature calibration

@dataclass(frozen=True)
class CalibrationRow:
    feature: str
    d: float
    fraud_mean: float
    legit_mean: float
    passed: bool


@dataclass
class CalibrationReport:
    rows: list[CalibrationRow]
    limit: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"{'feature':<24}{'cohens_d':>10}{'fraud_mean':>14}"
                  f"{'legit_mean':>14}{'pass':>6}\n")
        for r in self.rows:
            out.write(f"{r.feature:<24}{r.d:>10.3f}{r.fraud_mean:>14.3f}"
                      f"{r.legit_mean:>14.3f}{'yes' if r.passed else 'NO':>6}\n")
        return out.getvalue()

    def to_csv(self) -> str:
        lines = ["feature,cohens_d,fraud_mean,legit_mean,pass"]
        for r in self.rows:
            lines.append(f"{r.feature},{r.d!r},{r.fraud_mean!r},{r.legit_mean!r},{int(r.passed)}")
        return "\n".join(lines) + "\n"


def cohens_d(graph: GraphData, limit: float = 0.30) -> CalibrationReport:
    """Standardized fraud-vs-legit mean difference per user feature.

    d = (mean_fraud - mean_legit) / pooled sd. A zero pooled sd with unequal
    means is reported as an infinite-d failure.
    """
    users = graph.nodes["user"]
    fraud = users.labels == 1
    legit = ~fraud
    n1, n0 = int(fraud.sum()), int(legit.sum())
    if n1 == 0 or n0 == 0:
        raise ValidationError(
            "calibration is undefined: need both fraud and legit users "
            f"(got {n1} fraud, {n0} legit)"
        )
    rows: list[CalibrationRow] = []
    for idx, name in enumerate(users.feature_names):
        col = users.features[:, idx]
        x1, x0 = col[fraud], col[legit]
        m1, m0 = float(x1.mean()), float(x0.mean())
        var1 = float(x1.var(ddof=1)) if n1 > 1 else 0.0
        var0 = float(x0.var(ddof=1)) if n0 > 1 else 0.0
        pooled = np.sqrt(((n1 - 1) * var1 + (n0 - 1) * var0) / max(n1 + n0 - 2, 1))
        if pooled == 0.0:
            d = 0.0 if m1 == m0 else float("inf") * np.sign(m1 - m0)
        else:
            d = (m1 - m0) / pooled
        rows.append(CalibrationRow(name, float(d), m1, m0, abs(d) < limit))
    return CalibrationReport(rows, limit)
