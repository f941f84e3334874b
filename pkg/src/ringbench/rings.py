"""Fraud ring injection: ticketing stars, ghost-hotel cliques, ATO chains.

Rings are injected independently, each from its own labelled random stream,
and never share infrastructure with each other or with legitimate users:
every device, IP, card, booking, review, hotel, and loyalty account created
here belongs to exactly one ring. Member features are drawn from mildly
shifted versions of the legitimate distributions so that pooled
fraud-vs-legit feature separation stays inside the calibration gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .builder import GraphBuilder
from .config import RING_SIZE_BOUNDS, ResolvedConfig
from .errors import ConfigError
from .graph import GraphData
from .legit import SIMULATION_WINDOW_DAYS, _country_weights
from .rng import make_rng
from .schema import (
    CARD_TYPES,
    CITY_CODES,
    DEVICE_TYPES,
    RING_TYPE_ATO,
    RING_TYPE_GHOST_HOTEL,
    RING_TYPE_TICKETING,
)


@dataclass(frozen=True)
class RingRecord:
    """Ground truth for one injected ring."""

    ring_id: int
    ring_type: int
    member_user_ids: np.ndarray
    shared_device_ids: np.ndarray
    shared_ip_ids: np.ndarray
    ghost_hotel_ids: np.ndarray
    mule_loyalty_ids: np.ndarray

    @property
    def size(self) -> int:
        return int(self.member_user_ids.shape[0])


@dataclass(frozen=True)
class RingPlan:
    """Sampled shape of one ring, fixed before any node is created."""

    ring_id: int
    ring_type: int
    n_members: int
    n_hotels: int = 0   # ghost rings
    n_mules: int = 0    # ATO rings


@dataclass(frozen=True)
class FraudParams:
    """Shift knobs for ring-member behavior (documented defaults).

    User-feature shifts are deliberately small: the pooled fraud population
    must stay within the |Cohen's d| < 0.30 calibration gate while each
    ring type keeps its own learnable signature.
    """

    # ticketing: premium flight chargeback stars. Device/IP hub counts are
    # weighted inside the documented 1-4 / 1-6 ranges; ticketing is the only
    # type shifted on device_count, ip_count, and booking value, so those
    # signals stay one-sided for a pooled linear classifier.
    tick_devices_weights: tuple[float, ...] = (0.40, 0.30, 0.20, 0.10)  # P(1..4)
    tick_ips_weights: tuple[float, ...] = (0.19, 0.23, 0.25, 0.17, 0.10, 0.06)  # P(1..6)
    tick_bookings_lam: float = 1.8            # bookings = 1 + Poisson
    tick_booking_count_lam: float = 2.45      # 30-day feature
    tick_review_count_lam: float = 0.78       # sampled history, no review nodes
    tick_value_mu: float = 6.45               # premium-cabin shift of 6.1
    tick_velocity_beta: tuple[float, float] = (2.25, 7.75)
    tick_chargeback_range: tuple[float, float] = (0.55, 0.95)
    tick_lead_range: tuple[float, float] = (0.0, 7.0)

    # ghost hotels: bipartite review farms; signature features are short
    # account age and the structural review count
    ghost_age_factor: float = 0.55            # young accounts
    ghost_booking_count_lam: float = 2.35
    ghost_velocity_beta: tuple[float, float] = (2.15, 7.85)
    ghost_chargeback_prob: float = 0.04
    ghost_hub_fraction: float = 0.25          # members sharing the farm device
    ghost_ip_users_per_ip: float = 1.1
    ghost_rating_range: tuple[float, float] = (4.6, 5.0)
    ghost_listing_age_range: tuple[int, int] = (1, 60)

    # account takeover: loyalty drain chains; signature features are booking
    # count, velocity, and cancellation rate
    ato_bookings_lam: float = 1.5
    ato_booking_count_lam: float = 2.60
    ato_review_count_lam: float = 0.78        # sampled history, no review nodes
    ato_velocity_beta: tuple[float, float] = (2.50, 7.50)
    ato_cancellation_beta: tuple[float, float] = (4.8, 15.2)   # mean ~0.24
    ato_chargeback_range: tuple[float, float] = (0.16, 0.46)
    ato_lead_range: tuple[float, float] = (0.0, 3.0)
    ato_flight_share: float = 0.65
    ato_device_users_per_device: float = 1.1
    ato_ip_users_per_ip: float = 1.2
    ato_geo_mismatch_prob: float = 0.8

    # shared across types: private padding keeps per-member device/IP counts
    # overlapping the legitimate 1..3 / 1..4 pools
    pad_device_probs: tuple[float, ...] = (0.42, 0.46, 0.12)    # P(0), P(1), P(2)
    pad_ip_probs: tuple[float, ...] = (0.20, 0.35, 0.35, 0.10)  # P(0..3)
    cards_per_member: tuple[float, ...] = (0.65, 0.35)
    cancellation_beta: tuple[float, float] = (3.6, 16.4)
    account_age_shape: float = 2.0
    account_age_scale: float = 180.0
    value_sigma: float = 0.7
    country_weights: np.ndarray = field(default_factory=_country_weights)

    def backed_off(self, factor: float) -> "FraudParams":
        """Shrink every sampled feature shift toward the legit anchor.

        Applied when a run's planned fraud share exceeds the reference
        share, so the pooled feature-overlap gate keeps holding as ring
        counts grow. factor=1 returns the params unchanged; factor=0 would
        remove all sampled shifts. Structural counts (hub devices/IPs) are
        not touched.
        """
        f = float(np.clip(factor, 0.0, 1.0))
        if f >= 1.0:
            return self

        def beta_mean(mean: float, concentration: float = 10.0):
            return (concentration * mean, concentration * (1.0 - mean))

        def toward(anchor: float, value: float) -> float:
            return anchor + (value - anchor) * f

        return replace(
            self,
            tick_booking_count_lam=toward(2.2, self.tick_booking_count_lam),
            ghost_booking_count_lam=toward(2.2, self.ghost_booking_count_lam),
            ato_booking_count_lam=toward(2.2, self.ato_booking_count_lam),
            tick_review_count_lam=toward(0.9, self.tick_review_count_lam),
            ato_review_count_lam=toward(0.9, self.ato_review_count_lam),
            tick_velocity_beta=beta_mean(toward(0.2, self.tick_velocity_beta[0]
                                                / sum(self.tick_velocity_beta))),
            ghost_velocity_beta=beta_mean(toward(0.2, self.ghost_velocity_beta[0]
                                                 / sum(self.ghost_velocity_beta))),
            ato_velocity_beta=beta_mean(toward(0.2, self.ato_velocity_beta[0]
                                               / sum(self.ato_velocity_beta))),
            ato_cancellation_beta=beta_mean(
                toward(0.18, self.ato_cancellation_beta[0]
                       / sum(self.ato_cancellation_beta)), 20.0),
            ghost_age_factor=toward(1.0, self.ghost_age_factor),
            tick_value_mu=toward(6.1, self.tick_value_mu),
        )


_TYPE_ORDER = ("ticketing", "ghost_hotel", "ato")
_TYPE_CODE = {
    "ticketing": RING_TYPE_TICKETING,
    "ghost_hotel": RING_TYPE_GHOST_HOTEL,
    "ato": RING_TYPE_ATO,
}


def plan_rings(resolved: ResolvedConfig, rng: np.random.Generator) -> list[RingPlan]:
    """Sample every ring's shape from the per-type size ranges."""
    plans: list[RingPlan] = []
    ring_id = 0
    for type_name in _TYPE_ORDER:
        count = resolved.ring_counts[type_name]
        lo, hi = resolved.ring_size_ranges[type_name]
        sizes = rng.integers(lo, hi + 1, count)
        if type_name == "ghost_hotel":
            h_lo, h_hi = resolved.ghost_hotels_range
            hotels = rng.integers(h_lo, h_hi + 1, count)
        else:
            hotels = np.zeros(count, dtype=np.int64)
        if type_name == "ato":
            m_lo, m_hi = resolved.ato_mules_range
            mules = rng.integers(m_lo, m_hi + 1, count)
        else:
            mules = np.zeros(count, dtype=np.int64)
        for i in range(count):
            plans.append(RingPlan(
                ring_id=ring_id,
                ring_type=_TYPE_CODE[type_name],
                n_members=int(sizes[i]),
                n_hotels=int(hotels[i]),
                n_mules=int(mules[i]),
            ))
            ring_id += 1
    return plans


def planned_member_total(plans: list[RingPlan]) -> int:
    return sum(p.n_members for p in plans)


def _check_range(value: int, bounds: tuple[int, int], what: str, enforce: bool) -> None:
    lo, hi = bounds
    if enforce and not lo <= value <= hi:
        raise ConfigError(f"{what} must be in [{lo}, {hi}], got {value}")


class _MemberKit:
    """Per-ring member profile pieces shared by all three injectors."""

    def __init__(self, rng: np.random.Generator, k: int, p: FraudParams,
                 cancellation_beta: tuple[float, float] | None = None) -> None:
        self.rng = rng
        self.k = k
        self.p = p
        self.cancellation = rng.beta(*(cancellation_beta or p.cancellation_beta), size=k)
        self.country = rng.choice(len(p.country_weights), k, p=p.country_weights)
        self.n_cards = rng.choice(np.array([1, 2]), size=k,
                                  p=np.asarray(p.cards_per_member))

    def add_users(self, b: GraphBuilder, *, ring_id: int, ring_type: int,
                  account_age, booking_count, device_counts, velocity,
                  ip_counts, review_counts, avg_value) -> np.ndarray:
        users = np.column_stack([
            account_age,
            np.asarray(booking_count, dtype=float),
            np.asarray(device_counts, dtype=float),
            velocity,
            np.asarray(ip_counts, dtype=float),
            self.n_cards.astype(float),
            np.asarray(review_counts, dtype=float),
            avg_value,
            self.cancellation,
            self.country.astype(float),
        ])
        return b.add_nodes("user", users, labels=1, ring_id=ring_id, ring_type=ring_type)

    def add_cards(self, b: GraphBuilder, user_ids: np.ndarray, *, ring_id: int,
                  ring_type: int, compromised_prob: float) -> tuple[np.ndarray, np.ndarray]:
        """Ring-internal cards; returns (start id per member, count per member)."""
        rng = self.rng
        total = int(self.n_cards.sum())
        owner_local = np.repeat(np.arange(self.k), self.n_cards)
        cards = np.column_stack([
            rng.choice(len(CARD_TYPES), total, p=[0.45, 0.35, 0.12, 0.08]).astype(float),
            np.zeros(total),
            (rng.random(total) < compromised_prob).astype(float),
            self.country[owner_local].astype(float),
            rng.lognormal(9.0, 0.6, total),
            rng.uniform(30, 2000, total),
        ])
        card_ids = b.add_nodes("payment_card", cards, labels=0,
                               ring_id=ring_id, ring_type=ring_type)
        b.add_edges("owns_card", user_ids[owner_local], card_ids)
        starts = card_ids[0] + np.concatenate([[0], np.cumsum(self.n_cards)[:-1]])
        return starts, self.n_cards

    def pick_cards(self, starts: np.ndarray, counts: np.ndarray,
                   owner_local: np.ndarray) -> np.ndarray:
        return starts[owner_local] + self.rng.integers(0, counts[owner_local])

    def booking_rows(self, *, owner_local, values, leads, chargeback_flags,
                     geo_prob: float, is_flight, points_used=None) -> np.ndarray:
        rng = self.rng
        n = owner_local.size
        cancelled = rng.random(n) < self.cancellation[owner_local]
        if points_used is None:
            points_used = np.zeros(n)
        return np.column_stack([
            values,
            leads,
            np.asarray(chargeback_flags, dtype=float),
            cancelled.astype(float),
            np.asarray(is_flight, dtype=float),
            (1 + rng.poisson(0.8, n)).astype(float),
            rng.uniform(0, SIMULATION_WINDOW_DAYS, n),
            (rng.random(n) < geo_prob).astype(float),
            points_used,
        ])


def _pool_assignment(rng, n_members: int, users_per_node: float):
    """Assign each member one node from a pool sized for the target ratio."""
    if n_members <= 1:
        return max(n_members, 1), np.zeros(n_members, dtype=np.int64)
    pool_size = min(max(2, round(n_members / users_per_node)), n_members)
    assign = np.arange(n_members, dtype=np.int64) % pool_size
    rng.shuffle(assign)
    return pool_size, assign


def _pad_counts(rng, n: int, probs) -> np.ndarray:
    return rng.choice(len(probs), size=n, p=np.asarray(probs))


def _add_pad_nodes(b: GraphBuilder, rng, relation: str, node_type: str,
                   user_ids: np.ndarray, pads: np.ndarray,
                   ring_id: int, ring_type: int) -> np.ndarray:
    """Private per-member devices/IPs padding counts toward legit levels."""
    total = int(pads.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    if node_type == "device":
        feats = np.column_stack([
            rng.choice(len(DEVICE_TYPES), total, p=[0.30, 0.35, 0.25, 0.07, 0.03]).astype(float),
            np.zeros(total),
            (rng.random(total) < 0.05).astype(float),
            rng.uniform(0, 1000, total),
            rng.poisson(20, total).astype(float),
        ])
    else:
        feats = np.column_stack([
            (rng.random(total) < 0.05).astype(float),
            (rng.random(total) < 0.03).astype(float),
            rng.beta(1.2, 20.0, total),
            np.zeros(total),
            rng.uniform(0, 1000, total),
        ])
    ids = b.add_nodes(node_type, feats, labels=0, ring_id=ring_id, ring_type=ring_type)
    b.add_edges(relation, np.repeat(user_ids, pads), ids)
    return ids


def inject_ticketing_ring(
    builder: GraphBuilder,
    rng: np.random.Generator,
    size: int,
    ring_id: int,
    n_flights: int,
    params: FraudParams = FraudParams(),
    enforce_bounds: bool = True,
) -> RingRecord:
    """Star-topology chargeback ring: all members on 1-4 devices, 1-6 IPs."""
    _check_range(size, RING_SIZE_BOUNDS["ticketing"], "ticketing ring size", enforce_bounds)
    p = params
    k = size
    rt = RING_TYPE_TICKETING
    kit = _MemberKit(rng, k, p)

    n_dev = 1 + int(rng.choice(len(p.tick_devices_weights), p=np.asarray(p.tick_devices_weights)))
    n_ip = 1 + int(rng.choice(len(p.tick_ips_weights), p=np.asarray(p.tick_ips_weights)))

    devices = np.column_stack([
        rng.choice(len(DEVICE_TYPES), n_dev, p=[0.30, 0.35, 0.25, 0.07, 0.03]).astype(float),
        np.zeros(n_dev),
        (rng.random(n_dev) < 0.10).astype(float),
        rng.uniform(0, 120, n_dev),
        rng.poisson(40, n_dev).astype(float),
    ])
    device_ids = builder.add_nodes("device", devices, ring_id=ring_id, ring_type=rt)
    ips = np.column_stack([
        (rng.random(n_ip) < 0.25).astype(float),
        (rng.random(n_ip) < 0.10).astype(float),
        rng.beta(3.0, 10.0, n_ip),
        np.zeros(n_ip),
        rng.uniform(0, 120, n_ip),
    ])
    ip_ids = builder.add_nodes("ip_address", ips, ring_id=ring_id, ring_type=rt)

    n_bookings = 1 + rng.poisson(p.tick_bookings_lam, k)
    B = int(n_bookings.sum())
    owner_local = np.repeat(np.arange(k), n_bookings)
    values = rng.lognormal(p.tick_value_mu, p.value_sigma, B)
    value_sum = np.zeros(k)
    np.add.at(value_sum, owner_local, values)
    avg_value = value_sum / n_bookings

    user_ids = kit.add_users(
        builder, ring_id=ring_id, ring_type=rt,
        account_age=rng.gamma(p.account_age_shape, p.account_age_scale, k),
        booking_count=rng.poisson(p.tick_booking_count_lam, k),
        device_counts=np.full(k, n_dev),
        velocity=rng.beta(*p.tick_velocity_beta, size=k),
        ip_counts=np.full(k, n_ip),
        review_counts=rng.poisson(p.tick_review_count_lam, k),
        avg_value=avg_value,
    )
    # every member uses every shared hub
    builder.add_edges("uses_device", np.repeat(user_ids, n_dev), np.tile(device_ids, k))
    builder.add_edges("uses_ip", np.repeat(user_ids, n_ip), np.tile(ip_ids, k))

    card_starts, card_counts = kit.add_cards(
        builder, user_ids, ring_id=ring_id, ring_type=rt, compromised_prob=0.05)

    ring_rate = float(rng.uniform(*p.tick_chargeback_range))
    rows = kit.booking_rows(
        owner_local=owner_local, values=values,
        leads=rng.uniform(*p.tick_lead_range, size=B),
        chargeback_flags=rng.random(B) < ring_rate,
        geo_prob=0.05, is_flight=np.ones(B),
    )
    booking_ids = builder.add_nodes("booking", rows, labels=1, ring_id=ring_id, ring_type=rt)
    builder.add_edges("made", user_ids[owner_local], booking_ids)
    builder.add_edges("for_flight", booking_ids, rng.integers(0, n_flights, B))
    builder.add_edges("paid_with", booking_ids,
                      kit.pick_cards(card_starts, card_counts, owner_local))

    return RingRecord(
        ring_id=ring_id, ring_type=rt,
        member_user_ids=user_ids,
        shared_device_ids=device_ids,
        shared_ip_ids=ip_ids,
        ghost_hotel_ids=np.empty(0, dtype=np.int64),
        mule_loyalty_ids=np.empty(0, dtype=np.int64),
    )


def inject_ghost_hotel_ring(
    builder: GraphBuilder,
    rng: np.random.Generator,
    n_reviewers: int,
    n_hotels: int,
    ring_id: int,
    n_legit_hotels: int,
    params: FraudParams = FraudParams(),
    enforce_bounds: bool = True,
) -> RingRecord:
    """Fake listings plus a reviewer clique: complete bipartite 5-star reviews."""
    _check_range(n_reviewers, RING_SIZE_BOUNDS["ghost_hotel"], "ghost ring reviewers",
                 enforce_bounds)
    if enforce_bounds and not 1 <= n_hotels <= 3:
        raise ConfigError(f"ghost ring hotel count must be in [1, 3], got {n_hotels}")
    p = params
    n = n_reviewers
    rt = RING_TYPE_GHOST_HOTEL
    kit = _MemberKit(rng, n, p)

    age_lo, age_hi = p.ghost_listing_age_range
    hotels = np.column_stack([
        rng.integers(3, 6, n_hotels).astype(float),
        rng.uniform(*p.ghost_rating_range, size=n_hotels),
        np.ones(n_hotels),
        np.zeros(n_hotels),  # review_count finalized from edges
        rng.integers(age_lo, age_hi + 1, n_hotels).astype(float),
        rng.integers(0, len(CITY_CODES), n_hotels).astype(float),
        rng.lognormal(4.8, 0.5, n_hotels),
        rng.integers(1, 21, n_hotels).astype(float),
        rng.beta(5.0, 2.0, n_hotels),
    ])
    hotel_ids = builder.add_nodes("hotel", hotels, labels=1, ring_id=ring_id, ring_type=rt)

    pads_dev = _pad_counts(rng, n, p.pad_device_probs)
    pads_ip = _pad_counts(rng, n, p.pad_ip_probs)

    # bookings: one verified stay per ghost hotel plus one legit-hotel cover stay
    per_member = n_hotels + 1
    B = n * per_member
    values = rng.lognormal(6.1, p.value_sigma, B)
    avg_value = values.reshape(n, per_member).mean(axis=1)

    user_ids = kit.add_users(
        builder, ring_id=ring_id, ring_type=rt,
        account_age=rng.gamma(p.account_age_shape,
                              p.account_age_scale * p.ghost_age_factor, n),
        booking_count=rng.poisson(p.ghost_booking_count_lam, n),
        device_counts=1 + pads_dev,
        velocity=rng.beta(*p.ghost_velocity_beta, size=n),
        ip_counts=1 + pads_ip,
        review_counts=np.full(n, n_hotels),
        avg_value=avg_value,
    )

    # device farm: a hub shared by a minority of members, solos for the rest
    n_hub = min(n, max(2, round(p.ghost_hub_fraction * n)))
    n_solo = n - n_hub
    farm_devices = np.column_stack([
        rng.choice(len(DEVICE_TYPES), 1 + n_solo, p=[0.30, 0.35, 0.25, 0.07, 0.03]).astype(float),
        np.zeros(1 + n_solo),
        (rng.random(1 + n_solo) < 0.10).astype(float),
        rng.uniform(0, 200, 1 + n_solo),
        rng.poisson(30, 1 + n_solo).astype(float),
    ])
    farm_ids = builder.add_nodes("device", farm_devices, ring_id=ring_id, ring_type=rt)
    hub_id, solo_ids = farm_ids[0], farm_ids[1:]
    member_order = rng.permutation(n)
    builder.add_edges("uses_device", user_ids[member_order[:n_hub]],
                      np.full(n_hub, hub_id))
    builder.add_edges("uses_device", user_ids[member_order[n_hub:]], solo_ids)
    _add_pad_nodes(builder, rng, "uses_device", "device", user_ids, pads_dev, ring_id, rt)

    pool_size, assign = _pool_assignment(rng, n, p.ghost_ip_users_per_ip)
    pool_ips = np.column_stack([
        (rng.random(pool_size) < 0.15).astype(float),
        (rng.random(pool_size) < 0.05).astype(float),
        rng.beta(2.0, 12.0, pool_size),
        np.zeros(pool_size),
        rng.uniform(0, 200, pool_size),
    ])
    pool_ip_ids = builder.add_nodes("ip_address", pool_ips, ring_id=ring_id, ring_type=rt)
    builder.add_edges("uses_ip", user_ids, pool_ip_ids[assign])
    _add_pad_nodes(builder, rng, "uses_ip", "ip_address", user_ids, pads_ip, ring_id, rt)

    card_starts, card_counts = kit.add_cards(
        builder, user_ids, ring_id=ring_id, ring_type=rt, compromised_prob=0.02)

    owner_local = np.repeat(np.arange(n), per_member)
    rows = kit.booking_rows(
        owner_local=owner_local, values=values,
        leads=rng.gamma(2.0, 30.0, B),
        chargeback_flags=rng.random(B) < p.ghost_chargeback_prob,
        geo_prob=0.03, is_flight=np.zeros(B),
    )
    booking_ids = builder.add_nodes("booking", rows, labels=1, ring_id=ring_id, ring_type=rt)
    builder.add_edges("made", user_ids[owner_local], booking_ids)
    # per member: the ghost stays first, then the cover stay at a legit hotel
    targets = np.empty((n, per_member), dtype=np.int64)
    targets[:, :n_hotels] = hotel_ids
    targets[:, n_hotels] = rng.integers(0, n_legit_hotels, n)
    builder.add_edges("for_hotel", booking_ids, targets.ravel())
    builder.add_edges("paid_with", booking_ids,
                      kit.pick_cards(card_starts, card_counts, owner_local))

    # the complete bipartite review clique: every member rates every listing 5
    R = n * n_hotels
    reviews = np.column_stack([
        np.full(R, 5.0),
        np.ones(R),
        rng.integers(0, 4, R).astype(float),
        rng.poisson(80, R).astype(float),
        rng.poisson(5, R).astype(float),
        (rng.random(R) < 0.4).astype(float),
    ])
    review_ids = builder.add_nodes("review", reviews, labels=1, ring_id=ring_id, ring_type=rt)
    builder.add_edges("wrote", np.repeat(user_ids, n_hotels), review_ids)
    builder.add_edges("about", review_ids, np.tile(hotel_ids, n))

    return RingRecord(
        ring_id=ring_id, ring_type=rt,
        member_user_ids=user_ids,
        shared_device_ids=farm_ids,
        shared_ip_ids=pool_ip_ids,
        ghost_hotel_ids=hotel_ids,
        mule_loyalty_ids=np.empty(0, dtype=np.int64),
    )


def inject_ato_ring(
    builder: GraphBuilder,
    rng: np.random.Generator,
    n_compromised: int,
    n_mules: int,
    ring_id: int,
    n_flights: int,
    n_legit_hotels: int,
    params: FraudParams = FraudParams(),
    enforce_bounds: bool = True,
) -> RingRecord:
    """Account-takeover ring draining loyalty points through a mule chain."""
    _check_range(n_compromised, RING_SIZE_BOUNDS["ato"], "ATO compromised count",
                 enforce_bounds)
    if enforce_bounds and not 2 <= n_mules <= 8:
        raise ConfigError(f"ATO mule count must be in [2, 8], got {n_mules}")
    p = params
    n = n_compromised
    rt = RING_TYPE_ATO
    kit = _MemberKit(rng, n, p, cancellation_beta=p.ato_cancellation_beta)

    pads_dev = _pad_counts(rng, n, p.pad_device_probs)
    pads_ip = _pad_counts(rng, n, p.pad_ip_probs)

    n_bookings = 1 + rng.poisson(p.ato_bookings_lam, n)
    B = int(n_bookings.sum())
    owner_local = np.repeat(np.arange(n), n_bookings)
    values = rng.lognormal(6.1, p.value_sigma, B)
    value_sum = np.zeros(n)
    np.add.at(value_sum, owner_local, values)
    avg_value = value_sum / n_bookings

    user_ids = kit.add_users(
        builder, ring_id=ring_id, ring_type=rt,
        account_age=rng.gamma(p.account_age_shape, p.account_age_scale, n),
        booking_count=rng.poisson(p.ato_booking_count_lam, n),
        device_counts=1 + pads_dev,
        velocity=rng.beta(*p.ato_velocity_beta, size=n),
        ip_counts=1 + pads_ip,
        review_counts=rng.poisson(p.ato_review_count_lam, n),
        avg_value=avg_value,
    )

    dev_pool_size, dev_assign = _pool_assignment(rng, n, p.ato_device_users_per_device)
    pool_devices = np.column_stack([
        rng.choice(len(DEVICE_TYPES), dev_pool_size, p=[0.30, 0.35, 0.25, 0.07, 0.03]).astype(float),
        np.zeros(dev_pool_size),
        (rng.random(dev_pool_size) < 0.20).astype(float),
        rng.uniform(0, 120, dev_pool_size),
        rng.poisson(35, dev_pool_size).astype(float),
    ])
    pool_dev_ids = builder.add_nodes("device", pool_devices, ring_id=ring_id, ring_type=rt)
    builder.add_edges("uses_device", user_ids, pool_dev_ids[dev_assign])
    _add_pad_nodes(builder, rng, "uses_device", "device", user_ids, pads_dev, ring_id, rt)

    ip_pool_size, ip_assign = _pool_assignment(rng, n, p.ato_ip_users_per_ip)
    attacker_ips = np.column_stack([
        (rng.random(ip_pool_size) < 0.45).astype(float),
        (rng.random(ip_pool_size) < 0.30).astype(float),
        rng.beta(4.0, 8.0, ip_pool_size),
        np.zeros(ip_pool_size),
        rng.uniform(0, 60, ip_pool_size),
    ])
    attacker_ip_ids = builder.add_nodes("ip_address", attacker_ips,
                                        ring_id=ring_id, ring_type=rt)
    builder.add_edges("uses_ip", user_ids, attacker_ip_ids[ip_assign])
    _add_pad_nodes(builder, rng, "uses_ip", "ip_address", user_ids, pads_ip, ring_id, rt)

    card_starts, card_counts = kit.add_cards(
        builder, user_ids, ring_id=ring_id, ring_type=rt, compromised_prob=0.70)

    # compromised loyalty accounts, one per member; mules receive the points
    compromised = np.column_stack([
        rng.lognormal(7.0, 1.0, n),
        (1 + rng.poisson(1.0, n)).astype(float),
        rng.beta(4.0, 6.0, n),
        rng.choice(4, n, p=[0.55, 0.25, 0.15, 0.05]).astype(float),
        rng.gamma(2.0, 120.0, n),
        rng.poisson(2.0, n).astype(float),
        rng.uniform(0.5, 2.0, n),
    ])
    comp_ids = builder.add_nodes("loyalty_account", compromised, labels=1,
                                 ring_id=ring_id, ring_type=rt)
    builder.add_edges("has_loyalty", user_ids, comp_ids)

    mules = np.column_stack([
        rng.lognormal(9.2, 0.8, n_mules),
        (3 + rng.poisson(6.0, n_mules)).astype(float),
        rng.beta(6.0, 4.0, n_mules),
        rng.choice(4, n_mules, p=[0.55, 0.25, 0.15, 0.05]).astype(float),
        rng.uniform(10, 400, n_mules),
        rng.poisson(4.0, n_mules).astype(float),
        rng.uniform(0.5, 2.0, n_mules),
    ])
    mule_ids = builder.add_nodes("loyalty_account", mules, labels=1,
                                 ring_id=ring_id, ring_type=rt)
    # fan-in to the first mule, then a linear mule chain
    builder.add_edges("transferred_to", comp_ids, np.full(n, mule_ids[0]))
    if n_mules > 1:
        builder.add_edges("transferred_to", mule_ids[:-1], mule_ids[1:])

    ring_rate = float(rng.uniform(*p.ato_chargeback_range))
    is_flight = rng.random(B) < p.ato_flight_share
    rows = kit.booking_rows(
        owner_local=owner_local, values=values,
        leads=rng.uniform(*p.ato_lead_range, size=B),
        chargeback_flags=rng.random(B) < ring_rate,
        geo_prob=p.ato_geo_mismatch_prob, is_flight=is_flight,
        points_used=np.where(rng.random(B) < 0.6, rng.uniform(2000, 50000, B), 0.0),
    )
    booking_ids = builder.add_nodes("booking", rows, labels=1, ring_id=ring_id, ring_type=rt)
    builder.add_edges("made", user_ids[owner_local], booking_ids)
    builder.add_edges("for_flight", booking_ids[is_flight],
                      rng.integers(0, n_flights, int(is_flight.sum())))
    builder.add_edges("for_hotel", booking_ids[~is_flight],
                      rng.integers(0, n_legit_hotels, int((~is_flight).sum())))
    builder.add_edges("paid_with", booking_ids,
                      kit.pick_cards(card_starts, card_counts, owner_local))

    return RingRecord(
        ring_id=ring_id, ring_type=rt,
        member_user_ids=user_ids,
        shared_device_ids=pool_dev_ids,
        shared_ip_ids=attacker_ip_ids,
        ghost_hotel_ids=np.empty(0, dtype=np.int64),
        mule_loyalty_ids=mule_ids,
    )


def inject_plans(
    builder: GraphBuilder,
    plans: list[RingPlan],
    seed: int,
    n_flights: int,
    n_legit_hotels: int,
    params: FraudParams = FraudParams(),
    enforce_bounds: bool = True,
) -> list[RingRecord]:
    """Inject every planned ring, each from its own labelled stream."""
    records: list[RingRecord] = []
    for plan in plans:
        rng = make_rng(seed, f"ring/{plan.ring_id}")
        if plan.ring_type == RING_TYPE_TICKETING:
            rec = inject_ticketing_ring(
                builder, rng, plan.n_members, plan.ring_id, n_flights,
                params, enforce_bounds)
        elif plan.ring_type == RING_TYPE_GHOST_HOTEL:
            rec = inject_ghost_hotel_ring(
                builder, rng, plan.n_members, plan.n_hotels, plan.ring_id,
                n_legit_hotels, params, enforce_bounds)
        else:
            rec = inject_ato_ring(
                builder, rng, plan.n_members, plan.n_mules, plan.ring_id,
                n_flights, n_legit_hotels, params, enforce_bounds)
        records.append(rec)
    return records


def observed_fraud_rate(graph: GraphData) -> float:
    users = graph.nodes["user"]
    return float(users.labels.mean()) if users.n else 0.0
