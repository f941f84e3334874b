"""Agent-based simulation of the legitimate traveler population.

Each traveler samples behavioral parameters from calibrated distributions,
then acts: devices and IPs are drawn from private pools with rare sharing,
bookings target the flight/hotel catalogs, a fraction of hotel stays get
reviewed, and referrals connect a sparse user-user trickle. All rows carry
label 0 and no ring membership.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .builder import GraphBuilder
from .errors import ConfigError
from .schema import (
    AIRLINE_CODES,
    AIRPORT_CODES,
    CABIN_CLASSES,
    CARD_TYPES,
    CITY_CODES,
    COUNTRY_CODES,
    DEVICE_TYPES,
)

SIMULATION_WINDOW_DAYS = 90.0
WINDOW_START_UNIX = 1_735_689_600  # fixed epoch anchor for departure times


def _country_weights() -> np.ndarray:
    # Four documented head markets, remaining mass over a fixed 12-country
    # tail with geometric decay.
    head = np.array([0.20, 0.15, 0.10, 0.08])
    tail = 0.85 ** np.arange(len(COUNTRY_CODES) - head.size)
    tail = tail / tail.sum() * (1.0 - head.sum())
    return np.concatenate([head, tail])


@dataclass(frozen=True)
class LegitParams:
    """Calibration knobs for the legitimate population (documented defaults)."""

    account_age_shape: float = 2.0
    account_age_scale: float = 180.0
    booking_count_lam: float = 2.2          # 30-day feature
    older_bookings_lam: float = 0.6         # window bookings beyond the 30-day count
    lead_time_shape: float = 2.0
    lead_time_scale: float = 30.0
    booking_value_mu: float = 6.1
    booking_value_sigma: float = 0.7
    cancellation_beta: tuple[float, float] = (3.6, 16.4)   # mean ~0.18
    velocity_beta: tuple[float, float] = (2.0, 8.0)        # mean 0.20
    devices_per_user: tuple[float, ...] = (0.45, 0.40, 0.15)  # P(1), P(2), P(3)
    ips_per_user_range: tuple[int, int] = (1, 4)
    device_share_prob: float = 0.02
    ip_share_prob: float = 0.01
    cards_per_user: tuple[float, ...] = (0.65, 0.35)       # P(1), P(2)
    loyalty_prob: float = 0.55
    flight_booking_share: float = 0.55
    review_prob: float = 0.72              # per hotel booking
    review_rating_weights: tuple[float, ...] = (0.04, 0.08, 0.18, 0.35, 0.35)
    chargeback_prob: float = 0.02
    referral_prob: float = 0.05
    hotel_rating_mean: float = 3.91
    hotel_rating_sd: float = 0.35
    country_weights: np.ndarray = field(default_factory=_country_weights)


def flight_catalog_size(n_users: int) -> int:
    """Deterministic catalog size: fixed per scale, capped at 1,500."""
    return min(1500, max(75, round(0.15 * n_users)))


def hotel_catalog_size(n_users: int) -> int:
    return max(20, round(0.08 * n_users))


def _counts_from_probs(rng, n, probs, first=1):
    return rng.choice(np.arange(first, first + len(probs)), size=n, p=np.asarray(probs))


def _private_pool_edges(rng, counts: np.ndarray, share_prob: float):
    """Allocate pool nodes per user with rare reuse of an earlier user's node.

    Returns (n_new_nodes, edge_src, edge_dst) with ids local to this pool.
    """
    n_users = counts.shape[0]
    share = (rng.random(n_users) < share_prob) & (counts >= 1)
    new_counts = counts - share.astype(np.int64)
    starts = np.concatenate([[0], np.cumsum(new_counts)[:-1]])
    total_new = int(new_counts.sum())
    owners = np.repeat(np.arange(n_users, dtype=np.int64), new_counts)
    own_targets = np.concatenate(
        [np.arange(s, s + c, dtype=np.int64) for s, c in zip(starts, new_counts)]
    ) if total_new else np.empty(0, dtype=np.int64)
    # a shared slot reuses a uniformly chosen node of an earlier user
    share &= starts > 0
    share_users = np.flatnonzero(share).astype(np.int64)
    share_targets = (rng.random(share_users.size) * starts[share_users]).astype(np.int64)
    src = np.concatenate([owners, share_users])
    dst = np.concatenate([own_targets, share_targets])
    return total_new, src, dst


def generate_legit_population(
    n_users: int,
    rng: np.random.Generator,
    builder: GraphBuilder | None = None,
    params: LegitParams = LegitParams(),
    catalog_user_basis: int | None = None,
) -> GraphBuilder:
    """Populate a builder with the legitimate population and catalogs.

    catalog_user_basis sizes the flight/hotel catalogs (defaults to
    n_users); the pipeline passes the total user count so catalogs do not
    shrink with the fraud share.
    """
    if n_users < 1:
        raise ConfigError(f"legitimate population must be >= 1 user, got {n_users}")
    b = builder if builder is not None else GraphBuilder()
    if b.node_count("user"):
        raise ConfigError("legit population must be generated into an empty graph")
    p = params
    L = n_users
    basis = catalog_user_basis if catalog_user_basis is not None else L

    # -- flight catalog ------------------------------------------------
    n_flights = flight_catalog_size(basis)
    origin = rng.integers(0, len(AIRPORT_CODES), n_flights)
    destination = (origin + rng.integers(1, len(AIRPORT_CODES), n_flights)) % len(AIRPORT_CODES)
    flights = np.column_stack([
        origin.astype(float),
        destination.astype(float),
        rng.integers(0, len(AIRLINE_CODES), n_flights).astype(float),
        WINDOW_START_UNIX + rng.uniform(0, SIMULATION_WINDOW_DAYS * 86400.0, n_flights),
        rng.lognormal(6.0, 0.5, n_flights),
        rng.uniform(1.0, 14.0, n_flights),
        rng.choice(len(CABIN_CLASSES), n_flights, p=[0.7, 0.2, 0.1]).astype(float),
    ])
    b.add_nodes("flight", flights)

    # -- hotel catalog -------------------------------------------------
    n_hotels = hotel_catalog_size(basis)
    hotels = np.column_stack([
        rng.integers(1, 6, n_hotels).astype(float),
        np.clip(rng.normal(p.hotel_rating_mean, p.hotel_rating_sd, n_hotels), 1.0, 5.0),
        np.zeros(n_hotels),                                  # is_ghost
        np.zeros(n_hotels),                                  # review_count, finalized later
        rng.integers(180, 3600, n_hotels).astype(float),
        rng.integers(0, len(CITY_CODES), n_hotels).astype(float),
        rng.lognormal(4.8, 0.5, n_hotels),
        rng.integers(1, 21, n_hotels).astype(float),
        rng.beta(5.0, 2.0, n_hotels),
    ])
    b.add_nodes("hotel", hotels)

    # -- traveler profiles ----------------------------------------------
    account_age = rng.gamma(p.account_age_shape, p.account_age_scale, L)
    booking_count_30d = rng.poisson(p.booking_count_lam, L)
    velocity = rng.beta(*p.velocity_beta, size=L)
    cancellation = rng.beta(*p.cancellation_beta, size=L)
    country = rng.choice(len(p.country_weights), L, p=p.country_weights)
    n_devices = _counts_from_probs(rng, L, p.devices_per_user)
    n_ips = rng.integers(p.ips_per_user_range[0], p.ips_per_user_range[1] + 1, L)
    n_cards = _counts_from_probs(rng, L, p.cards_per_user)
    has_loyalty = rng.random(L) < p.loyalty_prob
    n_bookings = booking_count_30d + rng.poisson(p.older_bookings_lam, L)

    # -- devices ---------------------------------------------------------
    n_new_dev, dev_src, dev_dst = _private_pool_edges(rng, n_devices, p.device_share_prob)
    devices = np.column_stack([
        rng.choice(len(DEVICE_TYPES), n_new_dev, p=[0.30, 0.35, 0.25, 0.07, 0.03]).astype(float),
        np.zeros(n_new_dev),                                 # shared_user_count, finalized later
        (rng.random(n_new_dev) < 0.02).astype(float),
        rng.uniform(0, 1000, n_new_dev),
        rng.poisson(20, n_new_dev).astype(float),
    ])
    device_ids = b.add_nodes("device", devices)
    b.add_edges("uses_device", dev_src, device_ids[0] + dev_dst if n_new_dev else dev_dst)

    # -- IPs --------------------------------------------------------------
    n_new_ip, ip_src, ip_dst = _private_pool_edges(rng, n_ips, p.ip_share_prob)
    ips = np.column_stack([
        (rng.random(n_new_ip) < 0.05).astype(float),
        (rng.random(n_new_ip) < 0.03).astype(float),
        rng.beta(1.2, 20.0, n_new_ip),
        np.zeros(n_new_ip),                                  # shared_user_count
        rng.uniform(0, 1000, n_new_ip),
    ])
    ip_ids = b.add_nodes("ip_address", ips)
    b.add_edges("uses_ip", ip_src, ip_ids[0] + ip_dst if n_new_ip else ip_dst)

    # -- payment cards -----------------------------------------------------
    total_cards = int(n_cards.sum())
    card_owner = np.repeat(np.arange(L, dtype=np.int64), n_cards)
    cards = np.column_stack([
        rng.choice(len(CARD_TYPES), total_cards, p=[0.45, 0.35, 0.12, 0.08]).astype(float),
        np.zeros(total_cards),                               # shared_user_count
        (rng.random(total_cards) < 0.01).astype(float),
        country[card_owner].astype(float),
        rng.lognormal(9.0, 0.6, total_cards),
        rng.uniform(30, 2000, total_cards),
    ])
    card_ids = b.add_nodes("payment_card", cards)
    b.add_edges("owns_card", card_owner, card_ids)
    card_start = np.concatenate([[0], np.cumsum(n_cards)[:-1]]) + card_ids[0]

    # -- loyalty accounts ----------------------------------------------------
    loyal_users = np.flatnonzero(has_loyalty).astype(np.int64)
    n_loyal = loyal_users.size
    loyalty = np.column_stack([
        rng.lognormal(8.0, 1.0, n_loyal),
        rng.poisson(0.3, n_loyal).astype(float),
        rng.beta(1.5, 12.0, n_loyal),
        rng.choice(4, n_loyal, p=[0.55, 0.25, 0.15, 0.05]).astype(float),
        account_age[loyal_users] * rng.uniform(0.3, 1.0, n_loyal),
        rng.poisson(0.5, n_loyal).astype(float),
        rng.uniform(0.5, 2.0, n_loyal),
    ])
    loyalty_ids = b.add_nodes("loyalty_account", loyalty)
    b.add_edges("has_loyalty", loyal_users, loyalty_ids)

    # -- bookings --------------------------------------------------------------
    B = int(n_bookings.sum())
    owner = np.repeat(np.arange(L, dtype=np.int64), n_bookings)
    is_flight = rng.random(B) < p.flight_booking_share
    flight_target = rng.integers(0, n_flights, B)
    hotel_target = rng.integers(0, n_hotels, B)
    value = rng.lognormal(p.booking_value_mu, p.booking_value_sigma, B)
    lead = rng.gamma(p.lead_time_shape, p.lead_time_scale, B)
    cancelled = rng.random(B) < cancellation[owner]
    chargeback = rng.random(B) < p.chargeback_prob
    timestamp = rng.uniform(0, SIMULATION_WINDOW_DAYS, B)
    bookings = np.column_stack([
        value,
        lead,
        chargeback.astype(float),
        cancelled.astype(float),
        is_flight.astype(float),
        (1 + rng.poisson(0.8, B)).astype(float),
        timestamp,
        (rng.random(B) < 0.03).astype(float),
        np.where(rng.random(B) < 0.1, rng.uniform(500, 20000, B), 0.0),
    ])
    booking_ids = b.add_nodes("booking", bookings)
    b.add_edges("made", owner, booking_ids)
    b.add_edges("for_flight", booking_ids[is_flight], flight_target[is_flight])
    hotel_rows = ~is_flight
    b.add_edges("for_hotel", booking_ids[hotel_rows], hotel_target[hotel_rows])
    card_pick = card_start[owner] + rng.integers(0, n_cards[owner])
    b.add_edges("paid_with", booking_ids, card_pick)

    # -- reviews -----------------------------------------------------------------
    reviewed = hotel_rows & (rng.random(B) < p.review_prob)
    R = int(reviewed.sum())
    ratings = rng.choice(
        np.arange(1, 6), R, p=np.asarray(p.review_rating_weights)
    ).astype(float)
    reviews = np.column_stack([
        ratings,
        np.ones(R),
        rng.integers(1, 31, R).astype(float),
        rng.poisson(60, R).astype(float),
        rng.poisson(2, R).astype(float),
        (rng.random(R) < 0.25).astype(float),
    ])
    review_ids = b.add_nodes("review", reviews)
    b.add_edges("wrote", owner[reviewed], review_ids)
    b.add_edges("about", review_ids, hotel_target[reviewed])
    review_count = np.bincount(owner[reviewed], minlength=L).astype(float)

    # -- referrals ------------------------------------------------------------------
    referred_mask = (rng.random(L) < p.referral_prob) & (np.arange(L) > 0)
    referred_users = np.flatnonzero(referred_mask).astype(np.int64)
    referrers = (rng.random(referred_users.size) * referred_users).astype(np.int64)
    b.add_edges("referred", referrers, referred_users)

    # -- user rows: behavioral features plus realized activity summaries ------------
    value_sum = np.zeros(L)
    np.add.at(value_sum, owner, value)
    fallback_value = rng.lognormal(p.booking_value_mu, p.booking_value_sigma, L)
    avg_value = np.where(n_bookings > 0, value_sum / np.maximum(n_bookings, 1), fallback_value)
    users = np.column_stack([
        account_age,
        booking_count_30d.astype(float),
        n_devices.astype(float),
        velocity,
        n_ips.astype(float),
        n_cards.astype(float),
        review_count,
        avg_value,
        cancellation,
        country.astype(float),
    ])
    b.add_nodes("user", users)
    return b
