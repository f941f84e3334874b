"""Graph schema: node types, feature column layouts, and edge relations.

The schema is fixed. Nine node types, each with a fixed-width, fixed-order
feature layout, and twelve directed edge relations with fixed endpoint
signatures. Categorical features are stored as small-integer codes; the
code tables live here and are echoed into every export manifest.
"""

from __future__ import annotations

# Feature columns per node type, in storage order. Widths are part of the
# data contract and are validated on every graph.
NODE_FEATURES: dict[str, tuple[str, ...]] = {
    "user": (
        "account_age_days",
        "booking_count_30d",
        "distinct_device_count",
        "velocity_score",
        "ip_count",
        "card_count",
        "review_count_30d",
        "avg_booking_value",
        "cancellation_rate",
        "country_code",
    ),
    "device": (
        "device_type",
        "shared_user_count",
        "is_emulator",
        "first_seen_days",
        "session_count_30d",
    ),
    "ip_address": (
        "is_vpn",
        "is_datacenter",
        "abuse_score",
        "shared_user_count",
        "first_seen_days",
    ),
    "booking": (
        "booking_value_usd",
        "lead_time_days",
        "chargeback_flag",
        "is_cancelled",
        "is_flight",
        "num_travelers",
        "timestamp_days",
        "geo_mismatch_flag",
        "loyalty_points_used",
    ),
    "flight": (
        "origin",
        "destination",
        "airline",
        "departure_unix",
        "base_price",
        "duration_hours",
        "cabin_class",
    ),
    "hotel": (
        "hotel_class",
        "avg_rating",
        "is_ghost",
        "review_count",
        "listing_age_days",
        "city_code",
        "price_per_night",
        "amenity_count",
        "occupancy_rate",
    ),
    "review": (
        "rating",
        "verified_booking",
        "days_after_checkin",
        "review_length",
        "helpful_votes",
        "has_photos",
    ),
    "payment_card": (
        "card_type",
        "shared_user_count",
        "is_compromised",
        "issue_country",
        "credit_limit_usd",
        "card_age_days",
    ),
    "loyalty_account": (
        "point_balance",
        "transfer_count_30d",
        "suspicious_velocity",
        "tier",
        "account_age_days",
        "redemption_count_30d",
        "earn_rate",
    ),
}

NODE_TYPES: tuple[str, ...] = tuple(NODE_FEATURES)

# Directed edge relations: name -> (source type, target type).
RELATIONS: dict[str, tuple[str, str]] = {
    "made": ("user", "booking"),
    "uses_device": ("user", "device"),
    "uses_ip": ("user", "ip_address"),
    "has_loyalty": ("user", "loyalty_account"),
    "owns_card": ("user", "payment_card"),
    "wrote": ("user", "review"),
    "for_flight": ("booking", "flight"),
    "for_hotel": ("booking", "hotel"),
    "paid_with": ("booking", "payment_card"),
    "about": ("review", "hotel"),
    "referred": ("user", "user"),
    "transferred_to": ("loyalty_account", "loyalty_account"),
}

# Review authorship and review target are two views of the same review farm
# structure; ablating one without the other leaves dangling review semantics,
# so they are dropped as a pair.
PAIRED_RELATIONS: dict[str, tuple[str, ...]] = {
    "wrote": ("wrote", "about"),
    "about": ("wrote", "about"),
    "wrote/about": ("wrote", "about"),
}

# Node types whose label column carries real fraud ground truth. The other
# types (device, ip_address, payment_card) are labelled only through ring
# membership, and flights are never fraud-labelled.
LABELED_TYPES: frozenset[str] = frozenset(
    {"user", "booking", "hotel", "review", "loyalty_account"}
)

RING_TYPE_NONE = 0
RING_TYPE_TICKETING = 1
RING_TYPE_GHOST_HOTEL = 2
RING_TYPE_ATO = 3
RING_TYPE_NAMES: dict[int, str] = {
    RING_TYPE_TICKETING: "ticketing",
    RING_TYPE_GHOST_HOTEL: "ghost_hotel",
    RING_TYPE_ATO: "ato",
}

# Stored shared_user_count is a bounded version of the true hub degree; the
# raw degree is only reachable through the graph itself.
SHARED_USER_COUNT_CAP = 3

# Columns exported as integers (codes, flags, counts). Everything else is
# exported with shortest round-trip float formatting.
INTEGER_COLUMNS: dict[str, frozenset[str]] = {
    "user": frozenset({"booking_count_30d", "distinct_device_count", "ip_count",
                       "card_count", "review_count_30d", "country_code"}),
    "device": frozenset({"device_type", "shared_user_count", "is_emulator",
                         "session_count_30d"}),
    "ip_address": frozenset({"is_vpn", "is_datacenter", "shared_user_count"}),
    "booking": frozenset({"chargeback_flag", "is_cancelled", "is_flight",
                          "num_travelers", "geo_mismatch_flag"}),
    "flight": frozenset({"origin", "destination", "airline", "cabin_class"}),
    "hotel": frozenset({"hotel_class", "is_ghost", "review_count",
                        "listing_age_days", "city_code", "amenity_count"}),
    "review": frozenset({"rating", "verified_booking", "days_after_checkin",
                         "review_length", "helpful_votes", "has_photos"}),
    "payment_card": frozenset({"card_type", "shared_user_count", "is_compromised",
                               "issue_country"}),
    "loyalty_account": frozenset({"transfer_count_30d", "tier",
                                  "redemption_count_30d"}),
}

COUNTRY_CODES: tuple[str, ...] = (
    "US", "CN", "DE", "UK",
    "FR", "ES", "IT", "JP", "KR", "IN", "BR", "CA", "AU", "MX", "NL", "AE",
)

AIRPORT_CODES: tuple[str, ...] = (
    "JFK", "LAX", "ORD", "ATL", "DFW", "SFO", "MIA", "SEA", "LHR", "CDG",
    "FRA", "AMS", "MAD", "FCO", "PEK", "PVG", "HND", "ICN", "SIN", "HKG",
    "DXB", "DOH", "SYD", "MEL", "GRU", "MEX", "YYZ", "YVR", "DEL", "BOM",
    "BKK", "KUL", "IST", "ZRH", "VIE", "CPH", "OSL", "ARN", "LIS", "DUB",
)

AIRLINE_CODES: tuple[str, ...] = (
    "AA", "DL", "UA", "BA", "LH", "AF", "KL", "EK", "QR", "SQ", "CX", "NH",
)

CITY_CODES: tuple[str, ...] = (
    "NYC", "LON", "PAR", "BER", "ROM", "MAD", "TYO", "SEL", "SHA", "SIN",
    "DXB", "SYD", "RIO", "MEX", "AMS", "BKK", "IST", "VIE", "LIS", "DUB",
)

CARD_TYPES: tuple[str, ...] = ("visa", "mastercard", "amex", "discover")

DEVICE_TYPES: tuple[str, ...] = ("ios", "android", "web", "tablet", "kiosk")

CABIN_CLASSES: tuple[str, ...] = ("economy", "premium", "business")

LOYALTY_TIERS: tuple[str, ...] = ("base", "silver", "gold", "platinum")

# type -> categorical column -> code labels (index = stored code).
CODE_TABLES: dict[str, dict[str, tuple[str, ...]]] = {
    "user": {"country_code": COUNTRY_CODES},
    "device": {"device_type": DEVICE_TYPES},
    "flight": {"origin": AIRPORT_CODES, "destination": AIRPORT_CODES,
               "airline": AIRLINE_CODES, "cabin_class": CABIN_CLASSES},
    "hotel": {"city_code": CITY_CODES},
    "payment_card": {"card_type": CARD_TYPES, "issue_country": COUNTRY_CODES},
    "loyalty_account": {"tier": LOYALTY_TIERS},
}


def feature_dim(node_type: str) -> int:
    return len(NODE_FEATURES[node_type])


def user_source_relations() -> tuple[str, ...]:
    """Relations whose source type is user, excluding the user->user edge."""
    return tuple(
        name for name, (src, _dst) in RELATIONS.items()
        if src == "user" and name != "referred"
    )
