import numpy as np

from ringbench import generate


def _legit_masks(graph):
    users = graph.nodes["user"]
    return users.ring_ids < 0


def test_all_legit_rows_unlabeled(small_result):
    users = small_result.graph.nodes["user"]
    legit = _legit_masks(small_result.graph)
    assert users.labels[legit].sum() == 0
    assert (users.ring_types[legit] == 0).all()


def test_legit_chargeback_rate(medium_result):
    graph = medium_result.graph
    users = graph.nodes["user"]
    bookings = graph.nodes["booking"]
    made = graph.edges["made"]
    legit_rows = made.dst[users.ring_ids[made.src] < 0]
    flags = bookings.column("chargeback_flag")[legit_rows]
    assert abs(flags.mean() - 0.02) < 0.01


def test_legit_cancellation_rate(medium_result):
    graph = medium_result.graph
    users = graph.nodes["user"]
    bookings = graph.nodes["booking"]
    made = graph.edges["made"]
    legit_rows = made.dst[users.ring_ids[made.src] < 0]
    cancelled = bookings.column("is_cancelled")[legit_rows]
    assert abs(cancelled.mean() - 0.18) < 0.02


def test_legit_users_per_device(medium_result):
    graph = medium_result.graph
    devices = graph.nodes["device"]
    degree = np.bincount(graph.edges["uses_device"].dst, minlength=devices.n)
    legit = devices.ring_ids < 0
    assert abs(degree[legit].mean() - 1.0) < 0.1


def test_country_distribution_head(medium_result):
    users = medium_result.graph.nodes["user"]
    legit = users.ring_ids < 0
    codes = users.column("country_code")[legit]
    # US/CN/DE/UK carry 20/15/10/8 percent
    for code, share in ((0, 0.20), (1, 0.15), (2, 0.10), (3, 0.08)):
        assert abs((codes == code).mean() - share) < 0.02


def test_flight_catalog_fixed_at_medium(medium_result):
    assert medium_result.graph.nodes["flight"].n == 1500


def test_hotel_ratings_centered_for_legit(medium_result):
    hotels = medium_result.graph.nodes["hotel"]
    legit = hotels.ring_ids < 0
    ratings = hotels.column("avg_rating")[legit]
    assert abs(ratings.mean() - 3.91) < 0.1


def test_explicit_user_count_is_exact():
    result = generate(scale=None, n_users=1000, seed=5)
    assert result.graph.nodes["user"].n == 1000


import pytest


@pytest.mark.xfail(
    strict=True,
    reason="reference inconsistency: a 1.3 reviews-per-hotel baseline cannot "
           "coexist with ~7,800 reviews over ~850 hotels from the same "
           "reference tables; the generator matches the gated entity counts, "
           "so the measured baseline is ~9. See decisions ledger.",
)
def test_legit_reviews_per_hotel_published_baseline(medium_result):
    graph = medium_result.graph
    hotels = graph.nodes["hotel"]
    reviews_per_hotel = np.bincount(graph.edges["about"].dst, minlength=hotels.n)
    legit = hotels.ring_ids < 0
    assert abs(reviews_per_hotel[legit].mean() - 1.3) <= 0.9
