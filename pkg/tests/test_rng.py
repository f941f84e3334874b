import math

import numpy as np
import pytest
from scipy import stats

from ringbench.errors import ConfigError
from ringbench.rng import (
    DistributionSpec,
    bernoulli,
    categorical,
    gamma,
    lognormal,
    make_rng,
    poisson,
    sample,
    uniform_int,
    uniform_real,
)


def test_same_seed_and_label_identical():
    a = make_rng(42, "legit").random(100)
    b = make_rng(42, "legit").random(100)
    assert np.array_equal(a, b)


def test_distinct_labels_differ():
    a = make_rng(42, "legit").random(100)
    b = make_rng(42, "rings").random(100)
    assert a[0] != b[0]
    assert not np.array_equal(a, b)


def test_distinct_seeds_differ():
    a = make_rng(42, "legit").random(100)
    b = make_rng(43, "legit").random(100)
    assert not np.array_equal(a, b)


def test_stream_independence_correlation():
    n = 100_000
    a = make_rng(42, "legit").random(n)
    b = make_rng(42, "rings").random(n)
    r = np.corrcoef(a, b)[0, 1]
    assert abs(r) < 0.02


def test_gamma_mean_matches_reference():
    draws = sample(gamma(2.0, 180.0), make_rng(1, "gamma-mean"), size=100_000)
    assert abs(draws.mean() - 360.0) < 5.0


def test_degenerate_uniform_is_exact():
    assert sample(uniform_real(4.6, 4.6), make_rng(0, "u")) == 4.6


def test_lognormal_mean_matches_analytic_formula():
    # analytic mean exp(mu + sigma^2/2) ~ 569.6; the often-quoted ~450 for
    # these parameters is wrong
    expected = math.exp(6.1 + 0.7 ** 2 / 2.0)
    draws = sample(lognormal(6.1, 0.7), make_rng(2, "ln-mean"), size=100_000)
    assert abs(draws.mean() - expected) < 10.0


@pytest.mark.parametrize("spec,cdf", [
    (gamma(2.0, 180.0), stats.gamma(2.0, scale=180.0).cdf),
    (lognormal(6.1, 0.7), stats.lognorm(0.7, scale=math.exp(6.1)).cdf),
    (uniform_real(2.0, 7.0), stats.uniform(2.0, 5.0).cdf),
])
def test_continuous_samplers_ks_distance(spec, cdf):
    draws = sample(spec, make_rng(5, f"ks/{spec.kind}"), size=100_000)
    d, _ = stats.kstest(draws, cdf)
    assert d < 0.01


@pytest.mark.parametrize("spec,pmf_pairs", [
    (poisson(2.2), [(k, stats.poisson(2.2).pmf(k)) for k in range(15)]),
    (bernoulli(0.3), [(0, 0.7), (1, 0.3)]),
    (uniform_int(1, 4), [(k, 0.25) for k in (1, 2, 3, 4)]),
    (categorical([0.5, 0.3, 0.2]), [(0, 0.5), (1, 0.3), (2, 0.2)]),
])
def test_discrete_samplers_match_pmf(spec, pmf_pairs):
    n = 100_000
    draws = sample(spec, make_rng(6, f"pmf/{spec.kind}"), size=n)
    for value, prob in pmf_pairs:
        observed = float((draws == value).mean())
        assert abs(observed - prob) < 0.01, (spec.kind, value)


@pytest.mark.parametrize("bad", [
    lambda: gamma(-1.0, 180.0),
    lambda: gamma(2.0, 0.0),
    lambda: poisson(0.0),
    lambda: lognormal(6.1, -0.1),
    lambda: uniform_real(3.0, 1.0),
    lambda: bernoulli(1.5),
    lambda: categorical([0.5, 0.6]),
    lambda: DistributionSpec("weibull", {}),
    lambda: DistributionSpec("gamma", {"shape": 2.0}),
])
def test_invalid_parameters_raise(bad):
    with pytest.raises(ConfigError):
        bad()


def test_analytic_means():
    assert gamma(2.0, 180.0).mean() == 360.0
    assert poisson(2.2).mean() == 2.2
    assert uniform_int(1, 4).mean() == 2.5
    assert categorical([0.5, 0.5]).mean() == 0.5
