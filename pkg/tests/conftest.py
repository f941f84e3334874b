import numpy as np
import pytest

from ringbench import generate
from ringbench.rng import make_rng
from ringbench.split import split


@pytest.fixture(scope="session")
def small_result():
    return generate(scale="small", seed=42)


@pytest.fixture(scope="session")
def small_split(small_result):
    return split(small_result.graph, small_result.rings, (0.6, 0.2, 0.2),
                 make_rng(42, "split"))


@pytest.fixture(scope="session")
def medium_result():
    return generate(scale="medium", seed=42)


@pytest.fixture(scope="session")
def medium_split(medium_result):
    return split(medium_result.graph, medium_result.rings, (0.6, 0.2, 0.2),
                 make_rng(42, "split"))


@pytest.fixture(scope="session")
def toy_bundle(tmp_path_factory):
    """A generated, split, exported toy bundle on disk."""
    from ringbench.export import export_bundle

    out = tmp_path_factory.mktemp("toy_bundle")
    result = generate(scale="toy", seed=7)
    assignment = split(result.graph, result.rings,
                       result.resolved.split_fractions, make_rng(7, "split"))
    manifest = export_bundle(result.graph, result.rings, assignment,
                             result.resolved, out, result.fraud_rate)
    return out, result, assignment, manifest
