"""Deterministic random streams and the distribution samplers built on them.

Every random draw in a generation run comes from a labelled PCG64 stream
derived from the root seed: the label is hashed (sha256) into four 32-bit
words and combined with the seed in a numpy SeedSequence. Identical
(seed, label) pairs always yield identical streams; distinct labels yield
independent streams, so adding rings never perturbs the legitimate
population's draws.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError

_MASK64 = (1 << 64) - 1

DISTRIBUTION_KINDS = (
    "gamma", "poisson", "lognormal", "uniform_real", "uniform_int",
    "bernoulli", "categorical",
)


def make_rng(seed: int, stream_label: str) -> np.random.Generator:
    """Return the deterministic stream for (seed, stream_label)."""
    digest = hashlib.sha256(stream_label.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    ss = np.random.SeedSequence([int(seed) & _MASK64, *words])
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class DistributionSpec:
    """A named distribution with kind-specific parameters.

    Parameters by kind:
      gamma: shape, scale          poisson: lam
      lognormal: mu, sigma         uniform_real / uniform_int: low, high
      bernoulli: p                 categorical: weights (sum to 1 within 1e-9)
    """

    kind: str
    params: dict

    def __post_init__(self) -> None:
        if self.kind not in DISTRIBUTION_KINDS:
            raise ConfigError(
                f"unknown distribution kind {self.kind!r}; "
                f"valid kinds: {', '.join(DISTRIBUTION_KINDS)}"
            )
        p = self.params
        try:
            if self.kind == "gamma":
                if p["shape"] <= 0 or p["scale"] <= 0:
                    raise ConfigError("gamma shape and scale must be > 0")
            elif self.kind == "poisson":
                if p["lam"] <= 0:
                    raise ConfigError("poisson rate must be > 0")
            elif self.kind == "lognormal":
                if p["sigma"] <= 0:
                    raise ConfigError("lognormal sigma must be > 0")
            elif self.kind in ("uniform_real", "uniform_int"):
                if p["low"] > p["high"]:
                    raise ConfigError("uniform low must be <= high")
            elif self.kind == "bernoulli":
                if not 0.0 <= p["p"] <= 1.0:
                    raise ConfigError("bernoulli p must be in [0, 1]")
            elif self.kind == "categorical":
                w = np.asarray(p["weights"], dtype=float)
                if w.size == 0 or (w < 0).any():
                    raise ConfigError("categorical weights must be non-negative")
                if abs(float(w.sum()) - 1.0) > 1e-9:
                    raise ConfigError(
                        f"categorical weights must sum to 1 (got {w.sum()!r})"
                    )
        except KeyError as exc:
            raise ConfigError(
                f"distribution {self.kind!r} missing parameter {exc.args[0]!r}"
            ) from None

    def mean(self) -> float:
        """Analytic mean of the distribution."""
        p = self.params
        if self.kind == "gamma":
            return p["shape"] * p["scale"]
        if self.kind == "poisson":
            return p["lam"]
        if self.kind == "lognormal":
            return math.exp(p["mu"] + p["sigma"] ** 2 / 2.0)
        if self.kind == "uniform_real":
            return (p["low"] + p["high"]) / 2.0
        if self.kind == "uniform_int":
            return (p["low"] + p["high"]) / 2.0
        if self.kind == "bernoulli":
            return p["p"]
        w = np.asarray(p["weights"], dtype=float)
        return float((np.arange(w.size) * w).sum())


def sample(
    spec: DistributionSpec,
    rng: np.random.Generator,
    size: Union[int, None] = None,
):
    """Draw from spec; returns a scalar when size is None, else an ndarray."""
    p = spec.params
    if spec.kind == "gamma":
        out = rng.gamma(p["shape"], p["scale"], size=size)
    elif spec.kind == "poisson":
        out = rng.poisson(p["lam"], size=size)
    elif spec.kind == "lognormal":
        out = rng.lognormal(p["mu"], p["sigma"], size=size)
    elif spec.kind == "uniform_real":
        if p["low"] == p["high"]:
            out = np.full(size if size is not None else (), p["low"], dtype=float)
        else:
            out = rng.uniform(p["low"], p["high"], size=size)
    elif spec.kind == "uniform_int":
        out = rng.integers(p["low"], p["high"] + 1, size=size)
    elif spec.kind == "bernoulli":
        out = (rng.random(size=size) < p["p"]).astype(np.int64)
    else:  # categorical
        w = np.asarray(p["weights"], dtype=float)
        w = w / w.sum()
        out = rng.choice(w.size, size=size, p=w)
    if size is None:
        return out.item() if isinstance(out, np.ndarray) else out
    return out


def gamma(shape: float, scale: float) -> DistributionSpec:
    return DistributionSpec("gamma", {"shape": shape, "scale": scale})


def poisson(lam: float) -> DistributionSpec:
    return DistributionSpec("poisson", {"lam": lam})


def lognormal(mu: float, sigma: float) -> DistributionSpec:
    return DistributionSpec("lognormal", {"mu": mu, "sigma": sigma})


def uniform_real(low: float, high: float) -> DistributionSpec:
    return DistributionSpec("uniform_real", {"low": low, "high": high})


def uniform_int(low: int, high: int) -> DistributionSpec:
    return DistributionSpec("uniform_int", {"low": low, "high": high})


def bernoulli(p: float) -> DistributionSpec:
    return DistributionSpec("bernoulli", {"p": p})


def categorical(weights) -> DistributionSpec:
    return DistributionSpec("categorical", {"weights": list(weights)})
