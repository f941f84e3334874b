"""Run configuration: scale presets, ring plans, and generation defaults.

A GeneratorConfig captures every knob of a run. resolve() turns it into a
ResolvedConfig with explicit counts and per-type ring-size sampling ranges;
everything downstream is a pure function of the resolved config and the
root seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .errors import ConfigError
from .schema import NODE_FEATURES, RELATIONS, PAIRED_RELATIONS

MIN_EXPLICIT_USERS = 10

# Hard validation bounds for ring sizes. Sampling defaults below are
# narrower; overrides outside these bounds require widen_ring_bounds.
RING_SIZE_BOUNDS: dict[str, tuple[int, int]] = {
    "ticketing": (3, 20),
    "ghost_hotel": (10, 80),
    "ato": (5, 30),
}

# Default sampling ranges (inclusive). Chosen so the medium preset lands on
# the reference motif scales and a ~13% observed user fraud rate.
DEFAULT_RING_SIZE_RANGES: dict[str, tuple[int, int]] = {
    "ticketing": (8, 20),
    "ghost_hotel": (10, 22),
    "ato": (5, 24),
}

GHOST_HOTELS_RANGE = (1, 2)   # sampling default inside the documented 1..3
ATO_MULES_RANGE = (2, 8)


@dataclass(frozen=True)
class ScalePreset:
    """Named scale: user count plus default ring counts per type."""

    name: str
    n_users: int
    n_ticketing_rings: int
    n_ghost_hotel_rings: int
    n_ato_rings: int


PRESETS: dict[str, ScalePreset] = {
    "toy": ScalePreset("toy", 500, 2, 2, 2),
    "small": ScalePreset("small", 2_000, 7, 7, 7),
    "medium": ScalePreset("medium", 10_000, 30, 30, 30),
    "large": ScalePreset("large", 50_000, 175, 175, 175),
    "xlarge": ScalePreset("xlarge", 200_000, 700, 700, 700),
}


def resolve_preset(name: str) -> ScalePreset:
    """Look up a scale preset by name."""
    try:
        return PRESETS[name]
    except KeyError:
        valid = ", ".join(PRESETS)
        raise ConfigError(f"unknown scale preset {name!r}; valid presets: {valid}") from None


@dataclass(frozen=True)
class GeneratorConfig:
    """Every knob of a generation run.

    scale and n_users are alternatives: a preset name, or an explicit user
    count (>= 10). Ring counts default to the preset's. ring_size_overrides
    maps ring type name to an inclusive (low, high) sampling range.
    fraud_rate_target, when set, rescales ring counts (never sizes) toward
    the target fraction; the achieved rate is reported, not forced.
    """

    scale: str | None = "medium"
    n_users: int | None = None
    seed: int = 42
    n_ticketing_rings: int | None = None
    n_ghost_hotel_rings: int | None = None
    n_ato_rings: int | None = None
    ring_size_overrides: dict[str, tuple[int, int]] = field(default_factory=dict)
    fraud_rate_target: float | None = None
    feature_exclusions: frozenset[str] = frozenset()
    relation_exclusions: frozenset[str] = frozenset()
    widen_ring_bounds: bool = False
    split_fractions: tuple[float, float, float] = (0.60, 0.20, 0.20)


@dataclass(frozen=True)
class ResolvedConfig:
    """A GeneratorConfig with all defaults applied and validated."""

    n_users: int
    seed: int
    ring_counts: dict[str, int]            # ring type -> count
    ring_size_ranges: dict[str, tuple[int, int]]
    ghost_hotels_range: tuple[int, int]
    ato_mules_range: tuple[int, int]
    feature_exclusions: frozenset[str]
    relation_exclusions: frozenset[str]
    split_fractions: tuple[float, float, float]
    fraud_rate_target: float | None
    scale_name: str | None
    widen_ring_bounds: bool = False

    def echo(self) -> dict:
        """JSON-serializable echo of the resolved run configuration."""
        return {
            "scale": self.scale_name,
            "n_users": self.n_users,
            "seed": self.seed,
            "ring_counts": dict(self.ring_counts),
            "ring_size_ranges": {k: list(v) for k, v in self.ring_size_ranges.items()},
            "ghost_hotels_range": list(self.ghost_hotels_range),
            "ato_mules_range": list(self.ato_mules_range),
            "feature_exclusions": sorted(self.feature_exclusions),
            "relation_exclusions": sorted(self.relation_exclusions),
            "split_fractions": list(self.split_fractions),
            "fraud_rate_target": self.fraud_rate_target,
        }


def _mean_ring_users(ring_type: str, ranges: dict[str, tuple[int, int]]) -> float:
    lo, hi = ranges[ring_type]
    return (lo + hi) / 2.0


def resolve(config: GeneratorConfig) -> ResolvedConfig:
    """Validate a GeneratorConfig and fill in every default."""
    if config.n_users is not None:
        if config.n_users < MIN_EXPLICIT_USERS:
            raise ConfigError(f"n_users must be >= {MIN_EXPLICIT_USERS}, got {config.n_users}")
        n_users = int(config.n_users)
        preset = resolve_preset(config.scale) if config.scale else None
        scale_name = config.scale if config.scale else None
    else:
        preset = resolve_preset(config.scale or "medium")
        n_users = preset.n_users
        scale_name = preset.name

    if preset is None:
        # Explicit user count without a preset: scale ring counts off medium.
        ref = PRESETS["medium"]
        factor = n_users / ref.n_users
        default_counts = {
            "ticketing": max(0, round(ref.n_ticketing_rings * factor)),
            "ghost_hotel": max(0, round(ref.n_ghost_hotel_rings * factor)),
            "ato": max(0, round(ref.n_ato_rings * factor)),
        }
    else:
        default_counts = {
            "ticketing": preset.n_ticketing_rings,
            "ghost_hotel": preset.n_ghost_hotel_rings,
            "ato": preset.n_ato_rings,
        }

    counts = {
        "ticketing": config.n_ticketing_rings,
        "ghost_hotel": config.n_ghost_hotel_rings,
        "ato": config.n_ato_rings,
    }
    for ring_type, value in counts.items():
        if value is None:
            counts[ring_type] = default_counts[ring_type]
        elif value < 0:
            raise ConfigError(f"ring count for {ring_type} must be >= 0, got {value}")

    ranges = dict(DEFAULT_RING_SIZE_RANGES)
    for ring_type, rng_pair in config.ring_size_overrides.items():
        if ring_type not in ranges:
            valid = ", ".join(ranges)
            raise ConfigError(f"unknown ring type {ring_type!r}; valid types: {valid}")
        lo, hi = int(rng_pair[0]), int(rng_pair[1])
        if lo > hi:
            raise ConfigError(f"ring size range for {ring_type} is empty: ({lo}, {hi})")
        bound_lo, bound_hi = RING_SIZE_BOUNDS[ring_type]
        if not config.widen_ring_bounds and (lo < bound_lo or hi > bound_hi):
            raise ConfigError(
                f"ring size range ({lo}, {hi}) for {ring_type} is outside the "
                f"documented bounds ({bound_lo}, {bound_hi}); set widen_ring_bounds "
                f"to override deliberately"
            )
        if lo < 1:
            raise ConfigError(f"ring sizes must be >= 1, got {lo} for {ring_type}")
        ranges[ring_type] = (lo, hi)

    if config.fraud_rate_target is not None:
        target = config.fraud_rate_target
        if not 0.0 < target < 1.0:
            raise ConfigError(f"fraud_rate_target must be in (0, 1), got {target}")
        expected = sum(
            counts[t] * _mean_ring_users(t, ranges) for t in counts
        )
        if expected <= 0:
            raise ConfigError("fraud_rate_target requires at least one ring")
        factor = target * n_users / expected
        counts = {t: max(0, round(c * factor)) for t, c in counts.items()}

    for name in config.feature_exclusions:
        if name not in NODE_FEATURES["user"]:
            raise ConfigError(f"unknown user feature {name!r}")
    for name in config.relation_exclusions:
        if name not in RELATIONS and name not in PAIRED_RELATIONS:
            raise ConfigError(f"unknown relation {name!r}")

    fractions = tuple(float(f) for f in config.split_fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise ConfigError("split_fractions must be three positive numbers")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigError(f"split_fractions must sum to 1, got {sum(fractions)!r}")

    return ResolvedConfig(
        n_users=n_users,
        seed=int(config.seed),
        ring_counts=counts,
        ring_size_ranges=ranges,
        ghost_hotels_range=GHOST_HOTELS_RANGE,
        ato_mules_range=ATO_MULES_RANGE,
        feature_exclusions=frozenset(config.feature_exclusions),
        relation_exclusions=frozenset(config.relation_exclusions),
        split_fractions=fractions,  # type: ignore[arg-type]
        fraud_rate_target=config.fraud_rate_target,
        scale_name=scale_name,
        widen_ring_bounds=config.widen_ring_bounds,
    )


_CONFIG_KEYS = {
    "scale", "n_users", "seed", "n_ticketing_rings", "n_ghost_hotel_rings",
    "n_ato_rings", "ring_size_overrides", "fraud_rate_target",
    "feature_exclusions", "relation_exclusions", "widen_ring_bounds",
    "split_fractions",
}


def load_config_file(path: str | Path) -> GeneratorConfig:
    """Read a YAML (or JSON) config file whose keys mirror GeneratorConfig."""
    text = Path(path).read_text(encoding="utf-8")
    data = yaml.safe_load(text)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(
            f"unknown config keys: {', '.join(sorted(unknown))}; "
            f"valid keys: {', '.join(sorted(_CONFIG_KEYS))}"
        )
    kwargs = dict(data)
    if "ring_size_overrides" in kwargs and kwargs["ring_size_overrides"]:
        kwargs["ring_size_overrides"] = {
            k: (int(v[0]), int(v[1])) for k, v in kwargs["ring_size_overrides"].items()
        }
    if "feature_exclusions" in kwargs:
        kwargs["feature_exclusions"] = frozenset(kwargs["feature_exclusions"] or ())
    if "relation_exclusions" in kwargs:
        kwargs["relation_exclusions"] = frozenset(kwargs["relation_exclusions"] or ())
    if "split_fractions" in kwargs and kwargs["split_fractions"]:
        kwargs["split_fractions"] = tuple(float(f) for f in kwargs["split_fractions"])
    return GeneratorConfig(**kwargs)


def with_overrides(config: GeneratorConfig, **kwargs) -> GeneratorConfig:
    """Return a copy of config with the given fields replaced."""
    return replace(config, **kwargs)


def resolved_from_echo(echo: dict) -> ResolvedConfig:
    """Rebuild a ResolvedConfig from a manifest's config echo."""
    return ResolvedConfig(
        n_users=int(echo["n_users"]),
        seed=int(echo["seed"]),
        ring_counts={k: int(v) for k, v in echo["ring_counts"].items()},
        ring_size_ranges={k: (int(v[0]), int(v[1]))
                          for k, v in echo["ring_size_ranges"].items()},
        ghost_hotels_range=tuple(echo["ghost_hotels_range"]),
        ato_mules_range=tuple(echo["ato_mules_range"]),
        feature_exclusions=frozenset(echo["feature_exclusions"]),
        relation_exclusions=frozenset(echo["relation_exclusions"]),
        split_fractions=tuple(echo["split_fractions"]),
        fraud_rate_target=echo["fraud_rate_target"],
        scale_name=echo["scale"],
    )
