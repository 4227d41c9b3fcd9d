"""Scenario configuration: flat ``key = value`` files, presets and sweeps.

Sizes use binary units (1KB = 1024 B) and may be written as ``4KB``,
``100GB``, ``1TB`` or plain byte counts. Counts accept scientific notation
(``1e12``). Lines starting with ``#`` are comments; unknown keys are errors.
"""
from __future__ import annotations

import dataclasses
import hashlib
import itertools
import re
from dataclasses import dataclass, fields
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from .content_store import POLICIES
from .strategies import STRATEGIES
from .workload import chunk_count

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "SweepSpec",
    "parse_size",
    "format_size",
    "parse_config",
    "load_config",
    "emit_config",
    "presets",
    "PRESET_NOTES",
    "parse_sweep",
    "load_sweep",
]

KB = 1024
MB = KB * 1024
GB = MB * 1024
TB = GB * 1024
_UNITS = {"B": 1, "KB": KB, "MB": MB, "GB": GB, "TB": TB, "PB": TB * 1024}

SCENARIO_NAMES = ("ISP", "VOD", "OSN", "CUSTOM")


class ConfigError(ValueError):
    pass


def _to_int(text: str) -> int:
    try:
        d = Decimal(text.strip())
    except InvalidOperation:
        raise ConfigError(f"not a number: {text!r}") from None
    if d != d.to_integral_value():
        raise ConfigError(f"expected an integer, got {text!r}")
    return int(d)


def parse_size(text: Union[str, int]) -> int:
    """``'100GB'`` -> bytes, binary units."""
    if isinstance(text, int):
        return text
    m = re.fullmatch(r"\s*([0-9.eE+-]+)\s*([KMGTP]?B)?\s*", str(text), flags=re.I)
    if not m:
        raise ConfigError(f"bad size {text!r}")
    unit = _UNITS[(m.group(2) or "B").upper()]
    try:
        value = Decimal(m.group(1)) * unit
    except InvalidOperation:
        raise ConfigError(f"bad size {text!r}") from None
    if value != value.to_integral_value():
        raise ConfigError(f"size {text!r} is not a whole number of bytes")
    return int(value)


def format_size(n: int) -> str:
    for unit in ("TB", "GB", "MB", "KB"):
        if n and n % _UNITS[unit] == 0:
            return f"{n // _UNITS[unit]}{unit}"
    return str(n)


def _format_float(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation run.

    ``n_objects`` and ``cache_bytes`` are the unscaled (full-size) values;
    the engine divides both by ``scale``. ``chunk_scale`` coarsens the chunk
    unit (several real chunks simulated as one), which together with the
    catalog/cache scaling keeps the cache-to-catalog byte ratio intact.
    """

    name: str = "CUSTOM"
    n_objects: int = 10_000
    avg_filesize: int = 4 * KB
    chunk_size: int = 4 * KB
    alpha: float = 0.8
    beta: float = 0.0
    cache_bytes: int = 400 * KB
    topology: str = "abilene"
    duration: float = 86_400.0
    request_rate: float = 1.0
    strategy: str = "LCE"
    policy: str = "LRU"
    seed: int = 0
    scale: float = 1.0
    chunk_scale: int = 1
    warmup: float = 0.1
    t_tw: float = 10.0
    mpc_threshold: int = 3
    two_lru_capacity: int = 0
    popularity_capacity: int = 0
    producer: int = -1
    clients: Tuple[int, ...] = ()

    def __post_init__(self):
        problems = []
        if self.name.upper() not in SCENARIO_NAMES:
            problems.append(f"name must be one of {SCENARIO_NAMES}")
        if self.n_objects < 1:
            problems.append("n_objects must be >= 1")
        if self.avg_filesize <= 0 or self.chunk_size <= 0:
            problems.append("avg_filesize and chunk_size must be positive")
        if self.cache_bytes < 0:
            problems.append("cache_bytes must be >= 0")
        if not self.duration > 0:
            problems.append("duration must be > 0")
        if self.request_rate < 0:
            problems.append("request_rate must be >= 0")
        if not self.scale >= 1:
            problems.append("scale must be >= 1")
        if self.chunk_scale < 1:
            problems.append("chunk_scale must be >= 1")
        if not 0 <= self.warmup < 1:
            problems.append("warmup must be in [0, 1)")
        if self.alpha < 0 or self.beta < 0:
            problems.append("alpha and beta must be >= 0")
        if self.strategy.upper() not in STRATEGIES:
            problems.append(f"strategy must be one of {STRATEGIES}")
        if self.policy.upper() not in POLICIES:
            problems.append(f"policy must be one of {POLICIES}")
        if self.t_tw <= 0:
            problems.append("t_tw must be > 0")
        if self.mpc_threshold < 1:
            problems.append("mpc_threshold must be >= 1")
        if problems:
            raise ConfigError("; ".join(problems))

    # derived, desk-scale quantities
    @property
    def scaled_objects(self) -> int:
        return max(1, int(round(self.n_objects / self.scale)))

    @property
    def sim_chunk_size(self) -> int:
        return self.chunk_size * self.chunk_scale

    @property
    def chunks_per_object(self) -> int:
        return chunk_count(self.avg_filesize, self.sim_chunk_size)

    @property
    def cache_chunks(self) -> int:
        return int(self.cache_bytes / self.scale // self.sim_chunk_size)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def strategy_params(self) -> Dict[str, object]:
        return {
            "t_tw": self.t_tw,
            "mpc_threshold": self.mpc_threshold,
            "two_lru_capacity": self.two_lru_capacity,
            "popularity_capacity": self.popularity_capacity,
        }

    def config_hash(self) -> str:
        """Hash of everything except the seed; groups runs of one configuration."""
        text = emit_config(self.replace(seed=0))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


_SIZE_KEYS = {"avg_filesize", "chunk_size", "cache_bytes"}
_FIELDS = {f.name: f for f in fields(ScenarioConfig)}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in _SIZE_KEYS:
        return parse_size(raw)
    if key == "clients":
        return tuple(_to_int(x) for x in raw.replace(",", " ").split()) if raw else ()
    default = _FIELDS[key].default
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return _to_int(raw)
    if isinstance(default, float):
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: not a number: {raw!r}") from None
    if key in ("strategy", "policy", "name"):
        raw = raw.upper().replace("-", "_")
        return "TWO_LRU" if raw == "2_LRU" else raw
    return raw


def _parse_pairs(text: str, origin: str = "<config>") -> List[Tuple[int, str, str]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        k, _, v = line.partition("=")
        out.append((lineno, k.strip(), v.strip()))
    return out


def _build(pairs, origin, base: ScenarioConfig = None) -> ScenarioConfig:
    values = {}
    for lineno, k, v in pairs:
        if k not in _FIELDS:
            raise ConfigError(f"{origin}:{lineno}: unknown key {k!r}")
        try:
            values[k] = _coerce(k, v)
        except ConfigError as e:
            raise ConfigError(f"{origin}:{lineno}: {e}") from None
    base = base or ScenarioConfig()
    return dataclasses.replace(base, **values)


def parse_config(text: str, origin: str = "<config>") -> ScenarioConfig:
    return _build(_parse_pairs(text, origin), origin)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    return parse_config(path.read_text(), origin=str(path))


def emit_config(cfg: ScenarioConfig, comment: str = "") -> str:
    lines = [f"# {c}" for c in comment.splitlines()] if comment else []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name in _SIZE_KEYS:
            s = format_size(v)
        elif f.name == "clients":
            s = ",".join(str(c) for c in v)
        elif isinstance(v, float):
            s = _format_float(v)
        else:
            s = str(v)
        lines.append(f"{f.name} = {s}")
    return "\n".join(lines) + "\n"


# Desk-scale knobs per scenario: (scale S, chunk_scale, request_rate).
# S divides the catalog and the per-node cache alike; chunk_scale merges
# real 4KB chunks into one simulated chunk so objects span 3-4 chunks.
_DESK = {
    "ISP": (1e6, 1, 0.05),
    "VOD": (1e2, 6400, 0.02),
    "OSN": (1e3, 640, 0.02),
}

PRESET_NOTES = {
    "ISP": "ISP scenario; desk scale S=1e6 -> 1e6 objects of 3 x 4KB chunks.",
    "VOD": "VoD scenario; desk scale S=1e2 -> 1e7 objects; chunk_scale 6400 -> 4 x 25MB chunks.",
    "OSN": "OSN scenario; desk scale S=1e3 -> 1e5 objects; chunk_scale 640 -> 4 x 2.5MB chunks.",
}

_ROWS = {
    "ISP": dict(n_objects=10**12, avg_filesize=10 * KB, alpha=0.65, caches=(100 * GB, 1 * TB)),
    "VOD": dict(n_objects=10**9, avg_filesize=100 * MB, alpha=0.75, caches=(25 * GB, 250 * GB)),
    "OSN": dict(n_objects=10**8, avg_filesize=10 * MB, alpha=1.14, caches=(10 * GB, 100 * GB)),
}


def presets(strategy: str = "LCE", seed: int = 0, topology: str = "abilene") -> Dict[str, ScenarioConfig]:
    """The six evaluation scenarios, keyed ``isp-100GB``, ``isp-1TB`` and so on."""
    out = {}
    for scen, row in _ROWS.items():
        scale, chunk_scale, rate = _DESK[scen]
        for cache in row["caches"]:
            key = f"{scen.lower()}-{format_size(cache)}"
            out[key] = ScenarioConfig(
                name=scen,
                n_objects=row["n_objects"],
                avg_filesize=row["avg_filesize"],
                chunk_size=4 * KB,
                alpha=row["alpha"],
                beta=0.0,
                cache_bytes=cache,
                topology=topology,
                duration=86_400.0,
                request_rate=rate,
                strategy=strategy,
                seed=seed,
                scale=scale,
                chunk_scale=chunk_scale,
            )
    return out


@dataclass(frozen=True)
class SweepSpec:
    """A base config crossed with parameter axes and a seed list.

    File format: the usual config keys for the base, plus
    ``sweep.<key> = v1, v2, ...`` axes and ``seeds = 1, 2, 3``.
    """

    base: ScenarioConfig
    axes: Tuple[Tuple[str, Tuple[str, ...]], ...] = ()
    seeds: Tuple[int, ...] = (0,)

    def configs(self) -> List[ScenarioConfig]:
        """Deterministic cross product: axes in file order, seeds innermost."""
        names = [a for a, _ in self.axes]
        grids = [vals for _, vals in self.axes]
        out = []
        for combo in itertools.product(*grids):
            cfg = _build([(0, k, v) for k, v in zip(names, combo)], "<sweep>", base=self.base)
            for s in self.seeds:
                out.append(cfg.replace(seed=s))
        return out


def parse_sweep(text: str, origin: str = "<sweep>") -> SweepSpec:
    base_pairs = []
    axes = []
    seeds: Sequence[int] = (0,)
    for lineno, k, v in _parse_pairs(text, origin):
        if k.startswith("sweep."):
            key = k[len("sweep."):]
            if key not in _FIELDS or key == "seed":
                raise ConfigError(f"{origin}:{lineno}: cannot sweep over {key!r}")
            vals = tuple(x.strip() for x in v.split(",") if x.strip())
            if not vals:
                raise ConfigError(f"{origin}:{lineno}: empty axis {key!r}")
            for x in vals:
                _coerce(key, x)
            axes.append((key, vals))
        elif k == "seeds":
            seeds = tuple(_to_int(x) for x in v.replace(",", " ").split())
            if not seeds:
                raise ConfigError(f"{origin}:{lineno}: empty seed list")
        else:
            base_pairs.append((lineno, k, v))
    return SweepSpec(_build(base_pairs, origin), tuple(axes), tuple(seeds))


def load_sweep(path: Union[str, Path]) -> SweepSpec:
    path = Path(path)
    return parse_sweep(path.read_text(), origin=str(path))
