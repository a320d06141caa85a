"""Experiment configuration.

Flat key=value text with optional [section] headers (cosmetic; the key
namespace is global and every key can be overridden by a CLI flag of
the same name).  Unknown keys fail loudly, naming the key.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from typing import Callable

from .errors import UsageError
from .shifts import (
    PartitionLabeler,
    ProbabilityVector,
    joint_partition,
    modsum_partition,
    symbol_partition,
    trivial_partition,
)
from .words import parse_word

DEFAULT_SEED = 1729
SEED_ENV_VAR = "WORKBENCH_SEED"


@dataclass
class ExperimentConfig:
    rank: int = 2
    p: tuple[float, ...] = (0.5, 0.5)
    partition: str = "symbol"
    n_max: int = 6
    depth: int = 0  # 0 means derive from n_max and the window radius
    mode: str = "exact"
    mc_samples: int = 10_000
    m_samples: int = 2_000
    samples_per_n: int = 8
    starts: int = 4
    seed: int = DEFAULT_SEED
    out_dir: str = "workbench-out"
    bits: bool = False
    figures: bool = True
    model: str = "tail"
    level_count: int = 5
    delta: float = 0.1
    m_stages: int = 0  # 0 means derive from delta and the automorphism count
    d_orders: tuple[int, ...] = (0,)
    ell_min: int = 4
    eta: float = 0.1
    num_x: int = 50
    trials: int = 200
    block_window: str = "e,a1"
    observable: str = "indicator:0"
    functional: str = "hP"


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int_tuple(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")


def _parse_float_tuple(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip() != "")


_PARSERS: dict[str, Callable[[str], object]] = {
    "rank": int,
    "p": _parse_float_tuple,
    "partition": str.strip,
    "n_max": int,
    "depth": int,
    "mode": str.strip,
    "mc_samples": int,
    "m_samples": int,
    "samples_per_n": int,
    "starts": int,
    "seed": int,
    "out_dir": str.strip,
    "bits": _parse_bool,
    "figures": _parse_bool,
    "model": str.strip,
    "level_count": int,
    "delta": float,
    "m_stages": int,
    "d_orders": _parse_int_tuple,
    "ell_min": int,
    "eta": float,
    "num_x": int,
    "trials": int,
    "block_window": str.strip,
    "observable": str.strip,
    "functional": str.strip,
}


def parse_config_text(text: str, source: str = "config") -> dict[str, str]:
    """Raw key=value pairs; sections are allowed and ignored."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith(";"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            continue
        if "=" not in stripped:
            raise UsageError(f"{source}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in raw:
            raise UsageError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = value.strip()
    return raw


def resolve_config(
    file_text: str | None,
    overrides: dict[str, str],
    env: dict[str, str] | None = None,
) -> ExperimentConfig:
    """Defaults, then config file, then WORKBENCH_SEED, then CLI flags."""
    env = os.environ if env is None else env
    cfg = ExperimentConfig()
    layers: list[tuple[str, dict[str, str]]] = []
    if file_text is not None:
        layers.append(("config file", parse_config_text(file_text)))
    if SEED_ENV_VAR in env:
        layers.append((SEED_ENV_VAR, {"seed": env[SEED_ENV_VAR]}))
    layers.append(("flag", overrides))
    for source, mapping in layers:
        for key, value in mapping.items():
            parser = _PARSERS.get(key)
            if parser is None:
                raise UsageError(f"unknown config key: {key}")
            try:
                setattr(cfg, key, parser(value))
            except ValueError as exc:
                raise UsageError(f"bad value for key {key}: {exc}") from exc
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.rank < 2:
        raise UsageError("bad value for key rank: must be >= 2")
    if len(cfg.p) < 1 or any(w < 0 for w in cfg.p) or abs(sum(cfg.p) - 1.0) > 1e-9:
        raise UsageError("bad value for key p: weights must be nonnegative and sum to 1")
    if cfg.n_max < 0:
        raise UsageError("bad value for key n_max: must be >= 0")
    if cfg.mode not in ("exact", "monte-carlo", "auto"):
        raise UsageError("bad value for key mode: use exact, monte-carlo or auto")
    if cfg.mc_samples < 1:
        raise UsageError("bad value for key mc_samples: must be >= 1")
    if cfg.m_samples < 1:
        raise UsageError("bad value for key m_samples: must be >= 1")
    if cfg.model not in ("tail", "odometer"):
        raise UsageError("bad value for key model: use tail or odometer")
    if cfg.level_count < 1:
        raise UsageError("bad value for key level_count: must be >= 1")
    if not 0.0 < cfg.delta < 1.0:
        raise UsageError("bad value for key delta: need 0 < delta < 1")
    labeler = build_labeler(cfg)
    if cfg.depth and cfg.depth < cfg.n_max + labeler.window_radius + 1:
        raise UsageError(
            "bad value for key depth: need depth >= n_max + window radius + 1 "
            f"= {cfg.n_max + labeler.window_radius + 1}"
        )


def probability_vector(cfg: ExperimentConfig) -> ProbabilityVector:
    total = sum(cfg.p)
    return ProbabilityVector(tuple(w / total for w in cfg.p))


def build_labeler(cfg: ExperimentConfig) -> PartitionLabeler:
    """partition descriptors: symbol, trivial, modsum:<words>, joint:<words>
    where <words> is a comma list in the a1/A1 syntax."""
    desc = cfg.partition
    if desc == "symbol":
        return symbol_partition(cfg.rank, len(cfg.p))
    if desc == "trivial":
        return trivial_partition(cfg.rank)
    kind, _, rest = desc.partition(":")
    if kind in ("modsum", "joint"):
        window_text = rest if rest else cfg.block_window
        try:
            window = tuple(parse_word(tok, cfg.rank) for tok in window_text.split(","))
        except Exception as exc:
            raise UsageError(f"bad value for key partition: {exc}") from exc
        maker = modsum_partition if kind == "modsum" else joint_partition
        return maker(window, len(cfg.p))
    raise UsageError(
        f"bad value for key partition: {desc!r} (use symbol, trivial, modsum:<words> "
        "or joint:<words>)"
    )


def effective_depth(cfg: ExperimentConfig, labeler: PartitionLabeler) -> int:
    if cfg.depth:
        return cfg.depth
    return cfg.n_max + labeler.window_radius + 1


def config_echo(cfg: ExperimentConfig) -> dict[str, object]:
    """The resolved configuration as plain JSON-ready data."""
    out: dict[str, object] = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out
