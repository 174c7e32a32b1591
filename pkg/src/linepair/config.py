"""Run configuration: defaults, TOML loading (dotted keys) and flag overrides."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields, replace

from .cutline import CutlineConfig, CutPolicy
from .errors import ConfigError
from .evaluation import APStyle
from .grouping import GroupingConfig
from .heatmap import LossWeights, SimulationConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class RunConfig:
    stride: int = 4
    binarize_tau: float = 0.3
    use_cutline: bool = True
    cutline: CutlineConfig = field(default_factory=CutlineConfig)
    grouping: GroupingConfig = field(default_factory=GroupingConfig)
    sim: SimulationConfig = field(default_factory=SimulationConfig)
    loss: LossWeights = field(default_factory=LossWeights)
    ap_style: APStyle = APStyle.continuous
    iou_thresh: float = 0.5

    def __post_init__(self):
        if int(self.stride) != self.stride or self.stride < 1:
            raise ConfigError("stride must be a positive integer")
        if not 0.0 < self.binarize_tau < 1.0:
            raise ConfigError("binarize_tau must lie in (0, 1)")
        if not 0.0 < self.iou_thresh <= 1.0:
            raise ConfigError("iou_thresh must lie in (0, 1]")
        object.__setattr__(self, "ap_style", APStyle(self.ap_style))

    def flat(self) -> dict:
        """Every setting as ``dotted.key -> value`` (the config-file vocabulary)."""
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in _SECTIONS:
                for sf in fields(v):
                    sv = getattr(v, sf.name)
                    out[f"{f.name}.{sf.name}"] = sv.value if hasattr(sv, "value") else sv
            else:
                out[_TOP_ALIASES_REV.get(f.name, f.name)] = v.value if hasattr(v, "value") else v
        return out


_SECTIONS = {
    "cutline": CutlineConfig,
    "grouping": GroupingConfig,
    "sim": SimulationConfig,
    "loss": LossWeights,
}
# file key -> RunConfig field
_TOP_ALIASES = {"tau": "binarize_tau"}
_TOP_ALIASES_REV = {v: k for k, v in _TOP_ALIASES.items()}


def from_mapping(data: dict, base: RunConfig | None = None) -> RunConfig:
    """Build a config from nested or dotted keys, starting from ``base``."""
    base = base or RunConfig()
    nested: dict = {}
    for key, value in data.items():
        if "." in key:
            section, sub = key.split(".", 1)
            nested.setdefault(section, {})[sub] = value
        elif isinstance(value, dict):
            nested.setdefault(key, {}).update(value)
        else:
            nested[key] = value

    top, sections = {}, {}
    cutline_enabled = None
    for key, value in nested.items():
        if key in _SECTIONS:
            sub = dict(value)
            if key == "cutline" and "enabled" in sub:
                cutline_enabled = bool(sub.pop("enabled"))
            known = {f.name for f in fields(_SECTIONS[key])}
            unknown = set(sub) - known
            if unknown:
                raise ConfigError(f"unknown keys in [{key}]: {sorted(unknown)}")
            sections[key] = sub
        else:
            name = _TOP_ALIASES.get(key, key)
            if name not in {f.name for f in fields(RunConfig)} or name in _SECTIONS:
                raise ConfigError(f"unknown config key {key!r}")
            top[name] = value
    try:
        updates = dict(top)
        for key, sub in sections.items():
            updates[key] = replace(getattr(base, key), **sub)
        if cutline_enabled is not None:
            updates["use_cutline"] = cutline_enabled
        if "cutline" in updates:
            updates["cutline"] = replace(updates["cutline"], policy=CutPolicy(updates["cutline"].policy))
        return replace(base, **updates)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return from_mapping(data)


def dump_config(cfg: RunConfig) -> str:
    """Serialize as dotted ``key = value`` lines that :func:`load_config` reads back."""
    lines = []
    for key, value in cfg.flat().items():
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, str):
            text = f'"{value}"'
        else:
            text = repr(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"
