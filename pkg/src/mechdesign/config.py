"""Experiment configuration and the flat ``key = value`` file format.

Keys are dotted paths into :class:`ExperimentConfig`, e.g.
``planner.bound = 3`` or ``game.name = stag_hunt``. Unknown keys are errors.
"""

from __future__ import annotations

import dataclasses
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .games import Game, make_game
from .planner import ENCODINGS


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class GameConfig:
    name: str = "pd"
    n_players: int = 2
    # used by name = custom
    greed: float = 1.0
    fear: float = 1.0
    reward_cc: float = 3.0
    punishment: float = 1.0
    # used by name = pd_n
    all_coop: float = 3.0
    all_defect: float = 1.0
    sole_defector: float = 4.0
    sole_cooperator: float = 0.0

    def build(self) -> Game:
        if self.name == "custom":
            return make_game("custom", greed=self.greed, fear=self.fear, reward_cc=self.reward_cc,
                             punishment=self.punishment)
        if self.name == "pd_n":
            return make_game("pd_n", self.n_players, all_coop_payoff=self.all_coop,
                             all_defect_payoff=self.all_defect, sole_defector_payoff=self.sole_defector,
                             sole_cooperator_payoff=self.sole_cooperator)
        return make_game(self.name, self.n_players)


@dataclass
class LearnerConfig:
    step_size: float = 0.01
    optimizer: str = "adam"
    baseline_decay: float = 0.9
    use_baseline: bool = True
    batch_size: int = 1


@dataclass
class PlannerConfig:
    enabled: bool = True
    bound: float = 3.0
    step_size: float = 0.01
    cost_weight: float = 0.0002
    revenue_neutral: bool = False
    encoding: str = "joint_onehot"
    mode: str = "exact"
    noise_sigma: float = 0.5
    optimizer: str = "adam"
    value_batches: str = "independent"


@dataclass
class OpponentModelConfig:
    enabled: bool = False
    window: int = 50
    smoothing: float = 1.0


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    game: GameConfig = field(default_factory=GameConfig)
    episodes_phase1: int = 4000
    episodes_phase2: int = 0
    initial_coop_prob: float = 0.25
    discount: float = 1.0
    value_mode: str = "estimated"
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    opponent_model: OpponentModelConfig = field(default_factory=OpponentModelConfig)

    def validate(self) -> "ExperimentConfig":
        checks = [
            ("episodes_phase1", self.episodes_phase1 >= 0, "must be >= 0"),
            ("episodes_phase2", self.episodes_phase2 >= 0, "must be >= 0"),
            ("initial_coop_prob", 0.0 < self.initial_coop_prob < 1.0, "must lie in (0, 1)"),
            ("discount", 0.0 < self.discount <= 1.0, "must lie in (0, 1]"),
            ("seeds", len(self.seeds) > 0, "needs at least one seed"),
            ("value_mode", self.value_mode in ("exact", "estimated"), "must be exact or estimated"),
            ("learner.step_size", self.learner.step_size >= 0, "must be >= 0"),
            ("learner.optimizer", self.learner.optimizer in ("adam", "sgd"), "must be adam or sgd"),
            ("learner.baseline_decay", 0.0 <= self.learner.baseline_decay < 1.0, "must lie in [0, 1)"),
            ("learner.batch_size", self.learner.batch_size >= 1, "must be >= 1"),
            ("planner.bound", self.planner.bound > 0, "must be positive"),
            ("planner.step_size", self.planner.step_size > 0, "must be positive"),
            ("planner.cost_weight", self.planner.cost_weight >= 0, "must be >= 0"),
            ("planner.encoding", self.planner.encoding in ENCODINGS, f"must be one of {ENCODINGS}"),
            ("planner.mode", self.planner.mode in ("exact", "estimated"), "must be exact or estimated"),
            ("planner.noise_sigma", self.planner.noise_sigma > 0, "must be positive"),
            ("planner.optimizer", self.planner.optimizer in ("adam", "sgd"), "must be adam or sgd"),
            ("planner.value_batches", self.planner.value_batches in ("independent", "shared"),
             "must be independent or shared"),
            ("opponent_model.window", self.opponent_model.window >= 1, "must be >= 1"),
            ("opponent_model.smoothing", self.opponent_model.smoothing > 0, "must be positive"),
        ]
        for key, ok, msg in checks:
            if not ok:
                raise ConfigError(key, msg)
        try:
            self.game.build()
        except ValueError as exc:
            raise ConfigError("game", str(exc)) from None
        return self


def _leaf_fields(obj, prefix: str = ""):
    hints = typing.get_type_hints(type(obj))
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        if dataclasses.is_dataclass(value):
            yield from _leaf_fields(value, prefix + f.name + ".")
        else:
            yield prefix + f.name, hints[f.name], obj, f.name


def config_keys() -> list[str]:
    return [k for k, *_ in _leaf_fields(ExperimentConfig())]


_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


def _coerce(key: str, typ, raw: Any):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if typ is bool:
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if typ is int:
            return int(text)
        if typ is float:
            return float(text)
        if typing.get_origin(typ) is list:
            if ".." in text:
                lo, hi = text.split("..")
                return list(range(int(lo), int(hi) + 1))
            return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None
    return text


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return str(value)


def apply_overrides(config: ExperimentConfig, overrides: Mapping[str, Any]) -> ExperimentConfig:
    """Set dotted keys on a deep copy of ``config``."""
    config = dataclasses.replace(config)
    for sub in ("game", "learner", "planner", "opponent_model"):
        setattr(config, sub, dataclasses.replace(getattr(config, sub)))
    config.seeds = list(config.seeds)
    leaves = {k: (typ, owner, attr) for k, typ, owner, attr in _leaf_fields(config)}
    for key, raw in overrides.items():
        if key not in leaves:
            raise ConfigError(key, "unknown configuration key")
        typ, owner, attr = leaves[key]
        setattr(owner, attr, _coerce(key, typ, raw))
    return config


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        pairs[key] = value
    return apply_overrides(base or ExperimentConfig(), pairs)


def serialize_config(config: ExperimentConfig) -> str:
    return "".join(f"{key} = {_format(getattr(owner, attr))}\n" for key, _, owner, attr in _leaf_fields(config))


def load_config(path: str | Path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    return parse_config(Path(path).read_text(), base)


def parse_cli_overrides(args: Iterable[str]) -> dict[str, str]:
    """Turn ``--planner.bound=2`` style arguments into a key/value mapping."""
    out = {}
    for arg in args:
        if not arg.startswith("--") or "=" not in arg:
            raise ConfigError(arg, "overrides must look like --key=value")
        key, value = arg[2:].split("=", 1)
        out[key] = value
    return out
