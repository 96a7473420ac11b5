"""Matrix-game social dilemmas.

Two-player symmetric games are described by the four payoffs of the
row player (R, S, T, P). The N-player Prisoner's Dilemma interpolates
linearly between four anchor payoffs in the number of cooperators.

Action profiles are arrays of 0/1 with ``COOPERATE = 1``. Tables over all
profiles use the order produced by :func:`all_profiles`, i.e. for two
players ``(C,C), (C,D), (D,C), (D,D)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence, Union

import numpy as np

COOPERATE = 1
DEFECT = 0

#: Largest player count for which the 2^N profile table is enumerated.
MAX_ENUM_PLAYERS = 20


class DimensionError(ValueError):
    """Raised when a profile or table does not match the player count."""


class ConfigurationError(ValueError):
    """Raised for invalid game definitions."""


class CapacityError(RuntimeError):
    """Raised when exhaustive profile enumeration would be infeasible."""


@lru_cache(maxsize=None)
def _profiles(n: int) -> np.ndarray:
    table = np.array(list(itertools.product((COOPERATE, DEFECT), repeat=n)), dtype=np.int8)
    table.setflags(write=False)
    return table


def all_profiles(n: int) -> np.ndarray:
    """Return the ``(2**n, n)`` table of joint actions, cooperators first."""
    if n < 1:
        raise ConfigurationError(f"need at least one player, got {n}")
    if n > MAX_ENUM_PLAYERS:
        raise CapacityError(f"2^{n} profiles is too many to enumerate (limit N={MAX_ENUM_PLAYERS})")
    return _profiles(n)


def profile_index(profile: Sequence[int]) -> int:
    """Row of ``profile`` in :func:`all_profiles`."""
    idx = 0
    for a in profile:
        idx = 2 * idx + (0 if a == COOPERATE else 1)
    return idx


def profile_indices(profiles: np.ndarray) -> np.ndarray:
    """Vectorized :func:`profile_index` over the rows of ``profiles``."""
    profiles = np.asarray(profiles)
    n = profiles.shape[-1]
    weights = 1 << np.arange(n - 1, -1, -1)
    return (profiles != COOPERATE).astype(np.int64) @ weights


def as_profile(profile, n: int | None = None) -> np.ndarray:
    """Coerce ``profile`` (0/1 ints or "C"/"D" strings) to an int array."""
    if isinstance(profile, str):
        profile = list(profile)
    arr = np.array(
        [(COOPERATE if a.upper() == "C" else DEFECT) if isinstance(a, str) else int(a) for a in profile],
        dtype=np.int8,
    )
    if arr.ndim != 1 or not np.isin(arr, (COOPERATE, DEFECT)).all():
        raise DimensionError(f"not an action profile: {profile!r}")
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"profile has {arr.shape[0]} actions, game has {n} players")
    return arr


@dataclass(frozen=True)
class GreedFear:
    greed: float
    fear: float


@dataclass(frozen=True)
class SocialDilemmaReport:
    """Outcome of the four strict social-dilemma conditions."""

    is_dilemma: bool
    condition_flags: tuple[bool, bool, bool, bool]


@dataclass(frozen=True)
class PayoffMatrix:
    """Symmetric two-player game; payoffs are those of the row player."""

    reward_cc: float
    sucker: float
    temptation: float
    punishment: float

    def __post_init__(self):
        vals = (self.reward_cc, self.sucker, self.temptation, self.punishment)
        if not all(np.isfinite(v) for v in vals):
            raise ConfigurationError(f"payoffs must be finite, got {vals}")
        for name, v in zip(("reward_cc", "sucker", "temptation", "punishment"), vals):
            object.__setattr__(self, name, float(v))

    n_players = 2

    @property
    def greed_fear(self) -> GreedFear:
        return GreedFear(self.temptation - self.reward_cc, self.punishment - self.sucker)

    def payoff_table(self) -> np.ndarray:
        R, S, T, P = self.reward_cc, self.sucker, self.temptation, self.punishment
        return np.array([[R, R], [S, T], [T, S], [P, P]], dtype=float)

    def rewards(self, profile) -> np.ndarray:
        return payoff(self, profile)


@dataclass(frozen=True)
class MultiPlayerGame:
    """N-player cooperate/defect game, payoffs affine in the cooperator count.

    ``all_coop_payoff`` and ``sole_cooperator_payoff`` anchor cooperators,
    ``all_defect_payoff`` and ``sole_defector_payoff`` anchor defectors.
    """

    n_players: int
    all_coop_payoff: float = 3.0
    all_defect_payoff: float = 1.0
    sole_defector_payoff: float = 4.0
    sole_cooperator_payoff: float = 0.0

    def __post_init__(self):
        if int(self.n_players) != self.n_players or self.n_players < 2:
            raise ConfigurationError(f"n_players must be an integer >= 2, got {self.n_players}")
        anchors = (self.all_coop_payoff, self.all_defect_payoff, self.sole_defector_payoff,
                   self.sole_cooperator_payoff)
        if not all(np.isfinite(a) for a in anchors):
            raise ConfigurationError(f"anchor payoffs must be finite, got {anchors}")

    def cooperator_payoff(self, k: int) -> float:
        """Payoff of a cooperator when ``k`` players (itself included) cooperate."""
        n = self.n_players
        return self.sole_cooperator_payoff + (self.all_coop_payoff - self.sole_cooperator_payoff) * (k - 1) / (n - 1)

    def defector_payoff(self, k: int) -> float:
        """Payoff of a defector when ``k`` other players cooperate."""
        n = self.n_players
        return self.all_defect_payoff + (self.sole_defector_payoff - self.all_defect_payoff) * k / (n - 1)

    def payoff_table(self) -> np.ndarray:
        profiles = all_profiles(self.n_players)
        k = profiles.sum(axis=1, keepdims=True)
        return np.where(profiles == COOPERATE, self.cooperator_payoff(k), self.defector_payoff(k)).astype(float)

    def rewards(self, profile) -> np.ndarray:
        return multiplayer_payoff(self, profile)


Game = Union[PayoffMatrix, MultiPlayerGame]


def payoff(game: PayoffMatrix, profile) -> np.ndarray:
    """Rewards ``(r_1, r_2)`` of a two-player profile."""
    a = as_profile(profile)
    if a.shape[0] != 2:
        raise DimensionError(f"two-player game needs a profile of length 2, got {a.shape[0]}")
    return game.payoff_table()[profile_index(a)].copy()


def multiplayer_payoff(game: MultiPlayerGame, profile) -> np.ndarray:
    a = as_profile(profile, game.n_players)
    k = int(a.sum())
    return np.where(a == COOPERATE, game.cooperator_payoff(k), game.defector_payoff(k)).astype(float)


def classify(game: PayoffMatrix) -> SocialDilemmaReport:
    R, S, T, P = game.reward_cc, game.sucker, game.temptation, game.punishment
    flags = (R > P, R > S, R > (T + S) / 2, T > R or P > S)
    return SocialDilemmaReport(all(flags), flags)


def from_greed_fear(greed: float, fear: float, reward_cc: float = 3.0, punishment: float = 1.0) -> PayoffMatrix:
    return PayoffMatrix(reward_cc=reward_cc, sucker=punishment - fear,
                        temptation=reward_cc + greed, punishment=punishment)


def greed_fear(game: PayoffMatrix) -> GreedFear:
    return game.greed_fear


def modified_greed_fear(game: PayoffMatrix, extra) -> GreedFear:
    """Greed and fear of the row player once extra rewards are added.

    ``extra`` is either a ``(4, 2)`` table in :func:`all_profiles` order or a
    mapping from two-player outcomes (``"CD"``, ``(1, 0)``...) to reward pairs.
    """
    table = _extra_table(extra)
    eff = game.payoff_table() + table
    cc, cd, dc, dd = eff[:, 0]
    return GreedFear(greed=dc - cc, fear=dd - cd)


def _extra_table(extra) -> np.ndarray:
    if isinstance(extra, Mapping):
        table = np.full((4, 2), np.nan)
        for key, val in extra.items():
            table[profile_index(as_profile(key, 2))] = val
        if np.isnan(table).any():
            raise DimensionError("extra rewards must cover all four outcomes")
        return table
    table = np.asarray(extra, dtype=float)
    if table.shape != (4, 2):
        raise DimensionError(f"extra reward table must have shape (4, 2), got {table.shape}")
    return table


PRESETS = {
    "pd": from_greed_fear(1.0, 1.0),
    "chicken": from_greed_fear(0.5, -1.0),
    "stag_hunt": from_greed_fear(-1.0, 1.0),
}


def make_game(name: str, n_players: int = 2, **params) -> Game:
    """Build a game from a preset name.

    ``"custom"`` takes ``greed``, ``fear``, ``reward_cc`` and ``punishment``;
    ``"pd_n"`` takes ``n_players`` and optional anchor payoffs.
    """
    if name in PRESETS:
        if n_players != 2:
            raise ConfigurationError(f"preset {name!r} is a two-player game, got n_players={n_players}")
        return PRESETS[name]
    if name == "custom":
        return from_greed_fear(**params)
    if name == "pd_n":
        return MultiPlayerGame(n_players, **params)
    raise ConfigurationError(f"unknown game {name!r}; choose from {sorted([*PRESETS, 'custom', 'pd_n'])}")
