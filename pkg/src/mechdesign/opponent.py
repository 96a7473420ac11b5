"""Maximum-likelihood estimates of hidden learner parameters.

Each player keeps a sliding window of its last ``window`` actions. With
Laplace smoothing ``s`` the smoothed Bernoulli likelihood under the sigmoid
parameterization is maximized in closed form at
``logit((n_C + s) / (n + 2 s))``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .games import COOPERATE


@dataclass
class OpponentEstimate:
    n_players: int
    window: int = 50
    smoothing: float = 1.0
    _actions: list = field(init=False, repr=False)
    _coops: list = field(init=False, repr=False)

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if not self.smoothing > 0:
            raise ValueError(f"smoothing must be positive, got {self.smoothing}")
        self._actions = [deque(maxlen=self.window) for _ in range(self.n_players)]
        self._coops = [0] * self.n_players

    def counts(self, i: int) -> tuple[int, int]:
        """``(cooperations, observations)`` currently in player ``i``'s window."""
        return self._coops[i], len(self._actions[i])

    def theta_hat(self, i: int) -> float:
        n_c, n = self.counts(i)
        s = self.smoothing
        return math.log(n_c + s) - math.log(n - n_c + s)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([self.theta_hat(i) for i in range(self.n_players)])


def mle_update(estimate: OpponentEstimate, i: int, action: int) -> OpponentEstimate:
    """Record ``action`` for player ``i``, evicting the oldest beyond the window."""
    win = estimate._actions[i]
    if len(win) == win.maxlen:
        estimate._coops[i] -= win[0] == COOPERATE
    win.append(int(action))
    estimate._coops[i] += int(action) == COOPERATE
    return estimate


def observe_profile(estimate: OpponentEstimate, profile) -> OpponentEstimate:
    for i, a in enumerate(profile):
        mle_update(estimate, i, a)
    return estimate


def substitute(estimate: OpponentEstimate) -> np.ndarray:
    """Parameter vector to use in place of the learners' true thetas."""
    return estimate.thetas
