"""Sigmoid learners with a single cooperation parameter.

Exact values enumerate every joint profile. Sampled gradients use the
score-function (REINFORCE) estimator on total returns, optionally centred
by a per-player running-mean baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .games import COOPERATE, Game, all_profiles

#: Learner parameters are clamped to this range after every update.
THETA_CLAMP = 20.0
# sigmoid(±35) is still strictly inside (0, 1) in float64
_SIGMOID_CLAMP = 35.0


class NumericError(FloatingPointError):
    """Raised when a parameter or gradient stops being finite."""


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.minimum(np.maximum(x, -_SIGMOID_CLAMP), _SIGMOID_CLAMP)))


def coop_prob(theta):
    """Probability of cooperation, ``exp(theta) / (1 + exp(theta))``."""
    theta = np.asarray(theta, dtype=float)
    if not np.isfinite(theta).all():
        raise NumericError(f"non-finite policy parameter {theta}")
    out = _sigmoid(theta)
    return float(out) if out.ndim == 0 else out


def defect_prob(theta):
    return coop_prob(-np.asarray(theta, dtype=float))


def logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


@dataclass(frozen=True)
class LearnerPolicy:
    theta: float
    step_size: float = 0.01

    def __post_init__(self):
        if not self.step_size >= 0:
            raise ValueError(f"step_size must be >= 0, got {self.step_size}")
        if not math.isfinite(self.theta):
            raise NumericError(f"non-finite theta {self.theta}")

    @property
    def coop_prob(self) -> float:
        return coop_prob(self.theta)


def sample_action(policy: LearnerPolicy | float, rng: np.random.Generator) -> int:
    theta = policy.theta if isinstance(policy, LearnerPolicy) else policy
    return COOPERATE if rng.random() < coop_prob(theta) else 1 - COOPERATE


def sample_profile(thetas: Sequence[float], rng: np.random.Generator) -> np.ndarray:
    """One joint action, drawn independently per player."""
    p = coop_prob(np.asarray(thetas, dtype=float))
    return (rng.random(np.shape(p)) < p).astype(np.int8)


def score(profile, thetas) -> np.ndarray:
    """d log pi_i(a_i) / d theta_i: ``1 - p_i`` for C, ``-p_i`` for D."""
    return np.asarray(profile, dtype=float) - coop_prob(np.asarray(thetas, dtype=float))


def profile_probabilities(thetas) -> np.ndarray:
    """Joint probability of every profile in :func:`all_profiles` order."""
    thetas = np.asarray(thetas, dtype=float)
    return _joint(coop_prob(thetas), _sigmoid(-thetas))


def _joint(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.where(all_profiles(p.shape[0]) == COOPERATE, p, q).prod(axis=1)


def profile_prob_grads(thetas) -> np.ndarray:
    """``(2**N, N)`` table of d Pr(profile) / d theta_i."""
    thetas = np.asarray(thetas, dtype=float)
    probs = profile_probabilities(thetas)
    return probs[:, None] * score(all_profiles(thetas.shape[0]), thetas)


def _check_capacity(game: Game, thetas) -> None:
    if len(thetas) != game.n_players:
        raise ValueError(f"{len(thetas)} parameters for a {game.n_players}-player game")


def exact_values(thetas, game: Game, extra_table: np.ndarray | None = None):
    """Expected base values ``V`` and planner values ``Vp`` per player.

    ``extra_table`` holds the planner's reward for every profile (shape
    ``(2**N, N)``); ``None`` means no planner.
    """
    _check_capacity(game, thetas)
    probs = profile_probabilities(thetas)
    V = probs @ game.payoff_table()
    Vp = np.zeros_like(V) if extra_table is None else probs @ extra_table
    return V, Vp


def exact_learner_grad(i: int, thetas, game: Game, extra_table: np.ndarray | None = None) -> float:
    """d(V_i + V_i^p)/d theta_i with planner rewards held fixed per profile."""
    _check_capacity(game, thetas)
    total = game.payoff_table()[:, i]
    if extra_table is not None:
        total = total + extra_table[:, i]
    return float(profile_prob_grads(thetas)[:, i] @ total)


def exact_learner_grads(thetas, game: Game, extra_table: np.ndarray | None = None) -> np.ndarray:
    """All players' own-value gradients at once."""
    _check_capacity(game, thetas)
    total = game.payoff_table() if extra_table is None else game.payoff_table() + extra_table
    return (profile_prob_grads(thetas) * total).sum(axis=0)


def welfare_grads(thetas, game: Game) -> np.ndarray:
    """Gradient of social welfare ``sum_j V_j`` with respect to every theta_i."""
    _check_capacity(game, thetas)
    welfare = game.payoff_table().sum(axis=1)
    return profile_prob_grads(thetas).T @ welfare


def learner_update(policy: LearnerPolicy, grad: float) -> LearnerPolicy:
    """Plain gradient-ascent step, clamped to ``[-THETA_CLAMP, THETA_CLAMP]``."""
    theta = policy.theta + policy.step_size * grad
    if not math.isfinite(theta):
        raise NumericError(f"learner update produced theta={theta} (grad={grad})")
    return replace(policy, theta=float(np.clip(theta, -THETA_CLAMP, THETA_CLAMP)))


@dataclass(frozen=True)
class EpisodeRecord:
    """One single-step episode.

    ``planner_noise`` is the standardized Gaussian perturbation the
    stochastic planner applied to its pre-squash activations, if any.
    """

    profile: np.ndarray
    base_rewards: np.ndarray
    extra_rewards: np.ndarray
    planner_noise: np.ndarray | None = None

    @property
    def total_rewards(self) -> np.ndarray:
        return self.base_rewards + self.extra_rewards


@dataclass(frozen=True)
class EpisodeBatch:
    """Row-stacked episodes; every array has shape ``(B, N)``."""

    profiles: np.ndarray
    base_rewards: np.ndarray
    extra_rewards: np.ndarray
    planner_noise: np.ndarray | None = None

    @classmethod
    def from_records(cls, records: Sequence[EpisodeRecord]) -> "EpisodeBatch":
        if not records:
            raise ValueError("empty batch")
        noise = None
        if all(r.planner_noise is not None for r in records):
            noise = np.stack([r.planner_noise for r in records])
        return cls(
            profiles=np.stack([np.asarray(r.profile) for r in records]),
            base_rewards=np.stack([r.base_rewards for r in records]),
            extra_rewards=np.stack([r.extra_rewards for r in records]),
            planner_noise=noise,
        )

    def __len__(self) -> int:
        return self.profiles.shape[0]

    @property
    def total_rewards(self) -> np.ndarray:
        return self.base_rewards + self.extra_rewards


def as_batch(batch) -> EpisodeBatch:
    if isinstance(batch, EpisodeBatch):
        if len(batch) == 0:
            raise ValueError("empty batch")
        return batch
    if isinstance(batch, EpisodeRecord):
        batch = [batch]
    return EpisodeBatch.from_records(list(batch))


@dataclass
class Baseline:
    """Per-player exponential moving average of total returns."""

    mean: np.ndarray
    decay: float = 0.9

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        if not 0.0 <= self.decay < 1.0:
            raise ValueError(f"decay must lie in [0, 1), got {self.decay}")

    @classmethod
    def zeros(cls, n: int, decay: float = 0.9) -> "Baseline":
        return cls(np.zeros(n), decay)


def update_baseline(baseline: Baseline, returns) -> Baseline:
    returns = np.asarray(returns, dtype=float)
    mean = baseline.decay * baseline.mean + (1.0 - baseline.decay) * returns
    return Baseline(mean, baseline.decay)


def reinforce_grad(i: int, batch, thetas, baseline: Baseline | np.ndarray | None = None) -> float:
    """Score-function estimate of d V_i^tot / d theta_i from sampled episodes."""
    batch = as_batch(batch)
    b = 0.0
    if baseline is not None:
        b = (baseline.mean if isinstance(baseline, Baseline) else np.asarray(baseline))[i]
    s = batch.profiles[:, i] - coop_prob(thetas[i])
    return float(np.mean(s * (batch.total_rewards[:, i] - b)))


def reinforce_grads(batch, thetas, baseline: Baseline | None = None, probs: np.ndarray | None = None) -> np.ndarray:
    """All players' :func:`reinforce_grad` at once; ``probs`` may carry precomputed ``coop_prob(thetas)``."""
    batch = as_batch(batch)
    b = 0.0 if baseline is None else baseline.mean
    s = batch.profiles - (coop_prob(np.asarray(thetas, dtype=float)) if probs is None else probs)
    return (s * (batch.total_rewards - b)).sum(axis=0) / len(batch)


@dataclass
class Adam:
    """Adam, elementwise over an array of parameters. ``lr`` is the step size."""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: np.ndarray | None = field(default=None, repr=False)
    v: np.ndarray | None = field(default=None, repr=False)

    def step(self, grad) -> np.ndarray:
        """Return the ascent increment for ``grad``."""
        grad = np.asarray(grad, dtype=float)
        if self.m is None:
            self.m = np.zeros_like(grad)
            self.v = np.zeros_like(grad)
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad**2
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        return self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
