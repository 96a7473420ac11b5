"""The planning agent.

A single affine layer maps an encoded action profile to one pre-activation
per player; rewards are ``bound * tanh(.)`` and, in revenue-neutral mode,
centred so they sum to zero. The planner is trained by differentiating the
learners' next gradient step with respect to its own parameters.

All exact quantities work on full tables over :func:`all_profiles`, so a
planner "table" is the ``(2**N, N)`` array of rewards it would hand out.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .agents import (Adam, EpisodeBatch, NumericError, as_batch, coop_prob, exact_learner_grads,
                     profile_prob_grads, profile_probabilities, score, welfare_grads)
from .games import (DimensionError, Game, GreedFear, all_profiles, as_profile, modified_greed_fear, profile_index,
                    profile_indices)

ENCODINGS = ("joint_onehot", "action_vector")


class PlannerGrad(NamedTuple):
    weights: np.ndarray
    bias: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate([self.weights.ravel(), self.bias.ravel()])

    def __sub__(self, other: "PlannerGrad") -> "PlannerGrad":
        return PlannerGrad(self.weights - other.weights, self.bias - other.bias)

    def scale(self, k: float) -> "PlannerGrad":
        return PlannerGrad(self.weights * k, self.bias * k)


def encoding_dim(n: int, encoding: str) -> int:
    if encoding == "joint_onehot":
        return 2**n
    if encoding == "action_vector":
        return n
    raise ValueError(f"unknown encoding {encoding!r}; expected one of {ENCODINGS}")


def encode(profile, n: int, encoding: str = "joint_onehot") -> np.ndarray:
    a = as_profile(profile, n)
    if encoding == "joint_onehot":
        x = np.zeros(2**n)
        x[profile_index(a)] = 1.0
        return x
    if encoding == "action_vector":
        return a.astype(float)
    raise ValueError(f"unknown encoding {encoding!r}; expected one of {ENCODINGS}")


@dataclass(frozen=True)
class PlannerPolicy:
    weights: np.ndarray
    bias: np.ndarray
    encoding: str = "joint_onehot"
    bound: float = 3.0
    step_size: float = 0.01
    cost_weight: float = 0.0002
    revenue_neutral: bool = False
    noise_sigma: float = 0.5

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.bias, dtype=float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)
        if w.ndim != 2 or b.shape != (w.shape[1],):
            raise DimensionError(f"weights {w.shape} and bias {b.shape} do not fit together")
        if w.shape[0] != encoding_dim(self.n_players, self.encoding):
            raise DimensionError(
                f"{self.encoding} encoding for {self.n_players} players needs {encoding_dim(self.n_players, self.encoding)}"
                f" input rows, weights have {w.shape[0]}")
        if not self.bound > 0:
            raise ValueError(f"bound must be positive, got {self.bound}")
        if self.cost_weight < 0:
            raise ValueError(f"cost_weight must be >= 0, got {self.cost_weight}")

    @classmethod
    def zeros(cls, n: int, encoding: str = "joint_onehot", **kw) -> "PlannerPolicy":
        return cls(np.zeros((encoding_dim(n, encoding), n)), np.zeros(n), encoding=encoding, **kw)

    @property
    def n_players(self) -> int:
        return self.bias.shape[0]

    @property
    def mixing(self) -> np.ndarray:
        """Linear map applied after bounding (identity or mean removal)."""
        n = self.n_players
        if self.revenue_neutral:
            return np.eye(n) - np.full((n, n), 1.0 / n)
        return np.eye(n)

    def features(self) -> np.ndarray:
        """Encoding of every profile, shape ``(2**N, D)``."""
        if self.encoding == "joint_onehot":
            return np.eye(2**self.n_players)
        return all_profiles(self.n_players).astype(float)

    def preactivations(self) -> np.ndarray:
        if self.encoding == "joint_onehot":
            return self.weights + self.bias
        return all_profiles(self.n_players) @ self.weights + self.bias

    def _back(self, A: np.ndarray) -> PlannerGrad:
        """Pull a gradient w.r.t. the preactivation table back to parameters."""
        if self.encoding == "joint_onehot":
            gw = A.copy()
        else:
            gw = all_profiles(self.n_players).T.astype(float) @ A
        return PlannerGrad(gw, A.sum(axis=0))

    def with_params(self, weights, bias) -> "PlannerPolicy":
        return replace(self, weights=weights, bias=bias)


def _bounded(planner: PlannerPolicy, z: np.ndarray) -> np.ndarray:
    out = planner.bound * np.tanh(z)
    if planner.revenue_neutral:
        out = out - out.mean(axis=-1, keepdims=True)
    return out


def planner_action(planner: PlannerPolicy, profile) -> np.ndarray:
    """Extra rewards the deterministic planner hands out for ``profile``."""
    x = encode(profile, planner.n_players, planner.encoding)
    return _bounded(planner, x @ planner.weights + planner.bias)


def planner_table(planner: PlannerPolicy) -> np.ndarray:
    """Extra rewards for every profile, shape ``(2**N, N)``."""
    return _bounded(planner, planner.preactivations())


def sample_planner_action(planner: PlannerPolicy, profile, rng: np.random.Generator):
    """Stochastic planner: Gaussian noise on the preactivations.

    Returns ``(rewards, noise)`` where ``noise`` is standard normal.
    """
    x = encode(profile, planner.n_players, planner.encoding)
    eps = rng.standard_normal(planner.n_players)
    z = x @ planner.weights + planner.bias + planner.noise_sigma * eps
    return _bounded(planner, z), eps


def sample_episodes(planner: PlannerPolicy, thetas, game: Game, rng: np.random.Generator, size: int,
                    stochastic: bool = True) -> EpisodeBatch:
    """Draw ``size`` independent episodes at fixed ``thetas``."""
    thetas = np.asarray(thetas, dtype=float)
    profiles = (rng.random((size, thetas.shape[0])) < coop_prob(thetas)).astype(np.int8)
    idx = profile_indices(profiles)
    z = planner.preactivations()[idx]
    noise = None
    if stochastic:
        noise = rng.standard_normal(z.shape)
        z = z + planner.noise_sigma * noise
    return EpisodeBatch(profiles, game.payoff_table()[idx], _bounded(planner, z), noise)


def planner_values_exact(thetas, game: Game, planner: PlannerPolicy) -> np.ndarray:
    return profile_probabilities(thetas) @ planner_table(planner)


def _step_sizes(step_sizes, n: int) -> np.ndarray:
    eta = np.broadcast_to(np.asarray(step_sizes, dtype=float), (n,))
    return eta


def _table_grad(planner: PlannerPolicy, weights_per_player: np.ndarray) -> PlannerGrad:
    """Gradient of ``sum_{o,i} weights[o, i] * table[o, i]`` w.r.t. parameters."""
    z = planner.preactivations()
    dtanh = planner.bound / np.cosh(z) ** 2
    return planner._back((weights_per_player @ planner.mixing) * dtanh)


def lookahead_grad_exact(thetas, game: Game, planner: PlannerPolicy, step_sizes=0.01) -> PlannerGrad:
    """Gradient of the one-step look-ahead welfare w.r.t. planner parameters.

    Sums ``eta_i * d/d(theta_p) [dV_i^p/dtheta_i] * dV/dtheta_i`` over
    players, with ``V`` the base-game social welfare.
    """
    eta = _step_sizes(step_sizes, planner.n_players)
    dprob = profile_prob_grads(thetas)
    coeff = dprob * (eta * welfare_grads(thetas, game))
    return _table_grad(planner, coeff)


def lookahead_surrogate(thetas, game: Game, planner: PlannerPolicy, step_sizes=0.01) -> float:
    """``sum_i delta_theta_i . dV/dtheta_i`` with learners stepping on exact gradients."""
    eta = _step_sizes(step_sizes, planner.n_players)
    delta = eta * exact_learner_grads(thetas, game, planner_table(planner))
    return float(delta @ welfare_grads(thetas, game))


def cost_grad(thetas, game: Game, planner: PlannerPolicy) -> PlannerGrad:
    """``cost_weight`` times the gradient of ``||V^p||_2``; zero where the norm vanishes."""
    probs = profile_probabilities(thetas)
    vp = probs @ planner_table(planner)
    norm = np.linalg.norm(vp)
    if norm == 0.0 or planner.cost_weight == 0.0:
        return PlannerGrad(np.zeros_like(planner.weights), np.zeros_like(planner.bias))
    coeff = probs[:, None] * (vp / norm)
    return _table_grad(planner, coeff).scale(planner.cost_weight)


def apply_planner_step(planner: PlannerPolicy, direction: PlannerGrad, optimizer: Adam | None = None) -> PlannerPolicy:
    """Ascend along ``direction``: plain ``step_size`` scaling, or Adam if given."""
    flat = direction.flat()
    if not np.isfinite(flat).all():
        raise NumericError("non-finite planner gradient")
    step = planner.step_size * flat if optimizer is None else optimizer.step(flat)
    nw = planner.weights.size
    return planner.with_params(planner.weights + step[:nw].reshape(planner.weights.shape),
                               planner.bias + step[nw:])


def planner_update_exact(planner: PlannerPolicy, thetas, game: Game, step_sizes=0.01,
                         optimizer: Adam | None = None) -> PlannerPolicy:
    direction = lookahead_grad_exact(thetas, game, planner, step_sizes) - cost_grad(thetas, game, planner)
    return apply_planner_step(planner, direction, optimizer)


def estimated_direction(planner: PlannerPolicy, batch, thetas, step_sizes=0.01, value_batch=None,
                        welfare_baseline: float = 0.0) -> PlannerGrad:
    """Sampled look-ahead direction minus the sampled cost gradient.

    ``batch`` must carry the planner noise it was generated with. The
    welfare-gradient factor is estimated from ``value_batch`` when given
    (independent samples), otherwise from ``batch`` itself.
    """
    batch = as_batch(batch)
    if batch.planner_noise is None:
        raise ValueError("estimated planner update needs episodes generated by the stochastic planner")
    value_batch = batch if value_batch is None else as_batch(value_batch)
    n = planner.n_players
    eta = _step_sizes(step_sizes, n)
    thetas = np.asarray(thetas, dtype=float)
    B = len(batch)

    s_val = score(value_batch.profiles, thetas)
    welfare = value_batch.base_rewards.sum(axis=1, keepdims=True)
    h = (s_val * (welfare - welfare_baseline)).mean(axis=0)

    idx = profile_indices(batch.profiles)
    feats = planner.features()[idx]  # (B, D)
    s = score(batch.profiles, thetas)
    coeff = (s * batch.extra_rewards) @ (eta * h)  # (B,)
    dlogpi = batch.planner_noise / planner.noise_sigma  # d log pi_p / d z, per record
    A = dlogpi * coeff[:, None] / B
    look = PlannerGrad(feats.T @ A, A.sum(axis=0))

    vp = batch.extra_rewards.mean(axis=0)
    norm = np.linalg.norm(vp)
    if norm == 0.0 or planner.cost_weight == 0.0:
        return look
    z = feats @ planner.weights + planner.bias + planner.noise_sigma * batch.planner_noise
    dtanh = planner.bound / np.cosh(z) ** 2
    Ac = (np.broadcast_to(vp / norm / B, (B, n)) @ planner.mixing) * dtanh
    cost = PlannerGrad(feats.T @ Ac, Ac.sum(axis=0)).scale(planner.cost_weight)
    return look - cost


def planner_update_estimated(planner: PlannerPolicy, batch, thetas, step_sizes=0.01, value_batch=None,
                             welfare_baseline: float = 0.0, optimizer: Adam | None = None) -> PlannerPolicy:
    direction = estimated_direction(planner, batch, thetas, step_sizes, value_batch, welfare_baseline)
    return apply_planner_step(planner, direction, optimizer)


def modified_greed_fear_table(game, planner: PlannerPolicy) -> GreedFear:
    """Greed/fear of player 1 under the planner's current reward table."""
    return modified_greed_fear(game, planner_table(planner))


__all__ = [
    "ENCODINGS", "PlannerGrad", "PlannerPolicy", "apply_planner_step", "cost_grad", "encode",
    "encoding_dim", "estimated_direction", "lookahead_grad_exact", "lookahead_surrogate",
    "modified_greed_fear_table", "planner_action", "planner_table", "planner_update_estimated",
    "planner_update_exact", "planner_values_exact", "sample_episodes", "sample_planner_action",
]
