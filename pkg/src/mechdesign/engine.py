"""Seeded two-phase simulations of learners and the planning agent.

Phase 1 runs with the planner active (if enabled); phase 2 freezes it and
pays nothing. Every episode emits one :class:`MetricsRow` evaluated at the
post-update parameters.
"""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .agents import (THETA_CLAMP, Adam, Baseline, EpisodeBatch, NumericError, coop_prob, exact_learner_grads,
                     _joint, _sigmoid, logit, reinforce_grads, update_baseline)
from .config import ExperimentConfig
from .games import Game, PayoffMatrix, profile_indices
from .opponent import OpponentEstimate, observe_profile, substitute
from .planner import (PlannerPolicy, apply_planner_step, cost_grad, estimated_direction, lookahead_grad_exact,
                      modified_greed_fear_table, planner_table)


class SimulationError(RuntimeError):
    def __init__(self, seed, episode, cause):
        super().__init__(f"seed {seed}, episode {episode}: {cause}")
        self.seed = seed
        self.episode = episode


@dataclass(frozen=True)
class MetricsRow:
    seed: int
    phase: int
    episode: int
    coop_probs: tuple[float, ...]
    p_all_c: float
    welfare: float
    extra: tuple[float, ...]
    aar_contrib: float
    cum_extra: float
    mod_greed: float | None
    mod_fear: float | None


@dataclass
class RunState:
    """Mutable per-run state. One instance is owned by exactly one run."""

    config: ExperimentConfig
    game: Game
    seed: int
    thetas: np.ndarray
    baseline: Baseline
    planner: PlannerPolicy
    learner_opt: Adam | None
    planner_opt: Adam | None
    opponents: OpponentEstimate | None
    welfare_baseline: float = 0.0
    cum_extra: float = 0.0
    episode: int = 0
    phase: int = 1
    table: np.ndarray = field(init=False, repr=False)
    payoffs: np.ndarray = field(init=False, repr=False)
    probs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.payoffs = self.game.payoff_table()
        self.probs = coop_prob(self.thetas)
        self.table = planner_table(self.planner)

    @property
    def planner_active(self) -> bool:
        return self.config.planner.enabled and self.phase == 1


def init_state(config: ExperimentConfig, seed: int) -> RunState:
    game = config.game.build()
    n = game.n_players
    pc = config.planner
    planner = PlannerPolicy.zeros(n, pc.encoding, bound=pc.bound, step_size=pc.step_size,
                                  cost_weight=pc.cost_weight, revenue_neutral=pc.revenue_neutral,
                                  noise_sigma=pc.noise_sigma)
    lc = config.learner
    om = config.opponent_model
    return RunState(
        config=config,
        game=game,
        seed=seed,
        thetas=np.full(n, logit(config.initial_coop_prob)),
        baseline=Baseline.zeros(n, lc.baseline_decay),
        planner=planner,
        learner_opt=Adam(lc.step_size) if lc.optimizer == "adam" else None,
        planner_opt=Adam(pc.step_size) if pc.optimizer == "adam" else None,
        opponents=OpponentEstimate(n, om.window, om.smoothing) if om.enabled else None,
    )


def _play(state: RunState, p: np.ndarray, rng: np.random.Generator, stochastic_planner: bool):
    """Sample ``batch_size`` episodes at cooperation probabilities ``p`` under the current planner."""
    n = p.shape[0]
    B = state.config.learner.batch_size
    profiles = (rng.random((B, n)) < p).astype(np.int8)
    idx = profile_indices(profiles)
    base = state.payoffs[idx]
    noise = None
    if not state.planner_active:
        extra = np.zeros_like(base)
    elif stochastic_planner:
        pl = state.planner
        noise = rng.standard_normal((B, n))
        z = pl.preactivations()[idx] + pl.noise_sigma * noise
        extra = pl.bound * np.tanh(z)
        if pl.revenue_neutral:
            extra = extra - extra.mean(axis=1, keepdims=True)
    else:
        extra = state.table[idx]
    return EpisodeBatch(profiles, base, extra, noise)


def run_episode(state: RunState, rng: np.random.Generator) -> tuple[RunState, MetricsRow]:
    cfg = state.config
    state.episode += 1
    thetas = state.thetas.copy()
    estimated_planner = cfg.planner.mode == "estimated"
    probs = state.probs
    batch = _play(state, probs, rng, stochastic_planner=estimated_planner)

    if cfg.value_mode == "exact":
        grads = exact_learner_grads(thetas, state.game, state.table if state.planner_active else None)
    else:
        grads = reinforce_grads(batch, thetas, state.baseline if cfg.learner.use_baseline else None, probs)
    state.baseline = update_baseline(state.baseline, batch.total_rewards.sum(axis=0) / len(batch))

    if state.planner_active:
        seen = thetas
        if state.opponents is not None:
            for a in batch.profiles:
                observe_profile(state.opponents, a)
            seen = substitute(state.opponents)
        eta = cfg.learner.step_size
        if estimated_planner:
            value_batch = None
            if cfg.planner.value_batches == "independent":
                value_batch = _play(state, probs, rng, stochastic_planner=True)
            direction = estimated_direction(state.planner, batch, seen, eta, value_batch, state.welfare_baseline)
            welfare = batch.base_rewards.sum(axis=1).mean()
            state.welfare_baseline = cfg.learner.baseline_decay * state.welfare_baseline + (
                1 - cfg.learner.baseline_decay) * welfare
        else:
            direction = lookahead_grad_exact(seen, state.game, state.planner, eta) - cost_grad(
                seen, state.game, state.planner)
        state.planner = apply_planner_step(state.planner, direction, state.planner_opt)
        state.table = planner_table(state.planner)

    if not np.isfinite(grads).all():
        raise NumericError(f"non-finite learner gradient {grads}")
    step = cfg.learner.step_size * grads if state.learner_opt is None else state.learner_opt.step(grads)
    state.thetas = np.clip(thetas + step, -THETA_CLAMP, THETA_CLAMP)

    return state, _metrics(state, batch)


def _metrics(state: RunState, batch: EpisodeBatch) -> MetricsRow:
    probs = state.probs = _sigmoid(state.thetas)
    V = _joint(probs, 1.0 - probs) @ state.payoffs
    B = len(batch)
    extra = batch.extra_rewards.sum(axis=0) / B
    aar = float(np.abs(batch.extra_rewards).sum()) / B
    state.cum_extra += aar
    greed = fear = None
    if isinstance(state.game, PayoffMatrix):
        gf = modified_greed_fear_table(state.game, state.planner) if state.planner_active else state.game.greed_fear
        greed, fear = float(gf.greed), float(gf.fear)
    return MetricsRow(
        seed=state.seed,
        phase=state.phase,
        episode=state.episode,
        coop_probs=tuple(probs.tolist()),
        p_all_c=float(np.prod(probs)),
        welfare=float(V.sum()),
        extra=tuple(extra.tolist()),
        aar_contrib=aar,
        cum_extra=state.cum_extra,
        mod_greed=greed,
        mod_fear=fear,
    )


def run_seed(config: ExperimentConfig, seed: int) -> list[MetricsRow]:
    """Both phases for one seed. Deterministic in ``(config, seed)``."""
    rng = np.random.default_rng(seed)
    state = init_state(config, seed)
    rows = []
    for phase, count in ((1, config.episodes_phase1), (2, config.episodes_phase2)):
        state.phase = phase
        for _ in range(count):
            try:
                state, row = run_episode(state, rng)
            except (NumericError, FloatingPointError) as exc:
                raise SimulationError(seed, state.episode, exc) from exc
            rows.append(row)
    return rows


def _run_seed_args(args):
    return run_seed(*args)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> list[tuple[int, list[MetricsRow]]]:
    """Run every seed; ``workers > 1`` spreads seeds over processes."""
    config.validate()
    seeds = list(config.seeds)
    if workers and workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
            results = list(pool.map(_run_seed_args, [(config, s) for s in seeds]))
    else:
        results = [run_seed(config, s) for s in seeds]
    return list(zip(seeds, results))


class Stat(NamedTuple):
    mean: float
    std: float | None


@dataclass(frozen=True)
class RunSummary:
    n_seeds: int
    p_all_c: Stat
    welfare: Stat
    aar: Stat
    mean_coop_prob: Stat

    def as_dict(self) -> dict[str, Stat]:
        return {"p_all_c": self.p_all_c, "welfare": self.welfare, "aar": self.aar,
                "mean_coop_prob": self.mean_coop_prob}


def _stat(values: Sequence[float]) -> Stat:
    values = list(values)
    std = statistics.stdev(values) if len(values) > 1 else None
    return Stat(statistics.fmean(values), std)


def aggregate(runs: Sequence[tuple[int, Sequence[MetricsRow]]]) -> RunSummary:
    """Across-seed mean and unbiased std of the final-episode metrics.

    AAR is the mean over phase-1 episodes of the per-episode sum of absolute
    extra rewards.
    """
    if not runs:
        raise ValueError("no runs to aggregate")
    finals = [rows[-1] for _, rows in runs]
    aars = []
    for _, rows in runs:
        ph1 = [r.aar_contrib for r in rows if r.phase == 1]
        aars.append(statistics.fmean(ph1) if ph1 else 0.0)
    return RunSummary(
        n_seeds=len(runs),
        p_all_c=_stat(r.p_all_c for r in finals),
        welfare=_stat(r.welfare for r in finals),
        aar=_stat(aars),
        mean_coop_prob=_stat(statistics.fmean(r.coop_probs) for r in finals),
    )


def phase_rows(rows: Sequence[MetricsRow], phase: int) -> list[MetricsRow]:
    return [r for r in rows if r.phase == phase]
