"""Self-checks run by ``mechdesign verify``.

Every check compares an implementation against an independent oracle
(central finite differences, Monte-Carlo averages, closed forms). The
functions under test are looked up in a table so a caller can substitute
a deliberately broken version and confirm the corresponding check fails.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import agents, planner as planner_mod
from .experiments import Check
from .games import MultiPlayerGame, PRESETS, from_greed_fear, multiplayer_payoff
from .opponent import OpponentEstimate, mle_update
from .planner import PlannerPolicy

DEFAULT_FUNCS: dict[str, Callable] = {
    "exact_learner_grad": agents.exact_learner_grad,
    "lookahead_grad_exact": planner_mod.lookahead_grad_exact,
    "cost_grad": planner_mod.cost_grad,
    "reinforce_grad": agents.reinforce_grad,
    "estimated_direction": planner_mod.estimated_direction,
}


def _random_game(rng, n):
    return from_greed_fear(*rng.uniform(-2, 2, 2)) if n == 2 else MultiPlayerGame(n)


def _random_planner(rng, n, encoding="joint_onehot", **kw):
    d = 2**n if encoding == "joint_onehot" else n
    return PlannerPolicy(rng.normal(0, 0.6, (d, n)), rng.normal(0, 0.6, n), encoding=encoding, **kw)


def _fd_over_planner(f, pl, h):
    flat = np.concatenate([pl.weights.ravel(), pl.bias.ravel()])
    nw = pl.weights.size
    out = np.empty_like(flat)
    for k in range(flat.size):
        up, dn = flat.copy(), flat.copy()
        up[k] += h
        dn[k] -= h
        out[k] = (f(pl.with_params(up[:nw].reshape(pl.weights.shape), up[nw:]))
                  - f(pl.with_params(dn[:nw].reshape(pl.weights.shape), dn[nw:]))) / (2 * h)
    return out


def _rel(got, ref):
    return float(np.linalg.norm(np.asarray(got) - ref) / max(np.linalg.norm(ref), 1e-12))


def check_learner_fd(funcs, tol, h, n_configs, rng) -> Check:
    worst = 0.0
    for _ in range(n_configs):
        n = int(rng.integers(2, 4))
        game = _random_game(rng, n)
        thetas = rng.uniform(-3, 3, n)
        extra = rng.uniform(-3, 3, (2**n, n))
        for i in range(n):
            def f(x):
                t = thetas.copy()
                t[i] = x
                V, Vp = agents.exact_values(t, game, extra)
                return V[i] + Vp[i]

            ref = (f(thetas[i] + h) - f(thetas[i] - h)) / (2 * h)
            worst = max(worst, abs(funcs["exact_learner_grad"](i, thetas, game, extra) - ref) / max(abs(ref), 1e-12))
    return Check("learner gradient vs finite differences", worst <= tol, f"max rel err {worst:.2e} (tol {tol:g})")


def check_lookahead_fd(funcs, tol, h, n_configs, rng) -> Check:
    worst = 0.0
    for _ in range(n_configs):
        n = int(rng.integers(2, 4))
        game = _random_game(rng, n)
        pl = _random_planner(rng, n, str(rng.choice(planner_mod.ENCODINGS)), revenue_neutral=bool(rng.integers(2)))
        thetas, eta = rng.uniform(-2, 2, n), rng.uniform(0.005, 0.1, n)
        ref = _fd_over_planner(lambda p: planner_mod.lookahead_surrogate(thetas, game, p, eta), pl, h)
        worst = max(worst, _rel(funcs["lookahead_grad_exact"](thetas, game, pl, eta).flat(), ref))
    return Check("look-ahead planner gradient vs finite differences", worst <= tol,
                 f"max rel err {worst:.2e} (tol {tol:g})")


def check_cost_fd(funcs, tol, h, n_configs, rng) -> Check:
    worst = 0.0
    for _ in range(n_configs):
        n = int(rng.integers(2, 4))
        game = _random_game(rng, n)
        pl = _random_planner(rng, n, str(rng.choice(planner_mod.ENCODINGS)), revenue_neutral=bool(rng.integers(2)),
                             cost_weight=float(rng.uniform(0.01, 1)))
        thetas = rng.uniform(-2, 2, n)

        def f(p):
            return p.cost_weight * np.linalg.norm(planner_mod.planner_values_exact(thetas, game, p))

        if f(pl) / pl.cost_weight <= 1e-6:
            continue
        worst = max(worst, _rel(funcs["cost_grad"](thetas, game, pl).flat(), _fd_over_planner(f, pl, h)))
    return Check("cost gradient vs finite differences", worst <= tol, f"max rel err {worst:.2e} (tol {tol:g})")


def check_reinforce_unbiased(funcs, rng, n_samples=100_000, n_configs=10) -> Check:
    worst = 0.0
    for _ in range(n_configs):
        game = _random_game(rng, 2)
        thetas = rng.uniform(-2, 2, 2)
        pl = _random_planner(rng, 2)
        batch = planner_mod.sample_episodes(pl, thetas, game, rng, n_samples, stochastic=False)
        base = agents.Baseline(rng.uniform(0, 4, 2))
        table = planner_mod.planner_table(pl)
        for i in range(2):
            s = batch.profiles[:, i] - agents.coop_prob(thetas[i])
            se = (s * (batch.total_rewards[:, i] - base.mean[i])).std(ddof=1) / math.sqrt(n_samples)
            err = abs(funcs["reinforce_grad"](i, batch, thetas, base) - agents.exact_learner_grad(i, thetas, game, table))
            worst = max(worst, err / se)
    return Check("REINFORCE gradient unbiased (3 standard errors)", worst < 3.0, f"max |z| {worst:.2f}")


def check_estimated_alignment(funcs, rng, n_samples=100_000, n_configs=20) -> Check:
    pd = PRESETS["pd"]
    hits = 0
    for _ in range(n_configs):
        thetas = rng.uniform(-2, 2, 2)
        pl = _random_planner(rng, 2, cost_weight=0.0)
        batch = planner_mod.sample_episodes(pl, thetas, pd, rng, n_samples)
        values = planner_mod.sample_episodes(pl, thetas, pd, rng, n_samples)
        est = funcs["estimated_direction"](pl, batch, thetas, value_batch=values).flat()
        hits += float(est @ funcs["lookahead_grad_exact"](thetas, pd, pl).flat()) > 0
    return Check("sampled planner update aligned with exact gradient", hits >= math.ceil(0.95 * n_configs),
                 f"{hits}/{n_configs} positive inner products")


def check_planner_constraints(rng, n_configs=200) -> Check:
    ok = True
    for _ in range(n_configs):
        n = int(rng.integers(2, 6))
        enc = str(rng.choice(planner_mod.ENCODINGS))
        d = 2**n if enc == "joint_onehot" else n
        w, b = rng.normal(0, 10, (d, n)), rng.normal(0, 10, n)
        plain = planner_mod.planner_table(PlannerPolicy(w, b, enc))
        rn = planner_mod.planner_table(PlannerPolicy(w, b, enc, revenue_neutral=True))
        ok &= bool((np.abs(plain) <= 3).all() and (np.abs(rn.sum(axis=1)) <= 1e-12).all() and (np.abs(rn) <= 6).all())
    return Check("planner output bound and zero-sum projection", ok, f"{n_configs} random planners")


def check_closed_forms(rng) -> Check:
    problems = []
    for g, f in rng.uniform(-3, 3, (100, 2)):
        gf = from_greed_fear(g, f).greed_fear
        if abs(gf.greed - g) > 1e-15 or abs(gf.fear - f) > 1e-15:
            problems.append("greed/fear round trip")
            break
    mp = MultiPlayerGame(10)
    half = multiplayer_payoff(mp, [1] * 5 + [0] * 5)
    if not (np.allclose(half[:5], 4 / 3) and np.allclose(half[5:], 8 / 3)):
        problems.append("multi-player interpolation")
    est = OpponentEstimate(1)
    for a in (1, 1, 0, 1):
        mle_update(est, 0, a)
    if abs(est.theta_hat(0) - math.log(2)) > 1e-12:
        problems.append("opponent estimate")
    return Check("closed-form identities", not problems, ", ".join(problems) or "greed/fear, N-player, MLE")


def run_checks(fd_tol: float = 1e-4, h: float = 1e-5, n_configs: int = 100, seed: int = 0,
               funcs: dict[str, Callable] | None = None) -> list[Check]:
    impl = {**DEFAULT_FUNCS, **(funcs or {})}
    # one independent stream per check, so changing one check's workload never shifts another's samples
    rngs = [np.random.default_rng(ss) for ss in np.random.SeedSequence(seed).spawn(7)]
    return [
        check_learner_fd(impl, fd_tol, h, n_configs, rngs[0]),
        check_lookahead_fd(impl, fd_tol, h, n_configs, rngs[1]),
        check_cost_fd(impl, fd_tol, h, n_configs, rngs[2]),
        check_reinforce_unbiased(impl, rngs[3]),
        check_estimated_alignment(impl, rngs[4]),
        check_planner_constraints(rngs[5]),
        check_closed_forms(rngs[6]),
    ]
