import math

import numpy as np
import pytest

from mechdesign.agents import exact_values
from mechdesign.config import ExperimentConfig, apply_overrides
from mechdesign.engine import MetricsRow, Stat, aggregate, run_experiment, run_seed
from mechdesign.games import PRESETS


def cfg(**kw):
    return apply_overrides(ExperimentConfig(), {k.replace("__", "."): v for k, v in kw.items()})


def short(**kw):
    return cfg(episodes_phase1=300, episodes_phase2=100, seeds=[3], **kw)


def test_same_seed_is_bit_identical():
    c = short(planner__mode="estimated")
    assert run_seed(c, 3) == run_seed(c, 3)


def test_different_seeds_differ():
    c = short()
    assert run_seed(c, 1) != run_seed(c, 2)


@pytest.mark.parametrize("value_mode", ["exact", "estimated"])
@pytest.mark.parametrize("optimizer", ["adam", "sgd"])
def test_zero_step_sizes_freeze_learners(value_mode, optimizer):
    rows = run_seed(short(learner__step_size=0, learner__optimizer=optimizer, planner__enabled=False,
                          value_mode=value_mode), 0)
    assert len({r.coop_probs for r in rows}) == 1
    assert rows[0].coop_probs[0] == pytest.approx(0.25, abs=1e-15)


def test_welfare_matches_coop_probs():
    for game in ("pd", "chicken", "stag_hunt"):
        for r in run_seed(short(game__name=game), 0)[::37]:
            thetas = [math.log(p / (1 - p)) for p in r.coop_probs]
            V, _ = exact_values(thetas, PRESETS[game])
            assert r.welfare == pytest.approx(V.sum(), rel=1e-9)
            assert r.p_all_c == pytest.approx(np.prod(r.coop_probs), rel=1e-12)


def test_phase_two_pays_nothing_and_cumulative_grows():
    rows = run_seed(short(), 0)
    ph2 = [r for r in rows if r.phase == 2]
    assert len(ph2) == 100 and all(r.extra == (0.0, 0.0) and r.aar_contrib == 0.0 for r in ph2)
    cum = [r.cum_extra for r in rows]
    assert all(b >= a for a, b in zip(cum, cum[1:]))
    assert cum[-1] == pytest.approx(sum(r.aar_contrib for r in rows))
    assert [r.episode for r in rows] == list(range(1, 401))


def test_planner_disabled_ignores_planner_config():
    a = run_seed(short(planner__enabled=False), 0)
    b = run_seed(short(planner__enabled=False, planner__bound=0.5, planner__step_size=0.3, planner__mode="estimated",
                       planner__revenue_neutral=True, planner__encoding="action_vector", planner__noise_sigma=2.0), 0)
    assert a == b


def test_revenue_neutral_rows_sum_to_zero():
    for mode in ("exact", "estimated"):
        rows = run_seed(short(planner__revenue_neutral=True, planner__mode=mode), 0)
        assert max(abs(sum(r.extra)) for r in rows) <= 1e-12


def test_multiplayer_rows_have_no_greed_fear():
    rows = run_seed(cfg(game__name="pd_n", game__n_players=4, episodes_phase1=20, seeds=[0]), 0)
    assert len(rows[0].coop_probs) == 4 and rows[0].mod_greed is None


def test_opponent_model_runs():
    rows = run_seed(short(opponent_model__enabled=True), 0)
    assert all(np.isfinite(r.welfare) for r in rows)


def test_planner_moves_pd_toward_cooperation():
    rows = run_seed(cfg(episodes_phase1=1500, seeds=[0]), 0)
    assert rows[-1].p_all_c > rows[0].p_all_c


def _row(p):
    return MetricsRow(0, 1, 1, (p, 1.0), p, 0.0, (0.0, 0.0), 0.0, 0.0, None, None)


def test_aggregate_two_point_std():
    s = aggregate([(0, [_row(0.9)]), (1, [_row(1.0)])])
    assert s.p_all_c.mean == pytest.approx(0.95)
    assert s.p_all_c.std == pytest.approx(0.0707, abs=1e-4)


def test_aggregate_identical_and_single():
    assert aggregate([(0, [_row(0.5)]), (1, [_row(0.5)])]).p_all_c.std == 0.0
    assert aggregate([(0, [_row(0.5)])]).p_all_c == Stat(0.5, None)
    with pytest.raises(ValueError):
        aggregate([])


def test_aar_is_phase_one_mean():
    runs = run_experiment(short())
    rows = runs[0][1]
    expected = np.mean([r.aar_contrib for r in rows if r.phase == 1])
    assert aggregate(runs).aar.mean == pytest.approx(expected)


def test_workers_do_not_change_results():
    c = cfg(episodes_phase1=50, seeds=[0, 1])
    assert run_experiment(c) == run_experiment(c, workers=2)
