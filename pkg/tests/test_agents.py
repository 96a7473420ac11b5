import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mechdesign.agents import (
    Adam, Baseline, EpisodeBatch, EpisodeRecord, LearnerPolicy, NumericError, coop_prob, exact_learner_grad,
    exact_learner_grads, exact_values, learner_update, logit, profile_probabilities, reinforce_grad,
    sample_action, update_baseline, welfare_grads,
)
from mechdesign.games import MultiPlayerGame, PRESETS, all_profiles, from_greed_fear

PD = PRESETS["pd"]
STAG = PRESETS["stag_hunt"]


def fd(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h)


class TestCoopProb:
    def test_values(self):
        assert coop_prob(0.0) == 0.5
        assert coop_prob(math.log(1 / 3)) == pytest.approx(0.25, abs=1e-15)
        assert 0.999 < coop_prob(1e6) < 1.0
        assert 0.0 < coop_prob(-1e6) < 1e-12

    def test_non_finite(self):
        with pytest.raises(NumericError):
            coop_prob(float("nan"))
        with pytest.raises(NumericError):
            coop_prob(float("inf"))

    # beyond the +-20 parameter clamp float64 can no longer resolve small steps near 1
    @given(st.floats(-20, 20), st.floats(1e-3, 5))
    def test_strictly_increasing(self, x, d):
        assert coop_prob(x + d) > coop_prob(x)

    def test_logit_inverse(self):
        for p in (0.01, 0.25, 0.5, 0.9):
            assert coop_prob(logit(p)) == pytest.approx(p, rel=1e-12)


class TestSampling:
    @pytest.mark.parametrize("theta", [-1.5, 0.0, 0.8])
    def test_frequency_within_3_sigma(self, theta):
        rng = np.random.default_rng(11)
        n = 100_000
        hits = sum(sample_action(LearnerPolicy(theta), rng) for _ in range(n))
        p = coop_prob(theta)
        assert abs(hits / n - p) < 3 * math.sqrt(p * (1 - p) / n)

    def test_deterministic(self):
        a = [sample_action(LearnerPolicy(0.3), np.random.default_rng(5)) for _ in range(1)]
        r1, r2 = np.random.default_rng(5), np.random.default_rng(5)
        seq1 = [sample_action(0.3, r1) for _ in range(200)]
        seq2 = [sample_action(0.3, r2) for _ in range(200)]
        assert seq1 == seq2 and a[0] == seq1[0]

    def test_saturated_defector(self):
        rng = np.random.default_rng(0)
        assert not any(sample_action(-50.0, rng) for _ in range(10_000))


class TestExactValues:
    def test_uniform_pd(self):
        V, Vp = exact_values([0.0, 0.0], PD)
        np.testing.assert_allclose(V, [2.0, 2.0])
        np.testing.assert_array_equal(Vp, [0.0, 0.0])

    def test_pure_cooperation(self):
        V, _ = exact_values([40.0, 40.0], PD)
        np.testing.assert_allclose(V, [3.0, 3.0])
        assert V.sum() == pytest.approx(6.0)

    def test_uniform_welfare_is_mean_entry_sum(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            game = from_greed_fear(*rng.uniform(-2, 2, 2))
            V, _ = exact_values([0.0, 0.0], game)
            assert V.sum() == pytest.approx(game.payoff_table().sum() / 4)

    def test_probabilities_sum_to_one(self):
        for n in (2, 3, 6):
            assert profile_probabilities(np.linspace(-2, 2, n)).sum() == pytest.approx(1.0)


class TestExactGrad:
    def test_pd_uniform(self):
        assert exact_learner_grad(0, [0.0, 0.0], PD) == pytest.approx(-0.25)

    def test_stag_hunt_certain_partner(self):
        theta1 = 0.4
        p1 = coop_prob(theta1)
        got = exact_learner_grad(0, [theta1, 34.0], STAG)
        assert got == pytest.approx(p1 * (1 - p1) * (STAG.reward_cc - STAG.temptation), rel=1e-12)
        assert got > 0

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(2, 4))
            game = from_greed_fear(*rng.uniform(-2, 2, 2)) if n == 2 else MultiPlayerGame(n)
            thetas = rng.uniform(-3, 3, n)
            extra = rng.uniform(-3, 3, (2**n, n))
            for i in range(n):
                def f(x, i=i):
                    t = thetas.copy()
                    t[i] = x
                    V, Vp = exact_values(t, game, extra)
                    return V[i] + Vp[i]

                ref = fd(f, thetas[i])
                got = exact_learner_grad(i, thetas, game, extra)
                assert abs(got - ref) <= 1e-4 * max(abs(ref), 1e-8)

    def test_vectorized_agrees(self):
        thetas = np.array([0.3, -0.7, 1.1])
        game = MultiPlayerGame(3)
        np.testing.assert_allclose(exact_learner_grads(thetas, game),
                                   [exact_learner_grad(i, thetas, game) for i in range(3)])

    def test_welfare_grad_fd(self):
        thetas = np.array([0.5, -1.0])
        for i in range(2):
            def f(x, i=i):
                t = thetas.copy()
                t[i] = x
                return exact_values(t, PD)[0].sum()
            assert welfare_grads(thetas, PD)[i] == pytest.approx(fd(f, thetas[i]), rel=1e-8)


class TestLearnerUpdate:
    def test_step(self):
        assert learner_update(LearnerPolicy(0.0, 0.01), -0.25).theta == pytest.approx(-0.0025)

    def test_zero_grad_is_fixed_point(self):
        pol = LearnerPolicy(0.7, 0.01)
        assert learner_update(learner_update(pol, 0.0), 0.0) == pol

    def test_clamped(self):
        assert learner_update(LearnerPolicy(19.9, 1.0), 5.0).theta == 20.0

    def test_non_finite(self):
        with pytest.raises(NumericError):
            learner_update(LearnerPolicy(0.0), float("inf"))

    def test_invalid_step_size(self):
        with pytest.raises(ValueError):
            LearnerPolicy(0.0, -0.01)


def _record(profile, game=PD, extra=(0.0, 0.0)):
    prof = np.array(profile)
    return EpisodeRecord(prof, game.rewards(prof), np.array(extra, float))


def _sample_batch(thetas, game, n, rng, extra_table=None):
    profiles = (rng.random((n, len(thetas))) < coop_prob(np.asarray(thetas))).astype(np.int8)
    from mechdesign.games import profile_indices

    idx = profile_indices(profiles)
    extra = np.zeros((n, len(thetas))) if extra_table is None else extra_table[idx]
    return EpisodeBatch(profiles, game.payoff_table()[idx], extra)


class TestReinforce:
    def test_cc_batch(self):
        batch = [_record((1, 1)) for _ in range(4)]
        assert reinforce_grad(0, batch, [0.0, 0.0], Baseline.zeros(2)) == pytest.approx(1.5)

    def test_centred_returns_vanish(self):
        batch = [_record((1, 0)), _record((1, 0))]
        assert reinforce_grad(0, batch, [0.0, 0.0], np.array([0.0, 0.0])) == 0.0
        assert reinforce_grad(1, batch, [0.0, 0.0], np.array([0.0, 4.0])) == 0.0

    def test_empty_batch(self):
        with pytest.raises(ValueError):
            reinforce_grad(0, [], [0.0, 0.0])

    def test_pd_monte_carlo(self):
        rng = np.random.default_rng(3)
        n = 100_000
        batch = _sample_batch([0.0, 0.0], PD, n, rng)
        s = batch.profiles[:, 0] - 0.5
        samples = s * batch.total_rewards[:, 0]
        se = samples.std(ddof=1) / math.sqrt(n)
        assert abs(reinforce_grad(0, batch, [0.0, 0.0]) - (-0.25)) < 3 * se

    @pytest.mark.parametrize("use_baseline", [False, True])
    def test_unbiased_random_configs(self, use_baseline):
        rng = np.random.default_rng(4 + use_baseline)
        n = 100_000
        for _ in range(10):
            game = from_greed_fear(*rng.uniform(-1.5, 1.5, 2))
            thetas = rng.uniform(-2, 2, 2)
            extra = rng.uniform(-3, 3, (4, 2))
            base = Baseline(rng.uniform(0, 4, 2)) if use_baseline else None
            batch = _sample_batch(thetas, game, n, rng, extra)
            for i in range(2):
                b = base.mean[i] if base else 0.0
                samples = (batch.profiles[:, i] - coop_prob(thetas[i])) * (batch.total_rewards[:, i] - b)
                se = samples.std(ddof=1) / math.sqrt(n)
                exact = exact_learner_grad(i, thetas, game, extra)
                assert abs(reinforce_grad(i, batch, thetas, base) - exact) < 3 * se

    def test_score_has_zero_mean(self):
        rng = np.random.default_rng(6)
        thetas = np.array([0.9, -0.4])
        batch = _sample_batch(thetas, PD, 100_000, rng)
        s = batch.profiles - coop_prob(thetas)
        se = s.std(axis=0, ddof=1) / math.sqrt(len(batch))
        assert (np.abs(s.mean(axis=0)) < 3 * se).all()


class TestBaseline:
    def test_decay_zero(self):
        assert update_baseline(Baseline.zeros(1, 0.0), [2.5]).mean[0] == 2.5

    def test_ema_step(self):
        assert update_baseline(Baseline.zeros(1, 0.9), [1.0]).mean[0] == pytest.approx(0.1)

    @settings(max_examples=25)
    @given(st.floats(0, 0.95), st.floats(-5, 5))
    def test_converges_to_constant(self, decay, v):
        b = Baseline.zeros(1, decay)
        for _ in range(800):
            b = update_baseline(b, [v])
        assert b.mean[0] == pytest.approx(v, abs=1e-6)

    def test_bad_decay(self):
        with pytest.raises(ValueError):
            Baseline.zeros(2, 1.0)


def test_adam_first_step_is_lr_sized():
    opt = Adam(0.01)
    step = opt.step(np.array([1e-6, -3.0]))
    np.testing.assert_allclose(step, [0.01 * 1e-6 / (1e-6 + 1e-8), -0.01 * 3 / (3 + 1e-8)], rtol=1e-9)


def test_profiles_and_grads_shapes():
    assert all_profiles(2).shape == (4, 2)
    assert exact_learner_grads([0.0, 0.0], PD).shape == (2,)
