import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mechdesign.games import (
    PRESETS, CapacityError, ConfigurationError, DimensionError, MultiPlayerGame, PayoffMatrix, all_profiles,
    classify, from_greed_fear, make_game, modified_greed_fear, multiplayer_payoff, payoff, profile_index,
    profile_indices,
)

PD = PayoffMatrix(reward_cc=3, sucker=0, temptation=4, punishment=1)
finite = st.floats(-10, 10, allow_nan=False)


def test_pd_payoffs():
    assert tuple(payoff(PD, "CD")) == (0, 4)
    assert tuple(payoff(PD, "CC")) == (3, 3)
    assert tuple(payoff(PD, (0, 0))) == (1, 1)


def test_payoff_rejects_wrong_length():
    with pytest.raises(DimensionError):
        payoff(PD, "CCD")


@given(finite, finite, finite, finite, st.sampled_from(["CC", "CD", "DC", "DD"]))
def test_payoff_swap_equivariance(r, s, t, p, prof):
    game = PayoffMatrix(r, s, t, p)
    assert tuple(payoff(game, prof[::-1])) == tuple(payoff(game, prof)[::-1])


def test_classify_canonical_games():
    for game in PRESETS.values():
        assert classify(game).is_dilemma
    # the two-player table variants
    assert classify(PayoffMatrix(3, 1, 4, 0)).is_dilemma
    assert classify(PayoffMatrix(4, 0, 3, 1)).is_dilemma
    assert classify(PayoffMatrix(3, 2, 3.5, 0)).is_dilemma


def test_classify_condition_three_fails():
    report = classify(PayoffMatrix(reward_cc=3, sucker=2, temptation=5, punishment=1))
    assert not report.is_dilemma
    assert report.condition_flags == (True, True, False, True)


@pytest.mark.parametrize("broken", [
    PayoffMatrix(3, 0, 4, 3),    # R == P
    PayoffMatrix(3, 3, 4, 1),    # R == S and P < S, T+S > 2R
    PayoffMatrix(3, 2, 4, 1),    # R == (T+S)/2
    PayoffMatrix(3, 1, 3, 1),    # no greed, no fear
])
def test_classify_equality_is_not_a_dilemma(broken):
    assert not classify(broken).is_dilemma


def test_report_is_conjunction_of_flags():
    for vals in itertools.product([0, 1, 2, 3, 4], repeat=4):
        rep = classify(PayoffMatrix(*vals))
        assert rep.is_dilemma == all(rep.condition_flags)


@pytest.mark.parametrize("greed,fear,T,S", [(1, 1, 4, 0), (0.5, -1, 3.5, 2), (-1, 1, 2, 0), (0, 0, 3, 1)])
def test_from_greed_fear_table(greed, fear, T, S):
    game = from_greed_fear(greed, fear, reward_cc=3, punishment=1)
    assert (game.temptation, game.sucker) == (T, S)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_greed_fear_round_trip(g, f):
    gf = from_greed_fear(g, f, 3.0, 1.0).greed_fear
    # T - R and P - S with R=3, P=1 are exact only up to one rounding of the sum
    assert gf.greed == pytest.approx(g, abs=1e-15)
    assert gf.fear == pytest.approx(f, abs=1e-15)


def test_greed_fear_round_trip_exact_on_dyadic_values():
    for g, f in itertools.product(np.arange(-3, 3.25, 0.25), repeat=2):
        gf = from_greed_fear(g, f, 3.0, 1.0).greed_fear
        assert (gf.greed, gf.fear) == (g, f)


def _brute_multiplayer(n, k, cooperator):
    # tabulate the four footnote anchors and interpolate by hand
    if cooperator:
        return 0 + (3 - 0) * (k - 1) / (n - 1)
    return 1 + (4 - 1) * k / (n - 1)


def test_multiplayer_anchors():
    game = MultiPlayerGame(10)
    assert (multiplayer_payoff(game, [1] * 10) == 3).all()
    assert (multiplayer_payoff(game, [0] * 10) == 1).all()
    one_d = multiplayer_payoff(game, [0] + [1] * 9)
    assert one_d[0] == 4
    one_c = multiplayer_payoff(game, [1] + [0] * 9)
    assert one_c[0] == 0


def test_multiplayer_half_cooperate():
    game = MultiPlayerGame(10)
    r = multiplayer_payoff(game, [1] * 5 + [0] * 5)
    assert r[:5] == pytest.approx([4 / 3] * 5)
    assert r[5:] == pytest.approx([8 / 3] * 5)


def test_multiplayer_matches_brute_force_for_all_k():
    n = 10
    game = MultiPlayerGame(n)
    for k in range(n + 1):
        r = multiplayer_payoff(game, [1] * k + [0] * (n - k))
        for j in range(n):
            assert r[j] == pytest.approx(_brute_multiplayer(n, k, j < k))


def test_multiplayer_two_players_is_pd():
    game = MultiPlayerGame(2)
    np.testing.assert_array_equal(game.payoff_table(), PRESETS["pd"].payoff_table())


def test_multiplayer_monotone_in_k():
    game = MultiPlayerGame(7)
    coop = [game.cooperator_payoff(k) for k in range(1, 8)]
    defect = [game.defector_payoff(k) for k in range(0, 7)]
    assert np.all(np.diff(coop) >= 0) and np.all(np.diff(defect) >= 0)


def test_multiplayer_config_errors():
    with pytest.raises(ConfigurationError):
        MultiPlayerGame(1)
    with pytest.raises(DimensionError):
        multiplayer_payoff(MultiPlayerGame(3), [1, 1])


def test_modified_greed_fear():
    assert modified_greed_fear(PD, np.zeros((4, 2))) == PD.greed_fear
    coop_bonus = {"CC": (1, 1), "CD": (1, 0), "DC": (0, 1), "DD": (0, 0)}
    gf = modified_greed_fear(PD, coop_bonus)
    assert (gf.greed, gf.fear) == (0, 0)
    fine_defector = {"CC": (0, 0), "CD": (0, -1), "DC": (-1, 0), "DD": (0, 0)}
    assert modified_greed_fear(PD, fine_defector).greed == 0


def test_modified_greed_fear_missing_outcome():
    with pytest.raises(DimensionError):
        modified_greed_fear(PD, {"CC": (0, 0), "CD": (0, 0), "DC": (0, 0)})


def test_profile_order_and_index():
    profs = all_profiles(3)
    assert profs.shape == (8, 3)
    assert tuple(profs[0]) == (1, 1, 1) and tuple(profs[-1]) == (0, 0, 0)
    assert [profile_index(p) for p in profs] == list(range(8))
    np.testing.assert_array_equal(profile_indices(profs), np.arange(8))


def test_enumeration_capacity():
    with pytest.raises(CapacityError):
        all_profiles(21)


def test_make_game_presets():
    assert make_game("pd") == PD
    assert make_game("stag_hunt").temptation == 2
    assert make_game("pd_n", 5).n_players == 5
    with pytest.raises(ConfigurationError):
        make_game("hawk_dove")
