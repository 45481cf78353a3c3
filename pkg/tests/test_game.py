import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stacklab import (
    ActionPair, GameInstance, GameGenerationError, ManipulationPlan, NoiseMode, Player,
    ResponseFunction, best_response, best_response_function, gap_profile, induced_leader_rewards,
    is_qualified, leader_argmax_set, load_game, random_game, sample_reward, save_game,
    stackelberg_equilibrium, worst_response,
)
from stacklab.game import competitor_levels, game_is_regular, manipulation_is_unique
from stacklab.rng import RngStream


class TestGameInstance:

    def test_rejects_mismatched_shapes(self):
        with pytest.raises(ValueError):
            GameInstance(mu_l=[[0.1, 0.2]], mu_f=[[0.1], [0.2]])

    def test_rejects_out_of_range_means(self):
        with pytest.raises(ValueError):
            GameInstance(mu_l=[[1.2]], mu_f=[[0.5]])

    def test_matrices_are_read_only(self, table1):
        with pytest.raises(ValueError):
            table1.mu_l[0, 0] = 0.9

    def test_json_round_trip(self, table1, tmp_path):
        path = tmp_path / "game.json"
        save_game(table1, str(path))
        assert load_game(str(path)) == table1

    def test_declared_size_must_match(self):
        with pytest.raises(ValueError):
            GameInstance.from_dict({"A": 3, "B": 1, "mu_l": [[0.1]], "mu_f": [[0.2]]})


class TestSampling:

    def test_noiseless_returns_mean_without_draws(self, table1):
        rng = RngStream(1, "leader-reward")
        assert sample_reward(table1, ActionPair(1, 0), Player.FOLLOWER, rng, NoiseMode.NOISELESS) == 1.0
        assert rng.counter == 0

    def test_bernoulli_consumes_one_draw(self, table1):
        rng = RngStream(1, "leader-reward")
        r = sample_reward(table1, ActionPair(0, 0), Player.LEADER, rng)
        assert r in (0.0, 1.0)
        assert rng.counter == 1

    def test_degenerate_means_are_deterministic(self):
        game = GameInstance(mu_l=[[0.0, 1.0]], mu_f=[[1.0, 0.0]])
        rng = RngStream(3)
        for _ in range(50):
            assert sample_reward(game, ActionPair(0, 0), Player.LEADER, rng) == 0.0
            assert sample_reward(game, ActionPair(0, 1), Player.LEADER, rng) == 1.0

    def test_bernoulli_frequency_matches_mean(self, table1):
        rng = RngStream(11)
        draws = [sample_reward(table1, ActionPair(0, 0), Player.LEADER, rng) for _ in range(20000)]
        assert abs(np.mean(draws) - 0.3) < 0.02

    def test_out_of_bounds_pair(self, table1):
        with pytest.raises(IndexError):
            sample_reward(table1, ActionPair(2, 0), Player.LEADER, RngStream(0))

    def test_same_stream_name_same_draws(self):
        a, b = RngStream(42, "x"), RngStream(42, "x")
        assert [a.uniform() for _ in range(5000)] == [b.uniform() for _ in range(5000)]

    def test_named_streams_differ(self):
        a, b = RngStream(42, "leader-sample"), RngStream(42, "leader-reward")
        assert [a.uniform() for _ in range(10)] != [b.uniform() for _ in range(10)]


class TestResponses:

    def test_table1_best_responses(self, table1):
        assert best_response(table1, 0) == 0
        assert best_response(table1, 1) == 0

    def test_table1_worst_responses(self, table1):
        assert worst_response(table1, 0) == 1
        assert worst_response(table1, 1) == 0

    def test_ties_break_to_lowest_index(self):
        game = GameInstance(mu_l=[[0.4, 0.4, 0.4]], mu_f=[[0.7, 0.7, 0.1]])
        assert best_response(game, 0) == 0
        assert worst_response(game, 0) == 0

    def test_leader_action_out_of_bounds(self, table1):
        with pytest.raises(IndexError):
            best_response(table1, 5)
        with pytest.raises(IndexError):
            worst_response(table1, -1)

    def test_induced_rewards_and_argmax_set(self, table1):
        F = ResponseFunction((1, 0))
        assert np.allclose(induced_leader_rewards(table1, F), [0.1, 0.2])
        assert leader_argmax_set(table1, F) == [1]
        assert leader_argmax_set(table1, ResponseFunction((0, 1))) == [0, 1]

    def test_is_qualified(self, table1):
        plan = ManipulationPlan(ResponseFunction((1, 0)), ActionPair(1, 0))
        assert is_qualified(table1, plan)
        tied = ManipulationPlan(ResponseFunction((0, 1)), ActionPair(1, 1))
        assert not is_qualified(table1, tied)
        assert is_qualified(table1, tied, strict=False)

    def test_competitor_levels(self):
        assert competitor_levels(np.array([0.1, 0.5, 0.3])).tolist() == [0.5, 0.3, 0.5]
        assert competitor_levels(np.array([0.4])).tolist() == [-math.inf]


class TestEquilibrium:

    def test_table1_se(self, table1):
        result = stackelberg_equilibrium(table1)
        assert result.pair == ActionPair(0, 0)
        assert result.unique

    def test_appendix_a1_se(self, appendix_a1):
        assert stackelberg_equilibrium(appendix_a1).pair == ActionPair(1, 0)

    def test_single_cell_game(self):
        result = stackelberg_equilibrium(GameInstance(mu_l=[[0.5]], mu_f=[[0.5]]))
        assert result.pair == ActionPair(0, 0)

    def test_tied_leader_values_flagged(self):
        game = GameInstance(mu_l=[[0.5, 0.1], [0.5, 0.2]], mu_f=[[0.9, 0.1], [0.8, 0.3]])
        result = stackelberg_equilibrium(game)
        assert result.pair == ActionPair(0, 0)
        assert result.unique_best_responses
        assert not result.unique_leader_argmax

    @pytest.mark.parametrize("seed", range(20))
    def test_se_maximizes_leader_value_under_best_response(self, make_game, seed):
        game = make_game(4, 3, seed)
        se = stackelberg_equilibrium(game).pair
        values = induced_leader_rewards(game, best_response_function(game))
        assert game.mu_l[se.a, se.b] == values.max()


class TestGapProfile:

    def test_table1_gaps(self, table1):
        gaps = gap_profile(table1)
        assert gaps.se_pair == ActionPair(0, 0)
        assert gaps.fm_pair == ActionPair(1, 0)
        assert gaps.manipulation_gap == pytest.approx(0.9)
        assert gaps.delta1 == pytest.approx(0.05)
        assert gaps.delta2 == pytest.approx(0.1)
        assert gaps.delta3 == pytest.approx(0.1)
        assert gaps.delta4 == pytest.approx(0.9)
        assert gaps.delta5 == pytest.approx(0.1)
        assert math.isinf(gaps.delta6)

    def test_sentinel_serializes_as_null(self, table1):
        assert gap_profile(table1).to_dict()["delta6"] is None

    def test_appendix_a1_gaps(self, appendix_a1):
        gaps = gap_profile(appendix_a1)
        assert gaps.delta1 == pytest.approx(0.01)
        assert gaps.delta2 == pytest.approx(0.05)
        assert gaps.manipulation_gap == pytest.approx(0.0)
        assert gaps.epsilon_limited == pytest.approx(0.01)

    def test_single_cell_game_all_sentinels(self):
        gaps = gap_profile(GameInstance(mu_l=[[0.5]], mu_f=[[0.5]]))
        for value in (gaps.delta1, gaps.delta2, gaps.delta3, gaps.delta5, gaps.delta6):
            assert math.isinf(value)
        assert gaps.manipulation_gap == 0.0

    @pytest.mark.parametrize("seed", range(30))
    def test_manipulation_gap_nonnegative(self, make_game, seed):
        gaps = gap_profile(make_game(5, 5, seed))
        assert gaps.manipulation_gap >= 0.0
        assert gaps.delta1 > 0 and gaps.delta2 > 0


class TestRandomGame:

    def test_deterministic_for_seed(self):
        assert random_game(3, 4, 17) == random_game(3, 4, 17)

    def test_different_seeds_differ(self):
        assert random_game(3, 4, 17) != random_game(3, 4, 18)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32), A=st.integers(1, 5), B=st.integers(1, 5))
    def test_generated_games_are_regular(self, seed, A, B):
        game = random_game(A, B, seed)
        assert (game.A, game.B) == (A, B)
        assert game.mu_l.min() > 0 and game.mu_l.max() < 1
        assert game_is_regular(game)
        assert manipulation_is_unique(game)

    def test_resample_cap(self):
        with pytest.raises(GameGenerationError):
            random_game(2, 2, 5, max_attempts=0)

    def test_rejects_empty_dimensions(self):
        with pytest.raises(ValueError):
            random_game(0, 3, 1)
