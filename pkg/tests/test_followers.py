import logging

import numpy as np
import pytest

from stacklab import (
    ActionPair, GameInstance, InformationSetting, best_manipulation_oracle, fbm_solve, fmucb_plan,
    pessimistic_fbm_solve, stackelberg_equilibrium,
)
from stacklab.exceptions import ContractViolation, InformationModelError, ManipulationError
from stacklab.followers import (
    FOLLOWER_REGISTRY, BestResponseFollower, FbmFollower, FmucbFollower, FollowerBanditState,
    PessimisticFbmFollower, UcbFollower,
)
from stacklab.followers import manipulation
from stacklab.game import is_qualified

LIMITED = InformationSetting.LIMITED
SIDE = InformationSetting.SIDE
OMNISCIENT = InformationSetting.OMNISCIENT


def exact_state(game: GameInstance, count: int = 10**12, information=SIDE) -> FollowerBanditState:
    """Statistics equal to the exact means, as if every pair had been sampled ``count`` times."""
    state = FollowerBanditState(game.A, game.B, horizon=10**5, delta=0.01, information=information)
    state.counts[:] = count
    state.sum_f[:] = game.mu_f * count
    state.sum_l[:] = game.mu_l * count
    return state


class TestBanditState:

    def test_bookkeeping(self):
        state = FollowerBanditState(2, 2, horizon=100, delta=0.1, information=SIDE)
        state.update(ActionPair(0, 1), 1.0, 0.5)
        state.update(ActionPair(0, 1), 0.0, 0.5)
        state.update(ActionPair(1, 0), 0.25)
        assert state.counts.tolist() == [[0, 2], [1, 0]]
        assert state.mean_f().tolist() == [[0.0, 0.5], [0.25, 0.0]]
        assert state.mean_l().tolist() == [[0.0, 0.5], [0.0, 0.0]]

    def test_limited_follower_refuses_leader_reward(self):
        state = FollowerBanditState(2, 2, horizon=100, delta=0.1, information=LIMITED)
        with pytest.raises(InformationModelError):
            state.update(ActionPair(0, 0), 0.5, 0.5)
        assert state.counts.sum() == 0

    def test_reward_contract(self):
        state = FollowerBanditState(2, 2, horizon=100, delta=0.1, information=SIDE)
        with pytest.raises(ContractViolation):
            state.update(ActionPair(0, 0), 1.2)
        with pytest.raises(IndexError):
            state.update(ActionPair(3, 0), 0.5)

    def test_log_terms(self):
        state = FollowerBanditState(2, 3, horizon=100, delta=0.01)
        assert state.log_t_delta == pytest.approx(np.log(1e4))
        assert state.log_abt_delta == pytest.approx(np.log(6e4))
        assert np.allclose(state.width(1.0), np.sqrt(2.0))


class TestUcbFollower:

    def test_fresh_state_answers_first_action(self):
        follower = UcbFollower(3, 4, horizon=1000)
        assert [follower.respond(a) for a in range(3)] == [0, 0, 0]

    def test_exact_means_give_best_response(self, table1):
        follower = UcbFollower(2, 2, horizon=10**5, information=SIDE)
        follower.load_state(exact_state(table1))
        assert follower.respond(1) == 0
        assert follower.respond(0) == 0

    def test_undersampled_action_has_larger_bonus(self):
        follower = UcbFollower(1, 2, horizon=1000)
        follower.observe(ActionPair(0, 0), 0.5)
        for _ in range(100):
            follower.observe(ActionPair(0, 1), 0.5)
        assert follower.respond(0) == 0

    def test_index_cache_matches_state(self):
        follower = UcbFollower(2, 2, horizon=500)
        for b, r in ((0, 1.0), (1, 0.0), (1, 1.0)):
            follower.observe(ActionPair(1, b), r)
        state = follower.state
        expected = state.mean_f() + state.width(state.log_t_delta)
        assert np.allclose(follower.index, expected)

    def test_limited_follower_never_sees_leader_reward(self):
        follower = UcbFollower(2, 2, horizon=100)
        with pytest.raises(InformationModelError):
            follower.observe(ActionPair(0, 0), 0.5, 0.5)

    def test_omniscient_not_allowed(self):
        with pytest.raises(InformationModelError):
            UcbFollower(2, 2, horizon=100, information=OMNISCIENT)

    def test_bad_leader_action(self):
        with pytest.raises(IndexError):
            UcbFollower(2, 2, horizon=100).respond(2)


class TestFbm:

    def test_table1_plan(self, table1):
        plan = fbm_solve(table1)
        assert plan.response.map == (1, 0)
        assert plan.target == ActionPair(1, 0)
        assert plan.value == pytest.approx(1.0)

    def test_single_leader_action(self):
        game = GameInstance(mu_l=[[0.2, 0.5, 0.9]], mu_f=[[0.3, 0.1, 0.4]])
        assert fbm_solve(game).target == ActionPair(0, 2)

    def test_tied_leader_rewards(self, flat_leader_game):
        with pytest.raises(ManipulationError):
            fbm_solve(flat_leader_game)

    @pytest.mark.parametrize("shape", [(3, 3), (4, 4)])
    @pytest.mark.parametrize("seed", range(25))
    def test_matches_oracle(self, make_game, shape, seed):
        game = make_game(*shape, seed)
        plan = fbm_solve(game)
        assert plan.target == best_manipulation_oracle(game).target
        assert is_qualified(game, plan)
        se = stackelberg_equilibrium(game).pair
        assert game.mu_f[plan.target.a, plan.target.b] >= game.mu_f[se.a, se.b]

    def test_follower_plays_plan(self, table1):
        follower = FbmFollower(table1)
        assert [follower.respond(a) for a in range(2)] == [1, 0]
        assert follower.plan_target == ActionPair(1, 0)

    def test_requires_omniscience(self, table1):
        with pytest.raises(InformationModelError):
            FbmFollower(table1, information=SIDE)


class TestPessimisticFbm:

    def test_flat_leader_game(self, flat_leader_game):
        plan = pessimistic_fbm_solve(flat_leader_game)
        assert plan.response.map == (1, 0)
        assert plan.target == ActionPair(1, 0)
        assert plan.value == pytest.approx(0.5)

    def test_single_leader_action(self):
        game = GameInstance(mu_l=[[0.2, 0.5, 0.9]], mu_f=[[0.3, 0.1, 0.4]])
        assert pessimistic_fbm_solve(game).target == fbm_solve(game).target

    @pytest.mark.parametrize("seed", range(25))
    def test_matches_fbm_without_ties(self, make_game, seed):
        game = make_game(4, 3, seed)
        assert pessimistic_fbm_solve(game).target == fbm_solve(game).target

    def test_side_information_allowed(self, flat_leader_game):
        follower = PessimisticFbmFollower(flat_leader_game, information=SIDE)
        assert follower.respond(0) == 1


class TestFmucb:

    def test_fresh_state_targets_first_pair(self):
        state = FollowerBanditState(3, 2, horizon=1000, delta=0.01, information=SIDE)
        plan = fmucb_plan(state)
        assert plan.target == ActionPair(0, 0)
        assert plan.response.map == (0, 0, 0)
        assert not plan.fallback

    @pytest.mark.parametrize("seed", range(10))
    def test_collapsed_confidence_reduces_to_fbm(self, make_game, seed):
        game = make_game(4, 4, seed)
        plan = fmucb_plan(exact_state(game))
        expected = fbm_solve(game)
        assert plan.target == expected.target
        assert plan.response == expected.response

    def test_table1_collapsed(self, table1):
        plan = fmucb_plan(exact_state(table1))
        assert plan.response.map == (1, 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_plan_maps_target_action_to_target_response(self, seed):
        rng = np.random.default_rng(seed)
        state = FollowerBanditState(3, 3, horizon=1000, delta=0.05, information=SIDE)
        for _ in range(200):
            pair = ActionPair(int(rng.integers(3)), int(rng.integers(3)))
            state.update(pair, float(rng.random()), float(rng.random()))
        plan = fmucb_plan(state)
        assert plan.response[plan.target.a] == plan.target.b

    def test_follower_respond_uses_current_plan(self, table1):
        follower = FmucbFollower(2, 2, horizon=10**5)
        follower.state = exact_state(table1)
        assert follower.respond(0) == 1
        assert follower.respond(1) == 0
        assert follower.plan_target == ActionPair(1, 0)
        assert follower.fallback_rounds == 0

    def test_observe_updates_state(self):
        follower = FmucbFollower(2, 2, horizon=100)
        follower.observe(ActionPair(1, 1), 0.3, 0.7)
        assert follower.state.counts[1, 1] == 1
        assert follower.state.sum_l[1, 1] == pytest.approx(0.7)

    def test_requires_side_information(self):
        with pytest.raises(InformationModelError):
            FmucbFollower(2, 2, horizon=100, information=LIMITED)

    def test_exhausted_candidates_fall_back(self, monkeypatch, caplog):
        monkeypatch.setattr(manipulation, "_greedy_manipulation", lambda *args: (None, 3))
        follower = FmucbFollower(2, 2, horizon=100)
        with caplog.at_level(logging.WARNING, logger="stacklab.followers.manipulation"):
            assert follower.respond(1) == 1
            follower.respond(0)
        assert follower.plan.target == ActionPair(1, 1)
        assert follower.plan.fallback and follower.fallback
        assert follower.fallback_rounds == 2
        assert sum("fallback" in r.getMessage() for r in caplog.records) == 1


class TestBestResponseFollower:

    def test_plays_exact_best_response(self, appendix_a1):
        follower = BestResponseFollower(appendix_a1)
        assert [follower.respond(a) for a in range(2)] == [0, 0]


def test_registry():
    assert set(FOLLOWER_REGISTRY) == {"ucb", "fbm", "fmucb", "fbm_pessimistic", "best_response"}
