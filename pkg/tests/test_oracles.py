import pytest

from stacklab import (
    ActionPair, GameInstance, best_manipulation_oracle, enumerate_manipulations, fbm_solve,
    gap_profile, pessimistic_fbm_solve, pessimistic_oracle, stackelberg_equilibrium,
)
from stacklab.exceptions import DegenerateGameError, EnumerationLimitError
from stacklab.game import is_qualified
from stacklab.oracles import enumeration_size


class TestEnumeration:

    def test_table1_qualified_plans(self, table1):
        plans = enumerate_manipulations(table1)
        responses = {plan.response.map for plan, _ in plans}
        # (a1 -> b1, a2 -> b2) ties the leader at 0.3 and is excluded.
        assert responses == {(0, 0), (1, 0), (1, 1)}
        best_plan, best_value = max(plans, key=lambda item: item[1])
        assert best_plan.response.map == (1, 0)
        assert best_plan.target == ActionPair(1, 0)
        assert best_value == pytest.approx(1.0)

    def test_single_leader_action_all_qualified(self):
        game = GameInstance(mu_l=[[0.2, 0.5, 0.9]], mu_f=[[0.3, 0.1, 0.4]])
        assert enumeration_size(game) == 3
        assert len(enumerate_manipulations(game)) == 3

    def test_count_is_b_to_the_a(self):
        game = GameInstance(mu_l=[[0.1, 0.2], [0.3, 0.4]], mu_f=[[0.5, 0.6], [0.7, 0.8]])
        assert enumeration_size(game) == 4

    def test_cap(self, make_game):
        with pytest.raises(EnumerationLimitError):
            enumerate_manipulations(make_game(3, 3, 1), cap=10)
        with pytest.raises(EnumerationLimitError):
            best_manipulation_oracle(make_game(3, 3, 1), cap=26)


class TestBestManipulationOracle:

    def test_table1(self, table1):
        plan = best_manipulation_oracle(table1)
        assert plan.target == ActionPair(1, 0)
        assert plan.value == pytest.approx(1.0)

    def test_se_is_follower_best(self):
        game = GameInstance(mu_l=[[0.9, 0.1], [0.2, 0.3]], mu_f=[[0.95, 0.1], [0.4, 0.3]])
        plan = best_manipulation_oracle(game)
        assert plan.target == stackelberg_equilibrium(game).pair
        assert gap_profile(game).manipulation_gap == 0.0

    def test_degenerate_game(self, flat_leader_game):
        with pytest.raises(DegenerateGameError):
            best_manipulation_oracle(flat_leader_game)

    @pytest.mark.parametrize("seed", range(25))
    def test_oracle_plan_is_qualified_and_beats_se(self, make_game, seed):
        game = make_game(3, 3, seed)
        plan = best_manipulation_oracle(game)
        se = stackelberg_equilibrium(game).pair
        assert is_qualified(game, plan)
        assert plan.value >= game.mu_f[se.a, se.b]


class TestPessimisticOracle:

    def test_flat_leader_maximizes_row_minimum(self, flat_leader_game):
        plan, value = pessimistic_oracle(flat_leader_game)
        assert plan.response.map == (1, 0)
        assert plan.target == ActionPair(1, 0)
        assert value == pytest.approx(0.5)

    def test_single_leader_action(self):
        game = GameInstance(mu_l=[[0.2, 0.5, 0.9]], mu_f=[[0.3, 0.1, 0.4]])
        plan, value = pessimistic_oracle(game)
        assert plan.target == ActionPair(0, 2)
        assert value == pytest.approx(0.4)

    @pytest.mark.parametrize("seed", range(25))
    def test_pessimistic_value_never_exceeds_best(self, make_game, seed):
        game = make_game(3, 4, seed)
        _, value = pessimistic_oracle(game)
        assert value <= best_manipulation_oracle(game).value + 1e-12


def _random_shapes():
    for seed in range(200):
        yield 2 + seed % 3, 2 + (seed // 3) % 3, seed


class TestGreedySolversMatchOracles:

    def test_fbm_and_pessimistic_match_exhaustive_search(self, make_game):
        failures = []
        for A, B, seed in _random_shapes():
            game = make_game(A, B, 10_000 + seed)
            if fbm_solve(game).target != best_manipulation_oracle(game).target:
                failures.append(("fbm", A, B, seed))
            plan, value = pessimistic_oracle(game)
            greedy = pessimistic_fbm_solve(game)
            if greedy.target != plan.target or greedy.value != pytest.approx(value):
                failures.append(("pessimistic", A, B, seed))
        assert failures == []

    def test_table1_fbm_response(self, table1):
        plan = fbm_solve(table1)
        assert plan.response.map == (1, 0)
        assert plan.target == ActionPair(1, 0)

    def test_pessimistic_flat_game_matches_oracle(self, flat_leader_game):
        plan, value = pessimistic_oracle(flat_leader_game)
        greedy = pessimistic_fbm_solve(flat_leader_game)
        assert greedy.target == plan.target
        assert greedy.value == pytest.approx(value)
