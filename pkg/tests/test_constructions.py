from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from coevolve.game import prisoners_dilemma, rock_paper_scissors
from coevolve.population import fitness_profile, is_balanced, validate
from coevolve.preferences import CostSchedule, DeceptionTable, Environment, PreconditionError
from coevolve.stability import (
    build_type_game,
    check_highest_type_conditions,
    construct_rps_example,
    construct_rps_nsc,
    is_nss,
    rps_frequencies,
)
from coevolve.stability.constructions import rps_top_level

RPS = rock_paper_scissors()


def rps_env(step, q=F(1)):
    return Environment(RPS, CostSchedule.linear(step), DeceptionTable((), q))


def test_top_level_is_last_cost_within_payoff_range():
    assert rps_top_level(rps_env(F(3, 10))) == 7
    assert rps_top_level(rps_env(F(1, 2))) == 5


def test_even_level_count_takes_midpoint_of_solution_segment():
    costs = CostSchedule((F(0), F(1, 2), F(1), F(3, 2), F(5, 2)))
    top, mu = rps_frequencies(Environment(RPS, costs, DeceptionTable((), F(1))))
    # shares alternate as (m, 1/2 - m); the nonnegative segment is [0, 1/2]
    assert top == 4 and mu == [F(1, 4)] * 4


def test_even_level_count_can_be_inconsistent():
    with pytest.raises(PreconditionError, match="inconsistent"):
        rps_frequencies(rps_env(F(2, 5)))


def test_rps_construction_needs_certain_deception():
    with pytest.raises(PreconditionError, match="deception must always succeed"):
        construct_rps_nsc(rps_env(F(3, 10), q=F(1, 2)))


def test_rps_construction_rejects_other_games():
    with pytest.raises(PreconditionError):
        construct_rps_nsc(Environment(prisoners_dilemma(), CostSchedule.linear(F(3, 10))))


def test_rps_example_preconditions():
    env = Environment(RPS, CostSchedule((F(0), F(1), F(2))))
    with pytest.raises(PreconditionError, match="k_3 > 2"):
        construct_rps_example(env, F(1, 2))
    ok = Environment(RPS, CostSchedule((F(0), F(1), F(5, 2))))
    with pytest.raises(PreconditionError):
        construct_rps_example(ok, F(1))


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=F(1, 10), max_value=F(9, 10), max_denominator=20))
def test_rps_constructions_are_balanced_valid_and_neutrally_stable(step):
    try:
        cfg = construct_rps_nsc(rps_env(step))
    except PreconditionError:
        assume(False)
    assert validate(cfg).valid
    assert is_balanced(cfg)
    assert check_highest_type_conditions(cfg).status == "pass"
    assert is_nss(build_type_game(cfg), cfg.frequencies).certified
    p, r = RPS.index("P"), RPS.index("R")
    for (a, b), s in cfg.policy.deception.items():
        assert s.pure_index() == (p if a.level > b.level else r)


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=F(1, 100), max_value=F(99, 100), max_denominator=100))
def test_rps_example_fitness_is_share_minus_one(eps):
    cfg = construct_rps_example(Environment(RPS, CostSchedule((F(0), F(1), F(5, 2)))), eps)
    assert fitness_profile(cfg) == (eps - 1, eps - 1)
    assert validate(cfg).valid
