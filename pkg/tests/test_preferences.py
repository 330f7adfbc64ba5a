from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import best_reply_gap, brute_deception_profiles, grid_undominated, lp_undominated

from coevolve.game import SymmetricGame, prisoners_dilemma, rock_paper_scissors
from coevolve.preferences import (
    CognitiveType,
    CostSchedule,
    DeceptionTable,
    Environment,
    PreconditionError,
    UtilityFunction,
    action_loving,
    best_replies,
    common_belief,
    constant_utility,
    deception_equilibria,
    fmde,
    fmde_fitness_bound,
    generous_actions,
    is_deception_equilibrium,
    is_nash,
    materialistic,
    nash_equilibria,
    pro_generous_indifferent,
    undominated_pure_actions,
)


def matrices(lo=2, hi=4):
    return st.integers(min_value=lo, max_value=hi).flatmap(
        lambda m: st.lists(st.lists(st.integers(-3, 3), min_size=m, max_size=m), min_size=m, max_size=m)
    )


def pairs(lo=2, hi=4):
    return st.integers(min_value=lo, max_value=hi).flatmap(
        lambda m: st.tuples(*[st.lists(st.lists(st.integers(-3, 3), min_size=m, max_size=m), min_size=m, max_size=m)] * 2)
    )


def to_u(rows):
    return UtilityFunction(tuple(tuple(F(x) for x in r) for r in rows))


def test_utilities_are_normalized():
    u = to_u([[3, 0], [4, 1]])
    assert u.matrix == ((F(3, 4), 0), (1, F(1, 4)))
    assert constant_utility(2).matrix == ((0, 0), (0, 0))


def test_prisoners_dilemma_materialist_only_defects():
    assert undominated_pure_actions(materialistic(prisoners_dilemma())) == (1,)


def test_constant_utility_keeps_every_action():
    assert undominated_pure_actions(constant_utility(3)) == (0, 1, 2)


def test_common_belief_rps_is_uniform():
    assert common_belief(materialistic(rock_paper_scissors()), [0, 1, 2]) == (F(1, 3),) * 3
    assert common_belief(materialistic(prisoners_dilemma()), [0]) is None


@settings(max_examples=120, deadline=None)
@given(matrices())
def test_undominated_matches_exact_lp_and_contains_grid(rows):
    got = undominated_pure_actions(to_u(rows))
    assert got == lp_undominated(rows)
    # grid beliefs are beliefs, so every grid best reply is undominated
    assert set(grid_undominated(rows)) <= set(got)


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_undominated_actions_are_best_replies_to_a_common_belief(rows):
    u = to_u(rows)
    for a in undominated_pure_actions(u):
        belief = common_belief(u, [a])
        assert belief is not None
        assert a in best_replies(u, belief)


@settings(max_examples=80, deadline=None)
@given(pairs())
def test_nash_equilibria_are_mutual_best_replies(pair):
    a, b = pair
    eqs = nash_equilibria(to_u(a), to_u(b))
    assert eqs, "every finite game has an equilibrium"
    for ne in eqs:
        assert best_reply_gap(a, ne.sigma.weights, ne.sigma_prime.weights) <= 1e-9
        assert best_reply_gap(b, ne.sigma_prime.weights, ne.sigma.weights) <= 1e-9
        assert is_nash(to_u(a), to_u(b), ne.sigma, ne.sigma_prime)


@settings(max_examples=80, deadline=None)
@given(pairs())
def test_every_pure_equilibrium_is_found(pair):
    a, b = pair
    m = len(a)
    found = {(ne.sigma.pure_index(), ne.sigma_prime.pure_index()) for ne in nash_equilibria(to_u(a), to_u(b))}
    for i, j in product(range(m), repeat=2):
        if a[i][j] == max(a[k][j] for k in range(m)) and b[j][i] == max(b[k][i] for k in range(m)):
            assert (i, j) in found


def test_matching_pennies_mixed_equilibrium():
    eqs = nash_equilibria(to_u([[1, 0], [0, 1]]), to_u([[0, 1], [1, 0]]))
    assert len(eqs) == 1
    assert eqs[0].sigma.weights == (F(1, 2), F(1, 2))


def _env(rows, k2=1):
    return Environment(SymmetricGame.from_matrix(rows), CostSchedule((F(0), F(k2))))


@settings(max_examples=80, deadline=None)
@given(pairs())
def test_deception_argmax_matches_brute_force(pair):
    fit, subj = pair
    env = _env(fit)
    hi = CognitiveType(to_u(subj), 2, "hi")
    lo = CognitiveType(to_u(fit), 1, "lo")
    de = deception_equilibria(env, hi, lo)
    assert de.profiles == brute_deception_profiles(subj, lp_undominated(fit))
    for i, j in de.profiles:
        assert is_deception_equilibrium(env, hi, lo, i, j)


@settings(max_examples=80, deadline=None)
@given(pairs())
def test_fitness_maximizing_deception_is_a_deception_equilibrium(pair):
    fit, subj = pair
    env = _env(fit)
    hi = CognitiveType(to_u(subj), 2, "hi")
    lo = CognitiveType(to_u(fit), 1, "lo")
    out = fmde(env, hi, lo)
    de = deception_equilibria(env, hi, lo)
    bound = fmde_fitness_bound(env, lo)
    if out is not None:
        assert set(out.profiles) <= set(de.profiles)
        assert all(f == bound for f in out.fitness)
    else:
        assert all(env.game.payoff[i][j] < bound for i, j in de.profiles)


def test_rps_fitness_maximizing_deception_includes_paper_beats_rock():
    rps = rock_paper_scissors()
    env = Environment(rps, CostSchedule((F(0), F(1))))
    out = fmde(env, CognitiveType(materialistic(rps), 2), CognitiveType(materialistic(rps), 1))
    assert out.value == 1
    assert (rps.index("P"), rps.index("R")) in out.profiles


def test_pro_generous_indifferent_deceiver_always_has_fitness_maximizer():
    pd = prisoners_dilemma()
    env = Environment(pd, CostSchedule((F(0), F(1))))
    assert generous_actions(pd) == (0, 1)
    ugi = CognitiveType(pro_generous_indifferent(pd), 2)
    for rows in ([[3, 0], [4, 1]], [[1, 0], [0, 1]], [[0, 0], [0, 0]]):
        assert fmde(env, ugi, CognitiveType(to_u(rows), 1)) is not None


def test_deception_requires_higher_level():
    env = Environment(prisoners_dilemma(), CostSchedule((F(0), F(1))))
    t = CognitiveType(materialistic(env.game), 1)
    with pytest.raises(PreconditionError):
        deception_equilibria(env, t, t)


def test_cost_schedule_and_deception_table():
    k = CostSchedule.linear(F(3, 10))
    assert [k(n) for n in (1, 2, 5)] == [0, F(3, 10), F(6, 5)]
    with pytest.raises(PreconditionError):
        CostSchedule((F(1), F(2)))
    with pytest.raises(PreconditionError):
        CostSchedule((F(0), F(2), F(1)))
    q = DeceptionTable({(3, 1): F(1, 2)}, F(1))
    assert q(3, 1) == F(1, 2) and q(2, 1) == 1 and q(1, 2) == 0
    with pytest.raises(PreconditionError):
        DeceptionTable({(2, 1): F(3, 2)})
    with pytest.raises(PreconditionError):
        CognitiveType(action_loving(2, 0), 0)
