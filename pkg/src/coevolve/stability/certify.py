"""Certification of pure configurations and necessary-condition checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..game import MixedStrategy, deviation_gain, efficiency_analysis, is_generic, punishment_actions
from ..numeric import FLOAT_TOL, bilinear, is_exact, to_mode
from ..population import Configuration, make_configuration, match_fitness, pair_fitness
from ..preferences import (
    CognitiveType,
    Environment,
    UtilityFunction,
    action_loving,
    fmde_fitness_bound,
)
from .recipes import refute_nsc
from .thresholds import effective_cost
from .typegame import CERTIFIED, INCONCLUSIVE, REFUTED, Condition, StabilityVerdict, type_game_for

PASS, FAIL = "pass", "fail"


@dataclass(frozen=True)
class CheckReport:
    status: str
    conditions: tuple[Condition, ...] = ()
    witness: Any = None
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS


def _le(a, b, tol):
    return a <= b if is_exact(a) and is_exact(b) else a <= b + tol


def _eq(a, b, tol):
    return a == b if is_exact(a) and is_exact(b) else abs(a - b) <= tol


def stable_utility(env: Environment, a_star: int, a_pun: int) -> UtilityFunction:
    """Preferences under which only ``a_star`` and the punishment action
    ``a_pun`` are undominated: playing ``a_star`` is worth 0, punishing
    earns 1 unless the opponent plays ``a_star`` (then 0), anything else -1."""
    m = env.game.m
    one, zero = to_mode(1, env.exact), to_mode(0, env.exact)
    rows = []
    for a in range(m):
        row = []
        for b in range(m):
            if a == a_star:
                row.append(zero)
            elif a == a_pun:
                row.append(zero if b == a_star else one)
            else:
                row.append(-one)
        rows.append(tuple(row))
    return UtilityFunction(tuple(rows))


def pure_configuration(env: Environment, theta: CognitiveType, a_star: int) -> Configuration:
    return make_configuration(env, [theta], [Fraction(1) if env.exact else 1.0], nash={(theta, theta): a_star})


def certify_pure_nsc(env: Environment, a_star, tol: float = FLOAT_TOL) -> StabilityVerdict:
    """Decide whether everybody playing ``a_star`` is supported by a stable
    monomorphic configuration.

    Requires efficiency of ``(a_star, a_star)`` and a deviation gain not
    exceeding the effective cost of deception.  Inefficiency refutes in
    every game; the cost comparison is decisive only when a punishment
    action exists.
    """
    game = env.game
    a_star = game.index(a_star)
    eff = efficiency_analysis(game)
    pi_star = game.payoff[a_star][a_star]
    eff_margin = pi_star - eff.efficient_payoff
    efficient = _eq(pi_star, eff.efficient_payoff, tol)
    conds = [Condition("efficient self-play", efficient, eff_margin)]
    if not efficient:
        # Any incumbent playing a_star against itself suffices for the recipes.
        theta = CognitiveType(action_loving(game.m, a_star, env.exact), 1, "incumbent")
        scenario = refute_nsc(pure_configuration(env, theta, a_star), tol=tol)
        witness = {
            "necessary condition": "highest-type self-play must be efficient",
            "margin": eff_margin,
            "scenario": scenario.witness,
        }
        return StabilityVerdict(
            REFUTED, witness, tuple(conds), "refuted by necessity: self-play is not efficient",
            details=scenario.details,
        )
    g = deviation_gain(game, a_star)
    c = effective_cost(env)
    cost_ok = _le(g, c, tol)
    conds.append(Condition("deviation gain at most effective cost", cost_ok, c - g))
    pun = punishment_actions(game)
    conds.append(Condition("punishment action exists", bool(pun), len(pun)))
    if not pun:
        return StabilityVerdict(INCONCLUSIVE, None, tuple(conds), "game has no punishment action")
    a_pun = pun[0]
    theta = CognitiveType(stable_utility(env, a_star, a_pun), 1, "stable")
    config = pure_configuration(env, theta, a_star)
    if not cost_ok:
        verdict = refute_nsc(config, tol=tol, recipes=("R5",))
        if not verdict.refuted:
            return StabilityVerdict(
                INCONCLUSIVE, None, tuple(conds), "deviation gain exceeds the effective cost but no invasion was built"
            )
        return StabilityVerdict(
            REFUTED, verdict.witness, tuple(conds), "deviation gain exceeds the effective cost",
            details=verdict.details,
        )
    note = ""
    if _eq(g, c, tol):
        note = "boundary case: deviation gain equals the effective cost"
    witness = {"type": theta, "configuration": config, "punishment": a_pun}
    return StabilityVerdict(CERTIFIED, witness, tuple(conds), note)


def check_highest_type_conditions(config: Configuration, tol: float = FLOAT_TOL) -> CheckReport:
    """Necessary conditions on the types with the highest cognitive level:
    efficient fitness in self-play, maximal fitness when deceiving any lower
    type, and lower types earning at most the efficient payoff against them."""
    env = config.env
    pi_hat = efficiency_analysis(env.game).efficient_payoff
    top_level = config.distribution.top_level
    conds = []
    for top in config.types:
        if top.level != top_level:
            continue
        self_fit = pair_fitness(env, config.policy, top, top)
        conds.append(Condition(f"{top.name()} self-play fitness is efficient", _eq(self_fit, pi_hat, tol),
                               pi_hat - self_fit))
        for low in config.types:
            if low.level >= top_level:
                continue
            got = bilinear(config.deception_play(top, low).weights, env.game.payoff,
                           config.deception_play(low, top).weights)
            best = fmde_fitness_bound(env, low, tol)
            conds.append(Condition(f"{top.name()} deceives {low.name()} at maximal fitness",
                                   _eq(got, best, tol), got - best))
            lf = match_fitness(config, low, top)
            conds.append(Condition(f"{low.name()} earns at most the efficient payoff against {top.name()}",
                                   _le(lf, pi_hat, tol), pi_hat - lf))
    ok = all(c.passed for c in conds)
    return CheckReport(PASS if ok else FAIL, tuple(conds))


def check_efficient_play(config: Configuration, tol: float = FLOAT_TOL) -> CheckReport:
    """In a generic game every type of a stable configuration plays the
    symmetric efficient action in every match.  Also reports the pairwise
    directions ``e_j - e_k`` along which the type game's quadratic form is
    positive."""
    game = config.env.game
    if not is_generic(game):
        return CheckReport(INCONCLUSIVE, (), None, "game not generic")
    eff = efficiency_analysis(game)
    if not eff.symmetric_efficient_actions:
        return CheckReport(FAIL, (Condition("symmetric efficient profile exists", False, 0),), None,
                           "no symmetric efficient profile, so no stable configuration exists")
    a_bar = eff.symmetric_efficient_actions[0]
    target = MixedStrategy.pure(game.m, a_bar, config.env.exact)
    conds = []
    for kind, table in (("Nash", config.policy.nash), ("deception", config.policy.deception)):
        for (a, b), s in sorted(table.items(), key=lambda kv: (kv[0][0].name(), kv[0][1].name())):
            if a in config.types and b in config.types:
                conds.append(Condition(f"{a.name()} plays {game.actions[a_bar]} against {b.name()} ({kind})",
                                       s == target, 0))
    tg = type_game_for(config.env, config.types, config.policy)
    b = tg.payoff
    witness = None
    n = len(b)
    for j in range(n):
        for k in range(j + 1, n):
            val = b[j][j] + b[k][k] - b[j][k] - b[k][j]
            pos = val > 0 if is_exact(val) else val > tol
            conds.append(Condition(f"quadratic form along {tg.types[j].name()} - {tg.types[k].name()} "
                                   "is not positive", not pos, -val))
            if pos and witness is None:
                z = [0] * n
                z[j], z[k] = 1, -1
                witness = {"direction": tuple(z), "value": val, "types": (tg.types[j].name(), tg.types[k].name())}
    ok = all(c.passed for c in conds)
    return CheckReport(PASS if ok else FAIL, tuple(conds), witness)
