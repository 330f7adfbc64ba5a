"""Constructive invasion attempts.

Each recipe introduces a small group of mutant types together with a focal
post-entry policy (incumbents keep their behaviour among themselves), checks
that the enlarged policy is a valid configuration, and compares mutant and
incumbent fitness in the limit of a vanishing mutant share: fitness against
the incumbents decides first, fitness against the mutants breaks ties.

Whenever a recipe's prescribed play for some pair is not a valid
equilibrium, that pair is filled with the valid equilibrium most favourable
to the mutants.  Every focal post-entry configuration must be resisted by a
stable configuration, so any valid choice yields a genuine refutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..game import MixedStrategy, efficiency_analysis, maxmin_minmax
from ..numeric import FLOAT_TOL, Number, bilinear, dot, is_exact
from ..population import (
    BehaviorPolicy,
    Configuration,
    TypeDistribution,
    average_fitness,
    needs_deception,
    needs_nash,
    pair_violations,
)
from ..preferences import (
    CognitiveType,
    UtilityFunction,
    action_loving,
    constant_utility,
    deception_equilibria,
    fmde,
    nash_equilibria,
    pro_generous_indifferent,
    undominated_pure_actions,
)
from .typegame import (
    INCONCLUSIVE,
    REFUTED,
    Condition,
    StabilityVerdict,
    TypeGame,
    is_nss,
    type_game_for,
)

RECIPES = ("R1", "R2", "R3", "R4", "R5", "R6", "R0")

RECIPE_TITLES = {
    "R1": "three pro-generous indifferent mutants rotating an efficient profile",
    "R2": "pro-generous indifferent mutant with fitness-maximising deception",
    "R3": "pro-generous indifferent mutant mimicking a lower type",
    "R4": "mutant that plays the efficient action against itself",
    "R5": "completely indifferent deceiver",
    "R6": "level-1 mutant committed to the maxmin action",
    "R0": "incumbent subpopulation (internal stability)",
}


@dataclass(frozen=True)
class InvasionScenario:
    recipe: str
    description: str
    mutants: TypeDistribution
    policy: BehaviorPolicy
    type_game: TypeGame
    incumbent_state: tuple[Number, ...]
    mutant_state: tuple[Number, ...]
    first_order: Number
    second_order: Number
    outperforms: bool
    adjusted: tuple[str, ...] = ()
    nss: StabilityVerdict | None = None

    @property
    def refutes(self) -> bool:
        return self.outperforms or (self.nss is not None and self.nss.refuted)


# --------------------------------------------------------------------------
# Evaluation of one invasion
# --------------------------------------------------------------------------

def _pure(config: Configuration, a: int) -> MixedStrategy:
    return MixedStrategy.pure(config.m, a, config.env.exact)


def _pi(config, x: MixedStrategy, y: MixedStrategy) -> Number:
    return bilinear(x.weights, config.env.game.payoff, y.weights)


def _score(config, mutants, a, sa, b, sb):
    """Ranking of a profile from the mutants' point of view: mutant fitness
    first, then low incumbent fitness."""
    gain, hurt = 0, 0
    for t, s, o in ((a, sa, sb), (b, sb, sa)):
        v = _pi(config, s, o)
        if t in mutants:
            gain += v
        else:
            hurt -= v
    return (gain, hurt)


def _repair(config, policy: BehaviorPolicy, mutants, a, b, tol):
    """Replace the play of pair ``(a, b)`` by the valid equilibrium that is
    best for the mutants.  Returns the new policy, or ``None``."""
    env = config.env
    nash = dict(policy.nash)
    dec = dict(policy.deception)
    if needs_nash(env, a, b):
        if a == b:
            u = a.utility.against(a)
            cands = [(ne.sigma, ne.sigma) for ne in nash_equilibria(u, u, tol) if ne.sigma == ne.sigma_prime]
        else:
            cands = [
                (ne.sigma, ne.sigma_prime)
                for ne in nash_equilibria(a.utility.against(b), b.utility.against(a), tol)
            ]
        if not cands:
            return None
        sa, sb = max(cands, key=lambda c: _score(config, mutants, a, c[0], b, c[1]))
        nash[(a, b)] = sa
        nash[(b, a)] = sb
    if needs_deception(a, b):
        hi, lo = (a, b) if a.level > b.level else (b, a)
        de = deception_equilibria(env, hi, lo, tol)
        cands = [(_pure(config, s), _pure(config, t)) for s, t in de.profiles]
        sh, sl = max(cands, key=lambda c: _score(config, mutants, hi, c[0], lo, c[1]))
        dec[(hi, lo)] = sh
        dec[(lo, hi)] = sl
    return BehaviorPolicy(nash, dec, policy.auto)


def evaluate_invasion(
    config: Configuration,
    recipe: str,
    description: str,
    mutants: Sequence[CognitiveType],
    frequencies: Sequence[Number] | None = None,
    nash: dict | None = None,
    deception: dict | None = None,
    tol: float = FLOAT_TOL,
    check_nss: bool = True,
    samples: int = 2000,
) -> InvasionScenario | None:
    """Build the focal post-entry configuration and compare fitness.

    ``nash`` and ``deception`` hold the recipe's prescribed play for pairs
    involving mutants; pure action indices are accepted.  Returns ``None``
    if no valid post-entry policy could be assembled.
    """
    mutants = tuple(mutants)
    incumbents = config.types
    if set(mutants) & set(incumbents):
        raise ValueError("mutant types must differ from every incumbent type")
    if frequencies is None:
        share = Fraction(1, len(mutants)) if config.exact else 1.0 / len(mutants)
        frequencies = (share,) * len(mutants)

    def coerce(v):
        return _pure(config, v) if isinstance(v, int) else v

    policy = config.policy.extended(
        {k: coerce(v) for k, v in (nash or {}).items()},
        {k: coerce(v) for k, v in (deception or {}).items()},
    )
    types = incumbents + mutants
    mset = set(mutants)
    adjusted = []
    for i, a in enumerate(types):
        for b in types[i:]:
            if a not in mset and b not in mset:
                continue
            if pair_violations(config.env, policy, a, b, tol):
                fixed = _repair(config, policy, mset, a, b, tol)
                if fixed is None or pair_violations(config.env, fixed, a, b, tol):
                    return None
                policy = fixed
                adjusted.append(f"{a.name()} vs {b.name()}")
    game = type_game_for(config.env, types, policy)
    zero = 0 * config.frequencies[0]
    x = tuple(config.frequencies) + (zero,) * len(mutants)
    y = (zero,) * len(incumbents) + tuple(frequencies)
    bx = [dot(row, x) for row in game.payoff]
    by = [dot(row, y) for row in game.payoff]
    d1 = dot(y, bx) - dot(x, bx)
    d2 = dot(y, by) - dot(x, by)
    t = 0 if is_exact(d1) and is_exact(d2) else tol
    outperforms = d1 > t or (abs(d1) <= t and d2 > t)
    verdict = is_nss(game, x, samples=samples, tol=tol) if check_nss else None
    return InvasionScenario(
        recipe,
        description,
        TypeDistribution(mutants, tuple(frequencies)),
        policy,
        game,
        x,
        y,
        d1,
        d2,
        outperforms,
        tuple(adjusted),
        verdict,
    )


# --------------------------------------------------------------------------
# Recipe helpers
# --------------------------------------------------------------------------

def _top(config):
    n = config.distribution.top_level
    return [t for t in config.types if t.level == n]


def _lower(config, level):
    return [t for t in config.types if t.level < level]


def _fmde_pick(config, mutant, lower):
    """FMDE profile for ``mutant`` deceiving ``lower`` that is worst for the
    deceived incumbent."""
    res = fmde(config.env, mutant, lower)
    if res is None:
        return None
    pi = config.env.game.payoff
    s, t = min(res.profiles, key=lambda p: (pi[p[1]][p[0]], p))
    return s, t


def _mimic(config, mutant, model, others):
    """Non-deceptive play where the mutant copies ``model`` and every other
    incumbent treats the mutant like ``model``."""
    nash = {}
    for t in others:
        if not needs_nash(config.env, mutant, t):
            continue
        if (model, t) in config.policy.nash and (t, model) in config.policy.nash:
            nash[(mutant, t)] = config.policy.nash[(model, t)]
            nash[(t, mutant)] = config.policy.nash[(t, model)]
    return nash


def _ugi(config, beta, label, level):
    return CognitiveType(pro_generous_indifferent(config.env.game, 1, beta), level, label)


def _free_label(config, base):
    names = {t.name() for t in config.types}
    label, i = base, 1
    while label in names:
        i += 1
        label = f"{base}-{i}"
    return label


# --------------------------------------------------------------------------
# Recipes
# --------------------------------------------------------------------------

def recipe_rotation(config, tol=FLOAT_TOL):
    """Three pro-generous indifferent mutants at the top level: each plays
    one side of an efficient profile against the next mutant in a cycle,
    mimics a top incumbent otherwise and deceives lower types for maximal
    fitness."""
    eff = efficiency_analysis(config.env.game)
    betas = (Fraction(1, 2), Fraction(1, 4), Fraction(0))
    for top in _top(config):
        n = top.level
        ms = [_ugi(config, b, _free_label(config, f"GI{i + 1}"), n) for i, b in enumerate(betas)]
        for a1, a2 in eff.efficient_profiles:
            nash, dec = {}, {}
            for i, mu in enumerate(ms):
                nash.update(_mimic(config, mu, top, config.types))
                for low in _lower(config, n):
                    pick = _fmde_pick(config, mu, low)
                    if pick:
                        dec[(mu, low)], dec[(low, mu)] = pick
                nxt = ms[(i + 1) % 3]
                nash[(mu, nxt)] = a1
                nash[(nxt, mu)] = a2
                nash[(mu, mu)] = config.policy.nash.get((top, top))
            nash = {k: v for k, v in nash.items() if v is not None}
            sc = evaluate_invasion(
                config, "R1", f"{RECIPE_TITLES['R1']} ({config.env.game.actions[a1]}, "
                f"{config.env.game.actions[a2]}), mimicking {top.name()}", ms, nash=nash,
                deception=dec, tol=tol,
            )
            if sc is not None:
                yield sc


def recipe_fitness_deceiver(config, tol=FLOAT_TOL):
    """A pro-generous indifferent mutant at the top level that deceives
    lower types into the fitness-maximising outcome and mimics a top
    incumbent otherwise."""
    for top in _top(config):
        mu = _ugi(config, Fraction(1, 2), _free_label(config, "GI"), top.level)
        nash = _mimic(config, mu, top, config.types)
        if (top, top) in config.policy.nash:
            nash[(mu, mu)] = config.policy.nash[(top, top)]
        dec = {}
        for low in _lower(config, top.level):
            pick = _fmde_pick(config, mu, low)
            if pick:
                dec[(mu, low)], dec[(low, mu)] = pick
        sc = evaluate_invasion(
            config, "R2", f"{RECIPE_TITLES['R2']}, mimicking {top.name()}", [mu], nash=nash,
            deception=dec, tol=tol,
        )
        if sc is not None:
            yield sc


def recipe_mimic_lower(config, tol=FLOAT_TOL):
    """A pro-generous indifferent mutant at the top level that, against a
    top incumbent, copies how a lower type fares against it (either its
    non-deceptive or its deceived play)."""
    for top in _top(config):
        for low in _lower(config, top.level):
            for case in ("nash", "deception"):
                table = config.policy.nash if case == "nash" else config.policy.deception
                if (low, top) not in table or (top, low) not in table:
                    continue
                mu = _ugi(config, Fraction(1, 2), _free_label(config, "GI"), top.level)
                nash = _mimic(config, mu, top, config.types)
                nash[(mu, top)] = table[(low, top)]
                nash[(top, mu)] = table[(top, low)]
                if (top, top) in config.policy.nash:
                    nash[(mu, mu)] = config.policy.nash[(top, top)]
                dec = {}
                for other in _lower(config, top.level):
                    pick = _fmde_pick(config, mu, other)
                    if pick:
                        dec[(mu, other)], dec[(other, mu)] = pick
                sc = evaluate_invasion(
                    config, "R3",
                    f"{RECIPE_TITLES['R3']} ({low.name()} against {top.name()}, {case} play)",
                    [mu], nash=nash, deception=dec, tol=tol,
                )
                if sc is not None:
                    yield sc


def _raised_utility(u: UtilityFunction, a_bar: int) -> UtilityFunction:
    """Raise the payoff of ``(a_bar, a_bar)`` just enough to make ``a_bar``
    a best reply to itself; everything else is unchanged."""
    mat = [list(r) for r in u.matrix]
    mat[a_bar][a_bar] = max(mat[a][a_bar] for a in range(len(mat)))
    return UtilityFunction(tuple(tuple(r) for r in mat))


def recipe_efficient_self_play(config, tol=FLOAT_TOL):
    """A mutant copying an incumbent that plays inefficiently against
    itself, except that the mutant plays the efficient action against its
    own kind."""
    env = config.env
    pi = env.game.payoff
    eff = efficiency_analysis(env.game)
    for ring in config.types:
        self_play = config.policy.nash.get((ring, ring))
        for a_bar in eff.symmetric_efficient_actions:
            if self_play is not None and self_play == _pure(config, a_bar):
                continue
            u_ring = ring.utility.against(ring)
            full = len(undominated_pure_actions(ring.utility, tol)) == env.game.m
            if full:
                u_hat = pro_generous_indifferent(env.game, 1, Fraction(1, 2))
            else:
                u_hat = _raised_utility(u_ring, a_bar)
            mu = CognitiveType(u_hat, ring.level, _free_label(config, "hat"))
            nash = _mimic(config, mu, ring, config.types)
            nash[(mu, mu)] = a_bar
            dec = {}
            for other in config.types:
                if other.level < ring.level:
                    if full:
                        pick = _fmde_pick(config, mu, other)
                    else:
                        de = deception_equilibria(env, ring, other, tol)
                        pick = max(de.profiles, key=lambda p: (pi[p[0]][p[1]], -pi[p[1]][p[0]]))
                    if pick:
                        dec[(mu, other)], dec[(other, mu)] = pick
                elif other.level > ring.level:
                    de = deception_equilibria(env, other, ring, tol)
                    a1, a2 = max(de.profiles, key=lambda p: pi[p[1]][p[0]])
                    u_o = other.utility.against(mu).matrix
                    if u_o[a1][a2] > u_o[a_bar][a_bar]:
                        dec[(other, mu)], dec[(mu, other)] = a1, a2
                    else:
                        dec[(other, mu)], dec[(mu, other)] = a_bar, a_bar
            sc = evaluate_invasion(
                config, "R4",
                f"{RECIPE_TITLES['R4']} ({env.game.actions[a_bar]}), otherwise copying {ring.name()}",
                [mu], nash=nash, deception=dec, tol=tol,
            )
            if sc is not None:
                yield sc


def recipe_indifferent_deceiver(config, budget: int | None = None, tol=FLOAT_TOL):
    """A mutant indifferent between all outcomes at some level ``n``.  When
    it deceives a lower incumbent it induces the incumbent's usual action
    (or the fitness-best inducible action) and best-replies in fitness;
    otherwise it copies a reference incumbent."""
    env = config.env
    pi = env.game.payoff
    m = env.game.m
    top = budget if budget is not None else default_budget(config)
    for n in range(2, top + 1):
        for ref in config.types:
            for variant in ("mimic", "fitness"):
                mu = CognitiveType(constant_utility(m, env.exact), n, _free_label(config, f"indiff@{n}"))
                nash = _mimic(config, mu, ref, config.types)
                if (ref, ref) in config.policy.nash:
                    nash[(mu, mu)] = config.policy.nash[(ref, ref)]
                dec = {}
                for other in _lower(config, n):
                    induced = undominated_pure_actions(other.utility, tol)
                    pick = None
                    if variant == "mimic":
                        usual = config.policy.nash.get((other, ref)) or config.policy.deception.get((other, ref))
                        a = usual.pure_index() if usual is not None else None
                        if a is not None and a in induced:
                            br = max(range(m), key=lambda s: (pi[s][a], -pi[a][s]))
                            pick = (br, a)
                    if pick is None:
                        pick = max(
                            ((s, t) for t in induced for s in range(m)),
                            key=lambda p: (pi[p[0]][p[1]], -pi[p[1]][p[0]]),
                        )
                    dec[(mu, other)], dec[(other, mu)] = pick
                sc = evaluate_invasion(
                    config, "R5",
                    f"{RECIPE_TITLES['R5']} at level {n} ({variant} deception, copying {ref.name()})",
                    [mu], nash=nash, deception=dec, tol=tol,
                )
                if sc is not None:
                    yield sc


def recipe_maxmin(config, tol=FLOAT_TOL):
    """If average fitness falls below the pure maxmin value, a level-1
    mutant for whom the maxmin action is dominant secures more."""
    lo, a_lo, _, _ = maxmin_minmax(config.env.game)
    avg = average_fitness(config)
    t = 0 if is_exact(avg) and is_exact(lo) else tol
    if not avg < lo - t:
        return
    mu = CognitiveType(action_loving(config.m, a_lo, config.env.exact), 1, _free_label(config, "maxmin"))
    sc = evaluate_invasion(
        config, "R6", f"{RECIPE_TITLES['R6']} ({config.env.game.actions[a_lo]})", [mu],
        nash={(mu, mu): a_lo}, tol=tol,
    )
    if sc is not None:
        yield sc


def recipe_internal(config, tol=FLOAT_TOL):
    """Neutral stability of the incumbent distribution in its own type game."""
    game = type_game_for(config.env, config.types, config.policy)
    x = tuple(config.frequencies)
    verdict = is_nss(game, x, tol=tol)
    if verdict.refuted:
        w = verdict.witness.get("mutant")
        zero = 0 * x[0]
        yield InvasionScenario(
            "R0", RECIPE_TITLES["R0"], TypeDistribution(config.types, x), config.policy, game, x,
            tuple(w) if w else x, zero, zero, False, (), verdict,
        )


def default_budget(config: Configuration) -> int:
    """Highest mutant level worth trying: beyond it the extra cognitive cost
    exceeds any fitness difference the game allows."""
    pi = config.env.game.payoff
    span = max(max(r) for r in pi) - min(min(r) for r in pi)
    base = min(t.level for t in config.types)
    n = max(config.distribution.top_level + 1, 2)
    while n < 60 and config.env.k(n) - config.env.k(base) <= span:
        n += 1
    return n


def refute_nsc(config: Configuration, budget: int | None = None, tol: float = FLOAT_TOL,
               recipes: Sequence[str] = RECIPES, first_only: bool = True) -> StabilityVerdict:
    """Replay the constructive mutant recipes against ``config``.

    Returns ``refuted`` with the first successful scenario as witness (all
    successes are listed in ``details``), or ``inconclusive``.
    """
    runners = {
        "R1": lambda: recipe_rotation(config, tol),
        "R2": lambda: recipe_fitness_deceiver(config, tol),
        "R3": lambda: recipe_mimic_lower(config, tol),
        "R4": lambda: recipe_efficient_self_play(config, tol),
        "R5": lambda: recipe_indifferent_deceiver(config, budget, tol),
        "R6": lambda: recipe_maxmin(config, tol),
        "R0": lambda: recipe_internal(config, tol),
    }
    successes = []
    conds = []
    for name in recipes:
        hit = None
        tried = 0
        for sc in runners[name]():
            tried += 1
            if sc.refutes:
                hit = sc
                break
        conds.append(Condition(f"{name}: {RECIPE_TITLES[name]}", hit is None, tried,
                               "mutants outperform" if hit else "no outperformance"))
        if hit is not None:
            successes.append(hit)
            if first_only:
                break
    if successes:
        return StabilityVerdict(REFUTED, successes[0], tuple(conds), details=tuple(successes))
    return StabilityVerdict(INCONCLUSIVE, None, tuple(conds), "no recipe produced an invasion")
