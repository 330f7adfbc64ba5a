"""Preferences that depend on the opponent's type.

A type-interdependent utility is a decision table: one payoff matrix per
opponent label plus a default matrix for every other opponent.  Labels
come from a finite universe declared per analysis run, which sidesteps the
circularity of utilities defined over types that contain utilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .game import MixedStrategy, SymmetricGame, deviation_gain, hawk_dove, maxmin_minmax
from .numeric import FLOAT_TOL, Number, is_exact, solve, solve_affine, to_mode
from .population import Configuration, make_configuration
from .preferences import (
    CognitiveType,
    CostSchedule,
    DeceptionTable,
    Environment,
    PreconditionError,
    UtilityFunction,
    action_loving,
    materialistic,
    undominated_pure_actions,
)
from .stability.certify import CheckReport, FAIL, PASS
from .stability.thresholds import effective_cost_at_level
from .stability.typegame import (
    CERTIFIED,
    INCONCLUSIVE,
    REFUTED,
    Condition,
    StabilityVerdict,
    build_type_game,
    is_ess,
    is_nss,
)


@dataclass(frozen=True)
class InterdependentUtility:
    """``branches`` maps opponent labels to utilities; ``default`` applies to
    every opponent whose label is not listed."""

    branch_table: tuple[tuple[str, UtilityFunction], ...]
    default: UtilityFunction

    def __post_init__(self):
        items = self.branch_table.items() if isinstance(self.branch_table, dict) else self.branch_table
        table = tuple(sorted(((str(k), v) for k, v in items), key=lambda kv: kv[0]))
        labels = [k for k, _ in table]
        if len(set(labels)) != len(labels):
            raise PreconditionError("each opponent label may appear in at most one branch")
        if any(v.m != self.default.m for _, v in table):
            raise PreconditionError("all branches must have the same number of actions")
        object.__setattr__(self, "branch_table", table)

    @property
    def m(self) -> int:
        return self.default.m

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.branch_table)

    @property
    def matrix(self):
        return self.default.matrix

    def against(self, opponent=None) -> UtilityFunction:
        label = opponent.name() if isinstance(opponent, CognitiveType) else opponent
        for k, v in self.branch_table:
            if k == label:
                return v
        return self.default

    def branches(self) -> tuple[UtilityFunction, ...]:
        return tuple(v for _, v in self.branch_table) + (self.default,)

    def __call__(self, sigma, sigma_prime, opponent=None) -> Number:
        return self.against(opponent)(sigma, sigma_prime)


def type_independent(u: UtilityFunction) -> InterdependentUtility:
    """Embedding of an ordinary utility that ignores the opponent's type."""
    return InterdependentUtility((), u)


def check_label_universe(types: Iterable[CognitiveType], universe: Iterable[str]) -> None:
    """Every type, and every label a utility refers to, must be declared."""
    universe = set(universe)
    for t in types:
        if t.name() not in universe:
            raise PreconditionError(f"type label {t.name()!r} is not in the declared label universe")
        for lab in getattr(t.utility, "labels", ()):
            if lab not in universe:
                raise PreconditionError(f"utility of {t.name()} refers to undeclared label {lab!r}")


@dataclass(frozen=True)
class DiscriminatingType:
    """Plays ``own_action`` against its own kind at ``target_level`` and
    ``other_action`` against everybody else (each dominant in its branch)."""

    own_action: int
    other_action: int
    target_level: int

    def __post_init__(self):
        if self.target_level < 1:
            raise PreconditionError("target level must be positive")

    def label(self, game: SymmetricGame) -> str:
        return f"disc[{game.actions[self.own_action]}|{game.actions[self.other_action]}]@{self.target_level}"

    def cognitive_type(self, game: SymmetricGame) -> CognitiveType:
        for a in (self.own_action, self.other_action):
            if not 0 <= a < game.m:
                raise PreconditionError(f"action index {a} out of range")
        label = self.label(game)
        u = InterdependentUtility(
            ((label, action_loving(game.m, self.own_action, game.exact)),),
            action_loving(game.m, self.other_action, game.exact),
        )
        return CognitiveType(u, self.target_level, label)


def id_undominated(theta, tol: float = FLOAT_TOL) -> tuple[int, ...]:
    """Actions that are best replies to some opponent strategy and some
    opponent type: the union over opponent branches."""
    u = theta.utility if isinstance(theta, CognitiveType) else theta
    return undominated_pure_actions(u, tol)


# --------------------------------------------------------------------------
# Pure configurations
# --------------------------------------------------------------------------

def _pure_action(config: Configuration):
    plays = list(config.policy.nash.values()) + list(config.policy.deception.values())
    acts = {s.pure_index() for s in plays}
    if len(acts) != 1 or None in acts:
        raise PreconditionError("configuration is not pure: all matches must play one common pure action")
    return acts.pop()


def id_pure_nsc_necessary(config: Configuration, tol: float = FLOAT_TOL) -> CheckReport:
    """Necessary conditions for a pure stable configuration: a common
    cognitive level ``n``, efficient payoff minus maxmin covering ``k_n``,
    and a deviation gain not exceeding ``c(n)``."""
    env = config.env
    a = _pure_action(config)
    levels = sorted({t.level for t in config.types})
    n = levels[0]
    conds = [Condition("all incumbents share one cognitive level", len(levels) == 1, len(levels) - 1)]
    lo = maxmin_minmax(env.game)[0]
    m2 = env.game.payoff[a][a] - lo - env.k(n)
    conds.append(Condition("payoff above maxmin covers the cognitive cost", m2 >= (0 if is_exact(m2) else -tol), m2))
    c = effective_cost_at_level(env, n)
    m3 = c - deviation_gain(env.game, a)
    conds.append(Condition("deviation gain at most the effective cost of deceiving the level",
                           m3 >= (0 if is_exact(m3) else -tol), m3))
    return CheckReport(PASS if all(x.passed for x in conds) else FAIL, tuple(conds))


def id_pure_esc_sufficient(env: Environment, a_star, n: int = 1, universe: Sequence[str] | None = None,
                           tol: float = FLOAT_TOL) -> StabilityVerdict:
    """Sufficient conditions for everybody playing ``a_star`` to be
    evolutionarily stable with a discriminating incumbent at level ``n``
    that punishes outsiders with the minmax action."""
    game = env.game
    a_star = game.index(a_star)
    _, _, hi, a_hi = maxmin_minmax(game)
    disc = DiscriminatingType(a_star, a_hi, n)
    theta = disc.cognitive_type(game)
    if universe is not None and theta.name() not in set(universe):
        return StabilityVerdict(INCONCLUSIVE, None, (), f"discriminating type {theta.name()} is not representable")
    m1 = game.payoff[a_star][a_star] - hi - env.k(n)
    c = effective_cost_at_level(env, n)
    m2 = c - deviation_gain(game, a_star)
    strict = (lambda v: v > 0) if is_exact(m1) and is_exact(m2) else (lambda v: v > tol)
    conds = (
        Condition("payoff above minmax exceeds the cognitive cost", strict(m1), m1),
        Condition("deviation gain below the effective cost of deceiving the level", strict(m2), m2),
    )
    one = Fraction(1) if env.exact else 1.0
    config = make_configuration(env, [theta], [one], nash={(theta, theta): a_star})
    if all(x.passed for x in conds):
        witness = {"type": theta, "configuration": config, "punishment": a_hi}
        return StabilityVerdict(CERTIFIED, witness, conds, "evolutionarily stable")
    nec = id_pure_nsc_necessary(config, tol)
    if not nec.passed:
        failing = [x for x in nec.conditions if not x.passed]
        return StabilityVerdict(REFUTED, {"necessary conditions": nec, "failing": failing},
                                conds + nec.conditions, "a necessary condition fails")
    return StabilityVerdict(INCONCLUSIVE, None, conds + nec.conditions,
                            "sufficient conditions fail but necessary conditions hold")


# --------------------------------------------------------------------------
# Hawk-Dove construction
# --------------------------------------------------------------------------

CASE_ESC, CASE_NSC, CASE_NONE = "i", "ii", "iii"


@dataclass(frozen=True)
class HawkDoveResult:
    case: str
    verdict: StabilityVerdict
    configuration: Configuration | None = None
    levels: tuple[int, ...] = ()
    frequencies: tuple[Number, ...] = field(default=())


def hawkdove_label(n: int) -> str:
    return f"HD{n}"


def hawkdove_type(game: SymmetricGame, n: int, mixed_within_level: bool = False) -> CognitiveType:
    """Cooperates (``D``) with its own kind, plays ``H`` against anybody else.
    The mixed variant uses material payoffs against its own kind."""
    d, h = game.index("D"), game.index("H")
    inside = materialistic(game) if mixed_within_level else action_loving(game.m, d, game.exact)
    u = InterdependentUtility(((hawkdove_label(n), inside),), action_loving(game.m, h, game.exact))
    return CognitiveType(u, n, hawkdove_label(n))


def hawkdove_mixed_value(g, l):
    """Probability of ``H`` and payoff in the symmetric mixed equilibrium."""
    p = g / (1 + g - l)
    return p, (1 + g) * (1 - l) / (1 + g - l)


def construct_hawkdove_esc(g, l, cost: CostSchedule, mixed_within_level: bool = False) -> HawkDoveResult:
    """Multi-level configuration in which higher levels play ``H`` and lower
    levels play ``D`` across levels, with frequencies balancing fitness.

    The case is decided by comparing ``g`` and ``l``: a larger gain than
    loss gives an evolutionarily stable configuration, equality a neutrally
    stable one, and a smaller gain rules out stability for this family.
    """
    exact = is_exact(g) and is_exact(l) and cost.exact
    g, l = to_mode(g, exact), to_mode(l, exact)
    if not g > 0:
        raise PreconditionError(f"gain g must be positive, got {g}")
    if not 0 < l < 1:
        raise PreconditionError(f"loss l must lie in (0, 1), got {l}")
    if g < l:
        return HawkDoveResult(
            CASE_NONE,
            StabilityVerdict(REFUTED, {"case": CASE_NONE, "gain": g, "loss": l},
                             (Condition("gain at least loss", False, g - l),),
                             "no stable configuration in this family when the gain is below the loss"),
        )
    game = hawk_dove(g, l)
    env = Environment(game, cost, DeceptionTable((), Fraction(1) if exact else 1.0))
    top = 1
    while env.k(top + 1) <= l + g:
        top += 1
    for n in range(1, top + 1):
        dk = env.k(n + 1) - env.k(n)
        if not g > dk:
            raise PreconditionError(f"marginal cost condition violated: k_{n + 1} - k_{n} = {dk} >= g = {g}")
    if mixed_within_level:
        _, v = hawkdove_mixed_value(g, l)
        lo_coef, hi_coef = 1 + g - v, v - 1 + l
    else:
        lo_coef, hi_coef = g, l
    zero, one = to_mode(0, exact), to_mode(1, exact)
    rows, rhs = [], []
    for n in range(1, top):
        row = [zero] * top
        row[n - 1], row[n] = lo_coef, hi_coef
        rows.append(row)
        rhs.append(env.k(n + 1) - env.k(n))
    rows.append([one] * top)
    rhs.append(one)
    mu = solve(rows, rhs)
    if mu is None:
        mu = _positive_solution(rows, rhs)
    for n, v in enumerate(mu, start=1):
        if not v > 0:
            raise PreconditionError(f"balance system gives a non-positive share {v} for level {n}")
    types = [hawkdove_type(game, n, mixed_within_level) for n in range(1, top + 1)]
    d, h = game.index("D"), game.index("H")
    nash, dec = {}, {}
    if mixed_within_level:
        p, _ = hawkdove_mixed_value(g, l)
        w = [zero] * game.m
        w[h], w[d] = p, 1 - p
        same = MixedStrategy(tuple(w))
    else:
        same = MixedStrategy.pure(game.m, d, exact)
    for t in types:
        nash[(t, t)] = same
    for hi_t in types:
        for lo_t in types:
            if hi_t.level > lo_t.level:
                dec[(hi_t, lo_t)] = h
                dec[(lo_t, hi_t)] = d
    config = make_configuration(env, types, mu, nash=nash, deception=dec)
    tg = build_type_game(config)
    case = CASE_ESC if g > l else CASE_NSC
    check = is_ess(tg, config.frequencies) if case == CASE_ESC else is_nss(tg, config.frequencies)
    conds = (
        Condition("gain compared with loss", True, g - l),
        Condition("incumbents stable in their own type game", check.certified, 0),
    )
    reason = "evolutionarily stable" if case == CASE_ESC else "neutrally stable, not evolutionarily stable"
    status = CERTIFIED if check.certified else INCONCLUSIVE
    verdict = StabilityVerdict(status, {"configuration": config}, conds, reason)
    return HawkDoveResult(case, verdict, config, tuple(range(1, top + 1)), tuple(config.frequencies))


def _positive_solution(rows, rhs):
    """Midpoint of the positive part of a one-parameter solution family."""
    sol = solve_affine(rows, rhs)
    if sol is None:
        raise PreconditionError("balance system is inconsistent for this number of levels")
    base, null = sol
    if len(null) != 1:
        raise PreconditionError("balance system is underdetermined")
    d = null[0]
    lo, hi = None, None
    for b, v in zip(base, d):
        if v > 0:
            lo = -b / v if lo is None else max(lo, -b / v)
        elif v < 0:
            hi = -b / v if hi is None else min(hi, -b / v)
    if lo is None or hi is None or not lo < hi:
        raise PreconditionError("balance system has no strictly positive solution")
    t = (lo + hi) / 2
    return [b + t * v for b, v in zip(base, d)]


def hawkdove_level_fitness(g, l, k_n, below, above):
    """Fitness of a level in the pure construction given the mass below and above it."""
    return 1 + g * below - l * above - k_n
