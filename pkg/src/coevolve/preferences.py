"""Subjective preferences, cognitive types, the environment, and the
equilibrium notions built on them: best replies, undominated actions, Nash
equilibria of subjective games, deception equilibria and fitness-maximising
deception equilibria.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .game import GameError, MixedStrategy, SymmetricGame, as_strategy
from .numeric import (
    FLOAT_TOL,
    Number,
    all_exact,
    bilinear,
    dot,
    freeze,
    game_value,
    is_exact,
    matvec,
    solve,
    to_mode,
    vecmat,
)


class PreconditionError(ValueError):
    """An operation was called outside its domain."""


# --------------------------------------------------------------------------
# Utilities and types
# --------------------------------------------------------------------------

def normalize_matrix(matrix) -> tuple[tuple[Number, ...], ...]:
    """Affine normalization to ``[0, 1]``; constant matrices become zeros."""
    rows = freeze(matrix)
    exact = all(all_exact(r) for r in rows)
    rows = tuple(tuple(to_mode(x, exact) for x in r) for r in rows)
    lo = min(min(r) for r in rows)
    hi = max(max(r) for r in rows)
    if hi == lo:
        zero = rows[0][0] - rows[0][0]
        return tuple(tuple(zero for _ in r) for r in rows)
    span = hi - lo
    return tuple(tuple((x - lo) / span for x in r) for r in rows)


@dataclass(frozen=True)
class UtilityFunction:
    """Subjective utility over action profiles, kept in canonical form."""

    matrix: tuple[tuple[Number, ...], ...]

    def __post_init__(self):
        m = len(self.matrix)
        if m == 0 or any(len(r) != m for r in self.matrix):
            raise GameError("utility matrix must be square and nonempty")
        object.__setattr__(self, "matrix", normalize_matrix(self.matrix))

    @property
    def m(self) -> int:
        return len(self.matrix)

    def against(self, opponent=None) -> "UtilityFunction":
        """Utility used against ``opponent``; type-independent here."""
        return self

    def branches(self) -> tuple["UtilityFunction", ...]:
        return (self,)

    def __call__(self, sigma, sigma_prime) -> Number:
        x = as_strategy(sigma, self.m)
        y = as_strategy(sigma_prime, self.m)
        return bilinear(x.weights, self.matrix, y.weights)


def materialistic(game: SymmetricGame) -> UtilityFunction:
    """Preferences that coincide with fitness."""
    return UtilityFunction(game.payoff)


def constant_utility(m: int, exact: bool = True) -> UtilityFunction:
    zero = Fraction(0) if exact else 0.0
    return UtilityFunction(tuple((zero,) * m for _ in range(m)))


def generous_actions(game: SymmetricGame) -> tuple[int, int]:
    """Most and second most generous actions (lowest index on ties).

    An action is generous if the opponent's best reply to it yields the
    highest fitness.  The second most generous action maximizes the same
    quantity among the remaining actions.
    """
    col_max = [max(game.payoff[r][c] for r in range(game.m)) for c in range(game.m)]
    order = sorted(range(game.m), key=lambda c: (-col_max[c], c))
    return order[0], order[1]


def pro_generous_indifferent(game: SymmetricGame, alpha=None, beta=None) -> UtilityFunction:
    """Utility indifferent over own actions that rewards opponents for being
    generous: ``alpha`` when the opponent plays the most generous action,
    ``beta`` for the second most generous one, zero otherwise."""
    exact = game.exact
    alpha = to_mode(1 if alpha is None else alpha, exact)
    beta = to_mode(Fraction(1, 2) if beta is None else beta, exact)
    ag, ag2 = generous_actions(game)
    zero = to_mode(0, exact)
    row = tuple(alpha if c == ag else beta if c == ag2 else zero for c in range(game.m))
    return UtilityFunction(tuple(row for _ in range(game.m)))


def action_loving(m: int, a: int, exact: bool = True) -> UtilityFunction:
    """Utility 1 for playing ``a`` regardless of the opponent, 0 otherwise."""
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    return UtilityFunction(tuple(tuple(one if i == a else zero for _ in range(m)) for i in range(m)))


@dataclass(frozen=True)
class CognitiveType:
    """Preferences paired with a cognitive level.  ``label`` distinguishes
    otherwise identical types and names branches of type-dependent
    utilities."""

    utility: UtilityFunction
    level: int
    label: str = ""

    def __post_init__(self):
        if isinstance(self.level, bool) or not isinstance(self.level, int) or self.level < 1:
            raise PreconditionError(f"cognitive level must be a positive integer, got {self.level!r}")

    def name(self) -> str:
        return self.label or f"type@{self.level}"


# --------------------------------------------------------------------------
# Environment
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CostSchedule:
    """Cognitive costs ``k_1 = 0 < k_2 < ...``; beyond the explicit list the
    schedule grows linearly with slope ``slope`` (default: last increment)."""

    values: tuple[Number, ...]
    slope: Number | None = None

    def __post_init__(self):
        vals = tuple(self.values)
        if not vals:
            raise PreconditionError("cost schedule needs at least k_1")
        exact = all_exact(vals) and (self.slope is None or is_exact(self.slope))
        vals = tuple(to_mode(v, exact) for v in vals)
        if vals[0] != 0:
            raise PreconditionError("the level-1 cost must be zero")
        for n in range(1, len(vals)):
            if not vals[n] > vals[n - 1]:
                raise PreconditionError(f"costs must increase strictly (k_{n} >= k_{n + 1})")
        slope = self.slope
        if slope is None:
            slope = vals[-1] - vals[-2] if len(vals) >= 2 else to_mode(1, exact)
        slope = to_mode(slope, exact)
        if not slope > 0:
            raise PreconditionError("extrapolation slope must be positive")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "slope", slope)

    @classmethod
    def linear(cls, step, levels: int = 2) -> "CostSchedule":
        step = Fraction(step) if is_exact(step) else step
        return cls(tuple(step * (n - 1) for n in range(1, max(levels, 2) + 1)), step)

    @property
    def exact(self) -> bool:
        return all_exact(self.values) and is_exact(self.slope)

    def __call__(self, n: int) -> Number:
        if n < 1:
            raise PreconditionError(f"level must be positive, got {n}")
        if n <= len(self.values):
            return self.values[n - 1]
        return self.values[-1] + self.slope * (n - len(self.values))


@dataclass(frozen=True)
class DeceptionTable:
    """Probability ``q(n, n')`` that level ``n`` deceives level ``n'``.

    Pairs with ``n <= n'`` have probability zero; listed pairs use their
    entry and every other pair with ``n > n'`` uses ``default``.
    """

    entries: tuple[tuple[tuple[int, int], Number], ...] = ()
    default: Number = Fraction(1)

    def __post_init__(self):
        items = self.entries.items() if isinstance(self.entries, Mapping) else self.entries
        exact = all(is_exact(v) for _, v in items) and is_exact(self.default)
        clean = []
        for (n, n2), v in sorted(items):
            v = to_mode(v, exact)
            if n <= n2:
                if v != 0:
                    raise PreconditionError(f"q({n},{n2}) must be zero since {n} <= {n2}")
                continue
            if not (0 < v <= 1):
                raise PreconditionError(f"q({n},{n2}) must lie in (0, 1], got {v}")
            clean.append(((int(n), int(n2)), v))
        d = to_mode(self.default, exact)
        if not (0 < d <= 1):
            raise PreconditionError(f"default deception probability must lie in (0, 1], got {d}")
        object.__setattr__(self, "entries", tuple(clean))
        object.__setattr__(self, "default", d)

    @property
    def exact(self) -> bool:
        return is_exact(self.default) and all(is_exact(v) for _, v in self.entries)

    def __call__(self, n: int, n2: int) -> Number:
        if n <= n2:
            return self.default - self.default
        return dict(self.entries).get((n, n2), self.default)


@dataclass(frozen=True)
class Environment:
    game: SymmetricGame
    cost: CostSchedule
    deception: DeceptionTable = field(default_factory=DeceptionTable)

    @property
    def exact(self) -> bool:
        return self.game.exact and self.cost.exact and self.deception.exact

    def k(self, n: int) -> Number:
        return self.cost(n)

    def q(self, n: int, n2: int) -> Number:
        return self.deception(n, n2)

    def with_cost(self, cost: CostSchedule) -> "Environment":
        return Environment(self.game, cost, self.deception)


# --------------------------------------------------------------------------
# Best replies and undominated actions
# --------------------------------------------------------------------------

def _matrix(u) -> tuple[tuple[Number, ...], ...]:
    if isinstance(u, UtilityFunction):
        return u.matrix
    if hasattr(u, "matrix"):
        return u.matrix
    return freeze(u)


def _tol(values, tol: float) -> float:
    return 0 if all(is_exact(v) for v in values) else tol


def best_replies(u, sigma_prime, tol: float = FLOAT_TOL) -> tuple[int, ...]:
    """Pure best replies to ``sigma_prime``; all mixtures of them are best
    replies too."""
    mat = _matrix(u)
    y = as_strategy(sigma_prime, len(mat))
    vals = matvec(mat, y.weights)
    best = max(vals)
    t = _tol(vals, tol)
    return tuple(i for i, v in enumerate(vals) if v >= best - t)


@dataclass(frozen=True)
class DominanceCheck:
    action: int
    margin: Number  # best strict-dominance margin by a mixture of other actions
    undominated: bool
    boundary: bool


def dominance_margin(u, a: int) -> Number:
    """Largest ``eps`` such that some mixture of the other actions beats
    ``a`` by at least ``eps`` against every opponent action."""
    mat = _matrix(u)
    m = len(mat)
    rows = [[mat[b][c] - mat[a][c] for c in range(m)] for b in range(m) if b != a]
    value, _, _ = game_value(rows)
    return value


def dominance_checks(u, tol: float = FLOAT_TOL) -> tuple[DominanceCheck, ...]:
    mat = _matrix(u)
    exact = all(all_exact(r) for r in mat)
    out = []
    for a in range(len(mat)):
        eps = dominance_margin(mat, a)
        if exact:
            out.append(DominanceCheck(a, eps, eps <= 0, False))
        else:
            out.append(DominanceCheck(a, eps, eps <= tol, abs(eps) <= tol))
    return tuple(out)


def undominated_pure_actions(u, tol: float = FLOAT_TOL) -> tuple[int, ...]:
    """Pure actions that are best replies to some belief.

    In two-player games an action is never a best reply exactly when a
    mixture of the other actions strictly dominates it, so each action is
    tested with one small zero-sum linear program.  Type-dependent
    utilities contribute the union over their opponent branches.
    """
    return _undominated_cached(tuple(_branches(u)), tol)


@lru_cache(maxsize=4096)
def _undominated_cached(branches, tol):
    found: set[int] = set()
    for branch in branches:
        for chk in dominance_checks(branch, tol):
            if chk.undominated:
                found.add(chk.action)
    return tuple(sorted(found))


def _branches(u):
    if hasattr(u, "branches"):
        return [b.matrix if hasattr(b, "matrix") else b for b in u.branches()]
    return [_matrix(u)]


def common_belief(u, actions: Sequence[int], tol: float = FLOAT_TOL):
    """A belief making every action in ``actions`` a best reply, or ``None``.

    Solves the zero-sum game whose rows are pairs ``(a, b)`` with payoff
    ``u(b, c) - u(a, c)``; the value is zero exactly when the column player's
    optimal mixture is such a belief.
    """
    mat = _matrix(u)
    m = len(mat)
    rows = [[mat[b][c] - mat[a][c] for c in range(m)] for a in actions for b in range(m)]
    value, _, belief = game_value(rows)
    exact = all(all_exact(r) for r in mat)
    ok = value == 0 if exact else value <= tol
    return tuple(belief) if ok else None


def in_undominated_set(u, sigma, tol: float = FLOAT_TOL) -> bool:
    """Whether ``sigma`` is a best reply to some belief (in some branch)."""
    m = len(_branches(u)[0])
    x = as_strategy(sigma, m)
    supp = [i for i, w in enumerate(x.weights) if w > (0 if is_exact(w) else 1e-12)]
    return any(common_belief(b, supp, tol) is not None for b in _branches(u))


# --------------------------------------------------------------------------
# Nash equilibria of subjective games
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NashEquilibrium:
    sigma: MixedStrategy
    sigma_prime: MixedStrategy
    component: bool = False  # part of a continuum of equilibria

    @property
    def support_size(self) -> int:
        return len(self.sigma.support) + len(self.sigma_prime.support)


def _polytope_vertices(constraints, rhs, m, exact, tol):
    """Vertices of ``{x : A x <= b}`` (first ``m`` rows are ``-x_i <= 0``)
    with the set of tight constraints at each."""
    seen = {}
    zero = Fraction(0) if exact else 0.0
    for tight in combinations(range(len(constraints)), m):
        x = solve([constraints[t] for t in tight], [rhs[t] for t in tight])
        if x is None:
            continue
        if exact:
            feasible = all(dot(constraints[r], x) <= rhs[r] for r in range(len(constraints)))
        else:
            feasible = all(dot(constraints[r], x) <= rhs[r] + tol for r in range(len(constraints)))
            x = [0.0 if abs(v) <= tol else v for v in x]
        if not feasible or all(v == zero for v in x):
            continue
        key = tuple(x) if exact else tuple(round(v, 9) for v in x)
        if key in seen:
            continue
        if exact:
            labels = frozenset(r for r in range(len(constraints)) if dot(constraints[r], x) == rhs[r])
        else:
            labels = frozenset(
                r for r in range(len(constraints)) if abs(dot(constraints[r], x) - rhs[r]) <= tol
            )
        seen[key] = (tuple(x), labels)
    return list(seen.values())


def nash_equilibria(u, u_prime, tol: float = FLOAT_TOL) -> list[NashEquilibrium]:
    """All extreme Nash equilibria of the game where the row player has
    utility ``u`` and the column player ``u_prime``.

    Uses vertex enumeration of the two best-response polytopes, which finds
    every extreme equilibrium even in degenerate games.  Equilibria sharing
    one player's strategy with another extreme equilibrium lie on a
    continuum and are flagged as components.  Ordered by total support size,
    then lexicographically.
    """
    return list(_nash_cached(_matrix(u), _matrix(u_prime), tol))


@lru_cache(maxsize=4096)
def _nash_cached(a, b, tol):
    m = len(a)
    if len(b) != m:
        raise GameError("utilities must share one action set")
    exact = all(all_exact(r) for r in a) and all(all_exact(r) for r in b)
    one = Fraction(1) if exact else 1.0
    zero = one - one
    # row payoffs R[i][j] = u(i, j); column payoffs C[i][j] = u'(j, i)
    lo_a = min(min(r) for r in a)
    lo_b = min(min(r) for r in b)
    R = [[a[i][j] - lo_a + one for j in range(m)] for i in range(m)]
    C = [[b[j][i] - lo_b + one for j in range(m)] for i in range(m)]
    eye = [[-one if i == j else zero for j in range(m)] for i in range(m)]
    # P = {x >= 0 : C' x <= 1}; labels i (x_i = 0) and m + j (column j a best reply)
    p_cons = eye + [[C[i][j] for i in range(m)] for j in range(m)]
    # Q = {y >= 0 : R y <= 1}; labels m + j (y_j = 0) and i (row i a best reply)
    q_cons = eye + [list(R[i]) for i in range(m)]
    rhs = [zero] * m + [one] * m
    vtol = 1e-10
    p_verts = _polytope_vertices(p_cons, rhs, m, exact, vtol)
    q_verts = _polytope_vertices(q_cons, rhs, m, exact, vtol)
    # relabel Q so label i means "row i best reply" and m + j means "y_j = 0"
    q_verts = [(y, frozenset((r + m) % (2 * m) for r in lab)) for y, lab in q_verts]
    full = frozenset(range(2 * m))
    raw = []
    for x, lx in p_verts:
        for y, ly in q_verts:
            if lx | ly == full:
                sx, sy = sum(x), sum(y)
                raw.append((tuple(v / sx for v in x), tuple(v / sy for v in y)))
    xs = [r[0] for r in raw]
    ys = [r[1] for r in raw]
    out = []
    for x, y in raw:
        comp = xs.count(x) > 1 or ys.count(y) > 1
        out.append(NashEquilibrium(MixedStrategy(x), MixedStrategy(y), comp))

    def key(ne):
        sx, sy = ne.sigma.support, ne.sigma_prime.support
        return (ne.support_size, sx, sy, tuple(-float(w) for w in ne.sigma.weights),
                tuple(-float(w) for w in ne.sigma_prime.weights))

    out.sort(key=key)
    return tuple(out)


def nash_violation(u, u_prime, sigma, sigma_prime) -> Number:
    """Largest subjective gain from a pure deviation by either player."""
    a = _matrix(u)
    b = _matrix(u_prime)
    m = len(a)
    x = as_strategy(sigma, m).weights
    y = as_strategy(sigma_prime, m).weights
    row_vals = matvec(a, y)
    col_vals = matvec(b, x)
    gain_row = max(row_vals) - dot(x, row_vals)
    gain_col = max(col_vals) - dot(y, col_vals)
    return max(gain_row, gain_col)


def is_nash(u, u_prime, sigma, sigma_prime, tol: float = FLOAT_TOL) -> bool:
    v = nash_violation(u, u_prime, sigma, sigma_prime)
    return v <= (0 if is_exact(v) else tol)


# --------------------------------------------------------------------------
# Deception
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DeceptionOutcome:
    """Optimal deception: the deceiver's best attainable subjective value
    and every pure profile ``(own action, induced action)`` attaining it."""

    value: Number
    profiles: tuple[tuple[int, int], ...]
    fitness: tuple[Number, ...]
    induced_actions: tuple[int, ...]

    def strategies(self, m: int, exact: bool = True):
        return [
            (MixedStrategy.pure(m, i, exact), MixedStrategy.pure(m, j, exact)) for i, j in self.profiles
        ]


def _check_levels(deceiver: CognitiveType, deceived: CognitiveType):
    if deceiver.level <= deceived.level:
        raise PreconditionError(
            f"deceiver level {deceiver.level} must exceed deceived level {deceived.level}"
        )


def _deception_inputs(env: Environment, deceiver: CognitiveType, deceived: CognitiveType, tol):
    _check_levels(deceiver, deceived)
    u_d = _matrix(deceiver.utility.against(deceived))
    induced = undominated_pure_actions(deceived.utility, tol)
    return u_d, induced


def deception_equilibria(
    env: Environment, deceiver: CognitiveType, deceived: CognitiveType, tol: float = FLOAT_TOL
) -> DeceptionOutcome:
    """Deceiver's subjectively optimal profiles when it can induce any
    undominated action of the deceived party.

    The objective is bilinear and every undominated mixture is supported on
    undominated pure actions, so enumerating pure pairs finds the optimum.
    """
    u_d, induced = _deception_inputs(env, deceiver, deceived, tol)
    m = len(u_d)
    cand = [(i, j) for j in induced for i in range(m)]
    value = max(u_d[i][j] for i, j in cand)
    t = _tol([value], tol)
    profiles = tuple(sorted((i, j) for i, j in cand if u_d[i][j] >= value - t))
    fit = tuple(env.game.payoff[i][j] for i, j in profiles)
    return DeceptionOutcome(value, profiles, fit, induced)


def fmde(
    env: Environment, deceiver: CognitiveType, deceived: CognitiveType, tol: float = FLOAT_TOL
) -> DeceptionOutcome | None:
    """Fitness-maximising deception equilibria, or ``None`` when no fitness
    maximizer over the feasible set is subjectively optimal."""
    u_d, induced = _deception_inputs(env, deceiver, deceived, tol)
    de = deception_equilibria(env, deceiver, deceived, tol)
    pi = env.game.payoff
    m = len(u_d)
    cand = [(i, j) for j in induced for i in range(m)]
    best = max(pi[i][j] for i, j in cand)
    t = _tol([best], tol)
    top = [(i, j) for i, j in cand if pi[i][j] >= best - t]
    chosen = tuple(sorted(p for p in top if p in de.profiles))
    if not chosen:
        return None
    return DeceptionOutcome(de.value, chosen, tuple(pi[i][j] for i, j in chosen), induced)


def fmde_fitness_bound(env: Environment, deceived: CognitiveType, tol: float = FLOAT_TOL) -> Number:
    """Largest fitness a deceiver can reach against ``deceived``."""
    induced = undominated_pure_actions(deceived.utility, tol)
    pi = env.game.payoff
    return max(pi[i][j] for j in induced for i in range(env.game.m))


def deception_shortfall(
    env: Environment, deceiver: CognitiveType, deceived: CognitiveType, sigma, sigma_prime,
    tol: float = FLOAT_TOL,
):
    """How far ``(sigma, sigma_prime)`` is from being a deception equilibrium.

    Returns ``(feasible, shortfall)``: whether ``sigma_prime`` is undominated
    for the deceived party and how much subjective value the deceiver leaves
    on the table.
    """
    de = deception_equilibria(env, deceiver, deceived, tol)
    u_d = _matrix(deceiver.utility.against(deceived))
    m = len(u_d)
    x = as_strategy(sigma, m)
    y = as_strategy(sigma_prime, m)
    feasible = in_undominated_set(deceived.utility, y, tol)
    return feasible, de.value - bilinear(x.weights, u_d, y.weights)


def is_deception_equilibrium(env, deceiver, deceived, sigma, sigma_prime, tol: float = FLOAT_TOL) -> bool:
    feasible, short = deception_shortfall(env, deceiver, deceived, sigma, sigma_prime, tol)
    return feasible and short <= (0 if is_exact(short) else tol)


def subjective_values(u, sigma_prime) -> list[Number]:
    mat = _matrix(u)
    return matvec(mat, as_strategy(sigma_prime, len(mat)).weights)


def column_values(u, sigma) -> list[Number]:
    mat = _matrix(u)
    return vecmat(as_strategy(sigma, len(mat)).weights, mat)


__all__ = [
    "CognitiveType",
    "CostSchedule",
    "DeceptionOutcome",
    "DeceptionTable",
    "DominanceCheck",
    "Environment",
    "NashEquilibrium",
    "PreconditionError",
    "UtilityFunction",
    "action_loving",
    "best_replies",
    "common_belief",
    "constant_utility",
    "deception_equilibria",
    "deception_shortfall",
    "dominance_checks",
    "fmde",
    "fmde_fitness_bound",
    "generous_actions",
    "in_undominated_set",
    "is_deception_equilibrium",
    "is_nash",
    "materialistic",
    "nash_equilibria",
    "nash_violation",
    "normalize_matrix",
    "pro_generous_indifferent",
    "undominated_pure_actions",
]
