"""Symmetric two-player games with fitness payoffs and their scalar diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .numeric import (
    FLOAT_TOL,
    Number,
    all_exact,
    bilinear,
    freeze,
    gt,
    is_exact,
    to_mode,
)


class GameError(ValueError):
    """Invalid game, strategy or action reference."""


@dataclass(frozen=True)
class SymmetricGame:
    """Finite symmetric game; ``payoff[i][j]`` is the row player's fitness
    when playing action ``i`` against action ``j``."""

    actions: tuple[str, ...]
    payoff: tuple[tuple[Number, ...], ...]

    def __post_init__(self):
        acts = tuple(str(a) for a in self.actions)
        object.__setattr__(self, "actions", acts)
        m = len(acts)
        if m < 2:
            raise GameError("a game needs at least two actions")
        if len(set(acts)) != m:
            raise GameError("action labels must be distinct")
        rows = freeze(self.payoff)
        if len(rows) != m or any(len(r) != m for r in rows):
            raise GameError(f"payoff matrix must be {m}x{m}")
        for r in rows:
            for x in r:
                if isinstance(x, bool) or not isinstance(x, (int, float, Fraction)):
                    raise GameError(f"non-numeric payoff {x!r}")
                if not math.isfinite(float(x)):
                    raise GameError("payoffs must be finite")
        exact = all(all_exact(r) for r in rows)
        rows = tuple(tuple(to_mode(x, exact) for x in r) for r in rows)
        object.__setattr__(self, "payoff", rows)

    @classmethod
    def from_matrix(cls, payoff, actions: Sequence[str] | None = None) -> "SymmetricGame":
        if actions is None:
            actions = [f"a{i + 1}" for i in range(len(payoff))]
        return cls(tuple(actions), freeze(payoff))

    @property
    def m(self) -> int:
        return len(self.actions)

    @property
    def exact(self) -> bool:
        return all(is_exact(x) for r in self.payoff for x in r)

    def index(self, a) -> int:
        if isinstance(a, int) and not isinstance(a, bool):
            if 0 <= a < self.m:
                return a
            raise GameError(f"action index {a} out of range")
        try:
            return self.actions.index(str(a))
        except ValueError:
            raise GameError(f"unknown action {a!r}") from None

    def pi(self, a, b) -> Number:
        return self.payoff[self.index(a)][self.index(b)]

    def zero(self) -> Number:
        return Fraction(0) if self.exact else 0.0


@dataclass(frozen=True)
class MixedStrategy:
    """Probability vector over actions, stored normalized."""

    weights: tuple[Number, ...]

    def __post_init__(self):
        w = tuple(self.weights)
        if not w:
            raise GameError("empty strategy")
        exact = all_exact(w)
        w = tuple(to_mode(x, exact) for x in w)
        if any(x < 0 for x in w):
            raise GameError("strategy weights must be nonnegative")
        total = sum(w)
        if total <= 0:
            raise GameError("strategy weights must not all be zero")
        if not exact and abs(total - 1.0) > 1e-6:
            raise GameError(f"strategy weights sum to {total}, not 1")
        if exact and total != 1:
            raise GameError(f"strategy weights sum to {total}, not 1")
        object.__setattr__(self, "weights", tuple(x / total for x in w))

    @classmethod
    def pure(cls, m: int, i: int, exact: bool = True) -> "MixedStrategy":
        one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
        return cls(tuple(one if j == i else zero for j in range(m)))

    @classmethod
    def uniform(cls, m: int, exact: bool = True) -> "MixedStrategy":
        w = Fraction(1, m) if exact else 1.0 / m
        return cls((w,) * m)

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, i: int) -> Number:
        return self.weights[i]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.weights) if x > 0)

    def pure_index(self):
        """Index of the action played with certainty, or ``None``."""
        s = [i for i, x in enumerate(self.weights) if x > (0 if is_exact(x) else 1e-12)]
        if len(s) == 1 and (self.weights[s[0]] == 1 or abs(float(self.weights[s[0]]) - 1) < 1e-12):
            return s[0]
        return None


def as_strategy(s, m: int, exact: bool = True) -> MixedStrategy:
    """Coerce a pure index or a weight vector into a ``MixedStrategy``."""
    if isinstance(s, MixedStrategy):
        out = s
    elif isinstance(s, int) and not isinstance(s, bool):
        out = MixedStrategy.pure(m, s, exact)
    else:
        out = MixedStrategy(tuple(s))
    if len(out) != m:
        raise GameError(f"strategy has {len(out)} weights, game has {m} actions")
    return out


def payoff(game: SymmetricGame, sigma, sigma_prime) -> Number:
    """Expected fitness of ``sigma`` against ``sigma_prime``."""
    x = as_strategy(sigma, game.m, game.exact)
    y = as_strategy(sigma_prime, game.m, game.exact)
    return bilinear(x.weights, game.payoff, y.weights)


def deviation_gain(game: SymmetricGame, a) -> Number:
    """Largest fitness gain from deviating unilaterally from ``(a, a)``."""
    i = game.index(a)
    col = [game.payoff[r][i] for r in range(game.m)]
    return max(col) - game.payoff[i][i]


@dataclass(frozen=True)
class GameDiagnostics:
    efficient_payoff: Number
    efficient_profiles: tuple[tuple[int, int], ...]
    symmetric_efficient_actions: tuple[int, ...]
    punishment_actions: tuple[int, ...] = ()
    generic: bool = False
    pure_maxmin: Number = 0
    maxmin_action: int = 0
    pure_minmax: Number = 0
    minmax_action: int = 0
    deviation_gains: tuple[Number, ...] = field(default=())


def efficiency_analysis(game: SymmetricGame) -> GameDiagnostics:
    """Efficient payoff (half the best pure pair sum) and the pairs attaining it.

    Mixed profiles never beat the best pure pair because the payoff sum is
    bilinear in the two strategies, so the search is over pure pairs only.
    """
    p = game.payoff
    half = Fraction(1, 2) if game.exact else 0.5
    best = max((p[i][j] + p[j][i]) * half for i, j in product(range(game.m), repeat=2))
    pairs = tuple(
        (i, j) for i, j in product(range(game.m), repeat=2) if (p[i][j] + p[j][i]) * half == best
    )
    if not game.exact:
        pairs = tuple(
            (i, j)
            for i, j in product(range(game.m), repeat=2)
            if abs((p[i][j] + p[j][i]) * half - best) <= FLOAT_TOL
        )
    return GameDiagnostics(
        efficient_payoff=best,
        efficient_profiles=pairs,
        symmetric_efficient_actions=tuple(i for i, j in pairs if i == j),
    )


def efficient_payoff(game: SymmetricGame) -> Number:
    return efficiency_analysis(game).efficient_payoff


def punishment_actions(game: SymmetricGame) -> tuple[int, ...]:
    """Actions that hold every opponent strictly below the efficient payoff."""
    pi_hat = efficient_payoff(game)
    out = []
    for a in range(game.m):
        col_max = max(game.payoff[r][a] for r in range(game.m))
        if gt(pi_hat, col_max):
            out.append(a)
    return tuple(out)


def default_generic_tol(game: SymmetricGame) -> float:
    return 1e-12 if game.exact else 1e-9


def is_generic(game: SymmetricGame, tol: float | None = None) -> bool:
    """All payoffs, and all pair sums, differ across distinct unordered profiles."""
    if tol is None:
        tol = default_generic_tol(game)
    p = game.payoff
    pairs = list(product(range(game.m), repeat=2))
    for (a, a2), (b, b2) in product(pairs, repeat=2):
        if {a, a2} == {b, b2}:
            continue
        if abs(p[a][a2] - p[b][b2]) <= tol:
            return False
        if abs(p[a][a2] + p[a2][a] - p[b][b2] - p[b2][b]) <= tol:
            return False
    return True


def maxmin_minmax(game: SymmetricGame) -> tuple[Number, int, Number, int]:
    """Pure maxmin and minmax values with witnesses (lowest index on ties).

    Returns ``(maxmin, a_maxmin, minmax, a_minmax)`` where ``a_maxmin`` is
    the guaranteeing own action and ``a_minmax`` the opponent action that
    holds the row player down to the minmax value.
    """
    p, m = game.payoff, game.m
    row_min = [min(p[i]) for i in range(m)]
    lo = max(row_min)
    a_lo = row_min.index(lo)
    col_max = [max(p[i][j] for i in range(m)) for j in range(m)]
    hi = min(col_max)
    a_hi = col_max.index(hi)
    return lo, a_lo, hi, a_hi


def diagnostics(game: SymmetricGame, tol: float | None = None) -> GameDiagnostics:
    eff = efficiency_analysis(game)
    lo, a_lo, hi, a_hi = maxmin_minmax(game)
    return GameDiagnostics(
        efficient_payoff=eff.efficient_payoff,
        efficient_profiles=eff.efficient_profiles,
        symmetric_efficient_actions=eff.symmetric_efficient_actions,
        punishment_actions=punishment_actions(game),
        generic=is_generic(game, tol),
        pure_maxmin=lo,
        maxmin_action=a_lo,
        pure_minmax=hi,
        minmax_action=a_hi,
        deviation_gains=tuple(deviation_gain(game, a) for a in range(game.m)),
    )


def symmetrize(row_payoff, col_payoff, row_actions=None, col_actions=None) -> SymmetricGame:
    """Embed an asymmetric game into a symmetric one by randomizing roles.

    ``row_payoff[r][c]`` and ``col_payoff[r][c]`` are the payoffs of the row
    and column player at profile ``(r, c)``.  Each symmetrized action is a
    pair ``(r, c)``: what to play in the row role and in the column role.
    Payoffs average the two equally likely role assignments.
    """
    a = freeze(row_payoff)
    b = freeze(col_payoff)
    m1 = len(a)
    if m1 == 0:
        raise GameError("empty payoff matrix")
    m2 = len(a[0])
    if any(len(r) != m2 for r in a) or len(b) != m1 or any(len(r) != m2 for r in b):
        raise GameError("row and column payoff matrices must share one m1 x m2 shape")
    exact = all(all_exact(r) for r in a) and all(all_exact(r) for r in b)
    half = Fraction(1, 2) if exact else 0.5
    row_actions = list(row_actions) if row_actions else [f"r{i + 1}" for i in range(m1)]
    col_actions = list(col_actions) if col_actions else [f"c{j + 1}" for j in range(m2)]
    roles = list(product(range(m1), range(m2)))
    labels = [f"{row_actions[r]}|{col_actions[c]}" for r, c in roles]
    pay = [
        [half * (to_mode(a[r][c2], exact) + to_mode(b[r2][c], exact)) for (r2, c2) in roles]
        for (r, c) in roles
    ]
    return SymmetricGame(tuple(labels), freeze(pay))


def symmetrize_symmetric(game: SymmetricGame) -> SymmetricGame:
    """Symmetrize a game that is already symmetric (column payoffs = transpose)."""
    pt = tuple(zip(*game.payoff))
    return symmetrize(game.payoff, pt, game.actions, game.actions)


# --------------------------------------------------------------------------
# Reference games used throughout tests, examples and the CLI
# --------------------------------------------------------------------------

def prisoners_dilemma(cc=3, cd=0, dc=4, dd=1) -> SymmetricGame:
    return SymmetricGame(("C", "D"), ((Fraction(cc), Fraction(cd)), (Fraction(dc), Fraction(dd))))


def rock_paper_scissors() -> SymmetricGame:
    f = Fraction
    return SymmetricGame(
        ("R", "P", "S"),
        ((f(0), f(-1), f(1)), (f(1), f(0), f(-1)), (f(-1), f(1), f(0))),
    )


def hawk_dove(g, l) -> SymmetricGame:
    """Actions ``("D", "H")``: ``D`` against ``D`` earns 1, ``H`` against
    ``D`` earns ``1 + g``, ``D`` against ``H`` earns ``1 - l`` and two
    hawks earn 0."""
    exact = is_exact(g) and is_exact(l)
    g, l = to_mode(g, exact), to_mode(l, exact)
    one, zero = to_mode(1, exact), to_mode(0, exact)
    return SymmetricGame(("D", "H"), ((one, one - l), (one + g, zero)))
