"""Brute-force reference implementations used to cross-check the library.

Nothing here imports the routines under test; each oracle recomputes its
answer from the definition by enumeration.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

SWEEP = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000))


def belief_grid(m: int, step: float = 0.02) -> np.ndarray:
    """All beliefs on the simplex whose weights are multiples of ``step``."""
    n = round(1 / step)
    pts = [c for c in itertools.product(range(n + 1), repeat=m - 1) if sum(c) <= n]
    return np.array([list(c) + [n - sum(c)] for c in pts], dtype=float) / n


def grid_undominated(u, step: float = 0.02, tol: float = 1e-9) -> tuple[int, ...]:
    """Actions that are a best reply to some grid belief."""
    u = np.array(u, dtype=float)
    vals = belief_grid(len(u), step) @ u.T
    best = vals.max(axis=1, keepdims=True)
    hit = (vals >= best - tol).any(axis=0)
    return tuple(int(i) for i in np.flatnonzero(hit))


def lp_undominated(u, tol: float = 1e-9) -> tuple[int, ...]:
    """Actions not strictly dominated by any mixture, via one LP per action."""
    from scipy.optimize import linprog

    u = np.array(u, dtype=float)
    m = len(u)
    out = []
    for a in range(m):
        # maximise t subject to p'u[:, j] >= u[a, j] + t, p on the simplex
        c = np.zeros(m + 1)
        c[-1] = -1.0
        a_ub = np.hstack([-u.T, np.ones((m, 1))])
        b_ub = -u[a]
        a_eq = np.append(np.ones(m), 0.0)[None, :]
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                      bounds=[(0, None)] * m + [(None, None)], method="highs")
        if -res.fun <= tol:
            out.append(a)
    return tuple(out)


def brute_deception_profiles(u_deceiver, induced) -> tuple[tuple[int, int], ...]:
    """Pure (own, induced) pairs attaining the best subjective value."""
    best = brute_deception_value(u_deceiver, induced)
    return tuple(sorted((i, j) for j in induced for i in range(len(u_deceiver))
                        if float(u_deceiver[i][j]) == best))


def best_reply_gap(u, sigma, sigma_prime) -> float:
    """How much a pure deviation improves on ``sigma`` against ``sigma_prime``."""
    u = np.array(u, dtype=float)
    s = np.array([float(x) for x in sigma])
    t = np.array([float(x) for x in sigma_prime])
    vals = u @ t
    return float(vals.max() - s @ vals)


def brute_deception_value(u_deceiver, induced) -> float:
    """Best subjective value over pure own actions and induced actions."""
    return max(float(u_deceiver[i][j]) for j in induced for i in range(len(u_deceiver)))


def _bil(x, b, y):
    return sum(x[i] * b[i][j] * y[j] for i in range(len(x)) for j in range(len(y)))


def sweep_margins(b, x, y, shares=SWEEP):
    """Mutant fitness minus incumbent fitness in the post-entry state."""
    out = []
    for e in shares:
        w = [(1 - e) * xi + e * yi for xi, yi in zip(x, y)]
        out.append(_bil(y, b, w) - _bil(x, b, w))
    return out


def sweep_oracle(b, x, extra=()):
    """Stability by explicit invasion at the smallest listed share.

    Returns ``(nss_ok, ess_ok)``.  Pure mutants plus ``extra`` are tried.
    """
    n = len(b)
    pool = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)] + [tuple(y) for y in extra]
    nss = ess = True
    for y in pool:
        if tuple(y) == tuple(x):
            continue
        d = sweep_margins(b, x, y)[-1]
        if d > 0:
            nss = False
        if d >= 0:
            ess = False
    return nss, ess


def random_int_game(rng: random.Random, m: int, lo: int = -3, hi: int = 3):
    return [[Fraction(rng.randint(lo, hi)) for _ in range(m)] for _ in range(m)]


def game_corpus(count: int = 60, seed: int = 7):
    """Random integer symmetric games with 2 to 4 actions."""
    rng = random.Random(seed)
    return [random_int_game(rng, rng.choice([2, 3, 3, 4, 4])) for _ in range(count)]
