"""Heterogeneous stable configurations in Rock-Paper-Scissors.

Each level ``n`` is populated by materialistic players.  Players at the
same level play the uniform equilibrium; when levels differ the higher one
deceives the lower one into Rock and answers with Paper.  Frequencies are
chosen so that every level earns the same fitness.
"""

from __future__ import annotations

from fractions import Fraction

from ..game import MixedStrategy, rock_paper_scissors
from ..numeric import is_exact, to_mode
from ..population import Configuration, make_configuration
from ..preferences import CognitiveType, Environment, PreconditionError, materialistic


def _check_rps(env: Environment):
    ref = rock_paper_scissors()
    if env.game.m != 3 or any(
        env.game.payoff[i][j] != ref.payoff[i][j] for i in range(3) for j in range(3)
    ):
        raise PreconditionError("game must be standard Rock-Paper-Scissors (win 1, loss -1, tie 0)")


def rps_top_level(env: Environment) -> int:
    """Largest level whose cost does not exceed 2 (the payoff range)."""
    n = 1
    while env.k(n + 1) <= 2:
        n += 1
    return n


def _levels_config(env, freqs, levels) -> Configuration:
    m, exact = 3, env.exact and all(is_exact(f) for f in freqs)
    u = materialistic(env.game)
    types = [CognitiveType(u, n, f"L{n}") for n in levels]
    uniform = MixedStrategy.uniform(m, exact)
    nash, dec = {}, {}
    for t in types:
        nash[(t, t)] = uniform
    for hi in types:
        for lo in types:
            if hi.level > lo.level:
                dec[(hi, lo)] = "P"
                dec[(lo, hi)] = "R"
                if env.q(hi.level, lo.level) < 1:
                    nash[(hi, lo)] = uniform
                    nash[(lo, hi)] = uniform
    return make_configuration(env, types, freqs, nash=nash, deception=dec)


def rps_frequencies(env: Environment):
    """Solve ``mu_n + mu_{n+1} = k_{n+1} - k_n`` with ``sum(mu) = 1``.

    With an odd number of levels the solution is unique.  With an even
    number the system is either inconsistent or has a one-parameter family
    of solutions; the midpoint of the nonnegative segment is returned.
    """
    top = rps_top_level(env)
    exact = env.cost.exact
    d = [env.k(n + 1) - env.k(n) for n in range(1, top)]
    zero, one = to_mode(0, exact), to_mode(1, exact)
    # mu_n = s_n * mu_1 + r_n with s_n = +-1
    r, s = [zero], [1]
    for n in range(1, top):
        r.append(d[n - 1] - r[-1])
        s.append(-s[-1])
    coef = sum(s)
    rest = sum(r)
    if coef != 0:
        mu1 = (one - rest) / coef
    else:
        if (rest != one) if exact else abs(rest - one) > 1e-12:
            raise PreconditionError(
                f"balance system is inconsistent: with {top} levels the alternating cost increments "
                f"sum to {rest}, not 1"
            )
        lo = max([-r[i] for i in range(top) if s[i] == 1] + [zero])
        hi = min([r[i] for i in range(top) if s[i] == -1])
        if lo > hi:
            raise PreconditionError("balance system has no nonnegative solution")
        mu1 = (lo + hi) / 2
    mu = [s[i] * mu1 + r[i] for i in range(top)]
    for i, v in enumerate(mu):
        if v < 0:
            raise PreconditionError(f"balance system forces a negative share for level {i + 1} ({v})")
    return top, mu


def construct_rps_nsc(env: Environment) -> Configuration:
    """Balanced multi-level configuration in Rock-Paper-Scissors.

    Requires every deception to succeed with certainty and each marginal
    cost up to the top level to stay below 1.  Levels with a zero share are
    left out of the support.
    """
    _check_rps(env)
    top = rps_top_level(env)
    for n in range(2, top + 1):
        for n2 in range(1, n):
            if env.q(n, n2) != 1:
                raise PreconditionError(f"deception must always succeed, but q({n},{n2}) = {env.q(n, n2)}")
    for n in range(1, top + 1):
        if not env.k(n + 1) - env.k(n) < 1:
            raise PreconditionError(
                f"marginal cost condition violated: k_{n + 1} - k_{n} = {env.k(n + 1) - env.k(n)} >= 1"
            )
    top, mu = rps_frequencies(env)
    levels = [n for n in range(1, top + 1) if mu[n - 1] > 0]
    return _levels_config(env, [mu[n - 1] for n in levels], levels)


def construct_rps_example(env: Environment, epsilon) -> Configuration:
    """Two-level configuration with shares ``(epsilon, 1 - epsilon)`` for an
    environment with ``k_2 = 1``, ``k_3 > 2`` and certain deception of level 1.
    Every incumbent earns ``epsilon - 1``."""
    _check_rps(env)
    if env.k(2) != 1:
        raise PreconditionError(f"the example needs k_2 = 1, got {env.k(2)}")
    if not env.k(3) > 2:
        raise PreconditionError(f"the example needs k_3 > 2, got {env.k(3)}")
    if env.q(2, 1) != 1:
        raise PreconditionError(f"the example needs q(2,1) = 1, got {env.q(2, 1)}")
    eps = Fraction(epsilon) if is_exact(epsilon) else epsilon
    if not 0 < eps < 1:
        raise PreconditionError("epsilon must lie strictly between 0 and 1")
    return _levels_config(env, [eps, 1 - eps], [1, 2])
