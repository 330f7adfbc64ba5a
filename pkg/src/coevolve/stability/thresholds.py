"""Scalar thresholds comparing the gain from deviating with the cost of
deceiving."""

from __future__ import annotations

import math

from ..numeric import Number, close
from ..preferences import Environment, PreconditionError

INFINITE_CAP = 1e12


def effective_cost(env: Environment) -> Number:
    """Smallest ratio ``k_n / q(n, 1)`` over levels ``n >= 2``.

    Since ``q <= 1`` each ratio is at least ``k_n``, and ``k_n`` grows
    without bound, so the scan stops at the first level whose cost alone
    reaches the best ratio found so far.
    """
    return effective_cost_at_level(env, 1)


def effective_cost_at_level(env: Environment, n: int, cap: float = INFINITE_CAP) -> Number:
    """Smallest ratio ``(k_m - k_n) / q(m, n)`` over levels ``m > n``.

    Returns ``math.inf`` when the minimum exceeds ``cap``.
    """
    if n < 1:
        raise PreconditionError(f"level must be positive, got {n}")
    best = None
    base = env.k(n)
    level = n + 1
    while True:
        extra = env.k(level) - base
        if best is not None and extra >= best:
            break
        if extra > cap:
            break
        ratio = extra / env.q(level, n)
        if best is None or ratio < best:
            best = ratio
        level += 1
    if best is None or best > cap:
        return math.inf
    return best


def minimizing_levels(env: Environment, n: int = 1) -> list[int]:
    """Levels attaining the effective cost of deceiving level ``n``."""
    c = effective_cost_at_level(env, n)
    if c == math.inf:
        return []
    out = []
    base = env.k(n)
    level = n + 1
    while env.k(level) - base <= c:
        if close((env.k(level) - base) / env.q(level, n), c):
            out.append(level)
        level += 1
    return out
