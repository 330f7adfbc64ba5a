"""Type games and neutral / evolutionary stability of mixed strategies in
symmetric matrix games."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from ..game import SymmetricGame, as_strategy
from ..numeric import (
    FLOAT_TOL,
    Number,
    all_exact,
    as_array,
    bilinear,
    dot,
    freeze,
    matvec,
    nullspace,
    psd_pivots,
)
from ..population import BehaviorPolicy, Configuration, pair_fitness
from ..preferences import CognitiveType, Environment

CERTIFIED = "certified-stable"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Condition:
    name: str
    passed: bool
    margin: Any = None
    note: str = ""


@dataclass(frozen=True)
class StabilityVerdict:
    status: str
    witness: Any = None
    conditions: tuple[Condition, ...] = ()
    reason: str = ""
    details: tuple = ()

    def __post_init__(self):
        if self.status not in (CERTIFIED, REFUTED, INCONCLUSIVE):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == REFUTED and self.witness is None:
            raise ValueError("a refutation needs a witness")

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED


@dataclass(frozen=True)
class TypeGame:
    """Symmetric game over types: ``payoff[i][j]`` is the match fitness of
    type ``i`` against type ``j`` minus the cognitive cost of type ``i``."""

    types: tuple[CognitiveType, ...]
    payoff: tuple[tuple[Number, ...], ...]

    @property
    def size(self) -> int:
        return len(self.types)


def type_game_for(env: Environment, types: Sequence[CognitiveType], policy: BehaviorPolicy) -> TypeGame:
    rows = [
        [pair_fitness(env, policy, a, b) - env.k(a.level) for b in types]
        for a in types
    ]
    return TypeGame(tuple(types), freeze(rows))


def build_type_game(config: Configuration) -> TypeGame:
    return type_game_for(config.env, config.types, config.policy)


def _payoff_matrix(game) -> tuple[tuple[Number, ...], ...]:
    if isinstance(game, (TypeGame, SymmetricGame)):
        return game.payoff
    return freeze(game)


# --------------------------------------------------------------------------
# Quadratic-form stability tests
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FaceAnalysis:
    exact: bool
    payoffs: tuple[Number, ...]
    value: Number
    gain: Number
    best: tuple[int, ...]
    support: tuple[int, ...]
    restricted: tuple[tuple[Number, ...], ...] = field(default=())


def _analyse(b, x, tol) -> FaceAnalysis:
    exact = all(all_exact(r) for r in b) and all_exact(x)
    bx = matvec(b, x)
    v = dot(x, bx)
    gain = max(bx) - v
    t = 0 if exact else tol
    best = tuple(i for i, p in enumerate(bx) if p >= max(bx) - t)
    supp = tuple(i for i, w in enumerate(x) if w > (0 if exact else 1e-12))
    restricted = ()
    if len(best) > 1:
        s0 = best[0]
        half = Fraction(1, 2) if exact else 0.5
        sym = [[half * (b[i][j] + b[j][i]) for j in range(len(b))] for i in range(len(b))]
        dirs = [[(1 if k == s else 0) - (1 if k == s0 else 0) for k in range(len(b))] for s in best[1:]]
        restricted = freeze([[bilinear(d1, sym, d2) for d2 in dirs] for d1 in dirs])
    return FaceAnalysis(exact, tuple(bx), v, gain, best, supp, restricted)


def _quad(b, z) -> Number:
    return bilinear(z, b, z)


def _lift(fa: FaceAnalysis, coeffs, n) -> list[Number]:
    """Map coordinates in the ``e_s - e_{s0}`` basis back to a full vector."""
    s0 = fa.best[0]
    z = [0 * coeffs[0]] * n
    for c, s in zip(coeffs, fa.best[1:]):
        z[s] += c
        z[s0] -= c
    return z


def _in_cone(fa: FaceAnalysis, z, tol) -> bool:
    outside = set(fa.best) - set(fa.support)
    return all(z[a] >= (0 if fa.exact else -tol) for a in outside)


def _rationalize(z, exact):
    if not exact:
        return [float(v) for v in z]
    return [Fraction(float(v)).limit_denominator(10**6) for v in z]


def _eigen_witness(fa: FaceAnalysis, b, n, sign, tol):
    """Direction in the face span with ``sign * z'Bz`` maximal (float eigen)."""
    q = as_array(fa.restricted)
    w, vecs = np.linalg.eigh(sign * q)
    for idx in np.argsort(-w):
        for s in (1, -1):
            z = _lift(fa, _rationalize(s * vecs[:, idx], fa.exact), n)
            if _in_cone(fa, z, tol):
                return z
    return None


def _sample_face(fa: FaceAnalysis, b, x, samples, seed, test):
    rng = np.random.default_rng(seed)
    bb = as_array(b)
    xf = np.array([float(v) for v in x])
    idx = list(fa.best)
    draws = rng.dirichlet(np.ones(len(idx)), size=samples)
    for row in draws:
        y = np.zeros(len(x))
        y[idx] = row
        z = y - xf
        if test(float(z @ bb @ z)):
            y_exact = _rationalize(y, fa.exact)
            total = sum(y_exact)
            y_exact = [v / total for v in y_exact]
            return [yi - xi for yi, xi in zip(y_exact, x)]
    return None


def _witness(kind, z=None, mutant=None, value=None, x=None):
    w = {"kind": kind}
    if z is not None:
        w["direction"] = tuple(z)
        if x is not None:
            w["mutant"] = tuple(mutant_from_direction(x, z))
    if mutant is not None:
        w["mutant"] = mutant
    if value is not None:
        w["value"] = value
    return w


def mutant_from_direction(x, z):
    """Largest step ``y = x + t z`` (``t <= 1``) that stays in the simplex."""
    t = 1
    for xi, zi in zip(x, z):
        if zi < 0:
            t = min(t, xi / -zi)
    return [xi + t * zi for xi, zi in zip(x, z)]


def _nash_stage(fa: FaceAnalysis, tol: float):
    t = 0 if fa.exact else tol
    if fa.gain > t:
        a = max(range(len(fa.payoffs)), key=lambda i: fa.payoffs[i])
        cond = Condition("symmetric Nash", False, fa.gain, "a pure deviation earns more")
        m = len(fa.payoffs)
        mutant = tuple(1 if i == a else 0 for i in range(m))
        return StabilityVerdict(REFUTED, _witness("better reply", mutant=mutant, value=fa.gain), (cond,))
    return None


def is_nss(game, x, samples: int = 10_000, tol: float = FLOAT_TOL, seed: int = 0) -> StabilityVerdict:
    """Neutral stability of ``x`` in a symmetric matrix game.

    ``x`` must be a symmetric Nash equilibrium and ``z'Bz <= 0`` must hold
    for every direction ``z = y - x`` with ``y`` in the face spanned by the
    pure best replies to ``x``.  Negative semidefiniteness on the face span
    certifies; a positive face direction refutes.
    """
    b = _payoff_matrix(game)
    n = len(b)
    x = as_strategy(x, n, all(all_exact(r) for r in b)).weights
    fa = _analyse(b, x, tol)
    conds = [Condition("symmetric Nash", fa.gain <= (0 if fa.exact else tol), fa.gain)]
    early = _nash_stage(fa, tol)
    if early:
        return early
    if len(fa.best) == 1:
        conds.append(Condition("best-reply face is a vertex", True, 0))
        return StabilityVerdict(CERTIFIED, None, tuple(conds))
    neg = [[-v for v in r] for r in fa.restricted]
    psd, _ = psd_pivots(neg, tol)
    conds.append(Condition("negative semidefinite on face span", psd))
    if psd:
        return StabilityVerdict(CERTIFIED, None, tuple(conds))
    t = 0 if fa.exact else tol
    for a in fa.best:
        z = [(1 if i == a else 0) - x[i] for i in range(n)]
        val = _quad(b, z)
        if val > t:
            conds.append(Condition("face vertex direction", False, val))
            return StabilityVerdict(REFUTED, _witness("positive direction", z, value=val, x=x), tuple(conds))
    if set(fa.best) <= set(fa.support):
        z = _eigen_witness(fa, b, n, 1, tol)
        if z is not None:
            val = _quad(b, z)
            if val > t:
                conds.append(Condition("interior face direction", False, val))
                return StabilityVerdict(REFUTED, _witness("positive direction", z, value=val, x=x), tuple(conds))
    z = _eigen_witness(fa, b, n, 1, tol)
    if z is not None and _quad(b, z) > t:
        val = _quad(b, z)
        conds.append(Condition("cone direction", False, val))
        return StabilityVerdict(REFUTED, _witness("positive direction", z, value=val, x=x), tuple(conds))
    z = _sample_face(fa, b, x, samples, seed, lambda v: v > tol)
    if z is not None and _quad(b, z) > t:
        val = _quad(b, z)
        conds.append(Condition("sampled face direction", False, val))
        return StabilityVerdict(REFUTED, _witness("positive direction", z, value=val, x=x), tuple(conds))
    conds.append(Condition("sampled face directions", True, samples))
    return StabilityVerdict(INCONCLUSIVE, None, tuple(conds), "no positive direction found")


def is_ess(game, x, samples: int = 10_000, tol: float = FLOAT_TOL, seed: int = 0) -> StabilityVerdict:
    """Evolutionary stability: as ``is_nss`` with ``z'Bz < 0`` for every
    nonzero face direction.  A pure strict Nash equilibrium is certified
    immediately; any zero or positive face direction refutes."""
    b = _payoff_matrix(game)
    n = len(b)
    x = as_strategy(x, n, all(all_exact(r) for r in b)).weights
    fa = _analyse(b, x, tol)
    conds = [Condition("symmetric Nash", fa.gain <= (0 if fa.exact else tol), fa.gain)]
    early = _nash_stage(fa, tol)
    if early:
        return early
    if len(fa.best) == 1:
        conds.append(Condition("strict Nash", True, 0))
        return StabilityVerdict(CERTIFIED, None, tuple(conds))
    neg = [[-v for v in r] for r in fa.restricted]
    psd, pd = psd_pivots(neg, tol)
    conds.append(Condition("negative definite on face span", pd))
    if pd:
        return StabilityVerdict(CERTIFIED, None, tuple(conds))
    t = 0 if fa.exact else tol
    for a in fa.best:
        z = [(1 if i == a else 0) - x[i] for i in range(n)]
        if all(v == 0 for v in z):
            continue
        val = _quad(b, z)
        if val >= -t:
            conds.append(Condition("face vertex direction", False, val))
            return StabilityVerdict(REFUTED, _witness("non-negative direction", z, value=val, x=x), tuple(conds))
    if psd:
        # singular: look for a kernel direction inside the cone
        for k in nullspace(fa.restricted if fa.exact else _round(fa.restricted, tol), 1e-9):
            for s in (1, -1):
                z = _lift(fa, [s * c for c in k], n)
                if _in_cone(fa, z, tol) and any(v != 0 for v in z):
                    val = _quad(b, z)
                    if val >= -t:
                        conds.append(Condition("kernel direction", False, val))
                        return StabilityVerdict(
                            REFUTED, _witness("non-negative direction", z, value=val, x=x), tuple(conds)
                        )
    z = _eigen_witness(fa, b, n, 1, tol)
    if z is not None and any(v != 0 for v in z) and _quad(b, z) >= -t:
        val = _quad(b, z)
        conds.append(Condition("cone direction", False, val))
        return StabilityVerdict(REFUTED, _witness("non-negative direction", z, value=val, x=x), tuple(conds))
    z = _sample_face(fa, b, x, samples, seed, lambda v: v > tol)
    if z is not None and _quad(b, z) > t:
        val = _quad(b, z)
        conds.append(Condition("sampled face direction", False, val))
        return StabilityVerdict(REFUTED, _witness("positive direction", z, value=val, x=x), tuple(conds))
    conds.append(Condition("sampled face directions", True, samples))
    return StabilityVerdict(INCONCLUSIVE, None, tuple(conds), "no non-negative direction found")


def _round(m, tol):
    return [[0.0 if abs(v) <= tol else v for v in r] for r in m]


# --------------------------------------------------------------------------
# Definitional oracle
# --------------------------------------------------------------------------

EPSILONS = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000))


def invasion_margin(game, x, y, eps) -> Number:
    """Mutant minus incumbent payoff in the population ``(1-eps) x + eps y``."""
    b = _payoff_matrix(game)
    pop = [(1 - eps) * xi + eps * yi for xi, yi in zip(x, y)]
    by = matvec(b, pop)
    return dot(y, by) - dot(x, by)


def epsilon_sweep(game, x, mutants=None, epsilons=EPSILONS, tol: float = FLOAT_TOL) -> dict:
    """Definition-level check with explicit mutant shares.

    Every pure mutant (plus any supplied mutants) is injected at each share
    in ``epsilons``.  Stability is about sufficiently small shares, so the
    smallest share decides: a mutant violates neutral stability if it
    strictly outperforms there, and evolutionary stability if it does at
    least as well there.  ``barriers`` maps each violator to the largest
    share below which it wins at every listed share.
    """
    b = _payoff_matrix(game)
    n = len(b)
    exact = all(all_exact(r) for r in b)
    x = as_strategy(x, n, exact).weights
    one = Fraction(1) if exact else 1.0
    pool = [tuple(one if i == j else 0 * one for i in range(n)) for j in range(n)]
    for y in mutants or ():
        pool.append(tuple(y))
    t = 0 if exact and all(all_exact(y) for y in pool) and all_exact(x) else tol
    eps = sorted((e if exact else float(e) for e in epsilons), reverse=True)
    nss_bad, ess_bad, barriers = [], [], {}
    for y in pool:
        if all(abs(float(a) - float(c)) <= 1e-15 for a, c in zip(x, y)) and (
            not exact or tuple(x) == tuple(y)
        ):
            continue
        diffs = [invasion_margin(b, x, y, e) for e in eps]
        if diffs[-1] > t:
            nss_bad.append(y)
        if diffs[-1] >= -t:
            ess_bad.append(y)
            k = len(diffs) - 1
            while k > 0 and diffs[k - 1] >= -t:
                k -= 1
            barriers[y] = eps[k]
    return {"nss": not nss_bad, "ess": not ess_bad, "nss_violators": nss_bad, "ess_violators": ess_bad,
            "barriers": barriers}
