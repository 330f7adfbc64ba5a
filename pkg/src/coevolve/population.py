"""Configurations: a type distribution together with a behaviour policy,
plus validation, match fitness, expected fitness and balance."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .game import MixedStrategy, as_strategy
from .numeric import FLOAT_TOL, Number, all_exact, bilinear, dot, is_exact, solve, to_mode
from .preferences import (
    CognitiveType,
    Environment,
    PreconditionError,
    deception_equilibria,
    deception_shortfall,
    nash_equilibria,
    nash_violation,
)


class ConfigurationError(ValueError):
    """Structurally invalid configuration (as opposed to a failed validation)."""


Pair = tuple[CognitiveType, CognitiveType]


@dataclass(frozen=True)
class TypeDistribution:
    types: tuple[CognitiveType, ...]
    frequencies: tuple[Number, ...]

    def __post_init__(self):
        types = tuple(self.types)
        freqs = tuple(self.frequencies)
        if not types or len(types) != len(freqs):
            raise ConfigurationError("types and frequencies must be nonempty parallel lists")
        if len(set(types)) != len(types):
            raise ConfigurationError("support types must be pairwise distinct")
        exact = all_exact(freqs)
        freqs = tuple(to_mode(f, exact) for f in freqs)
        if any(not f > 0 for f in freqs):
            raise ConfigurationError("frequencies must be positive")
        total = sum(freqs)
        if (exact and total != 1) or (not exact and abs(total - 1) > 1e-12):
            raise ConfigurationError(f"frequencies sum to {total}, not 1")
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "frequencies", freqs)

    @classmethod
    def single(cls, theta: CognitiveType) -> "TypeDistribution":
        return cls((theta,), (Fraction(1),))

    def __len__(self) -> int:
        return len(self.types)

    def index(self, theta: CognitiveType) -> int:
        try:
            return self.types.index(theta)
        except ValueError:
            raise PreconditionError(f"type {theta.name()} is not in the support") from None

    def freq(self, theta: CognitiveType) -> Number:
        return self.frequencies[self.index(theta)]

    @property
    def top_level(self) -> int:
        return max(t.level for t in self.types)


@dataclass(frozen=True)
class BehaviorPolicy:
    """``nash[(a, b)]`` is what ``a`` plays against ``b`` when nobody is
    deceived; ``deception[(a, b)]`` is what ``a`` plays against ``b`` when
    the higher of the two deceives the lower."""

    nash: Mapping[Pair, MixedStrategy] = field(default_factory=dict)
    deception: Mapping[Pair, MixedStrategy] = field(default_factory=dict)
    auto: frozenset = frozenset()

    def extended(self, nash=None, deception=None, auto=()) -> "BehaviorPolicy":
        n = dict(self.nash)
        n.update(nash or {})
        d = dict(self.deception)
        d.update(deception or {})
        return BehaviorPolicy(n, d, frozenset(self.auto) | frozenset(auto))

    def restricted(self, types: Sequence[CognitiveType]) -> "BehaviorPolicy":
        keep = set(types)
        names = {t.name() for t in types}
        return BehaviorPolicy(
            {k: v for k, v in self.nash.items() if k[0] in keep and k[1] in keep},
            {k: v for k, v in self.deception.items() if k[0] in keep and k[1] in keep},
            frozenset(a for a in self.auto if a[1] in names and a[2] in names),
        )


def needs_nash(env: Environment, a: CognitiveType, b: CognitiveType) -> bool:
    return env.q(a.level, b.level) + env.q(b.level, a.level) < 1


def needs_deception(a: CognitiveType, b: CognitiveType) -> bool:
    return a.level != b.level


def symmetric_nash(u, tol: float = FLOAT_TOL) -> list[MixedStrategy]:
    """Extreme symmetric Nash equilibria ``(x, x)`` of the game where both
    players have utility ``u``."""
    return [ne.sigma for ne in nash_equilibria(u, u, tol) if ne.sigma == ne.sigma_prime] or _sym_support(u)


def _sym_support(u) -> list[MixedStrategy]:
    # fallback: support enumeration for symmetric equilibria
    mat = u.matrix if hasattr(u, "matrix") else u
    m = len(mat)
    exact = all(all_exact(r) for r in mat)
    one = Fraction(1) if exact else 1.0
    for size in range(1, m + 1):
        for supp in combinations(range(m), size):
            # unknowns x_s (s in supp) and v: (Ux)_i = v on supp, sum x = 1
            rows = [[mat[i][s] for s in supp] + [-one] for i in supp]
            rows.append([one] * size + [0 * one])
            rhs = [0 * one] * size + [one]
            sol = solve(rows, rhs)
            if sol is None or any(w < 0 for w in sol[:-1]):
                continue
            x = [0 * one] * m
            for s, w in zip(supp, sol[:-1]):
                x[s] = w
            vals = [dot(mat[i], x) for i in range(m)]
            if max(vals) <= sol[-1] + (0 if exact else FLOAT_TOL):
                return [MixedStrategy(tuple(x))]
    return []


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    pair: tuple[str, str]
    condition: str
    magnitude: Number

    def __str__(self):
        return f"{self.pair[0]} vs {self.pair[1]}: {self.condition} (by {self.magnitude})"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]
    auto: tuple[tuple[str, str, str], ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class Configuration:
    env: Environment
    distribution: TypeDistribution
    policy: BehaviorPolicy

    @property
    def types(self) -> tuple[CognitiveType, ...]:
        return self.distribution.types

    @property
    def frequencies(self) -> tuple[Number, ...]:
        return self.distribution.frequencies

    @property
    def m(self) -> int:
        return self.env.game.m

    @property
    def exact(self) -> bool:
        return self.env.exact and all_exact(self.frequencies)

    def nash_play(self, a: CognitiveType, b: CognitiveType) -> MixedStrategy:
        try:
            return self.policy.nash[(a, b)]
        except KeyError:
            raise PreconditionError(f"no Nash play for {a.name()} against {b.name()}") from None

    def deception_play(self, a: CognitiveType, b: CognitiveType) -> MixedStrategy:
        try:
            return self.policy.deception[(a, b)]
        except KeyError:
            raise PreconditionError(f"no deception play for {a.name()} against {b.name()}") from None


def complete_policy(
    env: Environment,
    types: Sequence[CognitiveType],
    policy: BehaviorPolicy | None = None,
    tol: float = FLOAT_TOL,
) -> BehaviorPolicy:
    """Fill every missing policy entry with the first enumerated equilibrium.

    Nash play uses the first equilibrium (by support size, then
    lexicographic) consistent with any entry already given for the pair;
    deception play uses the first optimal deception profile.  Filled entries
    are recorded in ``policy.auto``.
    """
    policy = policy or BehaviorPolicy()
    nash = dict(policy.nash)
    dec = dict(policy.deception)
    auto = set(policy.auto)
    m = env.game.m
    exact = env.exact
    for i, a in enumerate(types):
        for b in types[i:]:
            if needs_nash(env, a, b) and ((a, b) not in nash or (b, a) not in nash):
                if a == b:
                    pick = symmetric_nash(a.utility.against(a), tol)
                    if pick:
                        nash[(a, a)] = pick[0]
                        auto.add(("nash", a.name(), a.name()))
                else:
                    ua, ub = a.utility.against(b), b.utility.against(a)
                    for ne in nash_equilibria(ua, ub, tol):
                        if (a, b) in nash and nash[(a, b)] != ne.sigma:
                            continue
                        if (b, a) in nash and nash[(b, a)] != ne.sigma_prime:
                            continue
                        if (a, b) not in nash:
                            nash[(a, b)] = ne.sigma
                            auto.add(("nash", a.name(), b.name()))
                        if (b, a) not in nash:
                            nash[(b, a)] = ne.sigma_prime
                            auto.add(("nash", b.name(), a.name()))
                        break
            if needs_deception(a, b) and ((a, b) not in dec or (b, a) not in dec):
                hi, lo = (a, b) if a.level > b.level else (b, a)
                de = deception_equilibria(env, hi, lo, tol)
                for s, t in de.profiles:
                    if (hi, lo) in dec and dec[(hi, lo)] != MixedStrategy.pure(m, s, exact):
                        continue
                    if (lo, hi) in dec and dec[(lo, hi)] != MixedStrategy.pure(m, t, exact):
                        continue
                    if (hi, lo) not in dec:
                        dec[(hi, lo)] = MixedStrategy.pure(m, s, exact)
                        auto.add(("deception", hi.name(), lo.name()))
                    if (lo, hi) not in dec:
                        dec[(lo, hi)] = MixedStrategy.pure(m, t, exact)
                        auto.add(("deception", lo.name(), hi.name()))
                    break
    return BehaviorPolicy(nash, dec, frozenset(auto))


def make_configuration(
    env: Environment,
    types: Sequence[CognitiveType],
    frequencies: Sequence[Number],
    nash: Mapping | None = None,
    deception: Mapping | None = None,
    auto_complete: bool = True,
) -> Configuration:
    """Build a configuration; policy entries may be pure action indices,
    action labels or weight vectors."""
    m = env.game.m
    exact = env.exact

    def coerce(s):
        if isinstance(s, str):
            s = env.game.index(s)
        return as_strategy(s, m, exact)

    pol = BehaviorPolicy(
        {k: coerce(v) for k, v in (nash or {}).items()},
        {k: coerce(v) for k, v in (deception or {}).items()},
    )
    dist = TypeDistribution(tuple(types), tuple(frequencies))
    if auto_complete:
        pol = complete_policy(env, dist.types, pol)
    return Configuration(env, dist, pol)


def validate(config: Configuration, tol: float = FLOAT_TOL) -> ValidationReport:
    """Check every policy requirement and list each violated pair."""
    return validate_policy(config.env, config.types, config.policy, tol)


def validate_policy(
    env: Environment, types: Sequence[CognitiveType], policy: BehaviorPolicy, tol: float = FLOAT_TOL
) -> ValidationReport:
    out: list[Violation] = []
    for i, a in enumerate(types):
        for b in types[i:]:
            out.extend(pair_violations(env, policy, a, b, tol))
    return ValidationReport(tuple(out), tuple(sorted(policy.auto)))


def pair_violations(
    env: Environment, policy: BehaviorPolicy, a: CognitiveType, b: CognitiveType, tol: float = FLOAT_TOL
) -> list[Violation]:
    """Policy requirements violated by the match between ``a`` and ``b``."""
    out: list[Violation] = []
    m = env.game.m
    names = (a.name(), b.name())
    if needs_nash(env, a, b):
        sa, sb = policy.nash.get((a, b)), policy.nash.get((b, a))
        if sa is None or sb is None:
            out.append(Violation(names, "missing Nash play", 1))
        elif len(sa) != m or len(sb) != m:
            out.append(Violation(names, "Nash play has wrong dimension", 1))
        else:
            v = nash_violation(a.utility.against(b), b.utility.against(a), sa, sb)
            if v > (0 if is_exact(v) else tol):
                out.append(Violation(names, "Nash play is not a Nash equilibrium", v))
    if needs_deception(a, b):
        hi, lo = (a, b) if a.level > b.level else (b, a)
        sh, sl = policy.deception.get((hi, lo)), policy.deception.get((lo, hi))
        dn = (hi.name(), lo.name())
        if sh is None or sl is None:
            out.append(Violation(dn, "missing deception play", 1))
            return out
        feasible, short = deception_shortfall(env, hi, lo, sh, sl, tol)
        if not feasible:
            out.append(Violation(dn, "induced play is dominated for the deceived type", 1))
        if short > (0 if is_exact(short) else tol):
            out.append(Violation(dn, "deception play is not subjectively optimal", short))
    return out


# --------------------------------------------------------------------------
# Fitness
# --------------------------------------------------------------------------

def _pi(env: Environment, x: MixedStrategy, y: MixedStrategy) -> Number:
    return bilinear(x.weights, env.game.payoff, y.weights)


def pair_fitness(env: Environment, policy: BehaviorPolicy, a: CognitiveType, b: CognitiveType) -> Number:
    """Fitness of ``a`` in a match against ``b`` under ``policy``."""
    qs = env.q(a.level, b.level) + env.q(b.level, a.level)
    total = qs - qs
    if qs > 0:
        total += qs * _pi(env, policy.deception[(a, b)], policy.deception[(b, a)])
    if qs < 1:
        total += (1 - qs) * _pi(env, policy.nash[(a, b)], policy.nash[(b, a)])
    return total


def match_fitness(config: Configuration, theta: CognitiveType, theta_prime: CognitiveType) -> Number:
    config.distribution.index(theta)
    config.distribution.index(theta_prime)
    return pair_fitness(config.env, config.policy, theta, theta_prime)


def expected_fitness(config: Configuration, theta: CognitiveType) -> Number:
    config.distribution.index(theta)
    total = sum(
        (f * match_fitness(config, theta, t) for t, f in zip(config.types, config.frequencies)),
        start=0 * config.frequencies[0],
    )
    return total - config.env.k(theta.level)


def fitness_profile(config: Configuration) -> tuple[Number, ...]:
    return tuple(expected_fitness(config, t) for t in config.types)


def average_fitness(config: Configuration) -> Number:
    return dot(config.frequencies, fitness_profile(config))


def is_balanced(config: Configuration, tol: float = 1e-12) -> bool:
    fits = fitness_profile(config)
    avg = dot(config.frequencies, fits)
    if all(is_exact(f) for f in fits):
        return all(f == avg for f in fits)
    return all(abs(f - avg) <= tol for f in fits)
