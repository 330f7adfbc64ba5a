"""Replicator dynamics on type games.

The integrator (compiled when available, see ``kernels``) clips round-off
negatives and renormalises after every accepted step.  A zero share has a
zero derivative in every stage, so faces of the simplex are invariant
exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .game import SymmetricGame
from .preferences import PreconditionError
from .stability.typegame import TypeGame

SIMPLEX_TOL = 1e-9


def _matrix_and_labels(game):
    if isinstance(game, TypeGame):
        return np.array(game.payoff, dtype=float), [t.name() for t in game.types]
    if isinstance(game, SymmetricGame):
        return np.array(game.payoff, dtype=float), list(game.actions)
    b = np.array(game, dtype=float)
    return b, [f"T{i + 1}" for i in range(len(b))]


def _check_simplex(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise PreconditionError(f"state must have {n} entries, got shape {x.shape}")
    if np.any(x < -SIMPLEX_TOL) or abs(x.sum() - 1.0) > SIMPLEX_TOL:
        raise PreconditionError(f"state {x.tolist()} is not on the simplex")
    return np.clip(x, 0.0, None)


@dataclass(frozen=True)
class TrajectoryRecord:
    times: np.ndarray
    states: np.ndarray
    fitness_series: np.ndarray
    labels: tuple[str, ...] = ()
    policy_note: str = ""

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def simplex_drift(self) -> float:
        return float(np.max(np.abs(self.states.sum(axis=1) - 1.0)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time"] + [f"x_{lab}" for lab in self.labels] + [f"fitness_{lab}" for lab in self.labels])
        for t, x, f in zip(self.times, self.states, self.fitness_series):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in x] + [repr(float(v)) for v in f])
        return buf.getvalue()


def replicate(game, x0, horizon: float, rtol: float = 1e-9, atol: float = 1e-12,
              policy_note: str = "") -> TrajectoryRecord:
    """Integrate ``x_i' = x_i ((Bx)_i - x'Bx)`` from ``x0`` up to ``horizon``.

    ``rtol`` and ``atol`` control the adaptive step.  ``policy_note``
    records the focal policy that produced the type game.
    """
    b, labels = _matrix_and_labels(game)
    n = len(b)
    x0 = _check_simplex(x0, n)
    if horizon < 0:
        raise PreconditionError("horizon must be nonnegative")
    times, states = kernels.integrate(b, x0, float(horizon), rtol, atol)
    fitness = states @ b.T
    return TrajectoryRecord(times, states, fitness, tuple(labels), policy_note)


@dataclass(frozen=True)
class ProbeResult:
    radius: float
    direction: tuple[float, ...]
    max_excursion: float
    terminal_distance: float
    escaped: bool


@dataclass(frozen=True)
class ProbeReport:
    rest_point: tuple[float, ...]
    horizon: float
    results: tuple[ProbeResult, ...] = field(default=())

    @property
    def escaped(self) -> bool:
        return any(r.escaped for r in self.results)

    def escapes(self, radius=None):
        return [r for r in self.results if r.escaped and (radius is None or r.radius == radius)]

    def classification(self, radius) -> str:
        return "escape" if self.escapes(radius) else "no-escape within horizon"


def rest_point_spread(b: np.ndarray, x: np.ndarray) -> float:
    """Largest payoff difference among types in the support of ``x``."""
    f = b @ x
    sup = f[x > 0]
    return float(sup.max() - sup.min()) if len(sup) else 0.0


def _directions(x, r, rng, samples):
    n = len(x)
    out = []
    for j in range(n):
        for k in range(n):
            if j != k and x[k] >= r:
                d = np.zeros(n)
                d[j], d[k] = 1.0, -1.0
                out.append(d / np.linalg.norm(d))
    for j in range(n):
        d = -x.copy()
        d[j] += 1.0
        nd = np.linalg.norm(d)
        if nd > 0:
            out.append(d / nd)
    for _ in range(samples):
        d = rng.dirichlet(np.ones(n)) - x
        nd = np.linalg.norm(d)
        if nd > 0:
            out.append(d / nd)
    return out


def stability_probe(game, x_star, radii=(1e-3, 1e-2), horizon: float = 100.0, samples: int = 8,
                    seed: int = 0, escape_factor: float = 10.0, rtol: float = 1e-9,
                    rest_tol: float = 1e-9) -> ProbeReport:
    """Perturb a rest point by each radius along pairwise, vertex and random
    directions and integrate.  A run escapes when its terminal distance
    exceeds ``escape_factor`` times the radius."""
    b, _ = _matrix_and_labels(game)
    n = len(b)
    x = _check_simplex(x_star, n)
    spread = rest_point_spread(b, x)
    if spread > rest_tol:
        raise PreconditionError(f"state is not a rest point: payoffs on the support differ by {spread}")
    rng = np.random.default_rng(seed)
    results = []
    if n == 1:
        return ProbeReport(tuple(x.tolist()), horizon, tuple(
            ProbeResult(r, (0.0,), 0.0, 0.0, False) for r in radii))
    for r in radii:
        for d in _directions(x, r, rng, samples):
            # largest feasible step along d, capped at r
            neg = d < 0
            cap = np.min(x[neg] / -d[neg]) if neg.any() else r
            step = min(r, cap)
            if step <= 0:
                continue
            y0 = x + step * d
            y0 = np.clip(y0, 0.0, None)
            y0 /= y0.sum()
            rec = replicate(b, y0, horizon, rtol=rtol)
            dist = np.linalg.norm(rec.states - x, axis=1)
            term = float(dist[-1])
            results.append(ProbeResult(r, tuple(d.tolist()), float(dist.max()), term, term > escape_factor * r))
    return ProbeReport(tuple(x.tolist()), horizon, tuple(results))
