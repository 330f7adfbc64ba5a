"""Pure-Python Dormand-Prince 5(4) integrator for the replicator equation.

Mirrors the compiled kernel in ``_replicator.pyx`` line for line; used when
the extension is unavailable or ``COEVOLVE_PURE_PYTHON=1`` is set.
"""

import numpy as np

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def rhs(b, x):
    fx = b @ x
    return x * (fx - x @ fx)


def project(y):
    """Clip negative round-off and renormalise onto the simplex."""
    y = np.where(y > 0.0, y, 0.0)
    return y / y.sum()


def integrate(b, x0, t_end, rtol=1e-9, atol=1e-12, h0=1e-2, max_steps=1_000_000):
    """Integrate ``x' = x * (Bx - x'Bx)`` from 0 to ``t_end``.

    Returns ``(times, states)`` at every accepted step.
    """
    b = np.ascontiguousarray(b, dtype=np.float64)
    x = project(np.array(x0, dtype=np.float64))
    t = 0.0
    h = min(h0, t_end) if t_end > 0 else 0.0
    times = [0.0]
    states = [x.copy()]
    k1 = rhs(b, x)
    steps = 0
    while t < t_end and steps < max_steps:
        steps += 1
        if t + h > t_end:
            h = t_end - t
        k2 = rhs(b, x + h * A21 * k1)
        k3 = rhs(b, x + h * (A31 * k1 + A32 * k2))
        k4 = rhs(b, x + h * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = rhs(b, x + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        k6 = rhs(b, x + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
        y = x + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = rhs(b, y)
        err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        scale = atol + rtol * np.maximum(np.abs(x), np.abs(y))
        err = float(np.max(np.abs(err_vec) / scale)) if len(x) else 0.0
        if err <= 1.0:
            t = t_end if t + h >= t_end else t + h
            x = project(y)
            k1 = rhs(b, x)
            times.append(t)
            states.append(x.copy())
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        h *= fac
    return np.array(times), np.array(states)
