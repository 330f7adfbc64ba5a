# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Dormand-Prince 5(4) integrator for the replicator equation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()

cdef double C_A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920
cdef double E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40


cdef void _rhs(double[:, ::1] b, double[::1] x, double[::1] out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s, avg = 0.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += b[i, j] * x[j]
        out[i] = s
        avg += x[i] * s
    for i in range(n):
        out[i] = x[i] * (out[i] - avg)


cdef void _project(double[::1] y, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(n):
        if not (y[i] > 0.0):
            y[i] = 0.0
        s += y[i]
    for i in range(n):
        y[i] = y[i] / s


def rhs(b, x):
    cdef double[:, ::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] xx = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(xx.shape[0])
    _rhs(bb, xx, out, xx.shape[0])
    return out


def project(y):
    out = np.array(y, dtype=np.float64)
    _project(out, out.shape[0])
    return out


def integrate(b, x0, double t_end, double rtol=1e-9, double atol=1e-12, double h0=1e-2,
              long max_steps=1_000_000):
    """Integrate ``x' = x * (Bx - x'Bx)`` from 0 to ``t_end``.

    Returns ``(times, states)`` at every accepted step.
    """
    cdef double[:, ::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = bb.shape[0], i
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    _project(x, n)
    cdef double[::1] k1 = np.empty(n), k2 = np.empty(n), k3 = np.empty(n)
    cdef double[::1] k4 = np.empty(n), k5 = np.empty(n), k6 = np.empty(n), k7 = np.empty(n)
    cdef double[::1] tmp = np.empty(n), y = np.empty(n)
    cdef double t = 0.0, h, err, e, sc, fac, ax, ay
    cdef long steps = 0
    h = h0 if h0 < t_end else t_end
    if t_end <= 0:
        h = 0.0
    times = [0.0]
    states = [np.asarray(x).copy()]
    _rhs(bb, x, k1, n)
    while t < t_end and steps < max_steps:
        steps += 1
        if t + h > t_end:
            h = t_end - t
        for i in range(n):
            tmp[i] = x[i] + h * C_A21 * k1[i]
        _rhs(bb, tmp, k2, n)
        for i in range(n):
            tmp[i] = x[i] + h * (A31 * k1[i] + A32 * k2[i])
        _rhs(bb, tmp, k3, n)
        for i in range(n):
            tmp[i] = x[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _rhs(bb, tmp, k4, n)
        for i in range(n):
            tmp[i] = x[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        _rhs(bb, tmp, k5, n)
        for i in range(n):
            tmp[i] = x[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
        _rhs(bb, tmp, k6, n)
        for i in range(n):
            y[i] = x[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
        _rhs(bb, y, k7, n)
        err = 0.0
        for i in range(n):
            e = fabs(h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]))
            ax = fabs(x[i])
            ay = fabs(y[i])
            sc = atol + rtol * (ax if ax > ay else ay)
            if e / sc > err:
                err = e / sc
        if err <= 1.0:
            t = t_end if t + h >= t_end else t + h
            for i in range(n):
                x[i] = y[i]
            _project(x, n)
            _rhs(bb, x, k1, n)
            times.append(t)
            states.append(np.asarray(x).copy())
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                fac = 5.0 if fac > 5.0 else (0.2 if fac < 0.2 else fac)
        else:
            fac = 0.9 * pow(err, -0.2)
            fac = 0.2 if fac < 0.2 else fac
        h *= fac
    return np.array(times), np.array(states)
