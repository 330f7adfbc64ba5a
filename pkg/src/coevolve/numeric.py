"""Scalar and small dense linear-algebra helpers that work on either exact
``Fraction`` values or ``float`` values.

Everything in this package is desk scale (a handful of actions or types), so
these routines favour exactness over speed: the same code path runs on
rationals, where comparisons are exact, and on floats, where every
comparison goes through an explicit tolerance.
"""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

Number = Union[Fraction, float, int]
Matrix = tuple[tuple[Number, ...], ...]

FLOAT_TOL = 1e-9

_LITERAL = re.compile(r"^\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?\s*$")
_RATIO = re.compile(r"^\s*[-+]?\d+\s*/\s*[-+]?\d+\s*$")


class NumericError(ValueError):
    """Raised for malformed numeric input."""


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def all_exact(values: Iterable) -> bool:
    return all(is_exact(v) for v in values)


def parse_number(text, exact: bool = True) -> Number:
    """Parse ``-1``, ``3/2``, ``0.25`` or ``1e-3`` into a Fraction (or float)."""
    if isinstance(text, bool):
        raise NumericError(f"not a number: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text) if exact else float(text)
    if isinstance(text, float):
        if not np.isfinite(text):
            raise NumericError(f"non-finite value: {text!r}")
        return Fraction(Decimal(repr(text))) if exact else text
    if isinstance(text, Decimal):
        return Fraction(text) if exact else float(text)
    s = str(text).strip()
    if _RATIO.match(s):
        num, den = (int(p) for p in s.split("/"))
        if den == 0:
            raise NumericError(f"zero denominator in {s!r}")
        value = Fraction(num, den)
        return value if exact else float(value)
    if _LITERAL.match(s):
        try:
            value = Fraction(Decimal(s))
        except InvalidOperation as exc:  # pragma: no cover - regex guards this
            raise NumericError(f"not a number: {s!r}") from exc
        return value if exact else float(s)
    raise NumericError(f"not a number: {s!r}")


def to_mode(x: Number, exact: bool) -> Number:
    if exact:
        if isinstance(x, float):
            return Fraction(Decimal(repr(x)))
        return Fraction(x)
    return float(x)


def fmt(x: Number) -> str:
    """Canonical text form: exact values as ``p/q``, floats via ``repr``."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def to_json_number(x: Number):
    """JSON-friendly value: exact ints stay ints, other rationals become strings."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else fmt(x)
    if isinstance(x, int):
        return x
    return float(x)


def tol_for(*values: Number, tol: float = FLOAT_TOL) -> float:
    """Zero for all-exact inputs, ``tol`` otherwise."""
    return 0 if all(is_exact(v) for v in values) else tol


def gt(a: Number, b: Number, tol: float = FLOAT_TOL) -> bool:
    return a > b + tol_for(a, b, tol=tol)


def ge(a: Number, b: Number, tol: float = FLOAT_TOL) -> bool:
    return a >= b - tol_for(a, b, tol=tol)


def close(a: Number, b: Number, tol: float = FLOAT_TOL) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(float(a) - float(b)) <= tol


def is_zero(a: Number, tol: float = FLOAT_TOL) -> bool:
    return a == 0 if is_exact(a) else abs(a) <= tol


def dot(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return sum((a * b for a, b in zip(u, v)), start=0 * u[0] if u else 0)


def matvec(m: Sequence[Sequence[Number]], v: Sequence[Number]) -> list[Number]:
    return [dot(row, v) for row in m]


def vecmat(v: Sequence[Number], m: Sequence[Sequence[Number]]) -> list[Number]:
    cols = len(m[0])
    return [sum((v[i] * m[i][j] for i in range(len(v))), start=0 * v[0]) for j in range(cols)]


def bilinear(u: Sequence[Number], m: Sequence[Sequence[Number]], v: Sequence[Number]) -> Number:
    return dot(u, matvec(m, v))


def freeze(m: Iterable[Iterable[Number]]) -> Matrix:
    return tuple(tuple(row) for row in m)


def transpose(m: Sequence[Sequence[Number]]) -> Matrix:
    return tuple(zip(*m))


def as_array(m) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m], dtype=float)


# --------------------------------------------------------------------------
# Gaussian elimination
# --------------------------------------------------------------------------

def _pivot_row(a: list[list[Number]], col: int, start: int, exact: bool, tol: float):
    best, best_abs = None, 0.0
    for r in range(start, len(a)):
        v = a[r][col]
        if exact:
            if v != 0:
                return r
        elif abs(v) > max(best_abs, tol):
            best, best_abs = r, abs(v)
    return best


def rref(rows: Sequence[Sequence[Number]], tol: float = 1e-12) -> tuple[list[list[Number]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(r) for r in rows]
    if not a:
        return a, []
    exact = all(all_exact(r) for r in a)
    if exact:
        a = [[Fraction(x) for x in r] for r in a]
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(a):
            break
        p = _pivot_row(a, c, r, exact, tol)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(len(a)):
            if i != r and not (a[i][c] == 0):
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        if not exact:
            for i in range(len(a)):
                a[i] = [0.0 if abs(x) <= tol else x for x in a[i]]
        pivots.append(c)
        r += 1
    return a, pivots


def solve(m: Sequence[Sequence[Number]], b: Sequence[Number], tol: float = 1e-12):
    """Unique solution of ``m x = b`` or ``None`` if singular or inconsistent."""
    n = len(m[0])
    aug = [list(row) + [rhs] for row, rhs in zip(m, b)]
    red, piv = rref(aug, tol)
    if n in piv or len(piv) < n:
        return None
    x = [None] * n
    for row, c in zip(red, piv):
        x[c] = row[n]
    return x


def solve_affine(m: Sequence[Sequence[Number]], b: Sequence[Number], tol: float = 1e-12):
    """Particular solution and null-space basis of ``m x = b``; ``None`` if inconsistent."""
    n = len(m[0])
    aug = [list(row) + [rhs] for row, rhs in zip(m, b)]
    red, piv = rref(aug, tol)
    if n in piv:
        return None
    zero = 0 * b[0] if b else 0
    x = [zero] * n
    for row, c in zip(red, piv):
        x[c] = row[n]
    return x, nullspace(m, tol)


def nullspace(m: Sequence[Sequence[Number]], tol: float = 1e-12) -> list[list[Number]]:
    if not m:
        return []
    n = len(m[0])
    red, piv = rref(m, tol)
    exact = all(all_exact(r) for r in m)
    one = Fraction(1) if exact else 1.0
    zero = one - one
    basis = []
    for free in (c for c in range(n) if c not in piv):
        v = [zero] * n
        v[free] = one
        for row, c in zip(red, piv):
            v[c] = -row[free]
        basis.append(v)
    return basis


# --------------------------------------------------------------------------
# Semidefiniteness
# --------------------------------------------------------------------------

def psd_pivots(q: Sequence[Sequence[Number]], tol: float = 1e-10) -> tuple[bool, bool]:
    """Return ``(psd, pd)`` for a symmetric matrix.

    Exact matrices use symmetric Gaussian elimination with diagonal pivoting
    (a zero pivot forces its whole row to vanish); float matrices use
    eigenvalues with an absolute tolerance.
    """
    n = len(q)
    if n == 0:
        return True, True
    exact = all(all_exact(r) for r in q)
    if not exact:
        ev = np.linalg.eigvalsh(as_array(q))
        return bool(ev.min() >= -tol), bool(ev.min() > tol)
    a = [list(r) for r in q]
    idx = list(range(n))
    pd = True
    while idx:
        k = max(idx, key=lambda i: a[i][i])
        d = a[k][k]
        if d < 0:
            return False, False
        if d == 0:
            pd = False
            if any(a[i][j] != 0 for i in idx for j in idx):
                return False, False
            break
        idx.remove(k)
        for i in idx:
            f = a[i][k] / d
            for j in idx:
                a[i][j] -= f * a[k][j]
    return True, pd


# --------------------------------------------------------------------------
# Linear programming: value of a matrix game via the simplex method
# --------------------------------------------------------------------------

class LPError(RuntimeError):
    """Simplex failed to converge (should not happen for game LPs)."""


def _simplex_max_sum(m: list[list[Number]], exact: bool, tol: float, max_iter: int = 10_000):
    """Solve ``max 1'w  s.t.  m w <= 1, w >= 0`` for a strictly positive ``m``.

    Bland's rule keeps the exact variant cycle-free.  Returns the primal ``w``
    and dual ``z`` (``m' z >= 1``) optimal vectors.
    """
    rows, cols = len(m), len(m[0])
    one = Fraction(1) if exact else 1.0
    zero = one - one
    # tableau: [m | I | 1], objective row holds reduced costs
    tab = [list(m[i]) + [one if j == i else zero for j in range(rows)] + [one] for i in range(rows)]
    obj = [one] * cols + [zero] * rows + [zero]
    basis = [cols + i for i in range(rows)]
    for _ in range(max_iter):
        enter = next((j for j in range(cols + rows) if obj[j] > (0 if exact else tol)), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(rows):
            a = tab[i][enter]
            if a > (0 if exact else tol):
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise LPError("unbounded game LP; payoff shift failed")
        pv = tab[leave][enter]
        tab[leave] = [x / pv for x in tab[leave]]
        for i in range(rows):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, tab[leave])]
        basis[leave] = enter
    else:
        raise LPError("simplex iteration limit reached")
    w = [zero] * cols
    for i, b in enumerate(basis):
        if b < cols:
            w[b] = tab[i][-1]
    z = [-obj[cols + i] for i in range(rows)]
    return w, z


def game_value(payoff: Sequence[Sequence[Number]], tol: float = 1e-12):
    """Value of the zero-sum game in which rows maximise and columns minimise.

    Returns ``(value, row_strategy, column_strategy)``.
    """
    m = [list(r) for r in payoff]
    exact = all(all_exact(r) for r in m)
    if exact:
        m = [[Fraction(x) for x in r] for r in m]
    else:
        m = [[float(x) for x in r] for r in m]
    lo = min(min(r) for r in m)
    shift = (1 - lo) if exact else (1.0 - lo)
    shifted = [[x + shift for x in r] for r in m]
    w, z = _simplex_max_sum(shifted, exact, tol)
    total = sum(w)
    col = [x / total for x in w]
    ztot = sum(z)
    row = [x / ztot for x in z]
    if not exact:
        row = [max(0.0, x) for x in row]
        s = sum(row)
        row = [x / s for x in row]
        col = [max(0.0, x) for x in col]
        s = sum(col)
        col = [x / s for x in col]
    return 1 / total - shift, row, col
