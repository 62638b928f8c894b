"""Two-phase primal simplex over exact rationals.

Solves max/min of c.x subject to A x = b, x >= 0.  Bland's smallest
index rule keeps pivoting finite, and every answer ships with the dual
vector of the final basis so callers can hand out zero-gap optimality
certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class InfeasibleError(ValueError):
    pass


class UnboundedError(ValueError):
    pass


@dataclass(frozen=True)
class LpResult:
    value: Fraction
    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]


def verify_lp_certificate(
    A: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
    result: LpResult,
    *,
    maximize: bool = True,
) -> bool:
    """Zero-gap check from raw data: primal feasible, dual feasible,
    objective values equal.  All comparisons exact."""
    m, n = len(A), len(c)
    x, y = result.x, result.y
    if len(x) != n or len(y) != m:
        return False
    if any(v < 0 for v in x):
        return False
    for i in range(m):
        if sum(A[i][j] * x[j] for j in range(n)) != b[i]:
            return False
    for j in range(n):
        reduced = c[j] - sum(A[i][j] * y[i] for i in range(m))
        if maximize and reduced > 0:
            return False
        if not maximize and reduced < 0:
            return False
    primal = sum(c[j] * x[j] for j in range(n))
    dual = sum(b[i] * y[i] for i in range(m))
    return primal == dual == result.value


def _pivot(T: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for r, line in enumerate(T):
        if r != row and line[col]:
            factor = line[col]
            T[r] = [v - factor * w for v, w in zip(line, T[row])]
    basis[row] = col


def _run_simplex(
    T: list[list[Fraction]],
    basis: list[int],
    cost: list[Fraction],
    allowed: Sequence[bool],
) -> None:
    """Maximize cost.x on the tableau in place (Bland's rule)."""
    m = len(basis)
    width = len(T[0])
    z = list(cost) + [Fraction(0)]
    for r in range(m):
        cb = z[basis[r]]
        if cb:
            z = [zj - cb * tj for zj, tj in zip(z, T[r])]
    while True:
        enter = -1
        for j in range(width - 1):
            if allowed[j] and z[j] > 0:
                enter = j
                break
        if enter < 0:
            return
        leave, best = -1, None
        for r in range(m):
            a = T[r][enter]
            if a > 0:
                ratio = T[r][-1] / a
                if best is None or ratio < best or (
                    ratio == best and basis[r] < basis[leave]
                ):
                    best, leave = ratio, r
        if leave < 0:
            raise UnboundedError("objective unbounded above")
        _pivot(T, basis, leave, enter)
        factor = z[enter]
        if factor:
            z = [zj - factor * tj for zj, tj in zip(z, T[leave])]


def _solve_dual(columns: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve B^T y = c_B by Gaussian elimination, exactly."""
    m = len(rhs)
    M = [[columns[j][i] for i in range(m)] + [rhs[j]] for j in range(m)]
    for col in range(m):
        row = next(r for r in range(col, m) if M[r][col] != 0)
        M[col], M[row] = M[row], M[col]
        piv = M[col][col]
        M[col] = [v / piv for v in M[col]]
        for r in range(m):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return [M[i][m] for i in range(m)]


def solve_lp(
    A: Sequence[Sequence],
    b: Sequence,
    c: Sequence,
    *,
    maximize: bool = True,
) -> LpResult:
    """Exact optimum of c.x over {A x = b, x >= 0}.

    Returns the optimal value, a primal vertex, and the dual vector y of
    the final basis; the triple always passes verify_lp_certificate.
    """
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    m, n = len(A), len(c)
    if any(len(row) != n for row in A) or len(b) != m:
        raise ValueError("inconsistent LP dimensions")
    obj = c if maximize else [-v for v in c]
    signs = []
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
            signs.append(Fraction(-1))
        else:
            signs.append(Fraction(1))

    # Tableau columns: n originals, m artificials, then the rhs.
    T = [A[i] + [Fraction(int(i == k)) for k in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    phase1 = [Fraction(0)] * n + [Fraction(-1)] * m
    allowed_all = [True] * (n + m)
    _run_simplex(T, basis, phase1, allowed_all)
    if any(T[r][-1] != 0 for r in range(m) if basis[r] >= n):
        raise InfeasibleError("constraints admit no nonnegative solution")
    # Pivot leftover artificials out wherever an original column can take
    # over; rows that cannot are identically zero and stay inert.
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is not None:
                _pivot(T, basis, r, col)

    phase2 = obj + [Fraction(0)] * m
    allowed = [True] * n + [False] * m
    _run_simplex(T, basis, phase2, allowed)

    x = [Fraction(0)] * n
    for r, j in enumerate(basis):
        if j < n:
            x[j] = T[r][-1]
    value = sum(obj[j] * x[j] for j in range(n))

    unit = lambda i: [Fraction(int(k == i)) for k in range(m)]
    cols = [
        [A[i][j] for i in range(m)] if j < n else unit(j - n) for j in basis
    ]
    y_flipped = _solve_dual(cols, [phase2[j] for j in basis])
    y = [s * v for s, v in zip(signs, y_flipped)]

    if not maximize:
        value = -value
        y = [-v for v in y]
    result = LpResult(value, tuple(x), tuple(y))
    return result
