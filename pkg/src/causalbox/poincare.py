"""Exact isometries of flat spacetime: rational Lorentz matrices plus
translations, with constructors parametrised to stay inside the
rationals (boosts by the exponential of the rapidity, rotations by the
half-angle tangent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .geometry import Event, GeometryError, Minkowski
from .rational import parse_rational

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


def _eta(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1 if i == j == 0 else (-1 if i == j else 0)) for j in range(n))
        for i in range(n)
    )


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n))
        for i in range(n)
    )


def _matvec(a: Matrix, v: Vector) -> Vector:
    return tuple(sum((row[k] * v[k] for k in range(len(v))), Fraction(0)) for row in a)


def _transpose(a: Matrix) -> Matrix:
    return tuple(tuple(a[j][i] for j in range(len(a))) for i in range(len(a)))


def _det(a: Matrix) -> Fraction:
    rows = [list(r) for r in a]
    n = len(rows)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if factor:
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return det


def _identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )


@dataclass(frozen=True)
class PoincareMap:
    """x -> matrix @ x + translation on (t, x1, ..., xd) coordinates.

    The constructor verifies the exact isometry condition, so every
    instance preserves the squared interval identically.
    """

    matrix: Matrix
    translation: Vector

    def __post_init__(self):
        n = len(self.matrix)
        if n < 2 or any(len(row) != n for row in self.matrix):
            raise GeometryError("matrix must be square of size dim+1 >= 2")
        if len(self.translation) != n:
            raise GeometryError("translation length must match matrix size")
        eta = _eta(n)
        gram = _matmul(_transpose(self.matrix), _matmul(eta, self.matrix))
        if gram != eta:
            raise GeometryError("matrix does not preserve the interval form")

    @property
    def dim(self) -> int:
        return len(self.matrix) - 1

    @property
    def is_orthochronous(self) -> bool:
        return self.matrix[0][0] >= 1

    @property
    def is_proper(self) -> bool:
        return _det(self.matrix) == 1

    # -- constructors ---------------------------------------------------

    @staticmethod
    def identity(dim: int) -> "PoincareMap":
        n = dim + 1
        return PoincareMap(_identity(n), tuple(Fraction(0) for _ in range(n)))

    @staticmethod
    def translation_map(dt, dx: Sequence) -> "PoincareMap":
        shift = (parse_rational(dt), *(parse_rational(c) for c in dx))
        return PoincareMap(_identity(len(shift)), shift)

    @staticmethod
    def boost(dim: int, k, axis: int = 0) -> "PoincareMap":
        """Boost along a spatial axis, parametrised by the exponential of
        the rapidity: cosh = (k + 1/k)/2, sinh = (k - 1/k)/2 with k > 0
        rational, so every entry stays rational.  k > 1 sends inertial
        worldlines toward the negative axis direction.
        """
        k = parse_rational(k)
        if k <= 0:
            raise GeometryError("boost parameter must be positive")
        if not 0 <= axis < dim:
            raise GeometryError("boost axis out of range")
        c = (k + 1 / k) / 2
        s = (k - 1 / k) / 2
        rows = [list(r) for r in _identity(dim + 1)]
        i = axis + 1
        rows[0][0] = c
        rows[0][i] = -s
        rows[i][0] = -s
        rows[i][i] = c
        return PoincareMap(
            tuple(tuple(r) for r in rows), tuple(Fraction(0) for _ in range(dim + 1))
        )

    @staticmethod
    def rotation(dim: int, m, axes: tuple[int, int] = (0, 1)) -> "PoincareMap":
        """Rotation in a spatial coordinate plane by the angle whose
        half-angle tangent is the rational m: cos = (1-m^2)/(1+m^2),
        sin = 2m/(1+m^2).
        """
        m = parse_rational(m)
        a, b = axes
        if a == b or not (0 <= a < dim and 0 <= b < dim):
            raise GeometryError("rotation axes must be two distinct spatial axes")
        den = 1 + m * m
        c = (1 - m * m) / den
        s = 2 * m / den
        rows = [list(r) for r in _identity(dim + 1)]
        i, j = a + 1, b + 1
        rows[i][i] = c
        rows[i][j] = -s
        rows[j][i] = s
        rows[j][j] = c
        return PoincareMap(
            tuple(tuple(r) for r in rows), tuple(Fraction(0) for _ in range(dim + 1))
        )

    @staticmethod
    def half_turn(dim: int, axes: tuple[int, int] = (0, 1)) -> "PoincareMap":
        """Rotation by a straight angle in a spatial plane (both axes
        negated); proper, and not reachable by the half-angle-tangent
        parametrisation."""
        a, b = axes
        if a == b or not (0 <= a < dim and 0 <= b < dim):
            raise GeometryError("rotation axes must be two distinct spatial axes")
        rows = [list(r) for r in _identity(dim + 1)]
        rows[a + 1][a + 1] = Fraction(-1)
        rows[b + 1][b + 1] = Fraction(-1)
        return PoincareMap(
            tuple(tuple(r) for r in rows), tuple(Fraction(0) for _ in range(dim + 1))
        )

    @staticmethod
    def spatial_reflection(dim: int, axis: int = 0) -> "PoincareMap":
        if not 0 <= axis < dim:
            raise GeometryError("reflection axis out of range")
        rows = [list(r) for r in _identity(dim + 1)]
        rows[axis + 1][axis + 1] = Fraction(-1)
        return PoincareMap(
            tuple(tuple(r) for r in rows), tuple(Fraction(0) for _ in range(dim + 1))
        )

    # -- algebra ----------------------------------------------------------

    def compose(self, other: "PoincareMap") -> "PoincareMap":
        """self after other."""
        if self.dim != other.dim:
            raise GeometryError("dimension mismatch in composition")
        return PoincareMap(
            _matmul(self.matrix, other.matrix),
            tuple(
                a + b
                for a, b in zip(_matvec(self.matrix, other.translation), self.translation)
            ),
        )

    def inverse(self) -> "PoincareMap":
        eta = _eta(len(self.matrix))
        inv = _matmul(eta, _matmul(_transpose(self.matrix), eta))
        return PoincareMap(
            inv, tuple(-c for c in _matvec(inv, self.translation))
        )

    def apply(self, e: Event) -> Event:
        if not e.is_point() or e.x is None or len(e.x) != self.dim:
            raise GeometryError(f"{e!r} does not live in {self.dim}+1 coordinates")
        vec = (e.t, *e.x)
        out = tuple(
            a + b for a, b in zip(_matvec(self.matrix, vec), self.translation)
        )
        return Event(t=out[0], x=out[1:])


# ----------------------------------------------------------------------
# mutual-influence loop construction


def _past_causal(vec: Vector) -> bool:
    t, xs = vec[0], vec[1:]
    return t < 0 and t * t >= sum((c * c for c in xs), Fraction(0))


def _vadd(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def _approx_half_tangent(y: float, x: float, depth: int) -> Fraction:
    """Rational half-angle tangent approximating the rotation that sends
    (x, y) onto the positive first axis; construction-only, verified
    exactly by the caller."""
    hyp = math.hypot(x, y)
    denom = x + hyp
    if abs(denom) < 1e-300:
        return Fraction(1)  # straight angle: fall back to a quarter turn
    return Fraction(y / denom).limit_denominator(10**depth)


def _align_rotation(dim: int, wx: Vector, depth: int) -> PoincareMap:
    """Proper rotation R with (R w)_x approximately along the first
    spatial axis.  Built from plane rotations with rational parameters;
    the caller checks exactly that the alignment is good enough."""
    rot = PoincareMap.identity(dim)
    cur = list(wx)
    for i in range(1, dim):
        # The straight-angle fallback inside the approximation leaves a
        # quarter turn behind, so one extra pass may be needed.
        for _ in range(3):
            if cur[i] == 0 and cur[0] >= 0:
                break
            m = _approx_half_tangent(float(cur[i]), float(cur[0]), depth)
            step = PoincareMap.rotation(dim, -m, axes=(0, i))
            rot = step.compose(rot)
            full = _matvec(step.matrix, (Fraction(0), *cur))
            cur = list(full[1:])
    return rot


def _loop_linear_candidates(dim: int, w: Vector, allow_reflection: bool):
    ks = [Fraction(2) ** e for e in range(1, 64)]
    if dim == 1:
        if not allow_reflection:
            return
        refl = PoincareMap.spatial_reflection(1, 0)
        for k in ks:
            boost = PoincareMap.boost(1, k, 0)
            yield refl.compose(boost)
            yield boost.compose(refl)
        return
    for depth in (3, 6, 12, 24):
        align = _align_rotation(dim, w[1:], depth)
        r = _matvec(align.matrix, w)
        # Need the aligned first spatial component to dominate the time
        # component, which exact spacelikeness guarantees for good enough
        # alignment.
        if not (r[1] > 0 and r[1] * r[1] > w[0] * w[0]):
            continue
        flip = PoincareMap.half_turn(dim, (0, 1))
        inv = align.inverse()
        for k in ks:
            yield inv.compose(flip.compose(PoincareMap.boost(dim, k, 0).compose(align)))
        return


def find_loop_transform(
    order: Minkowski, p: Event, q: Event, allow_reflection: bool = False
) -> PoincareMap | None:
    """Search for an isometry L with q strictly before L(p) and L(q)
    strictly before p, so influence can run p -> (beyond q) -> back
    before p.

    Exists exactly when q is strictly before p (identity works) or the
    pair is spacelike in two or more spatial dimensions; for one spatial
    dimension a spacelike pair needs a reflection, and no orientation
    and time-direction preserving map suffices.  Returns None when the
    required map does not exist in the allowed class.
    """
    order.validate_event(p)
    order.validate_event(q)
    if p == q:
        return None
    if order.strictly_precedes(q, p):
        return PoincareMap.identity(order.dim)
    if order.strictly_precedes(p, q):
        # Any allowed map keeps the future cone forward in time, and the
        # sum of two future-causal vectors can never point to the past.
        return None

    w = (q.t - p.t, *(b - a for a, b in zip(p.x, q.x)))  # type: ignore[operator]
    pvec = (p.t, *p.x)  # type: ignore[misc]
    for lam in _loop_linear_candidates(order.dim, w, allow_reflection):
        sigma = _vadd(w, _matvec(lam.matrix, w))
        if not _past_causal(sigma):
            continue
        qvec = (q.t, *q.x)  # type: ignore[misc]
        shift = tuple(
            qc - lc - sc / 2
            for qc, lc, sc in zip(qvec, _matvec(lam.matrix, pvec), sigma)
        )
        result = PoincareMap(lam.matrix, shift)
        if order.strictly_precedes(q, result.apply(p)) and order.strictly_precedes(
            result.apply(q), p
        ):
            return result
    return None
