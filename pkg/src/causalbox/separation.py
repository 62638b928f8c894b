"""Decide whether a family of events can be gathered at a single event
that stays outside the strict causal future of every member of a second
family.

Verdicts are exact for finite orders, for both 1+1 backends, and for the
plane with at most one avoided event; the remaining plane cases and
higher dimensions fall back to certificate search and report UNKNOWN
rather than guess.  SEPARATED results carry a rational witness event
whenever the search finds one, and every witness re-verifies against the
raw causal relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .geometry import (
    CausalOrder,
    Event,
    FiniteOrder,
    GeometryError,
    Minkowski,
    TerminatedDiagram,
    event_from_null,
    null_coords,
)
from .rational import QuadExt, quad_sqrt

Vec = tuple[Fraction, ...]


class Verdict(Enum):
    SEPARATED = "separated"
    NOT_SEPARATED = "not_separated"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SeparationResult:
    verdict: Verdict
    witness: Event | None = None
    reason: str = ""
    detail: str = ""

    @property
    def is_separated(self) -> bool:
        return self.verdict is Verdict.SEPARATED

    @property
    def is_decided(self) -> bool:
        return self.verdict is not Verdict.UNKNOWN


def verify_separation_witness(
    order: CausalOrder,
    gather: Sequence[Event],
    avoid: Sequence[Event],
    q: Event,
) -> bool:
    """Check the defining property directly: every gathered event reaches
    q causally and no avoided event strictly precedes q."""
    try:
        order.validate_event(q)
    except GeometryError:
        return False
    if not all(order.causally_precedes(g, q) for g in gather):
        return False
    return not any(order.strictly_precedes(p, q) for p in avoid)


# ----------------------------------------------------------------------
# small exact vector helpers (spatial tuples of Fractions)


def _vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))

def _dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))

def _norm2(a: Vec) -> Fraction:
    return _dot(a, a)


# ----------------------------------------------------------------------
# exact plane slice test: do closed discs have a common point?


def _vertex_in_disc(
    base: Vec, eperp: Vec, mu_sq: Fraction, sign: int, center: Vec, r: Fraction
) -> bool:
    """Membership of base + sign*sqrt(mu_sq)*eperp in the closed disc
    (center, r), decided exactly in the quadratic extension."""
    g = _vsub(base, center)
    const = _norm2(g) + mu_sq * _norm2(eperp) - r * r
    lin = 2 * sign * _dot(g, eperp)
    val = QuadExt.rational(const) + quad_sqrt(mu_sq) * Fraction(lin)
    return val.cmp(0) <= 0


def _triple_discs_nonempty(cs: Sequence[Vec], rs: Sequence[Fraction]) -> bool:
    """Common point of up to three pairwise-intersecting closed discs.

    If the intersection is nonempty it contains a disc center or a
    boundary crossing of two of the circles, so checking those finitely
    many candidates is a complete test.
    """
    n = len(cs)
    for a in range(n):
        if all(_norm2(_vsub(cs[a], cs[b])) <= rs[b] * rs[b] for b in range(n)):
            return True
    for a in range(n):
        for b in range(a + 1, n):
            e = _vsub(cs[b], cs[a])
            d2 = _norm2(e)
            if d2 == 0:
                continue
            alpha = (d2 + rs[a] * rs[a] - rs[b] * rs[b]) / (2 * d2)
            h2 = rs[a] * rs[a] - alpha * alpha * d2
            if h2 < 0:
                continue
            base = tuple(ca + alpha * ei for ca, ei in zip(cs[a], e))
            eperp = (-e[1], e[0])
            mu_sq = h2 / d2
            for sign in (1, -1):
                if all(
                    _vertex_in_disc(base, eperp, mu_sq, sign, cs[m], rs[m])
                    for m in range(n)
                ):
                    return True
    return False


def slice_gather_nonempty(centers: Sequence[Vec], radii: Sequence[Fraction]) -> bool:
    """Whether the closed discs (centers[j], radii[j]) share a point.

    Negative radii mean an unreachable member and give False.  With three
    or more discs, pairwise checks plus exact triple checks decide the
    whole family (Helly in the plane).
    """
    if any(r < 0 for r in radii):
        return False
    m = len(centers)
    for i, k in combinations(range(m), 2):
        gap = _norm2(_vsub(centers[i], centers[k]))
        if gap > (radii[i] + radii[k]) ** 2:
            return False
    if m <= 2:
        return True
    for i, j, k in combinations(range(m), 3):
        if not _triple_discs_nonempty(
            [centers[i], centers[j], centers[k]], [radii[i], radii[j], radii[k]]
        ):
            return False
    return True


# ----------------------------------------------------------------------
# exact late-time escape threshold in the plane


def escape_threshold(ws: Sequence[Vec], ts: Sequence[Fraction]) -> QuadExt:
    """min over unit directions y of max_j (ts[j] - ws[j].y), exactly.

    This is the late-time limit of (t - farthest reach) for the growing
    common-contact region relative to the origin of the ws.  The minimum
    is attained either where a single term is smallest (y along that w)
    or where two terms tie, so evaluating those candidate directions in
    quadratic extensions and taking the exact minimum is complete.
    """
    best_t: dict[Vec, Fraction] = {}
    for w, t in zip(ws, ts):
        if w not in best_t or t > best_t[w]:
            best_t[w] = t
    items = sorted(best_t.items())
    ws = [w for w, _ in items]
    ts = [t for _, t in items]
    zero = tuple(Fraction(0) for _ in ws[0])
    if all(w == zero for w in ws):
        return QuadExt.rational(max(ts))

    values: list[QuadExt] = []

    def evaluate(const_of: list[Fraction], coeff_of: list[Fraction], root: QuadExt):
        vals = [QuadExt.rational(c) + root * k for c, k in zip(const_of, coeff_of)]
        cur = vals[0]
        for v in vals[1:]:
            if v.cmp(cur) > 0:
                cur = v
        values.append(cur)

    for j, wj in enumerate(ws):
        dj = _norm2(wj)
        if dj == 0:
            continue
        # y = wj / |wj|: each term becomes t_k - (w_k.wj)/dj * sqrt(dj)
        evaluate(
            list(ts),
            [-_dot(wk, wj) / dj for wk in ws],
            quad_sqrt(dj),
        )
    for i, k in combinations(range(len(ws)), 2):
        u = _vsub(ws[i], ws[k])
        if u == zero:
            continue
        c = ts[i] - ts[k]
        n2 = _norm2(u)
        disc = n2 - c * c
        if disc < 0:
            continue
        uperp = (-u[1], u[0])
        root = quad_sqrt(disc)
        for sign in (1, -1):
            # y = (c/n2) u + sign*(sqrt(disc)/n2) uperp is a unit vector
            # on which terms i and k tie.
            evaluate(
                [ts[m] - c * _dot(wm, u) / n2 for m, wm in enumerate(ws)],
                [Fraction(-sign) * _dot(wm, uperp) / n2 for wm in ws],
                root,
            )

    assert values, "at least one nonzero w yields a candidate direction"
    best = values[0]
    for v in values[1:]:
        if v.cmp(best) < 0:
            best = v
    return best


# ----------------------------------------------------------------------
# exact single-avoid decision in the plane


def _plane_single_avoid(
    order: Minkowski, gather: Sequence[Event], p: Event
) -> tuple[str, QuadExt | None]:
    """Exact trichotomy for Minkowski(2) against one avoided event.

    "slice": a gathering event exists at or before the avoided time, and
    any such event is automatically outside the avoided strict future.
    "escape": gathering must happen later, but the common-contact region
    outruns the avoided lightcone.  "blocked": neither, hence every
    gathering event sits in the avoided strict future.
    """
    assert p.t is not None and p.x is not None
    centers = [q.x for q in gather]
    radii = [p.t - q.t for q in gather]  # type: ignore[operator]
    if slice_gather_nonempty(centers, radii):  # type: ignore[arg-type]
        return "slice", None
    ws = [_vsub(q.x, p.x) for q in gather]  # type: ignore[arg-type]
    ts = [q.t for q in gather]
    threshold = escape_threshold(ws, ts)  # type: ignore[arg-type]
    if threshold.cmp(p.t) < 0:
        return "escape", threshold
    return "blocked", threshold


# ----------------------------------------------------------------------
# rational witness search (certificates only; never used for NOT verdicts)


def _tangency_points(ci: Vec, ri: Fraction, ck: Vec, rk: Fraction) -> list[Vec]:
    e = _vsub(ck, ci)
    d2 = _norm2(e)
    pts: list[Vec] = []
    if d2 == (ri + rk) ** 2 and ri + rk > 0:
        lam = ri / (ri + rk)
        pts.append(tuple(a + lam * d for a, d in zip(ci, e)))
    if ri != rk and d2 == (ri - rk) ** 2 and d2 > 0:
        lam = ri / (ri - rk)
        pts.append(tuple(a + lam * d for a, d in zip(ci, e)))
    return pts


def _grid_candidates(
    order: Minkowski, gather: Sequence[Event], t: Fraction, levels: int
):
    radii = [t - q.t for q in gather]  # type: ignore[operator]
    if any(r < 0 for r in radii):
        return
    lo = [
        max(q.x[a] - r for q, r in zip(gather, radii))  # type: ignore[index]
        for a in range(order.dim)
    ]
    hi = [
        min(q.x[a] + r for q, r in zip(gather, radii))  # type: ignore[index]
        for a in range(order.dim)
    ]
    if any(l > h for l, h in zip(lo, hi)):
        return
    seen: set[Vec] = set()
    for level in range(levels + 1):
        n = 2**level
        axes = [
            [l + (h - l) * Fraction(i, n) for i in range(n + 1)]
            for l, h in zip(lo, hi)
        ]
        for combo in product(*axes):
            if combo in seen:
                continue
            seen.add(combo)
            yield Event(t=t, x=tuple(combo))


def _search_witness(
    order: Minkowski,
    gather: Sequence[Event],
    avoid: Sequence[Event],
    budget: int,
) -> Event | None:
    candidates: list[Event] = list(avoid)
    cf = order.common_future(gather)
    if cf is not None:
        candidates.append(cf)
    for p in avoid:
        assert p.t is not None
        radii = [p.t - q.t for q in gather]  # type: ignore[operator]
        if any(r < 0 for r in radii):
            continue
        for q in gather:
            candidates.append(Event(t=p.t, x=q.x))
        for (qi, ri), (qk, rk) in combinations(zip(gather, radii), 2):
            for pt in _tangency_points(qi.x, ri, qk.x, rk):  # type: ignore[arg-type]
                candidates.append(Event(t=p.t, x=pt))
    for cand in candidates:
        if verify_separation_witness(order, gather, avoid, cand):
            return cand
    times = [e.t for e in [*gather, *avoid]]
    tbase = max(times) + 1  # type: ignore[operator]
    levels = 5 if order.dim == 2 else 3
    for step in range(budget):
        t = tbase + 2**step - 1
        for cand in _grid_candidates(order, gather, t, levels):
            if verify_separation_witness(order, gather, avoid, cand):
                return cand
    return None


# ----------------------------------------------------------------------
# 1+1 engine in lightcone coordinates


def _quadrant_decide(
    order: CausalOrder, gather: Sequence[Event], avoid: Sequence[Event]
) -> SeparationResult:
    """Complete decision for Minkowski(1) and terminated diagrams.

    Causal precedence in 1+1 is the product order on lightcone
    coordinates, so gathering events form the upper quadrant of the
    componentwise maximum of the gathered family, intersected with the
    domain.  Escapes are swept over the finitely many quadrant columns
    where the set of blocking constraints changes.
    """
    terminated = isinstance(order, TerminatedDiagram)
    gu = [null_coords(q) for q in gather]
    ustar = max(u for u, _ in gu)
    vstar = max(v for _, v in gu)
    if terminated and order.phi(ustar, vstar) <= 0:
        return SeparationResult(
            Verdict.NOT_SEPARATED,
            reason="no_common_future",
            detail="the gathered family has no joint future inside the domain",
        )
    for p in avoid:
        up, vp = null_coords(p)
        if (
            up >= ustar
            and vp >= vstar
            and not any(order.strictly_precedes(pk, p) for pk in avoid)
        ):
            return SeparationResult(
                Verdict.SEPARATED, witness=p, reason="gather_at_avoid_point"
            )
    blockers = [null_coords(p) for p in avoid]
    for u in sorted({ustar} | {ub for ub, _ in blockers if ub > ustar}):
        if terminated and order.phi(u, vstar) <= 0:
            # The domain margin only shrinks further along the sweep.
            break
        active = [vb for ub, vb in blockers if ub <= u]
        if not active or vstar < min(active):
            return SeparationResult(
                Verdict.SEPARATED,
                witness=event_from_null(u, vstar),
                reason="quadrant_escape",
            )
    return SeparationResult(Verdict.NOT_SEPARATED, reason="quadrant_cover")


# ----------------------------------------------------------------------
# public entry point


def separated(
    order: CausalOrder,
    gather: Sequence[Event],
    avoid: Sequence[Event],
    *,
    budget: int = 8,
) -> SeparationResult:
    """Decide Separated(gather; avoid) over the given causal order.

    SEPARATED means some event q has every gather member causally before
    it while no avoid member strictly precedes it.  The avoided events
    themselves are legal gathering points, which is why only the strict
    relation is excluded.
    """
    if not gather:
        raise ValueError("gather family must be nonempty")
    gather = list(dict.fromkeys(gather))
    avoid = list(dict.fromkeys(avoid))
    for e in [*gather, *avoid]:
        order.validate_event(e)

    for p in avoid:
        for q in gather:
            if order.strictly_precedes(p, q):
                return SeparationResult(
                    Verdict.NOT_SEPARATED,
                    reason="blocked_by_strict_past",
                    detail=f"{p!r} strictly precedes gathered {q!r}",
                )
    if len(gather) == 1:
        # Nothing strictly precedes the single member, so it gathers itself.
        return SeparationResult(
            Verdict.SEPARATED, witness=gather[0], reason="single_gather"
        )

    if isinstance(order, FiniteOrder):
        for label in sorted(order.elements, key=repr):
            cand = Event.named(label)
            if verify_separation_witness(order, gather, avoid, cand):
                return SeparationResult(
                    Verdict.SEPARATED, witness=cand, reason="exhaustive"
                )
        return SeparationResult(Verdict.NOT_SEPARATED, reason="exhaustive")

    if isinstance(order, TerminatedDiagram) or (
        isinstance(order, Minkowski) and order.dim == 1
    ):
        return _quadrant_decide(order, gather, avoid)

    assert isinstance(order, Minkowski)
    if not avoid:
        return SeparationResult(
            Verdict.SEPARATED,
            witness=order.common_future(gather),
            reason="common_future",
        )

    if order.dim == 2:
        kinds: dict[Event, str] = {}
        for p in avoid:
            kind, threshold = _plane_single_avoid(order, gather, p)
            if kind == "blocked":
                return SeparationResult(
                    Verdict.NOT_SEPARATED,
                    reason="cone_closure",
                    detail=(
                        f"every gathering event lies in the strict future of "
                        f"{p!r}; late-time threshold {threshold!r} is not below "
                        f"its time {p.t}"
                    ),
                )
            kinds[p] = kind
        witness = _search_witness(order, gather, avoid, budget)
        if witness is not None:
            reason = (
                {"slice": "gather_before_avoid", "escape": "asymptotic_escape"}[
                    kinds[avoid[0]]
                ]
                if len(avoid) == 1
                else "witness_search"
            )
            return SeparationResult(Verdict.SEPARATED, witness=witness, reason=reason)
        if len(avoid) == 1:
            # The trichotomy already decided this instance; only the
            # explicit rational certificate is missing.
            return SeparationResult(
                Verdict.SEPARATED,
                witness=None,
                reason="gather_before_avoid"
                if kinds[avoid[0]] == "slice"
                else "asymptotic_escape",
                detail="no rational witness found within the search budget",
            )
        return SeparationResult(
            Verdict.UNKNOWN,
            reason="joint_avoidance_undecided",
            detail="each avoided event is escapable alone; joint escape unresolved",
        )

    witness = _search_witness(order, gather, avoid, budget)
    if witness is not None:
        return SeparationResult(
            Verdict.SEPARATED, witness=witness, reason="witness_search"
        )
    return SeparationResult(
        Verdict.UNKNOWN,
        reason="high_dimension_undecided",
        detail="no exact decision procedure beyond the plane; search found no witness",
    )
