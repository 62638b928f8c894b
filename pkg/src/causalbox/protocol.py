"""Turn a violated constraint into an operational signalling protocol.

The hybrid walk pins the violation to a single input coordinate, which
yields a sender, a frozen context, and two receiver distributions that
differ.  The geometric certificate supplies a gathering point outside
the sender's strict future, so the receiver statistics are available
before any subluminal message could arrive.  A finite-sample test makes
the effect operational, and in flat spacetime an isometry can mirror
the channel into a closed causal loop.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from scipy.stats import chi2

from .boxes import CorrelationBox, marginalize
from .geometry import CausalOrder, Event, Minkowski
from .ons import ConstraintInstance, UndecidableScenario, ViolationReport
from .poincare import PoincareMap, find_loop_transform
from .separation import Verdict, separated, verify_separation_witness


class PreconditionViolated(ValueError):
    """The requested construction needs a violation that is not there."""


@dataclass(frozen=True)
class SignallingProtocol:
    """Everything needed to run the one-coordinate signalling scheme.

    The sender toggles input `sender` between its values in setting_a
    and setting_b while every other input stays frozen; the receivers'
    joint outputs G are read off at gathering_point.
    """

    sender: int
    setting_a: tuple[str, ...]
    setting_b: tuple[str, ...]
    G: tuple[int, ...]
    gathering_point: Event
    dist_a: Mapping[tuple[str, ...], Fraction]
    dist_b: Mapping[tuple[str, ...], Fraction]

    @property
    def sender_values(self) -> tuple[str, str]:
        return self.setting_a[self.sender], self.setting_b[self.sender]

    @property
    def total_variation(self) -> Fraction:
        keys = set(self.dist_a) | set(self.dist_b)
        diff = sum(
            abs(
                self.dist_a.get(k, Fraction(0)) - self.dist_b.get(k, Fraction(0))
            )
            for k in keys
        )
        return Fraction(diff, 2)


def hybrid_localize(
    box: CorrelationBox, violation: ViolationReport
) -> tuple[int, tuple[str, ...], tuple[str, ...]]:
    """Walk from x to x' flipping one F coordinate at a time and return
    (k, h_{k-1}, h_k) for the first step whose G-marginals differ.

    The endpoint marginals differ, so some step must; k is 1-based in
    the listed order of F.
    """
    inst = violation.instance
    settings = [inst.x]
    current = list(inst.x)
    for f in inst.F:
        current[f] = inst.x_prime[f]
        settings.append(tuple(current))
    previous = marginalize(box, inst.G, settings[0])
    for k in range(1, len(settings)):
        here = marginalize(box, inst.G, settings[k])
        if here != previous:
            return k, settings[k - 1], settings[k]
        previous = here
    raise PreconditionViolated(
        "the two endpoint marginals agree; nothing to localize"
    )


def _gathering_point_avoiding(
    order: CausalOrder,
    box: CorrelationBox,
    inst: ConstraintInstance,
    sender: int,
    budget: int,
) -> Event:
    gather = [box.outputs[g].location for g in inst.G]
    avoid = [box.inputs[sender].location]
    witness = inst.certificate.witness
    if witness is not None and verify_separation_witness(
        order, gather, avoid, witness
    ):
        return witness
    res = separated(order, gather, avoid, budget=budget)
    if res.verdict is Verdict.NOT_SEPARATED:
        raise PreconditionViolated(
            "instance certificate does not cover the localized sender"
        )
    if res.verdict is Verdict.UNKNOWN or res.witness is None:
        raise UndecidableScenario(
            "no explicit gathering point available for the protocol", []
        )
    return res.witness


def build_protocol(
    order: CausalOrder,
    box: CorrelationBox,
    violation: ViolationReport,
    *,
    budget: int = 8,
) -> SignallingProtocol:
    """Assemble and re-verify the protocol extracted from a violation."""
    if not violation.recompute(box):
        raise PreconditionViolated("violation report does not match the box")
    inst = violation.instance
    k, x_a, x_b = hybrid_localize(box, violation)
    sender = inst.F[k - 1]
    dist_a = marginalize(box, inst.G, x_a)
    dist_b = marginalize(box, inst.G, x_b)
    point = _gathering_point_avoiding(order, box, inst, sender, budget)
    if order.strictly_precedes(box.inputs[sender].location, point):
        raise PreconditionViolated("gathering point is after the sender")
    for g in inst.G:
        if not order.causally_precedes(box.outputs[g].location, point):
            raise PreconditionViolated("gathering point misses a receiver")
    return SignallingProtocol(
        sender=sender,
        setting_a=x_a,
        setting_b=x_b,
        G=inst.G,
        gathering_point=point,
        dist_a=dist_a,
        dist_b=dist_b,
    )


def exhaustive_protocol_search(
    order: CausalOrder,
    box: CorrelationBox,
    instances: Sequence[ConstraintInstance],
    *,
    budget: int = 8,
) -> SignallingProtocol | None:
    """Try every instance and every hybrid step; first protocol wins.

    Returns None only when no instance exhibits differing marginals, so
    a box that satisfies every constraint admits no protocol at all.
    """
    for inst in instances:
        left = marginalize(box, inst.G, inst.x)
        right = marginalize(box, inst.G, inst.x_prime)
        if left == right:
            continue
        for a in left:
            if left[a] != right[a]:
                report = ViolationReport(inst, a, left[a], right[a])
                return build_protocol(order, box, report, budget=budget)
    return None


# ----------------------------------------------------------------------
# finite-sample simulation


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    seed: int
    counts_a: Mapping[tuple[str, ...], int]
    counts_b: Mapping[tuple[str, ...], int]
    empirical_tv: Fraction
    statistic: float
    p_value: float
    alpha: Fraction
    reject: bool
    method: str


def _trial_rng(seed: int, index: int) -> random.Random:
    # Deterministic per-trial stream, independent of draw scheduling.
    return random.Random((seed & (2**64 - 1)) * 0x1000193 + index)


class _Sampler:
    """Inverse-CDF sampling with exact cut points.

    Dyadic cumulative weights map to exact 53-bit integer thresholds;
    anything else falls back to exact Fraction comparisons.
    """

    def __init__(self, dist: Mapping[tuple[str, ...], Fraction]):
        self.outcomes = list(dist)
        cum = Fraction(0)
        self.cuts: list[Fraction] = []
        for a in self.outcomes:
            cum += dist[a]
            self.cuts.append(cum)
        scaled = [c * 2**53 for c in self.cuts]
        if all(c.denominator == 1 for c in scaled):
            self.int_cuts = [int(c) for c in scaled]
        else:
            self.int_cuts = None

    def draw(self, rng: random.Random) -> tuple[str, ...]:
        r = rng.getrandbits(53)
        if self.int_cuts is not None:
            return self.outcomes[bisect_right(self.int_cuts, r)]
        u = Fraction(r, 2**53)
        for a, c in zip(self.outcomes, self.cuts):
            if u < c:
                return a
        return self.outcomes[-1]


def _g_statistic(counts: Sequence[Mapping], pooled_freq, totals) -> float:
    g = 0.0
    for arm, n in zip(counts, totals):
        for cell, freq in pooled_freq.items():
            o = arm.get(cell, 0)
            if o:
                g += 2.0 * o * math.log(o / (n * freq))
    return g


def simulate(
    protocol: SignallingProtocol,
    trials: int,
    seed: int,
    *,
    alpha: Fraction = Fraction(1, 100),
    mc_rounds: int = 2000,
) -> SimulationResult:
    """Run both arms of the protocol and test sample homogeneity.

    Pearson's two-sample chi-square on pooled expected counts decides;
    when some expected count drops below 5 the p-value comes from a
    Monte-Carlo likelihood-ratio test instead.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    samplers = (_Sampler(dict(protocol.dist_a)), _Sampler(dict(protocol.dist_b)))
    counts: list[dict[tuple[str, ...], int]] = [{}, {}]
    for t in range(trials):
        rng = _trial_rng(seed, t)
        for arm in (0, 1):
            a = samplers[arm].draw(rng)
            counts[arm][a] = counts[arm].get(a, 0) + 1
    tv = Fraction(
        sum(
            abs(counts[0].get(k, 0) - counts[1].get(k, 0))
            for k in set(counts[0]) | set(counts[1])
        ),
        2 * trials,
    )
    pooled = {
        k: Fraction(counts[0].get(k, 0) + counts[1].get(k, 0), 2 * trials)
        for k in set(counts[0]) | set(counts[1])
    }
    cells = sorted(pooled)
    df = len(cells) - 1
    if df == 0:
        return SimulationResult(
            trials, seed, counts[0], counts[1], tv, 0.0, 1.0, alpha, False, "degenerate"
        )
    min_expected = min(float(trials * pooled[c]) for c in cells)
    if min_expected >= 5.0:
        x2 = 0.0
        for arm in (0, 1):
            for c in cells:
                e = float(trials * pooled[c])
                o = counts[arm].get(c, 0)
                x2 += (o - e) ** 2 / e
        p = float(chi2.sf(x2, df))
        method = "chi2"
        stat = x2
    else:
        stat = _g_statistic(counts, {c: float(pooled[c]) for c in cells}, (trials, trials))
        hits = 0
        pooled_sampler = _Sampler({c: pooled[c] for c in cells})
        for b in range(mc_rounds):
            rng = _trial_rng(seed, 2**61 + b)
            sim: list[dict] = [{}, {}]
            for _ in range(trials):
                for arm in (0, 1):
                    a = pooled_sampler.draw(rng)
                    sim[arm][a] = sim[arm].get(a, 0) + 1
            s = _g_statistic(sim, {c: float(pooled[c]) for c in cells}, (trials, trials))
            if s >= stat - 1e-12:
                hits += 1
        p = (hits + 1) / (mc_rounds + 1)
        method = "exact_mc"
    return SimulationResult(
        trials, seed, counts[0], counts[1], tv, stat, p, alpha, p < alpha, method
    )


# ----------------------------------------------------------------------
# closed causal loops


@dataclass(frozen=True)
class LoopCertificate:
    """A mirrored copy of the channel plus two subluminal relays.

    relations lists the four causal facts that close the loop; each is
    re-checked against the raw order at construction time.
    """

    protocol: SignallingProtocol
    transform: PoincareMap
    sender_point: Event
    relay_point: Event
    mirrored_sender: Event
    mirrored_relay: Event
    relations: tuple[tuple[str, bool], ...]

    @property
    def consistent(self) -> bool:
        return all(ok for _, ok in self.relations)


@dataclass(frozen=True)
class LoopObstruction:
    reason: str


def loop_paradox_certificate(
    order: Minkowski,
    box: CorrelationBox,
    violation: ViolationReport,
    *,
    allow_reflection: bool = False,
    budget: int = 8,
):
    """Close the protocol into a causal loop when an isometry permits.

    Returns a LoopCertificate whose four relations are machine-checked,
    or a LoopObstruction explaining why no admissible transform exists
    (one spatial dimension without reflections, or a relay point that
    is not spacelike from the sender).
    """
    protocol = build_protocol(order, box, violation, budget=budget)
    p = box.inputs[protocol.sender].location
    q = protocol.gathering_point
    transform = find_loop_transform(order, p, q, allow_reflection)
    if transform is None:
        if p == q:
            reason = "sender and relay coincide; no isometry can separate them"
        elif order.causally_precedes(p, q):
            reason = "relay point is causally after the sender"
        elif order.dim == 1 and not allow_reflection:
            reason = (
                "one spatial dimension: only a reflection can turn the "
                "channel around"
            )
        else:
            reason = "no admissible isometry found"
        return LoopObstruction(reason)
    lp = transform.apply(p)
    lq = transform.apply(q)
    relations = (
        ("channel_outruns_light", not order.strictly_precedes(p, q)),
        ("relay_reaches_mirrored_sender", order.strictly_precedes(q, lp)),
        ("mirrored_channel_outruns_light", not order.strictly_precedes(lp, lq)),
        ("mirrored_relay_returns_before_sender", order.strictly_precedes(lq, p)),
    )
    return LoopCertificate(
        protocol=protocol,
        transform=transform,
        sender_point=p,
        relay_point=q,
        mirrored_sender=lp,
        mirrored_relay=lq,
        relations=relations,
    )
