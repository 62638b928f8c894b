"""Generation and checking of operational no-influence constraints.

A constraint instance demands that the marginal of some output set G is
identical at two input settings x, x' that differ only inside an input
set F, provided the geometry certifies that G's outputs can be gathered
while avoiding every input point of F.  Instances carry the geometric
certificate, so every reported violation can be re-verified from
scratch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .boxes import CorrelationBox, Srv, marginalize
from .geometry import CausalOrder, Event
from .separation import (
    SeparationResult,
    Verdict,
    separated,
    verify_separation_witness,
)


class UndecidableScenario(RuntimeError):
    """Separation could not be decided for at least one (F, G) pair."""

    def __init__(self, message: str, pending: Sequence[tuple[tuple, tuple]]):
        super().__init__(message)
        self.pending = tuple(pending)


class LayoutMismatch(ValueError):
    """Point geometry contradicts what a named family presupposes."""


@dataclass(frozen=True)
class ConstraintInstance:
    """One checkable equality: P(a^G | x) = P(a^G | x')."""

    F: tuple[int, ...]
    G: tuple[int, ...]
    x: tuple[str, ...]
    x_prime: tuple[str, ...]
    certificate: SeparationResult

    def verify(self, order: CausalOrder, box: CorrelationBox) -> bool:
        """Re-establish both the move shape and the geometric licence."""
        n = len(box.inputs)
        if not (self.F and self.G):
            return False
        if len(self.x) != n or len(self.x_prime) != n:
            return False
        diff = [i for i in range(n) if self.x[i] != self.x_prime[i]]
        if not set(diff) <= set(self.F):
            return False
        if len(diff) != 1 and set(diff) != set(self.F):
            return False
        gather = [box.outputs[g].location for g in self.G]
        avoid = [box.inputs[f].location for f in self.F]
        if self.certificate.witness is not None:
            return verify_separation_witness(
                order, gather, avoid, self.certificate.witness
            )
        return separated(order, gather, avoid).verdict is Verdict.SEPARATED


@dataclass(frozen=True)
class ViolationReport:
    instance: ConstraintInstance
    outcome: tuple[str, ...]
    p_x: Fraction
    p_x_prime: Fraction

    @property
    def difference(self) -> Fraction:
        return self.p_x_prime - self.p_x

    def recompute(self, box: CorrelationBox) -> bool:
        """Confirm the two stored probabilities against the table."""
        inst = self.instance
        return (
            marginalize(box, inst.G, inst.x)[self.outcome] == self.p_x
            and marginalize(box, inst.G, inst.x_prime)[self.outcome]
            == self.p_x_prime
        )


def _label_indices(inputs: Sequence[Srv], x: tuple[str, ...]) -> tuple[int, ...]:
    return tuple(inputs[i].alphabet.index(v) for i, v in enumerate(x))


def _move_pairs(
    inputs: Sequence[Srv], F: tuple[int, ...]
) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Canonical move pairs for F: group settings into classes that agree
    outside F, then pair settings differing in exactly one F coordinate
    or in every F coordinate."""
    settings = list(itertools.product(*(s.alphabet.labels for s in inputs)))
    classes: dict[tuple, list[tuple[str, ...]]] = {}
    non_f = [i for i in range(len(inputs)) if i not in F]
    for x in settings:
        classes.setdefault(tuple(x[i] for i in non_f), []).append(x)
    pairs: set[tuple[tuple[str, ...], tuple[str, ...]]] = set()
    for members in classes.values():
        for x in members:
            for f in F:
                alpha = inputs[f].alphabet
                for v in alpha.labels[alpha.index(x[f]) + 1 :]:
                    y = list(x)
                    y[f] = v
                    pairs.add((x, tuple(y)))
        if len(F) >= 2:
            for x, y in itertools.combinations(members, 2):
                if all(x[f] != y[f] for f in F):
                    lo, hi = sorted(
                        (x, y), key=lambda s: _label_indices(inputs, s)
                    )
                    pairs.add((lo, hi))
    key = lambda p: (_label_indices(inputs, p[0]), _label_indices(inputs, p[1]))
    return sorted(pairs, key=key)


def _sorted_instances(
    inputs: Sequence[Srv], instances: Iterable[ConstraintInstance]
) -> list[ConstraintInstance]:
    return sorted(
        instances,
        key=lambda c: (
            c.F,
            c.G,
            _label_indices(inputs, c.x),
            _label_indices(inputs, c.x_prime),
        ),
    )


def enumerate_constraints(
    order: CausalOrder, box: CorrelationBox, *, budget: int = 8
) -> list[ConstraintInstance]:
    """All constraint instances this scenario generates.

    Every nonempty (F, G) pair is tried; separation verdicts gate which
    pairs emit instances.  Any Unknown verdict aborts the enumeration
    with UndecidableScenario naming the offending pairs, because a
    partial constraint set would silently under-report.
    """
    n_in, n_out = len(box.inputs), len(box.outputs)
    instances: list[ConstraintInstance] = []
    pending: list[tuple[tuple, tuple]] = []
    for size_g in range(1, n_out + 1):
        for G in itertools.combinations(range(n_out), size_g):
            gather = [box.outputs[g].location for g in G]
            for size_f in range(1, n_in + 1):
                for F in itertools.combinations(range(n_in), size_f):
                    avoid = [box.inputs[f].location for f in F]
                    result = separated(order, gather, avoid, budget=budget)
                    if result.verdict is Verdict.UNKNOWN:
                        pending.append((F, G))
                        continue
                    if result.verdict is Verdict.NOT_SEPARATED:
                        continue
                    for x, y in _move_pairs(box.inputs, F):
                        instances.append(
                            ConstraintInstance(F, G, x, y, result)
                        )
    if pending:
        raise UndecidableScenario(
            f"separation undecided for {len(pending)} (F, G) pairs: "
            + ", ".join(f"F={f} G={g}" for f, g in pending),
            pending,
        )
    return _sorted_instances(box.inputs, instances)


def check_instances(
    box: CorrelationBox, instances: Sequence[ConstraintInstance]
) -> list[ViolationReport]:
    """Exact check of each instance; one report per violated instance,
    carrying the first differing outcome in canonical order."""
    reports = []
    for inst in instances:
        left = marginalize(box, inst.G, inst.x)
        right = marginalize(box, inst.G, inst.x_prime)
        if left == right:
            continue
        combos = itertools.product(
            *(box.outputs[g].alphabet.labels for g in inst.G)
        )
        for a in combos:
            if left[a] != right[a]:
                reports.append(ViolationReport(inst, a, left[a], right[a]))
                break
    return reports


def check_ons(
    order: CausalOrder, box: CorrelationBox, *, budget: int = 8
) -> list[ViolationReport]:
    return check_instances(box, enumerate_constraints(order, box, budget=budget))


def check_standard_ns(box: CorrelationBox) -> bool:
    """Textbook no-signalling: for each party, the joint marginal of all
    other parties' outputs is independent of that party's input.

    Purely tabular; demands a square box whose pairing is a bijection
    between inputs and outputs.
    """
    n = len(box.inputs)
    if len(box.outputs) != n or n == 0:
        raise ValueError("standard no-signalling needs equally many inputs and outputs")
    if sorted(box.pairing.keys()) != list(range(n)) or sorted(
        box.pairing.values()
    ) != list(range(n)):
        raise ValueError("standard no-signalling needs a bijective pairing")
    for j in range(n):
        others = tuple(k for k in range(n) if k != box.pairing[j])
        non_j = [i for i in range(n) if i != j]
        contexts = itertools.product(*(box.inputs[i].alphabet.labels for i in non_j))
        for ctx in contexts:
            base = None
            for v in box.inputs[j].alphabet.labels:
                x = [None] * n
                for i, val in zip(non_j, ctx):
                    x[i] = val
                x[j] = v
                m = marginalize(box, others, tuple(x))
                if base is None:
                    base = m
                elif m != base:
                    return False
    return True


# ----------------------------------------------------------------------
# named constraint families


@dataclass(frozen=True)
class FamilyLine:
    """One displayed equality of a named family, with its geometry facts."""

    label: str
    F: tuple[int, ...]
    G: tuple[int, ...]
    certificate: SeparationResult
    instances: tuple[ConstraintInstance, ...]


@dataclass(frozen=True)
class NamedFamily:
    family: str
    lines: tuple[FamilyLine, ...]

    def all_instances(self) -> list[ConstraintInstance]:
        return [inst for line in self.lines for inst in line.instances]

    def line(self, label: str) -> FamilyLine:
        for ln in self.lines:
            if ln.label == label:
                return ln
        raise KeyError(label)


def _require_separated(order, gather, avoid, what, *, budget):
    res = separated(order, gather, avoid, budget=budget)
    if res.verdict is Verdict.UNKNOWN:
        raise UndecidableScenario(f"cannot decide separation for {what}", [])
    if res.verdict is not Verdict.SEPARATED:
        raise LayoutMismatch(f"{what}: outputs are not separated from the inputs")
    return res

def _require_jammed(order, gather, avoid, what, *, budget):
    res = separated(order, gather, avoid, budget=budget)
    if res.verdict is Verdict.UNKNOWN:
        raise UndecidableScenario(f"cannot decide separation for {what}", [])
    if res.verdict is not Verdict.NOT_SEPARATED:
        raise LayoutMismatch(f"{what}: the jammer does not cover the outputs")


def named_constraints(
    family: str,
    order: CausalOrder,
    inputs: Sequence[Srv],
    outputs: Sequence[Srv],
    *,
    budget: int = 8,
) -> NamedFamily:
    """Instantiate a named constraint family on concrete SRVs.

    six_config_triangle: three colocated-time agents read outputs a, b,
    c while a jammer input sits between each pair; six equalities.

    compass: two two-bit jammers and three readers on a line; five
    equalities.

    Raises LayoutMismatch when the supplied points cannot support the
    family's presupposed separation pattern.
    """
    inputs = tuple(inputs)
    outputs = tuple(outputs)
    if family == "six_config_triangle":
        if len(inputs) != 3 or len(outputs) != 3:
            raise LayoutMismatch("triangle family needs 3 inputs and 3 outputs")
        # Input i sits opposite output i: it jams the other two readers.
        pair_lines = [
            ("ab_setting_free", (0, 1), (0, 1), 2),
            ("ac_setting_free", (0, 2), (0, 2), 1),
            ("bc_setting_free", (1, 2), (1, 2), 0),
        ]
        single_lines = [
            ("a_setting_free", (0, 1, 2), (0,)),
            ("b_setting_free", (0, 1, 2), (1,)),
            ("c_setting_free", (0, 1, 2), (2,)),
        ]
    elif family == "compass":
        if len(inputs) != 4 or len(outputs) != 3:
            raise LayoutMismatch("compass family needs 4 inputs and 3 outputs")
        if inputs[0].location != inputs[1].location:
            raise LayoutMismatch("compass: first jammer's two bits must be colocated")
        if inputs[2].location != inputs[3].location:
            raise LayoutMismatch("compass: second jammer's two bits must be colocated")
        points = [inputs[0].location, inputs[2].location] + [
            s.location for s in outputs
        ]
        for u, v in itertools.combinations(points, 2):
            if not order.spacelike(u, v):
                raise LayoutMismatch(
                    f"compass: {u!r} and {v!r} are not spacelike separated"
                )
        pair_lines = [
            ("ab_setting_free", (2, 3), (0, 1), 0),
            ("bc_setting_free", (0, 1), (1, 2), 2),
        ]
        single_lines = [
            ("a_setting_free", (0, 1, 2, 3), (0,)),
            ("b_setting_free", (0, 1, 2, 3), (1,)),
            ("c_setting_free", (0, 1, 2, 3), (2,)),
        ]
    else:
        raise KeyError(f"unknown constraint family {family!r}")

    lines = []
    for label, F, G, jammer in pair_lines:
        gather = [outputs[g].location for g in G]
        cert = _require_separated(
            order, gather, [inputs[f].location for f in F], label, budget=budget
        )
        _require_jammed(
            order, gather, [inputs[jammer].location], f"{label} (jam)", budget=budget
        )
        insts = tuple(
            ConstraintInstance(F, G, x, y, cert) for x, y in _move_pairs(inputs, F)
        )
        lines.append(FamilyLine(label, F, G, cert, insts))
    for label, F, G in single_lines:
        gather = [outputs[g].location for g in G]
        cert = _require_separated(
            order, gather, [inputs[f].location for f in F], label, budget=budget
        )
        insts = tuple(
            ConstraintInstance(F, G, x, y, cert) for x, y in _move_pairs(inputs, F)
        )
        lines.append(FamilyLine(label, F, G, cert, insts))
    return NamedFamily(family, tuple(lines))


def check_family(fam: NamedFamily, box: CorrelationBox) -> list[ViolationReport]:
    return check_instances(box, fam.all_instances())
