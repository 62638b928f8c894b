from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from causalbox.geometry import (
    CycleError,
    DomainError,
    Event,
    FiniteOrder,
    GeometryError,
    Minkowski,
    TerminatedDiagram,
    event_from_null,
    null_coords,
)

coord = st.fractions(min_value=-8, max_value=8, max_denominator=4)


def ev(t, *xs):
    return Event.at(t, *xs)


class TestMinkowski:
    def test_basic_precedence_includes_lightlike(self):
        m = Minkowski(1)
        assert m.strictly_precedes(ev(0, 0), ev(1, 0))
        assert m.strictly_precedes(ev(0, 0), ev(1, 1))  # boundary counts
        assert not m.strictly_precedes(ev(0, 0), ev(1, 2))
        assert not m.strictly_precedes(ev(1, 0), ev(0, 0))
        assert not m.strictly_precedes(ev(0, 0), ev(0, 0))

    def test_classify(self):
        m = Minkowski(2)
        assert m.classify(ev(0, 0, 0), ev(2, 1, 1)) == "precedes"
        assert m.classify(ev(2, 1, 1), ev(0, 0, 0)) == "succeeds"
        assert m.classify(ev(0, 0, 0), ev(0, 3, 0)) == "spacelike"
        assert m.classify(ev(0, 3, 0), ev(0, 3, 0)) == "equal"

    def test_dimension_validation(self):
        m = Minkowski(2)
        with pytest.raises(GeometryError):
            m.strictly_precedes(ev(0, 0), ev(1, 0))
        with pytest.raises(GeometryError):
            Minkowski(0)

    @given(st.lists(st.tuples(coord, coord, coord), min_size=1, max_size=5))
    def test_common_future_dominates_everyone(self, pts):
        m = Minkowski(2)
        events = [ev(t, x, y) for t, x, y in pts]
        q = m.common_future(events)
        assert q is not None
        assert all(m.causally_precedes(e, q) for e in events)

    @given(
        st.tuples(coord, coord),
        st.tuples(coord, coord),
        st.tuples(coord, coord),
    )
    def test_order_axioms(self, a, b, c):
        m = Minkowski(1)
        ea, eb, ec = (ev(t, x) for t, x in (a, b, c))
        assert not m.strictly_precedes(ea, ea)
        if m.strictly_precedes(ea, eb):
            assert not m.strictly_precedes(eb, ea)
        if m.strictly_precedes(ea, eb) and m.strictly_precedes(eb, ec):
            assert m.strictly_precedes(ea, ec)

    def test_null_coordinate_roundtrip(self):
        e = ev(Fraction(3, 2), Fraction(-1, 4))
        u, v = null_coords(e)
        assert event_from_null(u, v) == e
        # precedence is the componentwise order in (u, v)
        m = Minkowski(1)
        f = ev(2, 0)
        uf, vf = null_coords(f)
        assert m.causally_precedes(e, f) == (u <= uf and v <= vf)


class TestFiniteOrder:
    def test_transitive_closure(self):
        fo = FiniteOrder([("a", "b"), ("b", "c")])
        assert fo.strictly_precedes(Event.named("a"), Event.named("c"))
        assert not fo.strictly_precedes(Event.named("c"), Event.named("a"))

    def test_cycle_rejection(self):
        with pytest.raises(CycleError):
            FiniteOrder([("a", "b"), ("b", "a")])
        with pytest.raises(CycleError):
            FiniteOrder([("a", "a")])

    def test_isolated_elements(self):
        fo = FiniteOrder([("a", "b")], elements=["z"])
        assert Event.named("z").label in {e for e in fo.elements}
        assert fo.spacelike(Event.named("z"), Event.named("a"))

    def test_common_future_may_not_exist(self):
        fo = FiniteOrder([("a", "b"), ("a", "c")])
        assert fo.common_future([Event.named("b"), Event.named("c")]) is None
        top = fo.common_future([Event.named("a"), Event.named("b")])
        assert top == Event.named("b")

    def test_unknown_element_rejected(self):
        fo = FiniteOrder([("a", "b")])
        with pytest.raises(GeometryError):
            fo.strictly_precedes(Event.named("a"), Event.named("nope"))


class TestTerminatedDiagram:
    def vee(self):
        return TerminatedDiagram([(-4, 3), (0, 1), (4, 3)])

    def test_sigma_piecewise_and_extension(self):
        td = self.vee()
        assert td.sigma(0) == 1
        assert td.sigma(2) == 2
        assert td.sigma(-2) == 2
        assert td.sigma(100) == 3
        assert td.sigma(-100) == 3

    def test_domain_is_strictly_below_boundary(self):
        td = self.vee()
        assert td.in_domain(ev(0, 0))
        assert not td.in_domain(ev(1, 0))  # on the boundary
        assert not td.in_domain(ev(5, 0))
        with pytest.raises(DomainError):
            td.validate_event(ev(1, 0))

    def test_rejects_lightlike_or_unsorted_boundary(self):
        with pytest.raises(GeometryError):
            TerminatedDiagram([(0, 0), (1, 1)])  # slope 1
        with pytest.raises(GeometryError):
            TerminatedDiagram([(2, 0), (0, 0)])
        with pytest.raises(GeometryError):
            TerminatedDiagram([])

    def test_precedence_matches_ambient_on_domain(self):
        td = self.vee()
        m = Minkowski(1)
        a, b = ev(0, -1), ev(Fraction(1, 2), Fraction(-3, 4))
        assert td.strictly_precedes(a, b) == m.strictly_precedes(a, b)

    def test_phi_strictly_decreasing(self):
        td = self.vee()
        u0, v0 = Fraction(-1), Fraction(1, 2)
        base = td.phi(u0, v0)
        for du, dv in [(1, 0), (0, 1), (2, 3)]:
            assert td.phi(u0 + du, v0 + dv) < base

    def test_common_future_is_corner_or_nothing(self):
        td = self.vee()
        inside = [ev(0, 4), ev(0, 8)]
        q = td.common_future(inside)
        assert q == ev(2, 6)
        # opposite sides of the dip cannot gather before the boundary
        assert td.common_future([ev(0, 4), ev(0, -2)]) is None
