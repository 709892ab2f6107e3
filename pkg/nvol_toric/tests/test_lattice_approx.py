from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convex_core import Halfspace, Polyhedron, polytope_volume
from errors import NvolInputError
from lattice_approx import (
    CertifiedEstimate,
    MonotoneDirection,
    MonotonePiece,
    MonotoneTable,
    certified_volume,
    count_lattice_points,
    dilation_error_bound,
    k0_schedule,
    riemann_gap,
    section_counts,
)

sample_levels = st.integers(min_value=0, max_value=12)


@st.composite
def step_functions(draw):
    """Монотонные ступенчатые функции на [0,1] со значениями в (1/12)Z"""
    breakpoints = sorted(draw(st.sets(st.integers(min_value=1, max_value=23), max_size=5)))
    values = sorted(draw(st.lists(sample_levels, min_size=len(breakpoints) + 1, max_size=len(breakpoints) + 1)))
    if draw(st.booleans()):
        values.reverse()
    return MonotoneTable.from_steps(
        0, [Fraction(b, 24) for b in breakpoints], [Fraction(v, 12) for v in values], 1
    )


@st.composite
def nested_boxes(draw):
    """Пара вложенных прямоугольников в [0,1]^2 с вершинами в (1/12)Z"""
    inner_lo, inner_hi, outer_lo, outer_hi = [], [], [], []
    for _ in range(2):
        a0, a1, b1, b0 = sorted(draw(st.sets(st.integers(min_value=0, max_value=12), min_size=4, max_size=4)))
        outer_lo.append(Fraction(a0, 12))
        inner_lo.append(Fraction(a1, 12))
        inner_hi.append(Fraction(b1, 12))
        outer_hi.append(Fraction(b0, 12))
    return Polyhedron.box(inner_lo, inner_hi), Polyhedron.box(outer_lo, outer_hi)


@st.composite
def corner_boxes(draw):
    """Прямоугольники [0,b] ⊆ [0,1]^2: kΔ ⊆ k'Δ при k ≤ k'"""
    hi = [Fraction(draw(st.integers(min_value=1, max_value=12)), 12) for _ in range(2)]
    return Polyhedron.box([0, 0], hi)


def simplex2() -> Polyhedron:
    return Polyhedron(2, Polyhedron.orthant_halfspaces(2) + (Halfspace((-1, -1), -1),), bounded=True)


class TestLatticeCount:

    def test_unit_square(self):
        assert count_lattice_points(Polyhedron.unit_cube(2), 3) == 16

    def test_simplex(self):
        assert count_lattice_points(simplex2(), 4) == 15

    def test_unit_cube(self):
        assert count_lattice_points(Polyhedron.unit_cube(3), 2) == 27

    def test_segment(self):
        segment = Polyhedron.box([Fraction(1, 3)], [Fraction(2, 3)])
        assert count_lattice_points(segment, 6) == 3

    def test_section_counts(self):
        assert section_counts(simplex2(), 2) == [(0, 3), (Fraction(1, 2), 2), (1, 1)]

    @given(nested_boxes(), st.integers(min_value=1, max_value=15))
    @settings(max_examples=40, deadline=None)
    def test_monotone_under_inclusion(self, boxes, k):
        inner, outer = boxes
        assert count_lattice_points(inner, k) <= count_lattice_points(outer, k)

    @given(corner_boxes(), st.integers(min_value=1, max_value=12))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_dilation(self, body, k):
        assert count_lattice_points(body, k) <= count_lattice_points(body, k + 1)
        assert count_lattice_points(simplex2(), k) <= count_lattice_points(simplex2(), k + 1)

    def test_body_outside_unit_cube(self):
        with pytest.raises(NvolInputError):
            count_lattice_points(Polyhedron.box([0, 0], [2, 1]), 3)

    def test_nonpositive_dilation(self):
        with pytest.raises(NvolInputError):
            count_lattice_points(Polyhedron.unit_cube(2), 0)

    def test_empty_body(self):
        empty = Polyhedron.unit_cube(2).intersect([Halfspace((1, 1), 3)])
        assert count_lattice_points(empty, 5) == 0


class TestSchedule:

    @pytest.mark.parametrize("eps, n, expected", [
        (Fraction(1, 2), 1, 2),
        (Fraction(1, 5), 1, 5),
        (Fraction(1, 2), 2, 30),
        (Fraction(1, 5), 2, 75),
        (Fraction(1, 5), 3, 225),
    ])
    def test_values(self, eps, n, expected):
        assert k0_schedule(eps, n) == expected

    @pytest.mark.parametrize("eps", [0, 1, Fraction(3, 2), -1])
    def test_eps_out_of_range(self, eps):
        with pytest.raises(NvolInputError):
            k0_schedule(eps, 2)

    def test_certified_estimate(self):
        estimate = certified_volume(Polyhedron.unit_cube(2), Fraction(1, 2))
        assert estimate.dilation == 30
        assert estimate.raw_count == 31 ** 2
        assert estimate.value == Fraction(961, 900)
        assert abs(estimate.value - 1) <= estimate.error_bound

    def test_certified_estimate_with_larger_k(self):
        estimate = certified_volume(Polyhedron.unit_cube(2), Fraction(1, 2), 40)
        assert (estimate.dilation, estimate.raw_count) == (40, 41 ** 2)
        assert certified_volume(Polyhedron.unit_cube(2), Fraction(1, 2), 10).dilation == 30

    @pytest.mark.parametrize("k, n, expected", [
        (10, 1, Fraction(1, 10)),
        (30, 2, Fraction(1, 2)),
        (90, 3, Fraction(1, 2)),
        (4, 2, Fraction(15, 4)),
    ])
    def test_dilation_error_bound(self, k, n, expected):
        assert dilation_error_bound(k, n) == expected

    @given(st.integers(min_value=1, max_value=400), st.integers(min_value=1, max_value=3))
    @settings(max_examples=60, deadline=None)
    def test_error_bound_inverts_schedule(self, k, n):
        bound = dilation_error_bound(k, n)
        if bound < 1:
            assert k0_schedule(bound, n) <= k

    def test_uncertified_estimate_rejected(self):
        with pytest.raises(NvolInputError):
            CertifiedEstimate(Fraction(16, 9), Fraction(1, 2), 3, 16, 2)

    @pytest.mark.parametrize("eps", [Fraction(1, 2), Fraction(1, 5)])
    def test_thin_slab_within_bound(self, eps):
        slab = Polyhedron.box([0, Fraction(1, 3)], [1, Fraction(334, 1000)])
        estimate = certified_volume(slab, eps)
        assert abs(estimate.value - polytope_volume(slab)) <= eps


class TestMonotoneTable:

    def test_step_integral_and_gap(self):
        table = MonotoneTable.from_steps(0, ["1/2"], [0, 1], 1)
        assert table.direction == MonotoneDirection.INCREASING
        assert table.integral() == Fraction(1, 2)
        gap = riemann_gap(table, 10)
        assert gap.gap == Fraction(1, 10)
        assert gap.bound == Fraction(1, 5)
        assert gap.holds

    def test_linear_piece(self):
        table = MonotoneTable(Fraction(0), Fraction(1), (MonotonePiece(Fraction(0), Fraction(1), Fraction(0), Fraction(1)),),
                              MonotoneDirection.INCREASING)
        assert table.value_at(Fraction(1, 4)) == Fraction(1, 4)
        assert riemann_gap(table, 10).gap == Fraction(1, 20)

    def test_decreasing_steps(self):
        table = MonotoneTable.from_steps(0, ["1/3"], [1, "1/2"], 1)
        assert table.direction == MonotoneDirection.DECREASING
        assert table.value_at(1) == Fraction(1, 2)

    def test_non_monotone_rejected(self):
        with pytest.raises(NvolInputError):
            MonotoneTable.from_steps(0, ["1/3", "2/3"], [0, 1, 0], 1)

    def test_values_outside_unit_interval(self):
        with pytest.raises(NvolInputError):
            MonotoneTable.from_steps(0, [], [2], 1)

    def test_value_outside_domain(self):
        table = MonotoneTable.from_steps(0, [], [1], 1)
        with pytest.raises(NvolInputError):
            table.value_at(2)

    @given(step_functions(), st.integers(min_value=1, max_value=60))
    @settings(max_examples=80, deadline=None)
    def test_gap_at_most_two_over_k(self, table, k):
        assert riemann_gap(table, k).holds
