from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import NvolInputError
from monomial_algebra import MonomialIdeal, Semigroup, ideal_power
from singularity import (
    MonomialValuation,
    SingularityModel,
    _integer_root,
    els_check,
    extremal_valuation,
    izumi_constant,
    log_discrepancy,
    normalized_volume_of_valuation,
    properness_constant,
    valuation_ideal,
    valuation_volume,
    value_on_ideal,
    volume_by_colength,
)

weights = st.fractions(min_value=Fraction(1, 4), max_value=Fraction(4), max_denominator=4)


class TestSingularityModel:

    def test_affine_defaults(self, plane):
        assert plane.boundary == (0, 0)
        assert plane.is_smooth_ambient
        assert not plane.has_boundary
        assert plane.describe() == "A^2"

    def test_boundary_description(self, half_plane):
        assert half_plane.describe() == "(A^2, 1/2·H1)"
        assert half_plane.log_discrepancy_vector() == (Fraction(1, 2), 1)

    @pytest.mark.parametrize("boundary", [[1, 0], [Fraction(-1, 2), 0], [Fraction(3, 2), 0]])
    def test_coefficients_outside_klt_range(self, boundary):
        with pytest.raises(NvolInputError):
            SingularityModel.affine(2, boundary)

    def test_wrong_boundary_length(self):
        with pytest.raises(NvolInputError):
            SingularityModel.affine(2, [Fraction(1, 2)] * 3)

    def test_boundary_on_quotient_rejected(self):
        with pytest.raises(NvolInputError):
            SingularityModel(Semigroup.cyclic_quotient((1, 1), 2), (Fraction(1, 2), 0))

    def test_pseudo_reflection_rejected(self):
        with pytest.raises(NvolInputError):
            SingularityModel.cyclic_quotient((1, 0), 2)

    def test_non_faithful_action_rejected(self):
        with pytest.raises(NvolInputError):
            SingularityModel.cyclic_quotient((2, 2), 4)

    def test_quotient(self, a2_singularity):
        assert a2_singularity.lattice_index == 3
        assert not a2_singularity.is_smooth_ambient
        assert a2_singularity.maximal_ideal().generators == ((0, 3), (1, 1), (3, 0))


class TestValuation:

    def test_non_positive_weights_rejected(self):
        with pytest.raises(NvolInputError):
            MonomialValuation((1, 0))

    def test_normalized(self, even_plane):
        assert MonomialValuation((2, 4)).normalized(Semigroup.affine(2)).weights == (1, 2)
        assert MonomialValuation((1, 1)).normalized(even_plane.semigroup).weights == (Fraction(1, 2), Fraction(1, 2))

    def test_str(self):
        assert str(MonomialValuation(("1/2", 3))) == "v(1/2, 3)"

    @pytest.mark.parametrize("w, boundary, expected", [
        ((1, 1), (0, 0), 2),
        ((2, 1), (Fraction(1, 2), 0), 2),
        ((1, 2, 3), (0, 0, 0), 6),
    ])
    def test_log_discrepancy(self, w, boundary, expected):
        assert log_discrepancy(MonomialValuation(w), SingularityModel.affine(len(w), boundary)) == expected

    def test_log_discrepancy_on_quotient(self, even_plane):
        assert log_discrepancy(MonomialValuation((1, 1)), even_plane) == 2

    def test_dimension_mismatch(self, plane):
        with pytest.raises(NvolInputError):
            log_discrepancy(MonomialValuation((1, 1, 1)), plane)


class TestValuationIdeals:

    def test_level_three(self, plane):
        assert valuation_ideal(MonomialValuation((1, 1)), 3, plane) == ideal_power(plane.maximal_ideal(), 3)

    def test_weighted(self, plane):
        assert valuation_ideal(MonomialValuation((1, 2)), 2, plane).generators == ((0, 1), (2, 0))

    def test_quotient(self, even_plane):
        assert valuation_ideal(MonomialValuation((1, 1)), 2, even_plane).generators == ((0, 2), (1, 1), (2, 0))

    def test_rational_level(self, plane):
        assert valuation_ideal(MonomialValuation((1, 1)), Fraction(3, 2), plane).generators == ((0, 2), (1, 1), (2, 0))

    def test_non_positive_level(self, plane):
        with pytest.raises(NvolInputError):
            valuation_ideal(MonomialValuation((1, 1)), 0, plane)

    def test_value_on_ideal(self, plane):
        v = MonomialValuation((1, 2))
        curve = MonomialIdeal.from_generators(plane.semigroup, [(2, 0), (0, 3)])
        assert value_on_ideal(MonomialValuation((1, 1)), plane.maximal_ideal()) == 1
        assert value_on_ideal(v, curve) == 2
        assert value_on_ideal(v, ideal_power(curve, 2)) == 4


class TestVolume:

    @pytest.mark.parametrize("w, expected", [((1, 1), 1), ((2, 3), Fraction(1, 6)), ((1, 2, 3), Fraction(1, 6))])
    def test_smooth(self, w, expected):
        assert valuation_volume(MonomialValuation(w), SingularityModel.affine(len(w))) == expected

    def test_quotient(self, even_plane):
        assert valuation_volume(MonomialValuation((1, 1)), even_plane) == Fraction(1, 2)

    @pytest.mark.parametrize("w", [(1, 1), (2, 3)])
    def test_colength_approximation_converges(self, plane, w):
        v = MonomialValuation(w)
        exact = valuation_volume(v, plane)
        gaps = [abs(volume_by_colength(v, m, plane) - exact) for m in (5, 10, 20)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_colength_values(self, plane):
        v = MonomialValuation((2, 3))
        assert volume_by_colength(v, 5, plane) == Fraction(8, 25)
        assert volume_by_colength(v, 20, plane) == Fraction(1, 5)

    @pytest.mark.parametrize("w, boundary, expected", [
        ((1, 1), (0, 0), 4),
        ((2, 1), (Fraction(1, 2), 0), 2),
        ((1, 2), (0, 0), Fraction(9, 2)),
    ])
    def test_normalized_volume(self, w, boundary, expected):
        model = SingularityModel.affine(2, boundary)
        assert normalized_volume_of_valuation(MonomialValuation(w), model) == expected

    def test_normalized_volume_on_quotient(self, even_plane):
        assert normalized_volume_of_valuation(MonomialValuation((1, 1)), even_plane) == 2

    @given(weights, weights, st.fractions(min_value=Fraction(1, 10), max_value=Fraction(10), max_denominator=10))
    @settings(max_examples=50, deadline=None)
    def test_rescaling_invariance(self, a, b, t):
        model = SingularityModel.affine(2, [Fraction(1, 3), 0])
        v = MonomialValuation((a, b))
        assert normalized_volume_of_valuation(v.scaled(t), model) == normalized_volume_of_valuation(v, model)


class TestConstants:

    def test_extremal(self, half_plane):
        assert extremal_valuation(half_plane).weights == (2, 1)

    def test_izumi_and_properness(self, half_plane, plane):
        assert izumi_constant(half_plane) == 2
        assert properness_constant(half_plane) == Fraction(1, 2)
        assert izumi_constant(plane) == 1
        assert properness_constant(plane) == 1

    @given(weights, weights)
    @settings(max_examples=50, deadline=None)
    def test_properness_inequality(self, a, b):
        model = SingularityModel.affine(2, [Fraction(1, 2), 0])
        v = MonomialValuation((a, b))
        bound = properness_constant(model) * log_discrepancy(v, model) / min(a, b)
        assert normalized_volume_of_valuation(v, model) >= bound


class TestEls:

    def test_integer_root(self):
        assert _integer_root(10 ** 12, 2) == 10 ** 6
        assert _integer_root(26, 3) == 2
        assert _integer_root(27, 3) == 3
        assert _integer_root(0, 4) == 0

    def test_integer_root_beyond_float_range(self):
        assert _integer_root(10 ** 400, 4) == 10 ** 100
        assert _integer_root(3 ** 1000 - 1, 5) == 3 ** 200 - 1
        assert _integer_root(10 ** 700 + 1, 2) == 10 ** 350

    @given(st.integers(min_value=0, max_value=10 ** 60), st.integers(min_value=1, max_value=6))
    @settings(max_examples=100, deadline=None)
    def test_integer_root_brackets(self, x, n):
        r = _integer_root(x, n)
        assert r ** n <= x < (r + 1) ** n

    def test_maximal_ideal_powers(self, plane):
        report = els_check(MonomialValuation((1, 1)), 5, plane)
        assert report.multiplicity == 25
        assert report.root_lower_bound == 1
        assert report.log_discrepancy_ceiling == 2
        assert report.bound == 49
        assert report.holds

    def test_valuation_is_normalized(self, plane):
        report = els_check(MonomialValuation((2, 4)), 3, plane)
        assert report.valuation.weights == (1, 2)
        assert report.holds

    @given(weights, weights, st.integers(min_value=1, max_value=8))
    @settings(max_examples=30, deadline=None)
    def test_holds_on_plane(self, a, b, m):
        assert els_check(MonomialValuation((a, b)), m, SingularityModel.affine(2)).holds

    def test_boundary_model_rejected(self, half_plane):
        with pytest.raises(NvolInputError):
            els_check(MonomialValuation((1, 1)), 2, half_plane)

    def test_quotient_rejected(self, even_plane):
        with pytest.raises(NvolInputError):
            els_check(MonomialValuation((1, 1)), 2, even_plane)

    def test_level_must_be_positive(self, plane):
        with pytest.raises(NvolInputError):
            els_check(MonomialValuation((1, 1)), 0, plane)
