import io
import json
from fractions import Fraction

import pytest

from monomial_algebra import MonomialIdeal, Semigroup
from normalized_volume import MONOMIAL_SUFFICIENCY_NOTE, cone_check
from report_writer import jsonable, open_output, render_ideal, render_rat, write_csv, write_json
from singularity import MonomialValuation, SingularityModel

PLANE = Semigroup.affine(2)


class TestRendering:

    @pytest.mark.parametrize("value, places, expected", [
        (Fraction(8, 3), None, "8/3"),
        (Fraction(4), None, "4"),
        (Fraction(8, 3), 3, "2.667"),
        (Fraction(1, 2), 0, "0"),
        (Fraction(3, 2), 0, "2"),
        (Fraction(1, 8), 2, "0.12"),
        (Fraction(-27, 2), 1, "-13.5"),
    ])
    def test_render_rat(self, value, places, expected):
        assert render_rat(value, places) == expected

    def test_render_ideal(self):
        ideal = MonomialIdeal.from_generators(PLANE, [(1, 1), (2, 0), (0, 3)])
        assert render_ideal(ideal) == "y^3;x*y;x^2"


class TestJsonable:

    def test_library_types(self):
        ideal = MonomialIdeal.from_generators(PLANE, [(1, 0), (0, 1)])
        document = jsonable({
            "ideal": ideal,
            "weights": MonomialValuation((2, 1)),
            "model": SingularityModel.affine(2, [Fraction(1, 2), 0]),
            "flags": (True, None),
        })
        assert document == {
            "ideal": {"generators": [[0, 1], [1, 0]], "monomials": "y;x"},
            "weights": ["2", "1"],
            "model": "(A^2, 1/2·H1)",
            "flags": [True, None],
        }

    def test_dataclass_with_decimals(self):
        document = jsonable(cone_check(3, 2), decimal_places=2)
        assert document["vertex_nvol"] == "13.50"
        assert document["equal"] is True

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            jsonable(object())


class TestWriters:

    def test_json_has_note(self):
        stream = io.StringIO()
        write_json({"nvol": Fraction(4, 3)}, stream, MONOMIAL_SUFFICIENCY_NOTE)
        document = json.loads(stream.getvalue())
        assert document == {"nvol": "4/3", "note": MONOMIAL_SUFFICIENCY_NOTE}

    def test_csv_layout(self):
        stream = io.StringIO()
        write_csv(("label", "nvol", "special"), [("a", Fraction(8, 3), False), ("b", Fraction(2), True)], stream, "note")
        assert stream.getvalue() == "label,nvol,special\na,8/3,false\nb,2,true\n# note\n"

    def test_csv_renders_ideals(self):
        stream = io.StringIO()
        ideal = MonomialIdeal.from_generators(PLANE, [(2, 0), (1, 1), (0, 2)])
        write_csv(("k", "argmin"), [(2, ideal)], stream, "note")
        assert stream.getvalue().splitlines()[1] == "2,y^2;x*y;x^2"

    def test_open_output_file(self, tmp_path):
        target = tmp_path / "out.csv"
        with open_output(str(target)) as stream:
            stream.write("a\n")
        assert target.read_bytes() == b"a\n"
