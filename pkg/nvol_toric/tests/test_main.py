import json
import os

import pytest

from conftest import GOLDEN_DIR, data_path
from config import EXIT_BUDGET, EXIT_INPUT_ERROR, EXIT_OK, THREADS_ENV, resolve_threads
from errors import NvolInputError
from main import main, registry_fingerprint
from normalized_volume import MONOMIAL_SUFFICIENCY_NOTE


def golden(name: str) -> bytes:
    with open(os.path.join(GOLDEN_DIR, name), "rb") as f:
        return f.read()


def run_json(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


class TestGoldenCsv:

    @pytest.mark.parametrize("family, expected", [
        ("boundary_a2.json", "family_boundary_a2.csv"),
        ("quotient_a2.json", "family_quotient_a2.csv"),
    ])
    def test_family_sweep(self, tmp_path, family, expected):
        target = tmp_path / "out.csv"
        code = main(["--format", "csv", "--output", str(target), "sweep", "--family", data_path("families", family)])
        assert code == EXIT_OK
        assert target.read_bytes() == golden(expected)

    def test_cone_check(self, tmp_path):
        target = tmp_path / "cone.csv"
        assert main(["--format", "csv", "--output", str(target), "cone-check", "-n", "3", "-d", "2"]) == EXIT_OK
        assert target.read_bytes() == golden("cone_check_3_2.csv")

    def test_hilbert_samuel(self, tmp_path):
        target = tmp_path / "hs.csv"
        code = main(["--format", "csv", "--output", str(target), "hs",
                     "--model", data_path("models", "a2.json"), "--ideal", data_path("ideals", "x2_y3.json")])
        assert code == EXIT_OK
        assert target.read_bytes() == golden("hs_x2_y3.csv")

    def test_report_directory(self, tmp_path):
        code = main(["report", "--dir", str(tmp_path / "plots"),
                     "--family", data_path("families", "quotient_a2.json"),
                     "--model", data_path("models", "a2.json"), "--ideal", data_path("ideals", "x2_y3.json"),
                     "--sweep", "2..3"])
        assert code == EXIT_OK
        assert (tmp_path / "plots" / "family_quotient_a2.csv").read_bytes() == golden("family_quotient_a2.csv")
        assert (tmp_path / "plots" / "hs.csv").read_bytes() == golden("hs_x2_y3.csv")
        sweep = (tmp_path / "plots" / "ncolength_sweep.csv").read_text(encoding="utf-8").splitlines()
        assert sweep[0] == "k,value,lower,upper,argmin"
        assert sweep[1] == "2,6,4,6,y^2;x*y;x^2"


class TestJsonCommands:

    def test_colength(self, capsys):
        code, document = run_json(capsys, "colength", "--model", data_path("models", "a2.json"),
                                  "--ideal", data_path("ideals", "x3_xy_y2.json"))
        assert code == EXIT_OK
        assert document["colength"] == 4
        assert document["note"] == MONOMIAL_SUFFICIENCY_NOTE

    def test_multiplicity_on_quotient(self, capsys):
        _, document = run_json(capsys, "mult", "--model", data_path("models", "a2_mu3_12.json"),
                               "--ideal", data_path("ideals", "m_mu3_12.json"))
        assert document["multiplicity"] == "2"

    def test_lct(self, capsys):
        _, document = run_json(capsys, "lct", "--model", data_path("models", "a2.json"),
                               "--ideal", data_path("ideals", "x2_y3.json"))
        assert document["lct"] == "5/6"

    def test_nvol_weights(self, capsys):
        _, document = run_json(capsys, "nvol", "--model", data_path("models", "a2_mu3_11.json"))
        assert document["nvol"] == "4/3"

    def test_nvol_decimal(self, capsys):
        _, document = run_json(capsys, "--decimal", "4", "nvol", "--model", data_path("models", "a2_mu3_11.json"))
        assert document["nvol"] == "1.3333"

    def test_ideal_search_budget(self, capsys):
        code, document = run_json(capsys, "nvol", "--model", data_path("models", "a2.json"),
                                  "--method", "ideal-search", "--box", "4", "--budget", "2")
        assert code == EXIT_BUDGET
        assert document["exhaustive"] is False

    def test_valuation(self, capsys):
        _, document = run_json(capsys, "valuation", "--model", data_path("models", "a2_half_h1.json"),
                               "--weights", "2,1")
        assert (document["A"], document["vol"], document["nvol"]) == ("2", "1/2", "2")

    def test_valuation_single_quantity(self, capsys):
        _, document = run_json(capsys, "valuation", "--model", data_path("models", "a2.json"),
                               "--weights", "1,2", "--A")
        assert document["A"] == "3"
        assert "vol" not in document

    def test_ncolength(self, capsys):
        code, document = run_json(capsys, "ncolength", "--model", data_path("models", "a2.json"), "-k", "2")
        assert code == EXIT_OK
        assert document["result"]["value"] == "6"
        assert document["result"]["argmin"]["monomials"] == "y^2;x*y;x^2"

    def test_ncolength_budget(self, capsys):
        code, _ = run_json(capsys, "ncolength", "--model", data_path("models", "a2.json"), "-k", "4",
                           "--budget", "1")
        assert code == EXIT_BUDGET

    def test_order(self, capsys):
        _, document = run_json(capsys, "order", "--model", data_path("models", "a2_mu3_12.json"),
                               "--exponent", "4,1")
        assert (document["ord"], document["ord_hat"]) == (2, "2")

    def test_closure(self, capsys):
        _, document = run_json(capsys, "closure", "--model", data_path("models", "a2.json"),
                               "--ideal", data_path("ideals", "x2_y2.json"))
        assert document["closure"]["generators"] == [[0, 2], [1, 1], [2, 0]]

    def test_lech(self, capsys):
        code, document = run_json(capsys, "lech", "--model", data_path("models", "a2.json"),
                                  "--ideal", data_path("ideals", "x4_xy3_y4.json"))
        assert code == EXIT_OK
        assert document["holds"] is True

    def test_lattice_count(self, capsys):
        code, document = run_json(capsys, "lattice-count", "--polytope", data_path("polytopes", "simplex2.json"),
                                  "-k", "4")
        assert code == EXIT_OK
        assert set(document) == {"count", "value", "error_bound", "k"}
        assert (document["count"], document["value"], document["error_bound"], document["k"]) \
            == (15, "15/16", "15/4", 4)

    def test_certified_estimate(self, capsys):
        _, document = run_json(capsys, "lattice-count", "--polytope", data_path("polytopes", "unit_square.json"),
                               "--certify", "1/2")
        assert set(document) == {"count", "value", "error_bound", "k"}
        assert (document["count"], document["value"], document["error_bound"], document["k"]) \
            == (961, "961/900", "1/2", 30)

    def test_certified_estimate_keeps_larger_k(self, capsys):
        _, document = run_json(capsys, "lattice-count", "--polytope", data_path("polytopes", "unit_square.json"),
                               "-k", "40", "--certify", "1/2")
        assert (document["count"], document["k"]) == (41 * 41, 40)

    def test_riemann(self, capsys):
        code, document = run_json(capsys, "riemann", "--function", data_path("functions", "step_half.json"),
                                  "-k", "4")
        assert code == EXIT_OK
        assert (document["integral"], document["gap"], document["bound"]) == ("1/2", "1/4", "1/2")
        assert document["holds"] is True

    def test_verify(self, capsys):
        code, document = run_json(capsys, "verify", "cone-23", "--seed", "5")
        assert code == EXIT_OK
        assert document["passed"] is True
        assert (document["prng"], document["seed"]) == ("PCG64", 5)


class TestExitCodes:

    def test_missing_file(self, tmp_path):
        assert main(["colength", "--model", str(tmp_path / "none.json"),
                     "--ideal", data_path("ideals", "m_a2.json")]) == EXIT_INPUT_ERROR

    def test_malformed_json(self, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text("{\"dim\": 2,", encoding="utf-8")
        assert main(["nvol", "--model", str(broken)]) == EXIT_INPUT_ERROR

    def test_infeasible_window(self):
        assert main(["ncolength", "--model", data_path("models", "a2.json"), "-k", "2", "-c", "9/10"]) \
            == EXIT_INPUT_ERROR

    def test_inadmissible_cone(self):
        assert main(["cone-check", "-n", "2", "-d", "2"]) == EXIT_INPUT_ERROR

    def test_unknown_suite(self):
        assert main(["verify", "nothing"]) == EXIT_INPUT_ERROR

    def test_bad_sweep_range(self):
        assert main(["ncolength", "--model", data_path("models", "a2.json"), "--sweep", "5..2"]) == EXIT_INPUT_ERROR

    def test_non_primary_ideal(self, tmp_path):
        path = tmp_path / "ideal.json"
        path.write_text(json.dumps({"generators": [[2, 0], [1, 1]]}), encoding="utf-8")
        assert main(["colength", "--model", data_path("models", "a2.json"), "--ideal", str(path)]) \
            == EXIT_INPUT_ERROR

    def test_special_member_not_minimal(self, tmp_path, capsys):
        family = {
            "special": "smooth",
            "members": [
                {"label": "smooth", "model": {"dim": 2}},
                {"label": "even", "model": {"dim": 2, "congruence": {"weights": [1, 1], "modulus": 2}}},
            ],
        }
        path = tmp_path / "family.json"
        path.write_text(json.dumps(family), encoding="utf-8")
        code, document = run_json(capsys, "sweep", "--family", str(path))
        assert code == EXIT_OK
        assert document["special_is_min"] is False

    def test_lattice_count_needs_dilation(self):
        assert main(["lattice-count", "--polytope", data_path("polytopes", "simplex2.json")]) == EXIT_INPUT_ERROR

    def test_malformed_congruence(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(json.dumps({"dim": 2, "congruence": {"weights": [1, 1], "modulus": "2"}}), encoding="utf-8")
        assert main(["nvol", "--model", str(path)]) == EXIT_INPUT_ERROR

    def test_no_command(self):
        assert main([]) == EXIT_INPUT_ERROR


class TestVersionAndThreads:

    def test_version(self, capsys):
        assert main(["--version"]) == EXIT_OK
        out = capsys.readouterr().out
        assert registry_fingerprint() in out
        assert len(registry_fingerprint()) == 16

    def test_threads_from_environment(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "3")
        assert resolve_threads() == 3
        assert resolve_threads(2) == 2

    def test_bad_threads_environment(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "many")
        with pytest.raises(NvolInputError):
            resolve_threads()

    def test_family_sweep_independent_of_threads(self, tmp_path):
        target = tmp_path / "out.csv"
        code = main(["--threads", "2", "--format", "csv", "--output", str(target),
                     "sweep", "--family", data_path("families", "quotient_a2.json")])
        assert code == EXIT_OK
        assert target.read_bytes() == golden("family_quotient_a2.csv")
