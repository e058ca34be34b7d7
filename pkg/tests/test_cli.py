import json
import subprocess
import sys
from pathlib import Path

import pytest

from pexpfan import catalog
from pexpfan.cli import run
from pexpfan.fan import resolve
from pexpfan.pexp import pexp_to_json

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"


def invoke(argv, capsys):
    code = run([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


@pytest.fixture()
def data_files(tmp_path):
    """Self-contained copies of the demo inputs plus a corrupted variant."""
    fan = catalog.weighted_p112()
    fan_path = tmp_path / "fan.json"
    fan_path.write_text(json.dumps(fan.to_json()) + "\n")

    xi = catalog.p112_demo_class(fan)
    xi_path = tmp_path / "class.json"
    xi_path.write_text(json.dumps(pexp_to_json(xi)) + "\n")

    spans = catalog.p112_spanning_classes(fan)
    spans_path = tmp_path / "spanning.json"
    spans_path.write_text(json.dumps([pexp_to_json(g) for g in spans]) + "\n")

    cones_path = tmp_path / "cones.json"
    cones_path.write_text(json.dumps([[], [[-1, -2]], [[1, 0], [-1, -2]]]) + "\n")

    corrupted = pexp_to_json(xi)
    corrupted["values"][0]["terms"][0]["exp"] = [5, 0]  # perturb one exponent
    bad_path = tmp_path / "corrupted.json"
    bad_path.write_text(json.dumps(corrupted) + "\n")

    sub = resolve(fan)
    map_path = tmp_path / "resolution.json"
    map_path.write_text(json.dumps(sub.to_json()) + "\n")
    from pexpfan.pexp import pullback

    fine_path = tmp_path / "fine_class.json"
    fine_path.write_text(json.dumps(pexp_to_json(pullback(xi, sub))) + "\n")

    return {
        "fan": fan_path,
        "class": xi_path,
        "spanning": spans_path,
        "cones": cones_path,
        "corrupted": bad_path,
        "map": map_path,
        "fine": fine_path,
        "tmp": tmp_path,
    }


class TestHappyPaths:
    def test_validate_fan(self, data_files, capsys):
        code, out = invoke(["validate-fan", "--fan", data_files["fan"]], capsys)
        assert code == 0
        assert json.loads(out)["status"] == "ok"

    def test_chi_is_pinned_value(self, data_files, capsys):
        code, out = invoke(
            ["chi", "--fan", data_files["fan"], "--pexp", data_files["class"]], capsys
        )
        assert code == 0
        assert json.loads(out)["result"] == {"rank": 2, "terms": []}

    def test_decompose_matches_worked_identity(self, data_files, capsys):
        code, out = invoke(
            [
                "decompose",
                "--fan", data_files["fan"],
                "--pexp", data_files["class"],
                "--basis", data_files["spanning"],
            ],
            capsys,
        )
        assert code == 0
        coeffs = json.loads(out)["result"]["coefficients"]
        assert coeffs[0]["terms"] == [
            {"coeff": 1, "exp": [0, 1]},
            {"coeff": 1, "exp": [1, 0]},
        ]
        assert coeffs[1]["terms"] == [
            {"coeff": 1, "exp": [-2, 1]},
            {"coeff": 1, "exp": [-1, 0]},
        ]
        assert coeffs[2]["terms"] == [
            {"coeff": 1, "exp": [0, 0]},
            {"coeff": 1, "exp": [1, -1]},
        ]

    def test_restrict_text(self, data_files, capsys):
        code, out = invoke(
            [
                "restrict", "--format", "text",
                "--fan", data_files["fan"],
                "--pexp", data_files["class"],
                "--cone", "[[-1,-2]]",
            ],
            capsys,
        )
        assert code == 0
        assert out == "1*e^[0] + 1*e^[1]\n"

    def test_pair_and_gram(self, data_files, capsys):
        code, out = invoke(
            [
                "pair",
                "--fan", data_files["fan"],
                "--pexp", data_files["class"],
                "--cone", "[]",
            ],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["result"] == {"rank": 2, "terms": []}
        code, out = invoke(
            [
                "gram",
                "--fan", data_files["fan"],
                "--functions", data_files["spanning"],
                "--cones", data_files["cones"],
            ],
            capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["rows"] == ["f0", "f1", "f2"]

    def test_resolve_and_descend_roundtrip(self, data_files, capsys):
        code, out = invoke(
            [
                "descend",
                "--map", data_files["map"],
                "--pexp", data_files["fine"],
            ],
            capsys,
        )
        assert code == 0
        got = json.loads(out)["result"]["values"]
        original = json.loads(data_files["class"].read_text())["values"]
        assert got == original

    def test_dual_basis(self, data_files, capsys):
        code, out = invoke(
            [
                "dual-basis",
                "--fan", data_files["fan"],
                "--spanning", data_files["spanning"],
                "--cones", data_files["cones"],
            ],
            capsys,
        )
        assert code == 0
        assert len(json.loads(out)["result"]["functions"]) == 3

    def test_gkm_check_ok(self, data_files, capsys):
        code, out = invoke(
            ["gkm-check", "--fan", data_files["fan"], "--pexp", data_files["class"]],
            capsys,
        )
        assert code == 0


class TestNegativesAndErrors:
    def test_gkm_check_corrupted_names_the_face(self, data_files, capsys):
        code, out = invoke(
            ["gkm-check", "--fan", data_files["fan"], "--pexp", data_files["corrupted"]],
            capsys,
        )
        assert code == 2
        doc = json.loads(out)
        assert doc["status"] == "violation"
        faces = {tuple(v["face"]) for v in doc["violations"]}
        assert faces  # each report names the offending face
        assert all("restriction_a" in v for v in doc["violations"])

    def test_validate_fan_negative(self, tmp_path, capsys):
        bad = tmp_path / "bad_fan.json"
        bad.write_text(json.dumps({
            "rank": 2,
            "rays": [[1, 0], [0, 1], [1, 1]],
            "max_cones": [[0, 1], [0, 2]],
        }))
        code, out = invoke(["validate-fan", "--fan", bad], capsys)
        assert code == 2
        assert json.loads(out)["status"] == "invalid"

    def test_descend_negative_names_coarse_cone(self, tmp_path, capsys):
        from pexpfan.fan import Fan, stellar_subdivision
        from pexpfan.laurent import LaurentPoly
        from pexpfan.pexp import PiecewiseExponential

        coarse = Fan.build(2, [(1, 0), (0, 1)], [(0, 1)])
        sub = stellar_subdivision(coarse, (1, 1))
        one = LaurentPoly.one(2)
        e = LaurentPoly.exponential
        values = []
        for c in sub.fine.maximal_cones:
            rays = {sub.fine.rays[i] for i in c}
            values.append(one + e((1, 2)) if rays == {(1, 0), (1, 1)} else one + e((2, 1)))
        f = PiecewiseExponential.from_values(sub.fine, values)
        map_path = tmp_path / "map.json"
        map_path.write_text(json.dumps(sub.to_json()))
        f_path = tmp_path / "f.json"
        f_path.write_text(json.dumps(pexp_to_json(f)))
        code, out = invoke(["descend", "--map", map_path, "--pexp", f_path], capsys)
        assert code == 2
        doc = json.loads(out)
        assert doc["kind"] == "NotDescendable"
        assert doc["coarse_cone"] == 0

    def test_decompose_not_in_span(self, tmp_path, capsys):
        fan = catalog.projective_line()
        fan_path = tmp_path / "fan.json"
        fan_path.write_text(json.dumps(fan.to_json()))
        cls = catalog.p1_degree_class(fan, 1)
        cls_path = tmp_path / "cls.json"
        cls_path.write_text(json.dumps(pexp_to_json(cls)))
        from pexpfan.pexp import PiecewiseExponential

        basis_path = tmp_path / "basis.json"
        basis_path.write_text(
            json.dumps([pexp_to_json(PiecewiseExponential.constant(fan, 1))])
        )
        code, out = invoke(
            ["decompose", "--fan", fan_path, "--pexp", cls_path, "--basis", basis_path],
            capsys,
        )
        assert code == 2
        assert json.loads(out)["kind"] == "NotInSpan"

    def test_missing_file_is_structural(self, capsys):
        code, out = invoke(["validate-fan", "--fan", "no_such_file.json"], capsys)
        assert code == 1
        assert json.loads(out)["status"] == "error"

    def test_malformed_json_is_structural(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, out = invoke(["validate-fan", "--fan", bad], capsys)
        assert code == 1

    def test_cone_not_in_fan_is_structural(self, data_files, capsys):
        code, out = invoke(
            [
                "restrict",
                "--fan", data_files["fan"],
                "--pexp", data_files["class"],
                "--cone", "[[1,1]]",
            ],
            capsys,
        )
        assert code == 1


class TestDeterminism:
    def test_byte_identical_runs(self, data_files):
        cmd = [
            sys.executable, "-m", "pexpfan", "gram",
            "--fan", str(data_files["fan"]),
            "--functions", str(data_files["spanning"]),
            "--cones", str(data_files["cones"]),
        ]
        a = subprocess.run(cmd, capture_output=True, cwd=REPO)
        b = subprocess.run(cmd, capture_output=True, cwd=REPO)
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout

    def test_shipped_data_round_trip(self, capsys):
        code, out = invoke(
            ["gkm-check", "--pexp", DATA / "p112_class.json"], capsys
        )
        assert code == 0
        emitted = json.loads(out)["result"]
        again = json.dumps(emitted)
        assert json.loads(again) == emitted
