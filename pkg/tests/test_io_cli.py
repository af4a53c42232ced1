import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wpinv import cli
from wpinv.corpus import replay_manifest, run_corpus
from wpinv.io import (
    MatrixParseError,
    RunReport,
    format_cell,
    parse_cell,
    read_csv_text,
    read_matrix,
    write_matrix,
)
from wpinv.testkit import penrose_instance

def write_csv(path, rows):
    path.write_text("\n".join(",".join(r) for r in rows) + "\n")
    return str(path)


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else None


class TestCells:
    @pytest.mark.parametrize(
        "text, value",
        [("1", 1), ("-2.5", -2.5), ("1+2i", 1 + 2j), ("1e-3-4.5e2i", 1e-3 - 450j), (".5+.25i", 0.5 + 0.25j)],
    )
    def test_parse(self, text, value):
        assert parse_cell(text) == value

    @pytest.mark.parametrize("text", ["1 + 2i", "i", "1+i", "abc", "1+2j"])
    def test_reject(self, text):
        with pytest.raises(ValueError):
            parse_cell(text)

    @given(st.complex_numbers(allow_nan=False, allow_infinity=False))
    def test_round_trip(self, z):
        back = parse_cell(format_cell(z))
        assert back == z
        assert np.signbit(back.imag) == np.signbit(z.imag)


class TestFiles:
    @pytest.mark.parametrize("suffix", [".json", ".csv"])
    @given(data=st.data())
    def test_round_trip(self, tmp_path_factory, suffix, data):
        n = data.draw(st.integers(1, 4))
        m = data.draw(st.integers(1, 4))
        M = data.draw(arrays(np.complex128, (n, m), elements=st.complex_numbers(allow_nan=False, allow_infinity=False)))
        path = tmp_path_factory.mktemp("rt") / f"M{suffix}"
        write_matrix(path, M)
        back = read_matrix(path)
        np.testing.assert_array_equal(back, M)
        text = path.read_text()
        write_matrix(path, back)
        assert path.read_text() == text

    def test_csv_line_number(self):
        with pytest.raises(MatrixParseError) as info:
            read_csv_text("1,2\n3,4\n5,x\n")
        assert info.value.line == 3 and "line 3" in str(info.value)

    def test_csv_ragged(self):
        with pytest.raises(MatrixParseError) as info:
            read_csv_text("1,2\n3\n")
        assert info.value.line == 2

    def test_json_size_mismatch(self, tmp_path):
        p = tmp_path / "a.json"
        p.write_text(json.dumps({"rows": 2, "cols": 2, "data": [[1, 0]]}))
        with pytest.raises(MatrixParseError):
            read_matrix(p)

    def test_report_round_trip(self):
        r = RunReport(["wpinv", "pinv"], "abc", {"x": 1}, {"r": [1e-17]}, {"t": 1e-10}, 3, ["n"])
        assert RunReport.from_json(r.to_json()) == r


@pytest.fixture
def files(tmp_path):
    return {
        "A": write_csv(tmp_path / "A.csv", [["1", "0"], ["0", "0"]]),
        "E": write_csv(tmp_path / "E.csv", [["2", "1"], ["1", "1"]]),
        "I": write_csv(tmp_path / "I.csv", [["1", "0"], ["0", "1"]]),
        "J": write_csv(tmp_path / "J.csv", [["0", "1"], ["0", "0"]]),
        "bad": write_csv(tmp_path / "bad.csv", [["1", "0"], ["0", "1+"]]),
        "indef": write_csv(tmp_path / "indef.csv", [["1", "2"], ["2", "1"]]),
        "idem": write_csv(tmp_path / "idem.csv", [["1", "1"], ["0", "0"]]),
        "W": write_csv(tmp_path / "W.csv", [["1", "1"], ["1", "2"]]),
        "D": write_csv(tmp_path / "D.csv", [["1", "0"], ["0", "-3"]]),
        "dir": tmp_path,
    }


def matrix(d):
    return np.array([complex(re, im) for re, im in d["data"]]).reshape(d["rows"], d["cols"])


class TestCommands:
    def test_pinv_writes_matrix(self, capsys, files):
        out = files["dir"] / "B.json"
        code, rep = run(capsys, "pinv", files["A"], "--matrix-out", out)
        assert code == 0 and len(rep["residuals"]["penrose"]) == 4
        np.testing.assert_allclose(read_matrix(out), [[1, 0], [0, 0]])

    def test_pinv_honors_cutoff(self, capsys, tmp_path):
        p = write_csv(tmp_path / "S.csv", [["1", "0"], ["0", "1e-9"]])
        code, rep = run(capsys, "pinv", p, "--tol", "1e-8")
        assert code == 0 and rep["tolerances"]["cutoff"] == 1e-8
        np.testing.assert_allclose(matrix(rep["outputs"]["B"]), np.diag([1, 0]))

    def test_parse_error_exit_2(self, capsys, files):
        code, rep = run(capsys, "pinv", files["bad"])
        assert code == 2 and "line 2" in rep["notes"][0]

    def test_missing_file_exit_2(self, capsys, files):
        code, _ = run(capsys, "pinv", files["dir"] / "nope.json")
        assert code == 2

    def test_wpinv_example(self, capsys, files):
        code, rep = run(capsys, "wpinv", files["A"], "--weights", files["E"], files["I"])
        assert code == 0
        np.testing.assert_allclose(matrix(rep["outputs"]["B"]), [[1, 0.5], [0, 0]], atol=1e-14)
        assert set(rep["outputs"]) >= {"B", "P", "Q"}

    def test_wpinv_projector_route(self, capsys, files):
        code, rep = run(capsys, "wpinv", files["A"], "--weights", files["E"], files["I"], "--via", "projectors")
        assert code == 0
        np.testing.assert_allclose(matrix(rep["outputs"]["B"]), [[1, 0.5], [0, 0]], atol=1e-14)

    def test_wpinv_check_unique_random(self, capsys, tmp_path):
        A, E, F = penrose_instance(5, 3)
        paths = []
        for name, M in (("A", A), ("E", E.W), ("F", F.W)):
            write_matrix(tmp_path / f"{name}.json", M)
            paths.append(tmp_path / f"{name}.json")
        code, rep = run(capsys, "wpinv", paths[0], "--weights", paths[1], paths[2], "--check-unique")
        assert code == 0 and rep["residuals"]["cross_path_gap"] <= 1e-9

    def test_wpinv_bad_weight_exit_4(self, capsys, files):
        code, rep = run(capsys, "wpinv", files["A"], "--weights", files["indef"], files["I"])
        assert code == 4 and rep["exit_status"] == 4

    def test_group(self, capsys, files):
        code, rep = run(capsys, "group", files["J"])
        assert code == 0 and rep["outputs"]["exists"] is False
        code, rep = run(capsys, "group", files["idem"])
        np.testing.assert_allclose(matrix(rep["outputs"]["sharp"]), [[1, 1], [0, 0]], atol=1e-14)

    def test_ep_all_true(self, capsys, files):
        code, rep = run(capsys, "ep", files["idem"], "--weights", files["W"], files["W"], "--k", 1, "--l", 1, "--lambda", "2,0")
        assert code == 0 and rep["outputs"]["clauses"]["consensus"] == "all-true"

    def test_ep_all_false(self, capsys, files):
        code, rep = run(capsys, "ep", files["idem"])
        assert code == 0 and rep["outputs"]["clauses"]["consensus"] == "all-false"

    def test_ep_nilpotent_note(self, capsys, files):
        code, rep = run(capsys, "ep", files["J"])
        assert code == 0 and rep["outputs"]["weighted_ep"] is False
        assert any("battery skipped" in n for n in rep["notes"])

    def test_hermitian_spectral(self, capsys, files):
        code, rep = run(capsys, "hermitian", files["E"], "--norm", "2")
        assert code == 0 and rep["outputs"]["hermitian"]["verdict"] is True

    def test_hermitian_jordan(self, capsys, files):
        code, rep = run(capsys, "hermitian", files["J"], "--t-max", "1")
        assert code == 0 and rep["outputs"]["hermitian"]["verdict"] is False
        assert rep["residuals"]["max_deviation"] == pytest.approx((1 + 5**0.5) / 2 - 1, abs=1e-12)

    def test_hermitian_one_norm(self, capsys, files):
        code, rep = run(capsys, "hermitian", files["D"], "--norm", "1")
        assert code == 0 and rep["outputs"]["hermitian"]["verdict"] is True

    def test_hermitian_mismatch_exit_5(self, capsys, tmp_path):
        p = write_csv(tmp_path / "T.csv", [["0", "1e-7"], ["0", "0"]])
        code, rep = run(capsys, "hermitian", p, "--t-max", "1", "--steps", "9", "--tol", "1e-6")
        assert code == 5 and rep["exit_status"] == 5

    def test_lift_check(self, capsys, files):
        code, rep = run(capsys, "lift-check", files["A"], "--weights", files["E"], files["I"])
        assert code == 0 and rep["residuals"]["lift_gap"] <= 1e-8

    def test_block_check(self, capsys, files, tmp_path):
        code, _ = run(capsys, "block-check", files["A"], "--k", 1)
        assert code == 0
        p = write_csv(tmp_path / "L.csv", [["1", "0"], ["1", "0"]])
        code, _ = run(capsys, "block-check", p, "--k", 1)
        assert code == 6

    def test_env_tolerance(self, capsys, files, monkeypatch):
        monkeypatch.setenv(cli.TOL_ENV, "1e-6")
        _, rep = run(capsys, "pinv", files["A"])
        assert rep["tolerances"]["cutoff"] == 1e-6

    def test_out_file(self, capsys, files):
        out = files["dir"] / "report.json"
        code, rep = run(capsys, "pinv", files["bad"], "--out", out)
        assert code == 2
        assert RunReport.from_json(out.read_text()).exit_status == 2

    def test_usage_error_exit_2(self, capsys):
        assert cli.main(["pinv"]) == 2


class TestCorpus:
    def test_vacuous(self, capsys):
        code, rep = run(capsys, "corpus", "--mode", "ep-battery", "--count", 0)
        assert code == 0 and rep["outputs"]["summary"]["passed"] == 0

    @pytest.mark.parametrize("mode", ["ep-battery", "uniqueness", "lift", "blocks", "hermitian"])
    def test_modes_pass(self, capsys, mode):
        code, rep = run(capsys, "corpus", "--mode", mode, "--n", 4, "--count", 20, "--seed", 7)
        assert code == 0 and rep["outputs"]["summary"]["failed"] == 0

    def test_uniqueness_gap(self):
        assert run_corpus("uniqueness", 5, 50, 1).worst_residual <= 1e-9

    def test_manifest_replay(self, tmp_path):
        manifest = tmp_path / "m.json"
        manifest.write_text(json.dumps({"failures": [{"mode": "lift", "n": 3, "seed": 4, "index": 2}]}))
        first = replay_manifest(manifest)
        again = replay_manifest(manifest)
        assert first == again and first[0].index == 2

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            run_corpus("nope", 3, 1, 0)
