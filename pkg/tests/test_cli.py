import json
import subprocess
import sys

import jsonschema
import pytest

from chainmeasures.cli import SCHEMA_PATH, main


@pytest.fixture
def write(tmp_path):
    def _write(name, content):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out)


IDENTITY2 = {"n": 2, "p": [[1, 0], [0, 1]]}
TWO_STATE = {"n": 2, "p": [["0.6", "0.4"], ["0.2", "0.8"]]}


class TestAnalyze:
    def test_identity(self, capsys, write):
        code, rep = run_json(capsys, "analyze", write("k.json", IDENTITY2),
                             "--measure", write("m.json", "[0.5, 0.5]"))
        cls = rep["measures"][0]["classification"]
        assert code == 0 and cls["invariant"] and cls["reversible"]
        assert rep["backend"] == "float"

    def test_exact_two_state(self, capsys, write):
        code, rep = run_json(capsys, "analyze", write("k.json", TWO_STATE),
                             "--measure", write("m.txt", "1/3 2/3"), "--exact")
        cls = rep["measures"][0]["classification"]
        assert code == 0 and cls["in_G"]
        assert set(cls["residuals"].values()) == {"0"}
        assert rep["lemma_checks"]["lemma7"]["holds"]

    def test_report_matches_schema_and_round_trips(self, capsys, write):
        schema = json.loads(SCHEMA_PATH.read_text())
        for kernel in (TWO_STATE, IDENTITY2, {"p": [[0, 1, 0], [0, 0, 1], [1, 0, 0]]},
                       {"p": [["0.5", "0.25"], [0, 1]]}):
            for extra in ((), ("--exact",)):
                code, out, _ = run(capsys, "analyze", write("k.json", kernel), "--json", *extra)
                assert code == 0
                rep = json.loads(out)
                jsonschema.validate(rep, schema)
                assert json.loads(json.dumps(rep)) == rep

    def test_uniform_default(self, capsys, write):
        code, rep = run_json(capsys, "analyze", write("k.txt", "0 1 0\n0 0 1\n1 0 0\n"), "--exact")
        m = rep["measures"][0]
        assert m["source"] == "uniform" and m["weights"] == ["1/3"] * 3
        assert m["classification"]["invariant"] and not m["classification"]["reversible"]

    def test_malformed_field(self, capsys, write):
        code, _, err = run(capsys, "analyze", write("k.json", '{"n": 2, "p": [[0.5, "x"], [1, 0]]}'))
        assert code == 2 and "p[0][1]" in err

    def test_malformed_syntax(self, capsys, write):
        code, _, err = run(capsys, "analyze", write("k.json", '{"n": 2, "p": [[0.5, 0.5], [1, 0]'))
        assert code == 2 and "line 1" in err

    def test_missing_p(self, capsys, write):
        code, _, err = run(capsys, "analyze", write("k.json", '{"n": 2}'))
        assert code == 2 and "p:" in err

    def test_n_mismatch(self, capsys, write):
        code, _, err = run(capsys, "analyze", write("k.json", {"n": 3, "p": [[1, 0], [0, 1]]}))
        assert code == 2 and "n:" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "analyze", str(tmp_path / "nope.json"))
        assert code == 2

    def test_invalid_kernel(self, capsys, write):
        code, _, err = run(capsys, "analyze", write("k.json", {"p": [[0.5, 0.6], [0, 1]]}))
        assert code == 1 and "RowSumExceedsOne" in err

    def test_dimension_mismatch(self, capsys, write):
        code, _, err = run(capsys, "analyze", write("k.json", IDENTITY2),
                           "--measure", write("m.txt", "1/3 1/3 1/3"))
        assert code == 1 and "DimensionMismatch" in err


class TestExtremes:
    def test_identity_I(self, capsys, write):
        code, rep = run_json(capsys, "extremes", write("k.txt", "1 0 0\n0 1 0\n0 0 1"), "--set", "I")
        assert code == 0
        assert rep["measures"] == [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]

    def test_cycle_R_empty(self, capsys, write):
        code, rep = run_json(capsys, "extremes", write("k.txt", "0 1 0\n0 0 1\n1 0 0"), "--set", "R")
        assert code == 0 and rep["measures"] == []

    def test_blocks_I(self, capsys, write):
        k = write("k.txt", "0.5 0.5 0 0\n0.5 0.5 0 0\n0 0 0.3 0.7\n0 0 0.7 0.3\n")
        code, rep = run_json(capsys, "extremes", k, "--set", "I")
        assert rep["measures"] == [["1/2", "1/2", "0", "0"], ["0", "0", "1/2", "1/2"]]

    def test_cap(self, capsys, write):
        eye = "\n".join(" ".join("1" if i == j else "0" for j in range(13)) for i in range(13))
        code, _, err = run(capsys, "extremes", write("k.txt", eye), "--set", "R")
        assert code == 1 and "EnumerationCapExceeded" in err


class TestVerify:
    def test_random(self, capsys):
        code, out, _ = run(capsys, "verify", "--random", "6", "500", "42")
        assert code == 0 and "500/500 inclusion verified" in out

    def test_identity_witnesses(self, capsys, write):
        code, rep = run_json(capsys, "verify", write("k.json", IDENTITY2))
        assert code == 0 and rep["kernels"][0]["witnesses"] == [[0, 0], [1, 1]]

    def test_cycle_vacuous(self, capsys, write):
        code, out, _ = run(capsys, "verify", write("k.txt", "0 1 0\n0 0 1\n1 0 0"))
        assert code == 0 and "R_e empty (vacuous)" in out

    def test_recipe(self, capsys):
        code, out, _ = run(capsys, "verify", "--recipe", '{"kind": "random_substochastic", "n": 5}')
        assert code == 0 and "1/1" in out

    def test_no_source(self, capsys):
        assert run(capsys, "verify")[0] == 1


class TestLemma:
    def test_lemma7(self, capsys, write):
        code, rep = run_json(capsys, "lemma", write("k.json", TWO_STATE), "--lemma", "7",
                             "--measure", write("m.txt", "1/3 2/3"),
                             "--function", write("f.txt", "1 0"), "--exact")
        assert code == 0 and rep["lhs"] == rep["rhs"] == "2/15"

    def test_lemma8_identity(self, capsys, write):
        code, rep = run_json(capsys, "lemma", write("k.json", IDENTITY2), "--lemma", "8")
        assert code == 0 and (rep["a"], rep["b"], rep["c"], rep["d"]) == (True,) * 4

    def test_lemma9_hypothesis_violated(self, capsys, write):
        code, _, err = run(capsys, "lemma", write("k.txt", "0 1 0\n0 0 1\n1 0 0"), "--lemma", "9")
        assert code == 1 and "HypothesisViolated" in err

    def test_lemma9_and_remark(self, capsys, write):
        k = write("k.json", TWO_STATE)
        m = write("m.txt", "1/3 2/3")
        for lemma in ("9", "remark"):
            code, rep = run_json(capsys, "lemma", k, "--lemma", lemma, "--measure", m,
                                 "--function", write("rho.txt", "2 1"), "--normalize", "--exact")
            assert code == 0 and rep["holds"] and rep["rho_m_in_G"] is False


class TestGenerate:
    def test_two_state(self, capsys, tmp_path):
        out = tmp_path / "k.json"
        code, _, _ = run(capsys, "generate", '{"kind": "two_state", "a": "0.4", "b": "0.2"}',
                         "-o", str(out))
        data = json.loads(out.read_text())
        assert code == 0 and data["p"] == [["3/5", "2/5"], ["1/5", "4/5"]]
        assert data["measure"] == ["1/3", "2/3"]

    def test_float_values_in_recipe_file(self, capsys, write, tmp_path):
        recipe = write("r.json", {"kind": "two_state", "a": 0.4, "b": 0.2})
        run(capsys, "generate", recipe, "-o", str(tmp_path / "k.json"))
        k = json.loads((tmp_path / "k.json").read_text())
        assert k["n"] == 2

    def test_byte_identical(self, capsys, tmp_path):
        recipe = '{"kind": "random_reversible", "n": 4, "seed": 7}'
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "generate", recipe, "-o", str(a))
        run(capsys, "generate", recipe, "-o", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_cycle(self, capsys):
        code, out, _ = run(capsys, "generate", '{"kind": "cycle", "n": 3, "clockwise": 1}')
        assert json.loads(out)["p"] == [["0", "1", "0"], ["0", "0", "1"], ["1", "0", "0"]]

    def test_bad_parameter(self, capsys):
        code, _, err = run(capsys, "generate", '{"kind": "two_state", "a": "2", "b": "0"}')
        assert code == 1 and "BadParameter" in err

    def test_bad_json(self, capsys):
        assert run(capsys, "generate", '{"kind": ')[0] == 2

    @pytest.mark.parametrize("recipe", [
        '{"kind": "random_reversible", "n": 5, "seed": 3}',
        '{"kind": "birth_death", "n": 4, "up": ["1/2", "1/3", "1/4"], "down": ["1/5", "1/5", "1/5"]}',
        '{"kind": "block_diagonal", "blocks": [{"kind": "two_state", "a": "0.1", "b": "0.3"}, {"kind": "identity", "n": 2}]}',
    ])
    def test_round_trip_classification(self, capsys, tmp_path, recipe):
        out = tmp_path / "k.json"
        run(capsys, "generate", recipe, "-o", str(out))
        for extra in ((), ("--exact",)):
            code, rep = run_json(capsys, "analyze", str(out), *extra)
            m = rep["measures"][0]
            assert m["source"] == "embedded" and m["classification"]["reversible"]


def test_module_entry_point(tmp_path):
    k = tmp_path / "k.txt"
    k.write_text("1 0\n0 1\n")
    proc = subprocess.run([sys.executable, "-m", "chainmeasures", "verify", str(k)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "1/1 inclusion verified" in proc.stdout
