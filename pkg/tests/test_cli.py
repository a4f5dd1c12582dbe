"""Command-line behaviour: outputs, JSON documents and exit codes."""

import json
import subprocess
import sys

import pytest

from msteen import cli
from msteen.cli import json_doc_to_text, run
from msteen.expr import parse, to_dual, to_milnor, to_steenrod
from msteen.verify import PairCheck


def ok(argv):
    code, out, err = run(argv)
    assert code == 0, err
    return out


def test_normalize_adem_example():
    assert ok(["--prime", "2", "normalize", "Sq^2 Sq^2"]) == "t Sq^3 Sq^1"


def test_multiply_odd_example():
    assert ok(["--prime", "3", "multiply", "P^1", "P^1"]) == "2 P^2"


def test_flags_after_the_subcommand():
    assert ok(["multiply", "P^1", "P^1", "--prime", "3"]) == "2 P^2"


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["normalize", "P^0"], "1"),
        (["coproduct", "Sq^2"], "1 ⊗ Sq^2 + t Sq^1 ⊗ Sq^1 + Sq^2 ⊗ 1"),
        (["dual-mul", "tau_0", "tau_0"], "xi_1 t + tau_0 xi_1 r + tau_1 r"),
        (["dual-coproduct", "tau_1"], "1 ⊗ tau_1 + tau_0 ⊗ xi_1 + tau_1 ⊗ 1"),
        (["pair", "Sq^2", "xi_1"], "1"),
        (["to-milnor", "Sq^2 Sq^2"], "t Q{0,1}"),
        (["to-admissible", "Q_1"], "Sq^3 + Sq^2 Sq^1"),
        (["--prime", "3", "to-milnor", "P^1 b"], "Q{0} Pm(1) + Q{1}"),
        (["act", "b", "u_1"], "v_1"),
        (["act", "Sq^2", "u_1 u_2"], "t v_1 v_2"),
        (["total-power", "v_1", "--r", "1"], "v_1^2 + (v_1) d"),
        (["chern", "--r", "1", "--i", "1", "--d", "2"], "c1^2"),
        (["thom", "--q", "1", "--d", "2"], "c1"),
        (["specialize", "t Sq^3 Sq^1"], "Sq^3 Sq^1"),
    ],
)
def test_commands(argv, expected):
    assert ok(argv) == expected


def test_output_is_deterministic():
    argv = ["coproduct", "Sq^4 Sq^2"]
    assert len({ok(argv) for _ in range(3)}) == 1


# JSON --------------------------------------------------------------------


def _check_schema(doc):
    assert set(doc) == {"prime", "basis", "terms"}
    for row in doc["terms"]:
        assert set(row) == {"monomial", "coeff"}
        assert set(row["coeff"]) == {"scalar", "t", "r"}
        assert all(isinstance(v, int) for v in row["coeff"].values())


def test_json_schema_example():
    doc = json.loads(ok(["normalize", "Sq^2 Sq^2", "--json"]))
    assert doc == {"prime": 2, "basis": "admissible", "terms": [{"monomial": "Sq^3 Sq^1", "coeff": {"scalar": 1, "t": 1, "r": 0}}]}


@pytest.mark.parametrize(
    "argv,convert",
    [
        (["normalize", "Sq^4 Sq^4 + r Sq^6 Sq^1"], to_steenrod),
        (["--prime", "3", "multiply", "P^2 b", "P^3"], to_steenrod),
        (["to-milnor", "Sq^6 Sq^3"], to_milnor),
        (["--prime", "3", "to-milnor", "b P^3 b P^1"], to_milnor),
        (["dual-mul", "tau_0 tau_1", "tau_0"], to_dual),
        (["--prime", "3", "dual-mul", "tau_0 xi_1", "tau_1"], to_dual),
    ],
)
def test_json_round_trip(argv, convert):
    text = ok(argv)
    doc = json.loads(ok(argv + ["--json"]))
    _check_schema(doc)
    p = doc["prime"]
    assert convert(parse(json_doc_to_text(doc), p)) == convert(parse(text, p))


def test_chern_json_has_exponents():
    doc = json.loads(ok(["chern", "--r", "1", "--i", "2", "--d", "3", "--json"]))
    assert doc["basis"] == "chern"
    assert all("exponents" in row for row in doc["terms"])


# errors -------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["--prime", "4", "normalize", "b"],
        ["--prime", "3", "normalize", "Sq^2"],
        ["normalize", "Sq^2 + ("],
        ["chern", "--r", "1"],
        ["pair", "xi_1", "Sq^2"],
    ],
)
def test_usage_and_input_errors_exit_two(argv):
    code, out, err = run(argv)
    assert code == 2
    assert out == ""
    assert err.startswith("error:")


def test_json_error_document():
    code, _, err = run(["normalize", "Sq^2 + (", "--json"])
    assert code == 2
    assert json.loads(err) == {
        "error": "parse",
        "message": "unrecognized factor at position 7: 'Sq^2 + ('",
        "position": 7,
    }


# verify ---------------------------------------------------------------------


def test_verify_small_sweep(tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(["verify", "adem", "--max", "8", "--workers", "1", "--report", str(report)])
    assert code == 0
    assert out.startswith("OK: 19 relations")
    data = json.loads(report.read_text())
    assert data["ok"] and len(data["checks"]) == 19


def test_verify_json_summary():
    code, out, _ = run(["--prime", "3", "verify", "adem", "--max", "4", "--workers", "1", "--json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] and doc["counterexamples"] == []


def test_verify_reports_counterexamples(monkeypatch):
    import msteen.verify as verify

    def broken(args):
        word = args[0]
        return PairCheck(verify.render_word(word), "fail", 0.0, ["planted"], False)

    monkeypatch.setattr(verify, "check_pair", broken)
    code, out, _ = run(["verify", "adem", "--max", "4", "--workers", "1"])
    assert code == 1
    assert out.startswith("FAILED")
    assert "planted" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "msteen.cli", "--prime", "3", "multiply", "P^1", "P^1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "2 P^2"


def test_main_prints(capsys):
    assert cli.main(["normalize", "Sq^2 Sq^2"]) == 0
    assert capsys.readouterr().out.strip() == "t Sq^3 Sq^1"
