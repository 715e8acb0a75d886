import json

import pytest

from quditswap.cli import chi_square_critical, main


def run_cli(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def test_verify_passes_and_reports(capsys):
    code = run_cli(["verify", "--d", "2", "--n", "3", "--rule", "all",
                    "--exhaustive", "--seed", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("PASS") == 3
    assert "seed=1" in out


def test_verify_sampled_rule_white():
    assert run_cli(["verify", "--d", "5", "--n", "4", "--rule", "white",
                    "--samples", "5", "--seed", "7"]) == 0


def test_verify_impossible_tolerance_fails(capsys):
    code = run_cli(["verify", "--d", "2", "--rule", "bell", "--tol", "1e-30",
                    "--seed", "1"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_cap_refusal(capsys):
    code = run_cli(["verify", "--d", "9", "--n", "6", "--exhaustive"])
    assert code == 2
    assert "amplitudes" in capsys.readouterr().err


def test_verify_rejects_bad_dimension():
    assert run_cli(["verify", "--d", "1"]) == 2
    assert run_cli(["verify", "--d", "17"]) == 2


def test_verify_json_roundtrip(tmp_path):
    target = tmp_path / "verify.json"
    argv = ["verify", "--d", "3", "--rule", "bell", "--seed", "5",
            "--json", str(target)]
    assert run_cli(argv) == 0
    first = target.read_bytes()
    report = json.loads(first)
    assert report["ok"] is True
    assert report["checks"][0]["cases"] == 81
    assert report["checks"][0]["max_deviation"] < report["checks"][0]["tol"]
    assert run_cli(argv) == 0
    assert target.read_bytes() == first


def test_protocol_statevector_run(capsys):
    code = run_cli(["protocol", "--d", "2", "--n", "3", "--rounds", "25",
                    "--engine", "statevector", "--labels", "zero",
                    "--seed", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert "success rate 1.0000" in out


def test_protocol_zero_rounds(capsys):
    assert run_cli(["protocol", "--d", "2", "--rounds", "0", "--seed", "3"]) == 0
    assert "no rounds" in capsys.readouterr().out


def test_protocol_statevector_cap(capsys):
    code = run_cli(["protocol", "--d", "5", "--n", "4", "--rounds", "1",
                    "--engine", "statevector"])
    assert code == 2
    assert "symbolic" in capsys.readouterr().err


def test_protocol_json_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["protocol", "--d", "3", "--n", "4", "--rounds", "40",
            "--labels", "random", "--seed", "123"]
    assert run_cli(base + ["--json", str(a)]) == 0
    assert run_cli(base + ["--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert report["success_rate"] == 1.0
    assert len(report["transcripts"]) == 40
    transcript = report["transcripts"][0]
    assert set(transcript) == {"d", "n", "seed", "engine", "cat_labels",
                               "bell_labels", "outcomes", "announced", "key",
                               "recovered", "ok"}
    assert transcript["ok"] is True
    assert sum(sum(row) for row in report["key_counts"]) == 40


def test_protocol_json_stdout_is_pure(capsys):
    assert run_cli(["protocol", "--d", "2", "--rounds", "3", "--seed", "9",
                    "--json", "-"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "protocol"


def test_protocol_labels_file(tmp_path, capsys):
    labels = tmp_path / "labels.json"
    labels.write_text(json.dumps({"cat_labels": [1, 2, 0],
                                  "bell_labels": [[2, 1], [0, 2], [1, 1]]}))
    code = run_cli(["protocol", "--d", "3", "--n", "3", "--rounds", "10",
                    "--labels", str(labels), "--seed", "2"])
    assert code == 0
    assert "success rate 1.0000" in capsys.readouterr().out

    labels.write_text(json.dumps({"cat_labels": [1], "bell_labels": [[0, 0]]}))
    assert run_cli(["protocol", "--d", "3", "--n", "3", "--rounds", "1",
                    "--labels", str(labels)]) == 2
    assert run_cli(["protocol", "--d", "2", "--rounds", "1",
                    "--labels", str(tmp_path / "absent.json")]) == 2


def test_protocol_prints_derived_seed(capsys):
    assert run_cli(["protocol", "--d", "2", "--rounds", "2"]) == 0
    assert "seed=" in capsys.readouterr().out


def test_collude_posterior(capsys):
    code = run_cli(["collude", "--d", "3", "--n", "4", "--missing", "3",
                    "--seed", "4"])
    out = capsys.readouterr().out
    assert code == 0
    assert "[1/3, 1/3, 1/3]" in out


def test_collude_nothing_known(capsys):
    code = run_cli(["collude", "--d", "2", "--n", "3", "--missing", "2,3",
                    "--seed", "4"])
    out = capsys.readouterr().out
    assert code == 0
    assert "[1/2, 1/2]" in out


def test_collude_with_oracle(capsys):
    code = run_cli(["collude", "--d", "2", "--n", "3", "--missing", "2",
                    "--oracle", "--seed", "6"])
    out = capsys.readouterr().out
    assert code == 0
    assert "balanced first dit: PASS" in out


def test_collude_usage_errors():
    assert run_cli(["collude", "--d", "2", "--n", "3", "--missing", ""]) == 2
    assert run_cli(["collude", "--d", "2", "--n", "3", "--missing", "1"]) == 2
    assert run_cli(["collude", "--d", "2", "--n", "3", "--missing", "4"]) == 2
    assert run_cli(["collude", "--d", "2", "--n", "3", "--missing", "x"]) == 2
    assert run_cli(["collude", "--d", "2", "--n", "3"]) == 2  # flag required


def test_collude_oracle_cap(capsys):
    code = run_cli(["collude", "--d", "5", "--n", "4", "--missing", "2",
                    "--oracle", "--seed", "1"])
    assert code == 2
    assert "refusing" in capsys.readouterr().err


def test_chi_square_critical_close_to_exact():
    # Wilson-Hilferty vs the exact inverse CDF values
    assert chi_square_critical(8, 0.001) == pytest.approx(26.1245, abs=0.3)
    assert chi_square_critical(3, 0.001) == pytest.approx(16.2662, abs=0.3)
