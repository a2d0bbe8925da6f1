import csv
import io
import json
import subprocess
import sys

import pytest

from lrrc.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check(capsys):
    code, out, err = run(capsys, "check", "5", "3", "2", "1")
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "ImprovableByDHS"
    assert "ImprovableByDHS" in err


def test_check_invalid_tuple(capsys):
    code, _, err = run(capsys, "check", "5", "3", "4", "1")
    assert code == EXIT_USAGE
    assert "d <= n-1-r" in err


def test_bad_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["tradeoff", "--scheme", "rs"])
    assert exc.value.code == EXIT_USAGE


def test_scan_csv(capsys):
    code, out, _ = run(capsys, "scan", "--n", "7", "--k", "3", "--d", "3", "--r", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows == [{"n": "7", "k": "3", "d": "3", "r": "1", "verdict": "Undecided",
                     "rule": "no condition applies"}]


def _corners(out):
    rows = list(csv.DictReader(io.StringIO(out)))
    norm = [(f"{r['alpha_over_M_num']}/{r['alpha_over_M_den']}",
             f"{r['dbeta_over_M_num']}/{r['dbeta_over_M_den']}") for r in rows]
    return norm[0], norm[-1]


def test_tradeoff_ca(capsys):
    code, out, _ = run(capsys, "tradeoff", "--scheme", "ca", "-n", "5", "-k", "3", "-d", "2", "-r", "1")
    assert code == EXIT_OK
    assert _corners(out) == (("1/2", "1/2"), ("1/2", "1/2"))


def test_tradeoff_bhs(capsys):
    _, out, _ = run(capsys, "tradeoff", "--scheme", "bhs")
    assert _corners(out) == (("1/2", "1/1"), ("2/3", "2/3"))


def test_tradeoff_ca_other_params(capsys):
    code, _, _ = run(capsys, "tradeoff", "--scheme", "ca", "-n", "6")
    assert code == EXIT_USAGE


def test_mbr(capsys):
    _, out, _ = run(capsys, "mbr", "--scheme", "mfhs", "-n", "8", "-k", "4", "-d", "4", "-M", "11")
    assert json.loads(out) == {"scheme": "mfhs", "alpha": "4/1", "beta": "1/1"}
    _, out, _ = run(capsys, "mbr", "--scheme", "bhs", "-n", "8", "-k", "4", "-d", "4", "-M", "11")
    assert json.loads(out)["alpha"] == "22/5"


def test_simulate_zero_steps(capsys):
    _, out, _ = run(capsys, "simulate-ca", "--steps", "0")
    res = json.loads(out)
    assert res["reconstructing_triples"] == 10
    assert res["state"][4] == "5: 1100 0011"


def test_simulate_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        main(["simulate-ca", "--steps", "50", "--seed", "9", "--adversarial-u", "--log", "-o", str(path)])
    assert a.read_bytes() == b.read_bytes()
    assert len(json.loads(a.read_text())["log"]) == 50


def test_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LRRC_OUTPUT_DIR", str(tmp_path))
    main(["check", "4", "3", "2", "1"])
    assert json.loads((tmp_path / "check.json").read_text())["verdict"] == "Indifferent"


def test_search_shs(capsys):
    _, out, _ = run(capsys, "search-shs", "--samples", "50", "--seed", "1")
    res = json.loads(out)
    assert res["found"] == 50 and res["cuts"] == {"3/1": 50}


def test_search_shs_budget(capsys):
    code, _, err = run(capsys, "search-shs", "--exhaustive", "--limit", "3")
    assert code == EXIT_BUDGET
    assert "budget" in err


def test_witness_fhs(capsys):
    _, out, _ = run(capsys, "witness", "--kind", "fhs", "-n", "8", "-k", "4", "-d", "4",
                    "--alpha", "17", "--beta", "1", "--pi", "1", "2", "1", "-2", "0", "0", "1", "2")
    res = json.loads(out)
    assert res["cut"] == "12/1"
    assert res["nodes"] == [1, 4, 2, 6, 7, 8, 3, 5]


def test_witness_text(capsys):
    _, out, _ = run(capsys, "witness", "--kind", "newest", "--policy", "ca", "--format", "text")
    assert "cut 4" in out.splitlines()


def test_witness_tree(capsys):
    _, out, _ = run(capsys, "witness", "--kind", "tree", "-n", "7", "-k", "4", "-d", "1",
                    "--alpha", "1", "--beta", "1")
    assert json.loads(out)["cut"] == "1/1"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lrrc", "check", "7", "4", "1", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "Indifferent"
