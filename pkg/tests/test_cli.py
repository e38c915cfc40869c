"""The batch harness: exit codes, dumps, configuration validation."""

import json

import pytest

from dzdeform.cli import main
from dzdeform import verify as verify_mod


def test_verify_universal_exit_zero(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["verify", "--suite", "universal", "--seed", "7",
                 "--json", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["verdict"] == "pass"
    assert payload["totals"]["failed"] == 0
    text = capsys.readouterr().out
    assert "suite verdict: PASS" in text


def test_verify_fault_exit_one(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "cohft": {"dim": 1, "construction": "trivial-1d",
                  "genus_max": 1, "t_degree_max": 8},
        "suites": ["cohft-axioms"],
        "fault": "tameness-1-23",
    }))
    code = main(["verify", "--config", str(cfg)])
    assert code == 1


def test_unknown_suite_rejected(capsys):
    code = main(["verify", "--suite", "nonsense"])
    assert code == 2
    assert "unknown suite" in capsys.readouterr().err


def test_unknown_fault_rejected(capsys):
    code = main(["verify", "--suite", "universal", "--fault-inject", "nope"])
    assert code == 2
    err = capsys.readouterr().err
    assert "unknown fault" in err


def test_config_validation_lists_all_errors():
    with pytest.raises(verify_mod.ConfigError) as err:
        verify_mod.validate_config({
            "cohft": {"dim": 0, "construction": "bogus",
                      "genus_max": 1, "t_degree_max": 2},
            "suites": ["universal", "wrong"],
        })
    msg = str(err.value)
    assert "bogus" in msg and "dim" in msg and "t_degree_max" in msg and "wrong" in msg


def test_dump_golden(capsys):
    from pathlib import Path
    code = main(["dump", "G[1]"])
    assert code == 0
    out = capsys.readouterr().out
    assert "1/24*v[1,1]*v[1,3]" in out
    code = main(["dump", "A[1,1]"])
    assert code == 0
    golden = (Path(__file__).parent / "golden" / "A_trivial_1d.txt").read_text().strip()
    assert capsys.readouterr().out.strip().endswith(golden)
    code = main(["dump", "L[1,1]"])
    assert code == 0
    golden_l = (Path(__file__).parent / "golden" / "L_trivial_1d.txt").read_text().strip()
    assert capsys.readouterr().out.strip().endswith(golden_l)


def test_dump_term_selector(capsys):
    code = main(["dump", "term:X[1,1]"])
    assert code == 0
    out = capsys.readouterr().out
    assert "h" in out  # the hbar/2 prefactor survives in the coefficient


def test_dump_unknown_selector(capsys):
    code = main(["dump", "nonsense"])
    assert code == 2
    assert "unknown selector" in capsys.readouterr().err


def test_fixtures_listing(capsys):
    code = main(["fixtures"])
    assert code == 0
    out = capsys.readouterr().out
    assert "trivial-1d" in out and "product-2d" in out
    assert "r1" in out and "r3" in out and "s1" in out
    for tag in verify_mod.FAULTS:
        assert tag in out
