import csv
import json
from pathlib import Path

import pytest

from hidatriple.cli import main
from hidatriple.errors import ConfigError
from hidatriple.io import RunConfig

FLAGSHIP = Path(__file__).resolve().parents[1] / "configs" / "flagship.json"


def _csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_classical_delta(tmp_path):
    out = tmp_path / "delta.csv"
    assert main(["classical", "delta", "--prec-q", "12", "--out", str(out)]) == 0
    rows = _csv(out)
    assert rows[0] == ["n", "a_n"] and rows[12] == ["11", "534612"]


def test_classical_stabilize(capsys):
    assert main(["classical", "stabilize", "--p", "11", "--prec-p", "6", "--prec-q", "12"]) == 0
    assert "(residue 1 mod 11)" in capsys.readouterr().out


def test_family_build_and_check(tmp_path):
    fam = tmp_path / "eis.json"
    args = ["--p", "11", "--prec-p", "8", "--prec-q", "10"]
    assert main(["family", "build", *args, "--weights", "4", "14", "24", "34", "--out", str(fam)]) == 0
    d = json.loads(fam.read_text())
    assert d["precision"]["p"] == 11 and len(d["coeffs"]) == 11
    out = tmp_path / "spec.csv"
    assert main(["family", "specialize", "--family", str(fam), "--weight", "44", "--check", "--out", str(out)]) == 0


def test_ordproj(tmp_path):
    out = tmp_path / "op.json"
    assert main(["ordproj", "--p", "11", "--weight", "24", "--prec-p", "4", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    # T_11 on S_24 has charpoly X^2 mod 11: nothing ordinary
    assert all(rep["checks"].values()) and rep["rank_e"] == 0


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"grid": [[22], [12], [12]]})
    cfg = RunConfig.load(FLAGSHIP)
    assert cfg.a == 8 and cfg.grid[0] == (32, 42, 52, 62)


def test_hypothesis_violation_exit_code(tmp_path):
    d = json.loads(FLAGSHIP.read_text())
    d["a"] = 0
    d["out"] = str(tmp_path)
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(d))
    assert main(["triple-l", "compute", "--config", str(cfg), "--prec-x1", "2"]) == 2


@pytest.mark.slow
def test_triple_compute_and_verify(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["triple-l", "compute", "--config", str(FLAGSHIP), "--out", str(out)]) == 0
    for name in ("L_raw.json", "L_normalized.json", "specializations.csv", "report.json"):
        assert (out / name).exists()
    rows = _csv(out / "specializations.csv")
    assert len(rows) == 1 + 5
    assert main(["triple-l", "verify", "--config", str(FLAGSHIP), "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text and text.count("PASS two-path") == 5
