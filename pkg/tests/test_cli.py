import json
from pathlib import Path

import pytest

from berklab import __version__
from berklab.cli import ExperimentConfig, main
from berklab.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
Z2 = str(CONFIGS / "z2_q3.json")
Z2_THIRD = str(CONFIGS / "z2_plus_third_q3.json")
IDENTITY = str(CONFIGS / "identity_q3.json")
CHAR2 = str(CONFIGS / "z_plus_z2_f2t.json")


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_reduce_z2(capsys):
    code, out = run(capsys, "reduce", "--f", Z2)
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["reduced_degree"] == 2 and doc["result"]["good_reduction"]
    assert doc["version"] == __version__
    assert doc["config"]["f"] == Z2


def test_reduce_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = run(capsys, "reduce", "--f", str(bad))
    assert code != 0
    assert json.loads(out)["error"]["code"] == "ParseError"


def test_missing_map_is_config_error(capsys):
    code, out = run(capsys, "pgr")
    assert code == 2
    assert json.loads(out)["error"]["code"] == "ConfigError"


def test_pgr(capsys):
    code, out = run(capsys, "pgr", "--f", CHAR2, "--pgr-depth", "1")
    assert code == 0 and json.loads(out)["result"]["verdict"] == "GoodReductionFound"


def test_green_points(capsys):
    code, out = run(capsys, "green", "--f", Z2_THIRD, "--sample", "D(0; 0)", "--sample", "D(0; -1/2)",
                    "--tolerance", "1/100")
    rows = json.loads(out)["result"]
    assert code == 0
    assert [r["value"] for r in rows] == ["1/2", "0"]


def test_apriori_csv(capsys):
    code, out = run(capsys, "apriori", "--f", Z2_THIRD, "--g", IDENTITY, "--nmax", "3", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# berklab ")
    assert lines[1] == "n,s_n,s_n_decimal"
    assert lines[2:] == ["1,0,0.000000", "2,0,0.000000", "3,0,0.000000"]


def test_equidist_csv_and_determinism(capsys, tmp_path):
    args = ["equidist", "--f", CHAR2, "--nmax", "4", "--depth", "1", "--reference", "gauss",
            "--pgr-depth", "1", "--format", "csv"]
    _, first = run(capsys, *args)
    _, second = run(capsys, *args)
    assert first == second
    lines = first.splitlines()
    assert lines[1] == "n,degree,tv,tv_decimal,verdict,pgr_max_depth,pgr_radius_denominator"
    assert lines[2] == "1,3,2/3,0.666667,GoodReductionFound,1,2"
    out_file = tmp_path / "table.csv"
    code, _ = run(capsys, *args, "--out", str(out_file))
    assert code == 0 and out_file.read_text().splitlines()[1:] == lines[1:]


def test_roots(capsys):
    code, out = run(capsys, "roots", "--f", Z2, "--nmax", "1", "--depth", "1")
    row = json.loads(out)["result"][0]
    assert code == 0 and row["degree"] == 3 and row["at_infinity"] == 1
    counts = {c["disk"]: c["roots"] for c in row["disk_counts"]}
    assert counts == {"D(0; 0)": 2, "D(0; 1)": 1, "D(1; 1)": 1, "D(2; 1)": 0}


def test_laplacian_check(capsys):
    code, out = run(capsys, "laplacian-check", "--f", Z2_THIRD, "--nmax", "2")
    assert code == 0 and json.loads(out)["result"]["all_hold"]


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"f": Z2_THIRD, "nmax": 2, "samples": ["D(0; 0)"]}))
    code, out = run(capsys, "apriori", "--config", str(cfg), "--nmax", "1")
    doc = json.loads(out)
    assert code == 0
    assert doc["config"]["nmax"] == 1 and doc["config"]["samples"] == ["D(0; 0)"]
    assert len(doc["result"]) == 1


def test_config_round_trip():
    cfg = ExperimentConfig(f="a.json", depth=3, samples=["D(1; 2)"], tolerance="1/7")
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"tolerance": "-1"})


def test_csv_unavailable_for_reduce(capsys):
    code, out = run(capsys, "reduce", "--f", Z2, "--format", "csv")
    assert code == 2 and json.loads(out)["error"]["code"] == "ConfigError"
