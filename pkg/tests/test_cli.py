import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from ecfgof.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from ecfgof.distributions import SnParams, to_dict
from ecfgof.io import load_schema, read_csv
from ecfgof.rng import GENERATOR_ID

SN_SPEC = json.dumps({"family": "sn", "xi": [1, -1], "omega": [[1, 0.3], [0.3, 2]], "alpha": [3, 0]})
STUDIES = resources.files("ecfgof") / "studies"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, schema, *argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_OK, err
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema(schema))
    return doc


@pytest.fixture
def sn_csv(tmp_path, capsys):
    path = tmp_path / "sn.csv"
    assert run(capsys, "sample", "--spec", SN_SPEC, "--n", "2000", "--seed", "4", "--out", str(path))[0] == EXIT_OK
    return path


def test_sample_stdout_format(capsys):
    code, out, _ = run(capsys, "sample", "--spec", SN_SPEC, "--n", "5", "--seed", "1")
    assert code == EXIT_OK
    rows = out.strip().splitlines()
    assert len(rows) == 5 and all(len(r.split(",")) == 2 for r in rows)
    assert rows == run(capsys, "--seed", "1", "sample", "--spec", SN_SPEC, "--n", "5")[1].strip().splitlines()


def test_sample_files_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(capsys, "sample", "--spec", SN_SPEC, "--n", "50", "--seed", "9", "--out", str(path))
    assert a.read_bytes() == b.read_bytes()
    assert read_csv(a).data.shape == (50, 2)


def test_spec_schema_accepts_every_family():
    from ecfgof.distributions import GhParams, SasParams, SlParams, StParams, circle_atoms

    schema = load_schema("family_spec")
    for params in (
        SnParams([0], [[1]], [1]),
        StParams([0], [[1]], [1], 3),
        SlParams([0], [[1]], [1]),
        GhParams([0], [[1]], [1], [0.1]),
        circle_atoms(3, 1.5),
        SasParams([0], [1]),
    ):
        jsonschema.validate(to_dict(params), schema)
    jsonschema.validate({"family": "as", "circle": 3, "index": 1.5}, schema)


def test_fit_round_trip(capsys, sn_csv):
    doc = run_json(capsys, "fit_report", "fit", str(sn_csv), "--family", "sn")
    fit = doc["fit"]["params"]
    assert np.allclose(fit["xi"], [1, -1], atol=0.25)
    assert np.allclose(fit["omega"], [[1, 0.3], [0.3, 2]], atol=0.3)
    meta = doc["meta"]
    assert meta["generator"] == GENERATOR_ID and meta["threads"] == 1 and meta["seed"] == 0
    assert meta["version"].startswith("v")


def test_fit_errors(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert run(capsys, "fit", str(empty), "--family", "sn")[0] == EXIT_DATA
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n3,oops\n")
    code, _, err = run(capsys, "fit", str(bad), "--family", "sn")
    assert code == EXIT_DATA and "line 3, column b" in err
    tiny = tmp_path / "tiny.csv"
    tiny.write_text("1,2\n3,4\n")
    assert run(capsys, "fit", str(tiny), "--family", "sn")[0] == EXIT_NUMERIC


def test_usage_errors(capsys, sn_csv):
    with pytest.raises(SystemExit) as exc:
        main(["fit", str(sn_csv), "--family", "zz"])
    assert exc.value.code == EXIT_USAGE
    capsys.readouterr()
    assert run(capsys, "sample", "--spec", "{not json", "--n", "3")[0] == EXIT_USAGE
    assert run(capsys, "gof", str(sn_csv), "--family", "sn", "--mode", "simple")[0] == EXIT_USAGE
    assert run(capsys, "--kernel", "cauchy:1", "gof", str(sn_csv), "--family", "sn", "--B", "3")[0] == EXIT_USAGE


def test_gof_composite(capsys, tmp_path):
    path = tmp_path / "x.csv"
    run(capsys, "sample", "--spec", SN_SPEC, "--n", "60", "--seed", "2", "--out", str(path))
    doc = run_json(capsys, "test_outcome", "gof", str(path), "--family", "sn", "--B", "9", "--seed", "5")
    assert doc["config"]["m"] == 1000
    assert doc["outcome"]["p_value"] in [k / 10 for k in range(1, 11)]


def test_gof_simple_with_missing_rows(capsys, tmp_path):
    rows = ["a,b"] + [f"{float(v[0])!r},{float(v[1])!r}" for v in np.random.default_rng(3).standard_normal((60, 2))]
    rows[5] = "NA,1.0"
    path = tmp_path / "m.csv"
    path.write_text("\n".join(rows) + "\n")
    lam = json.dumps({"family": "sn", "xi": [0, 0], "omega": [[1, 0], [0, 1]], "alpha": [3, 0]})
    doc = run_json(
        capsys, "test_outcome", "gof", str(path), "--family", "sn", "--mode", "simple", "--lambda0", lam,
        "--M", "20", "--m", "59", "--drop-missing",
    )
    assert doc["data"]["dropped_rows"] == 1 and doc["data"]["n"] == 59
    out = doc["outcome"]
    assert out["reject"] == (out["statistic"] > out["critical_value"])


def test_study_outputs(capsys, tmp_path):
    stem = tmp_path / "sim8"
    code, _, err = run(capsys, "study", str(STUDIES / "sim8_sn.ini"), "--M", "4", "--out", str(stem), "--svg")
    assert code == EXIT_OK, err
    doc = json.loads((tmp_path / "sim8.json").read_text())
    jsonschema.validate(doc, load_schema("study_report"))
    assert len(doc["cells"]) == 21 and not doc["failures"]
    assert doc["meta"]["seed"] is None
    csv_lines = (tmp_path / "sim8.csv").read_text().splitlines()
    assert len(csv_lines) == 22
    svg = (tmp_path / "sim8.svg").read_text()
    assert svg.startswith("<svg") and "stroke-dasharray" in svg and svg.count("<polyline") == 3


def test_empty_study(capsys, tmp_path):
    cfg = tmp_path / "empty.ini"
    cfg.write_text("[study]\nlabel = empty\n")
    doc = run_json(capsys, "study_report", "study", str(cfg))
    assert doc["cells"] == [] and doc["failures"] == []


def test_study_failing_cell_is_isolated(capsys, tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(
        "[study]\nfamily = as\nM = 2\nseed = 1\n"
        'truth = {"family": "as", "circle": 3, "index": 1.5}\n'
        "[cell tiny]\nn = 50\n[cell ok]\nn = 100\n"
    )
    doc = run_json(capsys, "study_report", "study", str(cfg), "--seed", "8")
    assert [f["label"] for f in doc["failures"]] == ["tiny"]
    assert len(doc["cells"]) == 1 and doc["meta"]["seed"] == 8


def test_oracle_check(capsys):
    args = ("oracle-check", "--instances", "3", "--draws", "20000", "--cf-draws", "20000")
    doc = run_json(capsys, "oracle_report", *args)
    assert len(doc["statistic"]["results"]) == 3
    again = run_json(capsys, "oracle_report", *args)
    assert again["statistic"] == doc["statistic"] and again["sampler_cf"] == doc["sampler_cf"]


def test_console_script_entry_point():
    from importlib.metadata import entry_points

    eps = [ep for ep in entry_points(group="console_scripts") if ep.name == "ecfgof"]
    assert eps and eps[0].value == "ecfgof.cli:main"
