import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from hamchar.cli import main, scan_columns


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def schema(name):
    text = resources.files("hamchar").joinpath(f"schemas/{name}.schema.json").read_text()
    return json.loads(text)


def test_mu_grassmannian(capsys):
    code, out, _ = run(capsys, "mu", "--family", "A", "--rank", "3", "--xi", "1,1,-1,-1", "--k", "3")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("mu"))
    assert doc["classes"][0]["is_zero"] is True
    assert doc["n"] == 4 and doc["stabilizer"]["weyl_order"] == 4


def test_mu_su2_chart(capsys):
    code, out, _ = run(capsys, "mu", "--family", "a", "--rank", "1", "--xi", "1,-1", "--k", "2")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema("mu"))
    cls = doc["classes"][0]
    # xi = (1, -1) is lambda = 2 in the chart x = x1 = -x2, so lambda^3 x^2 = 8 x^2
    assert cls["chart_poly"] == [{"exp": [2], "coeff": "8"}]
    assert [t["coeff"] for t in cls["poly"]] == ["2", "-4", "2"]


def test_mu_default_k_and_rationals(capsys):
    code, out, _ = run(capsys, "mu", "--family", "D", "--rank", "4", "--xi", "1,1,1,1")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("mu"))
    assert [c["k"] for c in doc["classes"]] == [2, 4, 6]
    mu4 = doc["classes"][1]
    assert mu4["decomposition"]["generator_component"]["pf"] != "0"
    code, out, _ = run(capsys, "mu", "--family", "B", "--rank", "2", "--xi", "1/2,-3/4", "--k", "2")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("mu"))
    # e1 + e2 and e2 are negative on xi: even count
    assert doc["xi"] == ["1/2", "-3/4"] and doc["orientation"] == 1
    code, out, _ = run(capsys, "mu", "--family", "B", "--rank", "2", "--xi", "1/2,3/4", "--k", "2")
    assert json.loads(out)["orientation"] == -1


@pytest.mark.parametrize(
    "argv,field",
    [
        (["mu", "--family", "A", "--rank", "2", "--xi", "0,0,0", "--k", "2"], "trivial orbit"),
        (["mu", "--family", "A", "--rank", "2", "--xi", "1,2,3", "--k", "2"], "--xi"),
        (["mu", "--family", "A", "--rank", "2", "--xi", "1,x,0", "--k", "2"], "--xi"),
        (["mu", "--family", "E", "--rank", "6", "--xi", "1", "--k", "2"], "--family"),
        (["mu", "--family", "B", "--rank", "9", "--xi", "1", "--k", "2"], "--rank"),
        (["mu", "--family", "B", "--rank", "2", "--xi", "1,2", "--k", "0"], "--k"),
        (["independence", "--family", "A", "--rank", "2", "--xi", "3,-1,-2", "--k", ""], "--k"),
        (["independence", "--family", "A", "--rank", "2", "--xi", "3,-1,-2", "--k", "2,3,4"], "--k"),
        (["crosscheck", "--family", "A", "--rank", "1", "--samples", "999"], "--samples"),
        (["crosscheck", "--family", "C", "--rank", "2"], "--family"),
        (["scan", "--family", "D", "--rank", "3", "--k", "3", "--line", "1,2,0:0,0,0:5"], "zero-length"),
        (["scan", "--family", "D", "--rank", "3", "--k", "3", "--line", "1,2,0:0,0,1"], "--line"),
        (["mu", "--family", "B", "--rank", "2", "--xi", "1,2", "--threads", "0"], "--threads"),
    ],
)
def test_config_errors_exit_2(capsys, argv, field):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert field in err


def test_independence_commands(capsys):
    code, out, _ = run(capsys, "independence", "--family", "A", "--rank", "2", "--xi", "3,-1,-2")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("independence"))
    assert code == 0 and doc["independent"] is True and doc["jacobian_rank"] == 2

    code, out, _ = run(capsys, "independence", "--family", "A", "--rank", "2", "--xi", "1,-1,0")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("independence"))
    assert doc["independent"] is False and doc["jacobian_rank"] == 1
    assert "mu_3 is exactly zero" in doc["notes"]
    assert doc["dependence_proven"] is True


def test_crosscheck_su2_defaults(capsys):
    code, out, _ = run(capsys, "crosscheck", "--family", "A", "--rank", "1")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("crosscheck"))
    assert code == 0 and doc["status"] == "pass"
    assert doc["sign"] in (1, -1)


def test_crosscheck_grassmannian_vanishes(capsys):
    code, out, _ = run(
        capsys, "crosscheck", "--family", "A", "--rank", "3", "--xi", "1,1,-1,-1", "--k", "3",
        "--points", "3,1,-1,-3;2,1,-1,-2",
    )
    doc = json.loads(out)
    jsonschema.validate(doc, schema("crosscheck"))
    assert code == 0 and doc["status"] == "both sides vanish"


def test_scan_d3_csv(capsys):
    code, out, _ = run(capsys, "scan", "--family", "D", "--rank", "3", "--k", "3",
                       "--line", "1,2,0:0,0,1:21")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert out.splitlines()[0] == ",".join(scan_columns([3]))
    assert out.splitlines()[0] == "t,xi,n,w_xi_order,mu_3_zero,jacobian_rank,independent"
    assert len(rows) == 21
    assert [r["t"] for r in rows if r["mu_3_zero"] == "true"] == ["0"]


def test_scan_a3_cubic_csv(capsys):
    code, out, _ = run(capsys, "scan", "--family", "A", "--rank", "3", "--k", "3",
                       "--line", "1,1,-1,-1:1,-1,0,0:7")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["t"] for r in rows if r["mu_3_zero"] == "true"] == ["0"]
    code, out, _ = run(capsys, "scan", "--family", "A", "--rank", "3", "--k", "3",
                       "--line", "1,1,-1,-1:1,-1,0,0:3", "--format", "json")
    doc = json.loads(out)
    assert doc["columns"] == scan_columns([3]) and len(doc["rows"]) == 3


def test_internal_failure_exit_1(capsys, monkeypatch):
    import hamchar.cli as cli

    def broken(*a, **kw):
        raise AssertionError("remainder is nonzero")

    monkeypatch.setattr(cli, "mu_class", broken)
    code, _, err = run(capsys, "mu", "--family", "B", "--rank", "2", "--xi", "1,2", "--k", "2")
    assert code == 1 and "internal invariant failure" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["mu", "--family", "D", "--rank", "4", "--xi", "1,2,3,4"],
        ["independence", "--family", "B", "--rank", "3", "--xi", "1,2,3", "--seed", "7"],
        ["crosscheck", "--family", "D", "--rank", "3", "--samples", "20000", "--threads", "2"],
        ["scan", "--family", "A", "--rank", "2", "--line", "1,0,-1:0,1,-1:5"],
    ],
)
def test_reruns_are_byte_identical(tmp_path, argv):
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}"
        proc = subprocess.run(
            [sys.executable, "-m", "hamchar", *argv, "--output", str(path)],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and outs[0]
