import json

import numpy as np
import pytest

from forbiddenset import cli
from forbiddenset.enumeration.render import read_ppm

RICCATI = "name: r\norder: 1\nnumerator: x0\ndenominator: 1 + x0\n"
RECIP_SUM = "name: rs\norder: 2\nnumerator: x1 + x0\ndenominator: x0*x1\n"
POLE_WORDS = "name: pw\nfield: C\norder: 1\nnumerator: 1\ndenominator: x0^2 - 1\n"
POWER_POLE = "name: pp\nkind: power-pole\norder: 1\nparams: a = -1/2, p = 3\n"


@pytest.fixture
def eqdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name, text in [("r", RICCATI), ("rs", RECIP_SUM), ("pw", POLE_WORDS), ("pp", POWER_POLE)]:
        (tmp_path / f"{name}.eq").write_text(text)
    return tmp_path


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify(eqdir, capsys):
    code, out, _ = run(capsys, "classify", "r.eq")
    assert code == cli.EXIT_OK and "R=1/4" in out
    code, out, _ = run(capsys, "classify", "r.eq", "--json")
    rep = json.loads(out)
    assert rep["kind"] == "riccati1" and rep["R"] == "1/4"


def test_usage_and_input_errors(eqdir, capsys):
    assert run(capsys, "fs", "r.eq", "--bogus")[0] == cli.EXIT_USAGE
    assert run(capsys)[0] == cli.EXIT_USAGE
    assert run(capsys, "classify", "missing.eq")[0] == cli.EXIT_INPUT
    (eqdir / "bad.eq").write_text("order: 1\nnumerator: x0 +* 1\n")
    code, _, err = run(capsys, "classify", "bad.eq")
    assert code == cli.EXIT_PARSE and "line 2" in err


def test_fs_closed_form(eqdir, capsys):
    code, out, _ = run(capsys, "fs", "r.eq", "--depth", "6", "--out", "o", "--csv", "--svg")
    assert code == cli.EXIT_OK and out.startswith("closed:")
    payload = json.loads((eqdir / "o" / "fs.json").read_text())
    assert payload["method"] == "closed" and payload["report"]["status"] == "exact-verified"
    pts = [r["point"] for r in payload["description"]["records"]]
    assert pts[:3] == [["-1"], ["-1/2"], ["-1/3"]]
    assert (eqdir / "o" / "fs.csv").exists() and (eqdir / "o" / "fs.svg").exists()
    assert (eqdir / "o" / "manifest.json").exists()


def test_fs_words_and_cobweb(eqdir, capsys):
    code, out, _ = run(capsys, "fs", "pw.eq", "--depth", "5", "--out", "w")
    assert code == cli.EXIT_OK and out.startswith("symbolic: 62 records")
    code, out, _ = run(capsys, "fs", "pp.eq", "--out", "c")
    assert code == cli.EXIT_OK and "float-verified" in out
    details = json.loads((eqdir / "c" / "fs.json").read_text())["report"]["details"]
    assert details["max_local_residual"] < 1e-8


def test_fs_curves_on_order_two(eqdir, capsys):
    code, out, _ = run(capsys, "fs", "rs.eq", "--depth", "4", "--out", "cv")
    assert code == cli.EXIT_OK and out.startswith("curves:")


def test_method_mismatch(eqdir, capsys):
    code, _, err = run(capsys, "fs", "pp.eq", "--method", "closed", "--out", "x")
    assert code == cli.EXIT_METHOD and "cobweb" in err
    assert run(capsys, "fs", "r.eq", "--method", "symbolic", "--out", "x")[0] == cli.EXIT_METHOD


def test_grid_and_replay(eqdir, capsys):
    args = ["grid", "rs.eq", "--region", "-2", "2", "-2", "2", "--res", "40", "--horizon", "6",
            "--out", "g/g.ppm", "--steps-csv"]
    assert run(capsys, *args)[0] == cli.EXIT_OK
    img = read_ppm(eqdir / "g" / "g.ppm")
    steps = np.loadtxt(eqdir / "g" / "g.steps.csv", delimiter=",", dtype=int)
    assert img.shape == (40, 40, 3) and steps.shape == (40, 40)
    before = (eqdir / "g" / "g.ppm").read_bytes()
    code, out, _ = run(capsys, "replay", "g/g.ppm.manifest.json")
    assert code == cli.EXIT_OK and "identical" in out
    assert (eqdir / "g" / "g.ppm").read_bytes() == before


def test_replay_detects_changed_input(eqdir, capsys):
    run(capsys, "grid", "rs.eq", "--res", "10", "--horizon", "3", "--out", "g.ppm")
    (eqdir / "rs.eq").write_text(RECIP_SUM.replace("x1 + x0", "x1 - x0"))
    assert run(capsys, "replay", "g.ppm.manifest.json")[0] == cli.EXIT_REPLAY_MISMATCH


def test_grid_rejects_bad_input(eqdir, capsys):
    assert run(capsys, "grid", "rs.eq", "--res", "0")[0] == cli.EXIT_INPUT
    assert run(capsys, "grid", "rs.eq", "--region", "1", "0", "0", "1")[0] == cli.EXIT_INPUT
    assert run(capsys, "grid", "r.eq", "--res", "10")[0] == cli.EXIT_INPUT  # order 1 without --slice


def test_grid_backends_give_identical_rasters(eqdir, capsys):
    for b in ("numpy", "numba"):
        run(capsys, "grid", "rs.eq", "--res", "30", "--horizon", "5", "--backend", b, "--out", f"{b}.ppm")
    assert (eqdir / "numpy.ppm").read_bytes() == (eqdir / "numba.ppm").read_bytes()
    assert (eqdir / "numpy.ppm.json").read_bytes() == (eqdir / "numba.ppm.json").read_bytes()


def test_catalog_workflow(eqdir, capsys, catalog_root):
    code, out, _ = run(capsys, "catalog", "ingest", "--seed")
    assert code == cli.EXIT_OK and out.count("new  ") == 22
    code, out, _ = run(capsys, "catalog", "ingest", "r.eq")
    assert out.startswith("dup  ")
    rid = out.split()[1]
    code, out, _ = run(capsys, "catalog", "query", "--family", "riccati1", "--json")
    assert len(json.loads(out)) == 4
    run(capsys, "fs", "r.eq", "--depth", "5", "--out", "o")
    code, out, _ = run(capsys, "catalog", "attach", rid, "o/fs.json")
    assert code == cli.EXIT_OK and "v2: exact-verified" in out
    code, out, _ = run(capsys, "catalog", "query", "--status", "exact-verified")
    assert out.split()[0] == rid
    code, out, _ = run(capsys, "catalog", "show", rid, "--version", "1")
    assert json.loads(out)["results"] == []
    code, out, _ = run(capsys, "catalog", "export", rid)
    assert "denominator: x0 + 1" in out


def test_catalog_errors(eqdir, capsys, catalog_root):
    run(capsys, "catalog", "ingest", "--seed")
    code, out, _ = run(capsys, "catalog", "ingest", "rs.eq")
    rid = out.split()[1]
    run(capsys, "fs", "r.eq", "--depth", "4", "--out", "o")
    assert run(capsys, "catalog", "attach", rid, "o/fs.json")[0] == cli.EXIT_STALE
    assert run(capsys, "catalog", "show", "eq-nothing")[0] == cli.EXIT_UNKNOWN_RECORD
    assert run(capsys, "catalog", "attach", rid, "nope.json")[0] == cli.EXIT_INPUT
    assert run(capsys, "catalog", "ingest")[0] == cli.EXIT_INPUT
