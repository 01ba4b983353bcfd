import json
import math
import os
import pathlib
import subprocess

import jsonschema
import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "tests" / "data"
SCHEMAS = ROOT / "schemas"
CLI = os.environ.get("QGRAPH_CLI", str(ROOT / "build" / "qgraph"))


def run(*args, check=True):
    proc = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if check:
        assert proc.returncode == 0, proc.stderr
    return proc


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def g(name):
    return DATA / f"{name}.json"


CASES = [
    ("validate", [g("theta")]),
    ("validate", [g("star3")]),
    ("validate", [g("tadpole")]),
    ("scattering-matrix", [g("star_internal"), "--k", 2.0]),
    ("scattering-matrix", [g("theta"), "--k", 2.0, "--vertex", "v1"]),
    ("eigenvalues", [g("interval_neumann"), "--kmax", 10, "--tol", 1e-10]),
    ("eigenvalues", [g("lasso"), "--kmax", 10]),
    ("spectral-shift", [g("lasso"), "--lmin", 0.1, "--lmax", 30, "--n", 50]),
    ("spectral-shift", [g("interval_neumann"), "--lmin", 0.1, "--lmax", 30, "--n", 5]),
    ("green", [g("theta"), "--k", 1, "--k-im", 0.5, "--x-edge", "i1", "--x", 0.3, "--y-edge", "i2", "--y", 0.2]),
    ("green", [g("star_internal"), "--k", 1, "--k-im", 1, "--x-edge", "e1", "--x", 2, "--y-edge", "i1",
               "--y", 0.2, "--method", "closed"]),
    ("heat-kernel", [g("star_internal"), "--t", 0.3, "--x-edge", "e1", "--x", 0.3, "--y-edge", "i1", "--y", 0.2]),
    ("heat-trace", [g("theta"), "--t", 0.1, 0.5]),
    ("heat-trace", [g("dirichlet_capped"), "--t", 0.1, 0.5, "--side", "spectral", "--compare", "dirichlet"]),
    ("trace-compare", [g("theta"), "--t", 0.1, 0.5, "--eps", 1e-10]),
    ("trace-compare", [g("star_internal"), "--t", 0.3, "--eps", 1e-8, "--compare", "dirichlet"]),
    ("cycles", [g("theta"), "--lambda", 3]),
    ("cycles", [g("circle"), "--lambda", 5, "--skip-zero"]),
    ("length-spectrum", [g("interval_neumann"), "--omega-max", 9, "--kmax", 200]),
    ("length-spectrum", [g("lasso"), "--omega-max", 6, "--kmax", 60]),
    ("length-spectrum", [g("theta"), "--source", "cycles"]),
    ("check-hypotheses", [g("theta")]),
    ("check-hypotheses", [g("circle")]),
]


@pytest.mark.parametrize("command,args", CASES, ids=[f"{c}-{i}" for i, (c, _) in enumerate(CASES)])
def test_output_matches_schema(command, args):
    out = json.loads(run(command, *args, "--threads", 2).stdout)
    jsonschema.validate(out, schema(command))


@pytest.mark.parametrize("command,args", CASES[::3], ids=[c for c, _ in CASES[::3]])
def test_csv_has_header_and_rows(command, args):
    text = run(command, *args, "--format", "csv").stdout
    lines = text.strip().splitlines()
    assert len(lines) >= 1
    assert len(lines[0].split(",")) >= 2


def test_csv_header_without_records():
    text = run("eigenvalues", g("lasso"), "--kmax", 2, "--format", "csv").stdout
    assert text == "k,lambda,multiplicity,kernel_dim,residual,candidate\n"


def test_every_subcommand_has_a_schema():
    names = {c for c, _ in CASES}
    assert len(names) == 11
    for n in names | {"error"}:
        jsonschema.Draft202012Validator.check_schema(schema(n))


def test_byte_identical_output_across_runs_and_threads():
    args = ["trace-compare", g("theta"), "--t", 0.05, 0.3, 1.0, "--eps", 1e-10]
    a = run(*args, "--threads", 1).stdout
    b = run(*args, "--threads", 4).stdout
    c = run(*args, "--threads", 4).stdout
    assert a == b == c
    a = run("cycles", g("tetrahedron"), "--lambda", 4, "--threads", 1).stdout
    b = run("cycles", g("tetrahedron"), "--lambda", 4, "--threads", 8).stdout
    assert a == b


def test_theta_euler_number():
    out = json.loads(run("validate", g("theta")).stdout)
    assert out["euler_number"] == 1
    assert out["gauss_bonnet_ok"]


def test_interval_trace_discrepancy():
    out = json.loads(run("trace-compare", g("interval_neumann"), "--t", 0.1, "--eps", 1e-9).stdout)
    assert out["records"][0]["discrepancy"] <= 1e-8


def test_interval_eigenvalues():
    out = json.loads(run("eigenvalues", g("interval_neumann"), "--kmax", 10, "--tol", 1e-10).stdout)
    ks = [r["k"] for r in out["records"]]
    assert ks[0] == 0.0
    assert all(abs(k - n * math.pi) <= 1e-10 for n, k in enumerate(ks))
    assert len(ks) == 4


def test_json_floats_round_trip():
    text = run("cycles", g("theta"), "--lambda", 3).stdout
    for rec in json.loads(text)["records"]:
        assert float(repr(rec["length"])) == rec["length"]


def test_seeded_magnetic_phases():
    a = run("cycles", g("theta"), "--lambda", 3, "--random-magnetic", "--seed", 7).stdout
    b = run("cycles", g("theta"), "--lambda", 3, "--random-magnetic", "--seed", 7).stdout
    c = run("cycles", g("theta"), "--lambda", 3, "--random-magnetic", "--seed", 8).stdout
    assert a == b and a != c
    out = json.loads(a)
    assert any(abs(r["weight_im"]) > 1e-6 for r in out["records"])


def check_error(proc, code):
    assert proc.returncode == code
    diag = json.loads(proc.stderr.strip().splitlines()[-1])
    jsonschema.validate(diag, schema("error"))
    assert proc.stdout == ""
    return diag


def test_usage_errors_exit_2():
    check_error(run("no-such-command", check=False), 2)
    check_error(run("eigenvalues", g("theta"), check=False), 2)
    check_error(run("eigenvalues", g("theta"), "--kmax", -1, check=False), 2)


def test_validation_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"vertices": ["a", "b"],
                               "internal_edges": [{"id": "i", "from": "a", "to": "b", "length": -1}]}))
    assert check_error(run("validate", bad, check=False), 2)["error"] == "validation"
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert check_error(run("validate", broken, check=False), 2)["error"] == "parse"
    diag = check_error(run("cycles", g("tadpole"), "--lambda", 3, check=False), 2)
    assert diag["code"] == "tadpole-present"


def test_numeric_errors_exit_3():
    diag = check_error(run("heat-trace", g("theta"), "--t", 1e12, check=False), 3)
    assert diag["code"] == "cutoff-overflow"
    diag = check_error(run("heat-kernel", g("theta"), "--t", 1e6, "--x-edge", "i1", "--x", 0.1,
                           "--y-edge", "i2", "--y", 0.1, check=False), 3)
    assert diag["code"] == "cutoff-overflow"


def test_out_flag_writes_file(tmp_path):
    target = tmp_path / "r.json"
    proc = run("validate", g("theta"), "--out", target)
    assert proc.stdout == ""
    assert json.loads(target.read_text())["euler_number"] == 1
