import csv
import io
import json
import math

import pytest

from lobachevsky.cli import main
from lobachevsky.geometry import sigma


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def js(capsys, *args):
    code, out, err = run(capsys, *args)
    assert code == 0, err
    return json.loads(out)


def rows(capsys, *args):
    code, out, err = run(capsys, *args, "--format", "csv")
    assert code == 0, err
    return list(csv.DictReader(io.StringIO(out)))


def test_levels(capsys):
    d = js(capsys, "levels", "--a", "1", "--b", "3")
    assert [x["energy"] for x in d["levels"]] == [2.75, 6.75, 8.75]
    assert d["threshold"] == 9.0
    assert d["schema_version"] == 1
    assert d["params"]["a"] == 1.0 and d["params"]["b"] == 3.0
    d = js(capsys, "levels", "--a", "1", "--b", "0.4")
    assert d["levels"] == [] and d["threshold"] == pytest.approx(0.16)


def test_b_and_B_agree(capsys):
    _, a, _ = run(capsys, "levels", "--b", "3")
    _, b, _ = run(capsys, "levels", "--B", "3", "--a", "1")
    assert a == b


def test_deterministic(capsys):
    _, a, _ = run(capsys, "spectrum", "--b", "3", "--format", "csv")
    _, b, _ = run(capsys, "spectrum", "--b", "3", "--format", "csv")
    assert a == b


def test_config_errors(capsys):
    assert run(capsys, "levels")[0] == 2
    assert run(capsys, "levels", "--b", "1", "--B", "1")[0] == 2
    assert run(capsys, "levels", "--b", "1", "--a", "-1")[0] == 2
    assert run(capsys, "spectrum", "--b", "1", "--alpha", "0", "--lambda", "2")[0] == 2
    assert run(capsys, "spectrum", "--b", "1", "--w", "0,-1")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "berry-phase", "--b", "1", "--circle", "0,1")[0] == 2


def test_numeric_failure_exit(capsys):
    code, _, err = run(capsys, "wavefunction", "--b", "3", "--level", "3", "--alpha", "0")
    assert code == 3 and "numerical failure" in err


def test_qfunction(capsys):
    d = js(capsys, "qfunction", "--b", "3", "--zeta-min", "-5", "--zeta-max", "8.9",
           "--points", "400")
    assert d["convention"]["sign"] == -1
    assert d["convention"]["drift"] < 1e-5
    zs = [s["zeta"] for s in d["samples"]]
    qs = [s["Q"] for s in d["samples"]]
    poles = [2.75, 6.75, 8.75]
    for (z1, q1), (z2, q2) in zip(zip(zs, qs), zip(zs[1:], qs[1:])):
        if not any(z1 < e < z2 for e in poles):
            assert q2 > q1
    assert all(s["dQ"] > 0 for s in d["samples"])


def test_qfunction_near_pole(capsys):
    d = js(capsys, "qfunction", "--b", "3", "--zeta-min", str(2.75 - 1e-8),
           "--zeta-max", str(2.75 + 1e-8), "--points", "3")
    assert len(d["samples"]) == 2
    assert all(abs(s["Q"]) > 1e6 for s in d["samples"])


def test_spectrum(capsys):
    r = rows(capsys, "spectrum", "--b", "3", "--alpha", "0")
    bound = [x for x in r if x["status"] == "bound"]
    assert len(bound) == 3
    assert all(float(x["residual"]) < 1e-12 for x in bound)
    es = [float(x["energy"]) for x in bound]
    assert es == sorted(es)
    assert r[-1]["status"] == "unsolvable" and "Q(threshold-)" in r[-1]["note"]
    r2 = rows(capsys, "spectrum", "--b", "3", "--alpha", "0", "--w", "5,0.1")
    assert [x["energy"] for x in r2] == [x["energy"] for x in r]
    d = js(capsys, "spectrum", "--b", "3", "--alpha", "0")
    sp = d["levels"][-1]
    assert sp["alpha"] == 0.0 and sp["q_threshold"] < 0


def test_spectrum_lambda(capsys):
    d1 = js(capsys, "spectrum", "--b", "2", "--lambda", str(math.e))
    d2 = js(capsys, "spectrum", "--b", "2", "--alpha", repr(1 / (2 * math.pi)))
    assert [x["energy"] for x in d1["levels"]] == [x["energy"] for x in d2["levels"]]


def test_wavefunction(capsys):
    d = js(capsys, "wavefunction", "--b", "3", "--w", "0,1", "--level", "1",
           "--window=-1,1,0.5,1.5", "--nx", "5", "--ny", "3")
    assert abs(d["norm"] - 1.0) < 1e-6
    grid = d["grid"]
    assert len(grid) == 15
    at_w = [g for g in grid if g["x"] == 0.0 and g["y"] == 1.0]
    assert at_w and at_w[0]["abs2"] is None
    # mirror points x -> -x are at the same sigma from w = i
    a = [g for g in grid if g["x"] == -1.0 and g["y"] == 0.5][0]
    b = [g for g in grid if g["x"] == 1.0 and g["y"] == 0.5][0]
    assert sigma(complex(a["x"], a["y"]), 1j) == sigma(complex(b["x"], b["y"]), 1j)
    assert a["abs2"] == pytest.approx(b["abs2"], rel=1e-11)
    r = rows(capsys, "wavefunction", "--b", "3", "--w", "0,1", "--level", "1",
             "--window=-1,1,0.5,1.5", "--nx", "5", "--ny", "3")
    assert list(r[0]) == ["x", "y", "re", "im", "abs2"]
    assert any(x["abs2"] == "nan" for x in r)


def test_berry_connection(capsys):
    d = js(capsys, "berry-connection", "--b", "3", "--w", "0,2")
    assert d["numeric"]["u"] == pytest.approx(1.5, rel=1e-4)
    assert d["analytic"] == {"u": 1.5, "v": 0.0}


def test_berry_phase_analytic_default_circle(capsys):
    d = js(capsys, "berry-phase", "--b", "1", "--mode", "analytic")
    assert d["analytic_phase"] == pytest.approx(2 * math.pi * (math.cosh(1) - 1), rel=1e-12)
    assert d["flux_quanta"] == d["flux"] / (2 * math.pi)
    assert d["loop"]["type"] == "geodesic_circle"


def test_berry_phase_polyline(capsys, tmp_path):
    f = tmp_path / "sq.txt"
    f.write_text("0 1\n1 1\n1 2\n0 2\n")
    d = js(capsys, "berry-phase", "--b", "1", "--mode", "analytic", "--polyline", str(f))
    assert d["analytic_phase"] == pytest.approx(0.5, rel=1e-13)
    f.write_text("0 1\n1 -1\n1 2\n")
    assert run(capsys, "berry-phase", "--b", "1", "--polyline", str(f))[0] == 2


@pytest.mark.slow
def test_berry_phase_numeric_sweep(capsys):
    d = js(capsys, "berry-phase", "--b", "1", "--circle", "0,1,0.3", "--samples", "16",
           "--alpha", "0.5", "--level", "0", "--alpha-sweep", "0,1")
    assert d["relative_deviation"] < 1e-3
    assert d["alpha"] == 0.5 and d["level"] == 0
    assert d["alpha_sweep"]["max_pairwise_relative_deviation"] < 2e-3


def test_out_file(capsys, tmp_path):
    out = tmp_path / "levels.csv"
    code, stdout, _ = run(capsys, "levels", "--b", "3", "--format", "csv", "--out", str(out))
    assert code == 0 and stdout == ""
    text = out.read_text()
    assert text.splitlines()[0] == "kind,n,energy"
    assert "threshold,,9" in text
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".lobachevsky-")]


def test_verify_subset(capsys):
    code, out, err = run(capsys, "verify", "--criteria", "1,10")
    d = json.loads(out)
    assert code == 0 and d["all_passed"]
    assert [r["number"] for r in d["results"]] == [1, 10]
    assert "[PASS]" in err
