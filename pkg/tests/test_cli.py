import json

import numpy as np
import pytest

import oracles
from shadowlab import cli
from shadowlab.matrix import write_matrix


def run(args, capsys=None):
    code = cli.main([str(a) for a in args])
    out = capsys.readouterr() if capsys else None
    return code, out


def rows(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


def test_sample_outputs_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        code, _ = run(["sample", "--jordan", 2, "--count", "2e4", "--seed", 7, "--nx", 20, "--ny", 20,
                       "--out", d], capsys)
        assert code == 0
    for name in ("samples.csv", "histogram.csv", "histogram.pgm"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    head, body = rows(a / "samples.csv")
    assert head == ["re", "im"] and len(body) == 20000
    z = np.array([complex(float(x), float(y)) for x, y in body])
    assert np.abs(z).max() <= 0.5 + 1e-12


def test_sample_threads_do_not_change_output(tmp_path, capsys):
    for t in (1, 3):
        run(["sample", "--diag", "1,i,-1", "--count", 5000, "--threads", t, "--nx", 5, "--ny", 5,
             "--out", tmp_path / str(t)], capsys)
    assert (tmp_path / "1" / "samples.csv").read_bytes() == (tmp_path / "3" / "samples.csv").read_bytes()


def test_rankk_segment(tmp_path, capsys):
    write_matrix(tmp_path / "herm4.json", np.diag([0.0, 1, 3, 5]))
    code, _ = run(["rankk", "--matrix", tmp_path / "herm4.json", "--k", 2, "--out", tmp_path], capsys)
    assert code == 0
    head, body = rows(tmp_path / "rankk.csv")
    pts = sorted({(round(float(x), 6), round(float(y), 6)) for x, y in body})
    assert pts == [(1.0, 0.0), (3.0, 0.0)]


def test_equal_on_rank_pair(tmp_path, capsys):
    a, b = oracles.swap_pair()
    write_matrix(tmp_path / "a.json", a)
    write_matrix(tmp_path / "b.json", b)
    code, out = run(["equal", "--a", tmp_path / "a.json", "--b", tmp_path / "b.json"], capsys)
    assert code == 0 and out.out.strip() == "equal"
    code, out = run(["equal", "--a", tmp_path / "a.json", "--b", tmp_path / "b.json", "--route", "trace"], capsys)
    assert out.out.strip() == "equal"
    write_matrix(tmp_path / "c.json", a + 0.1 * np.eye(3))
    code, out = run(["equal", "--a", tmp_path / "a.json", "--b", tmp_path / "c.json"], capsys)
    assert code == 0 and out.out.startswith("unequal witness 1,0")


def test_density_variants(tmp_path, capsys):
    code, _ = run(["density", "--diag", "0,1,3,5", "--points", 101, "--out", tmp_path / "h"], capsys)
    assert code == 0
    head, body = rows(tmp_path / "h" / "density.csv")
    assert head == ["u", "density", "theta"] and len(body) == 101
    code, _ = run(["density", "--jordan", 3, "--nx", 30, "--ny", 30, "--out", tmp_path / "r"], capsys)
    assert code == 0
    head, body = rows(tmp_path / "r" / "radial.csv")
    assert head == ["r", "f"]
    assert (tmp_path / "r" / "density_grid.pgm").exists()
    code, _ = run(["density", "--superdiag", "1", "--nx", 10, "--ny", 10, "--out", tmp_path / "e"], capsys)
    assert code == 0 and (tmp_path / "e" / "density_grid.csv").exists()
    M = oracles.A3()
    write_matrix(tmp_path / "a3.json", M)
    code, out = run(["density", "--matrix", tmp_path / "a3.json", "--out", tmp_path / "x"], capsys)
    assert code == 2 and "zernike" in out.err


def test_moments_marginal_critical_zernike(tmp_path, capsys):
    code, _ = run(["moments", "--jordan", 2, "--order", 2, "--out", tmp_path], capsys)
    head, body = rows(tmp_path / "moments.csv")
    table = {(int(j), int(k)): complex(float(r), float(i)) for j, k, r, i in body}
    assert code == 0 and table[1, 1] == pytest.approx(1 / 6) and table[0, 0] == 1
    code, _ = run(["marginal", "--jordan", 3, "--angles", 4, "--points", 11, "--out", tmp_path], capsys)
    head, body = rows(tmp_path / "marginal.csv")
    assert code == 0 and len(body) == 44
    code, out = run(["critical", "--superdiag", "1,1,1", "--n-theta", 256, "--out", tmp_path], capsys)
    assert code == 0 and out.out.startswith("2 curve(s)")
    head, body = rows(tmp_path / "critical.csv")
    assert head == ["theta", "re", "im", "branch"]
    code, _ = run(["zernike", "--jordan", 2, "--order", 6, "--nx", 9, "--ny", 9, "--out", tmp_path], capsys)
    head, body = rows(tmp_path / "zernike_coeffs.csv")
    assert code == 0 and len(body) == 28 and body[0] == ["0", "0", "1", "0"]


def test_directsum(tmp_path, capsys):
    write_matrix(tmp_path / "a.json", np.array([[-1, 0], [1, 0]]))
    write_matrix(tmp_path / "b.json", np.array([[1j]]))
    code, _ = run(["directsum", "--a", tmp_path / "a.json", "--b", tmp_path / "b.json", "--count", 2000,
                   "--nx", 31, "--ny", 31, "--t-nodes", 16, "--out", tmp_path], capsys)
    assert code == 0
    head, body = rows(tmp_path / "directsum_grid.csv")
    v = np.array([float(r[2]) for r in body])
    dx = np.diff(np.unique([float(r[0]) for r in body]))[0]
    dy = np.diff(np.unique([float(r[1]) for r in body]))[0]
    assert v.sum() * dx * dy == pytest.approx(1, abs=1e-6)


@pytest.mark.parametrize("argv", [
    ["sample", "--count", "0", "--jordan", "2"],
    ["sample", "--count", "1.5", "--jordan", "2"],
    ["sample", "--count", "abc", "--jordan", "2"],
    ["sample"],
    ["sample", "--jordan", "2", "--diag", "1,2"],
    ["moments", "--jordan", "70"],
    ["rankk", "--jordan", "3", "--k", "5"],
    ["zernike", "--jordan", "2", "--nx", "0"],
    ["sample", "--jordan", "2", "--box", "1,0,0,1"],
    ["frobnicate"],
])
def test_invalid_input_exit_2(argv, tmp_path, capsys):
    code, out = run(argv + ["--out", str(tmp_path)] if argv[0] != "frobnicate" else argv, capsys)
    assert code == 2 and "error" in out.err


def test_missing_and_malformed_files(tmp_path, capsys):
    code, _ = run(["moments", "--matrix", tmp_path / "nope.json", "--out", tmp_path], capsys)
    assert code == 2
    (tmp_path / "bad.json").write_text("{not json")
    code, _ = run(["moments", "--matrix", tmp_path / "bad.json", "--out", tmp_path], capsys)
    assert code == 2
    (tmp_path / "dim.json").write_text(json.dumps({"n": 3, "entries": [[1, 0]] * 4}))
    code, _ = run(["moments", "--matrix", tmp_path / "dim.json", "--out", tmp_path], capsys)
    assert code == 2


def test_numerical_failure_exit_3(tmp_path, capsys, monkeypatch):
    import shadowlab.geometry as geo

    class Nowhere:
        vertices = np.array([100.0 + 0j])

        def contains(self, z, tol=0):
            return np.zeros(np.shape(z), bool)

    monkeypatch.setattr(geo, "numerical_range_boundary", lambda A, T=720: Nowhere())
    code, out = run(["sample", "--jordan", 2, "--count", 100, "--out", tmp_path], capsys)
    assert code == 3 and "samples_in_numerical_range" in out.err
    assert not (tmp_path / "samples.csv").exists()
