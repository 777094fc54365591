import json
import subprocess
import sys

import numpy as np
import pytest

from siegel_moduli.cli import main
from siegel_moduli.jsonio import element_from_json, point_from_json


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    data = json.loads(out.out) if out.out.strip() else None
    return code, data, out


POINT = '{"g":1,"X":[[0.3]],"Y":[[0.4]]}'


def test_reduce(capsys):
    code, data, _ = run(["reduce", "--point", POINT], capsys)
    assert code == 0
    Z = point_from_json(data["reduced"])
    assert abs(Z.Z[0, 0] - (-0.2 + 1.6j)) < 1e-12
    assert data["word_length"] == 2
    assert element_from_json(data["transform"]).integral


def test_distance(capsys):
    a = '{"g":1,"X":[[0]],"Y":[[1]]}'
    b = '{"g":1,"X":[[0]],"Y":[[2]]}'
    code, data, _ = run(["distance", "--a", a, "--b", b], capsys)
    assert code == 0
    assert data["distance"] == 0.693147180559945


def test_distance_mixed_genus_and_universal_input(capsys):
    a = '{"g":1,"point":{"g":1,"X":[[0]],"Y":[[1]]}}'
    b = '{"g":2,"X":[[0,0],[0,0]],"Y":[[2,0],[0,1]]}'
    code, data, _ = run(["distance", "--a", a, "--b", b, "--quotient"], capsys)
    assert code == 0 and data["genus"] == 2
    assert data["distance"] == pytest.approx(np.log(2), abs=1e-14)


def test_round_trip(capsys):
    _, data, _ = run(["reduce", "--point", POINT], capsys)
    again_point = json.dumps(data["reduced"])
    code, data2, _ = run(["reduce", "--point", again_point], capsys)
    assert code == 0
    assert data2["reduced"] == data["reduced"]
    M = element_from_json(data["transform"])
    assert element_from_json(json.loads(json.dumps(data["transform"]))).matrix.tolist() == M.matrix.tolist()
    code, emb, _ = run(["embed", "--point", json.dumps(data["reduced"]), "--genus", "3"], capsys)
    assert code == 0
    code, emb2, _ = run(["embed", "--point", json.dumps(emb["embedded"])], capsys)
    assert emb2["universal"] == emb["universal"]
    assert emb2["universal"]["g"] == 1


def test_strata(capsys):
    code, data, _ = run(["strata", "--genus", "3"], capsys)
    assert code == 0 and data["count"] == 6
    assert data["strata"][-1] == {"kind": "boundary", "genera": []}


def test_period(capsys):
    code, data, _ = run(["period", "--curve", '{"branch_points": [-1, 0, 1], "normalize": true}'], capsys)
    assert code == 0
    assert abs(point_from_json(data["reduced"]).Z[0, 0] - 1j) < 1e-6
    pts = [[1, 0], [-0.5, 0.8660254037844386], [-0.5, -0.8660254037844386]]
    code, data, _ = run(["period", "--branch-points", json.dumps(pts)], capsys)
    assert abs(point_from_json(data["reduced"]).Z[0, 0] - (0.5 + 0.8660254037844386j)) < 1e-6
    code, data, _ = run(["period", "--branch-points", "[-2, -1, 0, 1, 2, 3]", "--no-normalize"], capsys)
    assert code == 0 and "reduced" not in data and data["genus"] == 2


def test_degenerate(capsys):
    fam = '{"kind": "sep", "epsilons": [0.1, 0.01, 0.001, 0.0001]}'
    code, data, _ = run(["degenerate", "--family", fam], capsys)
    assert code == 0 and data["classification"] == "Finite"
    code, data, _ = run(["degenerate", "--kind", "nonsep", "--epsilons", "[0.1, 0.01, 0.001, 0.0001]"], capsys)
    assert code == 0 and data["classification"] == "Divergent"


def test_volume(capsys):
    code, data, _ = run(["volume", "--genus", "1", "--quadrature"], capsys)
    assert code == 0 and abs(data["estimate"] - np.pi / 3) < 1e-6
    code, data, _ = run(["volume", "--genus", "1", "--n", "20000", "--seed", "3"], capsys)
    assert code == 0 and data["n"] == 20000 and data["seed"] == 3


def test_integrate_weights(capsys):
    code, data, _ = run(["integrate", "--weights", '{"1": 1.0}', "--n", "20000"], capsys)
    assert code == 0 and list(data["components"]) == ["1"]
    code, data, _ = run(["integrate", "--weights", '{"1": 1.0, "2": 0}', "--n", "20000"], capsys)
    assert code == 2 and data["error_kind"] == "invalid_config"


def test_partition_deterministic(tmp_path):
    cmd = [sys.executable, "-m", "siegel_moduli", "partition", "--alpha", "1.0", "--gmax", "2", "--n", "100000", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b
    data = json.loads(a)
    assert set(data) >= {"estimate", "stderr", "n", "seed", "tail_bound"}


def test_config_file_merged_under_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sampling\nalpha = 2.0\nG = 1\nseed = 5\nn_samples = 5000\nN = 10\n")
    code, data, _ = run(["--config", str(cfg), "partition", "--seed", "9"], capsys)
    assert code == 0
    assert data["alpha"] == 2.0 and data["gmax"] == 1 and data["seed"] == 9 and data["N"] == 10
    assert data["n"] == 5000
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    code, _, out = run(["--config", str(bad), "partition"], capsys)
    assert code == 64


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, data, _ = run(["--out", str(target), "strata", "--genus", "2"], capsys)
    assert code == 0 and data is None
    assert json.loads(target.read_text())["count"] == 3


def test_error_codes(capsys, tmp_path):
    code, data, _ = run(["reduce", "--point", '{"g":1,"X":[[0.3]],"Y":[[-0.4]]}'], capsys)
    assert code == 2 and data["error_kind"] == "not_positive_definite"
    code, _, out = run(["reduce", "--point", POINT, "--bogus"], capsys)
    assert code == 64 and "bogus" in out.err
    code, _, _ = run(["frobnicate"], capsys)
    assert code == 64
    code, data, _ = run(["reduce", "--point", str(tmp_path / "missing.json")], capsys)
    assert code == 1
    code, data, _ = run(["reduce", "--point", "{not json"], capsys)
    assert code == 1 and data["error_kind"] == "input_error"
    code, data, _ = run(["reduce", "--point", '{"g":2,"X":[[0]],"Y":[[1]]}'], capsys)
    assert code == 1
    code, data, _ = run(["degenerate", "--kind", "sep", "--epsilons", "[0.01, 0.1]"], capsys)
    assert code == 2 and data["error_kind"] == "invalid_family"


def test_point_from_file(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(POINT)
    code, data, _ = run(["reduce", "--point", str(f)], capsys)
    assert code == 0


def test_fifteen_digits(capsys):
    _, data, out = run(["volume", "--genus", "1", "--quadrature"], capsys)
    assert '"estimate": 1.0471975511966' in out.out
