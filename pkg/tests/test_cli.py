"""End-to-end command line behavior: exit codes, files, determinism."""

from __future__ import annotations

import json

import numpy as np
import pytest

from conftest import random_stiffness

import surfimp.io as sio
from surfimp import MaterialParams, OrthoParams, VtiParams
from surfimp.cli import main


def write_json(path, doc) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return str(path)


def vti_doc(with_grads: bool = True) -> dict:
    doc = {"schema_version": 1, "model": "vti",
           "components": {"c1111": 10.0, "c3333": 8.0, "c1133": 3.0,
                          "c1313": 2.0, "c1212": 1.5},
           "rho": 2.0}
    if with_grads:
        doc["gradients"] = {"c1313": [0.05, 0.0, 0.0],
                            "rho": [0.1, -0.02, 0.0]}
    return doc


def test_vti_roundtrip(tmp_path):
    p = write_json(tmp_path / "p.json", vti_doc())
    s = str(tmp_path / "s.json")
    r = str(tmp_path / "r.json")
    assert main(["forward", "--params", p, "--out", s]) == 0
    assert main(["recover-vti", "--samples", s, "--out", r]) == 0
    out = json.load(open(r))
    want = vti_doc()
    for k, v in want["components"].items():
        assert out["components"][k] == pytest.approx(v, abs=1e-6), k
    assert out["rho"] == pytest.approx(2.0, abs=1e-6)
    for k, v in want["gradients"].items():
        np.testing.assert_allclose(out["gradients"][k], v, atol=1e-6,
                                   err_msg=k)
    assert out["report"]["status"] == "ok"


def test_ortho_roundtrip(tmp_path):
    doc = {"schema_version": 1, "model": "orthorhombic",
           "components": {"c1111": 10.0, "c2222": 9.0, "c3333": 8.0,
                          "c1122": 2.5, "c1133": 3.0, "c2233": 2.0,
                          "c2323": 1.8, "c1313": 2.0, "c1212": 1.5},
           "rho": 2.0}
    p = write_json(tmp_path / "p.json", doc)
    s = str(tmp_path / "s.json")
    r = str(tmp_path / "r.json")
    assert main(["forward", "--params", p, "--out", s]) == 0
    assert main(["recover-ortho", "--samples", s, "--out", r]) == 0
    out = json.load(open(r))
    for k, v in doc["components"].items():
        assert out["components"][k] == pytest.approx(v, abs=1e-8), k
    assert out["rho"] == pytest.approx(2.0, abs=1e-8)


def test_full_roundtrip(tmp_path):
    rng = np.random.default_rng(7)
    mat = MaterialParams(random_stiffness(rng), rho=1.7)
    p = str(tmp_path / "p.json")
    sio.save_params(p, "full", mat)
    s = str(tmp_path / "s.json")
    r = str(tmp_path / "r.json")
    assert main(["forward", "--params", p, "--out", s, "--seed", "3"]) == 0
    assert main(["recover-homog", "--samples", s, "--out", r]) == 0
    out = json.load(open(r))
    want = mat.stiffness.component_map()
    for k, v in want.items():
        assert out["components"][k] == pytest.approx(v, abs=1e-9), k
    assert out["rho"] == pytest.approx(1.7, abs=1e-9)
    assert out["report"]["rank"] == 22


def test_forward_isotropic_values(tmp_path):
    doc = {"schema_version": 1, "model": "isotropic",
           "components": {"lambda": 1.0, "mu": 1.0}, "rho": 1.0}
    p = write_json(tmp_path / "p.json", doc)
    s = str(tmp_path / "s.json")
    assert main(["forward", "--params", p, "--out", s]) == 0
    data = json.load(open(s))
    unit = next(rec for rec in data["samples"]
                if abs(np.linalg.norm(rec["m"]) - 1.0) < 1e-9)
    assert unit["z_re"][0][0] == pytest.approx(1.41421, abs=1e-5)
    assert unit["z_re"][1][1] == pytest.approx(1.82419, abs=1e-5)
    assert unit["z_re"][2][2] == pytest.approx(2.23417, abs=1e-5)
    assert unit["z_im"][1][2] == pytest.approx(-0.42020, abs=1e-5)


def test_bit_exact_serialization(tmp_path):
    p1 = str(tmp_path / "a.json")
    p2 = str(tmp_path / "b.json")
    params = VtiParams(c1111=10.0, c3333=8.0, c1133=3.0, c1313=2.0,
                       c1212=1.5, rho=2.0,
                       grads={"rho": np.array([0.1, 0.0, -0.3])})
    sio.save_params(p1, "vti", params)
    doc = sio.load_params(p1)
    sio.save_params(p2, doc.model, doc.params)
    assert open(p1, "rb").read() == open(p2, "rb").read()

    s1 = str(tmp_path / "s1.json")
    s2 = str(tmp_path / "s2.json")
    assert main(["forward", "--params", p1, "--out", s1]) == 0
    sio.save_samples(s2, sio.load_samples(s1))
    assert open(s1, "rb").read() == open(s2, "rb").read()


def test_missing_file_exit_2(tmp_path):
    assert main(["forward", "--params", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o.json")]) == 2


def test_unwritable_output_exit_2(tmp_path):
    p = write_json(tmp_path / "p.json", vti_doc(with_grads=False))
    out = str(tmp_path / "no" / "such" / "dir" / "o.json")
    assert main(["forward", "--params", p, "--out", out]) == 2


def test_malformed_json_exit_3(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["forward", "--params", str(bad),
                 "--out", str(tmp_path / "o.json")]) == 3


def test_wrong_schema_exit_3(tmp_path):
    doc = vti_doc(with_grads=False)
    doc["schema_version"] = 99
    p = write_json(tmp_path / "p.json", doc)
    assert main(["forward", "--params", p,
                 "--out", str(tmp_path / "o.json")]) == 3


def test_nonconvex_params_exit_3(tmp_path):
    doc = vti_doc(with_grads=False)
    doc["components"]["c1133"] = 40.0
    p = write_json(tmp_path / "p.json", doc)
    assert main(["forward", "--params", p,
                 "--out", str(tmp_path / "o.json")]) == 3


def test_recover_with_missing_probe_exit_3(tmp_path):
    p = write_json(tmp_path / "p.json", vti_doc(with_grads=False))
    s = str(tmp_path / "s.json")
    assert main(["forward", "--params", p, "--out", s]) == 0
    samples = [rec for rec in json.load(open(s))["samples"]
               if abs(np.linalg.norm(rec["m"]) - np.sqrt(2.0)) > 1e-6]
    s2 = write_json(tmp_path / "s2.json",
                    {"schema_version": 1, "samples": samples})
    assert main(["recover-vti", "--samples", s2,
                 "--out", str(tmp_path / "r.json")]) == 3


def test_usage_errors_exit_5(tmp_path):
    assert main(["bridge-check", "--T", "4.0"]) == 5
    assert main(["no-such-command"]) == 5
    assert main(["forward", "--params"]) == 5
    p = write_json(tmp_path / "p.json", vti_doc(with_grads=False))
    assert main(["factor-check", "--params", p, "--trials", "0"]) == 5


def test_factor_check_deterministic(tmp_path, capsys):
    p = write_json(tmp_path / "p.json", vti_doc(with_grads=False))
    assert main(["factor-check", "--params", p, "--trials", "8"]) == 0
    first = capsys.readouterr().out
    assert main(["factor-check", "--params", p, "--trials", "8"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert "8/8" in first


def test_factor_check_impossible_tolerance_exit_4(tmp_path):
    p = write_json(tmp_path / "p.json", vti_doc(with_grads=False))
    assert main(["factor-check", "--params", p, "--trials", "4",
                 "--tolerance", "1e-18"]) == 4


def test_bridge_check_cli(tmp_path):
    assert main(["bridge-check", "--tau", "2.0", "--T", "2", "4", "6",
                 "--cells", "900"]) == 0


def test_bridge_check_with_medium_file(tmp_path):
    med = write_json(tmp_path / "m.json",
                     {"schema_version": 1, "model": "medium1d",
                      "pieces": [{"x_end": 12.0, "rho": 1.0, "kappa": 1.0}]})
    assert main(["bridge-check", "--tau", "2.0", "--T", "2", "4", "6",
                 "--cells", "900", "--medium", med]) == 0


def test_load_medium_validation(tmp_path):
    med = write_json(tmp_path / "m.json",
                     {"schema_version": 1, "model": "medium1d", "pieces": []})
    assert main(["bridge-check", "--tau", "2.0", "--T", "2", "4", "6",
                 "--medium", med]) == 3


def test_isotropic_gradient_mapping(tmp_path):
    doc = {"schema_version": 1, "model": "isotropic",
           "components": {"lambda": 2.0, "mu": 1.0}, "rho": 1.5,
           "gradients": {"lambda": [0.1, 0.0, 0.0],
                         "mu": [0.0, 0.2, 0.0]}}
    p = write_json(tmp_path / "p.json", doc)
    loaded = sio.load_params(p)
    assert isinstance(loaded.params, VtiParams)
    np.testing.assert_allclose(loaded.params.grad_of("c1111"),
                               [0.1, 0.4, 0.0])
    np.testing.assert_allclose(loaded.params.grad_of("c1133"),
                               [0.1, 0.0, 0.0])
    np.testing.assert_allclose(loaded.params.grad_of("c1212"),
                               [0.0, 0.2, 0.0])


def test_ortho_gradients_rejected(tmp_path):
    doc = {"schema_version": 1, "model": "orthorhombic",
           "components": {"c1111": 10.0, "c2222": 9.0, "c3333": 8.0,
                          "c1122": 2.5, "c1133": 3.0, "c2233": 2.0,
                          "c2323": 1.8, "c1313": 2.0, "c1212": 1.5},
           "rho": 2.0, "gradients": {"c1111": [0.1, 0.0, 0.0]}}
    p = write_json(tmp_path / "p.json", doc)
    with pytest.raises(sio.ParseError):
        sio.load_params(p)


def test_load_params_accepts_report_block(tmp_path):
    doc = vti_doc(with_grads=False)
    doc["report"] = {"status": "ok", "samples_used": 6}
    p = write_json(tmp_path / "p.json", doc)
    loaded = sio.load_params(p)
    assert isinstance(loaded.params, VtiParams)
    assert loaded.params.c1111 == 10.0
