import csv
import json
import math

import numpy as np
import pytest

from timelike import cli
from timelike.errors import ConfigError
from timelike.grid import read_fields_csv


def write_config(path, **doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def ex64_config(tmp_path):
    return write_config(tmp_path / "run.json", family="example64",
                        grid={"u_min": -1, "u_max": 1, "v_min": -1, "v_max": 1, "nu": 101, "nv": 101},
                        out="out")


def test_generate_writes_one_row_per_node(ex64_config, tmp_path):
    assert cli.main(["generate", "--config", ex64_config]) == 0
    for name in ("generators.csv", "frame.csv"):
        with open(tmp_path / "out" / name) as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 101 * 101
    prov = json.loads((tmp_path / "out" / "provenance.json").read_text())
    assert prov["derivatives"] == "analytic"


def test_param_family_theta_column(tmp_path):
    cfg = write_config(tmp_path / "p.json", family={"family": "param_family", "c": 0, "k": 1, "r": 1},
                       out="p")
    assert cli.main(["generate", "--config", cfg, "--grid", "21x21"]) == 0
    _, cols = read_fields_csv(tmp_path / "p" / "generators.csv", ["theta"])
    np.testing.assert_allclose(cols["theta"].values, math.pi / 4, atol=1e-12)


def test_margin_error_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path / "tg.json", family="totally_geodesic",
                       grid={"u_min": -1, "u_max": 1, "v_min": -1, "v_max": 1, "nu": 11, "nv": 11})
    assert cli.main(["generate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "margin" in capsys.readouterr().err


def test_verify_example64(ex64_config, tmp_path):
    code = cli.main(["verify", "--config", ex64_config, "--checks",
                     "spherical,isotropic,minimal_pde,codazzi,duality,mean_curvature,frame,ode,mobius,theta"])
    assert code == 0
    doc = json.loads((tmp_path / "out" / "report.json").read_text())
    assert doc["pass"] is True
    assert {"spherical", "ode", "mobius", "theta"} <= set(doc["checks"])


def test_fault_injected_mu_fails_spherical(tmp_path):
    # default 201x201 grid: the finite-difference checks are calibrated for h = 0.01
    cfg = write_config(tmp_path / "run.json", family="example64", out="out")
    assert cli.main(["generate", "--config", cfg]) == 0
    src = tmp_path / "out" / "generators.csv"
    with open(src) as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    ire, iim = header.index("mu_re"), header.index("mu_im")
    for row in rows[1:]:
        row[ire] = repr(float(row[ire]) * 1.01)
        row[iim] = repr(float(row[iim]) * 1.01)
    bad = tmp_path / "bad.csv"
    with open(bad, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    good_cfg = write_config(tmp_path / "good.json", inputs="out/generators.csv", out="good")
    bad_cfg = write_config(tmp_path / "bad.json", inputs="bad.csv", out="bad")
    assert cli.main(["verify", "--config", good_cfg]) == 0
    assert cli.main(["verify", "--config", bad_cfg]) == 1
    doc = json.loads((tmp_path / "bad" / "report.json").read_text())
    assert doc["checks"]["spherical"]["pass"] is False


def test_outputs_are_byte_identical(ex64_config, tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        cli.main(["generate", "--config", ex64_config, "--out", str(d), "--grid", "31x31"])
        cli.main(["verify", "--config", ex64_config, "--out", str(d), "--grid", "31x31"])
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1]
    assert set(outs[0]) == {"generators.csv", "frame.csv", "provenance.json", "report.json"}


def test_export_counts(ex64_config, tmp_path):
    assert cli.main(["export", "--config", ex64_config, "--grid", "3x3"]) == 0
    lines = (tmp_path / "out" / "mesh.obj").read_text().splitlines()
    assert sum(line.startswith("v ") for line in lines) == 9
    assert sum(line.startswith("f ") for line in lines) == 8


def test_totally_geodesic_lies_in_slice():
    from timelike import gallery
    built = gallery.build(gallery.TotallyGeodesic())
    m = built.generators.mask
    from timelike.surface import assemble_frame
    f = assemble_frame(built.generators).f[m]
    np.testing.assert_allclose(f[:, 2], 0, atol=1e-12)
    np.testing.assert_allclose(-f[:, 0] ** 2 + f[:, 1] ** 2 + f[:, 3] ** 2, 1, atol=1e-9)
    pts, ok = cli.project(f, "drop-x4")
    assert pts.shape[-1] == 3 and ok.all()


def test_central_projection_masks_and_warns():
    f = np.array([[[-1.0, 0, 1, 0], [0.0, 1, 0, 0]]])
    with pytest.warns(RuntimeWarning, match="central projection"):
        pts, ok = cli.project(f, "central")
    assert ok.tolist() == [[False, True]]
    np.testing.assert_allclose(pts[0, 1], [1, 0, 0])


def test_unknown_projection(tmp_path):
    cfg = write_config(tmp_path / "c.json", family="example64", projection="mercator")
    with pytest.raises(ConfigError):
        cli.load_config(cfg)
    assert cli.main(["export", "--config", cfg]) == 2


@pytest.mark.parametrize("doc, msg", [
    ({"family": "example64", "colour": 1}, "unknown config keys"),
    ({"family": "example64", "checks": ["spherical", "nope"]}, "unknown checks"),
    ({"family": "example64", "tolerances": {"speed": 1}}, "unknown tolerance"),
    ({"inputs": "missing.csv"}, "does not exist"),
    ({"family": "example64", "grid": "ax3"}, "NUxNV"),
])
def test_config_errors(tmp_path, doc, msg):
    path = write_config(tmp_path / "c.json", **doc)
    with pytest.raises(ConfigError, match=msg):
        cli.load_config(path)


def test_tolerance_flag_overrides(tmp_path):
    path = write_config(tmp_path / "c.json", family="example64", tolerances={"fd": 1e-3})
    cfg = cli.load_config(path, tolerances=["fd=2e-3", "mobius=1e-5"])
    assert cfg.tolerances.fd == 2e-3 and cfg.tolerances.mobius == 1e-5


def test_report_prints_table(ex64_config, tmp_path, capsys):
    assert cli.main(["report", "--config", ex64_config, "--grid", "41x41"]) == 0
    out = capsys.readouterr().out
    assert "spherical" in out and out.strip().endswith("overall: PASS")
    assert (tmp_path / "out" / "report.txt").exists()


def test_clifford_minimal_pde_verdict(tmp_path):
    # the Clifford-type surface is minimal, so the requested check passes
    cfg = write_config(tmp_path / "c.json", family="clifford_type", checks=["minimal_pde"], out="c")
    assert cli.main(["verify", "--config", cfg]) == 0
