import csv
import io
import math

import numpy as np
import pytest
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from hopfion.cli import main, read_config, ConfigError
from hopfion.io import fmt, read_profile_table, read_vtk_structured_points, write_csv
from hopfion.topology import analytic_vk_ratio


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestFormats:
    def test_fmt_full_precision(self):
        x = 0.1 + 0.2
        assert float(fmt(x)) == x
        assert len(fmt(1 / 3).replace("0.", "")) == 17
        assert fmt((1, 2.5)) == "1;2.5"
        assert fmt(None) == ""
        assert fmt(True) == "true"

    def test_csv_header_and_quoting(self):
        buf = io.StringIO()
        write_csv(buf, ["a", "b"], [{"a": 1.0, "b": "x, y"}])
        assert buf.getvalue() == 'a,b\r\n1,"x, y"\r\n'


class TestConfig:
    def test_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# model\nalpha = 0.75\nm = 3\nn = 2\n")
        code, out, _ = run(capsys, "solve", "--config", str(cfg))
        assert code == 0 and "q = 0.6666666666666666" in out
        code, out, _ = run(capsys, "solve", "--config", str(cfg), "--n", "1")
        assert code == 0 and "q = 0.3333333333333333" in out

    def test_line_precise_errors(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("alpha = 0.75\n\nbogus = 1\n")
        with pytest.raises(ConfigError, match=r"bad.cfg:3: unknown key 'bogus'"):
            read_config(str(cfg))
        code, _, err = run(capsys, "solve", "--config", str(cfg))
        assert code == 2 and "bad.cfg:3" in err
        cfg.write_text("alpha 0.75\n")
        code, _, err = run(capsys, "verify", "--config", str(cfg))
        assert code == 2 and "bad.cfg:1" in err

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "solve", "--config", str(tmp_path / "nope.cfg"))
        assert code == 2 and "cannot read" in err


class TestSolve:
    def test_default(self, capsys):
        code, out, err = run(capsys, "solve", "--alpha", "0.75", "--m", "2", "--n", "1")
        assert code == 0 and err == ""
        assert "q = 0.5" in out
        assert "l = 2.0" in out
        assert "k = 1.7320508075688772" in out
        assert out.count("PASS  boundary") == 1

    def test_scaling_condition_exit_2(self, capsys):
        code, out, err = run(capsys, "solve", "--alpha", "0.5", "--m", "2", "--n", "1")
        assert code == 2 and out == ""
        assert "scaling" in err

    def test_argparse_error_exit_2(self, capsys):
        assert run(capsys, "solve", "--format", "xml")[0] == 2
        assert run(capsys, "frobnicate")[0] == 2

    def test_general_q_with_k(self, tmp_path, capsys):
        from hopfion import boundary_constants, validate_spec

        k = boundary_constants(validate_spec([0.375, 0.375], [1, 3], [1, 1])).k[0]
        path = tmp_path / "prof.txt"
        code, out, _ = run(capsys, "solve", "--alpha", "0.375,0.375", "--m", "1,3", "--n", "1,1", "--k", repr(k), "--out", str(path))
        assert code == 0 and "tabulated" in out
        eta, s = read_profile_table(path)
        assert s.shape == (2, 400)
        assert eta[0] == 0 and s[:, 0] == pytest.approx([0, 0])
        assert s[:, -1] == pytest.approx([1, 1], abs=1e-12)
        assert np.all(np.diff(s, axis=1) >= -1e-15)

    def test_bad_constants(self, capsys):
        code, _, err = run(capsys, "solve", "--k", "3")
        assert code == 2 and "no valid profile" in err
        code, _, _ = run(capsys, "solve", "--alpha", "0.375,0.375", "--m", "1,3", "--n", "1,1", "--k", "1.5")
        assert code == 1

    def test_profile_table_closed(self, tmp_path, capsys):
        from hopfion.ansatz import ClosedFormProfile

        path = tmp_path / "p.txt"
        assert run(capsys, "solve", "--out", str(path), "--rows", "50")[0] == 0
        eta, s = read_profile_table(path)
        assert s.shape == (50,)
        assert np.array_equal(s, ClosedFormProfile(0.5).s(eta))


class TestVerify:
    def test_default_all_pass(self, capsys):
        code, out, _ = run(capsys, "verify")
        assert code == 0
        assert "FAIL" not in out
        assert "energy grid" in out and "hopf |Q|" in out

    def test_perturbed_fails_eom(self, capsys):
        code, out, err = run(capsys, "verify", "--quick", "--perturb", "0.01")
        assert code == 1
        assert "FAIL  eom residual field 1" in out
        assert "measured" in err and "tolerance" in err

    def test_quick_skips_grid(self, capsys):
        code, out, _ = run(capsys, "verify", "--quick")
        assert code == 0
        assert "energy grid" not in out and "hopf" not in out

    def test_tol_flag(self, capsys):
        code, out, _ = run(capsys, "verify", "--quick", "--tol", "1e-12")
        assert code == 1 and "FAIL  eom residual" in out


class TestSweep:
    def test_vk_ratio_column(self, tmp_path, capsys):
        path = tmp_path / "q.csv"
        n = ";".join(str(k) for k in range(1, 10))
        assert run(capsys, "sweep", "--m", "10", "--n", n, "--quick", "--out", str(path))[0] == 0
        rows = read_rows(path)
        assert len(rows) == 9
        for r in rows:
            q = float(r["q"])
            assert float(r["vk_ratio"]) == pytest.approx(analytic_vk_ratio(q), abs=1e-8)
            assert float(r["vk_ratio_analytic"]) == pytest.approx(analytic_vk_ratio(q), rel=1e-15)
            assert r["error"] == ""

    def test_energy_independent_of_split(self, tmp_path, capsys):
        path = tmp_path / "n.csv"
        args = ["--alpha", "0.75;0.375,0.375;0.25,0.25,0.25", "--m", "2;2,2;2,2,2", "--n", "1;1,1;1,1,1"]
        assert run(capsys, "sweep", *args, "--quick", "--out", str(path))[0] == 0
        e = [float(r["e_closed"]) for r in read_rows(path)]
        assert max(e) - min(e) < 1e-12 * e[0]

    def test_empty_grid(self, tmp_path, capsys):
        path = tmp_path / "e.csv"
        assert run(capsys, "sweep", "--m", "", "--out", str(path))[0] == 0
        assert path.read_text().strip().split(",")[0] == "index"
        assert len(path.read_text().strip().splitlines()) == 1

    def test_row_errors_recorded(self, tmp_path, capsys):
        path = tmp_path / "x.csv"
        code, _, err = run(capsys, "sweep", "--alpha", "0.75;0.5", "--quick", "--out", str(path))
        assert code == 0 and "1 of 2 rows failed" in err
        rows = read_rows(path)
        assert rows[0]["error"] == "" and "scaling" in rows[1]["error"]

    def test_product_and_mismatch(self, tmp_path, capsys):
        path = tmp_path / "p.csv"
        assert run(capsys, "sweep", "--m", "2;3", "--n", "1;2", "--product", "--quick", "--out", str(path))[0] == 0
        assert [(r["m"], r["n"]) for r in read_rows(path)] == [("2", "1"), ("2", "2"), ("3", "1"), ("3", "2")]
        assert run(capsys, "sweep", "--m", "2;3", "--n", "1;2;3")[0] == 2

    def test_deterministic_across_jobs(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--m", "2;3;4", "--n", "1;1;3", "--grid", "64,16,4", "--hopf-grid", "32,16,16"]
        assert run(capsys, *args, "--out", str(a))[0] == 0
        assert run(capsys, *args, "--jobs", "3", "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_alternatives_rejected_elsewhere(self, capsys):
        assert run(capsys, "solve", "--m", "2;3")[0] == 2


def _surface_components(verts, faces):
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [0, 2]]])
    g = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(len(verts),) * 2)
    return connected_components(g, directed=False)[0]


class TestExport:
    def test_vtk_torus(self, tmp_path, capsys):
        measure = pytest.importorskip("skimage.measure")
        path = tmp_path / "f.vtk"
        assert run(capsys, "export", "--res", "64", "--out", str(path))[0] == 0
        d = read_vtk_structured_points(path)
        assert d["dims"] == (64, 64, 64)
        n = d["vectors"]["n_1"]
        assert np.max(np.abs(np.linalg.norm(n, axis=1) - 1)) < 1e-12
        n3 = d["scalars"]["n3_1"].reshape(64, 64, 64)  # [iz, iy, ix]
        assert np.array_equal(n3.ravel(), n[:, 2])
        verts, faces, _, _ = measure.marching_cubes(n3, 0.0)
        assert _surface_components(verts, faces) == 1
        edges = {tuple(sorted(p)) for f in faces for p in ((f[0], f[1]), (f[1], f[2]), (f[0], f[2]))}
        assert len(verts) - len(edges) + len(faces) == 0  # Euler characteristic of a torus
        assert ndimage.label(n3 < 0)[1] == 1
        for key in ("energy_density", "AB_density_1"):
            assert np.all(np.isfinite(d["scalars"][key]))

    def test_two_field_csv(self, tmp_path, capsys):
        path = tmp_path / "f.csv"
        code = run(capsys, "export", "--alpha", "0.375,0.375", "--m", "2,4", "--n", "1,2", "--res", "6", "--out", str(path))[0]
        assert code == 0
        rows = read_rows(path)
        assert len(rows) == 216
        for key in ("n3_1", "n3_2", "AB_density_1", "AB_density_2", "n_1_x", "n_2_z"):
            assert key in rows[0]
        # field 2 winds twice as fast: its A.B density is m n = 8 vs 2 times the same profile factor
        r = rows[17]
        assert float(r["AB_density_2"]) == pytest.approx(4 * float(r["AB_density_1"]), rel=1e-12)

    def test_vtk_and_csv_agree(self, tmp_path, capsys):
        v, c = tmp_path / "f.vtk", tmp_path / "f.csv"
        assert run(capsys, "export", "--res", "5", "--box", "2", "--out", str(v))[0] == 0
        assert run(capsys, "export", "--res", "5", "--box", "2", "--out", str(c))[0] == 0
        d = read_vtk_structured_points(v)
        rows = read_rows(c)
        assert np.array_equal(d["scalars"]["energy_density"], [float(r["energy_density"]) for r in rows])
        assert d["origin"] == (-2.0, -2.0, -2.0)
        assert [float(rows[1]["x"]), float(rows[1]["y"])] == [-1.0, -2.0]  # x fastest

    def test_unwritable(self, capsys):
        code, _, err = run(capsys, "export", "--res", "4", "--out", "/nonexistent-dir/f.vtk")
        assert code == 1 and "No such file" in err

    def test_requires_out(self, capsys):
        assert run(capsys, "export")[0] == 2
