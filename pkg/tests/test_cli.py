"""End-to-end runs of the command-line scenarios."""

import copy
import json
import re

import numpy as np
import pytest
from click.testing import CliRunner

from timearrow.cli import main

SMALL = {
    "grid": {"n_sigma": 256, "sigma_max": 50.0, "k_dim": 1},
    # dense bins must stay a few times narrower than the 0.5-width packets
    "dense": {"n_dense": 128},
    "times": {"t_max": 2.0, "n_steps": 5, "snap_times": True},
    "state": {"kind": "random", "parameters": {"n_terms": 4}, "seed": 7},
    "tolerances": {"algebraic": 1.0e-8, "continuum": 0.05},
}

_SCI = re.compile(r"^-?\d\.\d{16}e[+-]\d{2,3}$")


def _write_cfg(tmp_path, cfg, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _run(args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


def _stderr(result):
    try:
        return result.stderr
    except ValueError:  # pragma: no cover - older click mixes the streams
        return result.output


def _read_csv(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestConfigHandling:
    def test_invalid_field_exits_2_and_names_it(self, tmp_path):
        cfg = _write_cfg(tmp_path, {"grid": {"n_sigma": 1000}})
        res = _run(["lyapunov-curve", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 2
        err = _stderr(res)
        assert "grid.n_sigma" in err
        assert "config error" in err

    def test_unknown_section_rejected(self, tmp_path):
        cfg = copy.deepcopy(SMALL)
        cfg["extra"] = {}
        path = _write_cfg(tmp_path, cfg)
        res = _run(["lyapunov-curve", "--config", path, "--out", str(tmp_path)])
        assert res.exit_code == 2
        assert "extra" in _stderr(res)

    def test_missing_file_exits_2(self, tmp_path):
        res = _run(["lyapunov-curve", "--config", str(tmp_path / "nope.json"),
                    "--out", str(tmp_path)])
        assert res.exit_code == 2

    def test_off_lattice_times_exit_2_when_snapping_disabled(self, tmp_path):
        cfg = copy.deepcopy(SMALL)
        cfg["times"]["snap_times"] = False
        path = _write_cfg(tmp_path, cfg)
        res = _run(["lyapunov-curve", "--config", path, "--out", str(tmp_path)])
        assert res.exit_code == 2

    def test_defaults_used_without_config_flag(self, tmp_path):
        # no --config: the built-in default config drives the run
        res = _run(["lyapunov-curve", "--out", str(tmp_path)])
        assert res.exit_code == 0
        assert (tmp_path / "lyapunov_curve.csv").exists()


class TestLyapunovCurveCommand:
    def test_writes_csv_and_meta(self, tmp_path):
        cfg = _write_cfg(tmp_path, SMALL)
        res = _run(["lyapunov-curve", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 0
        header, rows = _read_csv(tmp_path / "lyapunov_curve.csv")
        assert header == ["t", "expectation", "norm", "tolerance_class"]
        assert len(rows) == SMALL["times"]["n_steps"]
        for row in rows:
            assert all(_SCI.match(cell) for cell in row[:3])
            assert row[3] == "algebraic"
        ex = np.array([float(r[1]) for r in rows])
        assert np.all(np.diff(ex) <= 1e-10)
        meta = json.loads((tmp_path / "lyapunov_curve.meta.json").read_text())
        assert meta["command"] == "lyapunov-curve"
        assert meta["config"]["grid"]["n_sigma"] == 256
        assert "guard_band_leakage" in meta["diagnostics"]

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = _write_cfg(tmp_path, SMALL)
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            res = _run(["lyapunov-curve", "--config", cfg, "--out", str(out)])
            assert res.exit_code == 0
        assert (a / "lyapunov_curve.csv").read_bytes() \
            == (b / "lyapunov_curve.csv").read_bytes()
        assert (a / "lyapunov_curve.meta.json").read_bytes() \
            == (b / "lyapunov_curve.meta.json").read_bytes()

    def test_seed_flag_changes_random_state(self, tmp_path):
        cfg = _write_cfg(tmp_path, SMALL)
        a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
        _run(["lyapunov-curve", "--config", cfg, "--out", str(a), "--seed", "11"])
        _run(["lyapunov-curve", "--config", cfg, "--out", str(b), "--seed", "12"])
        _run(["lyapunov-curve", "--config", cfg, "--out", str(c), "--seed", "11"])
        bytes_a = (a / "lyapunov_curve.csv").read_bytes()
        assert bytes_a != (b / "lyapunov_curve.csv").read_bytes()
        assert bytes_a == (c / "lyapunov_curve.csv").read_bytes()

    def test_witness_state_decays_three_decades(self, tmp_path):
        cfg = copy.deepcopy(SMALL)
        cfg["grid"] = {"n_sigma": 1024, "sigma_max": 100.0, "k_dim": 1}
        cfg["times"] = {"t_max": 2.0, "n_steps": 3, "snap_times": True}
        cfg["state"] = {"kind": "witness",
                        "parameters": {"mu": [50.0, -1.0], "t0": 1.0},
                        "seed": 7}
        path = _write_cfg(tmp_path, cfg)
        res = _run(["lyapunov-curve", "--config", path, "--out", str(tmp_path)])
        assert res.exit_code == 0
        _, rows = _read_csv(tmp_path / "lyapunov_curve.csv")
        e0, e2 = float(rows[0][1]), float(rows[-1][1])
        assert e2 <= 1e-3 * e0


class TestSemigroupNormsCommand:
    def test_norms_monotone_and_threads_invariant(self, tmp_path):
        cfg = _write_cfg(tmp_path, SMALL)
        a, b = tmp_path / "a", tmp_path / "b"
        res1 = _run(["semigroup-norms", "--config", cfg, "--out", str(a),
                     "--threads", "1"])
        res2 = _run(["semigroup-norms", "--config", cfg, "--out", str(b),
                     "--threads", "4"])
        assert res1.exit_code == 0 and res2.exit_code == 0
        assert (a / "semigroup_norms.csv").read_bytes() \
            == (b / "semigroup_norms.csv").read_bytes()
        header, rows = _read_csv(a / "semigroup_norms.csv")
        assert header == ["t_toeplitz", "toeplitz_norm", "t_z", "z_norm",
                          "tolerance_class"]
        tn = np.array([float(r[1]) for r in rows])
        zn = np.array([float(r[3]) for r in rows])
        assert np.all(np.diff(tn) <= 1e-10)
        assert np.all(np.diff(zn) <= 1e-10)


class TestProjectionFamilyCommand:
    def test_residuals_and_ranks(self, tmp_path):
        cfg = _write_cfg(tmp_path, SMALL)
        res = _run(["projection-family", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 0
        header, rows = _read_csv(tmp_path / "projection_family.csv")
        assert header[:2] == ["t", "rank"]
        ranks = [int(float(r[1])) for r in rows]
        assert ranks == sorted(ranks)
        assert ranks[0] == 0
        for r in rows:
            assert float(r[2]) <= 1e-8  # idempotency
            assert float(r[4]) <= 1e-8  # complement vs independent route
        meta = json.loads((tmp_path / "projection_family.meta.json").read_text())
        d = meta["diagnostics"]
        assert d["ordering_spectrum_min"] >= -1e-8
        assert d["ordering_spectrum_max"] <= d["truncation_time"] + 1e-8


class TestMatrixElementCommand:
    def test_pictures_agree_for_guarded_random_state(self, tmp_path):
        cfg = _write_cfg(tmp_path, SMALL)
        res = _run(["matrix-element", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 0
        header, rows = _read_csv(tmp_path / "matrix_element.csv")
        assert header[0] == "observable"
        observables = {r[0] for r in rows}
        assert observables == {"identity", "energy"}
        for r in rows:
            assert float(r[6]) <= 1e-8

    def test_witness_state_reports_leakage_floor(self, tmp_path):
        # restriction of the witness loses ~0.6% of its mass below the cut;
        # the smeared profile sets an identity floor above 1e-8, which the
        # command must flag rather than absorb
        cfg = copy.deepcopy(SMALL)
        cfg["grid"] = {"n_sigma": 512, "sigma_max": 50.0, "k_dim": 1}
        cfg["dense"] = {"n_dense": 128}
        cfg["state"] = {"kind": "witness",
                        "parameters": {"mu": [25.0, -1.0], "t0": 1.0},
                        "seed": 7}
        path = _write_cfg(tmp_path, cfg)
        res = _run(["matrix-element", "--config", path, "--out", str(tmp_path)])
        assert res.exit_code == 1
        assert "exceeds" in _stderr(res)
        # outputs are still written for inspection
        assert (tmp_path / "matrix_element.csv").exists()


class TestConvergenceCommand:
    def test_series_decrease_along_refinement(self, tmp_path):
        cfg = _write_cfg(tmp_path, SMALL)
        res = _run(["convergence", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 0
        header, rows = _read_csv(tmp_path / "convergence.csv")
        assert header[2:5] == ["simple_pole_residual", "double_pole_residual",
                               "witness_ratio_t1"]
        for col in (2, 3, 4):
            series = [float(r[col]) for r in rows]
            assert all(b < a for a, b in zip(series, series[1:]))
        assert rows[-1][5] == "continuum"


class TestSelftestCommand:
    def test_full_battery_passes_and_report_is_stable(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        res1 = _run(["selftest", "--out", str(a)])
        assert res1.exit_code == 0, res1.output
        report = json.loads((a / "selftest.json").read_text())
        assert report["all_passed"] is True
        assert len(report["results"]) == 12
        assert [r["criterion"] for r in report["results"]] == list(range(1, 13))
        assert all(r["passed"] for r in report["results"])
        # a criterion line per check on stdout
        assert res1.output.count("criterion") >= 12
        res2 = _run(["selftest", "--out", str(b)])
        assert res2.exit_code == 0
        assert (a / "selftest.json").read_bytes() == (b / "selftest.json").read_bytes()
