import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

BASE_CONFIG = {
    "schema_version": 1,
    "protocol": {"kind": "arctan", "omega0": 1.0, "delta": 0.5, "tau": 1.0,
                 "window": [-30.0, 30.0]},
    "system": {"mass": 1.0, "hbar": 1.0},
    "drive": {"M": 1.0, "theta_dot": 1.0, "var_theta0": 4.5e-7, "var_P0": 4.5e-7,
              "H_D": 1.0},
    "samples": {"n_samples": 64, "seed": 12, "n_initial": 0},
}


def run_cli(*args, env=None):
    import os

    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run([sys.executable, "-m", "sta_cost.cli", *args],
                          capture_output=True, text=True, env=full_env)


def write_config(tmp_path, overrides=None, name="config.json", drop=()):
    cfg = json.loads(json.dumps(BASE_CONFIG))
    for key in drop:
        cfg.pop(key, None)
    if overrides:
        for key, value in overrides.items():
            if isinstance(value, dict) and isinstance(cfg.get(key), dict):
                cfg[key].update(value)
            else:
                cfg[key] = value
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestProtocolCommand:
    def test_flat_protocol_constant_column(self, tmp_path):
        cfg = write_config(tmp_path, {"protocol": {"delta": 0.0, "omega0": 2.0}})
        out = tmp_path / "table.csv"
        res = run_cli("protocol", "--config", str(cfg), "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = read_csv(out)
        values = {row["Omega2"] for row in rows}
        assert values == {"4"}

    def test_bound_violation_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, {"protocol": {"tau": 0.2}})
        res = run_cli("protocol", "--config", str(cfg))
        assert res.returncode == 2
        assert "bound" in res.stderr.lower() or "Omega" in res.stderr

    def test_threshold_protocol_exits_2_from_scan(self, tmp_path):
        tau = math.sqrt(0.75) * 0.5
        cfg = write_config(tmp_path, {"protocol": {"tau": tau}})
        res = run_cli("protocol", "--config", str(cfg))
        assert res.returncode == 2

    def test_tabulated_round_trip(self, tmp_path):
        t = np.linspace(-5.0, 5.0, 41)
        omega = 1.0 + 0.3 * np.arctan(t / 0.9)
        cfg = write_config(tmp_path, {
            "protocol": {"kind": "tabulated", "window": [-5.0, 5.0],
                         "samples": [[float(a), float(b)] for a, b in zip(t, omega)]},
            "modes": {"grid_points": 41},
        })
        out = tmp_path / "tab.csv"
        res = run_cli("protocol", "--config", str(cfg), "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = read_csv(out)
        assert len(rows) == 41
        for row, (ts, ws) in zip(rows, zip(t, omega)):
            assert float(row["t"]) == pytest.approx(ts, abs=1e-12)
            assert float(row["omega"]) == pytest.approx(ws, abs=1e-9)

    def test_invalid_json_names_problem(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        res = run_cli("protocol", "--config", str(path))
        assert res.returncode == 1
        assert "JSON" in res.stderr

    def test_missing_field_named(self, tmp_path):
        cfg = write_config(tmp_path, {"protocol": {"kind": "arctan", "delta": 0.1,
                                                   "tau": 1.0}})
        data = json.loads(cfg.read_text())
        del data["protocol"]["omega0"]
        cfg.write_text(json.dumps(data))
        res = run_cli("protocol", "--config", str(cfg))
        assert res.returncode == 1
        assert "omega0" in res.stderr


class TestModesCommand:
    def test_csv_columns(self, tmp_path):
        cfg = write_config(tmp_path, {"modes": {"grid_points": 101}})
        out = tmp_path / "mode.csv"
        res = run_cli("modes", "--config", str(cfg), "--out", str(out))
        assert res.returncode == 0, res.stderr
        header = out.read_text().splitlines()[0]
        assert header == "t,re_f,im_f,re_fdot,im_fdot,abs_wronskian_err"
        rows = read_csv(out)
        assert len(rows) == 101
        assert all(float(r["abs_wronskian_err"]) < 1e-9 for r in rows)

    def test_json_format(self, tmp_path):
        cfg = write_config(tmp_path, {"modes": {"grid_points": 11, "frequency": "bare"}})
        res = run_cli("modes", "--config", str(cfg), "--format", "json")
        assert res.returncode == 0, res.stderr
        payload = json.loads(res.stdout)
        assert payload["wronskian_drift"] < 1e-9
        assert len(payload["mode"]) == 11


class TestFigureCommands:
    def test_flat_run_matches_asymptote(self, tmp_path):
        cfg = write_config(tmp_path, {"fig1": {"y": 0.0, "points": 12}}, drop=("drive",))
        out = tmp_path / "fig1.csv"
        res = run_cli("fig1", "--config", str(cfg), "--out", str(out))
        assert res.returncode == 0, res.stderr
        for row in read_csv(out):
            F = float(row["F_xy"])
            asym = float(row["pi_exp_minus_2x"])
            assert abs(F - asym) / asym < 1e-6
            assert row["status"] == "ok"

    def test_default_run_monotone_beyond_half(self, tmp_path):
        out = tmp_path / "fig1.csv"
        res = run_cli("fig1", "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = read_csv(out)
        assert len(rows) == 40
        tail = [(float(r["x"]), float(r["F_xy"]), float(r["pi_exp_minus_2x"]))
                for r in rows if float(r["x"]) >= 0.5]
        assert all(a[1] > b[1] for a, b in zip(tail, tail[1:]))
        assert all(a[2] > b[2] for a, b in zip(tail, tail[1:]))

    def test_exact_row_value(self, tmp_path):
        cfg = write_config(tmp_path, {"fcurve": {"y": 0.0, "x": [1.0]}}, drop=("drive",))
        out = tmp_path / "row.csv"
        res = run_cli("fcurve", "--config", str(cfg), "--out", str(out))
        assert res.returncode == 0
        row = read_csv(out)[0]
        assert abs(float(row["F_xy"]) - 0.425168) < 1e-6

    def test_accuracy_budget_failure_flags_rows_and_exits_3(self, tmp_path):
        cfg = write_config(tmp_path, {"fig1": {"points": 3},
                                      "tolerances": {"quad_abs": 1e-30}},
                           drop=("drive",))
        out = tmp_path / "fig1.csv"
        res = run_cli("fig1", "--config", str(cfg), "--out", str(out))
        assert res.returncode == 3
        rows = read_csv(out)
        assert len(rows) == 3
        assert all(r["status"] == "accuracy_error" for r in rows)
        assert all(float(r["F_xy"]) > 0 for r in rows)  # best value still emitted

    def test_seventeen_digit_serialization(self, tmp_path):
        out = tmp_path / "digits.csv"
        run_cli("fig1", "--out", str(out))
        row = read_csv(out)[0]
        assert float(row["F_xy"]) == float(format(float(row["F_xy"]), ".17g"))
        assert len(row["F_xy"].replace(".", "").replace("-", "").lstrip("0")) >= 16


class TestCostCommand:
    def test_zero_variance_drive(self, tmp_path):
        cfg = write_config(tmp_path, {"drive": {"var_theta0": 0.0, "var_P0": 0.0}})
        res = run_cli("cost", "--config", str(cfg))
        assert res.returncode == 0, res.stderr
        payload = json.loads(res.stdout)
        assert payload["nu"] == 0.0
        assert payload["delta_n"] == 0.0

    def test_identity_and_provenance(self, tmp_path):
        cfg = write_config(tmp_path, {"samples": {"n_initial": 3}})
        res = run_cli("cost", "--config", str(cfg))
        payload = json.loads(res.stdout)
        assert payload["delta_n"] == pytest.approx(
            2.0 * (payload["p_up"] - payload["p_down"]), abs=1e-12)
        assert payload["perturbative_ok"] is True
        assert "I0" in payload["provenance"] and "I1" in payload["provenance"]
        assert payload["provenance"]["I1_error_bound"] < 1e-8

    def test_perturbative_flag_trips(self, tmp_path):
        cfg = write_config(tmp_path, {"drive": {"var_P0": 10.0},
                                      "samples": {"n_initial": 2}})
        res = run_cli("cost", "--config", str(cfg))
        payload = json.loads(res.stdout)
        assert payload["perturbative_ok"] is False

    def test_csv_format_rejected(self, tmp_path):
        cfg = write_config(tmp_path)
        res = run_cli("cost", "--config", str(cfg), "--format", "csv")
        assert res.returncode == 1


class TestOracleCommand:
    def test_byte_identical_repeats_and_threads(self, tmp_path):
        cfg = write_config(tmp_path)
        outs = []
        for threads in ("1", "3", "1"):
            out = tmp_path / f"oracle_{len(outs)}.json"
            res = run_cli("oracle", "--config", str(cfg), "--threads", threads,
                          "--out", str(out))
            assert res.returncode == 0, res.stderr
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_seed_override_and_echo(self, tmp_path):
        cfg = write_config(tmp_path)
        res = run_cli("oracle", "--config", str(cfg), "--seed", "999")
        payload = json.loads(res.stdout)
        assert payload["seed"] == 999

    def test_single_sample_null_std_error(self, tmp_path):
        cfg = write_config(tmp_path, {"samples": {"n_samples": 1}})
        res = run_cli("oracle", "--config", str(cfg))
        payload = json.loads(res.stdout)
        assert payload["std_error"] is None

    def test_zero_variances(self, tmp_path):
        cfg = write_config(tmp_path, {"drive": {"var_theta0": 0.0, "var_P0": 0.0},
                                      "samples": {"n_samples": 4}})
        res = run_cli("oracle", "--config", str(cfg))
        payload = json.loads(res.stdout)
        assert payload["delta_n_mc"] == 0.0

    def test_sample_dump(self, tmp_path):
        cfg = write_config(tmp_path, {"samples": {"n_samples": 8}})
        dump = tmp_path / "samples.csv"
        res = run_cli("oracle", "--config", str(cfg), "--dump-samples", str(dump))
        assert res.returncode == 0
        rows = read_csv(dump)
        assert len(rows) == 8
        assert set(rows[0]) == {"k", "theta0", "P0", "beta_sq", "beta_lin_sq", "rejected"}

    def test_threads_env_fallback(self, tmp_path):
        cfg = write_config(tmp_path, {"samples": {"n_samples": 16}})
        res = run_cli("oracle", "--config", str(cfg), env={"STA_COST_THREADS": "2"})
        assert res.returncode == 0, res.stderr


class TestWignerCommand:
    def test_residual_table(self, tmp_path):
        cfg = write_config(tmp_path, {"wigner": {"n_max": 5, "nu": 1e-3, "mu": 1e-4}})
        out = tmp_path / "wigner.csv"
        res = run_cli("wigner", "--config", str(cfg), "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = read_csv(out)
        assert len(rows) == 6
        for row in rows:
            assert float(row["max_ode_residual"]) < 1e-9
            assert float(row["max_rrs_residual"]) < 1e-10
        n2 = rows[2]
        assert float(n2["c_up"]) == pytest.approx(0.5 * (1e-3 - 5e-5) * 12, rel=1e-8)

    def test_json_format(self, tmp_path):
        res = run_cli("wigner", "--format", "json")
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert len(payload) == 11


class TestSchema:
    def test_unknown_schema_version(self, tmp_path):
        cfg = write_config(tmp_path, {"schema_version": 99})
        res = run_cli("protocol", "--config", str(cfg))
        assert res.returncode == 1
        assert "schema_version" in res.stderr
