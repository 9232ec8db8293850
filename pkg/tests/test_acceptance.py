"""Acceptance gate: every shipped claim at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per criterion.
The Monte Carlo criterion (9) integrates ~1e5 mode equations and dominates the
runtime (a few minutes); everything else finishes in seconds.
"""

import csv
import json
import math
import subprocess
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from sta_cost.cost import (
    delta_n,
    nu_from_window_moments,
    nu_time_domain_oracle,
    transition_probabilities,
)
from sta_cost.driving import DrivingSpec
from sta_cost.modes import bogoliubov, solve_mode
from sta_cost.oracle import SampleSpec, run_oracle, suggested_variances
from sta_cost.oscillatory import f_curve, integral_I0, integral_I1
from sta_cost.protocol import FrequencyProtocol
from sta_cost.wigner import (
    WignerEigenstate,
    expected_weights,
    final_state_decomposition,
    verify_recursions,
)

DATA = Path(__file__).parent / "data"


def _passed(criterion: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"\n[acceptance] {criterion}: PASS{suffix}")


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "sta_cost.cli", *args],
                          capture_output=True, text=True)


def load_reference():
    with open(DATA / "fcurve_reference.csv") as fh:
        return [(float(r["x"]), float(r["y"]), float(r["F_reference"]))
                for r in csv.DictReader(fh)]


def test_criterion_01_fig1_reproduction(tmp_path):
    """Replotting curve matches the independent high-precision oracle per point."""
    tic = time.time()
    out = tmp_path / "fig1.csv"
    res = run_cli("fig1", "--out", str(out))
    elapsed = time.time() - tic
    assert res.returncode == 0, res.stderr
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 40
    reference = [r for r in load_reference() if r[1] == 0.5][:40]
    worst = 0.0
    for row, (x_ref, _, F_ref) in zip(rows, reference):
        x = float(row["x"])
        assert x == pytest.approx(x_ref, rel=1e-12)
        worst = max(worst, abs(float(row["F_xy"]) - F_ref) / F_ref)
        # the overlaid asymptote column is the formula itself
        assert float(row["pi_exp_minus_2x"]) == pytest.approx(
            math.pi * math.exp(-2.0 * x), rel=1e-15)
        assert row["status"] == "ok"
    assert worst < 1e-6, f"worst per-point relative error {worst:.2e}"
    assert elapsed < 60.0
    _passed("criterion 1 (curve reproduction)",
            f"worst rel err {worst:.1e}, {elapsed:.1f}s")


def test_criterion_02_flat_limit_law():
    """F[x, 0] equals pi e^{-2x} to 1e-6 at the six mandated abscissas."""
    worst = 0.0
    for x in (0.1, 0.2, 0.5, 1.0, 2.0, 4.0):
        expected = math.pi * math.exp(-2.0 * x)
        worst = max(worst, abs(f_curve(x, 0.0) - expected) / expected)
    assert worst < 1e-6
    _passed("criterion 2 (exact flat-limit law)", f"worst rel err {worst:.1e}")


def test_criterion_03_small_x_slope():
    """F[x, 1/2] scales as 1/x below x = 1e-2."""
    x = np.geomspace(1e-3, 1e-2, 7)
    F = np.array([f_curve(float(v), 0.5) for v in x])
    slope = float(np.polyfit(np.log(x), np.log(F), 1)[0])
    assert slope == pytest.approx(-1.0, abs=0.05)
    # cross-check the same points against the frozen oracle table
    ref = {round(xx, 12): FF for xx, yy, FF in load_reference() if yy == 0.5}
    for v, FF in zip(x, F):
        key = round(float(v), 12)
        if key in ref:
            assert FF == pytest.approx(ref[key], rel=1e-6)
    _passed("criterion 3 (small-x inverse law)", f"slope {slope:+.4f}")


def test_criterion_04_counterdiabatic_exactness():
    """The counterdiabatic drive creates no particles: |beta|^2 < 1e-10."""
    details = []
    for tau in (1.0, 2.0):
        tic = time.time()
        protocol = FrequencyProtocol.arctan_family(
            1.0, 0.5, tau, window=(-1000.0 * tau, 1000.0 * tau))
        protocol.validate_counterdiabatic()
        mode = solve_mode(protocol.counterdiabatic_frequency_fn(), protocol.window)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            coeffs = bogoliubov(mode, float(protocol.omega(protocol.window[1])))
        elapsed = time.time() - tic
        assert coeffs.n_created < 1e-10, f"tau={tau}: |beta|^2={coeffs.n_created:.2e}"
        assert mode.wronskian_drift < 1e-9
        assert elapsed < 5.0
        details.append(f"tau={tau}: |beta|^2={coeffs.n_created:.1e} in {elapsed:.1f}s")
    _passed("criterion 4 (no particle creation under the drive)", "; ".join(details))


def test_criterion_05_moment_integral_identities():
    """Zeroth moment vanishes within its bound; both first-moment forms agree."""
    drive = DrivingSpec(M=1.0, theta_dot=1.0)
    worst_i0 = 0.0
    worst_gap = 0.0
    for x in (0.7, 1.0, 2.0):
        for y in (0.2, 0.35, 0.5):
            p = FrequencyProtocol.arctan_family(1.0, y, x)
            i0 = integral_I0(p, drive)
            red = integral_I1(p, drive, form="reduced")
            dfn = integral_I1(p, drive, form="defining")
            bound = max(1e-8 * abs(red.value), i0.total_error)
            assert abs(i0.value) <= bound
            gap = abs(red.value - dfn.value) / abs(red.value)
            assert gap < 1e-8
            worst_i0 = max(worst_i0, abs(i0.value))
            worst_gap = max(worst_gap, gap)
    _passed("criterion 5 (zeroth moment and form equivalence)",
            f"max |I0| {worst_i0:.1e}, max form gap {worst_gap:.1e}")


def test_criterion_06_nu_factorization():
    """Double-time-integral evaluation of nu matches the factorized value."""
    tic = time.time()
    cases = [
        (FrequencyProtocol.arctan_family(1.0, 0.5, 1.0),
         DrivingSpec(M=1.0, theta_dot=1.0, var_theta0=2e-6, var_P0=1e-6)),
        (FrequencyProtocol.arctan_family(1.3, 0.4, 1.5),
         DrivingSpec(M=0.7, theta_dot=1.4, var_theta0=5e-7, var_P0=3e-6)),
    ]
    worst = 0.0
    for protocol, drive in cases:
        direct = nu_time_domain_oracle(protocol, drive)
        factored = nu_from_window_moments(protocol, drive)
        worst = max(worst, abs(direct - factored) / factored)
    elapsed = time.time() - tic
    assert worst < 1e-6
    assert elapsed < 120.0
    _passed("criterion 6 (nu factorization)", f"worst rel err {worst:.1e}, {elapsed:.1f}s")


def test_criterion_07_action_space_recursions():
    """Recursion identities, the action ODE, and the origin normalization."""
    J = np.geomspace(0.01, 10.0, 120)
    worst_rrs = 0.0
    worst_ode = 0.0
    for n in range(11):
        worst_rrs = max(worst_rrs, verify_recursions(n, J).max_residual)
        state = WignerEigenstate(n)
        sup = float(np.max(np.abs(state.evaluate(np.linspace(1e-4, 12.0, 400)))))
        worst_ode = max(worst_ode, float(np.max(np.abs(state.ode_residual(J)))) / sup)
    assert worst_rrs < 1e-10
    assert worst_ode < 1e-9
    for n in range(21):
        assert WignerEigenstate(n).evaluate(0.0) * (-1.0) ** n == 2.0
    _passed("criterion 7 (recursions, ODE, normalization)",
            f"max rrs {worst_rrs:.1e}, max ode {worst_ode:.1e}")


def test_criterion_08_final_state_decomposition():
    """Projected transition weights match closed forms; occupation identity holds."""
    rng = np.random.default_rng(88)
    worst = 0.0
    for n in range(6):
        nu = float(rng.uniform(1e-4, 1e-2))
        mu = float(rng.uniform(-1e-3, 1e-3))
        result = final_state_decomposition(n, nu, mu)
        for m, value in expected_weights(n, nu, mu).items():
            if value == 0.0:
                assert abs(result.coefficient(m)) < 1e-14
            else:
                worst = max(worst, abs(result.coefficient(m) - value) / abs(value))
    assert worst < 1e-8
    for n in range(11):
        nu = float(rng.uniform(0.0, 1e-2))
        mu = float(rng.uniform(-1e-3, 1e-3))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            p_down, p_up = transition_probabilities(nu, mu, n)
        assert abs(delta_n(nu, mu, n) - 2.0 * (p_up - p_down)) < 1e-12
    _passed("criterion 8 (final-state decomposition)", f"worst rel err {worst:.1e}")


def test_criterion_09_monte_carlo_oracle():
    """Quadratic scaling, protocol-independent calibration, (2n+1) law; 1e4 samples."""
    tic = time.time()
    base = FrequencyProtocol.arctan_family(1.0, 0.5, 1.0, window=(-100.0, 100.0))
    vt, vp = suggested_variances(base, DrivingSpec())

    # (a) quadratic scaling in the fluctuation amplitude
    multipliers = (1.0, 0.5, 0.25, 0.125)
    means = []
    for mult in multipliers:
        drive = DrivingSpec(M=1.0, theta_dot=1.0,
                            var_theta0=vt * mult**2, var_P0=vp * mult**2)
        report = run_oracle(base, drive, SampleSpec(n_samples=10_000, seed=401))
        means.append(report.delta_n_mc)
    slope = float(np.polyfit(np.log(multipliers), np.log(means), 1)[0])
    assert slope == pytest.approx(2.0, abs=0.05), f"scaling slope {slope}"

    # (b) calibration constant across three protocol settings
    settings_ = [(0.5, 1.0), (0.4, 0.8), (0.45, 1.25)]
    calibrations = []
    ratios = []
    for delta, tau in settings_:
        p = FrequencyProtocol.arctan_family(1.0, delta, tau,
                                            window=(-400.0 * tau, 400.0 * tau))
        vtp, vpp = suggested_variances(p, DrivingSpec())
        drive = DrivingSpec(M=1.0, theta_dot=1.0, var_theta0=vtp, var_P0=vpp)
        report = run_oracle(p, drive, SampleSpec(n_samples=10_000, seed=402))
        calibrations.append(report.calibration_constant)
        ratios.append(report.ratio)
    spread = (max(calibrations) - min(calibrations)) / np.mean(calibrations)
    assert spread < 0.05, f"calibration constants {calibrations}"
    ratio_spread = (max(ratios) - min(ratios)) / np.mean(ratios)
    assert ratio_spread < 0.05, f"prediction ratios {ratios}"

    # (c) mean excitation follows (2n+1): ratios 1 : 3 : 7 across independent seeds
    drive = DrivingSpec(M=1.0, theta_dot=1.0, var_theta0=vt, var_P0=vp)
    reports = {
        n: run_oracle(base, drive, SampleSpec(n_samples=10_000, seed=500 + n, n_initial=n))
        for n in (0, 1, 3)
    }
    d0 = reports[0].delta_n_mc
    for n in (1, 3):
        expected_ratio = 2 * n + 1
        got = reports[n].delta_n_mc / d0
        sigma = expected_ratio * math.sqrt(
            (reports[n].std_error * (2 * n + 1) / reports[n].delta_n_mc) ** 2
            + (reports[0].std_error / reports[0].mean_beta_sq) ** 2)
        assert abs(got - expected_ratio) < 5.0 * sigma, (
            f"n={n}: ratio {got:.3f} vs {expected_ratio} (sigma {sigma:.3f})")

    elapsed = time.time() - tic
    assert elapsed < 600.0
    _passed("criterion 9 (Monte Carlo oracle)",
            f"slope {slope:+.3f}, calib spread {spread:.2%}, "
            f"ratio spread {ratio_spread:.2%}, {elapsed:.0f}s")


def test_criterion_10_byte_determinism(tmp_path):
    """Identical seed gives byte-identical reports at any thread count."""
    cfg = {
        "schema_version": 1,
        "protocol": {"kind": "arctan", "omega0": 1.0, "delta": 0.5, "tau": 1.0,
                     "window": [-50.0, 50.0]},
        "drive": {"M": 1.0, "theta_dot": 1.0, "var_theta0": 4.5e-7, "var_P0": 4.5e-7},
        "samples": {"n_samples": 600, "seed": 77},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    payloads = []
    for threads in ("1", "4", "2", "1"):
        out = tmp_path / f"out_{len(payloads)}.json"
        res = run_cli("oracle", "--config", str(cfg_path), "--threads", threads,
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        payloads.append(out.read_bytes())
    assert all(p == payloads[0] for p in payloads[1:])
    _passed("criterion 10 (byte determinism)",
            f"{len(payloads)} runs, {len(payloads[0])} bytes each")
