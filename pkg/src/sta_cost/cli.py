"""Batch command-line surface.

Subcommands: protocol, modes, fcurve, fig1, cost, oracle, wigner.
Common flags: --config PATH, --out PATH, --format csv|json, --seed N,
--threads N (STA_COST_THREADS as fallback).

Exit codes: 0 success, 1 configuration error, 2 physics-validity error,
3 accuracy-budget error.  All floating-point output uses 17 significant
digits, '.' decimal separator, ',' delimiter, one header row.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import cost as cost_mod
from . import oracle as oracle_mod
from . import wigner as wigner_mod
from .config import RunConfig, load_config
from .errors import (
    AccuracyError,
    ConfigurationError,
    DomainError,
    IntegrationError,
    StaCostError,
    ValidityError,
)
from .modes import solve_mode
from .oscillatory import f_curve_result

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDITY = 2
EXIT_ACCURACY = 3


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def write_table(columns: list[str], rows: list[tuple], out: str | None, fmt: str) -> None:
    stream, close = _open_out(out)
    try:
        if fmt == "csv":
            stream.write(",".join(columns) + "\n")
            for row in rows:
                stream.write(",".join(_fmt(v) for v in row) + "\n")
        else:
            payload = [dict(zip(columns, row)) for row in rows]
            stream.write(json.dumps(payload, indent=2))
            stream.write("\n")
    finally:
        if close:
            stream.close()


def write_report(payload: dict, out: str | None) -> None:
    stream, close = _open_out(out)
    try:
        stream.write(json.dumps(payload, indent=2))
        stream.write("\n")
    finally:
        if close:
            stream.close()


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


# -- subcommands ---------------------------------------------------------------


def cmd_protocol(config: RunConfig, args) -> int:
    protocol = config.require_protocol()
    protocol.warn_if_unsettled()
    protocol.validate_counterdiabatic()
    n = int(config.section("modes", {}).get("grid_points", 2001))
    t = np.linspace(protocol.window[0], protocol.window[1], n)
    omega = protocol.omega(t)
    omega2 = protocol.counterdiabatic_frequency(t)
    rate = protocol.counterdiabatic_rate(t)
    rows = [(float(a), float(b), float(c), float(d))
            for a, b, c, d in zip(t, omega, omega2, rate)]
    write_table(["t", "omega", "Omega2", "dOmega2_dt"], rows, args.out, args.format)
    return EXIT_OK


def cmd_modes(config: RunConfig, args) -> int:
    protocol = config.require_protocol()
    section = config.section("modes", {})
    which = section.get("frequency", "counterdiabatic")
    n = int(section.get("grid_points", 2001))
    if which == "counterdiabatic":
        protocol.validate_counterdiabatic()
        freq2 = protocol.counterdiabatic_frequency_fn()
    elif which == "bare":
        freq2 = lambda t: protocol.omega(t) ** 2
    else:
        raise ConfigurationError(f"modes.frequency must be 'counterdiabatic' or 'bare', got {which!r}")
    mode = solve_mode(freq2, protocol.window, config.system,
                      rtol=config.tolerances.ode_rel, atol=config.tolerances.ode_abs,
                      grid_points=n)
    if args.format == "json":
        rows = [
            {"t": float(t), "re_f": float(f.real), "im_f": float(f.imag),
             "re_fdot": float(fd.real), "im_fdot": float(fd.imag)}
            for t, f, fd in zip(mode.grid, mode.f, mode.fdot)]
        write_report({"wronskian_drift": mode.wronskian_drift, "mode": rows}, args.out)
    else:
        stream, close = _open_out(args.out)
        try:
            mode.write_csv(stream)
        finally:
            if close:
                stream.close()
    return EXIT_OK


def _fcurve_rows(x_values, y: float, quad_abs: float) -> tuple[list[tuple], bool]:
    rows = []
    failed = False
    for x in x_values:
        asym = float(np.pi * np.exp(-2.0 * x))
        try:
            res = f_curve_result(float(x), y, abs_tol=quad_abs)
            rows.append((float(x), abs(res.value), asym, res.total_error, "ok"))
        except AccuracyError as exc:
            failed = True
            rows.append((float(x), float(exc.best_value or np.nan), asym,
                         float(exc.error_bound or np.nan), "accuracy_error"))
    return rows, failed


def cmd_fcurve(config: RunConfig, args) -> int:
    section = config.section("fcurve", {})
    y = float(section.get("y", 0.5))
    if "x" in section:
        x_values = [float(v) for v in section["x"]]
    else:
        x_values = np.geomspace(float(section.get("x_min", 0.1)),
                                float(section.get("x_max", 4.0)),
                                int(section.get("points", 40)))
    rows, failed = _fcurve_rows(x_values, y, config.tolerances.quad_abs)
    write_table(["x", "F_xy", "pi_exp_minus_2x", "abs_error_estimate", "status"],
                rows, args.out, args.format)
    return EXIT_ACCURACY if failed else EXIT_OK


def cmd_fig1(config: RunConfig, args) -> int:
    section = config.section("fig1", {})
    y = float(section.get("y", 0.5))
    x_values = np.geomspace(float(section.get("x_min", 0.1)),
                            float(section.get("x_max", 4.0)),
                            int(section.get("points", 40)))
    rows, failed = _fcurve_rows(x_values, y, config.tolerances.quad_abs)
    write_table(["x", "F_xy", "pi_exp_minus_2x", "err_estimate", "status"],
                rows, args.out, args.format)
    return EXIT_ACCURACY if failed else EXIT_OK


def cmd_cost(config: RunConfig, args) -> int:
    protocol = config.require_protocol()
    drive = config.require_drive()
    protocol.validate_counterdiabatic()
    n = int(config.section("samples", {}).get("n_initial", 0))
    report, i0, i1 = cost_mod.build_cost_report(protocol, drive, config.system, n=n)
    payload = report.to_dict()
    payload["provenance"] = {
        "I0": _jsonable(i0.value),
        "I0_error_bound": i0.total_error,
        "I1": _jsonable(i1.value),
        "I1_error_bound": i1.total_error,
    }
    write_report(payload, args.out)
    return EXIT_OK


def cmd_oracle(config: RunConfig, args) -> int:
    protocol = config.require_protocol()
    drive = config.require_drive()
    section = config.section("samples")
    if args.seed is not None:
        section = dict(section)
        section["seed"] = args.seed
    spec = oracle_mod.SampleSpec.from_dict(section)
    result = oracle_mod.run_oracle(
        protocol, drive, spec, threads=args.threads,
        rtol=config.tolerances.ode_rel * 10.0, atol=config.tolerances.ode_abs * 10.0,
        keep_samples=args.dump_samples is not None)
    if args.dump_samples is not None:
        report, samples = result
        with open(args.dump_samples, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("k,theta0,P0,beta_sq,beta_lin_sq,rejected\n")
            for k in range(report.n_samples):
                fh.write(",".join([
                    str(k), _fmt(float(samples["theta0"][k])), _fmt(float(samples["P0"][k])),
                    _fmt(float(samples["beta_sq"][k])), _fmt(float(samples["beta_lin_sq"][k])),
                    str(int(samples["rejected"][k]))]) + "\n")
    else:
        report = result
    write_report(report.to_dict(), args.out)
    return EXIT_OK


def cmd_wigner(config: RunConfig, args) -> int:
    section = config.section("wigner", {})
    n_max = int(section.get("n_max", 10))
    nu = float(section.get("nu", 1e-3))
    mu = float(section.get("mu", 1e-4))
    hbar = config.system.hbar
    J = np.geomspace(hbar / 100.0, 10.0 * hbar, 200)
    rows = []
    for n in range(n_max + 1):
        state = wigner_mod.WignerEigenstate(n, hbar)
        ode = float(np.max(np.abs(state.ode_residual(J))))
        scale = float(np.max(np.abs(state.evaluate(J))))
        rrs = wigner_mod.verify_recursions(n, J, hbar).max_residual
        dec = wigner_mod.final_state_decomposition(n, nu, mu, hbar)
        rows.append((n, ode / scale, rrs, dec.coefficient(n - 2), dec.coefficient(n),
                     dec.coefficient(n + 2), dec.off_basis_residual))
    write_table(
        ["n", "max_ode_residual", "max_rrs_residual", "c_down", "c_diag", "c_up",
         "off_basis_residual"], rows, args.out, args.format)
    return EXIT_OK


COMMANDS = {
    "protocol": cmd_protocol,
    "modes": cmd_modes,
    "fcurve": cmd_fcurve,
    "fig1": cmd_fig1,
    "cost": cmd_cost,
    "oracle": cmd_oracle,
    "wigner": cmd_wigner,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sta-cost",
        description="Counterdiabatic-drive cost toolkit for the parametric oscillator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=name not in ("fcurve", "fig1", "wigner"),
                       help="path to a JSON run configuration")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"),
                       default="json" if name in ("cost", "oracle") else "csv")
        p.add_argument("--seed", type=int, default=None,
                       help="override the sample seed from the config")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (fallback: STA_COST_THREADS, then 1)")
        if name == "oracle":
            p.add_argument("--dump-samples", default=None,
                           help="write a per-sample CSV to this path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is None:
        args.threads = int(os.environ.get("STA_COST_THREADS", "1"))
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command in ("cost", "oracle") and args.format == "csv":
            raise ConfigurationError(f"{args.command} emits JSON reports; use --format json")
        config = load_config(args.config) if args.config else RunConfig()
        return COMMANDS[args.command](config, args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidityError, DomainError) as exc:
        print(f"validity error: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except (AccuracyError, IntegrationError) as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except StaCostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
