"""Monte Carlo cross-check: drive fluctuations as c-number random initial data.

Each sample draws independent zero-mean Gaussians (theta0, P0) for the initial
angle fluctuation and its momentum, perturbs the drive frequency to first order,

    Omega^2_pert(t) = Omega^2(t) + (dOmega^2/dTheta)(t) * (theta0 + P0 t / M),

and integrates the mode equation exactly under the perturbed drive.  The
fluctuation-induced part of the Bogoliubov beta is isolated by subtracting the
zero-fluctuation baseline of the same finite window (which is nonzero only
through window truncation), so the ensemble statistics probe the linear
response alone.  The first-order prediction per sample is

    beta_lin = i * (theta0 * I0 + (P0/M) * I1)

with the moment integrals restricted to the same window and phase convention.

Reproducibility contract: sample k draws from Philox keyed by the seed with
counter k, chunks have a fixed size, and reductions run in sample order
(math.fsum), so results are bit-identical at any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import cost
from .driving import DrivingSpec
from .errors import ConfigurationError, IntegrationError
from .modes import bogoliubov_from_endpoint, vacuum_cauchy_data
from .oscillatory import window_moment_integrals
from .protocol import FrequencyProtocol

CHUNK_SIZE = 256  # fixed: chunk membership must not depend on thread count
REJECTION_WARN_FRACTION = 0.01
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class SampleSpec:
    n_samples: int
    seed: int
    n_initial: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigurationError("n_samples must be >= 1")
        if self.n_initial < 0:
            raise ConfigurationError("n_initial must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must fit in 64 bits")

    @classmethod
    def from_dict(cls, d: dict) -> "SampleSpec":
        try:
            return cls(n_samples=int(d["n_samples"]), seed=int(d.get("seed", 0)),
                       n_initial=int(d.get("n_initial", 0)))
        except KeyError as exc:
            raise ConfigurationError(f"samples: missing field {exc}") from exc


@dataclass(frozen=True)
class OracleReport:
    mean_beta_sq: float
    std_error: float | None
    delta_n_mc: float
    nu_prediction: float
    ratio: float | None
    calibration_constant: float | None
    n_samples: int
    n_rejected: int
    n_initial: int
    seed: int
    baseline_beta_sq: float
    median_linear_deviation: float | None

    def to_dict(self) -> dict:
        return {
            "mean_beta_sq": self.mean_beta_sq,
            "std_error": self.std_error,
            "delta_n_mc": self.delta_n_mc,
            "nu_prediction": self.nu_prediction,
            "ratio": self.ratio,
            "calibration_constant": self.calibration_constant,
            "n_samples": self.n_samples,
            "n_rejected": self.n_rejected,
            "n_initial": self.n_initial,
            "seed": self.seed,
            "baseline_beta_sq": self.baseline_beta_sq,
            "median_linear_deviation": self.median_linear_deviation,
            "rejection_warning": self.rejection_warning,
        }

    @property
    def rejection_warning(self) -> bool:
        return self.n_rejected > REJECTION_WARN_FRACTION * self.n_samples


def sample_fluctuation(drive: DrivingSpec, seed: int, index: int) -> tuple[float, float]:
    """Counter-based draw of (theta0, P0) for sample `index` under `seed`.

    Philox keyed by the seed with the sample index in the counter word, so the
    stream is a pure function of (seed, index) and execution order is
    irrelevant.
    """
    gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, index]))
    z = gen.standard_normal(2)
    return (math.sqrt(drive.var_theta0) * z[0], math.sqrt(drive.var_P0) * z[1])


def _draw_block(drive: DrivingSpec, seed: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    th = np.empty(n)
    p = np.empty(n)
    for k in range(n):
        th[k], p[k] = sample_fluctuation(drive, seed, k)
    return th, p


def perturbed_frequency(protocol: FrequencyProtocol, drive: DrivingSpec,
                        theta0: float, P0: float, t, linearized: bool = True):
    """Squared drive frequency seen by one sample at time t.

    linearized=False evaluates the exact angle shift instead (a time
    translation by theta(t)/theta_dot), used for robustness checks.
    """
    fluct = theta0 + P0 * np.asarray(t) / drive.M
    if linearized:
        base = protocol.counterdiabatic_frequency(t)
        return base + (protocol.counterdiabatic_rate(t) / drive.theta_dot) * fluct
    return protocol.counterdiabatic_frequency(np.asarray(t) + fluct / drive.theta_dot)


def _solve_chunk(base_freq2, rate_over_thdot, th, p, M, window, f0, fd0,
                 rtol, atol) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized mode integration for one chunk of samples; returns (f, fdot)."""
    K = len(th)
    t0, t1 = window

    def rhs(t, Y):
        w2 = base_freq2(t) + rate_over_thdot(t) * (th + p * (t / M))
        return np.concatenate([Y[2 * K:], -np.tile(w2, 2) * Y[:2 * K]])

    Y0 = np.concatenate([
        np.full(K, f0.real), np.full(K, f0.imag),
        np.full(K, fd0.real), np.full(K, fd0.imag)])
    sol = solve_ivp(rhs, (t0, t1), Y0, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"sample chunk integration failed: {sol.message}",
                               last_t=float(sol.t[-1]))
    Y = sol.y[:, -1]
    return Y[:K] + 1j * Y[K:2 * K], Y[2 * K:3 * K] + 1j * Y[3 * K:]


def run_oracle(protocol: FrequencyProtocol, drive: DrivingSpec, spec: SampleSpec,
               window: tuple[float, float] | None = None, threads: int = 1,
               rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
               keep_samples: bool = False) -> OracleReport | tuple[OracleReport, dict]:
    """Ensemble excitation of the counterdiabatically driven oscillator.

    The unperturbed drive is validated for positivity first, so any excitation
    is fluctuation-induced.  Samples whose perturbed frequency turns negative
    anywhere on the window are counted and excluded, never resampled.
    """
    if window is None:
        window = protocol.window
    protocol_w = protocol.with_window(window) if window != protocol.window else protocol
    protocol_w.validate_counterdiabatic()
    t0, t1 = float(window[0]), float(window[1])

    base_freq2 = protocol_w.counterdiabatic_frequency
    rate = protocol_w.counterdiabatic_rate

    def rate_over_thdot(t):
        return rate(t) / drive.theta_dot

    w2_start = float(base_freq2(t0))
    f0, fd0 = vacuum_cauchy_data(math.sqrt(w2_start))
    w_end = float(protocol_w.omega(t1))

    # rejection scan grid and baseline quantities
    t_check = np.linspace(t0, t1, 2001)
    base_on_grid = base_freq2(t_check)
    rate_on_grid = rate_over_thdot(t_check)

    th, p = _draw_block(drive, spec.seed, spec.n_samples)

    beta_fl = np.empty(spec.n_samples, dtype=complex)
    rejected = np.zeros(spec.n_samples, dtype=bool)
    baselines = {}

    chunk_bounds = list(range(0, spec.n_samples, CHUNK_SIZE))

    def process(lo: int) -> None:
        hi = min(lo + CHUNK_SIZE, spec.n_samples)
        # the zero-fluctuation baseline rides along as the last column so it
        # shares the chunk's step sequence and cancels truncation error (and
        # cancels exactly for zero-variance draws)
        thc = np.append(th[lo:hi], 0.0)
        pc = np.append(p[lo:hi], 0.0)
        pert = base_on_grid[None, :] + rate_on_grid[None, :] * (
            th[lo:hi, None] + p[lo:hi, None] * (t_check[None, :] / drive.M))
        rejected[lo:hi] = np.min(pert, axis=1) <= 0.0
        f, fd = _solve_chunk(base_freq2, rate_over_thdot, thc, pc, drive.M,
                             (t0, t1), f0, fd0, rtol, atol)
        u = 1.0 / np.sqrt(2.0 * w_end)
        ud = -1j * w_end * u
        betas = -1j * (u * fd - ud * f)
        beta_fl[lo:hi] = betas[:-1] - betas[-1]
        baselines[lo] = complex(betas[-1])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(process, chunk_bounds))
    else:
        for lo in chunk_bounds:
            process(lo)

    beta_base = baselines[0]
    i0w, i1w = window_moment_integrals(protocol_w, drive, (t0, t1))
    beta_lin = 1j * (th * i0w + (p / drive.M) * i1w)

    accepted = ~rejected
    n_acc = int(np.count_nonzero(accepted))
    n_rej = spec.n_samples - n_acc
    b2 = np.abs(beta_fl) ** 2
    b2_lin = np.abs(beta_lin) ** 2

    if n_acc == 0:
        raise ConfigurationError("all samples rejected: fluctuation variances "
                                 "far outside the perturbative regime")

    # fixed-order exact accumulation: bit-stable at any thread count
    mean_b2 = math.fsum(b2[accepted]) / n_acc
    if n_acc >= 2:
        var = math.fsum((v - mean_b2) ** 2 for v in b2[accepted]) / (n_acc - 1)
        std_error = math.sqrt(var / n_acc)
    else:
        std_error = None

    two_n_plus_1 = 2 * spec.n_initial + 1
    delta_n_mc = two_n_plus_1 * mean_b2

    nu, mu = cost.nu_mu(protocol_w, drive)
    nu_pred = cost.delta_n(nu, 0.0, spec.n_initial)
    ratio = delta_n_mc / nu_pred if nu_pred > 0.0 else None

    denom = math.fsum(b2_lin[accepted] ** 2)
    calib = math.fsum(b2[accepted] * b2_lin[accepted]) / denom if denom > 0.0 else None
    if denom > 0.0:
        nonzero = accepted & (b2_lin > 0.0)
        med_dev = float(np.median(np.abs(b2[nonzero] - b2_lin[nonzero]) / b2_lin[nonzero]))
    else:
        med_dev = None

    report = OracleReport(
        mean_beta_sq=mean_b2,
        std_error=std_error,
        delta_n_mc=delta_n_mc,
        nu_prediction=nu_pred,
        ratio=ratio,
        calibration_constant=calib,
        n_samples=spec.n_samples,
        n_rejected=n_rej,
        n_initial=spec.n_initial,
        seed=spec.seed,
        baseline_beta_sq=abs(beta_base) ** 2,
        median_linear_deviation=med_dev,
    )
    if keep_samples:
        samples = {"theta0": th, "P0": p, "beta_sq": b2, "beta_lin_sq": b2_lin,
                   "rejected": rejected}
        return report, samples
    return report


def suggested_variances(protocol: FrequencyProtocol, drive: DrivingSpec,
                        target: float = 1e-3) -> tuple[float, float]:
    """Variances putting the one-sigma perturbation at `target` of Omega^2.

    Pairs sigma_P = M sigma_theta / tau so both terms contribute comparably.
    """
    t = np.linspace(protocol.window[0], protocol.window[1], 4001)
    base = protocol.counterdiabatic_frequency(t)
    g = protocol.counterdiabatic_rate(t) / drive.theta_dot
    tau = protocol.time_scale()
    amp = float(np.max(np.abs(g) * (1.0 + np.abs(t) / tau) / base))
    if amp == 0.0:
        return 0.0, 0.0
    sigma = target / amp
    return sigma**2, (drive.M * sigma / tau) ** 2
