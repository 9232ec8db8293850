"""Mode functions of the parametric oscillator and their particle content.

The complex mode f(t) solves

    f'' + freq2(t) * f = 0,

with vacuum Cauchy data f(t0) = 1/sqrt(2 W0), f'(t0) = -i sqrt(W0/2),
W0 = sqrt(freq2(t0)).  The Wronskian i (f* f' - f f'*) equals 1 and is
conserved; its drift across the output grid is the solver's accuracy monitor.

Expanding the evolved mode over the positive/negative frequency reference pair
at t_end yields the Bogoliubov coefficients (alpha, beta); |beta|^2 counts
created excitations.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import AccuracyError, IntegrationError
from .protocol import EDGE_TOLERANCE, FrequencyProtocol, SystemSpec

WRONSKIAN_TOLERANCE = 1e-6
DEFAULT_GRID_POINTS = 2001
DEFAULT_RTOL = 1e-11
DEFAULT_ATOL = 1e-13


@dataclass(frozen=True)
class ModeFunction:
    """Complex mode and derivative on a uniform output grid."""

    grid: np.ndarray
    f: np.ndarray
    fdot: np.ndarray
    wronskian_drift: float

    def wronskian(self) -> np.ndarray:
        return (1j * (np.conj(self.f) * self.fdot - self.f * np.conj(self.fdot))).real

    @property
    def t_end(self) -> float:
        return float(self.grid[-1])

    def endpoint(self) -> tuple[complex, complex]:
        return complex(self.f[-1]), complex(self.fdot[-1])

    def write_csv(self, stream) -> None:
        stream.write("t,re_f,im_f,re_fdot,im_fdot,abs_wronskian_err\n")
        werr = np.abs(self.wronskian() - 1.0)
        for t, f, fd, we in zip(self.grid, self.f, self.fdot, werr):
            row = (t, f.real, f.imag, fd.real, fd.imag, we)
            stream.write(",".join(format(v, ".17g") for v in row) + "\n")


@dataclass(frozen=True)
class BogoliubovCoefficients:
    alpha: complex
    beta: complex

    @property
    def normalization_defect(self) -> float:
        """|alpha|^2 - |beta|^2 - 1; zero for an exact symplectic evolution."""
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2 - 1.0

    @property
    def n_created(self) -> float:
        return abs(self.beta) ** 2


@dataclass(frozen=True)
class ActionAngle:
    J: float
    phi: float
    degenerate: bool = False


def vacuum_cauchy_data(frequency: float) -> tuple[complex, complex]:
    """Positive-frequency data for instantaneous frequency `frequency` > 0."""
    return 1.0 / math.sqrt(2.0 * frequency), -1j * math.sqrt(frequency / 2.0)


def solve_mode(
    frequency: Callable[[float], float],
    window: tuple[float, float],
    system: SystemSpec | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    grid_points: int = DEFAULT_GRID_POINTS,
    initial: tuple[complex, complex] | None = None,
) -> ModeFunction:
    """Integrate the mode equation over the window.

    frequency maps t to the squared instantaneous frequency.  The default
    Cauchy data is the vacuum pair of sqrt(frequency(t_start)); pass `initial`
    to override (e.g. with exact WKB data).  The solution is resampled from the
    integrator's dense output onto a uniform grid of `grid_points` points.

    The mode equation does not involve the oscillator mass; `system` is
    accepted for interface uniformity.
    """
    t0, t1 = float(window[0]), float(window[1])
    if initial is None:
        w2 = float(frequency(t0))
        if w2 <= 0.0:
            raise IntegrationError(
                f"cannot impose vacuum data: frequency^2 = {w2:.6g} <= 0 at t_start", last_t=t0)
        f0, fd0 = vacuum_cauchy_data(math.sqrt(w2))
    else:
        f0, fd0 = complex(initial[0]), complex(initial[1])

    def rhs(t, y):
        w2 = frequency(t)
        return (y[2], y[3], -w2 * y[0], -w2 * y[1])

    sol = solve_ivp(
        rhs, (t0, t1), (f0.real, f0.imag, fd0.real, fd0.imag),
        method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise IntegrationError(f"mode integration failed: {sol.message}",
                               last_t=float(sol.t[-1]))

    grid = np.linspace(t0, t1, grid_points)
    y = sol.sol(grid)
    f = y[0] + 1j * y[1]
    fdot = y[2] + 1j * y[3]
    wr = (1j * (np.conj(f) * fdot - f * np.conj(fdot))).real
    drift = float(np.max(np.abs(wr - 1.0)))
    # normalize out the Wronskian of the initial data so the drift measures
    # integration error, not the caller's data
    w_init = (1j * (np.conjugate(f0) * fd0 - f0 * np.conjugate(fd0))).real
    drift_rel = float(np.max(np.abs(wr / w_init - 1.0)))
    if drift_rel > WRONSKIAN_TOLERANCE:
        raise AccuracyError(
            f"Wronskian drift {drift_rel:.3g} exceeds {WRONSKIAN_TOLERANCE:g}; "
            "tighten rtol/atol", error_bound=drift_rel)
    return ModeFunction(grid=grid, f=f, fdot=fdot, wronskian_drift=drift)


def wkb_mode(protocol: FrequencyProtocol, t):
    """Adiabatic mode of omega(t): f = exp(-i Phi)/sqrt(2 omega), Phi from t_start.

    The derivative includes the amplitude term: f' = (-i omega - wd/(2 omega)) f.
    This pair has exactly unit Wronskian for any omega(t) > 0.
    """
    w, wd, _, _ = protocol.omega_derivatives(t)
    phase = protocol.phase_integral(t) - protocol.phase_integral(protocol.window[0])
    f = np.exp(-1j * phase) / np.sqrt(2.0 * w)
    fdot = (-1j * w - wd / (2.0 * w)) * f
    return f, fdot


def bogoliubov(
    mode: ModeFunction,
    reference_omega: float,
    omega_dot_end: float = 0.0,
    edge_tolerance: float = EDGE_TOLERANCE,
) -> BogoliubovCoefficients:
    """Project the evolved mode onto e^{-i w (t - t_end)}/sqrt(2w) and its conjugate.

    The reference pair diagonalizes the end-time Hamiltonian only where
    wd(t_end) ~ 0; pass omega_dot_end to get a warning when the reference
    vacuum is ill-defined.
    """
    if reference_omega <= 0.0:
        raise ValueError("reference_omega must be > 0")
    if abs(omega_dot_end) / reference_omega**2 > edge_tolerance:
        warnings.warn(
            f"|wd(t_end)|/omega^2 = {abs(omega_dot_end) / reference_omega**2:.3g} "
            f"> {edge_tolerance:g}: end-time reference vacuum is ill-defined",
            stacklevel=2)
    f, fd = mode.endpoint()
    u = 1.0 / cmath.sqrt(2.0 * reference_omega)
    ud = -1j * reference_omega * u
    alpha = 1j * (u.conjugate() * fd - ud.conjugate() * f)
    beta = -1j * (u * fd - ud * f)
    return BogoliubovCoefficients(alpha=alpha, beta=beta)


def bogoliubov_from_endpoint(f: complex, fdot: complex, reference_omega: float) -> tuple[complex, complex]:
    """Same projection as `bogoliubov`, for raw endpoint values."""
    u = 1.0 / cmath.sqrt(2.0 * reference_omega)
    ud = -1j * reference_omega * u
    alpha = 1j * (u.conjugate() * fdot - ud.conjugate() * f)
    beta = -1j * (u * fdot - ud * f)
    return alpha, beta


def particle_number(coeffs: BogoliubovCoefficients, n_initial: int) -> float:
    """Mean occupation change of an initial n-eigenstate: (2n+1)|beta|^2."""
    if n_initial < 0:
        raise ValueError("n_initial must be >= 0")
    return (2 * n_initial + 1) * abs(coeffs.beta) ** 2


def action_angle(X: float, P: float, f: complex, fdot: complex,
                 system: SystemSpec | None = None) -> ActionAngle:
    """Invert X = sqrt(J/m)(f e^{-i phi} + cc), P = sqrt(mJ)(f' e^{-i phi} + cc).

    The complex amplitude a = i (f* P/sqrt(m) - sqrt(m) f'* X) equals
    sqrt(J) e^{-i phi} when the (f, f') pair has unit Wronskian.
    """
    m = system.mass if system is not None else 1.0
    a = 1j * (np.conj(f) * P / math.sqrt(m) - math.sqrt(m) * np.conj(fdot) * X)
    J = abs(a) ** 2
    if J == 0.0:
        return ActionAngle(J=0.0, phi=0.0, degenerate=True)
    return ActionAngle(J=float(J), phi=float(-cmath.phase(a)), degenerate=False)


def reconstruct_xp(action: ActionAngle, f: complex, fdot: complex,
                   system: SystemSpec | None = None) -> tuple[float, float]:
    """Map (J, phi) back to (X, P) through the mode pair."""
    m = system.mass if system is not None else 1.0
    amp = math.sqrt(action.J) * cmath.exp(-1j * action.phi)
    X = (amp * f + (amp * f).conjugate()).real / math.sqrt(m)
    P = math.sqrt(m) * (amp * fdot + (amp * fdot).conjugate()).real
    return float(X), float(P)
