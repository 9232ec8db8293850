"""Oscillatory cost integrals for the arctan protocol family.

All integrals reduce, in the dimensionless variable s = t/tau, to

    int ds  g(s) * exp(-2 i x psi(s)),      psi(s) = W(s) s - (y/2) ln(1+s^2),

with x = omega0*tau, y = delta/omega0, W(s) = 1 + y arctan(s), and g an
algebraic amplitude.  The phase derivative psi'(s) = W(s) > 0 never vanishes,
so there are no stationary points, but g decays only algebraically and the
domain is the whole real line.

Strategy: the amplitudes are analytic off the imaginary axis (branch points of
arctan and log sit at s = +-i), and exp(-2ix psi) decays in the lower half
plane on both sides.  The line integral is therefore split at +-S0 and the two
tails are rotated onto vertical rays s = +-S0 - i u, where the integrand decays
like exp(-2 x kappa u) with kappa = 1 +- y pi/2.  Every piece is smooth and is
integrated with fixed Gauss-Legendre panels (embedded lower-order rule for the
error estimate), so results are deterministic bit for bit.

The dimensionless curve F[x, y] = |int ds (A/W)(1 - i (y/4x) A/W^2) e^{-2ix psi}|
collapses the first-moment integral: |I1| = (delta / (theta_dot omega0)) F.
At y = 0 the integral is exactly pi e^{-2x}, the anchor used by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .driving import DrivingSpec
from .errors import AccuracyError, ConfigurationError, DomainError
from .protocol import MAX_DELTA_RATIO, FrequencyProtocol

# contour parameters; S0 keeps a safe margin from the branch points at +-i
RAY_OFFSET = 3.0
PHASE_PER_PANEL = math.pi / 3.0
MAX_PANEL_WIDTH = 0.4
RAY_DECAY_CUT = 42.0  # exp(-42) ~ 6e-19 relative tail on the rays

_GL16 = leggauss(16)
_GL8 = leggauss(8)
_GL24 = leggauss(24)
_GL12 = leggauss(12)


@dataclass(frozen=True)
class OscillatoryResult:
    """Value of an oscillatory integral with explicit error accounting.

    abs_error_estimate bounds the quadrature error (embedded-rule differences,
    summed over panels); truncation_bound bounds the neglected tail of the
    infinite domain.  Both are absolute, on the same scale as value.
    """

    value: complex
    abs_error_estimate: float
    truncation_bound: float

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def total_error(self) -> float:
        return self.abs_error_estimate + self.truncation_bound


# -- dimensionless building blocks (complex-safe) ---------------------------

def _W(s, y):
    return 1.0 + y * np.arctan(s)


def _A(s):
    return 1.0 / (1.0 + s * s)


def _psi(s, y):
    return _W(s, y) * s - 0.5 * y * np.log(1.0 + s * s)


def _phase_factor(s, x, y):
    return np.exp(-2j * x * _psi(s, y))


def reduced_first_moment_integrand(s, x, y):
    """Amplitude of the first-moment integral after integrations by parts."""
    a, w = _A(s), _W(s, y)
    return (-1j * a / w - (y / (4.0 * x)) * a * a / w**3) * _phase_factor(s, x, y)


def fcurve_integrand(s, x, y):
    """Normalized shape integrand; its |integral| is F[x, y]."""
    a, w = _A(s), _W(s, y)
    return (a / w) * (1.0 - 1j * (y / (4.0 * x)) * a / (w * w)) * _phase_factor(s, x, y)


def _rate_bracket(s, x, y):
    """d(Omega^2)/dt expressed in s units: (omega0^2 y / tau) * W * [bracket]."""
    a, w = _A(s), _W(s, y)
    ap = -2.0 * s / (1.0 + s * s) ** 2
    app = (6.0 * s * s - 2.0) / (1.0 + s * s) ** 3
    return 2.0 * a + (app / (2.0 * w * w) - 2.0 * y * a * ap / w**3
                      + 1.5 * y * y * a**3 / w**4) / (x * x)


def defining_first_moment_integrand(s, x, y):
    return s * _rate_bracket(s, x, y) * _phase_factor(s, x, y)


def zeroth_moment_integrand(s, x, y):
    return _rate_bracket(s, x, y) * _phase_factor(s, x, y)


# -- deterministic panel quadrature ------------------------------------------

def _panels(f: Callable, edges: np.ndarray, rule, rule_low) -> tuple[complex, float]:
    """Gauss-Legendre panel sum with an embedded lower-order error estimate."""
    xg, wg = rule
    xl, wl = rule_low
    mids = 0.5 * (edges[:-1] + edges[1:])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    nodes = mids[:, None] + halfs[:, None] * xg[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    per_panel = halfs * (vals @ wg)
    nodes_l = mids[:, None] + halfs[:, None] * xl[None, :]
    vals_l = f(nodes_l.ravel()).reshape(nodes_l.shape)
    per_panel_l = halfs * (vals_l @ wl)
    err = float(np.sum(np.abs(per_panel - per_panel_l)))
    return complex(np.sum(per_panel)), err


def _central_edges(x: float, y: float, s_lo: float, s_hi: float) -> np.ndarray:
    edges = [s_lo]
    s = s_lo
    while s < s_hi:
        step = MAX_PANEL_WIDTH
        if x > 0.0:
            step = min(step, PHASE_PER_PANEL / (2.0 * x * _W(s, y)))
        s = min(s + step, s_hi)
        edges.append(s)
    return np.asarray(edges)


def _ray_edges(u_max: float) -> np.ndarray:
    edges = [0.0]
    u = min(0.125, u_max / 4.0) if u_max > 0 else 0.0
    while u < u_max:
        edges.append(u)
        u *= 2.0
    edges.append(u_max)
    return np.asarray(edges)


def contour_integral(integrand: Callable, x: float, y: float,
                     s0: float = RAY_OFFSET) -> OscillatoryResult:
    """Integrate `integrand(s, x, y)` over the real line by contour rotation.

    Central part on [-s0, s0]; tails as int_{s0}^{inf} = -i int_0^inf f(s0-iu) du
    and int_{-inf}^{-s0} = +i int_0^inf f(-s0-iu) du.
    """
    if x <= 0.0:
        raise DomainError("x = omega0*tau must be > 0")
    if y < 0.0 or y > MAX_DELTA_RATIO:
        raise DomainError("y = delta/omega0 must lie in [0, 2/pi]")

    f = lambda s: integrand(s, x, y)
    value, err = _panels(f, _central_edges(x, y, -s0, s0), _GL16, _GL8)

    trunc = 0.0
    for sign in (+1.0, -1.0):
        kappa = 1.0 + sign * y * math.pi / 2.0
        if kappa < 1e-9:
            raise AccuracyError(
                "tail decay rate vanishes at y = 2/pi; the integral is not "
                "evaluable by this method", best_value=value, error_bound=math.inf)
        u_max = RAY_DECAY_CUT / (2.0 * x * kappa)
        g = lambda u: f(sign * s0 - 1j * u)
        ray_val, ray_err = _panels(g, _ray_edges(u_max), _GL24, _GL12)
        value += sign * (-1j) * ray_val
        err += ray_err
        # envelope bound on the neglected u > u_max remainder: |g| decays at
        # least like exp(-2 x kappa u) times an algebraically falling factor
        trunc += 2.0 * abs(g(np.asarray([u_max]))[0]) / (2.0 * x * kappa)

    return OscillatoryResult(value=value, abs_error_estimate=err, truncation_bound=trunc)


# -- public surface -----------------------------------------------------------

def f_curve_result(x: float, y: float, abs_tol: float | None = None) -> OscillatoryResult:
    """F[x, y] with error accounting; value holds the complex line integral."""
    res = contour_integral(fcurve_integrand, x, y)
    if abs_tol is not None and res.total_error > abs_tol:
        raise AccuracyError(
            f"requested accuracy {abs_tol:g} unattainable (bound {res.total_error:.3g})",
            best_value=abs(res.value), error_bound=res.total_error)
    return res


def f_curve(x: float, y: float, abs_tol: float | None = None) -> float:
    """Dimensionless protocol-shape curve F[x, y]; equals pi e^{-2x} at y = 0."""
    return abs(f_curve_result(x, y, abs_tol=abs_tol).value)


def _require_arctan_constant_rate(protocol: FrequencyProtocol, drive: DrivingSpec) -> tuple[float, float]:
    if protocol.kind != "arctan":
        raise ConfigurationError(
            "moment integrals are implemented for the arctan family only")
    # DrivingSpec holds a single theta_dot: the angle advances linearly, which
    # is the regime in which the zeroth moment vanishes identically.
    x = protocol.omega0 * protocol.tau
    y = protocol.delta / protocol.omega0
    return x, y


def integral_I0(protocol: FrequencyProtocol, drive: DrivingSpec) -> OscillatoryResult:
    """Zeroth-moment integral int dt (dOmega^2/dTheta) f^2 over the full line.

    For a linearly advancing angle this vanishes identically (double
    integration by parts); the returned value is the numerical residual and
    must be judged against abs_error_estimate + truncation_bound.
    """
    x, y = _require_arctan_constant_rate(protocol, drive)
    if y == 0.0:
        return OscillatoryResult(value=0.0 + 0.0j, abs_error_estimate=0.0, truncation_bound=0.0)
    res = contour_integral(zeroth_moment_integrand, x, y)
    scale = protocol.omega0 * y / (2.0 * drive.theta_dot)
    return OscillatoryResult(value=scale * res.value,
                             abs_error_estimate=abs(scale) * res.abs_error_estimate,
                             truncation_bound=abs(scale) * res.truncation_bound)


def integral_I1(protocol: FrequencyProtocol, drive: DrivingSpec,
                form: str = "reduced") -> OscillatoryResult:
    """First-moment integral int dt t (dOmega^2/dTheta) f^2 over the full line.

    form="reduced" uses the integrated-by-parts amplitude (absolutely
    convergent tails); form="defining" integrates the literal first moment.
    Both share the phase convention Phi(0) = 0 and agree as complex numbers.
    """
    x, y = _require_arctan_constant_rate(protocol, drive)
    if y == 0.0:
        return OscillatoryResult(value=0.0 + 0.0j, abs_error_estimate=0.0, truncation_bound=0.0)
    if form == "reduced":
        res = contour_integral(reduced_first_moment_integrand, x, y)
        scale = y / drive.theta_dot
    elif form == "defining":
        res = contour_integral(defining_first_moment_integrand, x, y)
        scale = x * y / (2.0 * drive.theta_dot)
    else:
        raise ConfigurationError(f"unknown I1 form {form!r}")
    return OscillatoryResult(value=scale * res.value,
                             abs_error_estimate=abs(scale) * res.abs_error_estimate,
                             truncation_bound=abs(scale) * res.truncation_bound)


def window_moment_integrals(protocol: FrequencyProtocol, drive: DrivingSpec,
                            window: tuple[float, float] | None = None,
                            phase_per_panel: float = PHASE_PER_PANEL) -> tuple[complex, complex]:
    """(I0, I1) restricted to a finite window, in the mode phase convention.

    Direct t-space panel quadrature of (dOmega^2/dt / theta_dot) f^2 with the
    adiabatic mode referenced to t_start (f(t_start) real positive), matching
    the Cauchy data used by the mode solver.  Used by the Monte Carlo oracle
    for its per-sample linear predictions and by the time-domain cross-check
    of the cost coefficients.
    """
    if window is None:
        window = protocol.window
    t0, t1 = float(window[0]), float(window[1])
    phi0 = protocol.phase_integral(t0)

    def integrands(t):
        w = protocol.omega(t)
        g = protocol.counterdiabatic_rate(t) / drive.theta_dot
        f2 = np.exp(-2j * (protocol.phase_integral(t) - phi0)) / (2.0 * w)
        return g * f2

    edges = [t0]
    t = t0
    width_cap = 0.5 * protocol.time_scale()
    while t < t1:
        w = float(protocol.omega(t))
        t = min(t + min(phase_per_panel / (2.0 * w), width_cap), t1)
        edges.append(t)
    edges = np.asarray(edges)
    i0, _ = _panels(integrands, edges, _GL16, _GL8)
    i1, _ = _panels(lambda t: t * integrands(t), edges, _GL16, _GL8)
    return i0, i1
