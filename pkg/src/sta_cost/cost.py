"""Cost of the counterdiabatic drive: kernels, coefficients, and excitation.

The driving fluctuation enters through two-time kernels

    N(t, t') = <v0^2> + <P0^2> t t' / M^2        (noise, symmetric)
    D(t, t') = (t - t') H(t - t') / (2M)          (dissipation, causal)

and collapses into two dimensionless coefficients built from the zeroth and
first moment integrals I0, I1 of the rate of change of the drive frequency:

    nu = 2 <v0^2> |I0|^2 + 2 <P0^2> |I1|^2 / M^2
    mu = i hbar (I1 I0* - I0 I1*) / (8 M)         (real by construction)

An initial n-eigenstate acquires first-order weights on n +- 2:

    p_down = (nu + mu/2) n (n-1) / 2,   p_up = (nu - mu/2) (n+1)(n+2) / 2,

so the mean occupation shifts by delta_n = 2 nu (2n+1) - mu (n^2 + n + 1)
= 2 (p_up - p_down), and the injected energy is delta_n * hbar * omega(t_end).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .driving import DrivingSpec
from .errors import ConfigurationError
from .oscillatory import (
    OscillatoryResult,
    f_curve,
    integral_I0,
    integral_I1,
    window_moment_integrals,
)
from .protocol import FrequencyProtocol, SystemSpec

PERTURBATIVE_WEIGHT_LIMIT = 0.1


@dataclass(frozen=True)
class CostReport:
    nu: float
    mu: float
    delta_n: float
    delta_W: float
    p_down: float
    p_up: float
    n_initial: int
    perturbative_ok: bool
    adiabatic_ok: bool

    def to_dict(self) -> dict:
        return {
            "nu": self.nu,
            "mu": self.mu,
            "delta_n": self.delta_n,
            "delta_W": self.delta_W,
            "p_up": self.p_up,
            "p_down": self.p_down,
            "n_initial": self.n_initial,
            "perturbative_ok": self.perturbative_ok,
            "adiabatic_ok": self.adiabatic_ok,
        }


def noise_kernel(drive: DrivingSpec, t, t_prime):
    """Symmetric fluctuation correlator of the free angle at (t, t')."""
    return drive.var_theta0 + drive.var_P0 * np.multiply(t, t_prime) / drive.M**2


def dissipation_kernel(drive: DrivingSpec, t, t_prime):
    """Causal commutator kernel (t - t') H(t - t') / (2M); zero for t <= t'."""
    dt = np.subtract(t, t_prime)
    return np.where(dt > 0.0, dt, 0.0) / (2.0 * drive.M)


def _settled_moments(protocol: FrequencyProtocol, drive: DrivingSpec
                     ) -> tuple[OscillatoryResult, OscillatoryResult]:
    """(I0, I1) with I0 snapped to zero when compatible with zero.

    For a linearly advancing angle I0 vanishes identically; the quadrature
    returns a roundoff-scale residual, which would otherwise leak into mu.
    """
    i0 = integral_I0(protocol, drive)
    i1 = integral_I1(protocol, drive, form="reduced")
    if abs(i0.value) <= i0.total_error:
        i0 = OscillatoryResult(value=0.0 + 0.0j,
                               abs_error_estimate=i0.abs_error_estimate,
                               truncation_bound=i0.truncation_bound)
    return i0, i1


def nu_mu(protocol: FrequencyProtocol, drive: DrivingSpec,
          system: SystemSpec | None = None) -> tuple[float, float]:
    """Cost coefficients from the factorized moment integrals."""
    hbar = system.hbar if system is not None else 1.0
    i0, i1 = _settled_moments(protocol, drive)
    return nu_mu_from_moments(i0.value, i1.value, drive, hbar=hbar)


def nu_mu_from_moments(i0: complex, i1: complex, drive: DrivingSpec,
                       hbar: float = 1.0) -> tuple[float, float]:
    nu = (2.0 * drive.var_theta0 * abs(i0) ** 2
          + 2.0 * drive.var_P0 * abs(i1) ** 2 / drive.M**2)
    # i (z - z*) = -2 Im z, manifestly real
    mu = (hbar / (8.0 * drive.M)) * (-2.0) * (i1 * np.conj(i0)).imag
    return float(nu), float(mu)


def transition_probabilities(nu: float, mu: float, n: int) -> tuple[float, float]:
    """(p_down, p_up): first-order weights to the n-2 and n+2 states.

    These are probabilities only in the perturbative regime; a warning is
    emitted when the total weight exceeds PERTURBATIVE_WEIGHT_LIMIT or a weight
    comes out negative.  Values are returned regardless, for diagnostics.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    p_down = 0.5 * (nu + 0.5 * mu) * n * (n - 1) if n >= 2 else 0.0
    p_up = 0.5 * (nu - 0.5 * mu) * (n + 1) * (n + 2)
    if p_down < 0.0 or p_up < 0.0:
        warnings.warn(
            f"negative first-order weight (p_down={p_down:.3g}, p_up={p_up:.3g}); "
            "outside perturbative validity", stacklevel=2)
    if p_down + p_up > PERTURBATIVE_WEIGHT_LIMIT:
        warnings.warn(
            f"total transition weight {p_down + p_up:.3g} exceeds "
            f"{PERTURBATIVE_WEIGHT_LIMIT}; first-order result unreliable", stacklevel=2)
    return float(p_down), float(p_up)


def delta_n(nu: float, mu: float, n: int) -> float:
    """Mean occupation change 2 nu (2n+1) - mu (n^2+n+1) of an n-eigenstate."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return 2.0 * nu * (2 * n + 1) - mu * (n * n + n + 1)


def is_adiabatic(dn: float) -> bool:
    return abs(dn) < 1.0


def extra_work(dn: float, protocol: FrequencyProtocol,
               system: SystemSpec | None = None) -> float:
    """Energy injected beyond the adiabatic target: delta_n * hbar * omega(t_end)."""
    hbar = system.hbar if system is not None else 1.0
    return float(dn * hbar * protocol.omega(protocol.window[1]))


def nu_estimate(protocol: FrequencyProtocol, drive: DrivingSpec,
                mode: str = "fcurve", system: SystemSpec | None = None) -> float:
    """Order-of-magnitude estimate of nu from the uncertainty-limited drive.

    Uses <P0^2>/(2M) ~ hbar/tau and M theta_dot^2/2 ~ H_D, which collapse the
    exact expression to 2 F^2[x, y] y^2 hbar/(H_D tau).  mode="closed_form"
    replaces F by its large-x asymptote pi e^{-2x}.
    """
    if protocol.kind != "arctan":
        raise ConfigurationError("nu_estimate requires the arctan family")
    if drive.H_D <= 0.0 or protocol.tau <= 0.0:
        raise ConfigurationError("nu_estimate requires H_D > 0 and tau > 0")
    hbar = system.hbar if system is not None else 1.0
    x = protocol.omega0 * protocol.tau
    y = protocol.delta / protocol.omega0
    scale = y * y * hbar / (drive.H_D * protocol.tau)
    if y == 0.0:
        return 0.0
    if mode == "fcurve":
        return 2.0 * f_curve(x, y) ** 2 * scale
    if mode == "closed_form":
        return 2.0 * math.pi**2 * math.exp(-4.0 * x) * scale
    raise ConfigurationError(f"unknown nu_estimate mode {mode!r}")


def build_cost_report(protocol: FrequencyProtocol, drive: DrivingSpec,
                      system: SystemSpec | None = None, n: int = 0
                      ) -> tuple[CostReport, OscillatoryResult, OscillatoryResult]:
    """Full cost pipeline; returns the report plus the moment-integral provenance."""
    hbar = system.hbar if system is not None else 1.0
    i0, i1 = _settled_moments(protocol, drive)
    nu, mu = nu_mu_from_moments(i0.value, i1.value, drive, hbar=hbar)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p_down, p_up = transition_probabilities(nu, mu, n)
    dn = delta_n(nu, mu, n)
    dW = extra_work(dn, protocol, system)
    return (
        CostReport(nu=nu, mu=mu, delta_n=dn, delta_W=dW, p_down=p_down, p_up=p_up,
                   n_initial=n, perturbative_ok=(p_down + p_up) <= PERTURBATIVE_WEIGHT_LIMIT,
                   adiabatic_ok=is_adiabatic(dn)),
        i0, i1,
    )


# -- slow time-domain cross-check (test oracle) ------------------------------

def nu_time_domain_oracle(protocol: FrequencyProtocol, drive: DrivingSpec,
                          window: tuple[float, float] | None = None,
                          phase_per_panel: float = math.pi / 4.0,
                          nodes_per_panel: int = 12) -> float:
    """nu as a literal double time integral over the window, no factorization.

    Assembles N(t, t') pointwise on a tensor grid and contracts it against
    (dOmega^2/dTheta)(t) f^2(t) (dOmega^2/dTheta)(t') f*^2(t') + cc.  Validates
    the factorized nu end to end; quadratic cost in the node count, test use
    only.  Compare against nu_from_window_moments on the same window.
    """
    if window is None:
        window = protocol.window
    t0, t1 = float(window[0]), float(window[1])

    edges = [t0]
    t = t0
    width_cap = 0.5 * protocol.time_scale()
    while t < t1:
        w = float(protocol.omega(t))
        t = min(t + min(phase_per_panel / (2.0 * w), width_cap), t1)
        edges.append(t)
    edges = np.asarray(edges)
    xg, wg = leggauss_cached(nodes_per_panel)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halfs[:, None] * xg[None, :]).ravel()
    weights = (halfs[:, None] * wg[None, :]).ravel()

    phi0 = protocol.phase_integral(t0)
    g = protocol.counterdiabatic_rate(nodes) / drive.theta_dot
    f2 = np.exp(-2j * (protocol.phase_integral(nodes) - phi0)) / (2.0 * protocol.omega(nodes))
    a = weights * g * f2  # quadrature-weighted (dOmega^2/dTheta) f^2 at nodes
    a_conj = np.conj(a)
    double = 0.0 + 0.0j
    # row blocks keep the pointwise kernel matrix at a bounded footprint
    for lo in range(0, nodes.size, 512):
        hi = min(lo + 512, nodes.size)
        kernel_rows = noise_kernel(drive, nodes[lo:hi, None], nodes[None, :])
        double += a[lo:hi] @ (kernel_rows @ a_conj)
    return float(2.0 * double.real)


def nu_from_window_moments(protocol: FrequencyProtocol, drive: DrivingSpec,
                           window: tuple[float, float] | None = None) -> float:
    """Factorized nu with the moment integrals restricted to the same window."""
    i0, i1 = window_moment_integrals(protocol, drive, window)
    return (2.0 * drive.var_theta0 * abs(i0) ** 2
            + 2.0 * drive.var_P0 * abs(i1) ** 2 / drive.M**2)


def leggauss_cached(n: int):
    if n not in _LEGGAUSS_CACHE:
        _LEGGAUSS_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _LEGGAUSS_CACHE[n]


_LEGGAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}
