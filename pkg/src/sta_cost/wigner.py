"""Phase-space eigenfunctions of the oscillator on the action variable.

The n-th eigenstate's Wigner function depends only on the action J and reads

    f_n(J) = 2 (-1)^n e^{-s/2} L_n(s),      s = 4 J / hbar,

with L_n the Laguerre polynomial, normalized so f_n(0) = 2 (-1)^n.  It solves

    (hbar/4) [J F'' + F'] + [n + 1/2 - J/hbar] F = 0.

Everything here is built on the three-term recursion

    (n+1) L_{n+1} + (s - 2n - 1) L_n + n L_{n-1} = 0,

with derivatives from s L_n' = n (L_n - L_{n-1}) and the Laguerre ODE, so all
residual checks run at analytic accuracy (no finite differences on the hot
path).

The energy-collapsed first-order correction to F_n is the differential
operator applied by `final_state_correction`.  Its projection onto the basis
{F_{n-2}, F_n, F_{n+2}} carries the transition weights

    c_{n+2} = (nu - mu/2)(n+1)(n+2)/2,   c_{n-2} = (nu + mu/2) n(n-1)/2,

with the diagonal fixed by weight conservation, c_n = -(c_{n-2} + c_{n+2}).
The nu term of the operator carries a factor 2 relative to the mu terms; this
normalization is what makes the induced weights match the occupation shift
delta_n = 2 nu (2n+1) - mu (n^2+n+1) and keeps the correction traceless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_laguerre

from .errors import ConfigurationError, DecompositionError

MAX_LAGUERRE_DEGREE = 200
PROJECTION_NODES = 128  # Gauss-Laguerre; largest node ~ 485 keeps e^{+s} finite
OFF_BASIS_TOLERANCE = 1e-6


def laguerre(n: int, s):
    """L_n(s) by upward three-term recursion; exact L_n(0) = 1."""
    if n < 0:
        raise ConfigurationError("Laguerre degree must be >= 0")
    if n > MAX_LAGUERRE_DEGREE:
        raise ConfigurationError(
            f"Laguerre degree {n} > {MAX_LAGUERRE_DEGREE}: recursion accuracy unvalidated")
    s = np.asarray(s, dtype=float)
    prev = np.ones_like(s)
    if n == 0:
        return prev
    cur = 1.0 - s
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - s) * cur - k * prev) / (k + 1)
    return cur


def laguerre_pair(n: int, s):
    """(L_n, L_{n-1}); L_{-1} is returned as zeros."""
    s = np.asarray(s, dtype=float)
    if n == 0:
        return np.ones_like(s), np.zeros_like(s)
    prev = np.ones_like(s)
    cur = 1.0 - s
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - s) * cur - k * prev) / (k + 1)
    return cur, prev


def laguerre_derivatives(n: int, s):
    """(L_n', L_n'', L_n''') from the derivative recursion and the Laguerre ODE.

    s L' = n (L - L_{n-1}); the ODE s L'' + (1-s) L' + n L = 0 supplies L'' and,
    after one differentiation, s L''' = (s-2) L'' + (1-n) L'.  Requires s > 0.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise ConfigurationError("derivative recursion requires s > 0")
    ln, lm = laguerre_pair(n, s)
    if n == 0:
        z = np.zeros_like(s)
        return z, z, z
    d1 = n * (ln - lm) / s
    d2 = ((s - 1.0) * d1 - n * ln) / s
    d3 = ((s - 2.0) * d2 + (1.0 - n) * d1) / s
    return d1, d2, d3


@dataclass(frozen=True)
class WignerEigenstate:
    """f_n(J) = 2 (-1)^n e^{-s/2} L_n(s) with s = 4J/hbar."""

    n: int
    hbar: float = 1.0

    def __post_init__(self):
        if self.n < 0:
            raise ConfigurationError("quantum number n must be >= 0")
        if self.hbar <= 0.0:
            raise ConfigurationError("hbar must be > 0")

    def _s(self, J):
        return 4.0 * np.asarray(J, dtype=float) / self.hbar

    def evaluate(self, J):
        s = self._s(J)
        return 2.0 * (-1.0) ** self.n * np.exp(-0.5 * s) * laguerre(self.n, s)

    def derivatives(self, J):
        """(F, dF/dJ, d2F/dJ2, d3F/dJ3) at J > 0, all analytic."""
        s = self._s(J)
        ln, _ = laguerre_pair(self.n, s)
        d1, d2, d3 = laguerre_derivatives(self.n, s)
        e = np.exp(-0.5 * s)
        pref = 2.0 * (-1.0) ** self.n
        F = pref * e * ln
        Fs1 = pref * e * (d1 - 0.5 * ln)
        Fs2 = pref * e * (d2 - d1 + 0.25 * ln)
        Fs3 = pref * e * (d3 - 1.5 * d2 + 0.75 * d1 - 0.125 * ln)
        c = 4.0 / self.hbar
        return F, c * Fs1, c * c * Fs2, c**3 * Fs3

    def ode_residual(self, J) -> np.ndarray:
        """(hbar/4)(J F'' + F') + (n + 1/2 - J/hbar) F, pointwise."""
        F, F1, F2, _ = self.derivatives(J)
        J = np.asarray(J, dtype=float)
        return (self.hbar / 4.0) * (J * F2 + F1) + (self.n + 0.5 - J / self.hbar) * F


@dataclass(frozen=True)
class RecursionReport:
    """Scaled max residuals of the three action recursions over a J grid."""

    n: int
    residual_value: float      # J F_n vs (hbar/4)[(2n+1) F_n + n F_{n-1} + (n+1) F_{n+1}]
    residual_derivative: float  # J F_n' vs [n F_{n-1} - F_n - (n+1) F_{n+1}]/2
    residual_second: float     # (hbar J/4) F_n'' vs (J/hbar - n - 1/2) F_n - (hbar/4) F_n'

    @property
    def max_residual(self) -> float:
        return max(self.residual_value, self.residual_derivative, self.residual_second)


def verify_recursions(n: int, J_grid, hbar: float = 1.0) -> RecursionReport:
    """Evaluate all three recursion identities with analytic derivatives.

    Residuals are scaled by the grid maximum of the identity's own terms, so
    the report is invariant under rescaling of J or hbar.  n = 0 is allowed:
    the down-terms vanish identically.
    """
    J = np.asarray(J_grid, dtype=float)
    if np.any(J <= 0.0):
        raise ConfigurationError("J grid must be positive")
    state = WignerEigenstate(n, hbar)
    up = WignerEigenstate(n + 1, hbar)
    F, F1, F2, _ = state.derivatives(J)
    Fu = up.evaluate(J)
    Fd = WignerEigenstate(n - 1, hbar).evaluate(J) if n >= 1 else np.zeros_like(J)

    lhs1 = J * F
    rhs1 = (hbar / 4.0) * ((2 * n + 1) * F + n * Fd + (n + 1) * Fu)
    lhs2 = J * F1
    rhs2 = 0.5 * (n * Fd - F - (n + 1) * Fu)
    lhs3 = (hbar * J / 4.0) * F2
    rhs3 = (J / hbar - n - 0.5) * F - (hbar / 4.0) * F1

    def scaled(lhs, rhs):
        scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), 1e-300)
        return float(np.max(np.abs(lhs - rhs))) / scale

    return RecursionReport(
        n=n,
        residual_value=scaled(lhs1, rhs1),
        residual_derivative=scaled(lhs2, rhs2),
        residual_second=scaled(lhs3, rhs3),
    )


def final_state_correction(n: int, nu: float, mu: float, J, hbar: float = 1.0) -> np.ndarray:
    """Energy-collapsed first-order correction to F_n, evaluated on J > 0.

    2 nu J [F' + (J F')'] + (mu J/hbar) [F + (J F)' + (hbar^2/4)(F'' + (J F'')')]

    expanded through analytic derivatives; the factor 2 on the nu term is the
    normalization that reproduces the n +- 2 weights and keeps the correction
    traceless (see module docstring).
    """
    state = WignerEigenstate(n, hbar)
    F, F1, F2, F3 = state.derivatives(J)
    J = np.asarray(J, dtype=float)
    nu_part = 2.0 * nu * (2.0 * J * F1 + J * J * F2)
    mu_part = (mu / hbar) * (2.0 * J * F + J * J * F1
                             + (hbar**2 / 4.0) * (2.0 * J * F2 + J * J * F3))
    return nu_part + mu_part


@dataclass(frozen=True)
class DecompositionResult:
    n: int
    coefficients: dict  # m -> coefficient on F_m, m in {n-2, n, n+2} (n>=2) or {n, n+2}
    off_basis_residual: float

    def coefficient(self, m: int) -> float:
        return self.coefficients.get(m, 0.0)


def final_state_decomposition(n: int, nu: float, mu: float,
                              hbar: float = 1.0) -> DecompositionResult:
    """Project the numeric correction onto {F_{n-2}, F_n, F_{n+2}}.

    The basis is orthogonal in the plain ds inner product on s in (0, inf)
    (each F_m carries e^{-s/2}), with <F_m, F_m> = 4, so the least-squares
    projection reduces to three inner products.  These are polynomials times
    e^{-s} and are evaluated exactly by Gauss-Laguerre quadrature.

    Raises DecompositionError when the off-basis residual exceeds
    OFF_BASIS_TOLERANCE relative to the correction's norm.
    """
    if n < 0:
        raise ConfigurationError("n must be >= 0")
    nodes, weights = roots_laguerre(PROJECTION_NODES)
    lifted = weights * np.exp(nodes)  # plain-measure weights on the GL nodes
    J = hbar * nodes / 4.0
    corr = final_state_correction(n, nu, mu, J, hbar=hbar)

    members = [m for m in (n - 2, n, n + 2) if m >= 0]
    coefficients = {}
    resid = corr.astype(float).copy()
    for m in members:
        Fm = WignerEigenstate(m, hbar).evaluate(J)
        # <corr, F_m>_s / <F_m, F_m>_s with <F_m, F_m>_s = 4 exactly
        c = float(np.sum(lifted * corr * Fm)) / 4.0
        coefficients[m] = c
        resid -= c * Fm
    norm_corr = math.sqrt(max(float(np.sum(lifted * corr * corr)), 0.0))
    norm_resid = math.sqrt(max(float(np.sum(lifted * resid * resid)), 0.0))
    off = norm_resid / norm_corr if norm_corr > 0.0 else 0.0
    if norm_corr > 0.0 and off > OFF_BASIS_TOLERANCE:
        raise DecompositionError(
            f"correction leaves relative off-basis residual {off:.3g} "
            f"(> {OFF_BASIS_TOLERANCE:g}) outside span(F_n, F_n+-2)", residual=off)
    return DecompositionResult(n=n, coefficients=coefficients, off_basis_residual=off)


def expected_weights(n: int, nu: float, mu: float) -> dict:
    """Closed-form projection coefficients implied by the n +- 2 weights."""
    c_up = 0.5 * (nu - 0.5 * mu) * (n + 1) * (n + 2)
    c_down = 0.5 * (nu + 0.5 * mu) * n * (n - 1)
    out = {n + 2: c_up, n: -(c_up + c_down)}
    if n >= 2:
        out[n - 2] = c_down
    return out
