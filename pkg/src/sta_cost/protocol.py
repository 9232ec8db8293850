"""Frequency protocols, their derivatives, and the counterdiabatic frequency.

A protocol is the schedule omega(t) of the oscillator frequency.  The arctan
family

    omega(t) = omega0 + delta * arctan(t / tau)

has closed-form derivatives and a closed-form phase integral

    int_0^t omega dt' = omega0*tau*{ (1 + (delta/omega0) arctan(t/tau)) * t/tau
                                     - (delta/2 omega0) * ln(1 + (t/tau)^2) }.

The counterdiabatic frequency is the modified squared frequency for which the
adiabatic (WKB) mode of omega(t) solves the oscillator equation exactly:

    Omega^2 = omega^2 + (1/2) * ( wdd/omega - (3/2) (wd/omega)^2 ).

Tabulated protocols interpolate (t, omega) samples with a quintic spline so
the third derivative needed by the counterdiabatic rate is continuous.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, ValidityError

# Window half-width in units of tau, and tolerated edge slope |wd| relative to
# omega0/tau.  At the default window the arctan slope has decayed by 1/(1+c^2);
# protocols with delta/omega0 > (1+c^2)*EDGE_TOLERANCE trip the edge warning.
DEFAULT_WINDOW_SCALE = 20.0
EDGE_TOLERANCE = 1e-3

# Allowed relative undershoot of Omega^2 before a validity error is raised.
OMEGA2_TOLERANCE = 1e-9

# Positivity of omega over the full arctan range requires delta/omega0 <= 2/pi.
MAX_DELTA_RATIO = 2.0 / math.pi

MIN_TABULATED_SAMPLES = 8


@dataclass(frozen=True)
class SystemSpec:
    """Oscillator mass and the value of hbar in the chosen unit system."""

    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ConfigurationError("system.mass must be > 0")
        if self.hbar <= 0.0:
            raise ConfigurationError("system.hbar must be > 0")

    @classmethod
    def from_dict(cls, d: dict) -> "SystemSpec":
        return cls(mass=float(d.get("mass", 1.0)), hbar=float(d.get("hbar", 1.0)))

    def to_dict(self) -> dict:
        return {"mass": self.mass, "hbar": self.hbar}


@dataclass(frozen=True)
class FrequencyProtocol:
    """A frequency schedule omega(t) on a finite window.

    kind is "arctan" or "tabulated".  For the arctan family the window defaults
    to [-c*tau, +c*tau] with c = DEFAULT_WINDOW_SCALE; the schedule formally has
    infinite support, so a finite window can satisfy the settled-edge condition
    wd(t_edge) ~ 0 only approximately (see edge_flags).

    allow_inverted skips the Omega^2 >= 0 requirement; the mode solver is
    indifferent to the sign, but the counterdiabatic interpretation is lost.
    """

    kind: str
    omega0: float = 1.0
    delta: float = 0.0
    tau: float = 1.0
    window: tuple[float, float] = (0.0, 0.0)
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)
    allow_inverted: bool = False

    # spline objects for tabulated protocols, built once in __post_init__
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("arctan", "tabulated"):
            raise ConfigurationError(f"unknown protocol kind {self.kind!r}")
        if self.kind == "arctan":
            if self.omega0 <= 0.0:
                raise ConfigurationError("protocol.omega0 must be > 0")
            if self.tau <= 0.0:
                raise ConfigurationError("protocol.tau must be > 0")
            if self.delta < 0.0:
                raise ConfigurationError("protocol.delta must be >= 0")
            if self.delta / self.omega0 > MAX_DELTA_RATIO * (1.0 + 1e-12):
                raise ValidityError(
                    f"delta/omega0 = {self.delta / self.omega0:.6g} exceeds 2/pi; "
                    "omega(t) would turn negative"
                )
            bound = math.sqrt(0.75) * self.delta / self.omega0
            if not self.allow_inverted and self.omega0 * self.tau < bound * (1.0 - 1e-12):
                raise ValidityError(
                    f"omega0*tau = {self.omega0 * self.tau:.6g} below the counterdiabatic "
                    f"positivity bound sqrt(3/4)*delta/omega0 = {bound:.6g}"
                )
            if self.window == (0.0, 0.0):
                c = DEFAULT_WINDOW_SCALE * self.tau
                object.__setattr__(self, "window", (-c, c))
        else:
            if self.samples is None:
                raise ConfigurationError("tabulated protocol requires samples")
            samples = np.asarray(self.samples, dtype=float)
            if samples.ndim != 2 or samples.shape[1] != 2:
                raise ConfigurationError("samples must be an array of (t, omega) pairs")
            if samples.shape[0] < MIN_TABULATED_SAMPLES:
                raise ConfigurationError(
                    f"tabulated protocol needs at least {MIN_TABULATED_SAMPLES} samples, "
                    f"got {samples.shape[0]}"
                )
            t = samples[:, 0]
            if np.any(np.diff(t) <= 0):
                raise ConfigurationError("sample times must be strictly increasing")
            if np.any(samples[:, 1] <= 0):
                raise ConfigurationError("sampled omega values must be > 0")
            object.__setattr__(self, "samples", samples)
            if self.window == (0.0, 0.0):
                object.__setattr__(self, "window", (float(t[0]), float(t[-1])))
            if self.window[0] < t[0] or self.window[1] > t[-1]:
                raise ConfigurationError("window exceeds the sampled time range")
            from scipy.interpolate import make_interp_spline

            object.__setattr__(self, "_spline", make_interp_spline(t, samples[:, 1], k=5))
        if not self.window[1] > self.window[0]:
            raise ConfigurationError("window must satisfy t_start < t_end")

    # -- constructors ------------------------------------------------------

    @classmethod
    def arctan_family(cls, omega0: float, delta: float, tau: float,
                      window: tuple[float, float] | None = None,
                      allow_inverted: bool = False) -> "FrequencyProtocol":
        return cls(kind="arctan", omega0=omega0, delta=delta, tau=tau,
                   window=tuple(window) if window is not None else (0.0, 0.0),
                   allow_inverted=allow_inverted)

    @classmethod
    def tabulated(cls, samples, window: tuple[float, float] | None = None) -> "FrequencyProtocol":
        arr = np.asarray(samples, dtype=float)
        return cls(kind="tabulated", samples=arr,
                   window=tuple(window) if window is not None else (0.0, 0.0))

    @classmethod
    def from_dict(cls, d: dict) -> "FrequencyProtocol":
        kind = d.get("kind")
        if kind == "arctan":
            for key in ("omega0", "delta", "tau"):
                if key not in d:
                    raise ConfigurationError(f"protocol: missing field {key!r}")
            return cls.arctan_family(
                float(d["omega0"]), float(d["delta"]), float(d["tau"]),
                window=d.get("window"), allow_inverted=bool(d.get("allow_inverted", False)))
        if kind == "tabulated":
            if "samples" not in d:
                raise ConfigurationError("protocol: missing field 'samples'")
            return cls.tabulated(d["samples"], window=d.get("window"))
        raise ConfigurationError(f"protocol: unknown kind {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "arctan":
            return {"kind": "arctan", "omega0": self.omega0, "delta": self.delta,
                    "tau": self.tau, "window": list(self.window)}
        return {"kind": "tabulated", "samples": self.samples.tolist(),
                "window": list(self.window)}

    def with_window(self, window: tuple[float, float]) -> "FrequencyProtocol":
        if self.kind == "arctan":
            return FrequencyProtocol.arctan_family(
                self.omega0, self.delta, self.tau, window=window,
                allow_inverted=self.allow_inverted)
        return FrequencyProtocol.tabulated(self.samples, window=window)

    # -- evaluation --------------------------------------------------------

    def _check_window(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.window
        eps = 1e-9 * (hi - lo)
        if np.any(t < lo - eps) or np.any(t > hi + eps):
            bad = float(np.atleast_1d(t)[np.argmax((t < lo - eps) | (t > hi + eps))])
            raise DomainError(f"t = {bad:.6g} outside window [{lo:.6g}, {hi:.6g}]")
        return t

    def omega(self, t):
        """omega(t); accepts scalars or arrays."""
        t = self._check_window(t)
        if self.kind == "arctan":
            return self.omega0 + self.delta * np.arctan(t / self.tau)
        return self._spline(t)

    def omega_derivatives(self, t):
        """Return (omega, wd, wdd, wddd) at t."""
        t = self._check_window(t)
        if self.kind == "arctan":
            s = t / self.tau
            one = 1.0 + s * s
            w = self.omega0 + self.delta * np.arctan(s)
            wd = (self.delta / self.tau) / one
            wdd = -(self.delta / self.tau**2) * 2.0 * s / one**2
            wddd = (self.delta / self.tau**3) * (6.0 * s * s - 2.0) / one**3
            return w, wd, wdd, wddd
        sp = self._spline
        return sp(t), sp.derivative(1)(t), sp.derivative(2)(t), sp.derivative(3)(t)

    def counterdiabatic_frequency(self, t):
        """Omega^2(t) = omega^2 + (wdd/omega - (3/2)(wd/omega)^2)/2.

        Raises ValidityError on values below -OMEGA2_TOLERANCE*omega_scale^2
        unless the protocol was built with allow_inverted.
        """
        w, wd, wdd, _ = self.omega_derivatives(t)
        omega2 = w * w + 0.5 * (wdd / w - 1.5 * (wd / w) ** 2)
        if not self.allow_inverted:
            floor = -OMEGA2_TOLERANCE * self.frequency_scale() ** 2
            bad = np.asarray(omega2) < floor
            if np.any(bad):
                tb = float(np.atleast_1d(t)[np.argmax(np.atleast_1d(bad))])
                vb = float(np.atleast_1d(omega2)[np.argmax(np.atleast_1d(bad))])
                raise ValidityError(
                    f"Omega^2 = {vb:.6g} < 0 at t = {tb:.6g}; counterdiabatic drive "
                    "is not realizable (use allow_inverted to override)",
                    offending_t=tb, value=vb)
        return omega2

    def counterdiabatic_rate(self, t):
        """d(Omega^2)/dt in closed form.

        Equals 2*omega*(wd + d/dt[(1/omega) d/dt(wd/omega)]/4), expanded so no
        numerical differentiation is involved.
        """
        w, wd, wdd, wddd = self.omega_derivatives(t)
        return 2.0 * w * wd + wddd / (2.0 * w) - 2.0 * wd * wdd / w**2 + 1.5 * wd**3 / w**3

    def phase_integral(self, t):
        """int_0^t omega dt' (closed form for the arctan family)."""
        t = self._check_window(t)
        if self.kind == "arctan":
            s = t / self.tau
            y = self.delta / self.omega0
            return self.omega0 * self.tau * (
                (1.0 + y * np.arctan(s)) * s - 0.5 * y * np.log1p(s * s))
        anti = self._spline.antiderivative()
        return anti(t) - anti(0.0 if self.window[0] <= 0.0 <= self.window[1] else self.window[0])

    def counterdiabatic_frequency_fn(self):
        """Scalar fast path for Omega^2(t), for ODE right-hand sides.

        Skips window checks and positivity flags (validate separately with
        validate_counterdiabatic); for the arctan family this is pure
        closed-form arithmetic, an order of magnitude cheaper per call than
        the array-general method.
        """
        if self.kind != "arctan":
            return lambda t: float(self.counterdiabatic_frequency(t))
        w0, delta, tau = self.omega0, self.delta, self.tau

        def omega2(t: float) -> float:
            s = t / tau
            one = 1.0 + s * s
            w = w0 + delta * math.atan(s)
            wd = (delta / tau) / one
            wdd = -(delta / tau**2) * 2.0 * s / (one * one)
            return w * w + 0.5 * (wdd / w - 1.5 * (wd / w) ** 2)

        return omega2

    def frequency_scale(self) -> float:
        return self.omega0 if self.kind == "arctan" else float(np.max(self.samples[:, 1]))

    def time_scale(self) -> float:
        return self.tau if self.kind == "arctan" else float(
            (self.window[1] - self.window[0]) / DEFAULT_WINDOW_SCALE)

    # -- validity ----------------------------------------------------------

    def edge_flags(self, edge_tolerance: float = EDGE_TOLERANCE) -> list[str]:
        """Check |wd| <= edge_tolerance * scale at both window ends.

        Returns human-readable flags (empty when the edges are settled).  The
        reference slope scale is omega0/tau for the arctan family.
        """
        flags = []
        scale = self.frequency_scale() / self.time_scale()
        for name, t_edge in (("t_start", self.window[0]), ("t_end", self.window[1])):
            wd = self.omega_derivatives(t_edge)[1]
            if abs(wd) > edge_tolerance * scale:
                flags.append(
                    f"|wd({name})| = {abs(wd):.3g} exceeds {edge_tolerance:g} * "
                    f"omega_scale/time_scale = {edge_tolerance * scale:.3g}")
        return flags

    def omega2_minimum(self, n_grid: int = 4001) -> tuple[float, float]:
        """Scan the window for the minimum of Omega^2; returns (t_min, value).

        Grid scan plus golden-section refinement around the best grid point.
        """
        lo, hi = self.window
        t = np.linspace(lo, hi, n_grid)
        w, wd, wdd, _ = self.omega_derivatives(t)
        omega2 = w * w + 0.5 * (wdd / w - 1.5 * (wd / w) ** 2)
        i = int(np.argmin(omega2))
        a = t[max(i - 1, 0)]
        b = t[min(i + 1, n_grid - 1)]
        from scipy.optimize import minimize_scalar

        def val(tt):
            w, wd, wdd, _ = self.omega_derivatives(tt)
            return w * w + 0.5 * (wdd / w - 1.5 * (wd / w) ** 2)

        res = minimize_scalar(val, bounds=(a, b), method="bounded")
        if res.fun < omega2[i]:
            return float(res.x), float(res.fun)
        return float(t[i]), float(omega2[i])

    def validate_counterdiabatic(self) -> None:
        """Raise ValidityError if Omega^2 dips below tolerance anywhere on the window."""
        if self.allow_inverted:
            return
        t_min, v_min = self.omega2_minimum()
        if v_min < -OMEGA2_TOLERANCE * self.frequency_scale() ** 2:
            raise ValidityError(
                f"min Omega^2 = {v_min:.6g} at t = {t_min:.6g} is negative; "
                "the counterdiabatic drive is not realizable on this window",
                offending_t=t_min, value=v_min)

    def warn_if_unsettled(self, edge_tolerance: float = EDGE_TOLERANCE) -> None:
        for flag in self.edge_flags(edge_tolerance):
            warnings.warn(f"protocol edges not settled: {flag}", stacklevel=2)
