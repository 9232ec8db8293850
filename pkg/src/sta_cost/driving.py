"""Classical driving parameters and initial fluctuation variances."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError


@dataclass(frozen=True)
class DrivingSpec:
    """Parameters of the external driving degree of freedom.

    M is the effective inertia of the angle fluctuation (inverse curvature of
    the driving Hamiltonian at the working point) and theta_dot is the constant
    angular velocity of the classical trajectory.  var_theta0 and var_P0 are the
    initial variances of the angle fluctuation and its conjugate momentum; the
    symmetric cross correlation is fixed to zero (Gaussian pure state).  H_D is
    the classical driving energy, used only by the order-of-magnitude estimates.
    """

    M: float = 1.0
    theta_dot: float = 1.0
    var_theta0: float = 0.0
    var_P0: float = 0.0
    cross_correlation: float = 0.0
    H_D: float = 1.0

    def __post_init__(self):
        if not (self.M > 0.0) or not float("inf") > self.M:
            raise ConfigurationError("drive.M must be finite and > 0")
        if self.theta_dot == 0.0:
            raise ConfigurationError("drive.theta_dot must be nonzero")
        if self.var_theta0 < 0.0 or self.var_P0 < 0.0:
            raise ConfigurationError("drive variances must be >= 0")
        if self.cross_correlation != 0.0:
            raise ConfigurationError("nonzero <{theta(0),P(0)}> is not supported; it is fixed to 0")

    @classmethod
    def from_dict(cls, d: dict) -> "DrivingSpec":
        try:
            return cls(
                M=float(d.get("M", 1.0)),
                theta_dot=float(d.get("theta_dot", 1.0)),
                var_theta0=float(d.get("var_theta0", 0.0)),
                var_P0=float(d.get("var_P0", 0.0)),
                cross_correlation=float(d.get("cross_correlation", 0.0)),
                H_D=float(d.get("H_D", 1.0)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"drive: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "theta_dot": self.theta_dot,
            "var_theta0": self.var_theta0,
            "var_P0": self.var_P0,
            "cross_correlation": self.cross_correlation,
            "H_D": self.H_D,
        }
