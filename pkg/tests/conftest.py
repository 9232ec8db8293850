import hypothesis
import numpy as np
import pytest

from sta_cost.driving import DrivingSpec
from sta_cost.protocol import FrequencyProtocol

hypothesis.settings.register_profile(
    "ci", max_examples=50, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("ci")


@pytest.fixture(scope="session")
def std_protocol():
    """omega0=1, delta=0.5, tau=1 on the default window."""
    return FrequencyProtocol.arctan_family(1.0, 0.5, 1.0)


@pytest.fixture(scope="session")
def std_drive():
    return DrivingSpec(M=1.0, theta_dot=1.0, var_theta0=4.5e-7, var_P0=4.5e-7, H_D=1.0)


@pytest.fixture(scope="session")
def parameter_triples():
    """(omega0, delta, tau) triples inside the validity region."""
    return [
        (1.0, 0.0, 1.0),
        (1.0, 0.5, 1.0),
        (2.0, 0.6, 0.7),
        (0.5, 0.2, 3.0),
        (1.3, 0.4, 1.9),
        (1.0, 0.25, 10.0),
    ]


def assert_close(actual, expected, rel=0.0, abs_=0.0, label=""):
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    tol = rel * np.abs(expected) + abs_
    err = np.abs(actual - expected)
    assert np.all(err <= tol), f"{label}: |{actual} - {expected}| = {err} > {tol}"
