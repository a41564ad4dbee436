import math

import numpy as np
import pytest

from s2r_solitons.charts import ROTATIONAL, chart_from_direction
from s2r_solitons.integrate import IntegrationConfig, integrate

INI = (0.0, 0.0, 0.0)
FREE = IntegrationConfig(stop_at_equilibrium=False)

_criteria: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion checked by the test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n, text = marker.args
    ok = call.excinfo is None
    prev = _criteria.get(n)
    status = "PASS" if ok and (prev is None or prev[0] == "PASS") else "FAIL"
    _criteria[n] = (status, text)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        status, text = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {text}")


def smooth_direction(rng: np.random.Generator):
    """Random theta(s) = a0 + a1 sin(b1 s + c1) + a2 cos(b2 s) and its derivative."""
    a0 = rng.uniform(-math.pi, math.pi)
    a1, a2 = rng.uniform(-1.5, 1.5, size=2)
    b1, b2 = rng.uniform(0.3, 2.5, size=2)
    c1 = rng.uniform(0, 2 * math.pi)

    def theta(s):
        return a0 + a1 * math.sin(b1 * s + c1) + a2 * math.cos(b2 * s)

    def theta_prime(s):
        return a1 * b1 * math.cos(b1 * s + c1) - a2 * b2 * math.sin(b2 * s)

    return theta, theta_prime


def random_chart(rng: np.random.Generator, kind: str):
    """Smooth chart on s in [-1, 1] staying well inside |u| < pi/2."""
    theta, theta_prime = smooth_direction(rng)
    u0 = rng.uniform(-0.4, 0.4) if kind == ROTATIONAL else rng.uniform(-1.0, 1.0)
    v0 = rng.uniform(-2.0, 2.0)
    return chart_from_direction(kind, theta, theta_prime, -1.0, 1.0, u0=u0, v0=v0, n_samples=21)


@pytest.fixture(scope="session")
def s11_spans():
    return {span: integrate("s11", INI, FREE.with_span(-span, span)) for span in (20, 40, 60)}


@pytest.fixture(scope="session")
def s21_spans():
    return {span: integrate("s21", INI, FREE.with_span(-span, span)) for span in (20, 40, 60)}


@pytest.fixture(scope="session")
def s11_ini(s11_spans):
    return s11_spans[60]


@pytest.fixture(scope="session")
def s21_ini(s21_spans):
    return s21_spans[60]
