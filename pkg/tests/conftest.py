import numpy as np
import pytest

from selfdist.norms import NormSpec

ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = marker.args
        ACCEPTANCE.append((number, title, rep.outcome, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, duration in sorted(ACCEPTANCE):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {number}: {title} ({duration:.2f}s)")


def random_polytopal(rng, n, extra=None):
    """Random symmetric polytope norm: n independent functionals plus a few more."""
    k = n + (rng.integers(0, 4) if extra is None else extra)
    while True:
        a = rng.normal(size=(k, n))
        if np.linalg.matrix_rank(a) == n:
            return NormSpec.polytopal(a)


def random_norm(rng, n):
    choice = rng.integers(0, 5)
    if choice == 0:
        return NormSpec.linf(n)
    if choice == 1:
        return NormSpec.lp(n, 1)
    if choice == 2:
        return NormSpec.lp(n, 2)
    if choice == 3:
        return NormSpec.lp(n, float(rng.uniform(1.2, 6.0)))
    return random_polytopal(rng, n)


def random_ball_points(rng, ns, k, boundary_fraction=0.5):
    """Points of the unit ball, a share of them pushed to the sphere."""
    from selfdist.norms import norm_eval

    pts = rng.normal(size=(k, ns.dim))
    g = norm_eval(ns, pts)
    g = np.where(g > 0, g, 1.0)
    radii = np.where(rng.uniform(size=k) < boundary_fraction, 1.0, rng.uniform(size=k))
    return pts / g[:, None] * radii[:, None] * (1 - 1e-12)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
