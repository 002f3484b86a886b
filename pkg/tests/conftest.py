import numpy as np
import pytest

from isonets import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay the JIT cost before any timed assertion runs
    _kernels.warmup()


def pytest_terminal_summary(terminalreporter):
    # per-criterion verdicts are printed inside captured stdout; repeat them
    # where they are visible without -s. The module may be registered either
    # top-level or under the tests package depending on how pytest imported
    # it, so pick up whichever instance actually ran.
    import sys

    lines = set()
    for name, mod in list(sys.modules.items()):
        if name.rsplit(".", 1)[-1] == "test_acceptance":
            lines.update(getattr(mod, "RESULTS", ()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_circle(rng, ambient=4):
    """Random circle in R^ambient: (center, u, v, radius) with u ⟂ v."""
    q, _ = np.linalg.qr(rng.standard_normal((ambient, ambient)))
    center = rng.standard_normal(ambient)
    radius = float(rng.uniform(0.3, 2.5))
    return center, q[:, 0], q[:, 1], radius


def circle_points(rng, angles=None, k=4, ambient=4):
    """k points on one random circle, optionally at given angles."""
    center, u, v, radius = random_circle(rng, ambient)
    if angles is None:
        while True:
            angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=k))
            if np.all(np.diff(angles) > 1e-2):
                break
    pts = center + radius * (
        np.cos(angles)[:, None] * u + np.sin(angles)[:, None] * v
    )
    return pts


@pytest.fixture
def on_circle():
    return circle_points
