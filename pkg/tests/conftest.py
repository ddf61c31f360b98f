import numpy as np
import pytest

from allatonce.discretize import ProblemSpec, build_spatial, make_stencil
from allatonce.toeplitz_ops import AllAtOnceOperator

HEAT_SCHEMES = [("theta", 1.0), ("theta", 0.5), ("bdf2", None)]
WAVE_SCHEMES = [("wave-two-step", None), ("wave-central", None)]
ALL_SCHEMES = HEAT_SCHEMES + WAVE_SCHEMES


def make_case(scheme, n, m1, theta=None, dim=1, a=1.0, T=None, **kw):
    """Operator, spatial part and stencil for a small test problem.

    ``T`` defaults to ``n / 16`` so the time step stays fixed when ``n`` varies.
    """
    equation = "wave" if scheme.startswith("wave") else "heat"
    spec = ProblemSpec(equation, scheme, n, m1, dim=dim, a=a, theta=theta, T=T if T is not None else n / 16, **kw)
    spatial = build_spatial(spec)
    stencil = make_stencil(spec)
    return AllAtOnceOperator(n, spatial, stencil), spatial, stencil, spec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
