import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.linalg import solve_banded

from jacobi_szego.geronimus import JacobiParams, VerblunskySeq, forward
from jacobi_szego.jacobi import strip

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def random_alpha(rng, max_support=8, max_abs=0.8):
    n = int(rng.integers(1, max_support + 1))
    return rng.uniform(-max_abs, max_abs, n)


def random_jacobi(rng, support=6):
    a = rng.uniform(0.5, 1.5, support)
    b = rng.uniform(-1.0, 1.0, support)
    return JacobiParams(a, b)


def eigenvalue_free(rng, max_support=6, max_abs=0.6):
    """Doubly-resonant operator: Jacobi parameters of a Bernstein-Szego measure."""
    return forward(VerblunskySeq(random_alpha(rng, max_support, max_abs)))


def finite_c_operator(rng, max_support=6, max_abs=0.6):
    """Once-stripped Bernstein-Szego operator.

    No eigenvalues (interlacing against a doubly-resonant parent) and finite
    radial limits of M at both edges.
    """
    return strip(eigenvalue_free(rng, max_support, max_abs), 1)


def resolvent_m(J, E, pad=200):
    """<delta_1, (J_N - E)^{-1} delta_1> by a banded linear solve on a truncation."""
    n = J.length + pad
    a, b = J.arrays(n)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = a[: n - 1]
    ab[1, :] = b - E
    ab[2, :-1] = a[: n - 1]
    rhs = np.zeros(n, dtype=complex)
    rhs[0] = 1.0
    return solve_banded((1, 1), ab, rhs)[0]


def disc_points(rng, count, rmax=0.9, rmin=0.05):
    r = np.sqrt(rng.uniform(rmin**2, rmax**2, count))
    return r * np.exp(1j * rng.uniform(0, 2 * np.pi, count))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
