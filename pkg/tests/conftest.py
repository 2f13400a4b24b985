import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from bell_mdl.config import DEFAULT_GAMMAS

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def oracle_boundaries(phi, period):
    """Zeros of cos(x) and cos(x - phi) in (0, period), found independently of the package."""
    pts = []
    for k in range(-2, 5):
        for p in (math.pi / 2 + k * math.pi, phi + math.pi / 2 + k * math.pi):
            if 0 < p < period:
                pts.append(p)
    return sorted(set(pts))


def oracle_kernel_f(u, v, c1, c2, gamma):
    same = (u > 0) == (v > 0)
    return np.where(same, c1, c2) * (u * u + v * v) ** gamma / np.abs(u * v)


def oracle_prefactor(gamma):
    return sp_integrate.quad(lambda t: math.sin(t) ** (2 * gamma + 1), 0, math.pi,
                             epsabs=1e-14, epsrel=1e-13)[0]


def oracle_coefficients(phi, gamma):
    """Solve the normalization and correlation constraints as a 2x2 system with scipy.quad."""
    s = oracle_prefactor(gamma)
    pts = oracle_boundaries(phi, 2 * math.pi)
    rows = []
    for signed in (False, True):
        row = []
        for basis in ((1.0, 0.0), (0.0, 1.0)):
            def integrand(x, basis=basis, signed=signed):
                u, v = math.cos(x), math.cos(x - phi)
                if u == 0 or v == 0:
                    return 0.0
                w = float(oracle_kernel_f(u, v, *basis, gamma))
                return (u * v if signed else abs(u * v)) * w
            row.append(s * sp_integrate.quad(integrand, 0, 2 * math.pi, points=pts, limit=400,
                                             epsabs=1e-13, epsrel=1e-12)[0])
        rows.append(row)
    return np.linalg.solve(np.array(rows), np.array([1.0, math.cos(phi)]))


@pytest.fixture(scope="session")
def default_scan():
    """d_max over the default gamma grid at default search settings (shared; ~2 min)."""
    from bell_mdl.distance import dmax_scan
    import time
    start = time.perf_counter()
    results = dmax_scan(DEFAULT_GAMMAS)
    return results, time.perf_counter() - start
