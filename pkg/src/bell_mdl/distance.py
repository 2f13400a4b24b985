"""Measurement-dependence distance between the densities of two settings.

``d(phi_a, phi_b)`` is the L1 distance between the hidden-variable densities
of two family members sharing ``gamma``.  After the polar integral it reads
``S(gamma) * int_0^{2 pi} |g_a - g_b| dphi'``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import _agreement, _base, check_angle, check_gamma, sign_boundaries, solve_coefficients
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    SearchRegion,
    find_root,
    integrate,
    maximize_region,
    theta_prefactor,
)

__all__ = [
    "DistancePair",
    "DmaxResult",
    "ScanError",
    "distance_d",
    "distance_gamma0_antidiagonal",
    "stationarity_residual",
    "solve_gamma0_maximum",
    "restricted_region",
    "find_dmax",
    "dmax_scan",
    "DEFAULT_GRID_N",
    "DEFAULT_REFINE_TOL",
    "DEFAULT_PHI_MIN",
]

DEFAULT_GRID_N = 181
DEFAULT_REFINE_TOL = 1e-6
# The restricted region is open at phi_a = 0; the search starts this far in.
DEFAULT_PHI_MIN = 0.01
MIN_GRID_N = 32

_SCAN_POINTS = 17


@dataclass(frozen=True)
class DistancePair:
    phi_a: float
    phi_b: float

    def __post_init__(self):
        check_angle(self.phi_a, "phi_a")
        check_angle(self.phi_b, "phi_b")


@dataclass(frozen=True)
class DmaxResult:
    """Maximum of ``d`` over the restricted region for one ``gamma``.

    ``at_lower_edge`` flags a maximizer on ``phi_a = phi_min``: the region is
    open there, so ``d_max`` is then a lower bound for the supremum.
    """

    gamma: float
    argmax: DistancePair
    d_max: float
    grid_n: int
    refine_tol: float
    phi_min: float = DEFAULT_PHI_MIN
    at_lower_edge: bool = False


class ScanError(RuntimeError):
    """One or more ``gamma`` values of a scan failed."""

    def __init__(self, failures):
        self.failures = list(failures)
        detail = "; ".join(f"gamma={g}: {type(e).__name__}: {e}" for g, e in self.failures)
        super().__init__(f"{len(self.failures)} gamma value(s) failed: {detail}")


def _crossings(lo, hi, ka, kb, phi_a, phi_b, gamma):
    """Zeros of ``ka h_a - kb h_b`` inside each panel, by sign scan and Brent polish."""
    t = np.linspace(0.0, 1.0, _SCAN_POINTS)
    x = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    diff = ka[:, None] * _base(x, phi_a) ** gamma - kb[:, None] * _base(x, phi_b) ** gamma
    flips = np.argwhere(np.sign(diff[:, :-1]) * np.sign(diff[:, 1:]) < 0)
    roots = []
    for p, j in flips:
        k1, k2 = float(ka[p]), float(kb[p])

        def f(z):
            return (k1 * (math.cos(z) ** 2 + math.cos(z - phi_a) ** 2) ** gamma
                    - k2 * (math.cos(z) ** 2 + math.cos(z - phi_b) ** 2) ** gamma)

        left, right = float(x[p, j]), float(x[p, j + 1])
        # the scan and f round differently; a flip lost to rounding is a zero at an end
        if (f(left) > 0) != (f(right) > 0):
            roots.append(find_root(f, left, right, 1e-14))
    return roots


def distance_d(phi_a: float, phi_b: float, gamma: float, spec: QuadratureSpec | None = None) -> float:
    """L1 distance between the densities at relative angles ``phi_a`` and ``phi_b``.

    Each density carries its own solved coefficients.  The integrand
    ``|g_a - g_b|`` has period pi, jumps at the sign boundaries of both
    settings and kinks where ``g_a = g_b``; all of these become quadrature
    breakpoints on ``[0, pi]``.
    """
    phi_a = check_angle(phi_a, "phi_a")
    phi_b = check_angle(phi_b, "phi_b")
    gamma = check_gamma(gamma)
    if phi_a == phi_b:
        return 0.0
    spec = DEFAULT_QUADRATURE if spec is None else spec
    ca = solve_coefficients(phi_a, gamma, spec)
    cb = solve_coefficients(phi_b, gamma, spec)

    edges = np.array([0.0, *sorted(set(sign_boundaries(phi_a)) | set(sign_boundaries(phi_b))), math.pi])
    lo, hi = edges[:-1], edges[1:]
    breaks = list(edges[1:-1])
    if gamma != 0.0:
        mid = 0.5 * (lo + hi)
        ka = np.where(_agreement(mid, phi_a), ca.c1, ca.c2)
        kb = np.where(_agreement(mid, phi_b), cb.c1, cb.c2)
        breaks += [r for r in _crossings(lo, hi, ka, kb, phi_a, phi_b, gamma) if 0.0 < r < math.pi]

    def integrand(x):
        ga = np.where(_agreement(x, phi_a), ca.c1, ca.c2) * _base(x, phi_a) ** gamma
        gb = np.where(_agreement(x, phi_b), cb.c1, cb.c2) * _base(x, phi_b) ** gamma
        return np.abs(ga - gb)

    half = integrate(integrand, 0.0, math.pi, spec.with_breakpoints(breaks))
    return 2.0 * theta_prefactor(gamma) * half


def distance_gamma0_antidiagonal(phi: float) -> float:
    """Closed form of ``d(phi, pi - phi)`` for ``gamma = 0``, ``0 < phi <= pi/2``."""
    phi = float(phi)
    if not 0.0 < phi <= math.pi / 2:
        raise DomainError(f"phi must be in (0, pi/2], got {phi!r}")
    return (2.0 * phi + math.pi * math.cos(phi) - math.pi) / (math.pi - phi)


def stationarity_residual(phi: float) -> float:
    """``1 + (phi - pi) sin phi + cos phi``; zero where the closed form peaks."""
    return 1.0 + (phi - math.pi) * math.sin(phi) + math.cos(phi)


def solve_gamma0_maximum(tol: float = 1e-15) -> tuple[float, float]:
    """Root of :func:`stationarity_residual` on [0.5, 1.2] and the distance there."""
    phi_star = find_root(stationarity_residual, 0.5, 1.2, tol)
    return phi_star, distance_gamma0_antidiagonal(phi_star)


def restricted_region(phi_min: float = DEFAULT_PHI_MIN) -> SearchRegion:
    """``phi_min <= phi_a <= pi/2``, ``phi_a <= phi_b <= pi - phi_a``."""
    return SearchRegion(phi_min, math.pi / 2, lambda p: p, lambda p: math.pi - p)


def find_dmax(gamma: float, grid_n: int = DEFAULT_GRID_N, refine_tol: float = DEFAULT_REFINE_TOL,
              phi_min: float = DEFAULT_PHI_MIN, spec: QuadratureSpec | None = None) -> DmaxResult:
    """Maximize :func:`distance_d` over the restricted region by grid scan and refinement."""
    gamma = check_gamma(gamma)
    if grid_n < MIN_GRID_N:
        raise DomainError(f"grid_n must be >= {MIN_GRID_N}, got {grid_n}")
    region = restricted_region(phi_min)

    def objective(a, b):
        # the top corner collapses to a = b = pi/2
        return 0.0 if a >= b else distance_d(a, b, gamma, spec)

    (a, b), value = maximize_region(objective, region, grid_n, refine_tol)
    return DmaxResult(
        gamma=gamma,
        argmax=DistancePair(a, b),
        d_max=value,
        grid_n=grid_n,
        refine_tol=refine_tol,
        phi_min=phi_min,
        at_lower_edge=a <= phi_min + refine_tol,
    )


def _find_dmax_safe(args):
    gamma, grid_n, refine_tol, phi_min, spec = args
    try:
        return find_dmax(gamma, grid_n, refine_tol, phi_min, spec)
    except Exception as exc:  # collected and re-raised by dmax_scan
        return exc


def dmax_scan(gammas, grid_n: int = DEFAULT_GRID_N, refine_tol: float = DEFAULT_REFINE_TOL,
              phi_min: float = DEFAULT_PHI_MIN, spec: QuadratureSpec | None = None,
              workers: int = 1) -> list[DmaxResult]:
    """:func:`find_dmax` for each gamma, in input order.

    With ``workers > 1`` the gammas run in separate processes.  Failures are
    gathered and raised together as :class:`ScanError`.
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise DomainError("gamma list is empty")
    jobs = [(g, grid_n, refine_tol, phi_min, spec) for g in gammas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_find_dmax_safe, jobs))
    else:
        outcomes = [_find_dmax_safe(job) for job in jobs]
    failures = [(g, r) for g, r in zip(gammas, outcomes) if isinstance(r, Exception)]
    if failures:
        raise ScanError(failures)
    return outcomes
