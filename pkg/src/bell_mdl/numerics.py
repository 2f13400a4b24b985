"""Numerical kernels: log-gamma, adaptive quadrature, Brent root finding and
bounded two-dimensional maximization.

Everything here is a pure function of its arguments.  Integrands passed to
:func:`integrate` must be vectorized (accept and return numpy arrays).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError, NoSignChangeError

__all__ = [
    "QuadratureSpec",
    "SearchRegion",
    "ln_gamma",
    "theta_prefactor",
    "integrate",
    "find_root",
    "maximize_region",
]

# 1 - Euler's constant, and zeta(k) - 1 for k = 2..31: Taylor coefficients of
# ln Gamma(2 + z) = (1 - euler) z + sum_k (-1)^k (zeta(k) - 1) z^k / k.
_ONE_MINUS_EULER = 0.42278433509846713939
_ZETA_MINUS_ONE = (
    0.6449340668482264,
    0.2020569031595943,
    0.08232323371113819,
    0.03692775514336993,
    0.01734306198444914,
    0.008349277381922827,
    0.00407735619794434,
    0.0020083928260822143,
    0.0009945751278180853,
    0.0004941886041194645,
    0.0002460865533080483,
    0.00012271334757848915,
    6.124813505870483e-05,
    3.058823630702049e-05,
    1.528225940865187e-05,
    7.637197637899763e-06,
    3.81729326499984e-06,
    1.908212716553939e-06,
    9.539620338727962e-07,
    4.769329867878064e-07,
    2.38450502727733e-07,
    1.1921992596531106e-07,
    5.960818905125948e-08,
    2.980350351465228e-08,
    1.4901554828365043e-08,
    7.45071178983543e-09,
    3.725334024788457e-09,
    1.862659723513049e-09,
    9.313274324196682e-10,
    4.656629065033784e-10,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_STIRLING_FROM = 15.0


def _ln_gamma_near_two(z):
    # |z| <= 0.5; terms fall off like 4**-k / k
    total = 0.0
    power = -z
    for k, zm1 in enumerate(_ZETA_MINUS_ONE, start=2):
        power *= -z
        total += zm1 * power / k
    return _ONE_MINUS_EULER * z + total


def _ln_gamma_stirling(x):
    inv = 1.0 / x
    inv2 = inv * inv
    series = inv * (1.0 / 12 - inv2 * (1.0 / 360 - inv2 * (1.0 / 1260 - inv2 * (1.0 / 1680 - inv2 / 1188))))
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + series


def ln_gamma(x: float) -> float:
    """Natural logarithm of the Gamma function for ``x > 0``.

    Arguments in [1.5, 2.5] use the Taylor series about 2, so the zeros at
    x = 1 and x = 2 keep full relative accuracy.  Other arguments are shifted
    into that window by the recurrence, or use Stirling's series when large.
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x!r}")
    if x == 1.0 or x == 2.0:
        return 0.0
    if x >= _STIRLING_FROM:
        return _ln_gamma_stirling(x)
    if x < 1.5:
        # ln G(x) = ln G(x + 1) - ln x; near x = 1 write it through log1p
        if x >= 0.5:
            z = x - 1.0
            return _ln_gamma_near_two(z) - math.log1p(z)
        return ln_gamma(x + 1.0) - math.log(x)
    if x <= 2.5:
        return _ln_gamma_near_two(x - 2.0)
    product = 1.0
    while x > 2.5:
        x -= 1.0
        product *= x
    return _ln_gamma_near_two(x - 2.0) + math.log(product)


def theta_prefactor(gamma: float) -> float:
    """Return sqrt(pi) * Gamma(gamma + 1) / Gamma(gamma + 3/2).

    This is the polar integral of sin(theta)**(2 gamma + 1) over [0, pi]
    left over once the azimuthal part of the densities is separated.
    """
    gamma = float(gamma)
    if not gamma > -0.5:
        raise DomainError(f"gamma must be > -1/2, got {gamma!r}")
    return math.sqrt(math.pi) * math.exp(ln_gamma(gamma + 1.0) - ln_gamma(gamma + 1.5))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

_GL_ORDER = 15
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and interior breakpoints for :func:`integrate`.

    Breakpoints are stored sorted and deduplicated; they mark abscissae where
    the integrand may jump or kink.  Instances are hashable so they can key
    caches.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 4000
    breakpoints: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        object.__setattr__(self, "breakpoints", tuple(sorted({float(p) for p in self.breakpoints})))

    def with_breakpoints(self, points) -> "QuadratureSpec":
        return QuadratureSpec(self.rel_tol, self.abs_tol, self.max_subdivisions, tuple(points))


DEFAULT_QUADRATURE = QuadratureSpec()


def _gauss_panels(f, left, right):
    """15-point Gauss-Legendre sums over many panels with one call to f."""
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    y = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    return half * (y @ _GL_WEIGHTS)


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              spec: QuadratureSpec | None = None) -> float:
    """Adaptively integrate a vectorized ``f`` over ``[a, b]``.

    The interval is first cut at ``spec.breakpoints`` so no panel straddles a
    jump or kink.  Each panel is estimated with a 15-point Gauss-Legendre rule
    on the whole panel and on its two halves; the difference is the error
    estimate.  Panels whose error exceeds their length-share of
    ``max(abs_tol, rel_tol * |I|)`` are bisected until every panel passes.

    Raises
    ------
    DomainError
        If ``a >= b`` or a breakpoint is not strictly inside ``(a, b)``.
    ConvergenceError
        If more than ``spec.max_subdivisions`` panels would be needed.
    """
    spec = DEFAULT_QUADRATURE if spec is None else spec
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError(f"integration requires a < b, got [{a}, {b}]")
    for p in spec.breakpoints:
        if not a < p < b:
            raise DomainError(f"breakpoint {p} is not inside ({a}, {b})")

    edges = np.array([a, *spec.breakpoints, b])
    left = edges[:-1]
    right = edges[1:]
    length = b - a

    def estimate(lo, hi):
        mid = 0.5 * (lo + hi)
        whole = _gauss_panels(f, lo, hi)
        halves = _gauss_panels(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]))
        n = lo.size
        fine = halves[:n] + halves[n:]
        return fine, np.abs(fine - whole)

    value, err = estimate(left, right)
    while True:
        total = float(np.sum(value))
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        # roundoff floor: a panel cannot be resolved below a few ulps of its value
        floor = 50.0 * np.finfo(float).eps * np.abs(value)
        bad = (err > tol * (right - left) / length) & (err > floor)
        if not bad.any():
            return total
        n_bad = int(bad.sum())
        if left.size + n_bad > spec.max_subdivisions:
            raise ConvergenceError(
                f"quadrature on [{a}, {b}] did not converge within "
                f"{spec.max_subdivisions} panels (error {float(err.sum()):.3e}, tol {tol:.3e})"
            )
        lo = left[bad]
        hi = right[bad]
        mid = 0.5 * (lo + hi)
        new_left = np.concatenate([lo, mid])
        new_right = np.concatenate([mid, hi])
        new_value, new_err = estimate(new_left, new_right)
        keep = ~bad
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        value = np.concatenate([value[keep], new_value])
        err = np.concatenate([err[keep], new_err])


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
              max_iter: int = 200) -> float:
    """Brent's method on a sign-changing bracket ``[lo, hi]``.

    Inverse quadratic interpolation and secant steps, falling back to
    bisection whenever they would leave the bracket or converge too slowly.
    The returned point is the bracket end with the smaller ``|f|`` once the
    bracket is narrower than ``tol``.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise NoSignChangeError(f"f({a})={fa} and f({b})={fb} have the same sign")
    c, fc = a, fa
    d = e = b - a
    eps = np.finfo(float).eps
    for _ in range(max_iter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * eps * abs(b) + 0.5 * tol
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, m)
        fb = f(b)
    raise ConvergenceError(f"find_root did not converge in {max_iter} iterations")


# ---------------------------------------------------------------------------
# Bounded 2-D maximization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchRegion:
    """A region ``phi1 in [phi1_lo, phi1_hi]``, ``phi2 in [lo_fn(phi1), hi_fn(phi1)]``."""

    phi1_lo: float
    phi1_hi: float
    phi2_lo_fn: Callable[[float], float]
    phi2_hi_fn: Callable[[float], float]

    def __post_init__(self):
        if not 0.0 < self.phi1_lo < self.phi1_hi <= math.pi / 2 + 1e-15:
            raise DomainError(
                f"need 0 < phi1_lo < phi1_hi <= pi/2, got [{self.phi1_lo}, {self.phi1_hi}]"
            )

    def point(self, s: float, t: float) -> tuple[float, float]:
        """Map unit-square coordinates to a point of the region."""
        phi1 = self.phi1_lo + s * (self.phi1_hi - self.phi1_lo)
        lo = self.phi2_lo_fn(phi1)
        hi = self.phi2_hi_fn(phi1)
        if hi < lo:
            raise DomainError(f"empty phi2 range at phi1={phi1}")
        return phi1, lo + t * (hi - lo)


_DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1))


def maximize_region(f: Callable[[float, float], float], region: SearchRegion,
                    coarse_n: int = 181, refine_tol: float = 1e-6,
                    max_evals: int = 20000) -> tuple[tuple[float, float], float]:
    """Grid scan followed by pattern-search refinement.

    The region is sampled on a ``coarse_n x coarse_n`` grid (``phi1`` evenly
    spaced, then ``phi2`` evenly spaced across its range at that ``phi1``).
    From the best grid point a compass search with diagonal moves, clamped to
    the region, halves its step until the step is at most ``refine_tol``
    radians along both axes.  Ties go to the lexicographically smallest point.
    """
    if coarse_n < 16:
        raise DomainError(f"coarse_n must be >= 16, got {coarse_n}")
    if not refine_tol > 0:
        raise DomainError("refine_tol must be positive")

    cache: dict[tuple[float, float], float] = {}

    def value(s, t):
        key = (s, t)
        if key not in cache:
            cache[key] = float(f(*region.point(s, t)))
        return cache[key]

    grid = np.linspace(0.0, 1.0, coarse_n)
    best = None
    for s in grid:
        for t in grid:
            v = value(float(s), float(t))
            if best is None or v > best[0]:
                best = (v, float(s), float(t))
    budget = len(cache) + max_evals

    v_best, s, t = best
    step = 1.0 / (coarse_n - 1)
    width1 = region.phi1_hi - region.phi1_lo
    while True:
        phi1 = region.point(s, t)[0]
        width2 = region.phi2_hi_fn(phi1) - region.phi2_lo_fn(phi1)
        if step * max(width1, width2) <= refine_tol:
            break
        if len(cache) >= budget:
            raise ConvergenceError(f"refinement exceeded {max_evals} evaluations")
        move = None
        for ds, dt in _DIRECTIONS:
            s_new = min(1.0, max(0.0, s + ds * step))
            t_new = min(1.0, max(0.0, t + dt * step))
            if (s_new, t_new) == (s, t):
                continue
            v = value(s_new, t_new)
            if v > v_best and (move is None or v > move[0]):
                move = (v, s_new, t_new)
        if move is None:
            step *= 0.5
        else:
            v_best, s, t = move
    return region.point(s, t), v_best
