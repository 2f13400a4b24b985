"""The gamma-family of measurement-dependent hidden-variable densities.

Detector settings lie in the equatorial plane: ``x`` along azimuth 0 and
``y`` at azimuth ``phi``.  The hidden variable is a unit vector
``lambda = (theta, phi')``.  Setting-pinned hidden variables are integrated
out already, so a model member is fully described by ``(phi, gamma)`` and
the two coefficients ``c1`` (outcomes' signs agree) and ``c2`` (they
disagree).  The polar angle factorizes out as ``sin(theta)**(2 gamma + 1)``
and its integral is :func:`~bell_mdl.numerics.theta_prefactor`.

Sign boundaries (``cos phi' = 0`` or ``cos(phi' - phi) = 0``) have measure
zero; point evaluations assign them to the agreement region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate, theta_prefactor

__all__ = [
    "Coefficients",
    "HiddenVariable",
    "RegionIntegrals",
    "check_gamma",
    "check_angle",
    "weight_f",
    "reduced_density_g",
    "sign_boundaries",
    "region_integrals",
    "solve_coefficients",
    "coefficients_gamma0_closed",
    "outcome_A",
    "outcome_B",
    "verify_constraints",
]


def check_gamma(gamma) -> float:
    gamma = float(gamma)
    if not gamma > -0.5 or math.isinf(gamma):
        raise DomainError(f"gamma must be > -1/2, got {gamma!r}")
    return gamma


def check_angle(phi, name="phi") -> float:
    phi = float(phi)
    if not 0.0 < phi < math.pi:
        raise DomainError(f"{name} must be in (0, pi), got {phi!r}")
    return phi


@dataclass(frozen=True)
class Coefficients:
    """Normalizing pair for one family member, tagged with its ``(phi, gamma)``."""

    c1: float
    c2: float
    phi: float
    gamma: float

    def __post_init__(self):
        check_angle(self.phi)
        check_gamma(self.gamma)
        if not (self.c1 > 0 and self.c2 > 0):
            raise DomainError(f"coefficients must be positive, got c1={self.c1}, c2={self.c2}")

    def scaled(self, factor: float) -> "Coefficients":
        return Coefficients(self.c1 * factor, self.c2 * factor, self.phi, self.gamma)


@dataclass(frozen=True)
class HiddenVariable:
    """Spherical coordinates of the hidden unit vector."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must be in [0, pi], got {self.theta!r}")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise DomainError(f"phi must be in [0, 2 pi), got {self.phi!r}")

    def cartesian(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True)
class RegionIntegrals:
    """Azimuthal integrals of ``(cos^2 phi' + cos^2(phi' - phi))**gamma``.

    ``i_plus`` covers the set where ``cos phi'`` and ``cos(phi' - phi)`` share
    a sign, ``i_minus`` its complement.
    """

    i_plus: float
    i_minus: float


def weight_f(u, v, coeffs: Coefficients, gamma: float):
    """The weight kernel ``c (u^2 + v^2)**gamma / |u v|``.

    ``c`` is ``c1`` when ``u`` and ``v`` have the same sign and ``c2``
    otherwise.  Works elementwise on arrays.  Any zero argument raises
    :class:`DomainError` since the sign, and the kernel, are undefined there.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u == 0.0) or np.any(v == 0.0):
        raise DomainError("weight_f is undefined where u or v is zero")
    c = np.where((u > 0) == (v > 0), coeffs.c1, coeffs.c2)
    out = c * (u * u + v * v) ** gamma / np.abs(u * v)
    return float(out) if out.ndim == 0 else out


def _agreement(phi_prime, phi):
    return np.cos(phi_prime) * np.cos(phi_prime - phi) >= 0.0


def _base(phi_prime, phi):
    return np.cos(phi_prime) ** 2 + np.cos(phi_prime - phi) ** 2


def reduced_density_g(phi_prime, phi: float, coeffs: Coefficients, gamma: float):
    """Azimuthal density ``|cos phi' cos(phi' - phi)| f(cos phi', cos(phi' - phi))``.

    Evaluated in its cancelled form ``c_region (cos^2 phi' + cos^2(phi' - phi))**gamma``
    so it is finite on the sign boundaries.
    """
    phi_prime = np.asarray(phi_prime, dtype=float)
    c = np.where(_agreement(phi_prime, phi), coeffs.c1, coeffs.c2)
    out = c * _base(phi_prime, phi) ** gamma
    return float(out) if out.ndim == 0 else out


def sign_boundaries(phi: float, period: float = math.pi) -> list[float]:
    """Sign-change abscissae of ``cos phi'`` and ``cos(phi' - phi)`` inside ``(0, period)``."""
    points = set()
    for offset in (0.0, phi):
        p = (offset + math.pi / 2) % math.pi
        while p < period:
            if p > 0.0:
                points.add(p)
            p += math.pi
    return sorted(points)


def _panels(edges):
    return list(zip(edges[:-1], edges[1:]))


def region_integrals(phi: float, gamma: float, spec: QuadratureSpec | None = None) -> RegionIntegrals:
    """Integrate the gamma-power base over the agreement and disagreement sets.

    The integrand and the sign pattern both repeat with period pi in ``phi'``,
    so the integrals are taken over ``[0, pi]`` and doubled.
    """
    phi = check_angle(phi)
    gamma = check_gamma(gamma)
    spec = DEFAULT_QUADRATURE if spec is None else spec.with_breakpoints(())

    def h(x):
        return _base(x, phi) ** gamma

    i_plus = i_minus = 0.0
    for lo, hi in _panels([0.0, *sign_boundaries(phi), math.pi]):
        part = integrate(h, lo, hi, spec)
        if _agreement(0.5 * (lo + hi), phi):
            i_plus += part
        else:
            i_minus += part
    return RegionIntegrals(2.0 * i_plus, 2.0 * i_minus)


@lru_cache(maxsize=65536)
def _solve_cached(phi, gamma, spec):
    ri = region_integrals(phi, gamma, spec)
    s = theta_prefactor(gamma)
    c1 = (1.0 + math.cos(phi)) / (2.0 * s * ri.i_plus)
    c2 = (1.0 - math.cos(phi)) / (2.0 * s * ri.i_minus)
    return Coefficients(c1, c2, phi, gamma)


def solve_coefficients(phi: float, gamma: float, spec: QuadratureSpec | None = None) -> Coefficients:
    """Coefficients that normalize the density and give ``E = -cos phi``.

    On the agreement set ``u v f(u, v) = +c1 h`` and on the disagreement set
    ``-c2 h``, with ``h`` the gamma-power base.  The two constraints

        S (c1 I+ + c2 I-) = 1,    S (c1 I+ - c2 I-) = cos phi

    are therefore diagonal in ``(c1, c2)``.
    """
    phi = check_angle(phi)
    gamma = check_gamma(gamma)
    return _solve_cached(phi, gamma, DEFAULT_QUADRATURE if spec is None else spec)


def coefficients_gamma0_closed(phi: float) -> Coefficients:
    """Closed-form coefficients of the ``gamma = 0`` member."""
    phi = check_angle(phi)
    c1 = (1.0 + math.cos(phi)) / (8.0 * (math.pi - phi))
    c2 = (1.0 - math.cos(phi)) / (8.0 * phi)
    return Coefficients(c1, c2, phi, 0.0)


def _sgn(x):
    # zero maps to +1
    return np.where(np.asarray(x) >= 0.0, 1, -1)


def outcome_A(x_angle: float, lam: HiddenVariable) -> int:
    """``sgn(x . lambda)`` for the setting at azimuth ``x_angle``; ``x . lambda = 0`` gives +1."""
    x = np.array([math.cos(x_angle), math.sin(x_angle), 0.0])
    return int(_sgn(float(x @ lam.cartesian())))


def outcome_B(y_angle: float, lam: HiddenVariable) -> int:
    """``-sgn(y . lambda)``, with the same +1 convention inside the sign."""
    return -outcome_A(y_angle, lam)


def verify_constraints(coeffs: Coefficients, spec: QuadratureSpec | None = None) -> tuple[float, float]:
    """Residuals of the normalization and correlation constraints.

    Integrates the unreduced kernel ``|u v| f(u, v)`` and ``u v f(u, v)``
    over the full circle, independently of the region-integral shortcut used
    by :func:`solve_coefficients`.  Returns ``(norm_residual, corr_residual)``.
    """
    phi, gamma = coeffs.phi, coeffs.gamma
    spec = (DEFAULT_QUADRATURE if spec is None else spec).with_breakpoints(
        sign_boundaries(phi, 2 * math.pi))
    s = theta_prefactor(gamma)

    def uv(x):
        return np.cos(x), np.cos(x - phi)

    def norm_integrand(x):
        u, v = uv(x)
        return np.abs(u * v) * weight_f(u, v, coeffs, gamma)

    def corr_integrand(x):
        u, v = uv(x)
        return u * v * weight_f(u, v, coeffs, gamma)

    norm = s * integrate(norm_integrand, 0.0, 2 * math.pi, spec)
    corr = s * integrate(corr_integrand, 0.0, 2 * math.pi, spec)
    return abs(norm - 1.0), abs(corr - math.cos(phi))
