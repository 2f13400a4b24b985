"""Correlations of the model: quadrature, Monte Carlo, Bell and CHSH checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .model import (
    _agreement,
    _base,
    _sgn,
    check_angle,
    check_gamma,
    sign_boundaries,
    solve_coefficients,
    weight_f,
)
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate, theta_prefactor

__all__ = [
    "CorrelationEstimate",
    "BellCheckResult",
    "quantum_E",
    "model_E",
    "expectation_quadrature",
    "envelope",
    "sample_phi_marginal",
    "estimate_correlation_mc",
    "bell_original_check",
    "chsh_value",
    "TSIRELSON_ANGLES",
]

MIN_MC_SAMPLES = 100

# (a, b), (a, b'), (a', b), (a', b') relative angles of the maximal quantum violation
TSIRELSON_ANGLES = (math.pi / 4, 3 * math.pi / 4, math.pi / 4, math.pi / 4)


@dataclass(frozen=True)
class CorrelationEstimate:
    mean: float
    std_err: float
    n_accepted: int
    n_proposed: int
    seed: int


@dataclass(frozen=True)
class BellCheckResult:
    """Both sides of ``|E(x,y) - E(x,z)| <= 1 + E(y,z)``."""

    lhs: float
    rhs: float
    violated: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "violated", bool(self.lhs > self.rhs))


def quantum_E(phi: float) -> float:
    """Singlet-state correlation ``-cos phi``."""
    return -math.cos(phi)


def expectation_quadrature(phi: float, gamma: float, spec: QuadratureSpec | None = None) -> float:
    """Model correlation ``-S(gamma) * int cos phi' cos(phi' - phi) f dphi'`` over the circle.

    Uses the coefficients from :func:`~bell_mdl.model.solve_coefficients`, so
    the result reproduces ``-cos phi`` up to quadrature error.
    """
    phi = check_angle(phi)
    gamma = check_gamma(gamma)
    coeffs = solve_coefficients(phi, gamma, spec)
    spec = (DEFAULT_QUADRATURE if spec is None else spec).with_breakpoints(
        sign_boundaries(phi, 2 * math.pi))

    def integrand(x):
        u = np.cos(x)
        v = np.cos(x - phi)
        return u * v * weight_f(u, v, coeffs, gamma)

    return -theta_prefactor(gamma) * integrate(integrand, 0.0, 2 * math.pi, spec)


def model_E(gamma: float, spec: QuadratureSpec | None = None) -> Callable[[float], float]:
    """Correlation function of the gamma-member, for the Bell/CHSH checks."""
    gamma = check_gamma(gamma)
    return lambda phi: expectation_quadrature(phi, gamma, spec)


def envelope(phi: float, gamma: float, spec: QuadratureSpec | None = None) -> float:
    """Upper bound on the azimuthal density ``g`` used by the rejection sampler.

    ``cos^2 phi' + cos^2(phi' - phi) = 1 + cos phi cos(2 phi' - phi)`` ranges over
    ``[1 - |cos phi|, 1 + |cos phi|]``.
    """
    coeffs = solve_coefficients(phi, gamma, spec)
    a = abs(math.cos(phi))
    return max(coeffs.c1, coeffs.c2) * max((1 + a) ** gamma, (1 - a) ** gamma)


def _rng(seed: int, stream: int) -> np.random.Generator:
    # PCG64 seeded by SeedSequence(seed) with spawn key (stream,)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def _rejection_sample(phi, gamma, n, seed, stream, spec):
    phi = check_angle(phi)
    gamma = check_gamma(gamma)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    coeffs = solve_coefficients(phi, gamma, spec)
    bound = envelope(phi, gamma, spec)
    rate = 1.0 / (2 * math.pi * bound * theta_prefactor(gamma))
    rng = _rng(seed, stream)
    chunks = []
    have = 0
    proposed = 0
    while have < n:
        batch = int((n - have) / rate * 1.05) + 64
        x = rng.uniform(0.0, 2 * math.pi, batch)
        u = rng.uniform(0.0, bound, batch)
        c = np.where(_agreement(x, phi), coeffs.c1, coeffs.c2)
        accept = u <= c * _base(x, phi) ** gamma
        hits = np.flatnonzero(accept)
        if have + hits.size >= n:
            last = hits[n - have - 1]
            chunks.append(x[hits[: n - have]])
            proposed += last + 1
            have = n
        else:
            chunks.append(x[hits])
            proposed += batch
            have += hits.size
    return np.concatenate(chunks), int(proposed)


def sample_phi_marginal(phi: float, gamma: float, n: int, seed: int, stream: int = 0,
                        spec: QuadratureSpec | None = None) -> np.ndarray:
    """Draw ``n`` azimuths from the normalized density ``S(gamma) g(phi')``.

    Rejection sampling with a uniform proposal on ``[0, 2 pi)`` under the
    flat envelope from :func:`envelope`.  The stream is PCG64 keyed by
    ``(seed, stream)``, so a fixed pair always yields the same sequence and
    distinct ``stream`` values give independent runs.
    """
    return _rejection_sample(phi, gamma, n, seed, stream, spec)[0]


def estimate_correlation_mc(phi: float, gamma: float, n: int, seed: int, stream: int = 0,
                            spec: QuadratureSpec | None = None) -> CorrelationEstimate:
    """Monte Carlo estimate of ``<A B>`` from ``n`` accepted hidden variables.

    Outcomes only see the azimuth because ``sin theta >= 0``, so the polar
    angle is pinned to pi/2 and only ``phi'`` is sampled.
    """
    if n < MIN_MC_SAMPLES:
        raise DomainError(f"n must be >= {MIN_MC_SAMPLES}, got {n}")
    samples, proposed = _rejection_sample(phi, gamma, n, seed, stream, spec)
    a = _sgn(np.cos(samples))
    b = -_sgn(np.cos(samples - phi))
    ab = (a * b).astype(float)
    return CorrelationEstimate(
        mean=float(ab.mean()),
        std_err=float(ab.std(ddof=1) / math.sqrt(n)),
        n_accepted=n,
        n_proposed=proposed,
        seed=seed,
    )


def bell_original_check(phi_xy: float, phi_xz: float, phi_yz: float,
                        E: Callable[[float], float] = quantum_E) -> BellCheckResult:
    for name, value in (("phi_xy", phi_xy), ("phi_xz", phi_xz), ("phi_yz", phi_yz)):
        check_angle(value, name)
    return BellCheckResult(lhs=abs(E(phi_xy) - E(phi_xz)), rhs=1.0 + E(phi_yz))


def chsh_value(phi_ab: float, phi_ab2: float, phi_a2b: float, phi_a2b2: float,
               E: Callable[[float], float] = quantum_E) -> float:
    """``|E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|``; local models stay <= 2."""
    for name, value in (("phi_ab", phi_ab), ("phi_ab'", phi_ab2),
                        ("phi_a'b", phi_a2b), ("phi_a'b'", phi_a2b2)):
        check_angle(value, name)
    return abs(E(phi_ab) - E(phi_ab2)) + abs(E(phi_a2b) + E(phi_a2b2))
