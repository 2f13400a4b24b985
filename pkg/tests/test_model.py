import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bell_mdl.errors import DomainError
from bell_mdl.model import (
    Coefficients,
    HiddenVariable,
    coefficients_gamma0_closed,
    outcome_A,
    outcome_B,
    reduced_density_g,
    region_integrals,
    solve_coefficients,
    verify_constraints,
    weight_f,
)

from conftest import oracle_boundaries, oracle_coefficients

GAMMAS = [-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4]
PHI_GRID = np.linspace(0.05, math.pi - 0.05, 50)


def unit(phi=1.0, gamma=0.0, c1=1.0, c2=5.0):
    return Coefficients(c1, c2, phi, gamma)


class TestWeightF:
    def test_same_sign(self):
        assert weight_f(1.0, 1.0, unit(), 0.0) == 1.0

    def test_opposite_sign(self):
        assert weight_f(1.0, -1.0, unit(), 0.0) == 5.0

    def test_gamma_one(self):
        assert weight_f(0.5, 0.5, unit(c2=1.0, gamma=1.0), 1.0) == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("u,v", [(0.0, 1.0), (1.0, 0.0), (0.0, 0.0)])
    def test_zero_is_domain_error(self, u, v):
        with pytest.raises(DomainError):
            weight_f(u, v, unit(), 0.0)

    @settings(max_examples=100, deadline=None)
    @given(u=st.floats(0.01, 3) | st.floats(-3, -0.01), v=st.floats(0.01, 3) | st.floats(-3, -0.01),
           gamma=st.sampled_from(GAMMAS), mu=st.sampled_from([0.5, 2.0, 3.0]))
    def test_homogeneous_of_degree_2_gamma_minus_2(self, u, v, gamma, mu):
        c = unit(gamma=gamma)
        lhs = weight_f(mu * u, mu * v, c, gamma)
        rhs = mu ** (2 * (gamma - 1)) * weight_f(u, v, c, gamma)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestReducedDensity:
    def test_gamma_zero_regions(self):
        c = unit(phi=math.pi / 3, c1=0.7, c2=0.2)
        assert reduced_density_g(0.1, math.pi / 3, c, 0.0) == 0.7  # both cosines positive
        assert reduced_density_g(math.pi / 2 + 0.2, math.pi / 3, c, 0.0) == 0.2  # cos < 0, cos(x - phi) > 0

    def test_gamma_one_value(self):
        c = unit(phi=math.pi / 2, c1=1.0, gamma=1.0)
        assert reduced_density_g(0.0, math.pi / 2, c, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_matches_unreduced_form(self):
        phi, gamma = 1.1, 0.3
        c = solve_coefficients(phi, gamma)
        x = np.linspace(0.01, 2 * math.pi - 0.01, 997)
        u, v = np.cos(x), np.cos(x - phi)
        np.testing.assert_allclose(reduced_density_g(x, phi, c, gamma),
                                   np.abs(u * v) * weight_f(u, v, c, gamma), rtol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(x=st.floats(0, 2 * math.pi), phi=st.floats(0.01, math.pi - 0.01), gamma=st.sampled_from(GAMMAS))
    def test_nonnegative(self, x, phi, gamma):
        assert reduced_density_g(x, phi, solve_coefficients(phi, gamma), gamma) >= 0.0


def trapezoid_region_integrals(phi, gamma, n=1_000_000):
    """Dense trapezoid rule on each sign panel of [0, 2 pi]."""
    edges = [0.0, *oracle_boundaries(phi, 2 * math.pi), 2 * math.pi]
    i_plus = i_minus = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = max(16, int(n * (hi - lo) / (2 * math.pi)))
        x = np.linspace(lo, hi, m + 1)
        y = (np.cos(x) ** 2 + np.cos(x - phi) ** 2) ** gamma
        part = np.trapezoid(y, x)
        mid = 0.5 * (lo + hi)
        if math.cos(mid) * math.cos(mid - phi) > 0:
            i_plus += part
        else:
            i_minus += part
    return i_plus, i_minus


class TestRegionIntegrals:
    def test_gamma_zero_pi_third(self):
        r = region_integrals(math.pi / 3, 0.0)
        assert r.i_plus == pytest.approx(4 * math.pi / 3, abs=1e-12)
        assert r.i_minus == pytest.approx(2 * math.pi / 3, abs=1e-12)

    def test_gamma_zero_right_angle(self):
        r = region_integrals(math.pi / 2, 0.0)
        assert r.i_plus == pytest.approx(math.pi, abs=1e-12)
        assert r.i_minus == pytest.approx(math.pi, abs=1e-12)

    def test_against_dense_trapezoid(self):
        r = region_integrals(math.pi / 4, 0.3)
        ip, im = trapezoid_region_integrals(math.pi / 4, 0.3)
        assert abs(r.i_plus - ip) < 1e-7
        assert abs(r.i_minus - im) < 1e-7

    @pytest.mark.parametrize("phi", PHI_GRID[::7])
    def test_gamma_zero_total(self, phi):
        r = region_integrals(phi, 0.0)
        assert r.i_plus + r.i_minus == pytest.approx(2 * math.pi, abs=1e-10)
        assert r.i_plus == pytest.approx(2 * (math.pi - phi), abs=1e-10)


class TestSolveCoefficients:
    def test_right_angle(self):
        c = solve_coefficients(math.pi / 2, 0.0)
        assert c.c1 == pytest.approx(1 / (4 * math.pi), abs=1e-12)
        assert c.c2 == pytest.approx(1 / (4 * math.pi), abs=1e-12)

    def test_gamma_zero_closed_form(self):
        for phi in PHI_GRID:
            c = solve_coefficients(phi, 0.0)
            closed = coefficients_gamma0_closed(phi)
            assert abs(c.c1 - closed.c1) < 1e-8
            assert abs(c.c2 - closed.c2) < 1e-8

    @pytest.mark.parametrize("phi,gamma", [(math.pi / 3, 0.2), (0.4, -0.35), (2.5, 0.4), (1.2, -0.1)])
    def test_against_direct_2x2_solve(self, phi, gamma):
        c = solve_coefficients(phi, gamma)
        c1, c2 = oracle_coefficients(phi, gamma)
        assert abs(c.c1 - c1) < 1e-8
        assert abs(c.c2 - c2) < 1e-8

    @pytest.mark.parametrize("gamma", GAMMAS)
    def test_positive_and_mirror_symmetric(self, gamma):
        for phi in PHI_GRID:
            c = solve_coefficients(phi, gamma)
            mirror = solve_coefficients(math.pi - phi, gamma)
            assert c.c1 > 0 and c.c2 > 0
            assert abs(c.c2 - mirror.c1) < 1e-8

    def test_provenance(self):
        c = solve_coefficients(1.0, 0.1)
        assert (c.phi, c.gamma) == (1.0, 0.1)

    @pytest.mark.parametrize("phi,gamma", [(0.0, 0.0), (math.pi, 0.0), (-1, 0.0), (1.0, -0.5), (1.0, -0.6)])
    def test_domain(self, phi, gamma):
        with pytest.raises(DomainError):
            solve_coefficients(phi, gamma)


class TestClosedForm:
    def test_right_angle(self):
        c = coefficients_gamma0_closed(math.pi / 2)
        assert c.c1 == pytest.approx(1 / (4 * math.pi), rel=1e-15)
        assert c.c2 == pytest.approx(1 / (4 * math.pi), rel=1e-15)

    def test_pi_third(self):
        c = coefficients_gamma0_closed(math.pi / 3)
        assert c.c1 == pytest.approx(1.5 / (8 * 2 * math.pi / 3), rel=1e-15)
        assert c.c2 == pytest.approx(0.5 / (8 * math.pi / 3), rel=1e-15)
        assert c.c1 == pytest.approx(0.0895247, abs=1e-7)
        assert c.c2 == pytest.approx(0.0596831, abs=1e-7)

    @settings(max_examples=100)
    @given(phi=st.floats(1e-3, math.pi - 1e-3))
    def test_mirror(self, phi):
        assert coefficients_gamma0_closed(phi).c2 == pytest.approx(coefficients_gamma0_closed(math.pi - phi).c1, rel=1e-12)


class TestOutcomes:
    def test_A(self):
        assert outcome_A(0.0, HiddenVariable(math.pi / 2, 0.0)) == 1
        assert outcome_A(0.0, HiddenVariable(math.pi / 2, math.pi)) == -1
        assert outcome_A(math.pi / 4, HiddenVariable(math.pi / 3, math.pi / 4)) == 1

    def test_B(self):
        assert outcome_B(0.0, HiddenVariable(math.pi / 2, 0.0)) == -1
        assert outcome_B(0.0, HiddenVariable(math.pi / 2, math.pi)) == 1

    def test_pole_resolves_to_plus(self):
        assert outcome_A(0.3, HiddenVariable(0.0, 1.0)) == 1

    @settings(max_examples=100)
    @given(a=st.floats(0, 2 * math.pi), theta=st.floats(0, math.pi), phi=st.floats(0, 2 * math.pi, exclude_max=True))
    def test_B_is_minus_A(self, a, theta, phi):
        lam = HiddenVariable(theta, phi)
        assert outcome_B(a, lam) == -outcome_A(a, lam)
        assert np.linalg.norm(lam.cartesian()) == pytest.approx(1.0, rel=1e-15)

    def test_hidden_variable_ranges(self):
        with pytest.raises(DomainError):
            HiddenVariable(-0.1, 0.0)
        with pytest.raises(DomainError):
            HiddenVariable(0.1, 2 * math.pi)


class TestVerifyConstraints:
    def test_solved(self):
        norm, corr = verify_constraints(solve_coefficients(math.pi / 3, 0.0))
        assert norm < 1e-8 and corr < 1e-8

    def test_scaled(self):
        norm, _ = verify_constraints(solve_coefficients(math.pi / 3, 0.0).scaled(2.0))
        assert norm == pytest.approx(1.0, abs=1e-8)

    def test_closed_form_at_stationary_angle(self):
        norm, corr = verify_constraints(coefficients_gamma0_closed(0.81047))
        assert norm < 1e-8 and corr < 1e-8

    @pytest.mark.parametrize("gamma", [-0.4, 0.25])
    def test_nonzero_gamma(self, gamma):
        norm, corr = verify_constraints(solve_coefficients(2.2, gamma))
        assert norm < 1e-8 and corr < 1e-8

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            Coefficients(0.0, 1.0, 1.0, 0.0)
