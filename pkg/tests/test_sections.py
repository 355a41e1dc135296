import math

import numpy as np
import pytest

from gbspec.errors import ConstraintError, UsageError
from gbspec.sections import (LocalBasis, PiecewiseFn, SectionFamily,
                             basis_eval, hyperbolic, piecewise_antiderivative,
                             piecewise_derivative, piecewise_eval, polynomial,
                             trigonometric)
from oracles import gauss_legendre_split, sign_changes


def hat() -> PiecewiseFn:
    # unit hat on [0, 2]: v on the first interval, u - v on the second
    return PiecewiseFn(polynomial(), 1, np.array([0.0, 1.0, 2.0]),
                       np.array([[0.0, 1.0], [1.0, -1.0]]))


def random_pw(family, p, rng, m=3) -> PiecewiseFn:
    return PiecewiseFn(family, p, np.arange(m + 1.0),
                       rng.uniform(-1, 1, size=(m, p + 1)))


class TestFamilies:
    def test_phase_constraints(self):
        with pytest.raises(ConstraintError):
            hyperbolic(-1.0)
        with pytest.raises(ConstraintError):
            trigonometric(0.0)
        with pytest.raises(UsageError):
            SectionFamily("polynomial", 1.0)
        # trigonometric effective phase must stay below pi on every interval
        with pytest.raises(ConstraintError):
            PiecewiseFn(trigonometric(3.2), 2, np.array([0.0, 1.0]),
                        np.zeros((1, 3)))


class TestBasisEval:
    def test_polynomial_constant_slot(self):
        basis = LocalBasis(polynomial(), 2, 0.0)
        assert basis_eval(basis, 0, 0.7) == 1.0

    def test_hyperbolic_v_slot(self):
        basis = LocalBasis(hyperbolic(2.0), 3, 2.0)
        assert basis_eval(basis, 3, 0.5) == pytest.approx(math.sinh(1.0), abs=1e-15)

    def test_trigonometric_u_slot_quarter_period(self):
        basis = LocalBasis(trigonometric(math.pi / 2), 2, math.pi / 2)
        assert basis_eval(basis, 1, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_index_out_of_range(self):
        basis = LocalBasis(polynomial(), 2, 0.0)
        with pytest.raises(UsageError):
            basis_eval(basis, 3, 0.5)


class TestEval:
    def test_hat_midpoint(self):
        assert piecewise_eval(hat(), 0.5) == 0.5

    def test_compact_support(self):
        f = hat()
        assert piecewise_eval(f, 3.0) == 0.0
        assert piecewise_eval(f, -0.5) == 0.0

    def test_hyperbolic_interpolating_piece(self):
        # sinh(alpha t)/sinh(alpha) on [0, 1] with alpha = 2
        f = PiecewiseFn(hyperbolic(2.0), 1, np.array([0.0, 1.0]),
                        np.array([[0.0, 1.0 / math.sinh(2.0)]]))
        assert piecewise_eval(f, 0.5) == pytest.approx(
            math.sinh(1.0) / math.sinh(2.0), abs=1e-15)

    def test_right_endpoint_is_left_limit(self):
        assert piecewise_eval(hat(), 2.0) == 0.0
        assert piecewise_eval(hat(), 1.0) == 1.0  # right-continuous interior


class TestDerivative:
    def test_hat_rising_slope(self):
        assert piecewise_derivative(hat())(0.25) == pytest.approx(1.0)

    def test_hyperbolic_chain_rule_at_zero(self):
        f = PiecewiseFn(hyperbolic(2.0), 1, np.array([0.0, 1.0]),
                        np.array([[0.0, 1.0]]))  # sinh(2 tau)
        assert piecewise_derivative(f)(0.0) == pytest.approx(2.0)

    def test_cardinal_symmetry_point(self):
        from gbspec.cardinal import cardinal_spline
        cs = cardinal_spline(polynomial(), 2)
        assert piecewise_derivative(cs.pw)(1.5) == pytest.approx(0.0, abs=1e-14)

    def test_degree_zero_gives_zero_fn(self):
        f = PiecewiseFn(polynomial(), 0, np.array([0.0, 1.0]), np.array([[3.0]]))
        df = piecewise_derivative(f)
        assert df(0.3) == 0.0

    def test_interval_width_scaling(self):
        # v = tau on an interval of width 1/4 has global slope 4
        f = PiecewiseFn(polynomial(), 1, np.array([0.0, 0.25]),
                        np.array([[0.0, 1.0]]))
        assert piecewise_derivative(f)(0.1) == pytest.approx(4.0)


class TestAntiderivative:
    def test_constant_one(self):
        f = PiecewiseFn(polynomial(), 0, np.array([0.0, 1.0]), np.array([[1.0]]))
        assert piecewise_antiderivative(f)(1.0) == pytest.approx(1.0)

    def test_hat_total_integral(self):
        assert piecewise_antiderivative(hat())(2.0) == pytest.approx(1.0)

    def test_cosine_piece(self):
        eps = math.pi / 2
        f = PiecewiseFn(trigonometric(eps), 1, np.array([0.0, 1.0]),
                        np.array([[1.0, 0.0]]))  # cos(eps tau)
        assert piecewise_antiderivative(f)(1.0) == pytest.approx(2.0 / math.pi)

    def test_continuity_across_breakpoints(self, family):
        rng = np.random.default_rng(7)
        f = random_pw(family, 3, rng)
        anti = piecewise_antiderivative(f)
        for b in f.breakpoints[1:-1]:
            left = anti(b - 1e-12)
            right = anti(b)
            assert right == pytest.approx(left, abs=1e-10)


class TestExactness:
    def test_derivative_of_antiderivative(self, family):
        rng = np.random.default_rng(42)
        for p in (1, 2, 4):
            f = random_pw(family, p, rng)
            back = piecewise_derivative(piecewise_antiderivative(f))
            xs = rng.uniform(0.0, 3.0, 100)
            assert np.max(np.abs(back(xs) - f(xs))) <= 1e-12

    def test_integral_matches_quadrature(self, family):
        rng = np.random.default_rng(3)
        for p in (1, 3):
            f = random_pw(family, p, rng)
            exact = piecewise_antiderivative(f)(f.breakpoints[-1])
            quad = gauss_legendre_split(f, f.breakpoints)
            assert exact == pytest.approx(quad, abs=1e-10)


@pytest.mark.parametrize("family", [hyperbolic(2.0), trigonometric(1.0)],
                         ids=lambda f: f.tag)
def test_derived_pair_is_chebyshev(family):
    # any nontrivial a*u' + b*v' may change sign at most once on [0, 1]
    basis = LocalBasis(family, 2, family.phase)
    grid = np.linspace(0.0, 1.0, 1000)
    rng = np.random.default_rng(11)
    u = np.array([basis_eval(basis, 1, t) for t in grid])
    v = np.array([basis_eval(basis, 2, t) for t in grid])
    # derivatives of (u, v) stay inside span{u, v} for these families
    du, dv = family.phase * v, family.phase * u
    if family.tag == "trigonometric":
        du, dv = -family.phase * v, family.phase * u
    for _ in range(100):
        a, b = rng.uniform(-1, 1, 2)
        if abs(a) + abs(b) < 1e-3:
            continue
        assert sign_changes(a * du + b * dv) <= 1
