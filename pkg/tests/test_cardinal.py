import math

import numpy as np
import pytest

from gbspec.cardinal import (cardinal_derivative, cardinal_spline,
                             fourier_phi)
from gbspec.errors import ConstraintError, UsageError
from gbspec.sections import (SectionFamily, hyperbolic, piecewise_derivative,
                             polynomial, trigonometric)
from oracles import central_second_difference, gauss_legendre_split


class TestConstruction:
    def test_polynomial_degree_one_is_unit_hat(self):
        cs = cardinal_spline(polynomial(), 1)
        assert cs(1.0) == 1.0
        assert cs(0.5) == 0.5
        assert cs.delta1 == 1.0

    def test_hyperbolic_peak_value(self):
        # delta1 = (alpha/2) coth(alpha/2); at alpha = 2 this is coth(1)
        cs = cardinal_spline(hyperbolic(2.0), 1)
        assert cs(1.0) == pytest.approx(1.0 / math.tanh(1.0), abs=1e-13)

    def test_polynomial_degree_two_values(self):
        cs = cardinal_spline(polynomial(), 2)
        assert cs(0.5) == pytest.approx(1.0 / 8.0, abs=1e-15)
        assert cs(1.5) == pytest.approx(3.0 / 4.0, abs=1e-15)

    def test_infeasible_trigonometric_phase(self):
        with pytest.raises(ConstraintError):
            cardinal_spline(trigonometric(3.5), 2)

    def test_degree_below_one(self):
        with pytest.raises(UsageError):
            cardinal_spline(polynomial(), 0)

    def test_support_and_positivity(self, family):
        for p in (1, 2, 5):
            cs = cardinal_spline(family, p)
            inner = np.linspace(0.01, p + 0.99, 200)
            assert np.all(cs(inner) > 0)
            assert cs(-0.5) == 0.0
            assert cs(p + 1.5) == 0.0


class TestProperties:
    @pytest.mark.parametrize("p", range(2, 7))
    def test_partition_of_unity(self, family, p):
        cs = cardinal_spline(family, p)
        total = sum(cs(float(k)) for k in range(1, p + 1))
        assert total == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("p", range(1, 7))
    def test_unit_integral(self, family, p):
        assert cardinal_spline(family, p).pw.integral() == pytest.approx(
            1.0, abs=1e-12)

    @pytest.mark.parametrize("p", range(2, 7))
    def test_symmetry_about_center(self, family, p):
        cs = cardinal_spline(family, p)
        c = (p + 1) / 2
        ts = np.linspace(0.0, c, 100)
        assert np.max(np.abs(cs(c + ts) - cs(c - ts))) <= 1e-12

    @pytest.mark.parametrize("p", range(2, 7))
    def test_convolution_relation(self, family, p):
        # phi_p(t) = int_0^1 phi_{p-1}(t - s) ds, via quadrature split at the
        # point where t - s crosses a knot
        lower = cardinal_spline(family, p - 1)
        cs = cardinal_spline(family, p)
        for t in np.linspace(0.1, p + 0.9, 50):
            frac = t - math.floor(t)
            edges = np.unique(np.clip([0.0, frac, 1.0], 0.0, 1.0))
            val = gauss_legendre_split(lambda s: lower(t - s), edges)
            assert val == pytest.approx(float(cs(t)), abs=1e-10)

    @pytest.mark.parametrize("p1,p2", [(2, 2), (3, 2)])
    @pytest.mark.parametrize("k", [-2, -1, 0, 1, 2])
    def test_inner_products(self, family, p1, p2, k):
        # int phi_p1^{U,V}(t) phi_p2(t + k) dt = phi_{p1+p2+1}^{U,V}(p2+1-k)
        # with a polynomial second factor
        lhs_a = cardinal_spline(family, p1)
        lhs_b = cardinal_spline(polynomial(), p2)
        rhs = cardinal_spline(family, p1 + p2 + 1)
        edges = np.arange(0.0, p1 + 2.0, 0.5)
        val = gauss_legendre_split(lambda t: lhs_a(t) * lhs_b(t + k), edges)
        assert val == pytest.approx(float(rhs(p2 + 1 - k)), abs=1e-8)

    @pytest.mark.parametrize("tag", ["hyperbolic", "trigonometric"])
    @pytest.mark.parametrize("p", range(1, 6))
    def test_small_phase_limit(self, tag, p):
        generalized = cardinal_spline(SectionFamily(tag, 1e-3), p)
        plain = cardinal_spline(polynomial(), p)
        ts = np.linspace(0.0, p + 1.0, 400)
        assert np.max(np.abs(generalized(ts) - plain(ts))) <= 1e-4


class TestSmoothness:
    @staticmethod
    def left_limit(pw, k):
        # restrict to the first k pieces so the breakpoint becomes the right
        # endpoint, where evaluation takes the left limit
        from gbspec.sections import PiecewiseFn
        clipped = PiecewiseFn(pw.family, pw.degree, pw.breakpoints[:k + 1],
                              pw.coeffs[:k])
        return float(clipped(pw.breakpoints[k]))

    @pytest.mark.parametrize("p", [2, 3, 4, 5])
    def test_one_sided_derivatives_agree(self, family, p):
        # global C^{p-1} smoothness at the interior integer breakpoints
        pw = cardinal_spline(family, p).pw
        for _ in range(p):
            for k in range(1, p + 1):
                t = float(pw.breakpoints[k])
                assert self.left_limit(pw, k) == pytest.approx(
                    float(pw(t)), abs=1e-10)
            pw = piecewise_derivative(pw)


class TestDerivative:
    def test_symmetry_maximum(self):
        cs = cardinal_spline(polynomial(), 2)
        assert cardinal_derivative(cs, 1)(1.5) == pytest.approx(0.0, abs=1e-14)

    def test_second_derivative_against_finite_differences(self):
        cs = cardinal_spline(polynomial(), 3)
        oracle = central_second_difference(lambda t: float(cs(t)), 2.0)
        assert oracle == pytest.approx(-2.0, abs=1e-4)
        assert cardinal_derivative(cs, 2)(2.0) == pytest.approx(-2.0, abs=1e-12)

    def test_derivative_integrates_to_zero(self, family):
        d = cardinal_derivative(cardinal_spline(family, 4), 1)
        assert d.integral() == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("p,r", [(3, 1), (4, 2), (5, 3)])
    def test_recurrence_matches_direct_differentiation(self, family, p, r):
        cs = cardinal_spline(family, p)
        rec = cardinal_derivative(cs, r)
        direct = cs.pw
        for _ in range(r):
            direct = piecewise_derivative(direct)
        ts = np.linspace(0.05, p + 0.95, 97)
        assert np.max(np.abs(rec(ts) - direct(ts))) <= 1e-9

    def test_order_out_of_range(self):
        cs = cardinal_spline(polynomial(), 3)
        for r in (0, 3):
            with pytest.raises(UsageError):
                cardinal_derivative(cs, r)


class TestFourier:
    def test_unit_mass_at_zero(self, family):
        for p in (1, 2, 4):
            assert fourier_phi(family, p, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_hyperbolic_degree_one_at_zero(self):
        assert fourier_phi(hyperbolic(2.0), 1, 0.0) == pytest.approx(1.0, abs=1e-13)

    def test_against_numerical_fourier_integral(self):
        fam = trigonometric(math.pi / 2)
        cs = cardinal_spline(fam, 1)
        theta = math.pi
        re = gauss_legendre_split(lambda t: cs(t) * np.cos(theta * t),
                                  [0.0, 1.0, 2.0])
        im = gauss_legendre_split(lambda t: cs(t) * -np.sin(theta * t),
                                  [0.0, 1.0, 2.0])
        val = fourier_phi(fam, 1, theta)
        assert abs(val - complex(re, im)) <= 1e-8

    def test_removable_singularities(self, family):
        thetas = np.array([1e-9, 1e-7, 1e-3])
        vals = fourier_phi(family, 3, thetas)
        assert np.all(np.isfinite(vals.real)) and np.all(np.isfinite(vals.imag))
        if family.tag == "trigonometric":
            near_pole = fourier_phi(family, 2, family.phase + 1e-10)
            assert np.isfinite(near_pole.real)

    def test_tiny_phase_falls_back_to_polynomial(self):
        th = 1.3
        hyp = fourier_phi(hyperbolic(1e-9), 2, th)
        poly = fourier_phi(polynomial(), 2, th)
        assert hyp == pytest.approx(poly, abs=1e-12)
