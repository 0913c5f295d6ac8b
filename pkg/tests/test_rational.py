import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mslab.errors import PoleAtOrigin, PoleInDiskWarning, PoleOnCircle, QuadratureDivergence, ZeroPolynomial
from mslab.config import use_tolerances
from mslab.rational import (
    BoundarySymbol,
    ComplexPoly,
    RationalFn,
    boundary_inner_product,
    hardy_inner_product,
    poly_roots,
    taylor_coeffs,
)

from helpers import SQRT6, random_rational

complex_coeff = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


class TestComplexPoly:
    def test_trailing_zeros_dropped(self):
        p = ComplexPoly([1, 2, 0, 0])
        assert p.degree == 1
        assert ComplexPoly([0, 0]).is_zero()
        assert ComplexPoly().degree == -1

    def test_arithmetic(self):
        p = ComplexPoly([1, 1])
        q = ComplexPoly([-1, 1])
        assert (p * q).allclose(ComplexPoly([-1, 0, 1]))
        assert (p - p).is_zero()
        assert (p ** 3)(2.0) == pytest.approx(27)

    def test_deflate(self):
        p = ComplexPoly.from_roots([0.5, 2j])
        assert p.deflate(0.5).allclose(ComplexPoly([-2j, 1]))

    def test_coefficients_are_read_only(self):
        p = ComplexPoly([1, 2])
        with pytest.raises(ValueError):
            p.coeffs[0] = 5

    def test_json_round_trip(self):
        p = ComplexPoly([1 + 2j, -0.5])
        assert ComplexPoly.from_json(p.to_json()).allclose(p, tol=0)


class TestPolyRoots:
    def test_difference_of_squares(self):
        roots = poly_roots(ComplexPoly([-1, 0, 1]))
        assert [m for _, m in roots] == [1, 1]
        assert roots[0][0] == pytest.approx(-1)
        assert roots[1][0] == pytest.approx(1)

    def test_quadratic_with_complex_roots(self):
        roots = poly_roots(ComplexPoly([1, -2, 3]))
        got = sorted((r for r, _ in roots), key=lambda r: r.imag)
        assert got[0] == pytest.approx((1 - 1j * math.sqrt(2)) / 3, abs=1e-14)
        assert got[1] == pytest.approx((1 + 1j * math.sqrt(2)) / 3, abs=1e-14)

    def test_double_root_clusters(self):
        v = 4 * math.sqrt(3) - 7
        # num(theta) - v den(theta) for theta = z (z - 1/2) / (1 - z/2)
        p = ComplexPoly([0, -0.5, 1]) - ComplexPoly([1, -0.5]) * v
        roots = poly_roots(p)
        assert len(roots) == 1
        assert roots[0][1] == 2
        assert roots[0][0] == pytest.approx(2 - math.sqrt(3), abs=1e-8)

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ZeroPolynomial):
            poly_roots(ComplexPoly())

    def test_roots_at_origin_exact(self):
        roots = poly_roots(ComplexPoly([0, 0, 0, 1]))
        assert roots == [(0j, 3)]

    def test_multiplicities_sum_to_degree(self, rng):
        for deg in range(1, 13):
            c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            assert sum(m for _, m in poly_roots(ComplexPoly(c))) == deg

    @settings(max_examples=60, deadline=None)
    @given(st.lists(complex_coeff, min_size=1, max_size=12), complex_coeff.filter(lambda c: abs(c) > 0.1))
    def test_reconstruction(self, roots, lead):
        p = ComplexPoly.from_roots(roots, leading=lead)
        rebuilt = ComplexPoly([lead])
        for r, m in poly_roots(p):
            rebuilt = rebuilt * ComplexPoly([-r, 1]) ** m
        scale = np.max(np.abs(p.coeffs))
        assert np.max(np.abs(rebuilt.coeffs - p.coeffs)) < 1e-8 * scale


class TestRationalFn:
    def test_denominator_made_monic(self):
        f = RationalFn([2, 4], [2, -1])
        assert f.den.leading == 1
        assert f(0.3) == pytest.approx((2 + 4 * 0.3) / (2 - 0.3))

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroPolynomial):
            RationalFn([1], [])

    def test_field_operations(self):
        f = RationalFn([1], [1, -0.5])
        g = RationalFn([0, 1], [1, 0.25])
        z = 0.3 - 0.2j
        assert (f + g)(z) == pytest.approx(f(z) + g(z))
        assert (f * g)(z) == pytest.approx(f(z) * g(z))
        assert (f / g)(z) == pytest.approx(f(z) / g(z))
        assert (1 - f)(z) == pytest.approx(1 - f(z))

    def test_derivative(self):
        f = RationalFn([1, 2], [1, -0.5])
        h = 1e-6
        z = 0.2
        fd = (f(z + h) - f(z - h)) / (2 * h)
        assert f.derivative_at(z, 1) == pytest.approx(fd, rel=1e-8)

    def test_circle_pole_detected(self):
        with pytest.raises(PoleOnCircle):
            RationalFn([1], [1, -1]).check_circle()


class TestBoundaryInnerProduct:
    def test_geometric_series(self):
        f = RationalFn([1], [1, -0.5])
        g = RationalFn([0, 1], [1, -0.5])
        # sum_{n >= 0} (1/2)^n (1/2)^(n+1)
        oracle = sum(0.5 ** (2 * n + 1) for n in range(80))
        assert boundary_inner_product(f, g) == pytest.approx(oracle, abs=1e-13)
        assert oracle == pytest.approx(2 / 3)

    def test_monomials_orthonormal(self):
        # exact up to rounding of the node values: a few ulp
        eps = np.finfo(float).eps
        for n in range(33):
            for m in range(33):
                val = boundary_inner_product(RationalFn.z(n), RationalFn.z(m))
                assert abs(val - (n == m)) < 10 * eps

    def test_example_v(self):
        theta = RationalFn([0, -0.5, 1], [1, -0.5])
        h = RationalFn(np.array([2, 1, -1]) / SQRT6)
        assert boundary_inner_product(theta * h, h) == pytest.approx(-1 / 3, abs=1e-13)
        sym = BoundarySymbol([(theta * h, h)])
        assert boundary_inner_product(sym, RationalFn(1.0)) == pytest.approx(-1 / 3, abs=1e-13)

    def test_pole_on_circle(self):
        with pytest.raises(PoleOnCircle):
            boundary_inner_product(RationalFn([1], [1, 1]), RationalFn(1.0))

    def test_divergence_at_cap(self):
        sharp = RationalFn([1], [1, -0.999])
        with use_tolerances(quad_max=256):
            with pytest.raises(QuadratureDivergence):
                boundary_inner_product(sharp, sharp)

    def test_symbol_conjugation(self):
        z = RationalFn.z()
        sym = BoundarySymbol([(z, 1.0)])
        assert boundary_inner_product(sym.conj(), RationalFn(1.0)) == pytest.approx(0, abs=1e-15)


class TestTaylor:
    def test_geometric(self):
        assert np.allclose(taylor_coeffs(RationalFn([1], [1, -0.5]), 3), [1, 0.5, 0.25])

    def test_example_h(self):
        h = RationalFn(np.array([2, 1, -1]) / SQRT6)
        assert np.allclose(taylor_coeffs(h, 3), np.array([2, 1, -1]) / SQRT6, atol=1e-15)

    def test_pole_at_origin(self):
        with pytest.raises(PoleAtOrigin):
            taylor_coeffs(RationalFn([1], [0, 1]), 3)

    def test_pole_in_disk_warns(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            taylor_coeffs(RationalFn([1], [1, -2]), 4)
        assert any(issubclass(w.category, PoleInDiskWarning) for w in caught)

    def test_degree_four_cross_oracle(self, rng):
        f = random_rational(rng, 4, 4)
        g = random_rational(rng, 4, 4)
        assert abs(hardy_inner_product(f, g) - boundary_inner_product(f, g)) < 1e-9
