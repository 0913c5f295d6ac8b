"""Finite Blaschke products ``c * prod (z - a) / (1 - conj(a) z)``."""

import itertools
from typing import NamedTuple

import numpy as np

from . import _json
from .errors import InvalidBlaschke, NearPole, VNotInDisk
from .rational import ComplexPoly, RationalFn, poly_roots

UNIMODULAR_TOL = 1e-12
ZERO_MARGIN = 1e-10


def _zero_key(a):
    return (round(a.real, 12), round(a.imag, 12))


class BlaschkeProduct:
    """Finite Blaschke product with a global unimodular constant.

    Parameters
    ----------
    zeros : iterable
        Either complex points (repeat a point for multiplicity) or
        ``(point, multiplicity)`` pairs.
    constant : complex
        Unimodular prefactor.

    A product with no zeros is the constant function; it only appears as
    the trivial divisor.
    """

    __slots__ = ("constant", "zeros")

    def __init__(self, zeros=(), constant=1.0):
        constant = complex(constant)
        if abs(abs(constant) - 1) > UNIMODULAR_TOL:
            raise InvalidBlaschke(f"constant {constant} is not unimodular")
        merged = {}
        for item in zeros:
            if isinstance(item, (tuple, list)) and len(item) == 2:
                point, mult = complex(item[0]), int(item[1])
            else:
                point, mult = complex(item), 1
            if mult < 1:
                raise InvalidBlaschke("multiplicities must be positive")
            if abs(point) >= 1 - ZERO_MARGIN:
                raise InvalidBlaschke(f"zero {point} is not inside the unit disk")
            merged[point] = merged.get(point, 0) + mult
        self.constant = constant
        self.zeros = tuple(sorted(merged.items(), key=lambda pm: _zero_key(pm[0])))

    @property
    def degree(self):
        return sum(m for _, m in self.zeros)

    @property
    def points(self):
        """Zeros expanded with repetition, in canonical order."""
        return tuple(p for p, m in self.zeros for _ in range(m))

    def multiplicity(self, point, tol=1e-12):
        return sum(m for p, m in self.zeros if abs(p - point) <= tol)

    def __call__(self, z):
        return bp_eval(self, z)

    def to_rational(self):
        return bp_to_rational(self)

    def deriv_at(self, z, order=1):
        return self.to_rational().derivative_at(z, order)

    def without_zero(self, point):
        """The quotient by one factor ``(z - point)/(1 - conj(point) z)``."""
        out = []
        removed = False
        for p, m in self.zeros:
            if not removed and p == point:
                m -= 1
                removed = True
            if m:
                out.append((p, m))
        if not removed:
            raise InvalidBlaschke(f"{point} is not a zero")
        return BlaschkeProduct(out, self.constant)

    def divide(self, phi):
        """``self / phi`` as a Blaschke product; ``phi`` must divide ``self``."""
        remaining = dict(self.zeros)
        for p, m in phi.zeros:
            if remaining.get(p, 0) < m:
                raise InvalidBlaschke("divisor does not divide this product")
            remaining[p] -= m
        return BlaschkeProduct([(p, m) for p, m in remaining.items() if m], self.constant / phi.constant)

    def __mul__(self, other):
        if not isinstance(other, BlaschkeProduct):
            return NotImplemented
        return BlaschkeProduct(list(self.zeros) + list(other.zeros), self.constant * other.constant)

    def to_json(self):
        return {
            "constant": _json.cplx(self.constant),
            "zeros": [{"point": _json.cplx(p), "mult": m} for p, m in self.zeros],
        }

    @classmethod
    def from_json(cls, obj):
        zeros = [(_json.parse_cplx(z["point"]), int(z.get("mult", 1))) for z in obj.get("zeros", [])]
        return cls(zeros, _json.parse_cplx(obj.get("constant", [1.0, 0.0])))

    def __repr__(self):
        zs = ", ".join(f"{complex(np.round(p, 10))}^{m}" if m > 1 else f"{complex(np.round(p, 10))}" for p, m in self.zeros)
        return f"BlaschkeProduct([{zs}], constant={complex(np.round(self.constant, 12))})"


def bp_eval(theta, z):
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, theta.constant, dtype=complex)
    for a, m in theta.zeros:
        den = 1 - np.conj(a) * z
        if np.any(np.abs(den) <= 1e-12):
            raise NearPole(f"evaluation point too close to the pole 1/conj({a})")
        out = out * ((z - a) / den) ** m
    return out if out.ndim else complex(out)


def _num_den(theta):
    """Unnormalized numerator and denominator (den(0) = 1)."""
    num = ComplexPoly.from_roots(theta.points, leading=theta.constant)
    den = ComplexPoly([1.0])
    for a in theta.points:
        den = den * ComplexPoly([1.0, -np.conj(a)])
    return num, den


def bp_to_rational(theta):
    return RationalFn(*_num_den(theta))


def _check_v(v):
    v = complex(v)
    if abs(v) >= 1 - ZERO_MARGIN:
        raise VNotInDisk(f"|v| = {abs(v):.6g} is not < 1")
    return v


def solve_theta_eq(theta, v, cluster_tol=None):
    """Solutions of ``theta(lambda) = v`` in the disk, with multiplicities.

    A finite Blaschke product of degree ``n`` takes every value in the disk
    exactly ``n`` times, so the multiplicities always sum to ``n``.
    """
    v = _check_v(v)
    num, den = _num_den(theta)
    roots = poly_roots(num - den * v, cluster_tol=cluster_tol)
    inside = [(r, m) for r, m in roots if abs(r) < 1]
    total = sum(m for _, m in inside)
    if total != theta.degree:
        raise AssertionError(f"found {total} solutions in the disk, expected {theta.degree}")
    return inside


def _probe_point(zeros):
    for z0 in (0.0, 0.5, -0.5, 0.5j, -0.5j):
        if all(abs(z0 - p) > 1e-3 for p, _ in zeros):
            return z0
    return 0.25 + 0.25j


def frostman_shift(theta, v):
    """Frostman shift ``(theta - v) / (1 - conj(v) theta)`` as a Blaschke product.

    The zeros are the solutions of ``theta = v``; the unimodular constant is
    recovered by evaluating both sides at a probe point away from the zeros.
    """
    v = _check_v(v)
    if v == 0:
        return theta
    zeros = solve_theta_eq(theta, v)
    bare = BlaschkeProduct(zeros, 1.0)
    z0 = _probe_point(zeros)
    t0 = bp_eval(theta, z0)
    target = (t0 - v) / (1 - np.conj(v) * t0)
    c = target / bp_eval(bare, z0)
    return BlaschkeProduct(zeros, c / abs(c))


def divisors(theta):
    """All Blaschke divisors of ``theta`` with constant 1.

    Ordered by degree, then by the canonically sorted zero list; there are
    ``prod (m_i + 1)`` of them, including the constant ``1`` and ``theta``
    itself (with constant 1).
    """
    ranges = [range(m + 1) for _, m in theta.zeros]
    out = []
    for choice in itertools.product(*ranges):
        zs = [(p, k) for (p, _), k in zip(theta.zeros, choice) if k]
        out.append(BlaschkeProduct(zs, 1.0))
    out.sort(key=lambda phi: (phi.degree, [_zero_key(p) for p in phi.points]))
    return out


class SpectrumSet(NamedTuple):
    disk: list
    circle: frozenset


def spectrum_set(theta):
    """Closure of the zero set plus the support of the singular measure.

    For a finite Blaschke product the zero set is finite and there is no
    singular factor, so the part on the circle is always empty.
    """
    return SpectrumSet([p for p, _ in theta.zeros], frozenset())


def critical_points(theta):
    """Zeros of ``theta'`` (exploratory; no hull inclusion is asserted)."""
    f = theta.to_rational()
    d = f.num.deriv() * f.den - f.num * f.den.deriv()
    if d.is_zero() or d.degree < 1:
        return []
    return poly_roots(d)
