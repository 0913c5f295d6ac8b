"""Nearly S*-invariant subspaces ``M = h K_theta``.

``h`` is the extremal function of ``M`` (unit norm, ``h(0) > 0``) and
multiplication by ``h`` maps ``K_theta`` isometrically onto ``M``. Elements
of ``M`` are therefore handled through their ``K_theta`` coordinates: the
vector ``x`` stands for the function ``h * sum_k x_k e_k``.
"""

import math

import numpy as np

from .blaschke import BlaschkeProduct, _check_v
from .errors import (
    AllVanishAtOrigin,
    ClarkBoundary,
    NotIsometric,
    NotNormalized,
    NotPositiveAtOrigin,
    PoleInDisk,
    SingularGram,
    ThetaNotVanishingAtZero,
)
from .model_space import ModelSpace, ModelVector, _check_lambda, kernel_function
from .rational import ComplexPoly, RationalFn, boundary_gram, boundary_inner_product, circle_mean

GRAM_COND_MAX = 1e10
ISOMETRY_TOL = 1e-8
NORM_TOL = 1e-9
CLARK_MARGIN = 1e-10
# Components of v below this are quadrature noise and are set to zero.
V_NOISE = 1e-14


class NearlySpace:
    """The triple ``(h, K_theta, v)`` with ``v = <theta, |h|^2>``.

    Build instances with :func:`make_nearly_space`, which validates the
    isometry and computes ``v``.
    """

    def __init__(self, h, ms, v):
        self.h = h
        self.ms = ms
        self.v = complex(v)

    @property
    def theta(self):
        return self.ms.theta

    @property
    def dim(self):
        return self.ms.dim

    def function(self, coords):
        """Element ``h * f`` of ``M`` for ``f`` given by TM coordinates."""
        if not isinstance(coords, ModelVector):
            coords = ModelVector(self.ms, coords)
        return self.h * coords.to_rational()

    def coords(self, f):
        """TM coordinates of ``P_theta(conj(h) f)``, i.e. of ``P_M f`` divided by ``h``."""
        h = self.h
        fn = f if callable(f) else RationalFn.coerce(f)
        if isinstance(fn, RationalFn):
            fn.check_circle()

        def sampler(z):
            return (fn(z) * np.conj(h(z)))[None, :] * self.ms.basis_values(z).conj()

        return ModelVector(self.ms, circle_mean(sampler))

    def to_json(self):
        return {
            "h": self.h.to_json(),
            "theta": self.theta.to_json(),
            "zero_order": [[complex(a).real, complex(a).imag] for a in self.ms.zero_order],
        }

    @classmethod
    def from_json(cls, obj):
        theta = BlaschkeProduct.from_json(obj["theta"])
        order = obj.get("zero_order")
        if order is not None:
            order = [complex(*z) if isinstance(z, (list, tuple)) else complex(z) for z in order]
        return make_nearly_space(RationalFn.from_json(obj["h"]), theta, order)

    def __repr__(self):
        return f"NearlySpace(dim={self.dim}, v={self.v:.6g})"


def extremal_from_span(fs):
    """Extremal function of ``M = span(fs)``.

    Solves the Gram system for ``k = P_M 1`` (so ``<k, f_j> = conj(f_j(0))``)
    and normalizes ``h = k / sqrt(k(0))``.

    Returns
    -------
    h : RationalFn
    x : ndarray
        Coefficients of ``k`` in terms of ``fs``.
    """
    fs = [RationalFn.coerce(f).check_circle() for f in fs]
    G = boundary_gram(fs, fs)
    if np.linalg.cond(G) >= GRAM_COND_MAX:
        raise SingularGram("spanning functions are (numerically) dependent")
    c = np.array([np.conj(f(0.0)) for f in fs])
    if np.max(np.abs(c)) < 1e-14:
        raise AllVanishAtOrigin("every spanning function vanishes at the origin")
    x = np.linalg.solve(G, c)
    k = RationalFn(ComplexPoly())
    for xi, f in zip(x, fs):
        k = k + f * complex(xi)
    k0 = k(0.0).real
    return k * (1 / math.sqrt(k0)), x


def make_nearly_space(h, theta, zero_order=None):
    """Validate ``M = h K_theta`` and compute ``v = <theta h, h>``."""
    h = RationalFn.coerce(h)
    if abs(theta(0.0)) > 1e-10:
        raise ThetaNotVanishingAtZero(f"theta(0) = {complex(theta(0.0)):.3g}")
    h.check_circle()
    if not h.analytic_on_closed_disk():
        raise PoleInDisk("h has a pole in the closed unit disk")
    norm = math.sqrt(abs(boundary_inner_product(h, h)))
    if abs(norm - 1) > NORM_TOL:
        raise NotNormalized(f"||h|| = {norm:.12g}")
    h0 = complex(h(0.0))
    if abs(h0.imag) > 1e-9 or h0.real <= 0:
        raise NotPositiveAtOrigin(f"h(0) = {h0:.6g}")
    ms = ModelSpace(theta, zero_order)
    G = isometry_gram(h, ms)
    err = np.max(np.abs(G - np.eye(ms.dim)))
    if err >= ISOMETRY_TOL:
        raise NotIsometric(f"multiplication by h is not isometric on K_theta (residual {err:.3g})")
    v = _snap(boundary_inner_product(h * theta.to_rational(), h))
    if abs(v) >= 1 - CLARK_MARGIN:
        raise ClarkBoundary(f"|v| = {abs(v):.12g} reaches the unit circle")
    return NearlySpace(h, ms, v)


def _snap(v, floor=V_NOISE):
    re = 0.0 if abs(v.real) < floor else v.real
    im = 0.0 if abs(v.imag) < floor else v.imag
    return complex(re, im)


def isometry_gram(h, ms):
    """Gram matrix of ``{h e_k}``."""
    def sampler(z):
        E = ms.basis_values(z) * h(z)
        return E.conj()[:, None, :] * E[None, :, :]

    return circle_mean(sampler)


def m_reproducing_kernel(ns, lam):
    """``conj(h(lambda)) h(z) k_lambda(z)``, the reproducing kernel of ``M``."""
    lam = _check_lambda(lam)
    return ns.h * kernel_function(ns.theta, lam) * complex(np.conj(ns.h(lam)))


def project_M(ns, f):
    """``P_M f = h P_theta(conj(h) f)`` as a rational function."""
    return ns.function(ns.coords(f))


def orthogonal_element(ns, g):
    """An element of ``H^2`` orthogonal to ``M``, built from any ``g`` in ``H^2``.

    With ``h = p / q`` and ``q#(z) = z^deg(q) conj(q(1/conj(z)))``, the function
    ``f = z^deg(p) q# theta g`` satisfies ``conj(h) f = z^deg(q) p# theta g`` on
    the circle, which lies in ``theta H^2`` and is therefore orthogonal to
    ``K_theta``. (``h theta g`` itself is not orthogonal to ``M`` unless
    ``|h| = 1``.)
    """
    h = ns.h if ns.h is not None else RationalFn(1.0)
    q = h.den
    q_reflected = ComplexPoly(q.coeffs[::-1].conj())
    f = RationalFn(ComplexPoly.monomial(max(h.num.degree, 0)) * q_reflected)
    return f * ns.theta.to_rational() * RationalFn.coerce(g)


def random_nearly_space(degree, rng, max_zero=0.85, unimodular=True, max_tries=200):
    """Random valid ``M = h K_theta`` of the given dimension.

    ``M`` is taken to be ``g K_{z^n}`` for a random polynomial ``g`` with
    ``g(0) != 0``; such spaces are nearly S*-invariant. With ``k = P_M 1 =
    g r`` the extremal function is ``h = k / sqrt(k(0))`` and ``M / h`` is
    the space ``{q / r : deg q < n}``, i.e. ``K_theta`` for ``theta`` with a
    zero ``1 / conj(rho)`` for each root ``rho`` of ``r`` and the remaining
    zeros at the origin.
    """
    for _ in range(max_tries):
        n_g = int(rng.integers(1, 3))
        radii = rng.uniform(0.6, 2.5, n_g)
        angles = rng.uniform(0, 2 * np.pi, n_g)
        g = ComplexPoly.from_roots(radii * np.exp(1j * angles))
        if abs(g(0.0)) < 0.05:
            continue
        fs = [RationalFn(g * ComplexPoly.monomial(k)) for k in range(degree)]
        h, x = extremal_from_span(fs)
        r = ComplexPoly(np.where(np.abs(x) > 1e-12 * np.max(np.abs(x)), x, 0))
        zeros = []
        if r.degree >= 1:
            for rho, m in r.roots():
                if abs(rho) > 1e8:
                    continue
                zeros.extend([1 / np.conj(rho)] * m)
        zeros += [0.0] * (degree - len(zeros))
        if max(abs(a) for a in zeros) > max_zero:
            continue
        c = np.exp(2j * np.pi * rng.uniform()) if unimodular else 1.0
        theta = BlaschkeProduct(zeros, c)
        return make_nearly_space(h, theta)
    raise RuntimeError("could not draw a well-conditioned instance")


def random_theta(degree, rng, max_zero=0.8):
    """Random Blaschke product of the given degree with ``theta(0) = 0``."""
    r = max_zero * np.sqrt(rng.uniform(0, 1, degree - 1))
    zeros = [0.0] + list(r * np.exp(2j * np.pi * rng.uniform(0, 1, degree - 1)))
    return BlaschkeProduct(zeros, np.exp(2j * np.pi * rng.uniform()))


def random_v(rng, max_abs=0.9):
    return complex(max_abs * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))


class PerturbedShift:
    """``A_v`` on ``K_theta`` given by ``(theta, v)`` alone, with no ``h``.

    Stands in for a :class:`NearlySpace` wherever only ``theta`` and ``v``
    matter; functions are then returned as elements of ``K_theta``.
    """

    h = None

    def __init__(self, ms, v):
        if abs(ms.theta(0.0)) > 1e-10:
            raise ThetaNotVanishingAtZero(f"theta(0) = {complex(ms.theta(0.0)):.3g}")
        self.ms = ms
        self.v = _check_v(v)

    theta = NearlySpace.theta
    dim = NearlySpace.dim

    def function(self, coords):
        if not isinstance(coords, ModelVector):
            coords = ModelVector(self.ms, coords)
        return coords.to_rational()

    def to_json(self):
        return {
            "theta": self.theta.to_json(),
            "v": [self.v.real, self.v.imag],
            "zero_order": [[complex(a).real, complex(a).imag] for a in self.ms.zero_order],
        }

    def __repr__(self):
        return f"PerturbedShift(dim={self.dim}, v={self.v:.6g})"
