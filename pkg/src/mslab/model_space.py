"""Model spaces ``K_theta`` with the Takenaka--Malmquist orthonormal basis.

For zeros ``a_1, ..., a_n`` (in a fixed order) the basis is

.. math::

    e_k(z) = \\frac{\\sqrt{1-|a_k|^2}}{1-\\bar a_k z}
             \\prod_{j<k} \\frac{z-a_j}{1-\\bar a_j z},

and every element of ``K_theta`` is ``p / D`` with ``D = prod (1 - conj(a_j) z)``
and ``deg p < n``. Vectors are stored as coefficient columns in this basis.
"""

import hashlib
import json
import math

import numpy as np

from . import _json
from .blaschke import BlaschkeProduct, _num_den
from .errors import InvalidBlaschke, LambdaNotInDisk, MultiplicityPreconditionFailed
from .rational import ComplexPoly, RationalFn, circle_mean, _as_function, _check_term

# theta^{(k)}(lambda) must be below this for the derivative kernel formula.
DERIVATIVE_VANISH_TOL = 1e-8


def _check_lambda(lam):
    lam = complex(lam)
    if abs(lam) >= 1:
        raise LambdaNotInDisk(f"|lambda| = {abs(lam):.6g} is not < 1")
    return lam


def _default_order(theta):
    origin = [p for p in theta.points if p == 0]
    return origin + [p for p in theta.points if p != 0]


class ModelSpace:
    """``K_theta`` for a finite Blaschke product, with an explicit zero order."""

    def __init__(self, theta, zero_order=None):
        if theta.degree < 1:
            raise InvalidBlaschke("model space of a constant is trivial")
        if zero_order is None:
            order = _default_order(theta)
        else:
            order = self._match_order(theta, zero_order)
        self.theta = theta
        self.zero_order = tuple(order)
        self._a = np.array(order, dtype=complex)
        self._basis = None
        self._D = None

    @staticmethod
    def _match_order(theta, zero_order):
        pool = list(theta.points)
        out = []
        for z in zero_order:
            z = complex(z)
            if not pool:
                raise InvalidBlaschke("zero_order is longer than the degree")
            k = int(np.argmin([abs(p - z) for p in pool]))
            if abs(pool[k] - z) > 1e-9:
                raise InvalidBlaschke(f"{z} is not a zero of theta")
            out.append(pool.pop(k))
        if pool:
            raise InvalidBlaschke("zero_order does not list every zero")
        return out

    @property
    def dim(self):
        return len(self.zero_order)

    @property
    def space_id(self):
        payload = json.dumps(
            {"theta": self.theta.to_json(), "zero_order": _json.cplx_list(self._a)}, sort_keys=True
        )
        return "K-" + hashlib.sha1(payload.encode()).hexdigest()[:12]

    def basis_values(self, z):
        """Array of shape ``(n,) + z.shape`` with ``e_k(z)``."""
        z = np.asarray(z, dtype=complex)
        out = np.empty((self.dim,) + z.shape, dtype=complex)
        prefix = np.ones(z.shape, dtype=complex)
        for k, a in enumerate(self._a):
            den = 1 - np.conj(a) * z
            out[k] = math.sqrt(1 - abs(a) ** 2) / den * prefix
            prefix = prefix * (z - a) / den
        return out

    @property
    def basis(self):
        """Basis functions as :class:`RationalFn` values."""
        if self._basis is None:
            fns = []
            num = ComplexPoly([1.0])
            den = ComplexPoly([1.0])
            for a in self._a:
                den = den * ComplexPoly([1.0, -np.conj(a)])
                fns.append(RationalFn(num * math.sqrt(1 - abs(a) ** 2), den))
                num = num * ComplexPoly([-a, 1.0])
            self._basis = fns
        return self._basis

    @property
    def common_denominator(self):
        if self._D is None:
            D = ComplexPoly([1.0])
            for a in self._a:
                D = D * ComplexPoly([1.0, -np.conj(a)])
            self._D = D
        return self._D

    def numerators(self):
        """Numerators of ``e_k`` over the common denominator ``D``."""
        out = []
        n = self.dim
        for k, a in enumerate(self._a):
            p = ComplexPoly([math.sqrt(1 - abs(a) ** 2)])
            for j in range(k):
                p = p * ComplexPoly([-self._a[j], 1.0])
            for j in range(k + 1, n):
                p = p * ComplexPoly([1.0, -np.conj(self._a[j])])
            out.append(p)
        return out

    def vector(self, coeffs):
        return ModelVector(self, coeffs)

    def unit(self, k):
        c = np.zeros(self.dim, dtype=complex)
        c[k] = 1
        return ModelVector(self, c)

    def gram(self):
        """Boundary-quadrature Gram matrix of the basis (should be ``I``)."""
        def sampler(z):
            E = self.basis_values(z)
            return E.conj()[:, None, :] * E[None, :, :]

        return circle_mean(sampler)

    def to_json(self):
        return {
            "space_id": self.space_id,
            "theta": self.theta.to_json(),
            "zero_order": _json.cplx_list(self._a),
        }

    @classmethod
    def from_json(cls, obj):
        theta = BlaschkeProduct.from_json(obj["theta"])
        order = obj.get("zero_order")
        return cls(theta, None if order is None else _json.parse_cplx_list(order))

    def __repr__(self):
        return f"ModelSpace({self.theta!r}, dim={self.dim})"


def tm_basis(theta, zero_order=None):
    return ModelSpace(theta, zero_order)


class ModelVector:
    """Element of a model space given by its coordinates in the TM basis."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space, coeffs):
        c = np.asarray(coeffs, dtype=complex).reshape(space.dim)
        self.space = space
        self.coeffs = c

    def __call__(self, z):
        vals = np.tensordot(self.coeffs, self.space.basis_values(z), axes=1)
        return vals if np.ndim(vals) else complex(vals)

    def inner(self, other):
        return complex(np.vdot(other.coeffs, self.coeffs))

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def to_rational(self):
        num = ComplexPoly()
        for c, p in zip(self.coeffs, self.space.numerators()):
            num = num + p * c
        return RationalFn(num, self.space.common_denominator)

    def __add__(self, other):
        return ModelVector(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return ModelVector(self.space, self.coeffs - other.coeffs)

    def __mul__(self, c):
        return ModelVector(self.space, self.coeffs * c)

    __rmul__ = __mul__

    def __neg__(self):
        return ModelVector(self.space, -self.coeffs)

    def to_json(self):
        return {"space_id": self.space.space_id, "coeffs": _json.cplx_list(self.coeffs)}

    def __repr__(self):
        return f"ModelVector({np.round(self.coeffs, 10).tolist()})"


class AntilinearMap:
    """Antilinear operator ``x -> M @ conj(x)`` on TM coordinates."""

    __slots__ = ("space", "matrix")

    def __init__(self, space, matrix):
        self.space = space
        self.matrix = np.asarray(matrix, dtype=complex)

    def __call__(self, x):
        if isinstance(x, ModelVector):
            return ModelVector(self.space, self.matrix @ x.coeffs.conj())
        return self.matrix @ np.conj(x)

    def square(self):
        """``C o C`` as a (linear) matrix."""
        return self.matrix @ self.matrix.conj()

    def sandwich(self, A):
        """Linear matrix of ``C A C`` for a linear matrix ``A``."""
        return self.matrix @ np.conj(A) @ self.matrix.conj()


def project(ms, f):
    """Coordinates of ``P_theta f``: ``c_k = <f, e_k>``.

    ``f`` may be a rational function, a boundary symbol, a model vector of
    another space, or any callable on circle points.
    """
    _check_term(f)
    fn = _as_function(f)
    c = circle_mean(lambda z: fn(z)[None, :] * ms.basis_values(z).conj())
    return ModelVector(ms, c)


def project_many(ms, fs):
    _ = [_check_term(f) for f in fs]
    fns = [_as_function(f) for f in fs]

    def sampler(z):
        E = ms.basis_values(z).conj()
        F = np.array([f(z) for f in fns]).reshape(len(fns), -1)
        return E[:, None, :] * F[None, :, :]

    return circle_mean(sampler)


def model_residual(ms, f):
    """``||f - P_theta f||`` on the circle (small iff ``f`` lies in ``K_theta``)."""
    fn = _as_function(f)
    x = project(ms, f)
    return math.sqrt(abs(circle_mean(lambda z: np.abs(fn(z) - x(z)) ** 2)))


def kernel_function(theta, lam):
    """``(1 - conj(theta(lam)) theta(z)) / (1 - conj(lam) z)`` as a rational function."""
    lam = _check_lambda(lam)
    N, D = _num_den(theta)
    t = complex(theta(lam))
    return RationalFn(D - N * np.conj(t), D * ComplexPoly([1.0, -np.conj(lam)]))


def conjugate_kernel_function(theta, lam):
    """``(theta(z) - theta(lam)) / (z - lam)`` with the removable pole cancelled."""
    lam = _check_lambda(lam)
    N, D = _num_den(theta)
    t = complex(theta(lam))
    return RationalFn((N - D * t).deflate(lam), D)


def reproducing_kernel(ms, lam):
    """``k_lambda`` in TM coordinates: ``c_k = conj(e_k(lambda))``."""
    lam = _check_lambda(lam)
    return ModelVector(ms, ms.basis_values(lam).conj())


def conjugation_C(ms):
    """The conjugation ``f -> theta conj(z f)`` on ``K_theta``.

    Its matrix is ``M[i, k] = <C e_k, e_i>``, applied to conjugated
    coordinates.
    """
    theta = ms.theta

    def sampler(z):
        E = ms.basis_values(z).conj()
        w = theta(z) * np.conj(z)
        return E[:, None, :] * E[None, :, :] * w

    return AntilinearMap(ms, circle_mean(sampler))


def kernel_conjugate(ms, lam, C=None):
    """``C k_lambda = (theta(z) - theta(lambda)) / (z - lambda)``."""
    lam = _check_lambda(lam)
    C = conjugation_C(ms) if C is None else C
    return C(reproducing_kernel(ms, lam))


def derivative_kernel(ms, lam, n):
    """Kernel for ``f -> f^{(n)}(lambda)`` at a point where ``theta - v`` has a zero of order ``n + 1``.

    Uses the closed form ``n! z^n (1 - conj(v) theta) / (1 - conj(lambda) z)^{n+1}``
    with ``v = theta(lambda)``, which is only valid when
    ``theta^{(k)}(lambda) = 0`` for ``k = 1..n``; other points are rejected.
    """
    lam = _check_lambda(lam)
    theta = ms.theta
    f = theta.to_rational()
    g = f
    for k in range(1, n + 1):
        g = g.deriv()
        d = abs(g(lam))
        if d > DERIVATIVE_VANISH_TOL:
            raise MultiplicityPreconditionFailed(f"theta^({k})(lambda) = {d:.3g} does not vanish")
    v = complex(theta(lam))
    N, D = _num_den(theta)
    num = ComplexPoly.monomial(n, math.factorial(n)) * (D - N * np.conj(v))
    den = D * ComplexPoly([1.0, -np.conj(lam)]) ** (n + 1)
    return project(ms, RationalFn(num, den))


def basis_derivatives(ms, lam, n):
    """``e_k^{(n)}(lambda)`` by rational differentiation."""
    return np.array([e.derivative_at(lam, n) for e in ms.basis])

