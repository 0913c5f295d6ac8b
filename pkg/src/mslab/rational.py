"""Complex polynomials, rational functions and unit-circle inner products.

Everything in the package is built on two representations:

* :class:`ComplexPoly` -- ascending coefficient vector, immutable.
* :class:`RationalFn` -- ``num / den`` with ``den`` monic.

Inner products on :math:`L^2(\\mathbb{T})` are computed by the trapezoid rule
on equispaced nodes, doubling the node count until two successive estimates
agree. For integrands that are rational and pole-free on the circle the rule
converges geometrically, so the doubling stops after a handful of steps.
"""

import numbers
import warnings

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P

from . import _json
from .config import get_tolerances
from .errors import (
    PoleAtOrigin,
    PoleInDiskWarning,
    PoleOnCircle,
    QuadratureDivergence,
    ZeroPolynomial,
)

# Distance from |z| = 1 below which a pole counts as lying on the circle.
CIRCLE_POLE_TOL = 1e-8


class ComplexPoly:
    """Polynomial with complex coefficients in ascending order.

    Trailing (highest order) coefficients that are exactly zero are dropped,
    so the zero polynomial has an empty coefficient vector and degree -1.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=()):
        c = np.array(coeffs, dtype=complex).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.flags.writeable = False
        self._c = c

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        roots = np.asarray(roots, dtype=complex).ravel()
        if roots.size == 0:
            return cls([leading])
        return cls(leading * P.polyfromroots(roots))

    @classmethod
    def monomial(cls, k, coef=1.0):
        c = np.zeros(k + 1, dtype=complex)
        c[k] = coef
        return cls(c)

    @property
    def coeffs(self):
        return self._c

    @property
    def degree(self):
        return len(self._c) - 1

    def is_zero(self):
        return self._c.size == 0

    @property
    def leading(self):
        if self.is_zero():
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self._c[-1]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for a in self._c[::-1]:
            out = out * z + a
        return out if out.ndim else complex(out)

    def _coerce(self, other):
        if isinstance(other, ComplexPoly):
            return other
        if isinstance(other, numbers.Number):
            return ComplexPoly([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ComplexPoly(P.polyadd(self._c if self._c.size else [0], other._c if other._c.size else [0]))

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(-self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return ComplexPoly(self._c * other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ComplexPoly()
        return ComplexPoly(P.polymul(self._c, other._c))

    __rmul__ = __mul__

    def __truediv__(self, c):
        if not isinstance(c, numbers.Number):
            return NotImplemented
        return ComplexPoly(self._c / c)

    def __pow__(self, k):
        out = ComplexPoly([1.0])
        for _ in range(int(k)):
            out = out * self
        return out

    def deriv(self, m=1):
        if self.degree < m:
            return ComplexPoly()
        return ComplexPoly(P.polyder(self._c, m))

    def divmod(self, other):
        if other.is_zero():
            raise ZeroPolynomial("division by the zero polynomial")
        if self.is_zero():
            return ComplexPoly(), ComplexPoly()
        q, r = P.polydiv(self._c, other._c)
        return ComplexPoly(q), ComplexPoly(r)

    def deflate(self, root):
        """Quotient of synthetic division by ``z - root`` (remainder dropped)."""
        c = self._c
        if c.size <= 1:
            return ComplexPoly()
        q = np.empty(c.size - 1, dtype=complex)
        acc = c[-1]
        q[-1] = acc
        for k in range(c.size - 2, 0, -1):
            acc = c[k] + root * acc
            q[k - 1] = acc
        return ComplexPoly(q)

    def conj(self):
        """Polynomial with conjugated coefficients, i.e. ``conj(p(conj(z)))``."""
        return ComplexPoly(self._c.conj())

    def roots(self, cluster_tol=None):
        return poly_roots(self, cluster_tol=cluster_tol)

    def allclose(self, other, tol=1e-10):
        n = max(len(self._c), len(other._c))
        a = np.zeros(n, complex)
        b = np.zeros(n, complex)
        a[: len(self._c)] = self._c
        b[: len(other._c)] = other._c
        return bool(np.all(np.abs(a - b) <= tol * (1 + np.abs(b))))

    def to_json(self):
        return _json.cplx_list(self._c)

    @classmethod
    def from_json(cls, obj):
        return cls(_json.parse_cplx_list(obj))

    def __repr__(self):
        return f"ComplexPoly({np.round(self._c, 12).tolist()})"


def poly_roots(p, cluster_tol=None):
    """Roots of ``p`` with multiplicities.

    Roots come from the eigenvalues of a balanced companion matrix. Roots
    closer than ``cluster_tol * (1 + |r|)`` are merged into one cluster
    reported at its centroid.

    Returns
    -------
    list of (complex, int)
        Sorted by real part, then imaginary part.
    """
    if not isinstance(p, ComplexPoly):
        p = ComplexPoly(p)
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no well-defined roots")
    if cluster_tol is None:
        cluster_tol = get_tolerances().cluster_tol
    c = p.coeffs
    n_origin = int(np.argmax(c != 0))
    c = c[n_origin:]
    deg = c.size - 1
    found = [0j] * n_origin
    if deg >= 1:
        monic = c[:-1] / c[-1]
        comp = np.zeros((deg, deg), dtype=complex)
        comp[1:, :-1] = np.eye(deg - 1)
        comp[:, -1] = -monic
        # scipy casts an unused permutation array here; the cast is harmless.
        with np.errstate(invalid="ignore"):
            balanced, _ = scipy.linalg.matrix_balance(comp, permute=False)
        found.extend(scipy.linalg.eigvals(balanced, check_finite=False).tolist())
    return _cluster(np.array(found, dtype=complex), cluster_tol)


def _cluster(values, tol):
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = 1 + max(abs(values[i]), abs(values[j]))
            if abs(values[i] - values[j]) < tol * scale:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(values[i])
    out = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    out.sort(key=lambda rm: (round(rm[0].real, 12), round(rm[0].imag, 12)))
    return out


def cluster_values(values, tol=None):
    """Group nearby complex numbers the same way :func:`poly_roots` does."""
    if tol is None:
        tol = get_tolerances().cluster_tol
    return _cluster(np.asarray(values, dtype=complex).ravel(), tol)


class RationalFn:
    """Quotient ``num / den`` of complex polynomials, with ``den`` monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, ComplexPoly) else ComplexPoly(np.atleast_1d(num))
        if den is None:
            den = ComplexPoly([1.0])
        elif not isinstance(den, ComplexPoly):
            den = ComplexPoly(np.atleast_1d(den))
        if den.is_zero():
            raise ZeroPolynomial("rational function with zero denominator")
        lead = den.leading
        self.num = num * (1 / lead)
        self.den = den * (1 / lead)

    @classmethod
    def coerce(cls, obj):
        if isinstance(obj, RationalFn):
            return obj
        if isinstance(obj, ComplexPoly):
            return cls(obj)
        if isinstance(obj, numbers.Number):
            return cls(ComplexPoly([obj]))
        if hasattr(obj, "to_rational"):
            return obj.to_rational()
        raise TypeError(f"cannot interpret {type(obj).__name__} as a rational function")

    @classmethod
    def z(cls, power=1):
        return cls(ComplexPoly.monomial(power))

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def _same_den(self, other):
        return self.den.degree == other.den.degree and np.array_equal(self.den.coeffs, other.den.coeffs)

    def __add__(self, other):
        try:
            other = RationalFn.coerce(other)
        except TypeError:
            return NotImplemented
        if self._same_den(other):
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        try:
            other = RationalFn.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return RationalFn(self.num * other, self.den)
        try:
            other = RationalFn.coerce(other)
        except TypeError:
            return NotImplemented
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return RationalFn(self.num * (1 / other), self.den)
        other = RationalFn.coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RationalFn.coerce(other) / self

    def deriv(self):
        return RationalFn(self.num.deriv() * self.den - self.num * self.den.deriv(), self.den * self.den)

    def derivative_at(self, z, order):
        f = self
        for _ in range(order):
            f = f.deriv()
        return f(z)

    def is_zero(self):
        return self.num.is_zero()

    def poles(self):
        if self.den.degree < 1:
            return []
        return poly_roots(self.den)

    def check_circle(self, tol=CIRCLE_POLE_TOL):
        for r, _ in self.poles():
            if abs(abs(r) - 1) < tol:
                raise PoleOnCircle(f"pole at {r:.6g} lies on the unit circle")
        return self

    def analytic_on_closed_disk(self, margin=0.0):
        return all(abs(r) > 1 + margin for r, _ in self.poles())

    def to_rational(self):
        return self

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, dict):
            den = obj.get("den", [[1.0, 0.0]])
            return cls(ComplexPoly.from_json(obj["num"]), ComplexPoly.from_json(den))
        return cls(ComplexPoly.from_json(obj))

    def __repr__(self):
        return f"RationalFn(num={self.num!r}, den={self.den!r})"


def _check_term(obj):
    if isinstance(obj, RationalFn):
        obj.check_circle()
    elif isinstance(obj, ComplexPoly):
        pass
    elif hasattr(obj, "check_circle"):
        obj.check_circle()


def _as_function(obj):
    if isinstance(obj, numbers.Number):
        c = complex(obj)
        return lambda z: np.full(np.shape(z), c, dtype=complex)
    if callable(obj):
        return obj
    raise TypeError(f"{type(obj).__name__} cannot be evaluated on the circle")


class BoundarySymbol:
    """Function on the unit circle of the form ``t -> sum_k f_k(t) conj(g_k(t))``.

    Terms may be :class:`RationalFn` values or anything else callable on
    complex arrays (Blaschke products, model-space vectors, scalars).
    """

    __slots__ = ("terms",)

    def __init__(self, terms):
        terms = tuple((f, g) for f, g in terms)
        for f, g in terms:
            _check_term(f)
            _check_term(g)
        self.terms = terms

    @classmethod
    def analytic(cls, f):
        return cls([(f, 1.0)])

    @classmethod
    def coerce(cls, obj):
        if isinstance(obj, BoundarySymbol):
            return obj
        return cls.analytic(obj)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for f, g in self.terms:
            out = out + _as_function(f)(z) * np.conj(_as_function(g)(z))
        return out

    def conj(self):
        return BoundarySymbol([(g, f) for f, g in self.terms])

    def weighted(self, h):
        """Symbol multiplied by ``|h|^2``."""
        h = RationalFn.coerce(h)
        return BoundarySymbol([(RationalFn.coerce(f) * h, RationalFn.coerce(g) * h) for f, g in self.terms])

    def __add__(self, other):
        return BoundarySymbol(self.terms + BoundarySymbol.coerce(other).terms)

    def __mul__(self, c):
        if not isinstance(c, numbers.Number):
            return NotImplemented
        return BoundarySymbol([(RationalFn.coerce(f) * c, g) for f, g in self.terms])

    __rmul__ = __mul__

    def to_json(self):
        return {"terms": [[RationalFn.coerce(f).to_json(), RationalFn.coerce(g).to_json()] for f, g in self.terms]}

    @classmethod
    def from_json(cls, obj):
        return cls([(RationalFn.from_json(f), RationalFn.from_json(g)) for f, g in obj["terms"]])


def circle_nodes(n, offset=0.0):
    return np.exp(2j * np.pi * (np.arange(n) + offset) / n)


def circle_mean(sampler, tol=None, n_min=None, n_max=None):
    """Adaptive trapezoid rule for ``(1/2pi) int_0^{2pi} F(e^{it}) dt``.

    ``sampler`` maps an array of ``N`` circle points to samples of shape
    ``(..., N)``; the mean is taken over the last axis, so matrices of inner
    products are integrated in one pass. Each doubling reuses the previous
    nodes and only samples the new midpoints.
    """
    tols = get_tolerances()
    tol = tols.quad_tol if tol is None else tol
    n = tols.quad_min if n_min is None else n_min
    n_max = tols.quad_max if n_max is None else n_max
    est = np.asarray(sampler(circle_nodes(n))).mean(axis=-1)
    while 2 * n <= n_max:
        mid = np.asarray(sampler(circle_nodes(n, offset=0.5))).mean(axis=-1)
        new = 0.5 * (est + mid)
        n *= 2
        if np.all(np.abs(new - est) < tol * (1 + np.abs(new))):
            return new
        est = new
    raise QuadratureDivergence(f"trapezoid rule did not converge with {n_max} nodes")


def boundary_inner_product(f, g):
    """``<f, g> = (1/2pi) int f(e^{it}) conj(g(e^{it})) dt``.

    ``f`` may be a :class:`BoundarySymbol`; ``g`` should be analytic data
    (rational function or similar).
    """
    _check_term(f)
    _check_term(g)
    fn = _as_function(f)
    gn = _as_function(g)
    return complex(circle_mean(lambda z: fn(z) * np.conj(gn(z))))


def boundary_gram(fs, gs, weight=None):
    """Matrix ``G[i, j] = <weight * fs[j], gs[i]>`` in one adaptive pass."""
    fns = [_as_function(f) for f in fs]
    gns = [_as_function(g) for g in gs]
    wn = None if weight is None else _as_function(weight)

    def sampler(z):
        F = np.array([f(z) for f in fns]).reshape(len(fns), -1)
        G = np.array([g(z) for g in gns]).reshape(len(gns), -1)
        if wn is not None:
            F = F * wn(z)
        return G.conj()[:, None, :] * F[None, :, :]

    return circle_mean(sampler)


def taylor_coeffs(f, n):
    """First ``n`` Taylor coefficients of ``f`` at the origin by long division.

    A :class:`~mslab.errors.PoleInDiskWarning` is issued (not raised) when
    ``f`` has a pole in the closed unit disk, since the coefficients are then
    not those of an :math:`H^2` function; the caller decides what to do.
    """
    f = RationalFn.coerce(f)
    num = f.num.coeffs
    den = f.den.coeffs
    d0 = den[0] if den.size else 0
    if abs(d0) <= 1e-14 * np.max(np.abs(den)):
        raise PoleAtOrigin("denominator vanishes at the origin")
    if not f.analytic_on_closed_disk():
        warnings.warn("function has a pole in the closed unit disk", PoleInDiskWarning, stacklevel=2)
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        acc = num[k] if k < num.size else 0
        for j in range(1, min(k, den.size - 1) + 1):
            acc -= den[j] * out[k - j]
        out[k] = acc / d0
    return out


def hardy_inner_product(f, g, n=200):
    """``<f, g>`` in :math:`H^2` from truncated Taylor coefficients."""
    a = taylor_coeffs(f, n)
    b = taylor_coeffs(g, n)
    return complex(np.vdot(b, a))
