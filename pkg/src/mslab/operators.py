"""Truncated Toeplitz operators on ``K_theta`` and on ``M = h K_theta``.

Matrices are expressed in the TM basis of a :class:`~mslab.model_space.ModelSpace`
with column ``j`` holding the coordinates of the image of ``e_j``. Operators
on ``M`` are carried by their ``K_theta`` matrices: since ``f -> h f`` is
unitary, ``A_sigma^M`` in the basis ``{h e_k}`` is the truncated Toeplitz
matrix of the symbol ``|h|^2 sigma`` on ``K_theta``.
"""

from typing import NamedTuple

import numpy as np

from . import _json
from .blaschke import _check_v
from .errors import DimensionMismatch, NotInModelSpace, SingularGram, ThetaNotVanishingAtZero, VerificationFailed, WZero
from .model_space import (
    ModelSpace,
    ModelVector,
    _check_lambda,
    conjugate_kernel_function,
    kernel_function,
    model_residual,
    project,
    project_many,
    reproducing_kernel,
    conjugation_C,
)
from .rational import BoundarySymbol, RationalFn, circle_mean

GRAM_COND_MAX = 1e10
MEMBERSHIP_TOL = 1e-8
RANK_TOL = 1e-8


class OperatorMatrix:
    """Matrix of a linear map ``space -> codomain`` in TM coordinates."""

    __slots__ = ("entries", "space", "codomain")

    def __init__(self, entries, space, codomain=None):
        entries = np.array(entries, dtype=complex)
        entries.setflags(write=False)
        self.entries = entries
        self.space = space
        self.codomain = space if codomain is None else codomain

    @property
    def shape(self):
        return self.entries.shape

    @property
    def H(self):
        return OperatorMatrix(self.entries.conj().T, self.codomain, self.space)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.entries @ other.entries, other.space, self.codomain)
        if isinstance(other, ModelVector):
            return ModelVector(self.codomain, self.entries @ other.coeffs)
        return self.entries @ np.asarray(other)

    def __add__(self, other):
        return OperatorMatrix(self.entries + _entries(other), self.space, self.codomain)

    def __sub__(self, other):
        return OperatorMatrix(self.entries - _entries(other), self.space, self.codomain)

    def __mul__(self, c):
        return OperatorMatrix(self.entries * complex(c), self.space, self.codomain)

    __rmul__ = __mul__

    def __pow__(self, k):
        return OperatorMatrix(np.linalg.matrix_power(self.entries, k), self.space, self.codomain)

    def identity_like(self):
        return OperatorMatrix(np.eye(self.shape[0]), self.space)

    def norm(self):
        return float(np.linalg.norm(self.entries, 2))

    def to_json(self):
        return _json.matrix_json(self.entries, self.space.space_id)

    def __repr__(self):
        return f"OperatorMatrix({np.round(self.entries, 10).tolist()})"


def _entries(op):
    return op.entries if isinstance(op, OperatorMatrix) else np.asarray(op, dtype=complex)


def tto_matrix(ms, sigma):
    """``entries[i, j] = <sigma e_j, e_i>`` by boundary quadrature."""
    sym = BoundarySymbol.coerce(sigma)

    def sampler(z):
        E = ms.basis_values(z)
        return E.conj()[:, None, :] * (E * sym(z))[None, :, :]

    return OperatorMatrix(circle_mean(sampler), ms)


def tto_matrix_M(ns, sigma):
    """``A_sigma^M`` in the basis ``{h e_k}``: the symbol ``|h|^2 sigma`` on ``K_theta``."""
    return tto_matrix(ns.ms, BoundarySymbol.coerce(sigma).weighted(ns.h))


def shift_matrix(ms):
    """``S_theta``, cached on the space."""
    S = getattr(ms, "_shift", None)
    if S is None:
        S = tto_matrix(ms, RationalFn.z())
        ms._shift = S
    return S


def _require_theta_zero(ms):
    t0 = complex(ms.theta(0.0))
    if abs(t0) > 1e-10:
        raise ThetaNotVanishingAtZero(f"theta(0) = {t0:.3g}")


def one_coords(ms):
    """Coordinates of the constant ``1`` (equal to ``k_0`` when ``theta(0) = 0``)."""
    _require_theta_zero(ms)
    return reproducing_kernel(ms, 0.0).coeffs


def theta_over_z_coords(ms):
    """Coordinates of ``theta / z``."""
    _require_theta_zero(ms)
    return project(ms, conjugate_kernel_function(ms.theta, 0.0)).coeffs


def av_matrix(ms, v):
    """``A_v = S_theta + v (1 (x) theta/z)``, i.e. ``A_v f = S_theta f + v <f, theta/z> 1``."""
    _require_theta_zero(ms)
    v = _check_v(v)
    S = shift_matrix(ms).entries
    if v == 0:
        return OperatorMatrix(S, ms)
    one = one_coords(ms)
    u = theta_over_z_coords(ms)
    return OperatorMatrix(S + v * np.outer(one, u.conj()), ms)


def bv_matrix(ms, v):
    """``B_v = A_v^* = S_theta^* + conj(v) (theta/z (x) 1)``."""
    return av_matrix(ms, v).H


def compressed_shift_M(ns):
    """``A_z^M`` in the orthonormal basis ``{h e_k}`` of ``M``."""
    return av_matrix(ns.ms, ns.v)


def matrix_in_basis(ms, op, basis):
    """Matrix of ``op`` in a (not necessarily orthonormal) basis of ``K_theta``.

    Solves ``Gram C = B`` with ``B[i, j] = <op f_j, f_i>`` and
    ``Gram[i, j] = <f_j, f_i>``, so column ``j`` of the result holds the
    expansion of ``op f_j`` in the given basis.
    """
    if len(basis) != ms.dim:
        raise DimensionMismatch(f"{len(basis)} functions given for a space of dimension {ms.dim}")
    fns = [RationalFn.coerce(f).check_circle() for f in basis]
    for k, f in enumerate(fns):
        r = model_residual(ms, f)
        if r > MEMBERSHIP_TOL:
            raise NotInModelSpace(f"basis function {k} is not in K_theta (residual {r:.3g})")
    X = project_many(ms, fns)
    G = X.conj().T @ X
    if np.linalg.cond(G) >= GRAM_COND_MAX:
        raise SingularGram("basis functions are (numerically) dependent")
    B = X.conj().T @ _entries(op) @ X
    return np.linalg.solve(G, B)


def numerical_rank(A, rel_tol=RANK_TOL):
    s = np.linalg.svd(np.atleast_2d(A), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


# Eigenvalues of I - T*T below this are rounding noise; their square roots
# would otherwise surface at the 1e-8 level.
PSD_FLOOR = 1e-13


def _psd_sqrt(X):
    X = 0.5 * (X + X.conj().T)
    w, V = np.linalg.eigh(X)
    w = np.where(w > PSD_FLOOR * max(1.0, float(np.max(np.abs(w)))), w, 0.0)
    return (V * np.sqrt(w)) @ V.conj().T


class Defects(NamedTuple):
    DA: OperatorMatrix
    DB: OperatorMatrix
    ranks: tuple


def defect_operators(ms, v):
    """``sqrt(I - B_v A_v)`` and ``sqrt(I - A_v B_v)`` with their numerical ranks."""
    A = av_matrix(ms, v).entries
    B = A.conj().T
    eye = np.eye(ms.dim)
    DA = _psd_sqrt(eye - B @ A)
    DB = _psd_sqrt(eye - A @ B)
    ranks = (numerical_rank(DA), numerical_rank(DB))
    return Defects(OperatorMatrix(DA, ms), OperatorMatrix(DB, ms), ranks)


def defect_residuals(ms, v, defects=None):
    """Distances of the defect operators from ``sqrt(1 - |v|^2)`` times the
    projections onto ``C theta/z`` and ``C 1``."""
    v = _check_v(v)
    d = defect_operators(ms, v) if defects is None else defects
    s = np.sqrt(1 - abs(v) ** 2)
    u = theta_over_z_coords(ms)
    one = one_coords(ms)
    ra = np.linalg.norm(d.DA.entries - s * np.outer(u, u.conj()), 2)
    rb = np.linalg.norm(d.DB.entries - s * np.outer(one, one.conj()), 2)
    return {"DA": float(ra), "DB": float(rb)}


def d_symmetry_check(ns, sigma):
    """``||C A_sigma^M C - A_conj(sigma)^M||`` with ``C`` standing in for ``M_h C M_h^*``."""
    sym = BoundarySymbol.coerce(sigma)
    C = getattr(ns.ms, "_conj", None)
    if C is None:
        C = conjugation_C(ns.ms)
        ns.ms._conj = C
    A = tto_matrix_M(ns, sym).entries
    Abar = tto_matrix_M(ns, sym.conj()).entries
    return float(np.linalg.norm(C.sandwich(A) - Abar, 2))


def zero_symbol_check(ms, p, q):
    """Norm of the truncated Toeplitz matrix with symbol ``theta p + conj(theta q)``."""
    t = ms.theta.to_rational()
    p = RationalFn.coerce(p)
    q = RationalFn.coerce(q)
    sym = BoundarySymbol([(t * p, 1.0), (1.0, t * q)])
    return tto_matrix(ms, sym).norm()


def kernel_defect_check(ns, sigma):
    """Dimension of ``ker A_sigma^M`` and its defect for near ``S^*``-invariance.

    Kernel elements vanishing at the origin are divided by ``z``; the
    defect is the rank of what falls outside the kernel.
    """
    A = tto_matrix_M(ns, sigma).entries
    _, s, Vh = np.linalg.svd(A)
    null = Vh.conj().T[:, s <= RANK_TOL * s[0]]
    k = null.shape[1]
    if k == 0:
        return 0, 0
    one = one_coords(ns.ms)
    # f(0) = <f, 1> in TM coordinates
    vals = one.conj() @ null
    if np.allclose(vals, 0, atol=1e-12):
        Z = null
    else:
        _, _, wh = np.linalg.svd(vals[None, :])
        Z = null @ wh.conj().T[:, 1:]
    if Z.shape[1] == 0:
        return k, 0
    Y = shift_matrix(ns.ms).entries.conj().T @ Z
    R = Y - null @ (null.conj().T @ Y)
    sv = np.linalg.svd(R, compute_uv=False)
    defect = int(np.sum(sv > RANK_TOL * max(1.0, np.linalg.norm(Y, 2))))
    if defect > 1:
        raise VerificationFailed(f"kernel defect {defect} exceeds one")
    return k, defect


class CyclicRanks(NamedTuple):
    a_from_1: int
    a_from_u: int
    b_from_1: int
    b_from_u: int


def krylov_rank(A, x):
    n = A.shape[0]
    cols = [np.asarray(x, dtype=complex)]
    for _ in range(n - 1):
        cols.append(A @ cols[-1])
    K = np.column_stack([c / np.linalg.norm(c) if np.linalg.norm(c) > 0 else c for c in cols])
    return numerical_rank(K)


def cyclicity_check(ms, v):
    """Krylov ranks of ``A_v`` and ``B_v`` from ``1`` and ``theta/z``."""
    A = av_matrix(ms, v).entries
    B = A.conj().T
    one = one_coords(ms)
    u = theta_over_z_coords(ms)
    return CyclicRanks(krylov_rank(A, one), krylov_rank(A, u), krylov_rank(B, one), krylov_rank(B, u))


def shift_block_residual(ms, v):
    """``A_v`` on ``K_{theta/z}`` compared with multiplication by ``z``."""
    sub = ms.theta.without_zero(0.0)
    if sub.degree == 0:
        return 0.0
    fs = ModelSpace(sub).basis
    X = project_many(ms, fs)
    Z = project_many(ms, [RationalFn.z() * f for f in fs])
    return float(np.linalg.norm(av_matrix(ms, v).entries @ X - Z, 2))


def kernel_action_check(ms, v, w, parts=("a", "b")):
    """Residuals of the actions of ``A_v`` and ``B_v`` on ``k_w`` and ``C k_w``.

    With ``u = theta/z`` and kernels of ``K_u`` embedded in ``K_theta``::

        a1: B_v k_w   = conj(v) u + conj(w) k_w^u
        a2: A_v Ck_w  = v + w z Ck_w^u
        b1: A_v k_w   = v conj(theta(w)) / conj(w) + z k_w^u
        b2: B_v Ck_w  = (theta(w) / w) conj(v) u + Ck_w^u

    The ``b`` identities need ``w != 0``.
    """
    w = _check_lambda(w)
    v = _check_v(v)
    if "b" in parts and w == 0:
        raise WZero("the b identities divide by w")
    theta = ms.theta
    A = av_matrix(ms, v).entries
    B = A.conj().T
    sub = theta.without_zero(0.0)
    z = RationalFn.z()
    one = one_coords(ms)
    u = theta_over_z_coords(ms)
    k_w = reproducing_kernel(ms, w).coeffs
    ck_w = project(ms, conjugate_kernel_function(theta, w)).coeffs
    k_sub = kernel_function(sub, w)
    ck_sub = conjugate_kernel_function(sub, w)
    tw = complex(theta(w))
    out = {}
    if "a" in parts:
        rhs = np.conj(v) * u + np.conj(w) * project(ms, k_sub).coeffs
        out["a1"] = float(np.linalg.norm(B @ k_w - rhs))
        rhs = v * one + w * project(ms, z * ck_sub).coeffs
        out["a2"] = float(np.linalg.norm(A @ ck_w - rhs))
    if "b" in parts:
        rhs = v * np.conj(tw) / np.conj(w) * one + project(ms, z * k_sub).coeffs
        out["b1"] = float(np.linalg.norm(A @ k_w - rhs))
        rhs = tw / w * np.conj(v) * u + project(ms, ck_sub).coeffs
        out["b2"] = float(np.linalg.norm(B @ ck_w - rhs))
    return out
