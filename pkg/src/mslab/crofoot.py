"""Crofoot transform and the invariant subspace lattice of ``A_z^M``.

``J_v f = sqrt(1 - |v|^2) / (1 - conj(v) theta) f`` maps ``K_theta``
unitarily onto ``K_{theta_v}`` and carries ``A_v`` to the compressed shift
``S_{theta_v}``. Invariant subspaces of ``S_{theta_v}`` are
``phi K_{theta_v / phi}`` for the divisors ``phi`` of ``theta_v``; pulling
them back through ``J_v`` and multiplying by ``h`` gives every invariant
subspace of ``A_z^M``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _json
from .blaschke import _check_v, _num_den, _zero_key, divisors, frostman_shift
from .errors import GNotInModelSpace, GVanishesOnCircle, PhiNotVanishingAtZero, VerificationFailed
from .model_space import ModelSpace, ModelVector, _check_lambda, model_residual, project, project_many
from .operators import OperatorMatrix, av_matrix, shift_matrix
from .rational import RationalFn, circle_mean, circle_nodes

INVARIANCE_TOL = 1e-8
INCLUSION_TOL = 1e-8
HITT_TOL = 1e-8
FOURIER_TERMS = 64
FOURIER_NODES = 4096


def crofoot_multiplier(theta, v):
    """``sqrt(1 - |v|^2) / (1 - conj(v) theta)`` as a rational function."""
    v = _check_v(v)
    N, D = _num_den(theta)
    return RationalFn(D * math.sqrt(1 - abs(v) ** 2), D - N * np.conj(v))


def crofoot_inverse_multiplier(theta_v, v):
    """``sqrt(1 - |v|^2) / (1 + conj(v) theta_v)``."""
    v = _check_v(v)
    N, D = _num_den(theta_v)
    return RationalFn(D * math.sqrt(1 - abs(v) ** 2), D + N * np.conj(v))


def shifted_space(ms, v):
    """``K_{theta_v}``, sharing ``ms`` itself when ``v = 0``."""
    v = _check_v(v)
    if v == 0:
        return ms
    cache = ms.__dict__.setdefault("_shifted", {})
    if v not in cache:
        cache[v] = ModelSpace(frostman_shift(ms.theta, v))
    return cache[v]


def crofoot_matrix(ms, v):
    """Matrix of ``J_v : K_theta -> K_{theta_v}``."""
    ms_v = shifted_space(ms, v)
    if ms_v is ms:
        return OperatorMatrix(np.eye(ms.dim), ms)
    m = crofoot_multiplier(ms.theta, v)
    X = project_many(ms_v, [m * e for e in ms.basis])
    return OperatorMatrix(X, ms, ms_v)


def crofoot_inverse(ms_v, v, ms):
    """Matrix of ``J_v^{-1} : K_{theta_v} -> K_theta`` from the inverse multiplier."""
    v = _check_v(v)
    if ms_v is ms:
        return OperatorMatrix(np.eye(ms.dim), ms)
    m = crofoot_inverse_multiplier(ms_v.theta, v)
    X = project_many(ms, [m * e for e in ms_v.basis])
    return OperatorMatrix(X, ms_v, ms)


def characteristic_function(ns, lam):
    """``theta_v(lambda) = (theta(lambda) - v) / (1 - conj(v) theta(lambda))``."""
    lam = _check_lambda(lam)
    t = complex(ns.theta(lam))
    return (t - ns.v) / (1 - np.conj(ns.v) * t)


def intertwining_check(ns):
    """``||J_v A_v - S_{theta_v} J_v||``.

    ``S_{theta_v}`` is built directly from the symbol ``z`` on
    ``K_{theta_v}``, since ``theta_v(0) = -v`` need not vanish.
    """
    J = crofoot_matrix(ns.ms, ns.v).entries
    A = av_matrix(ns.ms, ns.v).entries
    S = shift_matrix(shifted_space(ns.ms, ns.v)).entries
    return float(np.linalg.norm(J @ A - S @ J, 2))


def orth(X, tol=1e-10):
    """Orthonormal basis for the column span of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    if X.shape[1] == 0:
        return X
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return U[:, :0]
    return U[:, s > tol * s[0]]


def subspace_distance(Q1, Q2):
    """Spectral-norm distance between the orthogonal projections onto two spans."""
    P1 = Q1 @ Q1.conj().T
    P2 = Q2 @ Q2.conj().T
    return float(np.linalg.norm(P1 - P2, 2))


def invariance_residual(A, Q):
    """``||(I - P) A P||`` for the projection ``P`` onto the span of orthonormal ``Q``."""
    if Q.shape[1] == 0:
        return 0.0
    AQ = A @ Q
    return float(np.linalg.norm(AQ - Q @ (Q.conj().T @ AQ), 2))


@dataclass
class InvariantSubspace:
    phi: object
    dim: int
    basis_fns: list
    basis_coeffs: np.ndarray
    residual: float

    def to_json(self):
        return {
            "phi": self.phi.to_json(),
            "dim": self.dim,
            "basis": [f.to_json() for f in self.basis_fns],
            "residual": self.residual,
        }


def _divides(phi, psi):
    mult = dict(psi.zeros)
    return all(mult.get(p, 0) >= m for p, m in phi.zeros)


def invariant_subspace_lattice(ns):
    """Every ``A_z^M``-invariant subspace, one per divisor of ``theta_v``.

    Each entry holds ``h J_v^{-1}(phi K_{theta_v / phi})`` as functions and
    as ``{h e_k}`` coordinates. Invariance and the inclusions implied by
    divisibility are verified before returning.
    """
    ms, v = ns.ms, ns.v
    ms_v = shifted_space(ms, v)
    Jinv = crofoot_inverse(ms_v, v, ms).entries
    back = crofoot_inverse_multiplier(ms_v.theta, v) if ms_v is not ms else RationalFn(1.0)
    A = av_matrix(ms, v).entries
    out = []
    for phi in divisors(ms_v.theta):
        quotient = ms_v.theta.divide(phi)
        if quotient.degree == 0:
            fns, X = [], np.zeros((ms.dim, 0), dtype=complex)
        else:
            phi_r = phi.to_rational()
            fv = [phi_r * e for e in ModelSpace(quotient).basis]
            X = Jinv @ project_many(ms_v, fv)
            fns = [back * f for f in fv]
            if ns.h is not None:
                fns = [ns.h * f for f in fns]
        Q = orth(X)
        if Q.shape[1] != X.shape[1]:
            raise VerificationFailed(f"basis for divisor {phi!r} is rank deficient")
        res = invariance_residual(A, Q)
        if res >= INVARIANCE_TOL:
            raise VerificationFailed(f"invariance residual {res:.3g} for divisor {phi!r}")
        out.append(InvariantSubspace(phi, X.shape[1], fns, X, res))
    _check_inclusions(out)
    out.sort(key=lambda s: (s.dim, [_zero_key(p) for p in s.phi.points]))
    return out


def _check_inclusions(lattice):
    for big in lattice:
        Qb = orth(big.basis_coeffs)
        for small in lattice:
            if small is big or not _divides(big.phi, small.phi) or small.dim == 0:
                continue
            Xs = orth(small.basis_coeffs)
            r = np.linalg.norm(Xs - Qb @ (Qb.conj().T @ Xs), 2)
            if r >= INCLUSION_TOL:
                raise VerificationFailed(f"inclusion residual {r:.3g}")


def lattice_distance(lattice, X):
    """Distance from the span of ``X`` to the nearest lattice member of equal dimension."""
    Q = orth(X) if np.size(X) else np.zeros((lattice[0].basis_coeffs.shape[0], 0))
    best = np.inf
    for s in lattice:
        if s.dim == Q.shape[1]:
            Qs = orth(s.basis_coeffs) if s.dim else s.basis_coeffs
            best = min(best, subspace_distance(Q, Qs))
    return best


class HittResiduals(NamedTuple):
    cond1: float
    cond2: float


def _check_hitt_inputs(ms, g, phi):
    g = RationalFn.coerce(g).check_circle()
    r = model_residual(ms, g)
    if r >= 1e-8:
        raise GNotInModelSpace(f"g is not in K_theta (residual {r:.3g})")
    if abs(phi(0.0)) > 1e-10:
        raise PhiNotVanishingAtZero(f"phi(0) = {complex(phi(0.0)):.3g}")
    if g.is_zero():
        raise GVanishesOnCircle("g is identically zero")
    for root, _ in g.num.roots() if g.num.degree >= 1 else []:
        if abs(abs(root) - 1) < 1e-6:
            raise GVanishesOnCircle(f"g vanishes at {root:.6g} on the circle")
    return g


def hitt_invariance_check(ns, g, phi):
    """Residuals of the two conditions for ``g K_phi`` to be invariant under the adjoint.

    ``cond1`` is the energy of the Fourier coefficients ``-1..-64`` of
    ``theta conj(g phi)`` on the circle. ``cond2`` is the distance of
    ``(B_v g) / g`` from ``K_phi`` in ``L^2`` of the circle.
    """
    ms = ns.ms
    g = _check_hitt_inputs(ms, g, phi)
    theta = ns.theta
    z = circle_nodes(FOURIER_NODES)
    F = theta(z) * np.conj(g(z) * phi(z))
    c = np.fft.fft(F) / FOURIER_NODES
    cond1 = float(np.linalg.norm(c[-FOURIER_TERMS:]))

    Bg = ModelVector(ms, av_matrix(ms, ns.v).entries.conj().T @ project(ms, g).coeffs)
    ratio = lambda t: Bg(t) / g(t)  # noqa: E731
    if phi.degree == 0:
        cond2 = math.sqrt(abs(circle_mean(lambda t: np.abs(ratio(t)) ** 2)))
    else:
        ms_phi = ModelSpace(phi)
        p = project(ms_phi, ratio)
        cond2 = math.sqrt(abs(circle_mean(lambda t: np.abs(ratio(t) - p(t)) ** 2)))
    return HittResiduals(cond1, cond2)


def hitt_subspace_coords(ns, g, phi):
    """``{h e_k}`` coordinates of ``g K_phi`` (projected onto ``K_theta``)."""
    if phi.degree == 0:
        return np.zeros((ns.dim, 0), dtype=complex)
    g = RationalFn.coerce(g)
    return project_many(ns.ms, [g * e for e in ModelSpace(phi).basis])


def hitt_lattice_crosscheck(ns, g, phi, lattice=None):
    """Whether ``g K_phi`` passes both conditions, and the distance from its
    orthogonal complement to the ``A_z^M`` lattice."""
    res = hitt_invariance_check(ns, g, phi)
    invariant = res.cond1 < HITT_TOL and res.cond2 < HITT_TOL
    lattice = invariant_subspace_lattice(ns) if lattice is None else lattice
    Q = orth(hitt_subspace_coords(ns, g, phi))
    P_perp = np.eye(ns.dim) - Q @ Q.conj().T
    comp = orth(P_perp) if Q.shape[1] < ns.dim else np.zeros((ns.dim, 0), dtype=complex)
    return invariant, lattice_distance(lattice, comp)


def lattice_json(lattice):
    return [s.to_json() for s in lattice]


def lattice_summary(lattice):
    return {
        "count": len(lattice),
        "dims": [s.dim for s in lattice],
        "max_residual": max(s.residual for s in lattice),
        "divisors": [[_json.cplx(p) for p in s.phi.points] for s in lattice],
    }
