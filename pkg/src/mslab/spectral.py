"""Spectra and eigenvectors of the compressed shift ``A_z^M``.

The eigenvalues are the solutions of ``theta(lambda) = v`` in the disk,
found by polynomial root clustering; the matrix eigensolver is only used as
a cross-check. For a finite Blaschke product there is no essential
spectrum, so the whole spectrum is the point spectrum.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _json
from .blaschke import _num_den, solve_theta_eq
from .errors import MultiplicityTooLow, NotAnEigenvalue, SpectralMismatch, VerificationFailed
from .model_space import _check_lambda, derivative_kernel, project, reproducing_kernel
from .operators import compressed_shift_M
from .rational import RationalFn

EIGEN_TOL = 1e-8
CROSS_TOL = 1e-7
GEN_UPPER = 1e-7
GEN_LOWER = 1e-4


def hausdorff(xs, ys):
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    if xs.size == 0 and ys.size == 0:
        return 0.0
    if xs.size == 0 or ys.size == 0:
        return np.inf
    d = np.abs(xs[:, None] - ys[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _expand(roots):
    return np.array([r for r, m in roots for _ in range(m)], dtype=complex)


def _cross_validate(roots, eigs):
    """Pair each root (with repetition) to a matrix eigenvalue, then compare
    the root with the centroid of the eigenvalues assigned to its cluster.

    A defective eigenvalue of multiplicity ``m`` splits by about
    ``eps^(1/m)`` under rounding, but the centroid of the split cluster is
    stable, so this stays meaningful at multiple roots.
    """
    expanded = _expand(roots)
    if expanded.size != eigs.size:
        raise SpectralMismatch(f"{expanded.size} roots for a {eigs.size}x{eigs.size} matrix")
    cost = np.abs(expanded[:, None] - eigs[None, :])
    ri, ci = linear_sum_assignment(cost)
    assigned = eigs[ci[np.argsort(ri)]]
    worst = 0.0
    start = 0
    for r, m in roots:
        centroid = assigned[start:start + m].mean()
        worst = max(worst, abs(centroid - r))
        start += m
    return worst


def point_spectrum(ns, cluster_tol=None):
    """Eigenvalues of ``A_z^M`` with multiplicities, sorted canonically."""
    theta, v = ns.theta, ns.v
    roots = solve_theta_eq(theta, v, cluster_tol=cluster_tol)
    for r, _ in roots:
        if abs(theta(r) - v) >= EIGEN_TOL:
            raise SpectralMismatch(f"|theta(lambda) - v| = {abs(theta(r) - v):.3g} at lambda = {r:.6g}")
    eigs = np.linalg.eigvals(compressed_shift_M(ns).entries)
    err = _cross_validate(roots, eigs)
    if err >= CROSS_TOL:
        raise SpectralMismatch(f"matrix eigenvalues differ from the roots of theta = v by {err:.3g}")
    return roots


def _check_eigenvalue(ns, lam):
    lam = _check_lambda(lam)
    r = abs(ns.theta(lam) - ns.v)
    if r >= EIGEN_TOL:
        raise NotAnEigenvalue(f"|theta(lambda) - v| = {r:.3g}")
    return lam


def _k_eigenfunction(theta, v, lam):
    """``(theta - v) / (z - lambda)`` in ``K_theta``."""
    N, D = _num_den(theta)
    return RationalFn((N - D * v).deflate(lam), D)


def eigenvector_coords(ns, lam):
    """Coordinates (in ``{h e_k}``) of the eigenvector for ``lambda``."""
    lam = _check_eigenvalue(ns, lam)
    x = project(ns.ms, _k_eigenfunction(ns.theta, ns.v, lam))
    A = compressed_shift_M(ns).entries
    res = np.linalg.norm(A @ x.coeffs - lam * x.coeffs)
    if res >= EIGEN_TOL * x.norm():
        raise VerificationFailed(f"eigenvector residual {res:.3g}")
    return x


def eigenvector(ns, lam):
    """``h (theta - v) / (z - lambda)``, an eigenvector of ``A_z^M``."""
    lam = _check_eigenvalue(ns, lam)
    f = _k_eigenfunction(ns.theta, ns.v, lam)
    eigenvector_coords(ns, lam)
    return f if ns.h is None else ns.h * f


def adjoint_point_spectrum(ns, cluster_tol=None):
    """``[(conj(lambda), mult, k_lambda)]`` for the adjoint ``(A_z^M)^*``.

    The eigenvector ``k_lambda`` is given in ``{h e_k}`` coordinates, i.e. it
    stands for ``h k_lambda``.
    """
    B = compressed_shift_M(ns).entries.conj().T
    out = []
    for lam, m in point_spectrum(ns, cluster_tol):
        y = reproducing_kernel(ns.ms, lam)
        res = np.linalg.norm(B @ y.coeffs - np.conj(lam) * y.coeffs)
        if res >= EIGEN_TOL * y.norm():
            raise VerificationFailed(f"adjoint eigenvector residual {res:.3g}")
        out.append((complex(np.conj(lam)), m, y))
    return out


def multiplicity_of(ns, lam, cluster_tol=None, match_tol=1e-6):
    for r, m in solve_theta_eq(ns.theta, ns.v, cluster_tol):
        if abs(r - lam) < match_tol:
            return m
    raise NotAnEigenvalue(f"{lam} is not a root of theta = v")


def generalized_eigenvector(ns, lam, n, cluster_tol=None):
    """Kernel for ``f -> f^{(n)}(lambda)``, a generalized eigenvector of the adjoint.

    Requires ``lambda`` to be a root of ``theta = v`` of multiplicity at least
    ``n + 1``. The result is checked to lie in ``ker (B - conj(lambda))^{n+1}``
    but not in ``ker (B - conj(lambda))^n``.
    """
    lam = _check_eigenvalue(ns, lam)
    m = multiplicity_of(ns, lam, cluster_tol)
    if m < n + 1:
        raise MultiplicityTooLow(f"lambda has multiplicity {m}, need at least {n + 1}")
    x = derivative_kernel(ns.ms, lam, n)
    T = compressed_shift_M(ns).entries.conj().T - np.conj(lam) * np.eye(ns.dim)
    hi = np.linalg.norm(np.linalg.matrix_power(T, n + 1) @ x.coeffs)
    lo = np.linalg.norm(np.linalg.matrix_power(T, n) @ x.coeffs)
    if hi >= GEN_UPPER * x.norm():
        raise VerificationFailed(f"(B - conj(lambda))^{n + 1} x = {hi:.3g} does not vanish")
    if lo <= GEN_LOWER * x.norm():
        raise VerificationFailed(f"(B - conj(lambda))^{n} x = {lo:.3g}: not a proper generalized eigenvector")
    return x


@dataclass
class SpectralReport:
    eigenvalues: list
    eigenvectors: list
    essential: frozenset = frozenset()
    whole: list = field(default_factory=list)
    generalized: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "eigenvalues": [{"lambda": _json.cplx(lam), "mult": m} for lam, m in self.eigenvalues],
            "eigenvectors": [f.to_json() for f in self.eigenvectors],
            "essential": sorted(_json.cplx(z) for z in self.essential),
            "whole": _json.cplx_list(self.whole),
            "generalized": [
                {"lambda": _json.cplx(lam), "order": n, "coeffs": _json.cplx_list(x.coeffs)}
                for lam, n, x in self.generalized
            ],
            "notes": list(self.notes),
        }


def full_spectrum(ns, cluster_tol=None):
    """Point, essential and whole spectrum, with eigenvectors and Jordan chains."""
    eigenvalues = point_spectrum(ns, cluster_tol)
    vectors = [eigenvector(ns, lam) for lam, _ in eigenvalues]
    generalized = []
    for lam, m in eigenvalues:
        for n in range(1, m):
            generalized.append((lam, n, generalized_eigenvector(ns, lam, n, cluster_tol)))
    notes = [
        "essential spectrum is empty: theta is a finite Blaschke product, "
        "so sigma(theta) meets the circle nowhere"
    ]
    if generalized:
        notes.append("multiple eigenvalues present; generalized eigenvectors refer to the adjoint")
    return SpectralReport(
        eigenvalues=eigenvalues,
        eigenvectors=vectors,
        whole=[lam for lam, _ in eigenvalues],
        generalized=generalized,
        notes=notes,
    )
