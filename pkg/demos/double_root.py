"""A double root of theta = v and the Jordan chain it produces.

For theta = z(z - 1/2)/(1 - z/2) the equation theta(l) = v is a quadratic
whose discriminant vanishes at v = 4 sqrt(3) - 7, with root 2 - sqrt(3).

Run: python3 demos/double_root.py
"""

import math

import numpy as np

from mslab import BlaschkeProduct, ModelSpace, PerturbedShift, bv_matrix, derivative_kernel, invariant_subspace_lattice
from mslab import point_spectrum

theta = BlaschkeProduct([0.0, 0.5])
v = 4 * math.sqrt(3) - 7
lam = 2 - math.sqrt(3)
ms = ModelSpace(theta)
ps = PerturbedShift(ms, v)

print("roots of theta = v:", point_spectrum(ps, cluster_tol=1e-6))
print("raw matrix eigenvalues:", np.linalg.eigvals(bv_matrix(ms, v).entries), "(split by rounding)")

x = derivative_kernel(ms, lam, 1).coeffs
T = bv_matrix(ms, v).entries - lam * np.eye(2)
nx = np.linalg.norm(x)
print(f"||(B - lam) x|| / ||x||   = {np.linalg.norm(T @ x) / nx:.3e}")
print(f"||(B - lam)^2 x|| / ||x|| = {np.linalg.norm(T @ T @ x) / nx:.3e}")
print("lattice dimensions:", [s.dim for s in invariant_subspace_lattice(ps)], "(a chain)")
