"""theta = z^4: [B_v]^4 = alpha I, four simple eigenvalues, a lattice of 16 spans.

Run: python3 demos/fourth_power.py [alpha]
"""

import sys

import numpy as np

from mslab import BlaschkeProduct, ModelSpace, PerturbedShift, RationalFn, bv_matrix, matrix_in_basis
from mslab import adjoint_point_spectrum, invariant_subspace_lattice

alpha = complex(sys.argv[1]) if len(sys.argv) > 1 else 0.3 + 0.4j
ms = ModelSpace(BlaschkeProduct([(0.0, 4)]))
v = np.conj(alpha)

B = matrix_in_basis(ms, bv_matrix(ms, v), [RationalFn.z(k) for k in range(4)])
np.set_printoptions(precision=4, suppress=True)
print("[B_v] in 1, z, z^2, z^3:\n", B)
print("max |[B_v]^4 - alpha I| =", np.abs(np.linalg.matrix_power(B, 4) - alpha * np.eye(4)).max())

ps = PerturbedShift(ms, v)
print("eigenvalues of B_v (fourth roots of alpha):")
for lam, _, _ in adjoint_point_spectrum(ps):
    print(f"  {lam:.10f}   lam^4 = {lam**4:.10f}")

L = invariant_subspace_lattice(ps)
print("lattice size:", len(L), " dimensions:", [s.dim for s in L])
