"""Walk through M = span{1 + z, z(1 + z)} inside K_theta, theta = z(z - 1/2)/(1 - z/2).

Run: python3 demos/worked_example.py
"""

import numpy as np

from mslab import BlaschkeProduct, RationalFn, extremal_from_span, full_spectrum, invariant_subspace_lattice
from mslab import make_nearly_space
from mslab.blaschke import frostman_shift
from mslab.rational import circle_nodes

theta = BlaschkeProduct([0.0, 0.5])
span = [RationalFn([1, 1]), RationalFn([0, 1, 1])]

h, _ = extremal_from_span(span)
print("extremal function h, numerator coefficients:", np.round(h.num.coeffs * np.sqrt(6), 12), "/ sqrt(6)")

ns = make_nearly_space(h, theta)
print("v = <theta h, h> =", ns.v)

rep = full_spectrum(ns)
for lam, m in rep.eigenvalues:
    print(f"eigenvalue {lam:.12f}  multiplicity {m}")

z = circle_nodes(64)
tv = frostman_shift(theta, ns.v)
closed = (3 * z**2 - 2 * z + 1) / (z**2 - 2 * z + 3)
print("Frostman shift vs (3z^2 - 2z + 1)/(z^2 - 2z + 3):", np.abs(tv(z) - closed).max())

print("invariant subspaces:")
for s in invariant_subspace_lattice(ns):
    label = "{0}" if s.dim == 0 else f"dim {s.dim}"
    print(f"  {label:6}  divisor zeros {[complex(np.round(p, 6)) for p in s.phi.points]}  residual {s.residual:.1e}")
