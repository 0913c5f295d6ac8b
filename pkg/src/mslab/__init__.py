"""The shift compressed to ``M = h K_theta``, a subspace of ``H^2`` nearly invariant under ``S^*``.

Finite Blaschke products, model spaces with the Takenaka--Malmquist basis,
truncated Toeplitz operators, spectra, the Crofoot transform and the
invariant subspace lattice of ``A_z^M``.
"""

from .blaschke import BlaschkeProduct, divisors, frostman_shift, solve_theta_eq
from .config import Tolerances, get_tolerances, use_tolerances
from .crofoot import (
    InvariantSubspace,
    characteristic_function,
    crofoot_inverse,
    crofoot_matrix,
    hitt_invariance_check,
    intertwining_check,
    invariant_subspace_lattice,
)
from .errors import InputError, MslabError, NumericalError
from .model_space import ModelSpace, ModelVector, conjugation_C, derivative_kernel, project, reproducing_kernel
from .nearly_invariant import NearlySpace, PerturbedShift, extremal_from_span, make_nearly_space, orthogonal_element
from .operators import (
    OperatorMatrix,
    av_matrix,
    bv_matrix,
    compressed_shift_M,
    defect_operators,
    matrix_in_basis,
    tto_matrix,
)
from .rational import BoundarySymbol, ComplexPoly, RationalFn, boundary_inner_product, hardy_inner_product
from .spectral import (
    SpectralReport,
    adjoint_point_spectrum,
    eigenvector,
    full_spectrum,
    generalized_eigenvector,
    point_spectrum,
)

__version__ = "0.1.0"
