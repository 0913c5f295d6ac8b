"""JSON conventions: complex scalars are ``[re, im]`` pairs, arrays of them are lists."""

import numpy as np

from .errors import ConfigError


def cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def cplx_list(values):
    return [cplx(z) for z in np.ravel(values)]


def parse_cplx(obj):
    if isinstance(obj, (int, float, complex)) and not isinstance(obj, bool):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    if isinstance(obj, str):
        try:
            return complex(obj.replace(" ", "").replace("i", "j"))
        except ValueError:
            pass
    raise ConfigError(f"cannot read a complex scalar from {obj!r}")


def parse_cplx_list(obj):
    if not isinstance(obj, (list, tuple)):
        raise ConfigError(f"expected a list of complex scalars, got {obj!r}")
    return np.array([parse_cplx(z) for z in obj], dtype=complex)


def matrix_json(entries, space_id=None, basis="tm"):
    entries = np.asarray(entries, dtype=complex)
    return {
        "space_id": space_id,
        "basis": basis,
        "rows": int(entries.shape[0]),
        "cols": int(entries.shape[1]),
        "entries": [[cplx(z) for z in row] for row in entries],
    }


def parse_matrix(obj):
    return np.array([[parse_cplx(z) for z in row] for row in obj["entries"]], dtype=complex)
