"""Numerical tolerances shared by all modules.

The active set lives in a context variable, so overrides made with
:func:`use_tolerances` are local to the current thread / task.
"""

import contextlib
import contextvars
import dataclasses

from .errors import ConfigError


@dataclasses.dataclass(frozen=True)
class Tolerances:
    verify_tol: float = 1e-9
    quad_tol: float = 1e-12
    quad_max: int = 65536
    quad_min: int = 128
    cluster_tol: float = 1e-6

    def __post_init__(self):
        for field in ("verify_tol", "quad_tol", "cluster_tol"):
            if not getattr(self, field) > 0:
                raise ConfigError(f"{field} must be positive")
        for field in ("quad_max", "quad_min"):
            n = getattr(self, field)
            if n < 2 or n & (n - 1):
                raise ConfigError(f"{field} must be a power of two")
        if self.quad_max < 256:
            raise ConfigError("quad_max must be at least 256")
        if self.quad_min > self.quad_max:
            raise ConfigError("quad_min exceeds quad_max")


_ACTIVE = contextvars.ContextVar("mslab_tolerances", default=Tolerances())


def get_tolerances() -> Tolerances:
    return _ACTIVE.get()


@contextlib.contextmanager
def use_tolerances(**overrides):
    """Temporarily replace some tolerance fields.

    >>> with use_tolerances(cluster_tol=1e-5):
    ...     get_tolerances().cluster_tol
    1e-05
    """
    token = _ACTIVE.set(dataclasses.replace(_ACTIVE.get(), **overrides))
    try:
        yield _ACTIVE.get()
    finally:
        _ACTIVE.reset(token)
