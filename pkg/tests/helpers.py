import math

import numpy as np

from mslab import RationalFn


def random_rational(rng, deg_num=3, deg_den=2, pole_radius=(1.3, 3.0)):
    """Random rational function with every pole outside the closed disk."""
    num = rng.normal(size=deg_num + 1) + 1j * rng.normal(size=deg_num + 1)
    r = rng.uniform(*pole_radius, deg_den)
    poles = r * np.exp(2j * np.pi * rng.uniform(size=deg_den))
    den = np.array([1.0 + 0j])
    for p in poles:
        den = np.convolve(den, [1.0, -1 / p])
    return RationalFn(num, den)


SQRT6 = math.sqrt(6)
# roots of theta = -1/3 for theta = z (z - 1/2) / (1 - z/2)
A_ROOT = (1 + 1j * math.sqrt(2)) / 3
B_ROOT = (1 - 1j * math.sqrt(2)) / 3
