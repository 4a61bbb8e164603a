""" test framework stuff """

import itertools
import math

from su11pss import interferometer, sweep
from su11pss.params import ModelParams

#: The parameter grid the closed forms are validated against
GRID_SCHEMES = list(itertools.product((0, 1, 2), repeat=2))

#: The grid plus every scheme a preset curve draws
ALL_SCHEMES = sorted(set(GRID_SCHEMES) | set(sweep.SYMMETRIC) | set(sweep.SINGLE_MODE)
                     | set(sweep.ARBITRARY))


def tmsv_moments(g: float):
    """ cosh² g and sinh² g, the quantities most closed forms reduce to """
    return math.cosh(g) ** 2, math.sinh(g) ** 2


def central_difference(func, x: float, step: float = 1e-5) -> float:
    """ Second-order central difference of a scalar function """
    return (func(x + step) - func(x - step)) / (2 * step)


def sensitivity_curve(p: ModelParams, phis):
    """ The closed-form phase sensitivity along a list of phases """
    return [interferometer.phase_sensitivity(p.with_(phi=phi)) for phi in phis]
