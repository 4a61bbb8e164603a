# params.py
""" Physical parameters of one interferometer configuration """

import cmath
import collections
import logging
import math
import typing

from . import errors
from .config import config

LOGGER = logging.getLogger(__name__)

_FIELDS = ('g', 'theta1', 'theta2', 'alpha', 'm', 'n', 'T', 'eta', 'phi')

#: The fields that a sweep may vary
SWEEPABLE = ('phi', 'g', 'alpha', 'T', 'eta')


def _phase_gap(theta1: float, theta2: float) -> float:
    """ Distance of theta2 - theta1 from pi, modulo 2pi """
    return abs(cmath.phase(cmath.exp(1j * (theta2 - theta1 - math.pi))))


class ModelParams(collections.namedtuple('ModelParams', _FIELDS)):
    """ All of the physical parameters of an SU(1,1) interferometer with
    photon subtraction.

    :param float g: OPA gain factor, shared by both OPAs
    :param float theta1: phase of the first OPA
    :param float theta2: phase of the second OPA; always ``theta1 + pi``
        unless given, in which case it must agree
    :param complex alpha: coherent amplitude seeding mode a
    :param int m: photons subtracted from mode a
    :param int n: photons subtracted from mode b
    :param float T: internal transmittance applied to both modes
    :param float eta: transmittance of the mode-a loss used for the lossy QFI
    :param float phi: phase shift in mode a
    """
    __slots__ = ()

    def __new__(cls, g: float = 1.0,
                theta1: float = 0.0,
                theta2: typing.Optional[float] = None,
                alpha: complex = 1.0,
                m: int = 0,
                n: int = 0,
                T: float = 1.0,  # pylint:disable=invalid-name
                eta: float = 1.0,
                phi: float = 0.0):
        # pylint:disable=too-many-arguments
        theta1 = float(theta1)
        if theta2 is None:
            theta2 = theta1 + math.pi
        theta2 = float(theta2)

        if complex(alpha).imag == 0:
            alpha = complex(alpha).real
        else:
            alpha = complex(alpha)

        if any(isinstance(order, float) and not order.is_integer() for order in (m, n)):
            raise errors.InvalidArgument(f"Subtraction orders must be integers, got ({m}, {n})")

        self = super().__new__(cls, float(g), theta1, theta2, alpha,
                               int(m), int(n), float(T), float(eta), float(phi))
        self.validate()
        return self

    def validate(self):
        """ Check the parameter invariants

        :raises errors.InvalidArgument: if any parameter is out of range
        """
        if not math.isfinite(self.g) or self.g < 0:
            raise errors.InvalidArgument(f"Gain must be non-negative, got {self.g}")
        if not 0 < self.T <= 1:
            raise errors.InvalidArgument(f"Transmittance T must be in (0,1], got {self.T}")
        if not 0 < self.eta <= 1:
            raise errors.InvalidArgument(f"Transmittance eta must be in (0,1], got {self.eta}")
        if self.m < 0 or self.n < 0:
            raise errors.InvalidArgument(
                f"Subtraction orders must be non-negative, got ({self.m}, {self.n})")
        if max(self.m, self.n) > config.max_order:
            raise errors.InvalidArgument(
                f"Subtraction order ({self.m}, {self.n}) exceeds the supported maximum "
                f"of {config.max_order}")
        if _phase_gap(self.theta1, self.theta2) > 1e-12:
            raise errors.InvalidArgument(
                f"OPA phases must satisfy theta2 - theta1 = pi, got {self.theta1}, {self.theta2}")
        if not cmath.isfinite(self.alpha):
            raise errors.InvalidArgument(f"Coherent amplitude must be finite, got {self.alpha}")

    def with_(self, **kwargs) -> 'ModelParams':
        """ Get a copy of these parameters with some fields changed.

        Changing ``theta1`` without ``theta2`` keeps the OPAs opposed.
        """
        args = {**self._asdict(), **kwargs}
        if 'theta1' in kwargs and 'theta2' not in kwargs:
            del args['theta2']
        return ModelParams(**args)

    @property
    def scheme(self) -> typing.Tuple[int, int]:
        """ The subtraction scheme, as (m, n) """
        return self.m, self.n

    def __str__(self):
        return ' '.join(f'{key}={val}' for key, val in self._asdict().items())
