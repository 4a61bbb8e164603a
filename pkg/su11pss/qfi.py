# qfi.py
""" Quantum Fisher information of mode a and the quantum Cramér–Rao bound,
both for the ideal interferometer and under photon loss in mode a """

import collections
import logging
import math

from . import errors, interferometer
from .config import config
from .params import ModelParams

LOGGER = logging.getLogger(__name__)

#: How the lossy QFI is evaluated; this gets written alongside lossy output
LOSSY_CONVENTION = ("F and <n_a> evaluated in the lossless (T=1) subtracted state; "
                    "eta enters only through F_L = 4 F eta <n_a> / ((1-eta) F + 4 eta <n_a>)")


class FisherResult(collections.namedtuple('FisherResult', ['f', 'qcrb', 'v'])):
    """ A Fisher information, with its Cramér–Rao bound for v measurements """
    __slots__ = ()


def qfi_ideal(p: ModelParams) -> float:
    """ Get the QFI F = 4·Var(n_a) of the photon-subtracted state.

    :raises errors.InvalidArgument: if p has internal loss (T ≠ 1)
    :raises errors.DegenerateState: if the subtraction cannot succeed
    """
    if p.T != 1:
        raise errors.InvalidArgument(f"The ideal QFI is defined at T=1, got T={p.T}")

    mom = interferometer.moments(p)
    m, n = p.m, p.n
    second = interferometer.as_real(
        mom.normalized(m + 2, n, m + 2, n), "<a†²a²>")
    mean = interferometer.mean_photon_a(p)
    return 4 * (second + mean - mean ** 2)


def qcrb(f: float, v: int = 1) -> float:
    """ Get the quantum Cramér–Rao bound 1/√(vF)

    :raises errors.InvalidArgument: if f is not positive or v is not a positive integer
    """
    if not f > 0:
        raise errors.InvalidArgument(f"Fisher information must be positive, got {f}")
    if int(v) != v or v < 1:
        raise errors.InvalidArgument(f"Measurement count must be a positive integer, got {v}")
    return 1 / math.sqrt(v * f)


def qfi_lossy(p: ModelParams) -> float:
    """ Get the QFI of mode a when mode a suffers loss of transmittance η
    before the subtraction

    :raises errors.DegenerateState: if the subtraction cannot succeed
    """
    lossless = p.with_(T=1.0)
    fisher = qfi_ideal(lossless)
    if p.eta == 1:
        return fisher

    mean = interferometer.mean_photon_a(lossless)
    denominator = (1 - p.eta) * fisher + 4 * p.eta * mean
    if denominator <= 0:
        return 0.0
    return 4 * fisher * p.eta * mean / denominator


def qcrb_lossy(p: ModelParams, v: int = 1) -> float:
    """ Get the quantum Cramér–Rao bound under loss in mode a """
    return qcrb(qfi_lossy(p), v)


def fisher(p: ModelParams, v: int = None) -> FisherResult:
    """ Get the ideal QFI along with its bound """
    v = v or config.measurements
    f = qfi_ideal(p)
    return FisherResult(f, qcrb(f, v), v)


def fisher_lossy(p: ModelParams, v: int = None) -> FisherResult:
    """ Get the lossy QFI along with its bound """
    v = v or config.measurements
    f = qfi_lossy(p)
    LOGGER.debug("Lossy QFI for %s: %g", p, f)
    return FisherResult(f, qcrb(f, v), v)
