# interferometer.py
""" Closed-form quantities of the SU(1,1) interferometer with photon
subtraction: normalization, homodyne moments, phase sensitivity, mean photon
number, and photon-number calibration.

All moments are derived from the generating function e^{w1} built by
:py:func:`series.build_w1`; ``D(m1, n1, m2, n2)`` denotes the normally-ordered
moment ⟨a†^m1 b†^n1 a^m2 b^n2⟩ of the state before subtraction. The homodyne
quadrature is X = a + a† on output mode a, without the 1/√2 factor. """

import cmath
import collections
import functools
import logging
import math
import typing

import numpy as np
import scipy.optimize

from . import errors, series
from .config import config
from .params import ModelParams

LOGGER = logging.getLogger(__name__)


class Moments:
    """ The normally-ordered moments of one configuration's state before
    subtraction, as needed by the closed forms """

    def __init__(self, p: ModelParams):
        self.params = p
        # the highest derivative any closed form needs is (m+2, n, m+2, n)
        # or (m, n+2, m, n) and friends
        self.cap = 2 * p.m + 2 * p.n + 4
        self.limits = (p.m + 2, p.n + 2, p.m + 2, p.n + 2)
        w1 = series.build_w1(p, self.cap, self.limits)
        self.generating = series.series_exp(w1)
        LOGGER.debug("Built generating function for %s: cap=%d, %d terms",
                     p, self.cap, len(self.generating))

    def d(self, m1: int, n1: int, m2: int, n2: int) -> complex:
        # pylint:disable=invalid-name
        """ Get the moment ⟨a†^m1 b†^n1 a^m2 b^n2⟩ """
        return series.derivative_functional(self.generating, (m1, n1, m2, n2))

    def normalized(self, m1: int, n1: int, m2: int, n2: int) -> complex:
        """ Get the moment of the subtracted state, i.e. scaled by A² """
        return self.d(m1, n1, m2, n2) * normalization(self.params)


@functools.lru_cache(maxsize=256)
def _state_moments(p: ModelParams) -> Moments:
    return Moments(p)


def moments(p: ModelParams) -> Moments:
    """ Get the (cached) moment table for a configuration; the moments do not
    depend on the phase shift or on the QFI loss, so those are ignored """
    return _state_moments(p._replace(phi=0.0, eta=1.0))


def clear_cache():
    """ Forget all cached moment tables """
    _state_moments.cache_clear()


def as_real(value: complex, what: str) -> float:
    """ Convert a Hermitian expectation value to a real, asserting that it is one """
    if abs(value.imag) > config.imag_tolerance * max(1.0, abs(value.real)):
        raise errors.NumericalInconsistency(
            f"{what} has imaginary part {value.imag}; this indicates a bug")
    return value.real


def normalization(p: ModelParams) -> float:
    """ Get A², the normalization of the photon-subtracted state

    :raises errors.DegenerateState: if the subtraction cannot succeed
    """
    norm = as_real(moments(p).d(p.m, p.n, p.m, p.n), "A^-2")
    if norm <= config.degenerate_floor:
        raise errors.DegenerateState(
            f"Subtracting ({p.m}, {p.n}) photons has zero probability ({norm})")
    return 1 / norm


def _mean_x(p: ModelParams) -> complex:
    mom = moments(p)
    m, n = p.m, p.n
    cosh, sinh = math.cosh(p.g), math.sinh(p.g)
    ephi, etheta = cmath.exp(1j * p.phi), cmath.exp(1j * p.theta1)
    return (cosh / ephi * mom.normalized(m + 1, n, m, n)
            + sinh / etheta * mom.normalized(m, n, m, n + 1)
            + cosh * ephi * mom.normalized(m, n, m + 1, n)
            + sinh * etheta * mom.normalized(m, n + 1, m, n))


def _mean_x2(p: ModelParams) -> complex:
    # pylint:disable=too-many-locals
    mom = moments(p)
    m, n = p.m, p.n
    cosh2, sinh2 = math.cosh(p.g) ** 2, math.sinh(p.g) ** 2
    cross = math.sinh(2 * p.g)
    ephi, etheta = cmath.exp(1j * p.phi), cmath.exp(1j * p.theta1)
    d = mom.normalized  # pylint:disable=invalid-name
    return (cosh2 / ephi**2 * d(m + 2, n, m, n)
            + cross / (ephi * etheta) * d(m + 1, n, m, n + 1)
            + sinh2 / etheta**2 * d(m, n, m, n + 2)
            + cosh2 * ephi**2 * d(m, n, m + 2, n)
            + cross * ephi * etheta * d(m, n + 1, m + 1, n)
            + sinh2 * etheta**2 * d(m, n + 2, m, n)
            + 2 * cosh2 * d(m + 1, n, m + 1, n)
            + cross * etheta / ephi * d(m + 1, n + 1, m, n)
            + cross * ephi / etheta * d(m, n, m + 1, n + 1)
            + 2 * sinh2 * d(m, n + 1, m, n + 1)
            + math.cosh(2 * p.g))


def _dmean_x_dphi(p: ModelParams) -> complex:
    mom = moments(p)
    m, n = p.m, p.n
    cosh = math.cosh(p.g)
    ephi = cmath.exp(1j * p.phi)
    return (-1j * cosh / ephi * mom.normalized(m + 1, n, m, n)
            + 1j * cosh * ephi * mom.normalized(m, n, m + 1, n))


def mean_x(p: ModelParams) -> float:
    """ Get ⟨X⟩ at the output of mode a

    :raises errors.DegenerateState: if the subtraction cannot succeed
    """
    return as_real(_mean_x(p), "<X>")


def mean_x2(p: ModelParams) -> float:
    """ Get ⟨X²⟩ at the output of mode a

    :raises errors.DegenerateState: if the subtraction cannot succeed
    """
    return as_real(_mean_x2(p), "<X^2>")


def dmean_x_dphi(p: ModelParams) -> float:
    """ Get ∂⟨X⟩/∂φ; A² carries no φ dependence so only the phase factors
    are differentiated

    :raises errors.DegenerateState: if the subtraction cannot succeed
    """
    return as_real(_dmean_x_dphi(p), "d<X>/dphi")


class QuadratureStats(collections.namedtuple('QuadratureStats',
                                             ['mean_x', 'mean_x2', 'dmean_x_dphi'])):
    """ The homodyne statistics of one configuration """
    __slots__ = ()

    @property
    def variance(self) -> float:
        """ Var(X), with floating-point noise below zero clamped away

        :raises errors.NumericalInconsistency: if the variance is
            significantly negative
        """
        var = self.mean_x2 - self.mean_x ** 2
        if var < config.variance_floor:
            raise errors.NumericalInconsistency(f"Negative quadrature variance {var}")
        if var < 0:
            LOGGER.debug("Clamping variance %g to 0", var)
            var = 0.0
        return var

    def rescaled(self, scale: float) -> 'QuadratureStats':
        """ Get the statistics for the quadrature scale·X """
        return QuadratureStats(self.mean_x * scale,
                               self.mean_x2 * scale ** 2,
                               self.dmean_x_dphi * scale)

    @property
    def sensitivity(self) -> float:
        """ The error-propagation phase sensitivity

        :raises errors.SensitivityUndefined: if the slope vanishes
        """
        slope = abs(self.dmean_x_dphi)
        if slope < config.derivative_floor:
            raise errors.SensitivityUndefined(f"Signal slope {slope} is below the floor")
        return math.sqrt(self.variance) / slope


def quadrature_stats(p: ModelParams, scale: float = 1.0) -> QuadratureStats:
    """ Get all of the homodyne statistics for a configuration

    :param float scale: the quadrature convention; 1 gives a+a†, 1/√2 gives
        (a+a†)/√2
    """
    return QuadratureStats(mean_x(p), mean_x2(p), dmean_x_dphi(p)).rescaled(scale)


def phase_sensitivity(p: ModelParams, scale: float = 1.0) -> float:
    """ Get the homodyne phase sensitivity Δφ = √Var(X) / |∂⟨X⟩/∂φ|

    :raises errors.SensitivityUndefined: at a vanishing signal slope
    :raises errors.NumericalInconsistency: on a negative variance
    """
    return quadrature_stats(p, scale).sensitivity


def mean_photon_N(p: ModelParams) -> float:
    # pylint:disable=invalid-name
    """ Get the total mean photon number inside the interferometer, after subtraction """
    mom = moments(p)
    m, n = p.m, p.n
    return as_real(mom.normalized(m + 1, n, m + 1, n) + mom.normalized(m, n + 1, m, n + 1), "N")


def mean_photon_a(p: ModelParams) -> float:
    """ Get the mean photon number of mode a after subtraction """
    return as_real(moments(p).normalized(p.m + 1, p.n, p.m + 1, p.n), "<n_a>")


def sql_hl(N: float) -> typing.Tuple[float, float]:
    # pylint:disable=invalid-name
    """ Get the standard quantum limit and Heisenberg limit at a mean photon number

    :raises errors.InvalidArgument: if N is not positive
    """
    if not N > 0:
        raise errors.InvalidArgument(f"Mean photon number must be positive, got {N}")
    return 1 / math.sqrt(N), 1 / N


def _calibrate(target_N: float, evaluate: typing.Callable[[float], float],
               low: float, high: float, what: str) -> float:
    # pylint:disable=invalid-name
    """ Solve evaluate(x) = target_N on [low, high] by bisection, after
    verifying that evaluate is increasing there """
    samples = np.linspace(low, high, config.calibration_samples)
    values = np.array([evaluate(x) for x in samples])

    if target_N < values[0]:
        raise errors.Unreachable(
            f"N={target_N} is below the minimum {values[0]} attainable by varying {what}")
    if target_N > values[-1]:
        raise errors.Unreachable(
            f"N={target_N} is above the maximum {values[-1]} attainable by varying {what}")
    if np.any(np.diff(values) <= 0):
        raise errors.CalibrationFailed(
            f"N is not monotone in {what} on [{low}, {high}]")

    # only bisect the sample interval that holds the root
    upper = int(np.searchsorted(values, target_N))
    if values[upper] == target_N:
        return float(samples[upper])
    lower = upper - 1

    root = scipy.optimize.bisect(lambda x: evaluate(x) - target_N,
                                 samples[lower], samples[upper],
                                 xtol=1e-15, maxiter=500)
    error = abs(evaluate(root) - target_N)
    if error > config.calibration_tolerance:
        raise errors.CalibrationFailed(
            f"Calibrating {what} missed N={target_N} by {error}")

    LOGGER.info("Calibrated %s=%.12g for N=%g (error %g)", what, root, target_N, error)
    return root


def calibrate_alpha(target_N: float, p: ModelParams) -> float:
    # pylint:disable=invalid-name
    """ Find the real coherent amplitude that gives a mean photon number of
    target_N; the alpha of p is ignored

    :raises errors.Unreachable: if the target is outside of the attainable range
    :raises errors.CalibrationFailed: if N is not monotone in α
    """
    return _calibrate(target_N, lambda alpha: mean_photon_N(p.with_(alpha=alpha)),
                      0.0, config.calibration_alpha_max, 'alpha')


def calibrate_gain(target_N: float, p: ModelParams) -> float:
    # pylint:disable=invalid-name
    """ Find the OPA gain that gives a mean photon number of target_N; the g
    of p is ignored

    :raises errors.Unreachable: if the target is outside of the attainable range
    :raises errors.CalibrationFailed: if N is not monotone in g
    """
    return _calibrate(target_N, lambda g: mean_photon_N(p.with_(g=g)),
                      config.calibration_gain_min, config.calibration_gain_max, 'g')


def optimal_phase(p: ModelParams, low: float = 1e-3, high: float = math.pi - 1e-3,
                  samples: int = 200) -> typing.Tuple[float, float]:
    """ Find the phase shift that minimizes the phase sensitivity

    :returns: ``(phi, delta_phi)``
    :raises errors.SensitivityUndefined: if no phase in the interval has a
        defined sensitivity
    """
    phis = np.linspace(low, high, samples)
    best = None
    for idx, phi in enumerate(phis):
        try:
            value = phase_sensitivity(p.with_(phi=phi))
        except errors.SensitivityUndefined:
            continue
        if best is None or value < best[1]:
            best = (idx, value)

    if best is None:
        raise errors.SensitivityUndefined(f"No defined sensitivity on [{low}, {high}]")

    idx = best[0]
    bounds = (phis[max(idx - 1, 0)], phis[min(idx + 1, samples - 1)])

    def objective(phi):
        try:
            return phase_sensitivity(p.with_(phi=phi))
        except errors.SensitivityUndefined:
            return math.inf

    result = scipy.optimize.minimize_scalar(objective, bounds=bounds, method='bounded',
                                            options={'xatol': 1e-10})
    if result.fun < best[1]:
        return float(result.x), float(result.fun)
    return float(phis[idx]), best[1]
