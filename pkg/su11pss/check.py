# check.py
""" Equivalence checking of the closed forms against the Fock-space oracle """

import collections
import concurrent.futures
import itertools
import logging
import typing

from . import errors, interferometer, oracle, qfi, utils
from .config import config
from .params import ModelParams

LOGGER = logging.getLogger(__name__)


def _grid(schemes, gains, alphas, transmittances, phis) -> typing.List[ModelParams]:
    return [ModelParams(g=g, alpha=alpha, m=m, n=n, T=T, phi=phi)
            for (m, n), g, alpha, T, phi in itertools.product(
                schemes, gains, alphas, transmittances, phis)]


#: The configuration grids that can be checked, by name
GRIDS: typing.Dict[str, typing.Callable[[], typing.List[ModelParams]]] = {
    'default': lambda: _grid(list(itertools.product((0, 1, 2), repeat=2)),
                             (0.5, 1.0), (0.5, 1.0), (0.7, 1.0), (0.3, 0.6)),
    'quick': lambda: _grid(((0, 0), (1, 0), (0, 1), (1, 1)),
                           (0.5,), (0.5,), (0.7, 1.0), (0.6,)),
    'point': lambda: [ModelParams(g=1.0, alpha=1.0, m=1, n=1, T=1.0, phi=0.6)],
}

Deviation = collections.namedtuple('Deviation', ['quantity', 'params', 'closed', 'oracle',
                                                 'deviation'])


def _closed_forms(p: ModelParams) -> typing.Dict[str, typing.Callable[[], float]]:
    forms = {
        'normalization': lambda: interferometer.normalization(p),
        'mean_x': lambda: interferometer.mean_x(p),
        'mean_x2': lambda: interferometer.mean_x2(p),
        'sensitivity': lambda: interferometer.phase_sensitivity(p),
        'mean_photon': lambda: interferometer.mean_photon_N(p),
    }
    if p.T == 1:
        forms['qfi'] = lambda: qfi.qfi_ideal(p)
    return forms


def _attempt(func: typing.Callable[[], float]) -> typing.Union[float, str]:
    """ Get a value, or the error code if it fails """
    try:
        return func()
    except errors.Su11Error as err:
        return err.code


def check_point(p: ModelParams) -> typing.List[Deviation]:
    """ Compare every closed-form quantity for one configuration against the oracle """
    closed = {key: _attempt(func) for key, func in _closed_forms(p).items()}

    try:
        result = oracle.oracle_expectations(p)
    except errors.Su11Error as err:
        expected = {key: err.code for key in closed}
    else:
        expected = {key: result.values[key] for key in closed if key != 'sensitivity'}
        expected['sensitivity'] = _attempt(lambda: result.sensitivity)

    deviations = []
    for key, value in closed.items():
        other = expected[key]
        if isinstance(value, str) or isinstance(other, str):
            deviation = 0.0 if value == other else float('inf')
        else:
            deviation = utils.relative_deviation(value, other, config.check_floor)
        deviations.append(Deviation(key, p, value, other, deviation))
    return deviations


class CheckReport:
    """ The outcome of an equivalence check over a grid """

    def __init__(self, deviations: typing.Iterable[Deviation], tolerance: float):
        self.deviations = list(deviations)
        self.tolerance = tolerance

    @property
    def failures(self) -> typing.List[Deviation]:
        """ The comparisons that exceeded the tolerance """
        return [dev for dev in self.deviations if not dev.deviation <= self.tolerance]

    @property
    def passed(self) -> bool:
        """ Whether every comparison was within tolerance """
        return not self.failures

    def max_deviations(self) -> typing.Dict[str, float]:
        """ The largest deviation seen for each quantity """
        result: typing.Dict[str, float] = {}
        for dev in self.deviations:
            result[dev.quantity] = max(result.get(dev.quantity, 0.0), dev.deviation)
        return result

    def format(self) -> str:
        """ Render the report as text """
        lines = [f'{quantity:14s} max relative deviation {utils.format_float(value, 3)}'
                 for quantity, value in self.max_deviations().items()]
        for dev in self.failures:
            lines.append(f'FAIL {dev.quantity} at {dev.params}: closed form {dev.closed}, '
                         f'oracle {dev.oracle}')
        lines.append(f'{"PASS" if self.passed else "FAIL"}: {len(self.deviations)} comparisons, '
                     f'{len(self.failures)} beyond {self.tolerance:g}')
        return '\n'.join(lines) + '\n'


def oracle_check(grid: str = 'default') -> CheckReport:
    """ Run the closed-form/oracle equivalence check over a named grid

    :raises errors.InvalidArgument: if there is no such grid
    """
    if grid not in GRIDS:
        raise errors.InvalidArgument(
            f"Unknown grid {grid!r}; expected one of {', '.join(GRIDS)}")

    points = GRIDS[grid]()
    LOGGER.info("Checking %d configurations on grid %s", len(points), grid)
    with concurrent.futures.ThreadPoolExecutor(
            max_workers=config.sweep_threads,
            thread_name_prefix="su11pss-check") as pool:
        results = list(pool.map(check_point, points))

    return CheckReport(itertools.chain.from_iterable(results), config.check_tolerance)
