# sweep.py
""" Parameter sweeps over the closed forms, producing plot-ready curves """

import collections
import concurrent.futures
import csv
import io
import logging
import math
import typing

import numpy as np

from . import errors, interferometer, qfi, utils
from .config import config
from .params import SWEEPABLE, ModelParams

LOGGER = logging.getLogger(__name__)

Scheme = typing.Tuple[int, int]


def _qcrb(p: ModelParams) -> float:
    return qfi.qcrb(qfi.qfi_ideal(p), config.measurements)


def _qcrb_lossy(p: ModelParams) -> float:
    return qfi.qcrb_lossy(p, config.measurements)


#: The quantities a sweep can compute, by name
QUANTITIES: typing.Dict[str, typing.Callable[[ModelParams], float]] = {
    'sensitivity': interferometer.phase_sensitivity,
    'qfi': qfi.qfi_ideal,
    'qfi_lossy': qfi.qfi_lossy,
    'qcrb': _qcrb,
    'qcrb_lossy': _qcrb_lossy,
    'mean_photon': interferometer.mean_photon_N,
}

SYMMETRIC: typing.Tuple[Scheme, ...] = ((0, 0), (1, 1), (2, 2), (3, 3))
SINGLE_MODE: typing.Tuple[Scheme, ...] = ((0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (0, 2), (0, 3))
ARBITRARY: typing.Tuple[Scheme, ...] = ((0, 0), (1, 2), (2, 1), (1, 3), (3, 1))


class SweepSpec:
    """ Describes a sweep of one quantity over one parameter, for several
    subtraction schemes

    :param str quantity: one of :py:data:`QUANTITIES`
    :param str sweep_var: the parameter to vary; one of phi, g, alpha, T, eta
    :param tuple sweep_range: ``(start, stop, steps)``
    :param fixed: the values of all other parameters, as a ModelParams or a
        dict of its fields
    :param schemes: the ``(m, n)`` pairs to evaluate
    """
    # pylint:disable=too-few-public-methods

    def __init__(self, quantity: str, sweep_var: str,
                 sweep_range: typing.Union[str, typing.Sequence],
                 fixed: typing.Union[ModelParams, typing.Dict[str, typing.Any], None] = None,
                 schemes: typing.Iterable = SYMMETRIC):
        # pylint:disable=too-many-arguments
        if quantity not in QUANTITIES:
            raise errors.InvalidArgument(
                f"Unknown quantity {quantity!r}; expected one of {', '.join(QUANTITIES)}")
        if sweep_var not in SWEEPABLE:
            raise errors.InvalidArgument(
                f"Cannot sweep {sweep_var!r}; expected one of {', '.join(SWEEPABLE)}")
        try:
            start, stop, steps = utils.parse_range(sweep_range)
        except ValueError as err:
            raise errors.InvalidArgument(str(err)) from err
        if not start < stop:
            raise errors.InvalidArgument(f"Sweep start {start} must be below stop {stop}")
        if steps < 2:
            raise errors.InvalidArgument(f"Sweep needs at least 2 steps, got {steps}")

        if not isinstance(fixed, ModelParams):
            fixed = ModelParams(**(fixed or {}))

        self.quantity = quantity
        self.sweep_var = sweep_var
        self.range = (start, stop, steps)
        self.fixed = fixed
        self.schemes = tuple(parse_scheme(scheme) for scheme in utils.as_list(schemes))
        if not self.schemes:
            raise errors.InvalidArgument("A sweep needs at least one scheme")

    @property
    def values(self) -> np.ndarray:
        """ The points of the swept variable """
        start, stop, steps = self.range
        return np.linspace(start, stop, steps)

    @staticmethod
    def from_dict(doc: typing.Dict[str, typing.Any]) -> 'SweepSpec':
        """ Build a sweep from a configuration document """
        doc = utils.remap_args(doc, {'sweep_var': ('sweep_var', 'var'),
                                     'sweep_range': ('sweep_range', 'range')})
        unknown = set(doc) - {'quantity', 'sweep_var', 'sweep_range', 'fixed', 'schemes'}
        if unknown:
            raise errors.InvalidArgument(f"Unknown sweep keys: {', '.join(sorted(unknown))}")
        return SweepSpec(**doc)

    def __repr__(self):
        return (f'<SweepSpec {self.quantity} over {self.sweep_var}={self.range} '
                f'schemes={self.schemes}>')


def parse_scheme(scheme: typing.Union[str, typing.Sequence[int]]) -> Scheme:
    """ Parse a subtraction scheme given as 'm,n' or an (m, n) pair

    :raises errors.InvalidArgument: if the scheme is malformed or out of range
    """
    try:
        parsed = utils.parse_tuple_string(scheme)
    except (TypeError, ValueError) as err:
        raise errors.InvalidArgument(f"Malformed scheme {scheme!r}") from err
    if parsed is None or len(parsed) != 2:
        raise errors.InvalidArgument(f"A scheme must be a pair m,n; got {scheme!r}")
    m, n = parsed
    if min(m, n) < 0 or max(m, n) > config.max_order:
        raise errors.InvalidArgument(
            f"Scheme {scheme!r} is outside of the supported range 0..{config.max_order}")
    return m, n


class CurvePoint(collections.namedtuple('CurvePoint',
                                        ['sweep_value', 'm', 'n', 'value', 'error_code'])):
    """ One point of a curve: a value, or ``nan`` with an error code """
    __slots__ = ()

    @property
    def ok(self) -> bool:  # pylint:disable=invalid-name
        """ Whether this point has a value """
        return self.error_code is None


def evaluate_point(quantity: str, params: typing.Dict[str, typing.Any]) -> typing.Tuple[
        float, typing.Optional[str]]:
    """ Evaluate one quantity, turning failures into an error code

    :returns: ``(value, error_code)``
    """
    try:
        value = QUANTITIES[quantity](ModelParams(**params))
    except errors.Su11Error as err:
        LOGGER.debug("%s at %s: %s", quantity, params, err)
        return math.nan, err.code
    if not math.isfinite(value):
        return math.nan, errors.NumericalInconsistency.__name__
    return value, None


def _point_task(spec: SweepSpec, sweep_value: float, scheme: Scheme) -> CurvePoint:
    params = {**spec.fixed._asdict(), spec.sweep_var: float(sweep_value),
              'm': scheme[0], 'n': scheme[1]}
    value, code = evaluate_point(spec.quantity, params)
    return CurvePoint(float(sweep_value), scheme[0], scheme[1], value, code)


def run_sweep(spec: SweepSpec) -> typing.List[CurvePoint]:
    """ Evaluate a sweep; points come back ordered by sweep value, then scheme,
    whatever order they complete in """
    tasks = [(value, scheme) for value in spec.values for scheme in spec.schemes]
    LOGGER.info("Running %s: %d points", spec, len(tasks))

    with concurrent.futures.ThreadPoolExecutor(
            max_workers=config.sweep_threads,
            thread_name_prefix="su11pss-sweep") as pool:
        return list(pool.map(lambda task: _point_task(spec, *task), tasks))


def format_csv(header: typing.Sequence[str], rows: typing.Iterable[typing.Sequence],
               comment: typing.Optional[str] = None) -> str:
    """ Render rows as deterministic CSV text; floats use a fixed number of
    significant digits and undefined values are written as ``nan`` """
    out = io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write(f'# {line}\n')
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([utils.format_float(cell) if isinstance(cell, float)
                         else '' if cell is None else cell
                         for cell in row])
    return out.getvalue()


def sweep_csv(spec: SweepSpec, points: typing.Iterable[CurvePoint]) -> str:
    """ Render a sweep's points as CSV """
    comment = None
    if spec.quantity in ('qfi_lossy', 'qcrb_lossy'):
        comment = qfi.LOSSY_CONVENTION
    return format_csv((spec.sweep_var, 'm', 'n', 'value', 'error_code'), points, comment)


#: The scheme families a preset can cover
FAMILIES = {'symmetric': SYMMETRIC, 'single': SINGLE_MODE, 'arbitrary': ARBITRARY}


def _presets(quantity, sweep_var, sweep_range, families=('symmetric', 'single'), **fixed):
    return {f'{quantity}-{sweep_var}/{family}': {
        'quantity': quantity, 'sweep_var': sweep_var, 'sweep_range': sweep_range,
        'schemes': FAMILIES[family], 'fixed': fixed} for family in families}


#: Named curve sets, as ``<quantity>-<var>/<family>``
PRESETS: typing.Dict[str, typing.Dict[str, typing.Any]] = {
    **_presets('sensitivity', 'phi', (0.01, 1.5, 150), tuple(FAMILIES), alpha=1.0, g=1.0),
    **_presets('sensitivity', 'g', (0.05, 2.0, 100), alpha=1.0, phi=0.6),
    **_presets('sensitivity', 'alpha', (0.05, 3.0, 100), g=1.0, phi=0.6),
    **_presets('sensitivity', 'T', (0.01, 1.0, 100), g=1.0, phi=0.6, alpha=1.0),
    **_presets('qfi', 'g', (0.05, 1.5, 100), alpha=1.0),
    **_presets('qfi', 'alpha', (0.05, 2.0, 100), g=1.0),
    **_presets('qcrb', 'g', (0.05, 1.5, 100), alpha=1.0),
    **_presets('qcrb', 'alpha', (0.05, 2.0, 100), g=1.0),
    **_presets('mean_photon', 'g', (0.05, 1.5, 100), alpha=1.0),
    **_presets('mean_photon', 'alpha', (0.05, 2.0, 100), g=1.0),
    **_presets('qfi_lossy', 'eta', (0.01, 1.0, 100), g=1.0, alpha=1.0),
    **_presets('qfi_lossy', 'g', (0.05, 1.5, 100), alpha=1.0, eta=0.8),
    **_presets('qfi_lossy', 'alpha', (0.05, 2.0, 100), g=1.0, eta=0.8),
    **_presets('qcrb_lossy', 'eta', (0.01, 1.0, 100), g=1.0, alpha=1.0),
}

#: Figure-style aliases: a bare figure name selects every family, and a panel
#: letter (a, b, c) selects the symmetric, single or arbitrary family
FIGURES = {
    'fig2': 'sensitivity-phi', 'fig3': 'sensitivity-g', 'fig4': 'sensitivity-alpha',
    'fig5': 'sensitivity-T', 'fig7': 'qfi-g', 'fig8': 'qfi-alpha', 'fig9': 'qcrb-g',
    'fig10': 'qcrb-alpha', 'fig11': 'mean_photon-g', 'fig12': 'mean_photon-alpha',
    'fig14': 'qfi_lossy-eta', 'fig15': 'qfi_lossy-g', 'fig16': 'qfi_lossy-alpha',
    'fig17': 'qcrb_lossy-eta',
}
PANELS = {'a': 'symmetric', 'b': 'single', 'c': 'arbitrary'}


def _resolve_alias(name: str) -> str:
    if name in FIGURES:
        return FIGURES[name]
    if name[:-1] in FIGURES and name[-1:] in PANELS:
        return f'{FIGURES[name[:-1]]}/{PANELS[name[-1]]}'
    return name


def preset_names(name: str) -> typing.List[str]:
    """ Expand a preset name or figure alias; a bare ``<quantity>-<var>`` gives
    every family of it

    :raises errors.InvalidArgument: if there is no such preset
    """
    name = _resolve_alias(name)
    if name in PRESETS:
        return [name]
    curves = [key for key in PRESETS if key.partition('/')[0] == name]
    if not curves:
        raise errors.InvalidArgument(f"Unknown preset {name!r}")
    return curves


def preset(name: str) -> SweepSpec:
    """ Get the sweep for a single preset curve set """
    return SweepSpec.from_dict(PRESETS[preset_names(name)[0]])


class SqlPoint(collections.namedtuple('SqlPoint', ['phi', 'm', 'n', 'calibrated',
                                                   'value', 'sql', 'hl', 'error_code'])):
    """ One row of an SQL/HL comparison """
    __slots__ = ()


def compare_sql(target_N: float,
                schemes: typing.Iterable = SYMMETRIC,
                T: float = 1.0,  # pylint:disable=invalid-name
                phi_range: typing.Union[str, typing.Sequence] = (0.01, 1.5, 150),
                calibrate: str = 'alpha',
                fixed: typing.Optional[typing.Dict[str, typing.Any]] = None
                ) -> typing.List[SqlPoint]:
    # pylint:disable=invalid-name,too-many-arguments,too-many-locals
    """ Compare the phase sensitivity against the SQL and HL at a fixed mean
    photon number.

    For each scheme, α (at g=1 by default) or g (at the given α) is calibrated
    so that N = target_N, and then Δφ is evaluated over the phase range.
    Schemes that cannot reach the target get a row-level error marker.

    :param str calibrate: ``alpha`` or ``gain``
    """
    sql, hl = interferometer.sql_hl(target_N)
    try:
        start, stop, steps = utils.parse_range(phi_range)
    except ValueError as err:
        raise errors.InvalidArgument(str(err)) from err
    phis = np.linspace(start, stop, steps)
    base = ModelParams(**{'g': 1.0, **(fixed or {}), 'T': T})

    if calibrate == 'alpha':
        solver, field = interferometer.calibrate_alpha, 'alpha'
    elif calibrate == 'gain':
        solver, field = interferometer.calibrate_gain, 'g'
    else:
        raise errors.InvalidArgument(f"Cannot calibrate {calibrate!r}; use alpha or gain")

    rows = []
    for scheme in (parse_scheme(scheme) for scheme in utils.as_list(schemes)):
        params = base.with_(m=scheme[0], n=scheme[1])
        try:
            calibrated = solver(target_N, params)
        except errors.Su11Error as err:
            LOGGER.warning("Scheme %s cannot be calibrated to N=%g: %s", scheme, target_N, err)
            rows += [SqlPoint(float(phi), *scheme, math.nan, math.nan, sql, hl, err.code)
                     for phi in phis]
            continue

        params = params.with_(**{field: calibrated})
        for phi in phis:
            value, code = evaluate_point('sensitivity', {**params._asdict(), 'phi': float(phi)})
            rows.append(SqlPoint(float(phi), *scheme, calibrated, value, sql, hl, code))

    return rows


def sql_csv(points: typing.Iterable[SqlPoint], calibrate: str = 'alpha') -> str:
    """ Render an SQL/HL comparison as CSV """
    return format_csv(('phi', 'm', 'n', 'alpha' if calibrate == 'alpha' else 'g',
                       'value', 'sql', 'hl', 'error_code'), points)
