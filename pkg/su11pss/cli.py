# cli.py
""" Command-line front end: parameter sweeps, SQL comparison, and oracle checks """

import functools
import json
import logging
import typing

import click
from atomicwrites import atomic_write

from . import check, errors, sweep, utils
from .__version__ import __version__
from .config import use_config

LOGGER = logging.getLogger(__name__)

#: Flags that set fixed model parameters, mapped to ModelParams fields
PARAM_FLAGS = {'g': 'g', 'alpha': 'alpha', 'T': 'T', 'eta': 'eta',
               'phi': 'phi', 'theta1': 'theta1'}


def _load_config(path: typing.Optional[str]) -> typing.Dict[str, typing.Any]:
    if not path:
        return {}
    try:
        with open(path, encoding='utf-8') as file:
            doc = json.load(file)
    except (OSError, ValueError) as err:
        raise click.BadParameter(f"Could not read {path}: {err}",
                                 param_hint="--config") from err
    if not isinstance(doc, dict):
        raise click.BadParameter(f"{path} must hold a JSON object", param_hint='--config')
    return doc


def _emit(text: str, out: typing.Optional[str]):
    """ Write output to a file atomically, or to stdout """
    if out:
        with atomic_write(out, mode='w', overwrite=True, encoding='utf-8') as file:
            file.write(text)
        LOGGER.info("Wrote %s", out)
    else:
        click.echo(text, nl=False)


def param_options(func):
    """ Add the fixed model parameter flags to a command """
    for flag in reversed(list(PARAM_FLAGS)):
        func = click.option(f'--{flag}', flag, type=float, default=None,
                            help=f"Fixed value of {flag}")(func)
    return func


def _fixed_params(doc: typing.Dict[str, typing.Any], kwargs) -> typing.Dict[str, typing.Any]:
    """ Merge fixed parameters from the config document and the flags """
    fixed = dict(doc.get('fixed') or {})
    for flag, field in PARAM_FLAGS.items():
        if kwargs.get(flag) is not None:
            fixed[field] = kwargs[flag]
    return fixed


def _usage_errors(func):
    """ Report invalid arguments as usage errors """
    @functools.wraps(func)
    def wrapped(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except errors.InvalidArgument as err:
            raise click.UsageError(str(err)) from err
    return wrapped


@click.group(context_settings={'help_option_names': ['-h', '--help']})
@click.version_option(__version__)
@click.option('--verbose', '-v', count=True, help="Increase log verbosity")
def main(verbose):
    """ Phase sensitivity and quantum Fisher information of an SU(1,1)
    interferometer with photon subtraction """
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)],
                        format='%(levelname)s %(name)s: %(message)s')


@main.command('sweep', short_help="Sweep a quantity over one parameter")
@click.option('--config', 'config_path', type=click.Path(dir_okay=False),
              help="JSON sweep description; flags override it")
@click.option('--quantity', help="sensitivity, qfi, qfi_lossy, qcrb, qcrb_lossy or mean_photon")
@click.option('--var', 'sweep_var', help="The swept parameter: phi, g, alpha, T or eta")
@click.option('--range', 'sweep_range', help="The sweep range, as start:stop:steps")
@click.option('--scheme', 'schemes', multiple=True, help="A subtraction scheme m,n (repeatable)")
@param_options
@click.option('--out', type=click.Path(dir_okay=False), help="Write CSV here instead of stdout")
@_usage_errors
def sweep_command(config_path, quantity, sweep_var, sweep_range, schemes, out, **kwargs):
    """ Evaluate a quantity along a parameter sweep and write CSV """
    # pylint:disable=too-many-arguments
    doc = utils.remap_args(_load_config(config_path), {'sweep_var': ('sweep_var', 'var'),
                                                       'sweep_range': ('sweep_range', 'range')})
    spec_doc = {
        'quantity': quantity or doc.get('quantity'),
        'sweep_var': sweep_var or doc.get('sweep_var'),
        'sweep_range': sweep_range or doc.get('sweep_range'),
        'fixed': _fixed_params(doc, kwargs),
        'schemes': list(schemes) or doc.get('schemes') or list(sweep.SYMMETRIC),
    }
    missing = [key for key in ('quantity', 'sweep_var', 'sweep_range') if not spec_doc[key]]
    if missing:
        raise click.UsageError(f"Missing {', '.join(missing)} (give them as flags or in --config)")

    with use_config(doc.get('options') or {}):
        spec = sweep.SweepSpec.from_dict(spec_doc)
        _emit(sweep.sweep_csv(spec, sweep.run_sweep(spec)), out)


@main.command('preset', short_help="Run a named curve set")
@click.argument('name')
@click.option('--out', type=click.Path(dir_okay=False), help="Write CSV here instead of stdout")
@_usage_errors
def preset_command(name, out):
    """ Run a named preset (e.g. qfi-g/single, or qfi-g for every family)
    and write CSV; each curve set is introduced by a comment line """
    chunks = []
    for curve in sweep.preset_names(name):
        spec = sweep.preset(curve)
        chunks.append(f'# {curve}\n' + sweep.sweep_csv(spec, sweep.run_sweep(spec)))
    _emit(''.join(chunks), out)


@main.command('compare-sql', short_help="Compare sensitivity to the SQL and HL at fixed N")
@click.option('--config', 'config_path', type=click.Path(dir_okay=False),
              help="JSON description; flags override it")
@click.option('--N', 'target_n', type=float, default=None, help="Target mean photon number")
@click.option('--scheme', 'schemes', multiple=True, help="A subtraction scheme m,n (repeatable)")
@click.option('--range', 'phi_range', help="The phase range, as start:stop:steps")
@click.option('--calibrate', type=click.Choice(['alpha', 'gain']), default=None,
              help="Which parameter to calibrate to reach N")
@param_options
@click.option('--out', type=click.Path(dir_okay=False), help="Write CSV here instead of stdout")
@_usage_errors
def compare_sql_command(config_path, target_n, schemes, phi_range, calibrate, out, **kwargs):
    """ Calibrate each scheme to the same mean photon number and compare its
    phase sensitivity with the standard quantum and Heisenberg limits """
    # pylint:disable=too-many-arguments
    doc = _load_config(config_path)
    fixed = _fixed_params(doc, kwargs)
    calibrate = calibrate or doc.get('calibrate') or 'alpha'

    with use_config(doc.get('options') or {}):
        points = sweep.compare_sql(
            target_N=target_n or doc.get('N') or 4.0,
            schemes=list(schemes) or doc.get('schemes') or list(sweep.SYMMETRIC),
            T=fixed.pop('T', 1.0),
            phi_range=phi_range or doc.get('range') or (0.01, 1.5, 150),
            calibrate=calibrate,
            fixed=fixed)
        _emit(sweep.sql_csv(points, calibrate), out)


@main.command('oracle-check', short_help="Check the closed forms against the Fock oracle")
@click.option('--grid', default='default', type=click.Choice(list(check.GRIDS)),
              help="Which configuration grid to check")
@click.option('--tolerance', type=float, default=None, help="Maximum relative deviation")
@click.option('--out', type=click.Path(dir_okay=False), help="Write the report here too")
@click.pass_context
def oracle_check_command(ctx, grid, tolerance, out):
    """ Run the equivalence suite; exits with 1 if any quantity deviates """
    options = {'check_tolerance': tolerance} if tolerance is not None else {}
    with use_config(options):
        report = check.oracle_check(grid)
    text = report.format()
    click.echo(text, nl=False)
    if out:
        _emit(text, out)
    ctx.exit(0 if report.passed else 1)


if __name__ == '__main__':
    main()  # pylint:disable=no-value-for-parameter
