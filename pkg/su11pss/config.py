# config.py
""" configuration container for su11pss """

import contextlib
import logging
import os
import typing

import werkzeug.local

LOGGER = logging.getLogger(__name__)


class _Defaults:
    # pylint:disable=too-few-public-methods

    # Largest supported subtraction order for either mode
    max_order = 5

    # Closed-form sanity thresholds
    imag_tolerance = 1e-9
    variance_floor = -1e-9
    derivative_floor = 1e-12
    degenerate_floor = 1e-300

    # Mean photon number calibration
    calibration_tolerance = 1e-10
    calibration_alpha_max = 10.0
    calibration_gain_min = 1e-3
    calibration_gain_max = 3.0
    calibration_samples = 64

    # Fock-space oracle
    oracle_start_dim = 14
    oracle_growth = 1.5
    oracle_max_basis = 32768
    oracle_density_max_basis = 4096
    oracle_tail_tolerance = 1e-10
    oracle_coherent_tail = 1e-12
    oracle_convergence = 1e-8
    oracle_slope = 'exact'
    oracle_fd_step = 1e-5
    oracle_derivative_floor = 1e-8
    oracle_prune = 1e-14

    # Equivalence checking
    check_tolerance = 1e-6
    check_floor = 1e-3

    # Sweep output
    sweep_threads = os.cpu_count()
    float_digits = 12
    measurements = 1


class Config(_Defaults):
    """ Stores the numerical configuration for a computation """
    # pylint:disable=too-few-public-methods

    def __init__(self, from_dict: typing.Optional[typing.Dict[str, typing.Any]] = None):
        # Copy over the defaults
        for key, val in _Defaults.__dict__.items():
            if key[0] != '_':
                setattr(self, key, val)

        # Copy over the new configuration
        for key, val in (from_dict or {}).items():
            if hasattr(self, key):
                setattr(self, key, val)
            else:
                LOGGER.warning("Unknown configuration key %s", key)

    def updated(self, from_dict: typing.Dict[str, typing.Any]) -> 'Config':
        """ Get a copy of this configuration with some keys overridden """
        return Config({**vars(self), **from_dict})


_ACTIVE: typing.List[Config] = [Config()]


def get_config() -> Config:
    """ Get the currently-active configuration """
    return _ACTIVE[-1]


@contextlib.contextmanager
def use_config(cfg: typing.Union[Config, typing.Dict[str, typing.Any]]):
    """ Make a configuration active for the duration of a ``with`` block.

    :param cfg: A Config, or a dict of overrides on top of the active one
    """
    if not isinstance(cfg, Config):
        cfg = get_config().updated(cfg)
    _ACTIVE.append(cfg)
    try:
        yield cfg
    finally:
        _ACTIVE.pop()


config = werkzeug.local.LocalProxy(get_config)  # pylint:disable=invalid-name
