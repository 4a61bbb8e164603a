""" su11pss: phase sensitivity and quantum Fisher information of an SU(1,1)
interferometer with multi-photon subtraction, with a brute-force Fock-space
oracle to validate them. """

import logging

from . import check, config, errors, interferometer, oracle, qfi, series, sweep
from .__version__ import __version__
from .params import ModelParams

LOGGER = logging.getLogger(__name__)

__all__ = ['ModelParams', 'check', 'config', 'errors', 'interferometer', 'oracle',
           'qfi', 'series', 'sweep', '__version__']
