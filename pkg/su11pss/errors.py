# errors.py
""" Exception types raised by su11pss

Every exception carries a stable ``code`` (its class name) which is what gets
recorded in the ``error_code`` column of sweep output.
"""


class Su11Error(RuntimeError):
    """ Base class for all su11pss errors """

    @property
    def code(self) -> str:
        """ The stable error code for this failure """
        return type(self).__name__


class CapMismatch(Su11Error):
    """ Two series with different truncation bounds were combined """


class NonzeroConstantTerm(Su11Error):
    """ Attempted to exponentiate a series with a nonzero constant term """


class CapExceeded(Su11Error):
    """ A coefficient was requested beyond a series' truncation bound """


class InvalidArgument(Su11Error, ValueError):
    """ A parameter is outside of its valid domain """


class DegenerateState(Su11Error):
    """ The photon subtraction has zero probability of success """


class SensitivityUndefined(Su11Error):
    """ The signal slope vanishes, so the phase sensitivity diverges """


class NumericalInconsistency(Su11Error):
    """ A computed quantity violates a physical constraint beyond tolerance """


class Unreachable(Su11Error):
    """ A calibration target lies outside of the attainable range """


class CalibrationFailed(Su11Error):
    """ A calibration bracket could not be solved reliably """


class TruncationError(Su11Error):
    """ The Fock-space truncation is too small for the requested state """
