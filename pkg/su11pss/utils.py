# utils.py
""" Small helpers for parsing sweep descriptions and formatting results """

import logging
import math
import typing

from .config import config

LOGGER = logging.getLogger(__name__)


def as_list(item: typing.Any) -> typing.Sequence:
    """ Get a sequence of items; a lone value (string, mapping or scalar)
    becomes a one-item tuple """
    if item is None:
        return ()
    if isinstance(item, (str, dict)) or not hasattr(item, '__iter__'):
        return (item,)
    return item


def parse_tuple_string(argument: typing.Union[str, typing.Sequence, None],
                       type_func=int) -> typing.Optional[typing.Tuple]:
    """ Return a tuple from parsing 'a,b,c,d' -> (a,b,c,d) """
    if argument is None:
        return None
    parts = argument.split(',') if isinstance(argument, str) else argument
    return tuple(type_func(part.strip() if isinstance(part, str) else part) for part in parts)


def parse_range(argument: typing.Union[str, typing.Tuple, typing.List]
                ) -> typing.Tuple[float, float, int]:
    """ Parse a sweep range given as 'start:stop:steps' or a 3-sequence

    :raises ValueError: if the range is malformed
    """
    parts = argument.split(':') if isinstance(argument, str) else list(argument)
    if len(parts) != 3:
        raise ValueError(f"Range {argument!r} must have the form start:stop:steps")

    start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    return start, stop, steps


def remap_args(doc: typing.Dict[str, typing.Any],
               aliases: typing.Dict[str, typing.Union[str, typing.Sequence[str]]]
               ) -> typing.Dict[str, typing.Any]:
    """ Rename the keys of a sweep document to their canonical names.

    :param dict doc: The document as given
    :param dict aliases: canonical key -> accepted spellings, highest priority first
    """
    out = dict(doc)
    for canonical, spellings in aliases.items():
        spellings = as_list(spellings)
        value = next((doc[key] for key in spellings if doc.get(key) is not None), None)
        if value is None:
            continue
        for key in spellings:
            out.pop(key, None)
        out[canonical] = value
    return out


def format_float(value: typing.Optional[float], digits: typing.Optional[int] = None) -> str:
    """ Format a number for CSV output, with a stable textual form.

    Undefined values become the literal ``nan``.
    """
    if value is None or math.isnan(value):
        return 'nan'
    return f'{value:.{digits or config.float_digits}g}'


def relative_deviation(value: float, reference: float, floor: float = 0.0) -> float:
    """ Get the deviation between two values relative to the larger of them.

    :param float floor: The smallest magnitude to divide by; below this the
        deviation is effectively absolute
    """
    scale = max(abs(value), abs(reference), floor)
    if scale == 0:
        return 0.0
    return abs(value - reference) / scale
