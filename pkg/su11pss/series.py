# series.py
""" Truncated four-variable power series, and the generating function of the
normally-ordered moments of the interferometer state.

A series is a sparse map from exponent tuples ``(k1, k2, k3, k4)`` of the
variables ``(λ1, λ2, λ3, λ4)`` to complex coefficients. Every series carries a
total-degree cap, and optionally per-variable exponent limits; monomials
outside of these are never stored. """

import cmath
import collections
import logging
import math
import typing

from . import errors
from .config import config

LOGGER = logging.getLogger(__name__)

NVARS = 4


class MultiIndex(collections.namedtuple('MultiIndex', ['k1', 'k2', 'k3', 'k4'])):
    """ The exponents of λ1..λ4 in a monomial; equivalently, the differentiation
    orders ``(m1, n1, m2, n2)`` of a derivative functional """
    __slots__ = ()

    def __new__(cls, k1: int = 0, k2: int = 0, k3: int = 0, k4: int = 0):
        if min(k1, k2, k3, k4) < 0:
            raise errors.InvalidArgument(
                f"Exponents must be non-negative, got {(k1, k2, k3, k4)}")
        return super().__new__(cls, int(k1), int(k2), int(k3), int(k4))

    @property
    def degree(self) -> int:
        """ The total degree """
        return self.k1 + self.k2 + self.k3 + self.k4

    @property
    def factorial(self) -> int:
        """ k1!·k2!·k3!·k4!, computed exactly """
        result = 1
        for k in self:
            result *= math.factorial(k)
        return result


Limits = typing.Optional[typing.Tuple[int, int, int, int]]
Coefficients = typing.Dict[typing.Tuple[int, ...], complex]


class TruncatedSeries:
    """ A truncated multivariate power series with complex coefficients.

    Instances are immutable after construction.

    :param dict coeffs: map of exponent tuple to coefficient
    :param int cap: the total-degree truncation bound
    :param tuple limits: optional per-variable exponent bounds
    """

    __slots__ = ('_coeffs', 'cap', 'limits')

    def __init__(self, coeffs: typing.Optional[typing.Mapping] = None,
                 cap: int = 0, limits: Limits = None):
        if cap < 0:
            raise errors.InvalidArgument(f"Series cap must be non-negative, got {cap}")
        self.cap = cap
        self.limits = tuple(limits) if limits is not None else None

        self._coeffs: Coefficients = {}
        for idx, val in (coeffs or {}).items():
            idx = MultiIndex(*idx)
            if val and self._admits(idx):
                self._coeffs[idx] = self._coeffs.get(idx, 0) + complex(val)

    def _admits(self, idx: typing.Tuple[int, ...]) -> bool:
        if sum(idx) > self.cap:
            return False
        if self.limits is not None:
            return all(k <= lim for k, lim in zip(idx, self.limits))
        return True

    @staticmethod
    def constant(value: complex, cap: int, limits: Limits = None) -> 'TruncatedSeries':
        """ Get a constant series """
        return TruncatedSeries({(0, 0, 0, 0): value}, cap, limits)

    @staticmethod
    def variable(which: int, cap: int, coeff: complex = 1.0,
                 limits: Limits = None) -> 'TruncatedSeries':
        """ Get the series ``coeff·λ_which``

        :param int which: The variable number, 1 through 4
        """
        if not 1 <= which <= NVARS:
            raise errors.InvalidArgument(f"No such variable λ{which}")
        idx = [0] * NVARS
        idx[which - 1] = 1
        return TruncatedSeries({tuple(idx): coeff}, cap, limits)

    def __getitem__(self, idx) -> complex:
        return self._coeffs.get(MultiIndex(*idx), 0j)

    def __iter__(self):
        return iter(self._coeffs.items())

    def __len__(self):
        return len(self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.cap == other.cap and self.limits == other.limits
                and self._coeffs == other._coeffs)

    def __hash__(self):
        return hash((self.cap, self.limits, frozenset(self._coeffs.items())))

    def __repr__(self):
        terms = ' + '.join(f'({val})·λ^{tuple(idx)}' for idx, val in sorted(self._coeffs.items()))
        return f'<TruncatedSeries cap={self.cap} {terms or "0"}>'

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(other, self.cap, self.limits)
        return series_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return self.scaled(other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, factor: complex) -> 'TruncatedSeries':
        """ Multiply all coefficients by a scalar """
        return TruncatedSeries({idx: val * factor for idx, val in self._coeffs.items()},
                               self.cap, self.limits)

    @property
    def constant_term(self) -> complex:
        """ The coefficient of the degree-0 monomial """
        return self[0, 0, 0, 0]

    @property
    def degree(self) -> int:
        """ The highest total degree with a nonzero coefficient; 0 for the zero series """
        return max((idx.degree for idx, val in self._coeffs.items() if val), default=0)

    def homogeneous_parts(self) -> typing.Dict[int, Coefficients]:
        """ Split this series into its homogeneous components, by degree """
        parts: typing.Dict[int, Coefficients] = collections.defaultdict(dict)
        for idx, val in self._coeffs.items():
            parts[idx.degree][idx] = val
        return parts


def _check_compatible(a: TruncatedSeries, b: TruncatedSeries):
    if a.cap != b.cap or a.limits != b.limits:
        raise errors.CapMismatch(
            f"Cannot combine series with caps {a.cap}/{a.limits} and {b.cap}/{b.limits}")


def _product(left: Coefficients, right: Coefficients,
             admits: typing.Callable[[typing.Tuple[int, ...]], bool]) -> Coefficients:
    """ Cauchy product of two coefficient maps, keeping only admissible terms """
    result: Coefficients = {}
    for lidx, lval in left.items():
        for ridx, rval in right.items():
            idx = MultiIndex(*(lk + rk for lk, rk in zip(lidx, ridx)))
            if admits(idx):
                result[idx] = result.get(idx, 0j) + lval * rval
    return result


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """ Coefficientwise sum of two series with the same cap

    :raises errors.CapMismatch: if the caps differ
    """
    _check_compatible(a, b)
    coeffs = dict(a)
    for idx, val in b:
        coeffs[idx] = coeffs.get(idx, 0j) + val
    return TruncatedSeries(coeffs, a.cap, a.limits)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """ Truncated Cauchy product of two series with the same cap

    :raises errors.CapMismatch: if the caps differ
    """
    _check_compatible(a, b)
    # pylint:disable=protected-access
    return TruncatedSeries(_product(a._coeffs, b._coeffs, a._admits), a.cap, a.limits)


def series_exp(a: TruncatedSeries) -> TruncatedSeries:
    """ Compute exp(a), truncated to a's cap.

    The homogeneous components E_k of the result satisfy
    ``k·E_k = Σ_j j·a_j·E_(k-j)``, where a_j are the homogeneous components of
    a; this is exact for every coefficient up to the cap.

    :raises errors.NonzeroConstantTerm: if a has a nonzero constant term; the
        caller is responsible for factoring it out
    """
    if a.constant_term != 0:
        raise errors.NonzeroConstantTerm(
            f"Cannot exponentiate a series with constant term {a.constant_term}")

    parts = a.homogeneous_parts()
    # pylint:disable=protected-access
    admits = a._admits

    result: typing.List[Coefficients] = [{MultiIndex(0, 0, 0, 0): 1 + 0j}]
    for k in range(1, a.cap + 1):
        term: Coefficients = {}
        for j, part in parts.items():
            if 0 < j <= k and result[k - j]:
                for idx, val in _product(part, result[k - j], admits).items():
                    term[idx] = term.get(idx, 0j) + j * val
        result.append({idx: val / k for idx, val in term.items()})
        LOGGER.debug("series_exp: degree %d has %d terms", k, len(term))

    merged: Coefficients = {}
    for part in result:
        merged.update(part)
    return TruncatedSeries(merged, a.cap, a.limits)


def max_derivative_order() -> int:
    """ The highest total derivative order any closed form asks for: the QFI
    needs ⟨a†^(m+2) b†^n a^(m+2) b^n⟩ at m = n = max_order """
    return 4 * config.max_order + 4


def derivative_functional(s: TruncatedSeries, idx: typing.Tuple[int, ...]) -> complex:
    """ Evaluate ∂^(k1+k2+k3+k4) s / ∂λ1^k1 ∂λ2^k2 ∂λ3^k3 ∂λ4^k4 at λ=0

    :raises errors.CapExceeded: if the requested derivative lies outside of
        the series' truncation, where its coefficient is unknown
    """
    idx = MultiIndex(*idx)
    if idx.degree > max_derivative_order():
        raise errors.CapExceeded(
            f"Derivative order {idx.degree} exceeds the supported {max_derivative_order()}")
    # pylint:disable=protected-access
    if not s._admits(idx):
        raise errors.CapExceeded(
            f"Derivative {tuple(idx)} exceeds the series cap {s.cap}/{s.limits}")
    return idx.factorial * s[idx]


W1Terms = collections.namedtuple('W1Terms', ['u1', 'u2', 'u3', 'u4'])


def w1_terms(p, cap: int, limits: Limits = None) -> W1Terms:
    """ Build the four linear forms in λ that make up the exponent w1

    :param ModelParams p: the interferometer parameters
    """
    root_t = math.sqrt(p.T)
    cosh, sinh = math.cosh(p.g), math.sinh(p.g)
    phase = cmath.exp(1j * p.theta1)

    def lam(which, coeff):
        return TruncatedSeries.variable(which, cap, coeff, limits)

    return W1Terms(
        u1=lam(1, -root_t * sinh / phase),
        u2=lam(2, root_t * cosh) + lam(3, -root_t * phase * sinh),
        u3=lam(3, root_t * cosh) + lam(2, -root_t * sinh / phase),
        u4=lam(4, -root_t * phase * sinh),
    )


def build_w1(p, cap: int, limits: Limits = None) -> TruncatedSeries:
    """ Build the exponent w1 of the moment generating function
    ``⟨ψ|exp(λ1a† + λ2b†) exp(λ3a + λ4b)|ψ⟩ = exp(w1)``, where ψ is the
    first-OPA output state after the internal loss.

    :param ModelParams p: the interferometer parameters
    :param int cap: the total-degree truncation to build the series with
    :param tuple limits: optional per-variable exponent limits
    """
    if cap < 2:
        raise errors.InvalidArgument(f"w1 needs a cap of at least 2, got {cap}")

    u1, u2, u3, u4 = w1_terms(p, cap, limits)
    alpha = complex(p.alpha)
    lam1 = TruncatedSeries.variable(1, cap, math.sqrt(p.T) * math.cosh(p.g), limits)

    return u1 * u2 + u3 * u4 + u3 * alpha + (lam1 + u4) * alpha.conjugate()
