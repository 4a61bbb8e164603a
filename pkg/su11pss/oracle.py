# oracle.py
""" Brute-force validation of the closed forms: the optical circuit simulated
directly in a truncated two-mode Fock space.

States are arrays indexed by ``[..., n_a, n_b]``. A pure state is a single
amplitude array; a mixed state is held in factored form ρ = Σ_c |ψ_c⟩⟨ψ_c|
with the components ψ_c stacked along a leading axis, so that every circuit
stage acts on pure and mixed states alike. """

import cmath
import collections
import functools
import logging
import math
import typing

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.stats
from werkzeug.utils import cached_property

from . import errors, utils
from .config import config
from .params import ModelParams

LOGGER = logging.getLogger(__name__)

MODES = ('a', 'b')


class FockBasisSpec(collections.namedtuple('FockBasisSpec', ['dim_a', 'dim_b'])):
    """ A truncated two-mode Fock basis, holding photon numbers 0..dim-1 in each mode """
    __slots__ = ()

    def __new__(cls, dim_a: int, dim_b: typing.Optional[int] = None):
        dim_b = dim_a if dim_b is None else dim_b
        if min(dim_a, dim_b) < 2:
            raise errors.InvalidArgument(f"Fock dimensions must be at least 2, got "
                                         f"({dim_a}, {dim_b})")
        if dim_a * dim_b > config.oracle_max_basis:
            raise errors.InvalidArgument(
                f"Fock basis {dim_a}x{dim_b} exceeds the cap of {config.oracle_max_basis}")
        return super().__new__(cls, int(dim_a), int(dim_b))

    @property
    def size(self) -> int:
        """ The number of product states """
        return self.dim_a * self.dim_b

    def dim(self, mode: str) -> int:
        """ Get the dimension of one mode """
        return self.dim_a if mode == 'a' else self.dim_b

    def grown(self, factor: float, clamp: bool = False) -> 'FockBasisSpec':
        """ Get a basis enlarged by a factor in each mode

        :param bool clamp: shrink the growth to stay within the basis cap
            instead of failing
        :raises errors.TruncationError: if the basis cannot grow
        """
        dim_a = max(self.dim_a + 1, math.ceil(self.dim_a * factor))
        dim_b = max(self.dim_b + 1, math.ceil(self.dim_b * factor))
        if dim_a * dim_b > config.oracle_max_basis:
            if not clamp:
                raise errors.TruncationError(
                    f"Cannot grow the Fock basis beyond {self.dim_a}x{self.dim_b}")
            scale = math.sqrt(config.oracle_max_basis / self.size)
            dim_a = math.floor(self.dim_a * scale)
            dim_b = math.floor(self.dim_b * scale)
            if (dim_a, dim_b) <= (self.dim_a, self.dim_b):
                raise errors.TruncationError(
                    f"Fock basis {self.dim_a}x{self.dim_b} is already at the cap")
        return FockBasisSpec(dim_a, dim_b)


class _FockData:
    """ Common base for data living on a truncated Fock basis """

    def __init__(self, data: np.ndarray, basis: FockBasisSpec):
        self.data = np.asarray(data, dtype=complex)
        self.basis = basis
        if self.data.shape[-2:] != (basis.dim_a, basis.dim_b):
            raise errors.InvalidArgument(
                f"Data of shape {self.data.shape} does not match basis {basis}")

    def _derive(self, data: np.ndarray):
        return type(self)(data, self.basis)

    @property
    def weight(self) -> float:
        """ The squared norm (for a pure state) or trace (for a mixed one) """
        return float(np.vdot(self.data, self.data).real)

    def populations(self) -> np.ndarray:
        """ The photon-number distribution P(n_a, n_b), unnormalized """
        return (np.abs(self.data) ** 2).reshape((-1,) + self.data.shape[-2:]).sum(axis=0)

    def tail_mass(self) -> float:
        """ The relative population in the top two Fock layers of either mode """
        pops = self.populations()
        tail = pops[-2:, :].sum() + pops[:-2, -2:].sum()
        weight = pops.sum()
        return float(tail / weight) if weight else 0.0

    def normalized(self):
        """ Get a copy with unit weight """
        return self._derive(self.data / math.sqrt(self.weight))


class TwoModeState(_FockData):
    """ A pure state; amplitudes are indexed by ``[n_a, n_b]`` """

    @property
    def amplitudes(self) -> np.ndarray:
        """ The state amplitudes """
        return self.data

    @property
    def norm(self) -> float:
        """ The state norm """
        return math.sqrt(self.weight)


class DensityMatrix(_FockData):
    """ A mixed state ρ = Σ_c |ψ_c⟩⟨ψ_c|, held as its factor ``[c, n_a, n_b]`` """

    def __init__(self, factor: np.ndarray, basis: FockBasisSpec):
        super().__init__(factor, basis)
        if self.data.ndim != 3:
            raise errors.InvalidArgument("A density matrix factor must be three-dimensional")

    @staticmethod
    def from_state(state: TwoModeState) -> 'DensityMatrix':
        """ Get the density matrix |ψ⟩⟨ψ| of a pure state """
        return DensityMatrix(state.data[np.newaxis, ...], state.basis)

    @property
    def factor(self) -> np.ndarray:
        """ The stacked components ψ_c """
        return self.data

    @property
    def components(self) -> int:
        """ The number of pure components """
        return self.data.shape[0]

    def trace(self) -> float:
        """ Tr ρ """
        return self.weight

    @cached_property
    def entries(self) -> np.ndarray:
        """ The dense matrix over the product basis, indexed by n_a·dim_b + n_b

        :raises errors.InvalidArgument: if the basis is too large to materialize
        """
        if self.basis.size > config.oracle_density_max_basis:
            raise errors.InvalidArgument(
                f"Basis of size {self.basis.size} is too large for a dense density matrix")
        vectors = self.data.reshape(self.components, -1)
        return vectors.T @ vectors.conj()

    def check(self, normalized: bool = True):
        """ Verify that this is a physical density matrix

        :raises errors.NumericalInconsistency: if it is not Hermitian, not
            positive, or (when normalized) not of unit trace
        """
        rho = self.entries
        if not np.allclose(rho, rho.conj().T, rtol=0, atol=1e-10):
            raise errors.NumericalInconsistency("Density matrix is not Hermitian")
        if normalized and abs(np.trace(rho).real - 1) > 1e-9:
            raise errors.NumericalInconsistency(
                f"Density matrix has trace {np.trace(rho).real}")
        smallest = np.linalg.eigvalsh(rho).min()
        if smallest < -1e-8:
            raise errors.NumericalInconsistency(
                f"Density matrix has negative eigenvalue {smallest}")


FockData = typing.Union[TwoModeState, DensityMatrix]


@functools.lru_cache(maxsize=64)
def lowering(dim: int) -> scipy.sparse.csr_matrix:
    """ The single-mode annihilation operator on a truncated space """
    return scipy.sparse.diags(np.sqrt(np.arange(1, dim)), 1,
                              shape=(dim, dim), format='csr', dtype=complex)


def _apply_mode_operator(operator, data: np.ndarray, mode: str) -> np.ndarray:
    """ Apply a single-mode operator to one mode axis of a state array """
    axis = data.ndim - 2 if mode == 'a' else data.ndim - 1
    moved = np.moveaxis(data, axis, 0)
    result = operator @ moved.reshape(moved.shape[0], -1)
    result = np.asarray(result).reshape((operator.shape[0],) + moved.shape[1:])
    return np.moveaxis(result, 0, axis)


def _check_tail(state: FockData, stage: str):
    tail = state.tail_mass()
    if tail >= config.oracle_tail_tolerance:
        raise errors.TruncationError(
            f"Tail mass {tail:.3g} after {stage} is too large for basis {tuple(state.basis)}")


def prepare_input(alpha: complex, basis: FockBasisSpec) -> TwoModeState:
    """ Prepare the coherent state |α⟩ in mode a with vacuum in mode b

    :raises errors.TruncationError: if the basis cuts off too much of |α⟩
    """
    mean = abs(alpha) ** 2
    tail = scipy.stats.poisson.sf(basis.dim_a - 1, mean)
    if tail >= config.oracle_coherent_tail:
        raise errors.TruncationError(
            f"Coherent amplitude {alpha} has tail mass {tail:.3g} beyond {basis.dim_a} photons")

    photons = np.arange(basis.dim_a)
    amplitudes = np.zeros((basis.dim_a, basis.dim_b), dtype=complex)
    amplitudes[:, 0] = (np.sqrt(scipy.stats.poisson.pmf(photons, mean))
                        * np.exp(1j * photons * cmath.phase(alpha)))
    return TwoModeState(amplitudes, basis)


@functools.lru_cache(maxsize=16)
def _squeeze_plan(basis: FockBasisSpec, g: float, theta: float):
    """ Block-diagonalize exp(ξ*ab − ξa†b†) over the sectors of fixed n_a − n_b.

    Returns a list of ``(rows, cols, unitary)`` for each sector.
    """
    xi = g * cmath.exp(1j * theta)
    plan = []
    for diff in range(-(basis.dim_b - 1), basis.dim_a):
        start_a, start_b = max(diff, 0), max(-diff, 0)
        length = min(basis.dim_a - start_a, basis.dim_b - start_b)
        rows = np.arange(start_a, start_a + length)
        cols = rows - diff

        generator = np.zeros((length, length), dtype=complex)
        step = np.arange(1, length)
        amplitude = np.sqrt(rows[step] * cols[step])
        generator[step - 1, step] = xi.conjugate() * amplitude
        generator[step, step - 1] = -xi * amplitude
        plan.append((rows, cols, scipy.linalg.expm(generator)))

    LOGGER.debug("Built squeeze plan for basis %s, g=%g, theta=%g", tuple(basis), g, theta)
    return plan


def _squeeze_data(data: np.ndarray, basis: FockBasisSpec, g: float, theta: float) -> np.ndarray:
    result = np.empty_like(data)
    for rows, cols, unitary in _squeeze_plan(basis, g, theta):
        result[..., rows, cols] = data[..., rows, cols] @ unitary.T
    return result


def apply_two_mode_squeeze(state: FockData, g: float, theta: float) -> FockData:
    """ Apply the two-mode squeezer exp(ξ*ab − ξa†b†) with ξ = g·e^{iθ}

    :raises errors.TruncationError: if the result has too much mass in the top
        Fock layers
    """
    if g == 0:
        return state

    # pylint:disable=protected-access
    out = state._derive(_squeeze_data(state.data, state.basis, g, theta))
    _check_tail(out, "squeezing")
    return out


def apply_phase_shift(state: FockData, phi: float) -> FockData:
    """ Apply exp(iφ·n_a) """
    phases = np.exp(1j * phi * np.arange(state.basis.dim_a))
    return state._derive(state.data * phases[:, np.newaxis])  # pylint:disable=protected-access


def apply_subtraction(state: FockData, m: int, n: int) -> typing.Tuple[FockData, float]:
    """ Apply a^m b^n and renormalize

    :returns: the subtracted state and its success weight relative to the input
    :raises errors.DegenerateState: if the subtraction annihilates the state
    """
    if m < 0 or n < 0:
        raise errors.InvalidArgument(f"Subtraction orders must be non-negative, got ({m}, {n})")

    data = state.data
    for _ in range(m):
        data = _apply_mode_operator(lowering(state.basis.dim_a), data, 'a')
    for _ in range(n):
        data = _apply_mode_operator(lowering(state.basis.dim_b), data, 'b')

    out = state._derive(data)  # pylint:disable=protected-access
    weight = out.weight / state.weight
    if weight < config.degenerate_floor:
        raise errors.DegenerateState(f"Subtracting ({m}, {n}) photons annihilates the state")
    return out.normalized(), weight


def kraus_operators(dim: int, transmittance: float) -> typing.List[scipy.sparse.csr_matrix]:
    """ Get the Kraus operators of a pure-loss channel on one truncated mode.

    Operator l removes l photons: ⟨k-l|Π_l|k⟩ = √(C(k,l) (1-η)^l η^(k-l)).
    """
    if not 0 < transmittance <= 1:
        raise errors.InvalidArgument(f"Transmittance must be in (0,1], got {transmittance}")

    photons = np.arange(dim)
    return [scipy.sparse.diags(np.sqrt(scipy.stats.binom.pmf(lost, photons[lost:],
                                                              1 - transmittance)),
                               lost, shape=(dim, dim), format='csr', dtype=complex)
            for lost in range(dim)]


def apply_loss_channel(rho: FockData, mode: str, transmittance: float) -> DensityMatrix:
    """ Apply photon loss to one mode, ρ → Σ_l Π_l ρ Π_l†

    Components whose weight is negligible are dropped from the factor.

    :raises errors.TruncationError: if the trace is not preserved
    """
    if mode not in MODES:
        raise errors.InvalidArgument(f"No such mode {mode}")
    if isinstance(rho, TwoModeState):
        rho = DensityMatrix.from_state(rho)
    if transmittance == 1:
        return rho

    before = rho.trace()
    threshold = config.oracle_prune * before
    kept = []
    for operator in kraus_operators(rho.basis.dim(mode), transmittance):
        batch = _apply_mode_operator(operator, rho.factor, mode)
        weights = np.einsum('cij,cij->c', batch, batch.conj()).real
        significant = weights > threshold
        if np.any(significant):
            kept.append(batch[significant])

    out = DensityMatrix(np.concatenate(kept), rho.basis)
    drift = abs(out.trace() - before)
    if drift > 1e-9 * max(1.0, before):
        raise errors.TruncationError(f"Loss channel changed the trace by {drift}")

    LOGGER.debug("Loss on mode %s: %d -> %d components", mode, rho.components, out.components)
    return out


def _apply_quadrature(data: np.ndarray, basis: FockBasisSpec) -> np.ndarray:
    """ Apply X = a + a† on mode a """
    lower = lowering(basis.dim_a)
    return _apply_mode_operator(lower, data, 'a') + _apply_mode_operator(lower.T, data, 'a')


def oracle_quadrature(state: FockData, which: str) -> float:
    """ Get ⟨a+a†⟩ (which='X') or ⟨(a+a†)²⟩ (which='X2') on mode a """
    x_psi = _apply_quadrature(state.data, state.basis)
    if which == 'X':
        value = np.vdot(state.data, x_psi).real
    elif which == 'X2':
        value = np.vdot(x_psi, x_psi).real
    else:
        raise errors.InvalidArgument(f"Unknown quadrature moment {which}")
    return float(value / state.weight)


def _number_moment(state: FockData, mode: str, power: int) -> float:
    pops = state.populations()
    photons = np.arange(state.basis.dim(mode)) ** power
    if mode == 'a':
        total = photons @ pops.sum(axis=1)
    else:
        total = photons @ pops.sum(axis=0)
    return float(total / pops.sum())


def mean_number(state: FockData, mode: str) -> float:
    """ Get ⟨n⟩ for one mode """
    return _number_moment(state, mode, 1)


def number_variance(state: FockData, mode: str) -> float:
    """ Get Var(n) for one mode """
    return _number_moment(state, mode, 2) - _number_moment(state, mode, 1) ** 2


ConvergenceCertificate = collections.namedtuple('ConvergenceCertificate',
                                                ['basis', 'check_basis', 'max_change'])

# slopes that vanish by symmetry are compared absolutely
_CERTIFICATE_FLOORS = {'dmean_x_dphi': 1.0}


class OracleResult(collections.namedtuple('OracleResult', ['values', 'certificate'])):
    """ Quantities computed by the oracle, with the truncation they converged at """
    __slots__ = ()

    @property
    def basis(self) -> FockBasisSpec:
        """ The accepted truncation """
        return self.certificate.basis

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def variance(self) -> float:
        """ Var(X) at the output """
        var = self.values['mean_x2'] - self.values['mean_x'] ** 2
        if var < config.variance_floor:
            raise errors.NumericalInconsistency(f"Negative quadrature variance {var}")
        return max(var, 0.0)

    @property
    def sensitivity(self) -> float:
        """ The error-propagation phase sensitivity

        :raises errors.SensitivityUndefined: if the slope is indistinguishable from 0
        """
        slope = abs(self.values['dmean_x_dphi'])
        if slope < config.oracle_derivative_floor:
            raise errors.SensitivityUndefined(f"Signal slope {slope} is below the floor")
        return math.sqrt(self.variance) / slope


@functools.lru_cache(maxsize=8)
def _cached_subtraction(p: ModelParams, basis: FockBasisSpec,
                        _settings: typing.Tuple) -> typing.Tuple[FockData, float]:
    state = apply_two_mode_squeeze(prepare_input(p.alpha, basis), p.g, p.theta1)
    if p.T < 1:
        state = apply_loss_channel(state, 'a', p.T)
        state = apply_loss_channel(state, 'b', p.T)
    subtracted, weight = apply_subtraction(state, p.m, p.n)
    subtracted.data.setflags(write=False)
    return subtracted, weight


def _subtracted_state(p: ModelParams, basis: FockBasisSpec) -> typing.Tuple[FockData, float]:
    """ Run the circuit from the input through the subtraction; the result is
    shared by every phase shift of the same configuration """
    settings = (config.oracle_prune, config.oracle_tail_tolerance,
                config.oracle_coherent_tail, config.degenerate_floor)
    return _cached_subtraction(p._replace(phi=0.0, eta=1.0), basis, settings)


def clear_cache():
    """ Forget all cached subtracted states and squeeze plans """
    _cached_subtraction.cache_clear()
    _squeeze_plan.cache_clear()


def _state_values(p: ModelParams, subtracted: FockData, weight: float) -> typing.Dict[str, float]:
    values = {
        'normalization': 1 / weight,
        'mean_photon': mean_number(subtracted, 'a') + mean_number(subtracted, 'b'),
        'mean_photon_a': mean_number(subtracted, 'a'),
    }
    if p.T == 1:
        values['qfi'] = 4 * number_variance(subtracted, 'a')
    return values


def _subtraction_values(p: ModelParams, basis: FockBasisSpec) -> typing.Dict[str, float]:
    return _state_values(p, *_subtracted_state(p, basis))


def _exact_slope(p: ModelParams, subtracted: FockData, final: FockData) -> float:
    """ d⟨X⟩/dφ = 2·Re⟨X ψ_out|S₂ (i n_a) e^{iφ n_a} ψ⟩ """
    rotated = apply_phase_shift(subtracted, p.phi)
    photons = np.arange(subtracted.basis.dim_a)[:, np.newaxis]
    moving = _squeeze_data(1j * photons * rotated.data, subtracted.basis, p.g, p.theta2)
    x_final = _apply_quadrature(final.data, final.basis)
    return float(2 * np.vdot(x_final, moving).real / final.weight)


def _interferometer_values(p: ModelParams, basis: FockBasisSpec) -> typing.Dict[str, float]:
    subtracted, weight = _subtracted_state(p, basis)

    def output(phi):
        return apply_two_mode_squeeze(apply_phase_shift(subtracted, phi), p.g, p.theta2)

    def difference(step):
        return (oracle_quadrature(output(p.phi + step), 'X')
                - oracle_quadrature(output(p.phi - step), 'X')) / (2 * step)

    final = output(p.phi)
    if config.oracle_slope == 'richardson':
        step = config.oracle_fd_step
        slope = (4 * difference(step / 2) - difference(step)) / 3
    elif config.oracle_slope == 'exact':
        slope = _exact_slope(p, subtracted, final)
    else:
        raise errors.InvalidArgument(f"Unknown oracle slope method {config.oracle_slope!r}")

    return {
        **_state_values(p, subtracted, weight),
        'mean_x': oracle_quadrature(final, 'X'),
        'mean_x2': oracle_quadrature(final, 'X2'),
        'dmean_x_dphi': slope,
    }


def _max_change(values, reference) -> float:
    return max((utils.relative_deviation(values[key], reference[key],
                                         _CERTIFICATE_FLOORS.get(key, 1e-12))
                for key in values), default=0.0)


def _adaptive(evaluate: typing.Callable[[FockBasisSpec], typing.Dict[str, float]],
              basis: typing.Optional[FockBasisSpec]) -> OracleResult:
    """ Evaluate on a growing basis until the result is certified stable
    against a basis twice as large """
    basis = basis or FockBasisSpec(config.oracle_start_dim)

    values = None
    while values is None:
        try:
            values = evaluate(basis)
        except errors.TruncationError as err:
            LOGGER.debug("Basis %s too small: %s", tuple(basis), err)
            basis = basis.grown(config.oracle_growth)

    while True:
        check_basis = basis.grown(2.0, clamp=True)
        reference = evaluate(check_basis)
        change = _max_change(values, reference)
        if change < config.oracle_convergence:
            LOGGER.info("Oracle converged at basis %s (max change %.3g vs %s)",
                        tuple(basis), change, tuple(check_basis))
            return OracleResult(values, ConvergenceCertificate(basis, check_basis, change))
        LOGGER.info("Oracle not converged at basis %s (max change %.3g)", tuple(basis), change)
        basis, values = check_basis, reference


def oracle_expectations(p: ModelParams,
                        basis: typing.Optional[FockBasisSpec] = None) -> OracleResult:
    """ Compute every interferometer quantity by direct simulation of the
    circuit: squeezing, internal loss, subtraction, phase shift, and the
    second squeezer.

    :param FockBasisSpec basis: the starting truncation; grown as needed
    :raises errors.DegenerateState: if the subtraction cannot succeed
    :raises errors.TruncationError: if no basis within the cap converges
    """
    return _adaptive(functools.partial(_interferometer_values, p), basis)


def oracle_phase_sensitivity(p: ModelParams,
                             basis: typing.Optional[FockBasisSpec] = None) -> float:
    """ Compute the homodyne phase sensitivity by direct simulation """
    return oracle_expectations(p, basis).sensitivity


def oracle_qfi(p: ModelParams, basis: typing.Optional[FockBasisSpec] = None) -> float:
    """ Compute 4·Var(n_a) of the lossless subtracted state by direct simulation """
    result = _adaptive(functools.partial(_subtraction_values, p.with_(T=1.0)), basis)
    return result.values['qfi']


def oracle_mean_photon_N(p: ModelParams,
                         basis: typing.Optional[FockBasisSpec] = None) -> float:
    # pylint:disable=invalid-name
    """ Compute the total photon number after subtraction by direct simulation """
    return _adaptive(functools.partial(_subtraction_values, p), basis).values['mean_photon']


def oracle_normalization(p: ModelParams,
                         basis: typing.Optional[FockBasisSpec] = None) -> float:
    """ Compute A², the inverse success weight of the subtraction """
    return _adaptive(functools.partial(_subtraction_values, p), basis).values['normalization']
