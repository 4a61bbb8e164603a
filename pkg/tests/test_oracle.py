""" tests of the Fock-space oracle """
# pylint:disable=missing-docstring

import math

import numpy as np
import pytest

from su11pss import errors, interferometer, oracle, qfi
from su11pss.config import use_config
from su11pss.oracle import FockBasisSpec, TwoModeState
from su11pss.params import ModelParams


def fock_state(basis, n_a, n_b):
    amplitudes = np.zeros((basis.dim_a, basis.dim_b), dtype=complex)
    amplitudes[n_a, n_b] = 1
    return TwoModeState(amplitudes, basis)


def test_basis_spec():
    basis = FockBasisSpec(10)
    assert basis == (10, 10)
    assert basis.size == 100
    assert basis.dim('b') == 10
    assert basis.grown(1.5) == (15, 15)
    assert FockBasisSpec(2, 3).grown(1.1) == (3, 4)

    with pytest.raises(errors.InvalidArgument):
        FockBasisSpec(1)
    with use_config({'oracle_max_basis': 500}):
        with pytest.raises(errors.InvalidArgument):
            FockBasisSpec(30)
        assert FockBasisSpec(15).grown(2.0, clamp=True) == (22, 22)
        with pytest.raises(errors.TruncationError):
            FockBasisSpec(15).grown(2.0)
        with pytest.raises(errors.TruncationError):
            FockBasisSpec(22).grown(2.0, clamp=True)


def test_prepare_input():
    basis = FockBasisSpec(20)
    vacuum = oracle.prepare_input(0, basis)
    assert vacuum.amplitudes[0, 0] == 1
    assert vacuum.norm == pytest.approx(1)

    coherent = oracle.prepare_input(1.0, basis)
    assert coherent.norm == pytest.approx(1, abs=1e-12)
    assert oracle.mean_number(coherent, 'a') == pytest.approx(1, abs=1e-10)
    assert oracle.mean_number(coherent, 'b') == 0
    assert oracle.oracle_quadrature(coherent, 'X') == pytest.approx(2, abs=1e-10)
    assert oracle.oracle_quadrature(coherent, 'X2') == pytest.approx(5, abs=1e-9)

    shifted = oracle.prepare_input(1j, basis)
    assert oracle.oracle_quadrature(shifted, 'X') == pytest.approx(0, abs=1e-10)

    with pytest.raises(errors.TruncationError):
        oracle.prepare_input(3.0, FockBasisSpec(5))


def test_quadrature_moments():
    basis = FockBasisSpec(8)
    vacuum = fock_state(basis, 0, 0)
    assert oracle.oracle_quadrature(vacuum, 'X') == 0
    assert oracle.oracle_quadrature(vacuum, 'X2') == pytest.approx(1)
    assert oracle.oracle_quadrature(fock_state(basis, 2, 0), 'X2') == pytest.approx(5)

    with pytest.raises(errors.InvalidArgument):
        oracle.oracle_quadrature(vacuum, 'P')


def test_two_mode_squeeze():
    basis = FockBasisSpec(90)
    vacuum = oracle.prepare_input(0, basis)
    assert oracle.apply_two_mode_squeeze(vacuum, 0, 0.3) is vacuum

    squeezed = oracle.apply_two_mode_squeeze(vacuum, 1.0, 0.0)
    assert squeezed.norm == pytest.approx(1, abs=1e-10)
    assert oracle.mean_number(squeezed, 'a') == pytest.approx(math.sinh(1)**2, abs=1e-8)
    assert oracle.mean_number(squeezed, 'b') == pytest.approx(math.sinh(1)**2, abs=1e-8)
    # the thermal marginal has Var(n) = n̄(n̄+1)
    assert oracle.number_variance(squeezed, 'a') == pytest.approx(
        math.sinh(1)**2 * math.cosh(1)**2, abs=1e-7)

    # photons come in pairs
    pops = squeezed.populations()
    assert np.count_nonzero(pops - np.diag(np.diag(pops))) == 0

    # the second squeezer of opposite phase undoes the first
    restored = oracle.apply_two_mode_squeeze(squeezed, 1.0, math.pi)
    assert abs(restored.amplitudes[0, 0]) == pytest.approx(1, abs=1e-9)

    with pytest.raises(errors.TruncationError):
        oracle.apply_two_mode_squeeze(oracle.prepare_input(0, FockBasisSpec(8)), 1.0, 0.0)


def test_phase_shift():
    basis = FockBasisSpec(10)
    state = fock_state(basis, 3, 1)
    shifted = oracle.apply_phase_shift(state, 0.5)
    assert shifted.amplitudes[3, 1] == pytest.approx(np.exp(1.5j))
    assert oracle.apply_phase_shift(state, 0).amplitudes[3, 1] == 1


def test_subtraction():
    basis = FockBasisSpec(10)
    vacuum = fock_state(basis, 0, 0)

    same, weight = oracle.apply_subtraction(vacuum, 0, 0)
    assert weight == 1
    assert same.amplitudes[0, 0] == 1

    lowered, weight = oracle.apply_subtraction(fock_state(basis, 1, 0), 1, 0)
    assert weight == pytest.approx(1)
    assert lowered.amplitudes[0, 0] == pytest.approx(1)

    lowered, weight = oracle.apply_subtraction(fock_state(basis, 3, 2), 2, 1)
    assert weight == pytest.approx(3 * 2 * 2)
    assert lowered.amplitudes[1, 1] == pytest.approx(1)

    with pytest.raises(errors.DegenerateState):
        oracle.apply_subtraction(vacuum, 1, 0)
    with pytest.raises(errors.InvalidArgument):
        oracle.apply_subtraction(vacuum, -1, 0)


def test_kraus_completeness():
    for eta in (0.2, 0.75, 1.0):
        operators = oracle.kraus_operators(12, eta)
        total = sum((op.conj().T @ op).toarray() for op in operators)
        assert np.allclose(total, np.eye(12), atol=1e-12)

    with pytest.raises(errors.InvalidArgument):
        oracle.kraus_operators(5, 0)


def test_single_photon_loss():
    basis = FockBasisSpec(6)
    rho = oracle.apply_loss_channel(fock_state(basis, 1, 0), 'a', 0.7)
    pops = rho.populations()
    assert pops[1, 0] == pytest.approx(0.7)
    assert pops[0, 0] == pytest.approx(0.3)
    assert rho.trace() == pytest.approx(1)
    rho.check()

    untouched = oracle.apply_loss_channel(fock_state(basis, 1, 0), 'b', 0.7)
    assert untouched.populations()[1, 0] == pytest.approx(1)

    with pytest.raises(errors.InvalidArgument):
        oracle.apply_loss_channel(rho, 'c', 0.5)


def test_loss_on_squeezed_state():
    basis = FockBasisSpec(40)
    state = oracle.apply_two_mode_squeeze(oracle.prepare_input(0.5, basis), 0.5, 0.0)
    before = oracle.mean_number(state, 'a')

    rho = oracle.apply_loss_channel(state, 'a', 0.6)
    rho = oracle.apply_loss_channel(rho, 'b', 0.6)
    assert rho.components > 1
    assert oracle.mean_number(rho, 'a') == pytest.approx(0.6 * before, rel=1e-9)

    small = oracle.apply_loss_channel(
        oracle.apply_two_mode_squeeze(oracle.prepare_input(0.5, FockBasisSpec(24)), 0.5, 0.0),
        'a', 0.6)
    small.check()
    assert small.entries.shape == (24 * 24, 24 * 24)


def test_density_matrix_checks():
    basis = FockBasisSpec(4)
    rho = oracle.DensityMatrix.from_state(fock_state(basis, 1, 1))
    assert rho.components == 1
    rho.check()

    doubled = oracle.DensityMatrix(rho.factor * 2, basis)
    doubled.check(normalized=False)
    with pytest.raises(errors.NumericalInconsistency):
        doubled.check()

    with use_config({'oracle_density_max_basis': 8}):
        with pytest.raises(errors.InvalidArgument):
            _ = oracle.DensityMatrix.from_state(fock_state(basis, 0, 0)).entries


def test_adaptive_convergence():
    result = oracle.oracle_expectations(ModelParams(g=0.5, alpha=0.5, phi=0.6))
    certificate = result.certificate
    assert certificate.max_change < 1e-8
    assert certificate.check_basis.size > certificate.basis.size
    assert result.basis.dim_a > 14
    assert result.mean_x == pytest.approx(
        interferometer.mean_x(ModelParams(g=0.5, alpha=0.5, phi=0.6)), rel=1e-8)

    with pytest.raises(AttributeError):
        _ = result.not_a_quantity


def test_oracle_agrees_with_closed_forms():
    for p in (ModelParams(g=1, alpha=1.0, m=1, n=1, phi=0.6),
              ModelParams(g=0.5, alpha=0.5, m=1, n=0, T=0.7, phi=0.6)):
        result = oracle.oracle_expectations(p)
        assert result.normalization == pytest.approx(interferometer.normalization(p), rel=1e-7)
        assert result.mean_photon == pytest.approx(interferometer.mean_photon_N(p), rel=1e-7)
        assert result.mean_x2 == pytest.approx(interferometer.mean_x2(p), rel=1e-7)
        assert result.mean_x == pytest.approx(interferometer.mean_x(p), rel=1e-7, abs=1e-9)
        assert result.sensitivity == pytest.approx(interferometer.phase_sensitivity(p),
                                                   rel=1e-6)


def test_slope_methods():
    p = ModelParams(g=0.5, alpha=0.5, m=1, n=0, T=0.7, phi=0.6)
    exact = oracle.oracle_expectations(p).dmean_x_dphi
    with use_config({'oracle_slope': 'richardson'}):
        richardson = oracle.oracle_expectations(p).dmean_x_dphi
    assert exact == pytest.approx(richardson, rel=1e-7)
    assert exact == pytest.approx(interferometer.dmean_x_dphi(p), rel=1e-7)

    with use_config({'oracle_slope': 'guess'}):
        with pytest.raises(errors.InvalidArgument):
            oracle.oracle_expectations(p)


def test_phases_share_subtraction():
    # pylint:disable=protected-access
    oracle.clear_cache()
    p = ModelParams(g=0.5, alpha=0.5, m=1, n=1, phi=0.3)
    oracle.oracle_expectations(p)
    hits = oracle._cached_subtraction.cache_info().hits
    oracle.oracle_expectations(p.with_(phi=0.6))
    assert oracle._cached_subtraction.cache_info().hits > hits

    subtracted, _ = oracle._subtracted_state(p, FockBasisSpec(21))
    assert not subtracted.data.flags.writeable


def test_oracle_qfi():
    assert oracle.oracle_qfi(ModelParams(g=0, alpha=1.0)) == pytest.approx(4, rel=1e-8)

    p = ModelParams(g=1, alpha=1.0, m=1, n=1, T=0.5)
    assert oracle.oracle_qfi(p) == pytest.approx(qfi.qfi_ideal(p.with_(T=1)), rel=1e-7)


def test_oracle_photons():
    p = ModelParams(g=0.8, alpha=0.0, m=1, n=1)
    x = math.tanh(0.8)**2
    assert oracle.oracle_mean_photon_N(p) == pytest.approx(
        2 * ((1 + 4 * x + x**2) / ((1 + x) * (1 - x)) - 1), rel=1e-8)
    assert oracle.oracle_normalization(p) == pytest.approx(interferometer.normalization(p),
                                                           rel=1e-8)


def test_oracle_degenerate():
    with pytest.raises(errors.DegenerateState):
        oracle.oracle_expectations(ModelParams(g=0, alpha=1.0, n=1))
    with pytest.raises(errors.SensitivityUndefined):
        oracle.oracle_phase_sensitivity(ModelParams(g=0.5, alpha=0.5, phi=0))
