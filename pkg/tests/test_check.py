""" tests of the closed-form/oracle equivalence check """
# pylint:disable=missing-docstring

import math

import pytest

from su11pss import check, errors, interferometer, series
from su11pss.params import ModelParams


@pytest.fixture
def fresh_moments():
    interferometer.clear_cache()
    yield
    interferometer.clear_cache()


def corrupt_w1(mocker):
    """ Replace the generating function exponent with one that has a stray λ1λ3 term """
    original = series.build_w1

    def corrupted(p, cap, limits=None):
        stray = series.TruncatedSeries({(1, 0, 1, 0): 0.1}, cap, limits)
        return original(p, cap, limits) + stray

    return mocker.patch('su11pss.series.build_w1', side_effect=corrupted)


def test_grids():
    assert len(check.GRIDS['default']()) == 9 * 16
    assert len(check.GRIDS['quick']()) == 8
    assert check.GRIDS['point']() == [ModelParams(g=1, alpha=1.0, m=1, n=1, phi=0.6)]


def test_check_point(fresh_moments):
    # pylint:disable=redefined-outer-name,unused-argument
    deviations = check.check_point(ModelParams(g=0.5, alpha=0.5, m=1, n=0, phi=0.6))
    assert {dev.quantity for dev in deviations} == {
        'normalization', 'mean_x', 'mean_x2', 'sensitivity', 'mean_photon', 'qfi'}
    assert all(isinstance(dev.oracle, float) for dev in deviations)
    assert all(dev.deviation < 1e-6 for dev in deviations)

    # no QFI comparison with internal loss
    deviations = check.check_point(ModelParams(g=0.5, alpha=0.5, T=0.7, phi=0.6))
    assert 'qfi' not in {dev.quantity for dev in deviations}


def test_check_point_error_codes(fresh_moments):
    # pylint:disable=redefined-outer-name,unused-argument
    deviations = check.check_point(ModelParams(g=0, alpha=1.0, n=1, phi=0.6))
    assert all(dev.closed == 'DegenerateState' for dev in deviations)
    assert all(dev.deviation == 0 for dev in deviations)

    deviations = {dev.quantity: dev for dev in
                  check.check_point(ModelParams(g=0.5, alpha=0.5, phi=0))}
    assert deviations['sensitivity'].closed == 'SensitivityUndefined'
    assert deviations['sensitivity'].oracle == 'SensitivityUndefined'
    assert deviations['mean_x'].deviation < 1e-6


def test_oracle_check_passes(fresh_moments):
    # pylint:disable=redefined-outer-name,unused-argument
    report = check.oracle_check('point')
    assert report.passed
    assert not report.failures
    assert set(report.max_deviations()) >= {'mean_x', 'sensitivity', 'qfi'}
    assert report.format().endswith('PASS: 6 comparisons, 0 beyond 1e-06\n')


def test_negative_control(mocker, fresh_moments):
    # pylint:disable=redefined-outer-name,unused-argument
    corrupt_w1(mocker)
    report = check.oracle_check('point')
    assert not report.passed
    assert 'FAIL' in report.format()


def test_unknown_grid():
    with pytest.raises(errors.InvalidArgument):
        check.oracle_check('everything')


def test_report():
    p = ModelParams()
    report = check.CheckReport([check.Deviation('mean_x', p, 1.0, 1.0, 0.0),
                                check.Deviation('mean_x', p, 1.0, 1.1, 0.09),
                                check.Deviation('qfi', p, 'DegenerateState', 4.0, math.inf)],
                               1e-6)
    assert not report.passed
    assert len(report.failures) == 2
    assert report.max_deviations() == {'mean_x': 0.09, 'qfi': math.inf}
    text = report.format()
    assert 'FAIL qfi' in text
    assert text.endswith('FAIL: 3 comparisons, 2 beyond 1e-06\n')
