""" tests of the quantum Fisher information and Cramér-Rao bounds """
# pylint:disable=missing-docstring

import itertools
import math

import numpy as np
import pytest

from su11pss import errors, interferometer, qfi
from su11pss.config import use_config
from su11pss.params import ModelParams

from . import ALL_SCHEMES, GRID_SCHEMES


def test_qfi_reference_values():
    for alpha in (0.5, 1.0, 2.0):
        assert qfi.qfi_ideal(ModelParams(g=0, alpha=alpha)) == pytest.approx(4 * alpha**2)
    for g in (0.3, 1.0):
        assert qfi.qfi_ideal(ModelParams(g=g, alpha=0.0)) == pytest.approx(math.sinh(2 * g)**2)


def test_qfi_needs_lossless():
    with pytest.raises(errors.InvalidArgument):
        qfi.qfi_ideal(ModelParams(T=0.5))
    with pytest.raises(errors.DegenerateState):
        qfi.qfi_ideal(ModelParams(g=0, m=0, n=2))


def test_qfi_subtraction_ordering():
    base = ModelParams(g=1, alpha=1.0)
    values = [qfi.qfi_ideal(base.with_(m=k, n=k)) for k in range(4)]
    assert values == sorted(values)
    assert qfi.qfi_ideal(base.with_(m=1, n=1)) > qfi.qfi_ideal(base)


@pytest.mark.parametrize('scheme', ALL_SCHEMES)
def test_qfi_monotone(scheme):
    m, n = scheme
    by_gain = [qfi.qfi_ideal(ModelParams(g=g, alpha=1.0, m=m, n=n))
               for g in np.linspace(0.2, 1.5, 14)]
    assert by_gain == sorted(by_gain)
    by_alpha = [qfi.qfi_ideal(ModelParams(g=1, alpha=alpha, m=m, n=n))
                for alpha in np.linspace(0.2, 2.0, 10)]
    assert by_alpha == sorted(by_alpha)


def test_qcrb():
    assert qfi.qcrb(4) == 0.5
    assert qfi.qcrb(4, 4) == 0.25
    assert qfi.qcrb(1, 1) == 1
    for f, v in ((0, 1), (-1, 1), (1, 0), (1, 1.5)):
        with pytest.raises(errors.InvalidArgument):
            qfi.qcrb(f, v)


def test_cramer_rao_consistency():
    """ the homodyne sensitivity can never beat the QCRB """
    for (m, n), g, phi in itertools.product(GRID_SCHEMES, (0.5, 1.0), (0.3, 0.6, 1.2)):
        p = ModelParams(g=g, alpha=1.0, m=m, n=n, phi=phi)
        bound = qfi.qcrb(qfi.qfi_ideal(p))
        assert interferometer.phase_sensitivity(p) >= bound * (1 - 1e-9)


def test_lossy_limits():
    for m, n in GRID_SCHEMES:
        p = ModelParams(g=1, alpha=1.0, m=m, n=n)
        fisher = qfi.qfi_ideal(p)
        assert qfi.qfi_lossy(p) == fisher
        assert qfi.qfi_lossy(p.with_(eta=1e-9)) < 1e-6 * fisher

        curve = [qfi.qfi_lossy(p.with_(eta=eta)) for eta in np.linspace(0.05, 1, 20)]
        assert curve == sorted(curve)
        assert all(value <= fisher * (1 + 1e-12) for value in curve)


def test_lossy_ignores_internal_loss():
    p = ModelParams(g=1, alpha=1.0, m=1, n=1, eta=0.8)
    assert qfi.qfi_lossy(p.with_(T=0.5)) == qfi.qfi_lossy(p)


def test_lossy_formula():
    p = ModelParams(g=0.7, alpha=0.6, m=2, n=1, eta=0.6)
    fisher = qfi.qfi_ideal(p)
    mean = interferometer.mean_photon_a(p)
    expected = 4 * fisher * 0.6 * mean / (0.4 * fisher + 4 * 0.6 * mean)
    assert qfi.qfi_lossy(p) == pytest.approx(expected, rel=1e-14)


def test_lossy_ordering():
    base = ModelParams(g=1, alpha=1.0, eta=0.8)
    assert qfi.qfi_lossy(base.with_(m=1, n=1)) > qfi.qfi_lossy(base)
    assert qfi.qcrb_lossy(base.with_(m=1, n=1)) < qfi.qcrb_lossy(base)
    assert qfi.qcrb_lossy(base.with_(eta=1)) == pytest.approx(
        qfi.qcrb(qfi.qfi_ideal(base)), rel=1e-14)


def test_fisher_results():
    p = ModelParams(g=0, alpha=1.0)
    assert qfi.fisher(p) == pytest.approx((4, 0.5, 1))
    assert qfi.fisher(p, 16) == pytest.approx((4, 0.125, 16))

    with use_config({'measurements': 4}):
        result = qfi.fisher_lossy(p.with_(eta=0.5))
        assert result.v == 4
        assert result.qcrb == pytest.approx(1 / math.sqrt(4 * result.f))
