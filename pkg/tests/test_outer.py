import numpy as np
import pytest

from compop.boundary_sets import ArcSet, WeightFn, distance_grid
from compop.constructions import (build_outer_symbol, carleson_dirichlet, check_lemma_norme, check_theorem_thnorme,
                                  hardy_tube_integral, outer_power_identity, dirichlet_tube_integral)
from compop.quadrature import panel_trend
from compop.series import BoundaryGrid
from compop.spaces import dirichlet_integral
from compop.symbols import Outer
from compop.utils import PreconditionError

POINT = ArcSet.points([0.0])
QUICK = {'M': 2 ** 10, 'N_MAX': 64, 'HS_LEVELS': 8, 'HS_ANGULAR_SIZE': 1024}


def test_outer_symbol_modulus():
    w = WeightFn.log_power(2.0)
    M = 2 ** 12
    f = build_outer_symbol(POINT, w, M)
    modulus = np.abs(f.boundary_values(M))
    d = distance_grid(POINT, M)
    with np.errstate(divide='ignore'):
        expected = np.exp(-w(d))
    np.testing.assert_allclose(modulus, expected, rtol=1e-10)
    assert modulus[0] == pytest.approx(1.0)
    assert f.bound <= 1.0


def test_outer_symbol_preconditions():
    with pytest.raises(PreconditionError):
        build_outer_symbol(POINT, WeightFn.constant(-1.0), 256)
    with pytest.raises(PreconditionError):
        build_outer_symbol(POINT, WeightFn.log_power(0.5), 256, require_dini=True)


def test_power_identity():
    gaps = outer_power_identity(POINT, WeightFn.log_power(2.0), M=2 ** 10, powers=range(1, 5))
    assert sorted(gaps) == [1, 2, 3, 4]
    assert max(gaps.values()) <= 1e-9


def test_carleson_formula_matches_coefficients():
    logmod = BoundaryGrid.from_function(lambda t: -0.3 - 0.2 * np.cos(t) + 0.05 * np.sin(2 * t), 256)
    expected = dirichlet_integral(Outer(logmod).series)
    assert carleson_dirichlet(logmod) == pytest.approx(expected, rel=1e-8)


def test_dirichlet_ratio_on_point():
    res = check_lemma_norme(POINT, WeightFn.log_power(2.0), {'M': 2 ** 12})
    assert res['passed']
    assert res['lhs'] > 0.0 and res['rhs'] > 0.0
    assert res['flags']['concave']


def test_dirichlet_ratio_needs_regular_weight():
    with pytest.raises(PreconditionError):
        check_lemma_norme(POINT, WeightFn.linear(1.0), {'M': 256})


@pytest.mark.parametrize('w, expected', [(WeightFn.log_power(2.0), 'converging'),
                                         (WeightFn.linear(1.0), 'diverging'),
                                         (WeightFn.constant(1.0), 'converging')])
def test_dirichlet_tube_integral_trend(w, expected):
    partials = dirichlet_tube_integral(POINT, w)['partials']
    assert panel_trend(partials)['verdict'] == expected


@pytest.mark.parametrize('w, expected', [(WeightFn.constant(0.5), 'finite'), (WeightFn.linear(1.0), 'infinite')])
def test_tube_integral_agrees_with_hilbert_schmidt(w, expected):
    res = check_theorem_thnorme(POINT, w, QUICK)
    assert res['integral_verdict'] == expected
    assert res['hs_verdict'] == expected
    assert res['agree']


def test_tube_check_records_failed_hypothesis():
    res = check_theorem_thnorme(POINT, WeightFn.linear(1.0), QUICK)
    assert not res['hypothesis_holds']
    assert not res['flags']['concave']


@pytest.mark.parametrize('w, expected', [(WeightFn.log_power(2.0), 'converging'),
                                         (WeightFn.linear(1.0), 'diverging')])
def test_hardy_tube_integral_trend(w, expected):
    assert panel_trend(hardy_tube_integral(POINT, w)['partials'])['verdict'] == expected


def test_hardy_tube_integral_of_constant_weight():
    # |f| = e^-c everywhere, so the sum is 1 / (1 - e^-2c)
    partials = hardy_tube_integral(POINT, WeightFn.constant(0.5))['partials']
    assert partials[-1] == pytest.approx(1.0 / (1.0 - np.exp(-1.0)), rel=1e-9)


def test_hardy_tube_integral_on_arc_is_infinite():
    partials = hardy_tube_integral(ArcSet.arc(0.0, 1.0), WeightFn.log_power(2.0))['partials']
    assert np.isinf(partials[0])
