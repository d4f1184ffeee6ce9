import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

from compop import spaces
from compop.series import BoundaryGrid, PowerSeries
from compop.spaces import SpaceParams
from compop.utils import DomainError, PreconditionError


def test_parse_named_spaces():
    assert SpaceParams.parse('D') == SpaceParams(2.0, 0.0, 0.0)
    assert SpaceParams.parse('H2') == SpaceParams(2.0, 1.0, 0.0)
    assert SpaceParams.parse('p=3, alpha=0, beta=1') == SpaceParams(3.0, 0.0, 1.0)


def test_parse_unknown_field():
    with pytest.raises(PreconditionError):
        SpaceParams.parse('p=2,gamma=1')


def test_delta_formula():
    assert SpaceParams(2, 0, 0).delta == 1.0
    assert SpaceParams(2, 1, 0).delta == pytest.approx(0.5)
    assert SpaceParams(3, 0, 1).delta == pytest.approx(7.0 / 3.0)
    with pytest.raises(PreconditionError):
        SpaceParams(2, 3, 0).require_positive_delta()


def test_invalid_params():
    with pytest.raises(DomainError):
        SpaceParams(0.5)
    with pytest.raises(DomainError):
        SpaceParams(2, -2)


def test_dirichlet_integral_routes_agree():
    f = PowerSeries([0.3, 1.0, 0.5, -0.25j])
    coeff = spaces.dirichlet_integral(f)
    assert coeff == pytest.approx(1.0 + 2 * 0.25 + 3 * 0.0625)
    assert spaces.dirichlet_integral(f, 'quadrature') == pytest.approx(coeff, rel=1e-12)


def test_dirichlet_integral_unknown_method():
    with pytest.raises(DomainError):
        spaces.dirichlet_integral(PowerSeries([0.0, 1.0]), 'magic')


def test_norms_of_monomial():
    f = PowerSeries.monomial(5, c=2.0)
    assert spaces.hardy_norm_sq(f) == pytest.approx(4.0)
    assert spaces.dirichlet_norm(f) == pytest.approx(np.sqrt(20.0))


@given(st.lists(st.floats(-2.0, 2.0), min_size=3, max_size=10))
@settings(max_examples=20, deadline=None)
def test_besov_quadrature_matches_coefficient_form(coeffs):
    f = PowerSeries(coeffs)
    quad = spaces.besov_seminorm(f, SpaceParams(2.0, 1.0, 0.0)) ** 2
    assert quad == pytest.approx(spaces.besov_coefficient_form(f, 1.0), rel=1e-9, abs=1e-12)


def test_test_function_series_matches_closed_form():
    F = spaces.test_function(0.6 * np.exp(1j), beta=1.0)
    z = np.array([0.2, -0.4j, 0.5 + 0.1j])
    np.testing.assert_allclose(F.series(400)(z), F(z), rtol=1e-12)
    with pytest.raises(DomainError):
        spaces.test_function(1.0)


def test_dirichlet_test_function_norm_closed_form():
    lam = 0.8
    F = spaces.test_function(lam)
    expected = 1.0 + lam ** 2 / (1.0 - lam ** 2) ** 2
    assert spaces.besov_norm_p(F, SpaceParams(2, 0, 0)) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize('p, alpha, beta, C', [(2, 0, 0, 20.0), (2, 1, 0, 20.0), (3, 0, 1, 50.0)])
def test_test_function_asymptotics(p, alpha, beta, C):
    report = spaces.test_function_asymptotics(SpaceParams(p, alpha, beta), np.geomspace(1e-2, 0.5, 4), C)
    assert report['passed'], report['ratios']


@pytest.mark.parametrize('alpha', [0.0, 1.0])
def test_reproducing_formula(alpha):
    rng = np.random.default_rng(7)
    f = PowerSeries(rng.normal(size=9) + 1j * rng.normal(size=9))
    for z in (0.0, 0.5, 0.9j, -0.6 + 0.3j):
        assert spaces.reproducing_check(f, alpha, z) <= 1e-7


def test_reproducing_point_limit():
    with pytest.raises(DomainError):
        spaces.reproducing_check(PowerSeries([1.0, 1.0]), 0.0, 0.95)


@pytest.mark.parametrize('c, d', [(0, 1), (0, 2), (1, 2)])
def test_kernel_estimate(c, d):
    points = np.array([0.0, 0.5, 0.9j, -0.99, 0.999])
    report = spaces.kernel_estimate_check(c, d, points)
    assert report['passed'], report['ratios']


@pytest.mark.parametrize('c, d', [(0, 1), (1, 2)])
def test_kernel_integral_at_origin(c, d):
    assert spaces.kernel_integral(0.0, c, d) == pytest.approx(1.0, rel=1e-12)


def test_subharmonic_constant_at_origin():
    f = PowerSeries([1.0, 0.0])
    assert spaces.subharmonic_constant(f, 2.0, 0.0, [0.0]) == pytest.approx(1.0, rel=1e-12)


def test_harmonic_dirichlet_norm():
    u = BoundaryGrid.from_function(np.cos, 32)
    assert spaces.harmonic_dirichlet_norm(u) == pytest.approx(1.0)
    assert spaces.harmonic_dirichlet_norm(BoundaryGrid(np.ones(16))) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        spaces.harmonic_dirichlet_norm(u, alpha=1.0)
