import json
import warnings

import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

from compop import symbols
from compop.series import BoundaryGrid, PowerSeries
from compop.symbols import (Affine, Blaschke, Composition, Exp2, Moebius, Outer, Power, RawSeries, Scale,
                            identity)
from compop.utils import AccuracyWarning, DomainError, PreconditionError


points = np.array([0.0, 0.3, -0.5j, 0.6 + 0.2j, -0.7 - 0.1j])


def _numeric_derivative(phi, z, h=1e-6):
    return (phi(z + h) - phi(z - h)) / (2.0 * h)


@pytest.mark.parametrize('phi', [Moebius(0.4 - 0.2j), Blaschke([0.5, -0.3j]), Scale(0.7), Affine(0.5, 0.5),
                                 Power(3), Composition(Moebius(0.3), Power(2))])
def test_derivatives_match_finite_differences(phi):
    np.testing.assert_allclose(phi.deriv(points), _numeric_derivative(phi, points), rtol=1e-6, atol=1e-8)


@pytest.mark.parametrize('phi', [Moebius(0.9j), Blaschke([0.5, 0.2 + 0.7j]), Scale(0.5), Affine(0.5, 0.5),
                                 Power(5), RawSeries(PowerSeries([0.1, 0.3, 0.2]))])
def test_sup_bound_is_certified(phi):
    assert phi.sup_check(1024)['passed']


def test_moebius_is_involution():
    a = 0.6 * np.exp(0.3j)
    phi = Moebius(a)
    np.testing.assert_allclose(phi(phi(points)), points, atol=1e-14)
    assert phi(a) == pytest.approx(0.0)


def test_blaschke_is_unimodular_on_circle():
    b = Blaschke([0.5, -0.3 + 0.4j, 0.9j])
    np.testing.assert_allclose(np.abs(b.boundary_values(64)), 1.0, atol=1e-13)


def test_constructor_validation():
    with pytest.raises(DomainError):
        Moebius(1.0)
    with pytest.raises(DomainError):
        Affine(0.6, 0.6)
    with pytest.raises(DomainError):
        Power(1.5)
    with pytest.raises(DomainError):
        Blaschke([0.5], unimodular=2.0)
    with pytest.raises(DomainError):
        RawSeries(PowerSeries([0.0, 2.0]))


def test_evaluation_outside_disc_raises():
    with pytest.raises(DomainError):
        Scale(0.5)(1.2)


def test_series_backed_symbols_need_interior_points():
    f = RawSeries(PowerSeries([0.0, 0.5]))
    with pytest.raises(DomainError):
        f(1.0)
    assert f(0.5) == pytest.approx(0.25)


def test_raw_series_certified_beyond_l1():
    # l1 norm 1.2; on the circle |1 + z - z^2| = |1 - 2i sin t| <= sqrt(5)
    f = RawSeries(PowerSeries([0.4, 0.4, -0.4]))
    assert f.bound == pytest.approx(0.4 * np.sqrt(5.0), rel=1e-3)


def test_composition_ring_matches_pointwise():
    phi = Composition(Moebius(0.3), Scale(0.8))
    values, derivs = phi.ring(0.9, 32)
    z = 0.9 * np.exp(2j * np.pi * np.arange(32) / 32)
    np.testing.assert_allclose(values, phi(z), atol=1e-14)
    np.testing.assert_allclose(derivs, phi.deriv(z), atol=1e-14)


def test_rotation_conjugates_symbol():
    phi = Affine(0.5, 0.5)
    gamma = 0.7
    rot = symbols.rotated(phi, gamma)
    np.testing.assert_allclose(rot(points), np.exp(1j * gamma) * phi(np.exp(-1j * gamma) * points), atol=1e-14)


@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
@settings(max_examples=25, deadline=None)
def test_to_series_reproduces_moebius(x, y):
    a = complex(x, y) * 0.7
    phi = Moebius(a)
    s = symbols.to_series(phi, 128)
    z = 0.5 * np.exp(1j * np.linspace(0.0, 2 * np.pi, 7))
    np.testing.assert_allclose(s(z), phi(z), atol=1e-9)


def test_to_series_polynomial_is_exact():
    s = symbols.to_series(Affine(0.25, 0.5), 8)
    np.testing.assert_allclose(s.coeffs[:3], [0.25, 0.5, 0.0], atol=1e-12)
    assert s.residual < 1e-12


def test_to_series_warns_when_truncation_is_too_short():
    with pytest.warns(AccuracyWarning):
        symbols.to_series(Moebius(0.95), 4)


def test_interior_series_drops_coefficients_lost_to_roundoff():
    with pytest.warns(AccuracyWarning, match='past order 25'):
        s = symbols.to_series(Scale(0.5), 64, interior=True)
    assert s.coeffs[1] == pytest.approx(0.5, abs=1e-12)
    assert np.max(np.abs(s.coeffs[2:])) <= 1e-7
    assert np.all(s.coeffs[26:] == 0.0)


def test_interior_series_keeps_low_orders():
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        s = symbols.to_series(Moebius(0.3), 20, interior=True)
    n = np.arange(1, 21)
    np.testing.assert_allclose(s.coeffs[1:], -(1.0 - 0.09) * 0.3 ** (n - 1), atol=1e-7)


def test_outer_symbol_has_prescribed_modulus():
    logmod = BoundaryGrid.from_function(lambda t: -0.5 * (1.0 + np.cos(t)), 256)
    phi = Outer(logmod)
    np.testing.assert_allclose(np.abs(phi.boundary_values(256)), np.exp(logmod.samples), rtol=1e-12)
    assert phi.bound <= 1.0


def test_outer_power_doubles_log_modulus():
    logmod = BoundaryGrid.from_function(lambda t: -0.2 - 0.1 * np.sin(t), 128)
    phi = Outer(logmod)
    sq = phi.power_symbol(2)
    np.testing.assert_allclose(sq.series(points), phi.series(points) ** 2, atol=1e-10)


def test_outer_rejects_positive_log_modulus():
    with pytest.raises(PreconditionError):
        Outer(BoundaryGrid(np.full(32, 0.5)))


def test_exp2_values_and_admissibility():
    f = PowerSeries([1.0, 0.2j])
    phi = Exp2(f)
    np.testing.assert_allclose(phi(points), np.exp(-np.exp(-f(points))), rtol=1e-14)
    np.testing.assert_allclose(phi.deriv(points), _numeric_derivative(phi, points), rtol=1e-6)
    with pytest.raises(DomainError):
        Exp2(PowerSeries([0.0, 1.0j]))


@pytest.mark.parametrize('phi', [Moebius(0.3 + 0.1j), Blaschke([0.5, -0.2j]), Scale(0.5), Affine(0.5, 0.5),
                                 Power(2), Composition(Moebius(0.2), Power(3)),
                                 RawSeries(PowerSeries([0.1, 0.4])), Exp2(PowerSeries([1.0, 0.1]))])
def test_json_round_trip(phi):
    encoded = json.dumps(phi.to_json())
    decoded = symbols.symbol_from_json(encoded)
    np.testing.assert_allclose(decoded(points * 0.9), phi(points * 0.9), atol=1e-14)


def test_outer_json_round_trip():
    phi = Outer(BoundaryGrid.from_function(lambda t: -0.3 + 0.1 * np.cos(t), 64))
    decoded = symbols.symbol_from_json(phi.to_json())
    np.testing.assert_allclose(decoded.series.coeffs, phi.series.coeffs, atol=1e-14)


def test_parse_compact_syntax():
    assert isinstance(symbols.parse_symbol('identity'), Scale)
    assert symbols.parse_symbol('scale:0.5').r == 0.5
    assert symbols.parse_symbol('moebius:0.3+0.2i').a == 0.3 + 0.2j
    assert symbols.parse_symbol('affine:0.5,0.5').c1 == 0.5
    assert symbols.parse_symbol('power:3').n == 3
    assert len(symbols.parse_symbol('blaschke:0.5,-0.3').factors) == 2
    assert isinstance(symbols.parse_symbol('{"type": "power", "n": 2}'), Power)


@pytest.mark.parametrize('text', ['spiral:0.5', 'scale:', '{"type": "moebius"}', '{"type": "nope"}', '[1, 2]'])
def test_parse_rejects_bad_input(text):
    with pytest.raises(PreconditionError):
        symbols.parse_symbol(text)


def test_parse_reads_json_file(tmp_path):
    path = tmp_path / 'phi.json'
    path.write_text(json.dumps({'type': 'composition', 'outer': {'type': 'scale', 'r': 0.5},
                                'inner': {'type': 'moebius', 'a': [0.1, 0.2]}}))
    phi = symbols.parse_symbol(str(path))
    assert phi(0.1 + 0.2j) == pytest.approx(0.0)


def test_identity_boundary_modulus():
    grid = symbols.boundary_modulus(identity(), 16)
    np.testing.assert_allclose(grid.samples, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        symbols.to_series(identity(), 4)
