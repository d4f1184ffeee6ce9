import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

from compop import series
from compop.series import BoundaryGrid, PowerSeries
from compop.utils import AliasingError, DomainError, NumericError


coefficient_lists = st.lists(st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False),
                             min_size=2, max_size=12)


def test_short_coefficients_are_padded():
    f = PowerSeries([3.0])
    assert f.truncation_order == 1
    assert f.coeffs[1] == 0.0


def test_nonfinite_coefficients_rejected():
    with pytest.raises(NumericError):
        PowerSeries([1.0, np.inf])


def test_geometric_matches_closed_form():
    a = 0.7 * np.exp(0.4j)
    f = PowerSeries.geometric(a, 200, power=2.0)
    z = np.array([0.0, 0.3, -0.5j, 0.2 + 0.4j])
    np.testing.assert_allclose(f(z), (1.0 - a * z) ** -2.0, rtol=1e-12)


def test_evaluate_outside_disc_raises():
    with pytest.raises(DomainError):
        PowerSeries([1.0, 1.0])(1.5)


@given(coefficient_lists, coefficient_lists)
@settings(max_examples=30, deadline=None)
def test_multiply_matches_polynomial_product(a, b):
    f, g = PowerSeries(a), PowerSeries(b)
    N = f.truncation_order + g.truncation_order
    prod = series.multiply(f, g, N)
    np.testing.assert_allclose(prod.coeffs, np.convolve(f.coeffs, g.coeffs), atol=1e-9)


def test_power_of_linear_series():
    f = PowerSeries([0.0, 0.5]).truncate(20)
    p = series.power(f, 7)
    expected = np.zeros(21, dtype=complex)
    expected[7] = 0.5 ** 7
    np.testing.assert_allclose(p.coeffs, expected, atol=1e-15)


def test_power_rejects_non_integer():
    with pytest.raises(DomainError):
        series.power(PowerSeries([0.0, 1.0]), 1.5)


def test_ring_values_and_derivatives():
    f = PowerSeries([1.0, 2.0, -1.0j, 0.5])
    r, M = 0.8, 16
    z = r * np.exp(2j * np.pi * np.arange(M) / M)
    values, derivs = f.ring(r, M)
    np.testing.assert_allclose(values, f(z), atol=1e-13)
    np.testing.assert_allclose(derivs, f.deriv(z), atol=1e-13)


def test_ring_folds_high_degrees():
    # degree above the grid size must alias exactly, not be dropped
    f = PowerSeries.monomial(40, c=1.0)
    values, _ = f.ring(0.9, 16)
    z = 0.9 * np.exp(2j * np.pi * np.arange(16) / 16)
    np.testing.assert_allclose(values, z ** 40, atol=1e-13)


def test_boundary_trace_round_trip():
    f = PowerSeries(np.arange(1, 9) / 10.0)
    grid = series.boundary_trace(f, 32)
    np.testing.assert_allclose(series.recover_series(grid, 7).coeffs, f.coeffs, atol=1e-14)


def test_boundary_trace_aliasing_error():
    with pytest.raises(AliasingError):
        series.boundary_trace(PowerSeries(np.ones(20)), 32)


def test_grid_size_must_be_power_of_two():
    with pytest.raises(DomainError):
        BoundaryGrid(np.ones(12))


def test_harmonic_conjugate_of_cosine():
    grid = BoundaryGrid.from_function(lambda t: np.cos(3 * t), 64)
    conj = series.harmonic_conjugate(grid)
    np.testing.assert_allclose(conj.samples, np.sin(3 * grid.angles), atol=1e-13)


def test_analytic_completion_real_part():
    u = BoundaryGrid.from_function(lambda t: 1.0 + 0.5 * np.cos(t) - 0.25 * np.sin(2 * t), 64)
    h = series.analytic_completion(u, 10)
    # h = 1 + 0.5 z + 0.25 i z^2
    np.testing.assert_allclose(h.coeffs[:3], [1.0, 0.5, 0.25j], atol=1e-14)
    values = series.completion_boundary_values(u).samples
    np.testing.assert_allclose(values.real, u.samples, atol=1e-13)


def test_outer_modulus_matches_log_modulus():
    logmod = BoundaryGrid.from_function(lambda t: -0.3 - 0.2 * np.cos(t), 128)
    f = series.outer_from_log_modulus(logmod, 40)
    z = np.exp(1j * logmod.angles)
    np.testing.assert_allclose(np.abs(f(z)), np.exp(logmod.samples), rtol=1e-10)


def test_completion_rejects_complex_data():
    with pytest.raises(DomainError):
        series.analytic_completion(BoundaryGrid(np.ones(16) * 1j), 4)
