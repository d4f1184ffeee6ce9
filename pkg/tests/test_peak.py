import numpy as np
import pytest

from compop.boundary_sets import TWO_PI, ArcSet, cantor_generator
from compop.constructions import build_peak_symbol, peak_sequence
from compop.utils import PreconditionError, ResolutionError

M = 2 ** 12


def test_peak_sequence():
    tau = peak_sequence([3.0, 2.0, 1.0])
    np.testing.assert_allclose(tau, [6.0 ** -0.25, 3.0 ** -0.25, 1.0])
    assert np.all(np.diff(tau) > 0.0)
    assert np.sum(tau ** 2 * np.array([3.0, 2.0, 1.0])) <= 2.0 * np.sqrt(6.0)


@pytest.mark.parametrize('E', [ArcSet.points([0.0]), ArcSet.points([0.0, np.pi]),
                               cantor_generator(1.0 / 3.0, 3).midpoints()],
                         ids=['point', 'two points', 'cantor midpoints'])
def test_peak_symbol(E):
    pc = build_peak_symbol(E, M)
    assert pc.gaps.shape[0] == E.n_components
    # cell-RMS node values make the grid integral of g^2 exact
    assert pc.g_norm_sq_cells == pytest.approx(pc.g_norm_sq_exact, rel=1e-10)
    assert pc.certificate_holds
    measures = pc.contact['measures']
    assert np.all(np.diff(measures) <= 0.0)
    assert measures[-1] <= 2.0 * E.n_components * pc.contact['resolution']


@pytest.mark.parametrize('E', [ArcSet.points([0.0]), ArcSet.points([0.3, 2.0])], ids=['point', 'two points'])
def test_realized_g_norm_matches_arc_integral(E):
    pc = build_peak_symbol(E, 2 ** 14)
    # read back from the series of phi between the construction nodes
    assert pc.g_norm_sq != pc.g_norm_sq_cells
    assert pc.g_norm_sq == pytest.approx(pc.g_norm_sq_exact, rel=0.05)


def test_peak_tau_grows_on_shorter_gaps():
    pc = build_peak_symbol(ArcSet.points([0.0, 1.0, 2.5]), M)
    lengths = pc.gaps[:, 1] - pc.gaps[:, 0]
    assert np.all(np.diff(lengths) <= 0.0)
    assert np.all(np.diff(pc.tau) > 0.0)
    np.testing.assert_allclose(pc.tau_partials[-1], np.sum(pc.tau ** 2 * lengths))


def test_peak_symbol_to_json():
    pc = build_peak_symbol(ArcSet.points([1.0]), M)
    out = pc.to_json()
    assert out['symbol']['type'] == 'raw_series'
    assert out['provenance']['gaps'] == [[1.0, 1.0 + TWO_PI]]
    assert out['provenance']['measured'] <= out['provenance']['certificate']


def test_peak_symbol_preconditions():
    with pytest.raises(PreconditionError):
        build_peak_symbol(ArcSet.empty(), M)
    with pytest.raises(PreconditionError):
        build_peak_symbol(ArcSet.arc(0.0, 0.1), M)
    with pytest.raises(ResolutionError):
        build_peak_symbol(ArcSet.points([0.0, 1e-4]), M)
