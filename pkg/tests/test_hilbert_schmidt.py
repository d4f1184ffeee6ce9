import numpy as np
import pytest

from compop.diagnostics import HSDAlpha, HSDirichlet, hs_dalpha, hs_dirichlet, hs_hardy
from compop.diagnostics.hilbert_schmidt import _dyadic_partials, _verdict_from_trends
from compop.symbols import Blaschke, Scale, identity
from compop.utils import DomainError


@pytest.mark.parametrize('r', [0.3, 0.6])
def test_dirichlet_routes_agree_on_scaled_identity(r):
    rep = hs_dirichlet(Scale(r))
    exact = r * r / (1.0 - r * r)
    assert rep.space == 'D'
    assert rep.integral_value == pytest.approx(exact, rel=1e-6)
    assert rep.series_value == pytest.approx(exact, rel=1e-6)
    assert rep.verdict == 'finite-evidence'
    assert rep.extra['relative_gap'] <= 1e-6


@pytest.mark.parametrize('r', [0.3, 0.6])
def test_hardy_routes_agree_on_scaled_identity(r):
    rep = hs_hardy(Scale(r))
    exact = 1.0 / (1.0 - r * r)
    assert rep.integral_value == pytest.approx(exact, rel=1e-10)
    assert rep.series_value == pytest.approx(exact, rel=1e-10)
    assert rep.layercake_value == pytest.approx(exact, rel=1e-10)
    assert rep.verdict == 'finite-evidence'
    assert rep.extra['levelset_trend'] == 'converging'


def test_hardy_contact_shortcut():
    rep = hs_hardy(identity())
    assert rep.verdict == 'infinite-evidence'
    assert rep.integral_value == float('inf')
    assert rep.extra['contact_fraction'] == 1.0


def test_dirichlet_automorphism_diverges():
    rep = hs_dirichlet(Blaschke([0.5]), n_max=64, config={'LEVELS': 16, 'N': 512})
    assert rep.verdict == 'infinite-evidence'
    assert rep.extra['integral_trend'] == 'diverging'
    assert rep.extra['series_trend'] == 'diverging'


def test_dalpha_routes_are_comparable():
    rep = hs_dalpha(Scale(0.6), 0.5)
    assert rep.space == 'D_alpha(0.5)'
    assert rep.verdict == 'finite-evidence'
    assert rep.extra['ratio_verdict'] == 'within'
    assert 0.05 <= rep.extra['ratio'] <= 20.0


def test_dalpha_validation():
    with pytest.raises(DomainError):
        HSDAlpha({'ALPHA': 1.5})
    with pytest.raises(DomainError):
        HSDAlpha({'ALPHA': 0.0})


def test_dirichlet_summary_and_fields():
    diag = HSDirichlet({'LEVELS': 12})
    res = diag.evaluate(Scale(0.5))
    assert set(diag.summary_results(res)) == {'verdict', 'integral', 'series', 'relative_gap'}
    assert set(diag.detailed_results(res)) == set(diag.fields)
    assert len(diag.table_rows(res)) == 13


def test_helpers():
    np.testing.assert_allclose(_dyadic_partials(np.arange(1.0, 11.0)), [1.0, 2.0, 4.0, 8.0])
    assert _verdict_from_trends('converging', 'inconclusive') == 'finite-evidence'
    assert _verdict_from_trends('diverging') == 'infinite-evidence'
    assert _verdict_from_trends('converging', 'diverging') == 'inconclusive'
