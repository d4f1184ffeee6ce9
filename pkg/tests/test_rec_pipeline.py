import numpy as np
import pytest

from compop.boundary_sets import ArcSet
from compop.constructions import PsiFunction, build_psi, build_rec_pipeline, parse_growth
from compop.utils import PreconditionError

QUICK = {'M': 2 ** 12, 'ATOMS': 32, 'PSI_RATIO': 1.25, 'HS_LEVELS': 10, 'HS_ANGULAR_SIZE': 1024}


@pytest.fixture(scope='module')
def point_pipeline():
    return build_rec_pipeline(ArcSet.points([0.0]), parse_growth('log'), QUICK)


def test_parse_growth():
    assert parse_growth('log')(np.e ** 3) == pytest.approx(3.0)
    assert parse_growth('log')(2.0) == 1.0
    assert parse_growth('loglog')(np.exp(np.e ** 2)) == pytest.approx(3.0)
    assert parse_growth('power:0.5')(16.0) == pytest.approx(4.0)
    assert parse_growth('bounded:5')(100.0) == 5.0
    assert parse_growth('bounded:5')(0.5) == 1.0
    for text in ('exp', 'power:x'):
        with pytest.raises(PreconditionError):
            parse_growth(text)


def test_psi_function_inverse():
    psi = PsiFunction(np.array([1.0, 2.0, 3.0, 4.0]), np.array([0.5, 0.3, 0.1]), np.array([1.5, 1.5, 0.7]))
    np.testing.assert_allclose(psi(np.array([0.5, 2.5, 10.0])), [0.5, 0.3, 0.1])
    np.testing.assert_allclose(psi.inverse(np.array([0.9, 0.4, 0.3, 0.05])), [1.0, 2.0, 3.0, 4.0])


def test_build_psi_blocks():
    h = parse_growth('log')
    psi, _ = build_psi(h, ratio=1.25)
    j = np.arange(1, psi.values.size + 1)
    np.testing.assert_allclose(psi.masses, 1.25 ** -j)
    np.testing.assert_allclose(psi.values * np.diff(psi.edges ** 2), psi.masses, rtol=1e-9)
    assert np.all(np.diff(psi.values) <= 0.0)
    assert np.all(np.diff(psi.edges) > 0.0)


def test_build_psi_needs_unbounded_growth():
    with pytest.raises(PreconditionError):
        build_psi(parse_growth('bounded:5'), ratio=2.0)


def test_pipeline_on_point(point_pipeline):
    rep = point_pipeline.report
    assert rep['psi_plain_verdict'] == 'converging'
    assert rep['psi_weighted_verdict'] == 'diverging'
    assert 0.0 < rep['scale'] <= 1.0
    assert rep['max_imag'] < np.pi / 4.0
    assert rep['chain_holds']
    assert rep['level_inclusion_holds']
    assert rep['hs_verdict'] == 'finite-evidence'
    assert np.all(np.diff(rep['weighted_capacity_partials']) >= 0.0)
    caps = point_pipeline.caps
    assert caps[0] < caps[caps.size // 2] < caps[-2]
    assert point_pipeline.eta[0] >= point_pipeline.eta[-2]


def test_weighted_capacity_partials_are_finite(point_pipeline):
    rep = point_pipeline.report
    partials = rep['weighted_capacity_partials']
    assert np.isinf(point_pipeline.caps[-1])
    assert partials.size >= 2
    assert np.all(np.isfinite(partials)) and partials[0] > 0.0
    assert np.all(np.diff(partials) > 0.0)
    assert rep['weighted_capacity_domination'] >= 0.1
    assert rep['weighted_capacity_comparison'].shape == partials.shape
    assert rep['weighted_capacity_verdict'] == 'diverging'


def test_pipeline_to_json(point_pipeline):
    out = point_pipeline.to_json()
    assert out['symbol']['type'] == 'exp2'
    assert len(out['provenance']['capacities']) == 40
    assert out['provenance']['scale'] == point_pipeline.scale


def test_pipeline_needs_capacity_zero():
    with pytest.raises(PreconditionError):
        build_rec_pipeline(ArcSet.arc(0.0, 1.0), parse_growth('log'), QUICK)
