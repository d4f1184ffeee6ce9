import numpy as np
import pytest

from compop.diagnostics import BoundednessSweep, CompactnessSweep, boundedness_sweep, compactness_sweep
from compop.diagnostics.boundedness import sweep_quantity
from compop.spaces import SpaceParams
from compop.symbols import Affine, Blaschke, Scale, identity
from compop.utils import PreconditionError

QUICK = {'GAPS': [2.0 ** -k for k in range(1, 9)], 'RAYS': 2}


def test_identity_sweep_quantity_closed_form():
    lam = 0.5
    # ||F_lambda||^2 = 1 + |lambda|^2 / (1 - |lambda|^2)^2 on D
    expected = (1.0 - lam ** 2) * np.sqrt(1.0 + lam ** 2 / (1.0 - lam ** 2) ** 2)
    assert sweep_quantity(identity(), lam, SpaceParams(2, 0, 0)) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize('phi, expected', [(Scale(0.5), 'compact-evidence'),
                                           (identity(), 'not-compact-evidence'),
                                           (Blaschke([0.5]), 'not-compact-evidence')])
def test_compactness_verdicts(phi, expected):
    res = compactness_sweep(phi, config=QUICK)
    assert res['verdict'] == expected
    assert res['dropped'] == 0


def test_boundedness_of_identity():
    res = boundedness_sweep(identity(), SpaceParams(2, 0, 0), QUICK)
    assert res['trend'] == 'flat'
    assert res['verdict'] == 'bounded-evidence'
    assert res['Q_last'] == pytest.approx(1.0, abs=0.05)


def test_sweep_rejects_nonpositive_delta():
    with pytest.raises(PreconditionError):
        BoundednessSweep({'SPACE': 'p=2,alpha=3,beta=0'})


def test_result_views():
    sweep = CompactnessSweep(QUICK)
    res = sweep.evaluate(Scale(0.5))
    summary = sweep.summary_results(res)
    assert set(summary) == {'verdict', 'Q_sup', 'Q_last', 'slope'}
    assert set(sweep.detailed_results(res)) == set(sweep.fields)
    rows = sweep.table_rows(res)
    assert len(rows) == len(QUICK['GAPS'])
    assert rows[0][0] == 0.5


def test_compactness_sweep_is_rotation_invariant():
    turn = np.exp(1j * np.pi / 16)
    base = compactness_sweep(Affine(0.5, 0.5), config=QUICK)
    rotated = compactness_sweep(Affine(0.5 * turn, 0.5 * turn), config=QUICK)
    np.testing.assert_allclose(rotated['Q'], base['Q'], rtol=1e-8)
    assert base['verdict'] == rotated['verdict'] == 'not-compact-evidence'


def test_boundedness_sweep_follows_contact_point():
    turn = np.exp(3j * np.pi / 8)
    base = boundedness_sweep(Affine(0.5, 0.5), config=QUICK)
    rotated = boundedness_sweep(Affine(0.5 * turn, 0.5 * turn), config=QUICK)
    np.testing.assert_allclose(rotated['Q'], base['Q'], rtol=1e-8)
    assert rotated['verdict'] == base['verdict']
