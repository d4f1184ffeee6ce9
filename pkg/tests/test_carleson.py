import numpy as np
import pytest

from compop.diagnostics import CarlesonSweep, berezin_quantity, carleson_sweep
from compop.symbols import Affine, Power, Scale, identity

QUICK = {'BOX_LEVELS': [3, 4, 5, 6], 'RULE_LEVELS': 10, 'BEREZIN_GAPS': [0.5, 0.25, 0.125, 0.0625]}


@pytest.mark.parametrize('lam', [0.5, 0.9, 0.99j])
def test_berezin_quantity_of_identity_is_one(lam):
    # int |1 - conj(lambda) z|^-4 dA = (1 - |lambda|^2)^-2
    assert berezin_quantity(identity(), lam) == pytest.approx(1.0, rel=1e-6)


def test_identity_quotient_is_flat():
    res = carleson_sweep(identity(), config=QUICK)
    q = res['quotient']
    assert q.max() / q.min() - 1.0 <= 0.1
    assert res['sup_verdict'] == 'bounded-evidence'
    assert res['limit_verdict'] == 'not-compact-evidence'
    np.testing.assert_allclose(res['berezin'], 1.0, rtol=1e-6)


def test_square_doubles_identity_quotient():
    ident = carleson_sweep(identity(), config=QUICK)['quotient']
    square = carleson_sweep(Power(2), config=QUICK)['quotient']
    ratio = square / (2.0 * ident)
    assert np.all(np.maximum(ratio, 1.0 / ratio) <= 2.1)


def test_interior_image_vanishes_on_small_boxes():
    res = carleson_sweep(Scale(0.5), config=QUICK)
    np.testing.assert_allclose(res['quotient'], 0.0)
    assert res['limit_verdict'] == 'compact-evidence'
    assert res['berezin_last'] < res['berezin_sup']


def test_box_levels_argument():
    sweep = CarlesonSweep(dict(QUICK, BOX_LEVELS=[2, 3, 4, 5]))
    res = sweep.evaluate(identity())
    np.testing.assert_allclose(res['box_lengths'], 2 * np.pi * 2.0 ** -np.arange(2, 6))
    assert len(sweep.table_rows(res)) == 4


def test_box_sweep_is_rotation_invariant():
    turn = np.exp(1j * np.pi / 16)
    base = carleson_sweep(Affine(0.5, 0.5), config=QUICK)
    rotated = carleson_sweep(Affine(0.5 * turn, 0.5 * turn), config=QUICK)
    np.testing.assert_allclose(rotated['quotient'], base['quotient'], rtol=1e-6)
    np.testing.assert_allclose(rotated['berezin'], base['berezin'], rtol=1e-6)
    assert rotated['limit_verdict'] == base['limit_verdict']
    assert rotated['quotient_last'] > 0.0
