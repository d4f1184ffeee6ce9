import numpy as np
import pytest

from compop.diagnostics import PowerNormDiagnostics, iterate_powers, power_norm_diagnostics
from compop.series import BoundaryGrid, multiply
from compop.symbols import Affine, Blaschke, Outer, Scale, identity

QUICK = {'N': 256}


def test_scaled_identity_powers_are_exact():
    r = 0.9
    res = power_norm_diagnostics(Scale(r), n_max=32, config=QUICK)
    n = np.arange(1, 33)
    np.testing.assert_allclose(res['dirichlet'], n * r ** (2 * n), rtol=1e-10)
    np.testing.assert_allclose(res['hardy_sq'], r ** (2 * n), rtol=1e-10)
    assert res['reliable'].all()
    assert res['limit_verdict'] == 'compact-evidence'
    assert res['hardy_verdict'] == 'compact-evidence'


def test_identity_gives_no_evidence():
    res = power_norm_diagnostics(identity(), n_max=32, config=QUICK)
    np.testing.assert_allclose(res['dirichlet'], np.arange(1, 33), rtol=1e-10)
    assert res['trend'] == 'growing'
    assert res['sup_verdict'] == 'no-evidence'
    assert res['limit_verdict'] == 'no-evidence'


def test_blaschke_powers_count_zeros():
    # D(B) is the number of zeros of a finite Blaschke product
    res = power_norm_diagnostics(Blaschke([0.5]), n_max=8, config={'N': 1024})
    np.testing.assert_allclose(res['dirichlet'], np.arange(1, 9), rtol=1e-8)


def test_affine_symbol_powers_grow():
    res = power_norm_diagnostics(Affine(0.5, 0.5), n_max=64, config={'N': 512})
    assert res['D_first'] == pytest.approx(0.25)
    assert res['reliable'].all()
    assert res['dirichlet'][-1] > res['dirichlet'][15] > res['dirichlet'][3]
    assert res['limit_verdict'] == 'no-evidence'


def test_truncation_flags_unreliable_powers():
    res = power_norm_diagnostics(identity(), n_max=16, config={'N': 8})
    assert not res['reliable'][-1]
    assert res['n_reliable'] < 16


def test_outer_powers_use_log_modulus():
    logmod = BoundaryGrid.from_function(lambda t: -0.4 - 0.2 * np.cos(t), 128)
    phi = Outer(logmod)
    powers = dict(iterate_powers(phi, 2, 40))
    np.testing.assert_allclose(powers[2].coeffs, multiply(phi.series, phi.series, 40).coeffs, atol=1e-10)


def test_chain_bound_and_table():
    diag = PowerNormDiagnostics({'N_MAX': 16, 'N': 64, 'CHAIN_GAPS': [0.5, 0.25]})
    res = diag.evaluate(Scale(0.5))
    assert res['chain_bound'].shape == (2,)
    assert np.all(np.isfinite(res['chain_bound']))
    rows = diag.table_rows(res)
    assert len(rows) == 16
    assert rows[0][0] == 1
    assert rows[0][1] == pytest.approx(0.25)
