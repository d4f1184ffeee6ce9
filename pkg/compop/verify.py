"""Named bundles of end-to-end checks with pass / fail / inconclusive rows."""
import logging

import numpy as np
from tqdm.auto import tqdm

from . import capacity as cap
from .boundary_sets import ArcSet, WeightFn, cantor_generator
from .constructions import (build_peak_symbol, build_rec_pipeline, check_lemma_norme, check_theorem_thnorme,
                            outer_power_identity, parse_growth)
from .diagnostics import carleson_sweep, compactness_sweep, hs_dirichlet, hs_hardy, power_norm_diagnostics
from .series import PowerSeries
from .spaces import SpaceParams, kernel_estimate_check, reproducing_check
from . import spaces
from .symbols import Blaschke, Power, Scale, identity
from .utils import DEFAULTS, CompOpException

logger = logging.getLogger(__name__)

PASS, FAIL, INCONCLUSIVE = 'pass', 'fail', 'inconclusive'


def _row(criterion, passed, value, bound, sequence=None):
    status = INCONCLUSIVE if passed is None else (PASS if passed else FAIL)
    return {'criterion': criterion, 'status': status, 'value': value, 'bound': bound,
            'sequence': [] if sequence is None else np.asarray(sequence).ravel().tolist()}


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def check_hs_dirichlet_scale(radii=(0.3, 0.6, 0.9), tol=1e-6):
    rows = []
    for r in radii:
        exact = r * r / (1.0 - r * r)
        rep = hs_dirichlet(Scale(r))
        err = max(_rel(rep.integral_value, exact), _rel(rep.series_value, exact))
        rows.append(_row('HS on D, Scale(%g): both routes = r^2/(1-r^2)' % r, err <= tol, err, tol,
                         [rep.integral_value, rep.series_value, exact]))
    return rows


def check_hs_hardy_scale(radii=(0.3, 0.6, 0.9), tol=1e-6):
    rows = []
    for r in radii:
        exact = 1.0 / (1.0 - r * r)
        rep = hs_hardy(Scale(r))
        err = max(_rel(rep.integral_value, exact), _rel(rep.series_value, exact), _rel(rep.layercake_value, exact))
        rows.append(_row('HS on H2, Scale(%g): three routes = 1/(1-r^2)' % r, err <= tol, err, tol,
                         [rep.integral_value, rep.series_value, rep.layercake_value, exact]))
    return rows


def check_reproducing(rng, n_points=50, degree=8, tol=1e-7):
    rows = []
    for alpha in (0.0, 1.0):
        worst = 0.0
        for _ in range(n_points):
            coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
            z = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            worst = max(worst, reproducing_check(PowerSeries(coeffs), alpha, z))
        rows.append(_row('reproducing formula, alpha = %g' % alpha, worst <= tol, worst, tol))
    return rows


def check_power_sequence(r=0.9, n_max=100, tol=1e-10):
    res = power_norm_diagnostics(Scale(r), n_max=n_max)
    n = np.arange(1, n_max + 1)
    exact = n * r ** (2 * n)
    err = float(np.max(np.abs(res['dirichlet'] - exact) / np.maximum(1.0, exact)))
    return [_row('D((%gz)^n) = n r^2n, n <= %i' % (r, n_max), err <= tol, err, tol, res['dirichlet'][:8])]


def check_compactness_verdicts():
    rows = []
    for name, phi, expected in (('Scale(0.5)', Scale(0.5), 'compact-evidence'),
                                ('identity', identity(), 'not-compact-evidence'),
                                ('Blaschke(0.5)', Blaschke([0.5]), 'not-compact-evidence')):
        res = compactness_sweep(phi)
        verdict = res['verdict']
        passed = None if verdict == 'inconclusive' else verdict == expected
        rows.append(_row('compactness sweep, %s: %s' % (name, expected), passed, verdict, expected, res['Q']))
    return rows


def check_capacity_engine():
    rows = []
    full = cap.capacity(ArcSet.full(), 0.0, 1024)
    rows.append(_row('full circle: energy <= 1e-6', full.energy <= 1e-6, full.energy, 1e-6))

    seq = cap.capacity_sequence(ArcSet.points([0.0]), 0.0, (64, 128, 256, 512, 1024))
    rows.append(_row('single point: capacity sequence decaying', seq['trend'] == 'decaying', seq['trend'],
                     'decaying', seq['values']))
    # energy = log m + const, so the 0.05 level needs m near exp(20 - const)
    slope = float(np.polyfit(np.log(seq['budgets']), seq['energies'], 1)[0])
    rows.append(_row('single point: energy grows like log m', abs(slope - 1.0) <= 1e-3, slope, 1.0, seq['energies']))
    # a point carries one cell of half-width eps = 2pi/(16m), i.e. an arc of length 2 eps
    eps = 2.0 * np.pi / (16.0 * 1024)
    arc_value = 1.0 / -np.log(np.sin(eps / 2.0))
    err = _rel(seq['values'][-1], arc_value)
    rows.append(_row('single point at m = 1024: capacity of its %.3g-arc cell' % (2 * eps), err <= 0.02, err,
                     0.02, [seq['values'][-1], arc_value]))

    arc = ArcSet.arc(0.0, np.pi / 2.0)
    value = cap.capacity(arc, 0.0, 256).value
    oracle = cap.qp_oracle(arc, 512)
    err = _rel(value, oracle)
    rows.append(_row('arc pi/2: capacity within 2% of the QP oracle', err <= 0.02, err, 0.02, [value, oracle]))

    mu = cap.place_atoms(arc, 128)
    e0 = cap.energy(mu)
    e1 = cap.energy(mu.rotated(1.2345))
    err = _rel(e1, e0)
    rows.append(_row('energy rotation invariance', err <= 1e-12, err, 1e-12))
    return rows


SUITE_IDENTITIES = (check_hs_dirichlet_scale, check_hs_hardy_scale, check_reproducing, check_power_sequence,
                    check_compactness_verdicts, check_capacity_engine)


def check_test_function_asymptotics(C):
    rows = []
    gaps = np.geomspace(1e-3, 0.5, 10)[::-1]
    # (3, 0, 1) tends to 8 Gamma(7) / Gamma(9/2)^2 ~ 42.6, outside the default C = 20
    for p, alpha, beta, floor in ((2, 0, 0, 1.0), (2, 1, 0, 1.0), (3, 0, 1, 50.0)):
        c = max(C, floor)
        res = spaces.test_function_asymptotics(SpaceParams(p, alpha, beta), gaps, c)
        rows.append(_row('test-function norm ratio, (p, alpha, beta) = (%g, %g, %g)' % (p, alpha, beta),
                         res['passed'], [res['min_ratio'], res['max_ratio']], c, res['ratios']))
    return rows


def check_kernel_estimate(C):
    rows = []
    radii = np.array([0.0, 0.5, 0.9, 0.99, 0.999])
    points = radii * np.exp(1j * np.linspace(0.0, 2.0 * np.pi, radii.size, endpoint=False))
    for c, d in ((0, 1), (0, 2), (1, 2)):
        res = kernel_estimate_check(c, d, points, C)
        rows.append(_row('kernel estimate, (c, d) = (%g, %g)' % (c, d), res['passed'],
                         [res['min_ratio'], res['max_ratio']], C, res['ratios']))
    return rows


def check_weak_type(rng, n_pairs=50, lam_modulus=0.9, N=256, M=4096, m=64):
    violations = 0
    slacks = []
    for _ in range(n_pairs):
        lam = lam_modulus * np.exp(2j * np.pi * rng.uniform())
        A = rng.uniform(0.02, 0.08)
        f = spaces.test_function(lam).series(N)
        f = PowerSeries(A * f.coeffs)
        low = 4.0 * (abs(f.coeffs[0]) ** 2 + spaces.dirichlet_integral(f))
        high = A / (1.0 - lam_modulus)
        t = rng.uniform(low, max(high, low))
        res = cap.weak_type_check(f, t, M, m)
        violations += not res['passed']
        slacks.append(res['slack'])
    return [_row('weak-type capacity inequality on %i pairs' % n_pairs, violations == 0, violations, 0, slacks)]


def check_carleson():
    ident = carleson_sweep(identity())
    q = ident['quotient'][-4:]
    spread = float(q.max() / q.min() - 1.0)
    rows = [_row('Carleson quotient, identity: flat within 10%', spread <= 0.1, spread, 0.1, ident['quotient'])]
    square = carleson_sweep(Power(2))
    ratio = square['quotient'] / (2.0 * ident['quotient'])
    worst = float(np.max(np.maximum(ratio, 1.0 / ratio)))
    rows.append(_row('Carleson quotient, Power(2) against twice the identity', worst <= 2.1, worst, 2.1, ratio))
    small = carleson_sweep(Scale(0.5))
    last = float(small['quotient'][-1])
    rows.append(_row('Carleson quotient, Scale(0.5) -> 0', last <= 1e-3 * float(ident['quotient'][-1]), last,
                     1e-3 * float(ident['quotient'][-1]), small['quotient']))
    return rows


def check_outer_families(C):
    point = ArcSet.points([0.0])
    cantor = cantor_generator(1.0 / 3.0, 6)
    rows = []
    for name, E, w in (('log^-2, point', point, WeightFn.log_power(2.0)),
                       ('log^-1, Cantor(1/3, 6)', cantor, WeightFn.log_power(1.0)),
                       ('constant, point', point, WeightFn.constant(1.0))):
        res = check_lemma_norme(E, w, {'C': C, 'M': 2 ** 14})
        rows.append(_row('Dirichlet integral of f_{w,E} against its boundary form, %s' % name, res['passed'],
                         [res['lhs'], res['rhs']], C, res['ratios']))
    return rows


SUITE_ASYMPTOTICS = (check_test_function_asymptotics, check_kernel_estimate, check_weak_type, check_carleson,
                     check_outer_families)


def check_peak():
    rows = []
    cantor = cantor_generator(1.0 / 3.0, 8).midpoints()
    for name, E in (('point', ArcSet.points([0.0])), ('two points', ArcSet.points([0.0, np.pi])),
                    ('Cantor(1/3, 8) midpoints', cantor)):
        pc = build_peak_symbol(E)
        rows.append(_row('peak %s: certificate dominates the measured integral' % name, pc.certificate_holds,
                         pc.measured, pc.certificate))
        err = _rel(pc.g_norm_sq, pc.g_norm_sq_exact)
        rows.append(_row('peak %s: read-back ||g||^2 within 5%% of the arc integral' % name, err <= 0.05, err, 0.05,
                         pc.tau_partials[-8:]))
        measures = pc.contact['measures']
        limit = 2.0 * max(E.n_components, 1) * pc.contact['resolution']
        ok = bool(np.all(np.diff(measures) <= 0.0) and measures[-1] <= limit)
        rows.append(_row('peak %s: |E_phi(1 - eps)| shrinks to grid resolution' % name, ok, measures[-1], limit,
                         measures))
    return rows


def check_outer_constructions():
    point = ArcSet.points([0.0])
    gaps = outer_power_identity(point, WeightFn.log_power(2.0), M=2 ** 12)
    worst = max(gaps.values())
    rows = [_row('outer power identity |f^n| = |f_{nw}|, n <= 16', worst <= 1e-9, worst, 1e-9)]
    for name, w, expected in (('log^-2', WeightFn.log_power(2.0), 'finite'),
                              ('t', WeightFn.linear(1.0), 'infinite'),
                              ('constant', WeightFn.constant(1.0), 'finite')):
        res = check_theorem_thnorme(point, w)
        passed = None if 'inconclusive' in (res['integral_verdict'], res['hs_verdict']) else (
            res['agree'] and res['hs_verdict'] == expected)
        rows.append(_row('tube integral and HS on D agree, w = %s, point' % name, passed,
                         [res['integral_verdict'], res['hs_verdict']], expected, res['integral_partials']))
    return rows


def check_capacity_integrals():
    rows = []
    for name, phi, expected in (('Scale(0.4)', Scale(0.4), 'converging'),
                                ('Blaschke(0.5)', Blaschke([0.5]), 'diverging')):
        res = cap.capacity_integral(phi, 0.0, levels=12, m=32, M=4096)
        verdict = res['verdict']
        passed = None if verdict == 'inconclusive' else verdict == expected
        rows.append(_row('capacity integral, %s: %s' % (name, expected), passed, verdict, expected,
                         res['partials']))
    return rows


def check_rec_pipeline():
    config = {'M': 2 ** 12, 'ATOMS': 32, 'PSI_RATIO': 1.25, 'HS_LEVELS': 10, 'HS_ANGULAR_SIZE': 1024}
    rec = build_rec_pipeline(ArcSet.points([0.0]), parse_growth('log'), config)
    rep = rec.report
    rows = [
        _row('pipeline (a): D(f) partials converge or carry a divergence flag',
             rep['dirichlet_verdict'] == 'converging' or rep['dirichlet_divergence_flag'],
             rep['dirichlet_verdict'], 'converging', rep['dirichlet_partials']),
        _row('pipeline (b): finite HS evidence on D', rep['hs_verdict'] == 'finite-evidence'
             if rep['hs_verdict'] != 'inconclusive' else None, rep['hs_verdict'], 'finite-evidence',
             rep['hs_partials']),
        _row('pipeline (b): |phi\'|^2/(1-|phi|^2)^2 <= (e^2/2)|f\'|^2 node by node', rep['chain_holds'],
             rep['chain_holds'], True, rep['chain_partials']),
        _row('pipeline (c): h-weighted capacity partials diverge', rep['weighted_capacity_verdict'] == 'diverging'
             if rep['weighted_capacity_verdict'] != 'inconclusive' else None, rep['weighted_capacity_verdict'],
             'diverging', rep['weighted_capacity_partials']),
        _row('pipeline: {c eta(d) >= log 1/(1-s)} inside E_phi(s) on the grid', rep['level_inclusion_holds'],
             rep['level_inclusion_holds'], True),
    ]
    return rows


SUITE_CONSTRUCTIONS = (check_peak, check_outer_constructions, check_capacity_integrals, check_rec_pipeline)

SUITES = {'identities': SUITE_IDENTITIES, 'asymptotics': SUITE_ASYMPTOTICS, 'constructions': SUITE_CONSTRUCTIONS}


def run_suite(name, seed=0, C=None, progress=False):
    """Runs every check of the named suite; a check that raises is recorded as failed."""
    if name not in SUITES:
        raise CompOpException('unknown suite %r, expected one of %s' % (name, sorted(SUITES)))
    C = DEFAULTS['RATIO_C'] if C is None else float(C)
    rng = np.random.default_rng(seed)
    rows = []
    for check in tqdm(SUITES[name], desc='suite %s' % name, disable=not progress):
        kwargs = {}
        code = check.__code__.co_varnames[:check.__code__.co_argcount]
        if 'rng' in code:
            kwargs['rng'] = rng
        if 'C' in code:
            kwargs['C'] = C
        try:
            rows.extend(check(**kwargs))
        except CompOpException as err:
            logger.warning('%s raised %s', check.__name__, err)
            rows.append(_row(check.__name__, False, repr(err), None))
    for row in rows:
        row['suite'] = name
    return rows
