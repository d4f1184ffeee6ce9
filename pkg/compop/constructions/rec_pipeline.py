"""Symbols showing that the capacity condition for Hilbert-Schmidt operators on D is sharp.

Given E with capacity zero and h -> infinity, a decreasing step function psi
with int psi dx^2 < inf and int psi k dx^2 = inf (k(x) = h(e^x)) is built;
eta(t) = psi^-1(cap(E_t)) is extended to f = c eta(d) + i conjugate, and
phi = exp(-e^(-f)). phi is Hilbert-Schmidt on D while the h-weighted
capacity integral over its level sets diverges.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre
from tqdm.auto import tqdm

from ..boundary_sets import distance_grid, level_mask, tube
from ..capacity import capacity, capacity_integral, capacity_sequence
from ..diagnostics.hilbert_schmidt import _HSIntegrand
from ..quadrature import DiscRule, integrate_disc, panel_trend
from ..series import BoundaryGrid, analytic_completion, completion_boundary_values, harmonic_conjugate
from ..symbols import Exp2
from ..utils import PreconditionError, init_config

logger = logging.getLogger(__name__)

# |phi'|^2 / (1 - |phi|^2)^2 <= e^2/2 |f'|^2 where Re f >= 0 and |Im f| < pi/4
CHAIN_CONSTANT = 0.5 * np.e ** 2


def get_default_config():
    """Default pipeline config values"""
    return {
        'M': 2 ** 14,  # Boundary grid size.
        'N': None,  # Truncation order of f; None uses M/2 - 1.
        'ATOMS': 64,  # Atom budget of each capacity call.
        'PSI_RATIO': 2.0,  # psi block j carries mass PSI_RATIO^-j where k >= PSI_RATIO^j.
        'X_MAX': 60.0,  # Sampled range [0, X_MAX] of x for k(x) = h(e^x).
        'X_SAMPLES': 6001,  # Samples of k on [0, X_MAX].
        'MIN_BLOCKS': 3,  # Fewest psi blocks accepted as evidence that h -> infinity.
        'T_MIN': 1e-10,  # Smallest tube radius.
        'T_POINTS': 40,  # Geometric t-grid points on [T_MIN, pi].
        'IMAG_MARGIN': 0.9,  # |Im f| is scaled to at most IMAG_MARGIN * pi/4.
        'CHECK_CAPACITY_ZERO': True,  # Require a decaying capacity sequence for E.
        'CAPACITY_BUDGETS': (16, 32, 64, 128),  # Atom budgets of that check.
        'HS_LEVELS': 12,  # Dyadic radial panels of the Hilbert-Schmidt area integral.
        'HS_ANGULAR_SIZE': 2 ** 12,  # Angular nodes of that integral.
        'UNWEIGHTED': False,  # Also run capacity_integral on phi (slow).
        'PROGRESS': False,  # Show tqdm progress bars.
        'PRINT_CONFIG': False,  # Whether to print the config information on init. Default: False.
    }


@dataclass(eq=False)
class PsiFunction:
    """Decreasing step function psi = values[j] on [edges[j], edges[j+1])."""
    edges: np.ndarray
    values: np.ndarray
    masses: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = np.clip(np.searchsorted(self.edges, x, side='right') - 1, 0, self.values.size - 1)
        return self.values[j]

    def inverse(self, y):
        """sup{x : psi(x) >= y}, capped to the constructed range."""
        y = np.asarray(y, dtype=float)
        # values decrease, so count the blocks with psi_j >= y
        count = np.searchsorted(-self.values, -y, side='right')
        return np.where(count == 0, self.edges[0], self.edges[np.minimum(count, self.values.size)])


def build_psi(h, ratio=2.0, x_max=60.0, samples=6001, min_blocks=3):
    """Blocks [x_j, x_{j+1}) with k >= ratio^j beyond x_j and int_block psi dx^2 = ratio^-j."""
    x = np.linspace(0.0, x_max, samples)
    k = np.array([h(v) for v in np.exp(x)], dtype=float)
    # k_low(x) = inf over y >= x of k(y)
    k_low = np.minimum.accumulate(k[::-1])[::-1]
    thresholds = []
    j = 1
    while True:
        hit = np.flatnonzero(k_low >= ratio ** j)
        if hit.size == 0:
            break
        thresholds.append(x[hit[0]])
        j += 1
    if len(thresholds) < min_blocks + 1:
        raise PreconditionError('h does not grow past %g^%i on [1, e^%g]; psi needs h -> infinity'
                                % (ratio, min_blocks + 1, x_max))
    edges = [max(thresholds[0], 1e-12)]
    values = []
    masses = []
    for j, target in enumerate(thresholds[1:], start=1):
        start = edges[-1]
        end = max(target, start * (1.0 + 1e-9))
        mass = ratio ** -j
        value = mass / (end ** 2 - start ** 2)
        if values and value > values[-1]:
            # cap to keep psi decreasing and stretch the block to keep its mass
            value = values[-1]
            end = np.sqrt(start ** 2 + mass / value)
        edges.append(end)
        values.append(value)
        masses.append(mass)
    return PsiFunction(np.asarray(edges), np.asarray(values), np.asarray(masses)), (x, k)


def _psi_partials(psi, h, nodes=16):
    """Block partials of int psi dx^2 and int psi k dx^2."""
    xg, wg = roots_legendre(nodes)
    plain, weighted = [], []
    for (a, b), v in zip(zip(psi.edges[:-1], psi.edges[1:]), psi.values):
        s = 0.5 * (a * a + b * b) + 0.5 * (b * b - a * a) * xg
        kk = np.array([h(np.exp(np.sqrt(si))) for si in s])
        plain.append(v * (b * b - a * a))
        weighted.append(v * 0.5 * (b * b - a * a) * float(np.sum(wg * kk)))
    return np.cumsum(plain), np.cumsum(weighted)


@dataclass(eq=False)
class RecPipeline:
    E: object
    h: object
    psi: PsiFunction
    t_grid: np.ndarray
    caps: np.ndarray
    eta: np.ndarray
    scale: float
    f_candidate: object
    phi: Exp2
    report: dict = field(default_factory=dict)

    def k(self, x):
        return self.h(np.exp(x))

    def to_json(self):
        return {'symbol': self.phi.to_json(),
                'provenance': {'E': self.E.to_json(), 'psi_edges': self.psi.edges.tolist(),
                               'psi_values': self.psi.values.tolist(), 't_grid': self.t_grid.tolist(),
                               'capacities': self.caps.tolist(), 'eta': self.eta.tolist(), 'scale': self.scale}}


def build_rec_pipeline(E, h, config=None):
    config = init_config(config, get_default_config(), 'RecPipeline')
    M = int(config['M'])
    progress = bool(config['PROGRESS'])
    if E.is_empty:
        raise PreconditionError('pipeline needs a nonempty set')
    if config['CHECK_CAPACITY_ZERO']:
        seq = capacity_sequence(E, 0.0, tuple(config['CAPACITY_BUDGETS']))
        if seq['trend'] != 'decaying':
            raise PreconditionError('no capacity-zero evidence for E: capacity sequence %s is %s'
                                    % (np.round(seq['values'], 6).tolist(), seq['trend']))
    psi, _ = build_psi(h, float(config['PSI_RATIO']), float(config['X_MAX']), int(config['X_SAMPLES']),
                       int(config['MIN_BLOCKS']))
    plain, weighted = _psi_partials(psi, h)

    t_grid = np.geomspace(float(config['T_MIN']), np.pi, int(config['T_POINTS']))
    caps = np.array([capacity(tube(E, t), 0.0, int(config['ATOMS'])).value
                     for t in tqdm(t_grid, desc='tube capacities', disable=not progress)])
    eta = psi.inverse(caps)

    d = distance_grid(E, M)
    # eta(d) by interpolation in log t; points of E take eta(T_MIN)
    with np.errstate(divide='ignore'):
        log_d = np.log(np.maximum(d, t_grid[0]))
    eta_d = np.interp(log_d, np.log(t_grid), eta)
    conj = np.real(harmonic_conjugate(BoundaryGrid(eta_d)).samples)
    scale = min(1.0, float(config['IMAG_MARGIN']) * (np.pi / 4.0) / max(float(np.max(np.abs(conj))), 1e-300))
    u = BoundaryGrid(scale * eta_d)
    N = M // 2 - 1 if config['N'] is None else int(config['N'])
    f = analytic_completion(u, N)
    phi = Exp2(f, completion_boundary_values(u))

    report = {'psi_plain_partials': plain, 'psi_plain_verdict': panel_trend(plain)['verdict'],
              'psi_weighted_partials': weighted, 'psi_weighted_verdict': panel_trend(weighted)['verdict'],
              'scale': scale, 'max_imag': phi.max_imag}

    # (a) D(f) partials at dyadic truncations
    n = np.arange(f.truncation_order + 1)
    dsum = np.cumsum(n * np.abs(f.coeffs) ** 2)
    idx = 2 ** np.arange(int(np.log2(f.truncation_order)) + 1)
    report['dirichlet_partials'] = dsum[idx]
    report['dirichlet_verdict'] = panel_trend(dsum[idx])['verdict']
    report['dirichlet_divergence_flag'] = report['dirichlet_verdict'] == 'diverging'

    # (b) Hilbert-Schmidt integral on D against the chain bound, node by node on one rule
    levels = int(config['HS_LEVELS'])
    rule = DiscRule.dyadic(0.0, levels, 16, int(config['HS_ANGULAR_SIZE']))
    hs_nodes = np.real(integrate_disc(_HSIntegrand(phi, 2.0), rule, per_node=True))
    chain_nodes = CHAIN_CONSTANT * np.real(integrate_disc(_FPrime(f), rule, per_node=True))
    breaks = 1.0 - 2.0 ** -np.arange(1, levels + 1)
    panel = np.searchsorted(breaks, rule.radial_nodes)
    hs_partials = np.cumsum(np.bincount(panel, weights=hs_nodes, minlength=levels + 1))
    chain_partials = np.cumsum(np.bincount(panel, weights=chain_nodes, minlength=levels + 1))
    report['hs_partials'] = hs_partials
    report['chain_partials'] = chain_partials
    report['chain_holds'] = bool(np.all(hs_nodes <= chain_nodes * (1.0 + 1e-9) + 1e-300))
    hs_trend = panel_trend(hs_partials)['verdict']
    report['hs_verdict'] = 'finite-evidence' if hs_trend == 'converging' or (
        report['chain_holds'] and panel_trend(chain_partials)['verdict'] == 'converging') else (
        'infinite-evidence' if hs_trend == 'diverging' else 'inconclusive')

    # (c) h-weighted capacity integral from below, over the psi blocks
    report.update(_weighted_capacity_partials(psi, h, caps, eta, eta_d, scale, phi,
                                              report['psi_weighted_verdict']))
    if config['UNWEIGHTED']:
        unweighted = capacity_integral(phi, 0.0, 'log', m=int(config['ATOMS']), M=M, progress=progress)
        report['unweighted_partials'] = unweighted['partials']
        report['unweighted_verdict'] = unweighted['verdict']
    return RecPipeline(E, h, psi, t_grid, caps, eta, scale, f, phi, report)


class _FPrime:
    def __init__(self, f):
        self.f = f

    def ring(self, radius, M):
        return np.abs(self.f.ring(radius, M)[1]) ** 2


def _weighted_capacity_partials(psi, h, caps, eta, eta_d, scale, phi, comparison_verdict, per_block=8,
                                domination_floor=0.1):
    """Lower partials of int cap(E_phi(s)) u h(e^u) du, u = log 1/(1 - s).

    E_phi(s) contains E_t* with t* the largest grid t where scale eta(t) >= u
    and E_t* is a proper subset of the circle, and capacity is monotone, so
    cap(E_t*) bounds the integrand from below. The grid only resolves u up to
    scale eta(T_MIN); past it the bound is carried by the comparison integrand
    psi(u / scale) u h(e^u), whose integral diverges with int psi k dx^2. The
    reported domination is the smallest ratio of the two over the resolved range.
    """
    proper = np.flatnonzero(np.isfinite(caps))
    if proper.size == 0:
        raise PreconditionError('every tube of E covers the circle; no finite capacity to integrate')
    u_max = scale * float(eta[proper].max())
    partials, comparison, total, total_cmp = [], [], 0.0, 0.0
    domination = np.inf
    inclusion = True
    for a, b in zip(psi.edges[:-1], psi.edges[1:]):
        lo, hi = scale * a, min(scale * b, u_max)
        if hi <= lo:
            break
        u = np.linspace(lo, hi, per_block + 1)
        values, reference = [], []
        for uu in u:
            ok = proper[scale * eta[proper] >= uu]
            weight = uu * h(np.exp(uu))
            values.append(caps[ok[-1]] * weight if ok.size else 0.0)
            reference.append(float(psi(uu / scale)) * weight)
        values, reference = np.asarray(values), np.asarray(reference)
        domination = min(domination, float(np.min(values / reference)))
        total += float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(u)))
        total_cmp += float(np.sum(0.5 * (reference[1:] + reference[:-1]) * np.diff(u)))
        partials.append(total)
        comparison.append(total_cmp)
        # grid check of {scale eta(d) >= u} inside E_phi(s) at the block's upper end
        s = -np.expm1(-hi)
        inside = scale * eta_d >= -np.log1p(-s)
        inclusion = inclusion and bool(np.all(level_mask(phi, s, eta_d.size)[inside]))
    partials = np.asarray(partials)
    verdict = panel_trend(partials)['verdict']
    if verdict == 'inconclusive' and partials.size and domination >= domination_floor:
        verdict = comparison_verdict
    return {'weighted_capacity_partials': partials,
            'weighted_capacity_comparison': np.asarray(comparison),
            'weighted_capacity_domination': float(domination) if partials.size else float('nan'),
            'weighted_capacity_verdict': verdict,
            'level_inclusion_holds': inclusion}


def parse_growth(text):
    """'log', 'loglog', 'power:a' for x^a, or 'bounded:c' for min(x, c)."""
    kind, _, args = text.strip().partition(':')
    kind = kind.lower()
    try:
        value = float(args) if args else 1.0
    except ValueError:
        raise PreconditionError('h: cannot parse %r' % text)
    if kind == 'log':
        return lambda x: max(1.0, float(np.log(x)))
    if kind == 'loglog':
        return lambda x: max(1.0, float(np.log(max(np.log(x), 1.0))) + 1.0)
    if kind == 'power':
        return lambda x: float(x) ** value
    if kind == 'bounded':
        return lambda x: min(max(float(x), 1.0), value)
    raise PreconditionError('h: cannot parse %r' % text)
