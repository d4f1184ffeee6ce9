import logging
from dataclasses import dataclass, field

import numpy as np

from ._base_diagnostic import _BaseDiagnostic
from .power_norms import iterate_powers
from ..boundary_sets import layer_cake_integral
from ..quadrature import DiscRule, integrate_disc, panel_trend
from ..series import BoundaryGrid
from ..spaces import dirichlet_integral, hardy_norm_sq
from .. import utils

logger = logging.getLogger(__name__)


@dataclass
class HSReport:
    space: str
    integral_value: float
    integral_partials: np.ndarray
    series_value: float
    series_partials: np.ndarray
    verdict: str
    layercake_value: float = float('nan')
    extra: dict = field(default_factory=dict)


def _verdict_from_trends(*verdicts):
    if 'converging' in verdicts and 'diverging' not in verdicts:
        return 'finite-evidence'
    if 'diverging' in verdicts and 'converging' not in verdicts:
        return 'infinite-evidence'
    return 'inconclusive'


def _dyadic_partials(partials):
    """Partial sums at n = 1, 2, 4, ..."""
    partials = np.asarray(partials)
    idx = 2 ** np.arange(int(np.log2(max(partials.size, 1))) + 1) - 1
    return partials[idx[idx < partials.size]]


class _HSIntegrand:
    def __init__(self, phi, exponent):
        self.phi = phi
        self.exponent = exponent

    def ring(self, radius, M):
        w, dw = self.phi.ring(radius, M)
        with np.errstate(divide='ignore'):
            return np.abs(dw) ** 2 / (1.0 - np.abs(w) ** 2) ** self.exponent


def _radial_panel_partials(phi, exponent, rule, levels):
    """Cumulative integrals over the dyadic radial panels of the rule."""
    try:
        contributions = np.real(integrate_disc(_HSIntegrand(phi, exponent), rule, per_node=True))
    except utils.NumericError as err:
        logger.warning('disc integral failed: %s', err)
        return None
    breaks = 1.0 - 2.0 ** -np.arange(1, levels + 1)
    panel = np.searchsorted(breaks, rule.radial_nodes)
    return np.cumsum(np.bincount(panel, weights=contributions, minlength=levels + 1))


class HSHardy(_BaseDiagnostic):
    """Hilbert-Schmidt test on H^2: sum ||phi^n||^2 = (1/2pi) int dzeta / (1 - |phi|^2)"""

    @staticmethod
    def get_default_config():
        """Default class config values"""
        default_config = {
            'M': 4096,  # Boundary grid size.
            'N': 2048,  # Truncation order of the series of phi.
            'N_MAX': 4096,  # Number of powers in the series route.
            'CONTACT_TOL': 1e-9,  # |phi|^2 >= 1 - CONTACT_TOL counts as boundary contact.
            'CONTACT_FRACTION': 1e-3,  # Contact on this share of the grid short-cuts to infinite-evidence.
            'LEVELS': 20,  # Level sets s = 1 - 2^-k, k <= LEVELS, for the level-set form.
            'PRINT_CONFIG': False,  # Whether to print the config information on init. Default: False.
        }
        return default_config

    def __init__(self, config=None):
        super().__init__()
        self.float_fields = ['integral', 'series', 'layercake', 'levelset', 'contact_fraction']
        self.string_fields = ['series_trend', 'levelset_trend', 'verdict']
        self.array_fields = ['integral_partials', 'series_partials', 'levelset_partials']
        self.fields = self.float_fields + self.string_fields + self.array_fields
        self.summary_fields = ['verdict', 'integral', 'series', 'layercake']
        self.table_fields = ['series_partials']

        self.config = utils.init_config(config, self.get_default_config(), self.get_name())
        self.M = int(self.config['M'])

    def _series_route(self, phi):
        bound = phi.bound
        total = 1.0
        partials = [total]
        for n, f in iterate_powers(phi, int(self.config['N_MAX']), int(self.config['N'])):
            term = hardy_norm_sq(f)
            total += term
            partials.append(total)
            if bound < 1.0 and term < 1e-17 * total:
                break
        tail = bound ** (2 * len(partials)) / (1.0 - bound ** 2) if bound < 1.0 else float('inf')
        return np.asarray(partials), tail

    def _levelset_route(self, modulus):
        k = np.arange(int(self.config['LEVELS']) + 1)
        u = k * np.log(2.0)
        measures = np.array([np.count_nonzero(modulus >= 1.0 - 2.0 ** -kk) for kk in k]) * 2.0 * np.pi / modulus.size
        integrand = measures * np.exp(u)
        return np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(u))

    def evaluate(self, phi):
        """Calculates all routes of the H^2 Hilbert-Schmidt test for one symbol"""
        modulus = np.abs(phi.boundary_values(self.M))
        mod2 = modulus ** 2
        contact = float(np.mean(mod2 >= 1.0 - float(self.config['CONTACT_TOL'])))
        res = {'contact_fraction': contact}
        if contact >= float(self.config['CONTACT_FRACTION']):
            inf = float('inf')
            res.update(integral=inf, series=inf, layercake=inf, levelset=inf,
                       integral_partials=np.array([inf]), series_partials=np.array([inf]),
                       levelset_partials=np.array([inf]), series_trend='diverging',
                       levelset_trend='diverging', verdict='infinite-evidence')
            return res
        v = 1.0 / (1.0 - mod2)
        res['integral'] = float(np.mean(v))
        res['integral_partials'] = np.array([np.mean(v[::step]) for step in (8, 4, 2, 1)])
        res['layercake'] = 1.0 + layer_cake_integral(BoundaryGrid(v), 1.0) / (2.0 * np.pi)
        partials, tail = self._series_route(phi)
        res['series_partials'] = partials
        res['series'] = float(partials[-1])
        res['series_tail'] = tail
        res['series_trend'] = 'converging' if np.isfinite(tail) and tail <= 1e-12 * partials[-1] \
            else panel_trend(_dyadic_partials(partials))['verdict']
        res['levelset_partials'] = self._levelset_route(modulus)
        res['levelset'] = float(res['levelset_partials'][-1])
        res['levelset_trend'] = panel_trend(res['levelset_partials'])['verdict']
        if phi.bound < 1.0 - 1e-12:
            res['verdict'] = 'finite-evidence'
        else:
            res['verdict'] = _verdict_from_trends(res['series_trend'], res['levelset_trend'])
        return res


class HSDirichlet(_BaseDiagnostic):
    """Hilbert-Schmidt test on D: int |phi'|^2 / (1 - |phi|^2)^2 dA = sum D(phi^n) / n"""

    @staticmethod
    def get_default_config():
        """Default class config values"""
        default_config = {
            'N': 2048,  # Truncation order of the series of phi.
            'N_MAX': 4096,  # Number of powers in the series route.
            'LEVELS': 20,  # Dyadic radial panels 1 - 2^-k of the disc rule.
            'NODES_PER_PANEL': 16,  # Gauss nodes per radial panel.
            'ANGULAR_SIZE': 512,  # Angular nodes of the disc rule.
            'PRINT_CONFIG': False,  # Whether to print the config information on init. Default: False.
        }
        return default_config

    alpha = 0.0

    def __init__(self, config=None):
        super().__init__()
        self.float_fields = ['integral', 'series', 'series_tail', 'relative_gap']
        self.string_fields = ['integral_trend', 'series_trend', 'verdict']
        self.array_fields = ['integral_partials', 'series_partials']
        self.fields = self.float_fields + self.string_fields + self.array_fields
        self.summary_fields = ['verdict', 'integral', 'series', 'relative_gap']
        self.table_fields = ['integral_partials']

        self.config = utils.init_config(config, self.get_default_config(), self.get_name())
        self.levels = int(self.config['LEVELS'])
        self.rule = DiscRule.dyadic(self.alpha, self.levels, int(self.config['NODES_PER_PANEL']),
                                    int(self.config['ANGULAR_SIZE']))

    def _power_term(self, n, f):
        return dirichlet_integral(f) / n

    def _series_route(self, phi):
        bound = phi.bound
        total = 0.0
        partials = []
        first = None
        for n, f in iterate_powers(phi, int(self.config['N_MAX']), int(self.config['N'])):
            term = self._power_term(n, f)
            first = term if first is None else first
            total += term
            partials.append(total)
            if bound < 1.0 and n >= 8 and term < 1e-17 * max(total, 1e-300):
                break
        K = len(partials)
        tail = first * bound ** (2 * K) / (1.0 - bound ** 2) if bound < 1.0 else float('inf')
        return np.asarray(partials), tail

    def evaluate(self, phi):
        """Calculates the area-integral and power-series routes for one symbol"""
        res = {}
        partials = _radial_panel_partials(phi, 2.0 + self.alpha, self.rule, self.levels)
        if partials is None:
            res['integral_partials'] = np.array([float('nan')])
            res['integral_trend'] = 'inconclusive'
        else:
            res['integral_partials'] = partials
            res['integral_trend'] = panel_trend(partials)['verdict']
        res['integral'] = float(res['integral_partials'][-1])
        series_partials, tail = self._series_route(phi)
        res['series_partials'] = series_partials
        res['series'] = float(series_partials[-1])
        res['series_tail'] = float(tail)
        res['series_trend'] = 'converging' if np.isfinite(tail) and tail <= 1e-9 * max(res['series'], 1e-300) \
            else panel_trend(_dyadic_partials(series_partials))['verdict']
        scale = max(abs(res['integral']), abs(res['series']), 1e-300)
        res['relative_gap'] = float(abs(res['integral'] - res['series']) / scale)
        if phi.bound < 1.0 - 1e-12:
            res['verdict'] = 'finite-evidence'
        else:
            res['verdict'] = {'converging': 'finite-evidence',
                              'diverging': 'infinite-evidence'}.get(res['integral_trend'], 'inconclusive')
        return res


class HSDAlpha(HSDirichlet):
    """Hilbert-Schmidt test on D_alpha: the two routes are comparable, not equal"""

    @staticmethod
    def get_default_config():
        """Default class config values"""
        default_config = HSDirichlet.get_default_config()
        default_config.update({
            'ALPHA': 0.5,  # Weight exponent alpha in (0, 1).
            'C': utils.DEFAULTS['RATIO_C'],  # Two-sided constant for the ratio of the routes.
        })
        return default_config

    def __init__(self, config=None):
        merged = utils.init_config(config, self.get_default_config())
        self.alpha = float(merged['ALPHA'])
        if not 0.0 < self.alpha < 1.0:
            raise utils.DomainError('alpha must lie in (0, 1), got %r' % (self.alpha,))
        super().__init__(merged)
        self.float_fields = self.float_fields + ['ratio']
        self.string_fields = self.string_fields + ['ratio_verdict']
        self.fields = self.float_fields + self.string_fields + self.array_fields
        self.summary_fields = ['verdict', 'integral', 'series', 'ratio', 'ratio_verdict']

    def _power_term(self, n, f):
        k = np.arange(f.truncation_order + 1)
        return float(np.sum(k ** (1.0 - self.alpha) * np.abs(f.coeffs) ** 2)) / n ** (1.0 - self.alpha)

    def evaluate(self, phi):
        res = super().evaluate(phi)
        res['ratio'] = res['integral'] / res['series'] if res['series'] > 0.0 else float('nan')
        c = float(self.config['C'])
        if not np.isfinite(res['ratio']):
            res['ratio_verdict'] = 'not-applicable'
        else:
            res['ratio_verdict'] = 'within' if 1.0 / c <= res['ratio'] <= c else 'outside'
        return res


def _report(space, res):
    return HSReport(space, res['integral'], res['integral_partials'], res['series'], res['series_partials'],
                    res['verdict'], res.get('layercake', float('nan')), res)


def hs_hardy(phi, config=None):
    return _report('H2', HSHardy(config).evaluate(phi))


def hs_dirichlet(phi, n_max=None, config=None):
    config = dict(config or {})
    if n_max is not None:
        config['N_MAX'] = n_max
    return _report('D', HSDirichlet(config).evaluate(phi))


def hs_dalpha(phi, alpha, config=None):
    config = dict(config or {})
    config['ALPHA'] = alpha
    return _report('D_alpha(%g)' % alpha, HSDAlpha(config).evaluate(phi))
