import logging

import numpy as np

from ._base_diagnostic import _BaseDiagnostic
from ..boundary_sets import contact_directions, merge_directions
from ..quadrature import DiscRule, integrate_disc
from ..spaces import SpaceParams, TestFunction
from .. import utils

logger = logging.getLogger(__name__)


class _ComposedTestDerivative:
    """|(F o phi)'|^p = |F'(phi)|^p |phi'|^p on the circles of a disc rule."""

    def __init__(self, F, phi, p):
        self.F = F
        self.phi = phi
        self.p = p

    def ring(self, radius, M):
        w, dw = self.phi.ring(radius, M)
        return np.abs(self.F.deriv(w) * dw) ** self.p


def sweep_quantity(phi, lam, params, rule=None):
    """Q(lambda) = (1 - |lambda|^2)^delta ||F_{lambda,beta} o phi||_{D^p_alpha}."""
    F = TestFunction(lam, params.beta)
    rule = DiscRule.graded(params.alpha, F.gap) if rule is None else rule
    value = np.real(integrate_disc(_ComposedTestDerivative(F, phi, params.p), rule))
    norm_p = abs(F(phi.eval(0.0))) ** params.p + value
    return float((1.0 - abs(lam) ** 2) ** params.delta * norm_p ** (1.0 / params.p))


class _TestFunctionSweep(_BaseDiagnostic):
    """Q(lambda) along rays and through the largest values of |phi*|, 1 - |lambda| halving to about 1e-3"""

    @staticmethod
    def get_default_config():
        """Default class config values"""
        default_config = {
            'SPACE': 'p=2,alpha=0,beta=0',  # Space D^p_alpha and test-function exponent beta.
            'GAPS': [2.0 ** -k for k in range(1, 11)],  # Values of 1 - |lambda|, decreasing.
            'RAYS': 4,  # Number of equally spaced directions of lambda; the worst one is kept.
            'CONTACT_DIRECTIONS': 4,  # Extra directions of lambda through the largest values of |phi*|.
            'CONTACT_GRID': 4096,  # Boundary grid on which those values are located.
            'PRINT_CONFIG': False,  # Whether to print the config information on init. Default: False.
        }
        return default_config

    def __init__(self, config=None):
        super().__init__()
        self.float_fields = ['Q_sup', 'Q_last', 'slope', 'delta']
        self.integer_fields = ['dropped']
        self.string_fields = ['trend', 'verdict']
        self.array_fields = ['gaps', 'Q']
        self.fields = self.float_fields + self.integer_fields + self.string_fields + self.array_fields
        self.summary_fields = ['verdict', 'Q_sup', 'Q_last', 'slope']
        self.table_fields = ['gaps', 'Q']

        self.config = utils.init_config(config, self.get_default_config(), self.get_name())
        space = self.config['SPACE']
        self.params = SpaceParams.parse(space) if isinstance(space, str) else space
        self.params.require_positive_delta()
        self.gaps = np.asarray(self.config['GAPS'], dtype=float)
        self.rays = int(self.config['RAYS'])

    def _verdict(self, trend):
        raise NotImplementedError

    def evaluate(self, phi):
        """Calculates the sweep table and its verdict for one symbol"""
        directions = merge_directions(np.exp(2j * np.pi * np.arange(self.rays) / self.rays),
                                      contact_directions(phi, int(self.config['CONTACT_DIRECTIONS']),
                                                         int(self.config['CONTACT_GRID'])))
        gaps, values = [], []
        dropped = 0
        for gap in self.gaps:
            try:
                q = max(sweep_quantity(phi, (1.0 - gap) * d, self.params) for d in directions)
            except utils.NumericError as err:
                logger.warning('dropping 1 - |lambda| = %g: %s', gap, err)
                dropped += 1
                continue
            gaps.append(gap)
            values.append(q)
        res = {'gaps': np.asarray(gaps), 'Q': np.asarray(values), 'dropped': dropped,
               'delta': self.params.delta}
        trend, slope = self._octave_verdict(res['gaps'], res['Q'])
        res['trend'] = trend
        res['slope'] = slope
        res['Q_sup'] = float(np.max(res['Q'])) if values else float('nan')
        res['Q_last'] = float(res['Q'][-1]) if values else float('nan')
        res['verdict'] = self._verdict(trend)
        return res


class BoundednessSweep(_TestFunctionSweep):
    """sup over lambda of Q(lambda) < infinity characterises boundedness of C_phi"""

    def _verdict(self, trend):
        return {'flat': 'bounded-evidence', 'decaying': 'bounded-evidence',
                'growing': 'unbounded-evidence'}.get(trend, 'inconclusive')


class CompactnessSweep(_TestFunctionSweep):
    """Q(lambda) -> 0 as |lambda| -> 1 characterises compactness of C_phi"""

    def _verdict(self, trend):
        return {'decaying': 'compact-evidence', 'flat': 'not-compact-evidence',
                'growing': 'not-compact-evidence'}.get(trend, 'inconclusive')


def boundedness_sweep(phi, params=None, config=None):
    config = dict(config or {})
    if params is not None:
        config['SPACE'] = params
    return BoundednessSweep(config).evaluate(phi)


def compactness_sweep(phi, params=None, config=None):
    config = dict(config or {})
    if params is not None:
        config['SPACE'] = params
    return CompactnessSweep(config).evaluate(phi)
