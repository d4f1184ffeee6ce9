import logging

import numpy as np

from ._base_diagnostic import _BaseDiagnostic
from ..boundary_sets import contact_directions, merge_directions
from ..quadrature import CarlesonBox, DiscRule, integrate_disc, pushforward_masses
from .. import utils

logger = logging.getLogger(__name__)


class _BerezinIntegrand:
    def __init__(self, phi, lam):
        self.phi = phi
        self.lam = lam

    def ring(self, radius, M):
        w, dw = self.phi.ring(radius, M)
        return np.abs(dw) ** 2 / np.abs(1.0 - np.conj(self.lam) * w) ** 4


def berezin_quantity(phi, lam, rule=None):
    """(1 - |lambda|^2)^2 int |phi'|^2 / |1 - conj(lambda) phi|^4 dA."""
    rule = DiscRule.graded(0.0, 1.0 - abs(lam)) if rule is None else rule
    value = np.real(integrate_disc(_BerezinIntegrand(phi, lam), rule))
    return float((1.0 - abs(lam) ** 2) ** 2 * value)


class CarlesonSweep(_BaseDiagnostic):
    """Counting-measure quotient mu_phi(S(I)) / |I|^2 over shrinking boxes.

    The pushforward of |phi'|^2 dA is a Carleson measure exactly when C_phi is
    bounded on D, and a vanishing one exactly when C_phi is compact.
    """

    @staticmethod
    def get_default_config():
        """Default class config values"""
        default_config = {
            'BOX_LEVELS': [3, 4, 5, 6, 7],  # Box lengths |I| = 2pi 2^-k.
            'N_CENTERS': 16,  # Box centres 2pi j / N_CENTERS swept per length.
            'CONTACT_DIRECTIONS': 4,  # Extra box centres and kernel directions at the largest values of |phi*|.
            'CONTACT_GRID': 4096,  # Boundary grid on which those values are located.
            'RULE_LEVELS': 12,  # Dyadic radial panels of the disc rule.
            'NODES_PER_PANEL': 16,  # Gauss nodes per radial panel.
            'ANGULAR_SIZE': 1024,  # Angular nodes of the disc rule.
            'BEREZIN_GAPS': [2.0 ** -k for k in range(1, 9)],  # 1 - |lambda| for the kernel form.
            'PRINT_CONFIG': False,  # Whether to print the config information on init. Default: False.
        }
        return default_config

    def __init__(self, config=None):
        super().__init__()
        self.float_fields = ['quotient_sup', 'quotient_last', 'berezin_sup', 'berezin_last']
        self.string_fields = ['trend', 'sup_verdict', 'limit_verdict']
        self.array_fields = ['box_lengths', 'quotient', 'berezin_gaps', 'berezin']
        self.fields = self.float_fields + self.string_fields + self.array_fields
        self.summary_fields = ['sup_verdict', 'limit_verdict', 'quotient_sup', 'quotient_last']
        self.table_fields = ['box_lengths', 'quotient']

        self.config = utils.init_config(config, self.get_default_config(), self.get_name())
        self.levels = np.asarray(self.config['BOX_LEVELS'], dtype=int)
        self.n_centers = int(self.config['N_CENTERS'])
        self.rule = DiscRule.dyadic(0.0, int(self.config['RULE_LEVELS']), int(self.config['NODES_PER_PANEL']),
                                    int(self.config['ANGULAR_SIZE']))

    def evaluate(self, phi):
        """Calculates box quotients and kernel-form values for one symbol"""
        lengths = 2.0 * np.pi * 2.0 ** -self.levels.astype(float)
        contact = contact_directions(phi, int(self.config['CONTACT_DIRECTIONS']), int(self.config['CONTACT_GRID']))
        directions = merge_directions(np.exp(2j * np.pi * np.arange(self.n_centers) / self.n_centers), contact)
        centers = np.mod(np.angle(directions), 2.0 * np.pi)
        boxes = [CarlesonBox(c, ell) for ell in lengths for c in centers]
        masses = pushforward_masses(phi, boxes, self.rule).reshape(lengths.size, centers.size)
        quotient = masses.max(axis=1) / lengths ** 2
        res = {'box_lengths': lengths, 'quotient': quotient}
        trend, _ = self._octave_verdict(lengths, quotient)
        res['trend'] = trend
        res['sup_verdict'] = {'flat': 'bounded-evidence', 'decaying': 'bounded-evidence',
                              'growing': 'unbounded-evidence'}.get(trend, 'inconclusive')
        res['limit_verdict'] = {'decaying': 'compact-evidence', 'flat': 'not-compact-evidence',
                                'growing': 'not-compact-evidence'}.get(trend, 'inconclusive')
        res['quotient_sup'] = float(quotient.max())
        res['quotient_last'] = float(quotient[-1])

        gaps = np.asarray(self.config['BEREZIN_GAPS'], dtype=float)
        kernel_directions = merge_directions(np.exp(2j * np.pi * np.arange(4) / 4), contact)
        berezin = np.array([max(berezin_quantity(phi, (1.0 - g) * d) for d in kernel_directions) for g in gaps])
        res['berezin_gaps'] = gaps
        res['berezin'] = berezin
        res['berezin_sup'] = float(berezin.max())
        res['berezin_last'] = float(berezin[-1])
        return res


def carleson_sweep(phi, box_levels=None, config=None):
    config = dict(config or {})
    if box_levels is not None:
        config['BOX_LEVELS'] = list(box_levels)
    return CarlesonSweep(config).evaluate(phi)
