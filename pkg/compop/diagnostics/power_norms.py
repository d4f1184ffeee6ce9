import logging

import numpy as np

from ._base_diagnostic import _BaseDiagnostic
from ..series import multiply
from ..spaces import dirichlet_integral, hardy_norm_sq
from ..symbols import Outer, to_series
from .. import utils

logger = logging.getLogger(__name__)


def iterate_powers(phi, n_max, N):
    """Yields (n, Taylor coefficients of phi^n truncated at N) for n = 1..n_max.

    Outer symbols use f^n = outer function of n * log-modulus; the others
    multiply the truncated series of phi repeatedly.
    """
    if isinstance(phi, Outer):
        for n in range(1, n_max + 1):
            yield n, phi.power_symbol(n).series.truncate(N)
        return
    base = to_series(phi, N)
    current = base
    yield 1, current
    for n in range(2, n_max + 1):
        current = multiply(current, base, N)
        yield n, current


def _tail_fraction(f, frac=0.9):
    c = np.abs(f.coeffs) ** 2
    total = c.sum()
    if total == 0.0:
        return 0.0
    return float(c[int(frac * f.truncation_order):].sum() / total)


class PowerNormDiagnostics(_BaseDiagnostic):
    """D(phi^n) and ||phi^n||_{H^2} for n = 1..n_max.

    sup D(phi^n) < inf is sufficient for boundedness and D(phi^n) -> 0 for
    compactness; neither converse holds, so growth gives no evidence.
    """

    @staticmethod
    def get_default_config():
        """Default class config values"""
        default_config = {
            'N_MAX': 256,  # Largest power n.
            'N': 2048,  # Truncation order of the series of phi.
            'TAIL_TOL': 1e-10,  # Powers whose last tenth of coefficients carries more H^2 mass are unreliable.
            'CHAIN_GAPS': [2.0 ** -k for k in range(1, 7)],  # 1 - |lambda| for the weighted bound.
            'PRINT_CONFIG': False,  # Whether to print the config information on init. Default: False.
        }
        return default_config

    def __init__(self, config=None):
        super().__init__()
        self.float_fields = ['D_first', 'D_sup', 'D_last']
        self.integer_fields = ['n_reliable']
        self.string_fields = ['trend', 'sup_verdict', 'limit_verdict', 'hardy_verdict']
        self.array_fields = ['n', 'dirichlet', 'hardy_sq', 'reliable', 'hardy_scaled',
                             'chain_gaps', 'chain_bound']
        self.fields = self.float_fields + self.integer_fields + self.string_fields + self.array_fields
        self.summary_fields = ['sup_verdict', 'limit_verdict', 'D_first', 'D_sup', 'D_last']
        self.table_fields = ['n', 'dirichlet', 'hardy_sq', 'reliable']

        self.config = utils.init_config(config, self.get_default_config(), self.get_name())
        self.n_max = int(self.config['N_MAX'])
        self.N = int(self.config['N'])
        self.tail_tol = float(self.config['TAIL_TOL'])

    def evaluate(self, phi):
        """Calculates the power sequences and their verdicts for one symbol"""
        dirichlet, hardy, reliable = [], [], []
        for n, f in iterate_powers(phi, self.n_max, self.N):
            dirichlet.append(dirichlet_integral(f))
            hardy.append(hardy_norm_sq(f))
            reliable.append(n < self.N and _tail_fraction(f) <= self.tail_tol and f.residual <= 1e-6)
        n = np.arange(1, self.n_max + 1)
        res = {'n': n, 'dirichlet': np.asarray(dirichlet), 'hardy_sq': np.asarray(hardy),
               'reliable': np.asarray(reliable)}
        if not res['reliable'].all():
            logger.warning('%i of %i powers dominated by truncation', int((~res['reliable']).sum()), self.n_max)
        res['n_reliable'] = int(res['reliable'].sum())
        res['hardy_scaled'] = np.sqrt(n) * np.sqrt(res['hardy_sq'])

        dyadic = n[(n & (n - 1)) == 0]
        dyadic = dyadic[res['reliable'][dyadic - 1]]
        trend, _ = self._octave_verdict(1.0 / dyadic, res['dirichlet'][dyadic - 1])
        res['trend'] = trend
        res['sup_verdict'] = 'bounded-evidence' if trend in ('flat', 'decaying') else 'no-evidence'
        res['limit_verdict'] = 'compact-evidence' if trend == 'decaying' else 'no-evidence'
        hardy_trend, _ = self._octave_verdict(1.0 / dyadic, res['hardy_scaled'][dyadic - 1])
        res['hardy_verdict'] = 'compact-evidence' if hardy_trend == 'decaying' else 'no-evidence'

        ok = res['reliable']
        res['D_first'] = float(res['dirichlet'][0])
        res['D_sup'] = float(np.max(res['dirichlet'][ok])) if ok.any() else float('nan')
        res['D_last'] = float(res['dirichlet'][ok][-1]) if ok.any() else float('nan')

        gaps = np.asarray(self.config['CHAIN_GAPS'], dtype=float)
        lam2 = (1.0 - gaps) ** 2
        # (1 - |lambda|^2)^2 sum_{n>=0} (n+1) |lambda|^(2n) D(phi^(n+1)) over the reliable powers
        weights = n[None, :] * lam2[:, None] ** (n[None, :] - 1)
        bound = (weights * np.where(ok, res['dirichlet'], 0.0)[None, :]).sum(axis=1)
        res['chain_gaps'] = gaps
        res['chain_bound'] = (1.0 - lam2) ** 2 * bound
        return res


def power_norm_diagnostics(phi, n_max=None, config=None):
    config = dict(config or {})
    if n_max is not None:
        config['N_MAX'] = n_max
    return PowerNormDiagnostics(config).evaluate(phi)
