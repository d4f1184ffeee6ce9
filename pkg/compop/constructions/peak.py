"""Symbols peaking exactly on a closed null set E of the circle.

On every complementary arc (a_n, b_n) of length l_n the boundary function
g = tau_n l_n^(1/2) / (l_n^2 - (2t - a_n - b_n)^2)^(1/4) blows up at both
ends; with f the analytic completion of g, phi = f / (f + 1) has
|phi*| < 1 off E and |phi*| -> 1 at E, while
(1/2pi) int 1/(1 - |phi*|^2) <= 1 + 2 mean(g^2) keeps C_phi Hilbert-Schmidt on H^2.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..boundary_sets import TWO_PI, ArcSet, contact_trend
from ..series import BoundaryGrid, completion_boundary_values, harmonic_conjugate
from ..symbols import RawSeries
from ..utils import DEFAULTS, NumericError, PreconditionError, ResolutionError, init_config

logger = logging.getLogger(__name__)


def get_default_config():
    """Default peak-construction config values"""
    return {
        'M': DEFAULTS['SET_GRID'],  # Boundary grid size.
        'MIN_CELLS': 4,  # Smallest complementary arc must span this many grid cells.
        'MEASURE_TOL': 1e-12,  # Largest |E| accepted as a null set.
        'CONTACT_EPS': (1e-2, 1e-3, 1e-4, 1e-5, 1e-6),  # eps for the measures of E_phi(1 - eps).
        'PRINT_CONFIG': False,  # Whether to print the config information on init. Default: False.
    }


@dataclass(eq=False)
class PeakConstruction:
    E: ArcSet
    gaps: np.ndarray
    tau: np.ndarray
    g: BoundaryGrid
    U: BoundaryGrid
    V: BoundaryGrid
    phi: RawSeries
    certificate: float
    measured: float
    g_norm_sq: float
    g_norm_sq_exact: float
    tau_partials: np.ndarray
    g_norm_sq_cells: float = float('nan')
    contact: dict = field(default_factory=dict)

    @property
    def certificate_holds(self):
        return self.measured <= self.certificate

    def to_json(self):
        return {'symbol': self.phi.to_json(),
                'provenance': {'E': self.E.to_json(), 'gaps': self.gaps.tolist(), 'tau': self.tau.tolist(),
                               'certificate': self.certificate, 'measured': self.measured,
                               'g_norm_sq': self.g_norm_sq, 'g_norm_sq_cells': self.g_norm_sq_cells,
                               'g_norm_sq_exact': self.g_norm_sq_exact}}


def peak_sequence(lengths):
    """tau_n = s_n^(-1/4) with s_n = sum_{m >= n} l_m for lengths sorted decreasingly.

    tau_n increases to infinity while sum tau_n^2 l_n <= 2 sqrt(s_1).
    """
    lengths = np.asarray(lengths, dtype=float)
    tails = np.cumsum(lengths[::-1])[::-1]
    return tails ** -0.25


def _cell_squares(gaps, tau, M):
    """Exact integrals of g^2 over the M cells [2pi(i - 1/2)/M, 2pi(i + 1/2)/M]."""
    h = TWO_PI / M
    out = np.zeros(M)
    for (a, b), t in zip(gaps, tau):
        ell = b - a

        def G(x, t=t, ell=ell):
            # antiderivative of g^2 in x = t - a
            return t ** 2 * ell * np.arcsin(np.sqrt(np.clip(x / ell, 0.0, 1.0)))

        first = int(np.floor(a / h + 0.5))
        last = int(np.floor(b / h + 0.5))
        idx = np.arange(first, last + 1)
        lo = np.maximum((idx - 0.5) * h, a)
        hi = np.minimum((idx + 0.5) * h, b)
        keep = hi > lo
        np.add.at(out, idx[keep] % M, G(hi[keep] - a) - G(lo[keep] - a))
    return out


def realized_g_norm_sq(phi, M):
    """||Re f||^2 on the circle for f = phi / (1 - phi), read back from the series of phi on an M-grid."""
    values = phi.series.ring(1.0, M)[0]
    with np.errstate(divide='ignore', invalid='ignore'):
        g = np.real(values / (1.0 - values))
    if not np.all(np.isfinite(g)):
        raise NumericError('peak symbol reaches 1 on the %i-grid; cannot read back g' % M)
    return float(TWO_PI * np.mean(g ** 2))


def build_peak_symbol(E, M=None, config=None):
    """phi with E_phi(1) = E and C_phi Hilbert-Schmidt on H^2, for a closed null set E."""
    config = init_config(config, get_default_config(), 'PeakConstruction')
    M = int(config['M'] if M is None else M)
    if E.is_empty:
        raise PreconditionError('peak construction needs a nonempty set')
    if E.measure > float(config['MEASURE_TOL']):
        raise PreconditionError('peak construction needs |E| = 0, got %g' % E.measure)
    gaps = E.complement_arcs()
    lengths = gaps[:, 1] - gaps[:, 0]
    h = TWO_PI / M
    if lengths.min() < int(config['MIN_CELLS']) * h:
        raise ResolutionError('smallest complementary arc %g spans fewer than %i cells at M = %i'
                              % (lengths.min(), config['MIN_CELLS'], M))
    tau = peak_sequence(lengths)
    cells = _cell_squares(gaps, tau, M)
    # node value = cell RMS, so the grid mean of g^2 is the exact integral
    g = np.sqrt(cells / h)
    U = BoundaryGrid(g)
    V = harmonic_conjugate(U)
    f = completion_boundary_values(U).samples
    phi_values = f / (f + 1.0)
    phi = RawSeries.from_boundary_values(BoundaryGrid(phi_values))
    # 1 / (1 - |phi|^2) = |1 + f|^2 / (1 + 2 Re f)
    measured = float(np.mean(np.abs(1.0 + f) ** 2 / (1.0 + 2.0 * g)))
    g_norm_sq_cells = float(TWO_PI * np.mean(g ** 2))
    certificate = 1.0 + 2.0 * g_norm_sq_cells / TWO_PI
    construction = PeakConstruction(E, gaps, tau, U, U, V, phi, certificate, measured,
                                    realized_g_norm_sq(phi, 2 * M),
                                    0.5 * np.pi * float(np.sum(tau ** 2 * lengths)),
                                    np.cumsum(tau ** 2 * lengths), g_norm_sq_cells)
    construction.contact = contact_trend(phi, M, tuple(config['CONTACT_EPS']))
    logger.debug('peak symbol on %i gaps: certificate %.6g, measured %.6g', lengths.size, certificate, measured)
    return construction
