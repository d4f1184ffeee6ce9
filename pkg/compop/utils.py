import os
import logging
import numpy as np

logger = logging.getLogger(__name__)


DEFAULTS = {
    'N_SMOOTH': 2048,  # Truncation order for symbols with sup-norm < 1
    'N_CONTACT': 16384,  # Truncation order for symbols with boundary contact
    'SET_GRID': 2 ** 16,  # Boundary grid size for level sets and tubes
    'RATIO_C': 20.0,  # Two-sided constant for asymptotic comparisons
    'N_MAX': 4096,  # Number of powers in Hilbert-Schmidt series routes
    'N_CAP': 2 ** 16,  # Fourier cut-off for alpha-energies
    'LOG_MODULUS_FLOOR': -50.0,  # Clamp for log-modulus samples before Fourier analysis
    'RADIAL_NODES': 256,  # Gauss nodes of the default radial rule
    'BOUNDARY_RADIUS': 1.0 - 1e-8,  # Radius standing in for the radial limit of raw series
    'SERIES_RADIUS': 1.0 - 2.0 ** -20,  # Sampling radius used to extract Taylor coefficients
}


def init_config(config, default_config, name=None):
    """Defaults overlaid with the given values; PRINT_CONFIG logs the result at INFO"""
    merged = dict(default_config)
    if config:
        unknown = sorted(set(config) - set(default_config), key=str)
        if unknown:
            logger.debug('%s: keys without a default: %s', name or 'config', ', '.join(map(str, unknown)))
        merged.update(config)
    if name and merged.get('PRINT_CONFIG', False):
        logger.info('%s config:\n%s', name, '\n'.join('  %-20s : %s' % (k, v) for k, v in merged.items()))
    return merged


def fft_workers():
    """Thread count for scipy.fft, taken from COMPOP_NUM_THREADS when set."""
    value = os.environ.get('COMPOP_NUM_THREADS')
    if not value:
        return None
    try:
        workers = int(value)
    except ValueError:
        raise PreconditionError('COMPOP_NUM_THREADS must be an integer, got %r' % value)
    if workers < 1:
        raise PreconditionError('COMPOP_NUM_THREADS must be positive, got %i' % workers)
    return workers


def is_power_of_two(n):
    n = int(n)
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n):
    """Smallest power of two >= n."""
    n = int(n)
    if n <= 1:
        return 1
    return 1 << (n - 1).bit_length()


def ratio_bounds(values, reference, c):
    """Two-sided comparison values/reference in [1/c, c]."""
    values = np.asarray(values, dtype=float)
    reference = np.asarray(reference, dtype=float)
    ratios = values / reference
    return {'ratios': ratios,
            'min_ratio': float(np.min(ratios)),
            'max_ratio': float(np.max(ratios)),
            'C': float(c),
            'passed': bool(np.all(ratios >= 1.0 / c) and np.all(ratios <= c))}


class CompOpException(Exception):
    """Custom exception for catching expected errors."""
    ...


class DomainError(CompOpException):
    """Argument outside the domain of an operation (e.g. a point outside the closed disc)."""
    ...


class NumericError(CompOpException):
    """Non-finite values produced or met during a computation."""
    ...


class AliasingError(CompOpException):
    """Grid too small for the requested truncation order."""
    ...


class ResolutionError(CompOpException):
    """Grid too coarse to resolve the geometry of a set."""
    ...


class PreconditionError(CompOpException):
    """Hypothesis of a check or construction does not hold."""
    ...


class AccuracyWarning(UserWarning):
    """Result computed, but a self-reported accuracy test failed."""
    ...
