"""Truncated Taylor series on the disc and their boundary samples.

A PowerSeries carries coefficients f^(0..N); a BoundaryGrid carries samples at
the M-th roots of unity. The two are linked by FFTs of power-of-two size.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .utils import (DEFAULTS, DomainError, NumericError, AliasingError, fft_workers,
                    is_power_of_two, next_power_of_two)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PowerSeries:
    coeffs: np.ndarray
    residual: float = field(default=0.0, compare=False)

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if coeffs.ndim != 1:
            raise DomainError('PowerSeries coefficients must be one-dimensional')
        if coeffs.size < 2:
            coeffs = np.concatenate([coeffs, np.zeros(2 - coeffs.size, dtype=complex)])
        if not np.all(np.isfinite(coeffs)):
            raise NumericError('PowerSeries coefficients must be finite')
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    @property
    def truncation_order(self):
        return self.coeffs.size - 1

    @classmethod
    def constant(cls, c, N=1):
        coeffs = np.zeros(N + 1, dtype=complex)
        coeffs[0] = c
        return cls(coeffs)

    @classmethod
    def monomial(cls, n, N=None, c=1.0):
        N = n if N is None else N
        coeffs = np.zeros(N + 1, dtype=complex)
        if n <= N:
            coeffs[n] = c
        return cls(coeffs)

    @classmethod
    def geometric(cls, a, N, power=1):
        """Coefficients of (1 - a z)^(-power), i.e. the test functions F_{lambda,beta}."""
        n = np.arange(N + 1)
        # (power)_n / n! computed through a cumulative product to stay finite
        ratio = np.ones(N + 1)
        ratio[1:] = (n[1:] - 1 + power) / n[1:]
        return cls(np.cumprod(ratio) * np.asarray(a, dtype=complex) ** n)

    def truncate(self, N):
        if N <= self.truncation_order:
            return PowerSeries(self.coeffs[:N + 1])
        return PowerSeries(np.concatenate([self.coeffs, np.zeros(N - self.truncation_order, dtype=complex)]))

    def derivative(self):
        n = np.arange(1, self.truncation_order + 1)
        return PowerSeries(n * self.coeffs[1:])

    def __call__(self, z):
        return evaluate(self, z)

    def deriv(self, z):
        return evaluate(self.derivative(), z)

    def ring(self, radius, M):
        """Values and derivative on the circle |z| = radius at the M-th roots of unity."""
        n = np.arange(self.truncation_order + 1)
        values = _fold_to_grid(self.coeffs * radius ** n, M)
        m = n[:-1]
        derivs = _fold_to_grid((m + 1) * self.coeffs[1:] * radius ** m, M)
        return values, derivs


def _fold_to_grid(coeffs, M):
    """Exact evaluation of sum c_n w^n at all M-th roots of unity w."""
    folded = np.zeros(M, dtype=complex)
    n = np.arange(coeffs.size)
    np.add.at(folded, n % M, coeffs)
    return scipy.fft.ifft(folded, workers=fft_workers()) * M


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    samples: np.ndarray

    def __post_init__(self):
        samples = np.atleast_1d(np.asarray(self.samples)).copy()
        if not np.iscomplexobj(samples):
            samples = samples.astype(float)
        M = samples.size
        if not is_power_of_two(M) or M < 8:
            raise DomainError('BoundaryGrid size must be a power of two >= 8, got %i' % M)
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    @property
    def grid_size(self):
        return self.samples.size

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.grid_size) / self.grid_size

    @classmethod
    def from_function(cls, fn, M):
        theta = 2.0 * np.pi * np.arange(M) / M
        return cls(fn(theta))

    def fourier_coefficients(self):
        """u^(n) for n in scipy.fft.fftfreq order."""
        return scipy.fft.fft(self.samples, workers=fft_workers()) / self.grid_size

    def is_real(self, tol=1e-12):
        if not np.iscomplexobj(self.samples):
            return True
        scale = max(1.0, float(np.max(np.abs(self.samples.real), initial=0.0)))
        return bool(np.max(np.abs(self.samples.imag), initial=0.0) <= tol * scale)

    def real(self):
        return BoundaryGrid(np.real(self.samples))

    def modulus(self):
        return BoundaryGrid(np.abs(self.samples))

    def mean(self):
        return float(np.mean(self.samples.real))


def evaluate(f, z):
    """Horner evaluation of the truncated polynomial at points with |z| <= 1."""
    z_arr = np.asarray(z)
    if np.any(np.abs(z_arr) > 1.0 + 1e-12):
        raise DomainError('evaluation point outside the closed unit disc: max |z| = %g'
                          % float(np.max(np.abs(z_arr))))
    return np.polyval(f.coeffs[::-1], z_arr)


def multiply(f, g, N=None):
    """Product of two series truncated at N (default: the smaller truncation)."""
    if N is None:
        N = min(f.truncation_order, g.truncation_order)
    size = next_power_of_two(2 * (N + 1))
    workers = fft_workers()
    fa = scipy.fft.fft(f.coeffs[:N + 1], n=size, workers=workers)
    fb = scipy.fft.fft(g.coeffs[:N + 1], n=size, workers=workers)
    prod = scipy.fft.ifft(fa * fb, workers=workers)[:N + 1]
    if not np.all(np.isfinite(prod)):
        raise NumericError('overflow in series multiplication at truncation %i' % N)
    out = np.zeros(N + 1, dtype=complex)
    out[:prod.size] = prod
    return PowerSeries(out)


def power(f, n):
    """Taylor coefficients of f^n at the truncation order of f."""
    if int(n) != n or n < 1:
        raise DomainError('power exponent must be a positive integer, got %r' % (n,))
    n = int(n)
    result = None
    base = f
    while n:
        if n & 1:
            result = base if result is None else multiply(result, base)
        n >>= 1
        if n:
            base = multiply(base, base)
    return result


def boundary_trace(f, M):
    """Samples of the truncated polynomial at the M-th roots of unity."""
    M = int(M)
    if not is_power_of_two(M):
        raise DomainError('grid size must be a power of two, got %i' % M)
    if M < 2 * (f.truncation_order + 1):
        raise AliasingError('grid size %i below 2(N+1) = %i' % (M, 2 * (f.truncation_order + 1)))
    padded = np.zeros(M, dtype=complex)
    padded[:f.truncation_order + 1] = f.coeffs
    return BoundaryGrid(scipy.fft.ifft(padded, workers=fft_workers()) * M)


def recover_series(grid, N):
    """Coefficients 0..N of the nonnegative-frequency part of the grid samples."""
    if grid.grid_size < 2 * (N + 1):
        raise AliasingError('grid size %i below 2(N+1) = %i' % (grid.grid_size, 2 * (N + 1)))
    coeffs = scipy.fft.fft(grid.samples, workers=fft_workers())[:N + 1] / grid.grid_size
    return PowerSeries(coeffs)


def _checked_real(grid, name):
    if not grid.is_real():
        raise DomainError('%s must be real-valued' % name)
    samples = np.real(grid.samples).astype(float)
    if np.any(np.isnan(samples)):
        raise NumericError('%s contains NaN samples' % name)
    return samples


def _completion_coeffs(u):
    """Coefficients h_0..h_{M/2} of the analytic h with Re h* = u on the grid."""
    M = u.size
    c = scipy.fft.fft(u, workers=fft_workers()) / M
    h = np.empty(M // 2 + 1, dtype=complex)
    h[0] = c[0].real
    h[1:M // 2] = 2.0 * c[1:M // 2]
    h[M // 2] = c[M // 2].real
    return h


def analytic_completion(u, N):
    """Analytic h with Re h = u on the circle and Im h(0) = 0, truncated at N."""
    samples = _checked_real(u, 'boundary data')
    h = _completion_coeffs(samples)
    out = np.zeros(N + 1, dtype=complex)
    k = min(N + 1, h.size)
    out[:k] = h[:k]
    return PowerSeries(out)


def completion_boundary_values(u):
    """Boundary samples u + i*conj(u) of the analytic completion."""
    samples = _checked_real(u, 'boundary data')
    M = samples.size
    padded = np.zeros(M, dtype=complex)
    padded[:M // 2 + 1] = _completion_coeffs(samples)
    return BoundaryGrid(scipy.fft.ifft(padded, workers=fft_workers()) * M)


def _clamp_log_modulus(logmod, floor):
    samples = _checked_real(logmod, 'log-modulus')
    clamped = np.where(np.isneginf(samples), floor, np.maximum(samples, floor))
    if np.any(np.isposinf(clamped)):
        raise NumericError('log-modulus contains +inf samples')
    n_clamped = int(np.count_nonzero(samples < floor))
    if n_clamped:
        logger.debug('clamped %i log-modulus samples to %g', n_clamped, floor)
    return BoundaryGrid(clamped)


def outer_boundary_values(logmod, floor=None):
    """Boundary samples of the outer function exp(h), Re h* = logmod."""
    floor = DEFAULTS['LOG_MODULUS_FLOOR'] if floor is None else floor
    h = completion_boundary_values(_clamp_log_modulus(logmod, floor))
    return BoundaryGrid(np.exp(h.samples))


def outer_from_log_modulus(logmod, N, floor=None):
    """Outer function with boundary modulus exp(logmod), truncated at N."""
    if logmod.grid_size < 2 * (N + 1):
        raise AliasingError('grid size %i below 2(N+1) = %i' % (logmod.grid_size, 2 * (N + 1)))
    values = outer_boundary_values(logmod, floor)
    return recover_series(values, N)


def harmonic_conjugate(u):
    """Conjugate function via the multiplier -i sgn(n); zero mean output."""
    samples = _checked_real(u, 'harmonic data')
    M = samples.size
    workers = fft_workers()
    c = scipy.fft.fft(samples, workers=workers)
    k = np.rint(scipy.fft.fftfreq(M) * M)
    multiplier = -1j * np.sign(k)
    multiplier[M // 2] = 0.0
    return BoundaryGrid(np.real(scipy.fft.ifft(c * multiplier, workers=workers)))
