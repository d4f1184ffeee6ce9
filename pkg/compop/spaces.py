"""Norms of the Dirichlet-type scale: D, H^2, the weighted Besov spaces D^p_alpha,
and the harmonic spaces D_alpha(T). Coefficient and quadrature evaluators are
kept separate so they can be checked against each other.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .series import PowerSeries
from .quadrature import DiscRule, integrate_disc
from .utils import DEFAULTS, DomainError, PreconditionError, next_power_of_two, ratio_bounds

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpaceParams:
    p: float = 2.0
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not self.p >= 1.0:
            raise DomainError('exponent p must be >= 1, got %r' % (self.p,))
        if not self.alpha > -1.0:
            raise DomainError('weight exponent alpha must exceed -1, got %r' % (self.alpha,))
        if not self.beta >= 0.0:
            raise DomainError('test-function exponent beta must be >= 0, got %r' % (self.beta,))

    @property
    def delta(self):
        return 2.0 + self.beta - (2.0 + self.alpha) / self.p

    @property
    def q(self):
        return float('inf') if self.p == 1.0 else self.p / (self.p - 1.0)

    def require_positive_delta(self):
        if not self.delta > 0.0:
            raise PreconditionError('delta = 2 + beta - (2 + alpha)/p must be positive, got %g' % self.delta)

    @classmethod
    def parse(cls, text):
        """'p=2,alpha=0,beta=0', 'D' (Dirichlet) or 'H2' (Hardy as D^2_1)."""
        text = text.strip()
        if text.upper() == 'D':
            return cls(2.0, 0.0, 0.0)
        if text.upper() == 'H2':
            return cls(2.0, 1.0, 0.0)
        values = {}
        for item in filter(None, text.split(',')):
            key, _, value = item.partition('=')
            key = key.strip().lower()
            if key not in ('p', 'alpha', 'beta'):
                raise PreconditionError('space: unknown field %r' % key)
            values[key] = float(value)
        return cls(**values)


@dataclass(frozen=True)
class TestFunction:
    """F_{lambda,beta}(z) = (1 - conj(lambda) z)^(-1-beta), evaluated in closed form."""
    __test__ = False
    lam: complex
    beta: float = 0.0

    def __post_init__(self):
        if not abs(self.lam) < 1.0:
            raise DomainError('test-function parameter must lie in the open disc, got %r' % (self.lam,))

    @property
    def gap(self):
        return 1.0 - abs(self.lam)

    def __call__(self, z):
        return (1.0 - np.conj(self.lam) * np.asarray(z)) ** (-1.0 - self.beta)

    def deriv(self, z):
        lam_bar = np.conj(self.lam)
        return (1.0 + self.beta) * lam_bar * (1.0 - lam_bar * np.asarray(z)) ** (-2.0 - self.beta)

    def series(self, N):
        return PowerSeries.geometric(np.conj(self.lam), N, power=1.0 + self.beta)


def test_function(lam, beta=0.0):
    return TestFunction(lam, beta)


test_function.__test__ = False


def _default_rule(f, alpha, p=2.0):
    gap = getattr(f, 'gap', None)
    if gap is not None and gap < 0.25:
        return DiscRule.graded(alpha, gap)
    if isinstance(f, PowerSeries):
        N = f.truncation_order
        return DiscRule.gauss(alpha, min(512, max(64, N + 1)), max(256, next_power_of_two(int(4 * p * (N + 1)))))
    return DiscRule.gauss(alpha, DEFAULTS['RADIAL_NODES'], 512)


class _PowerOfDerivative:
    def __init__(self, f, p):
        self.f = f
        self.p = p

    def ring(self, radius, M):
        if hasattr(self.f, 'ring'):
            _, d = self.f.ring(radius, M)
        else:
            d = self.f.deriv(radius * np.exp(2j * np.pi * np.arange(M) / M))
        return np.abs(d) ** self.p


def dirichlet_integral(f, method='coefficients', rule=None):
    """D(f) = sum n |f^(n)|^2, or int |f'|^2 dA by quadrature."""
    if method == 'coefficients':
        n = np.arange(f.truncation_order + 1)
        return float(np.sum(n * np.abs(f.coeffs) ** 2))
    if method == 'quadrature':
        rule = _default_rule(f, 0.0) if rule is None else rule
        if rule.alpha != 0.0:
            raise DomainError('the Dirichlet integral uses the unweighted area rule')
        return float(np.real(integrate_disc(_PowerOfDerivative(f, 2.0), rule)))
    raise DomainError('unknown Dirichlet-integral method %r' % (method,))


def dirichlet_norm(f):
    return float(np.sqrt(abs(f.coeffs[0]) ** 2 + dirichlet_integral(f)))


def hardy_norm_sq(f):
    return float(np.sum(np.abs(f.coeffs) ** 2))


def besov_seminorm(f, params, rule=None):
    """||f'||_{p,alpha}: the p-th root of int |f'|^p dA_alpha by disc quadrature."""
    rule = _default_rule(f, params.alpha, params.p) if rule is None else rule
    if rule.alpha != params.alpha:
        raise DomainError('rule weight %g does not match alpha = %g' % (rule.alpha, params.alpha))
    value = float(np.real(integrate_disc(_PowerOfDerivative(f, params.p), rule)))
    return value ** (1.0 / params.p)


def besov_norm_p(f, params, rule=None):
    """||f||^p = |f(0)|^p + ||f'||^p_{p,alpha}."""
    f0 = f(0.0)
    return float(abs(f0) ** params.p + besov_seminorm(f, params, rule) ** params.p)


def besov_coefficient_form(f, alpha, rule=None):
    """sum n^2 B(n, alpha) |f^(n)|^2 with B the rule's own moments of |z|^(2n-2)."""
    rule = _default_rule(f, alpha) if rule is None else rule
    n = np.arange(1, f.truncation_order + 1)
    return float(np.sum(n ** 2 * rule.moments(n) * np.abs(f.coeffs[1:]) ** 2))


def test_function_asymptotics(params, gaps, c=None):
    """Ratios ||F_{lambda,beta}||^p / (1 - |lambda|^2)^(-p delta) over 1 - |lambda| in gaps."""
    params.require_positive_delta()
    c = DEFAULTS['RATIO_C'] if c is None else c
    gaps = np.asarray(gaps, dtype=float)
    norms = np.array([besov_norm_p(TestFunction(1.0 - g, params.beta), params) for g in gaps])
    lam = 1.0 - gaps
    reference = (1.0 - lam ** 2) ** (-params.p * params.delta)
    report = ratio_bounds(norms, reference, c)
    report.update(gaps=gaps, norms=norms)
    return report


test_function_asymptotics.__test__ = False


def reproducing_check(f, alpha, z, rule=None):
    """|f(z) - int f(w) / (1 - conj(w) z)^(2+alpha) dA_alpha(w)|."""
    if abs(z) > 0.9 + 1e-12:
        raise DomainError('reproducing check needs |z| <= 0.9, got %g' % abs(z))
    rule = DiscRule.gauss(alpha, 64, 256) if rule is None else rule
    if rule.alpha != alpha:
        raise DomainError('rule weight %g does not match alpha = %g' % (rule.alpha, alpha))

    def integrand(w):
        return f(w) / (1.0 - np.conj(w) * z) ** (2.0 + alpha)

    value = integrate_disc(integrand, rule)
    return float(abs(f(z) - value))


def kernel_integral(z, c, d, rule=None):
    """int dA_c(lambda) / |1 - z conj(lambda)|^(2+c+d)."""
    gap = min(max(1.0 - abs(z), 1e-6), 0.5)
    rule = DiscRule.graded(c, gap) if rule is None else rule

    def integrand(lam):
        return np.abs(1.0 - z * np.conj(lam)) ** (-(2.0 + c + d))

    return float(np.real(integrate_disc(integrand, rule)))


def kernel_estimate_check(c, d, points, ratio_c=None):
    """Two-sided bound of kernel_integral against (1 - |z|^2)^(-d)."""
    ratio_c = DEFAULTS['RATIO_C'] if ratio_c is None else ratio_c
    points = np.asarray(points)
    values = np.array([kernel_integral(z, c, d) for z in points])
    reference = (1.0 - np.abs(points) ** 2) ** (-d)
    report = ratio_bounds(values, reference, ratio_c)
    report.update(points=points, values=values)
    return report


def subharmonic_constant(f, p, sigma, points, rule=None):
    """Smallest C with |f(z)|^p <= C int |f|^p / |1 - conj(lambda) z|^(2+sigma) dA_sigma over points."""
    rule = DiscRule.gauss(sigma, 128, 512) if rule is None else rule
    constants = []
    for z in np.asarray(points):
        def integrand(lam, z=z):
            return np.abs(f(lam)) ** p / np.abs(1.0 - np.conj(lam) * z) ** (2.0 + sigma)
        denom = float(np.real(integrate_disc(integrand, rule)))
        constants.append(abs(f(z)) ** p / denom)
    return float(np.max(constants))


def harmonic_dirichlet_norm(u, alpha=0.0):
    """sum over n in Z of |u^(n)|^2 (1 + |n|)^(1 - alpha)."""
    if not 0.0 <= alpha < 1.0:
        raise DomainError('alpha must lie in [0, 1), got %r' % (alpha,))
    c = u.fourier_coefficients()
    M = u.grid_size
    n = np.abs(np.rint(scipy.fft.fftfreq(M) * M))
    return float(np.sum(np.abs(c) ** 2 * (1.0 + n) ** (1.0 - alpha)))
