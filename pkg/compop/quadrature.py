"""Quadrature on the disc and the circle, Carleson boxes, and panel-trend verdicts.

The disc rule is a tensor product: Gauss rules in s = |z|^2 carrying the weight
(1 + alpha)(1 - s)^alpha, and the uniform trapezoid rule in the angle. In the s
variable dA_alpha = (1 + alpha)(1 - s)^alpha ds dtheta / 2pi, so the rule has
total mass one and integrates |z|^(2n) exactly.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre, roots_jacobi

from .utils import DEFAULTS, DomainError, NumericError, is_power_of_two, next_power_of_two

logger = logging.getLogger(__name__)


def _gauss_on_unit(n, beta=0.0):
    """Nodes/weights on (-1, 1) for the weight (1 + x)^beta."""
    if beta == 0.0:
        return roots_legendre(n)
    return roots_jacobi(n, 0.0, beta)


@dataclass(frozen=True, eq=False)
class DiscRule:
    alpha: float
    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    angular_size: int

    def __post_init__(self):
        if not self.alpha > -1.0:
            raise DomainError('weight exponent alpha must exceed -1, got %r' % (self.alpha,))
        r = np.asarray(self.radial_nodes, dtype=float)
        w = np.asarray(self.radial_weights, dtype=float)
        if r.shape != w.shape or r.ndim != 1:
            raise DomainError('radial nodes and weights must be matching 1-d arrays')
        if np.any(r <= 0.0) or np.any(r >= 1.0) or np.any(np.diff(r) <= 0.0):
            raise DomainError('radial nodes must be strictly increasing in (0, 1)')
        if np.any(w <= 0.0):
            raise DomainError('radial weights must be positive')
        if not is_power_of_two(self.angular_size):
            raise DomainError('angular size must be a power of two, got %r' % (self.angular_size,))
        object.__setattr__(self, 'radial_nodes', r)
        object.__setattr__(self, 'radial_weights', w)

    @classmethod
    def composite(cls, alpha=0.0, radial_breaks=(), nodes_per_panel=None, angular_size=256):
        """Panels in s = r^2 split at the given radii; the last panel reaches |z| = 1."""
        n = DEFAULTS['RADIAL_NODES'] if nodes_per_panel is None else int(nodes_per_panel)
        breaks = np.sort(np.asarray(radial_breaks, dtype=float))
        if np.any(breaks <= 0.0) or np.any(breaks >= 1.0):
            raise DomainError('radial breakpoints must lie in (0, 1)')
        # t = 1 - s, decreasing from 1 to the innermost break of the last panel
        t_breaks = np.concatenate([[1.0], 1.0 - breaks ** 2])
        t_nodes, t_weights = [], []
        x, w = _gauss_on_unit(n)
        for t_hi, t_lo in zip(t_breaks[:-1], t_breaks[1:]):
            t = t_lo + 0.5 * (t_hi - t_lo) * (x + 1.0)
            t_nodes.append(t)
            t_weights.append(0.5 * (t_hi - t_lo) * w * (1.0 + alpha) * t ** alpha)
        t_last = t_breaks[-1]
        x, w = _gauss_on_unit(n, alpha)
        t_nodes.append(0.5 * t_last * (x + 1.0))
        t_weights.append(w * (1.0 + alpha) * (0.5 * t_last) ** (1.0 + alpha))
        t_nodes = np.concatenate(t_nodes)
        t_weights = np.concatenate(t_weights)
        order = np.argsort(-t_nodes)
        radial = np.sqrt(1.0 - t_nodes[order])
        return cls(alpha, radial, t_weights[order], int(angular_size))

    @classmethod
    def gauss(cls, alpha=0.0, n_radial=None, angular_size=256):
        return cls.composite(alpha, (), n_radial, angular_size)

    @classmethod
    def dyadic(cls, alpha=0.0, levels=12, nodes_per_panel=16, angular_size=1024):
        """Breakpoints at |z| = 1 - 2^-j, j = 1..levels."""
        breaks = 1.0 - 2.0 ** -np.arange(1, levels + 1)
        return cls.composite(alpha, breaks, nodes_per_panel, angular_size)

    @classmethod
    def graded(cls, alpha=0.0, gap=1e-3, nodes_per_panel=16, angular_size=None):
        """Rule for integrands concentrated at distance ~gap from the circle."""
        if not 0.0 < gap < 1.0:
            raise DomainError('gap must lie in (0, 1), got %r' % (gap,))
        levels = int(np.ceil(np.log2(4.0 / gap)))
        t_breaks = 2.0 ** -np.arange(1, levels + 1)
        if angular_size is None:
            angular_size = min(2 ** 17, max(256, next_power_of_two(int(64.0 / gap))))
        return cls.composite(alpha, np.sqrt(1.0 - t_breaks), nodes_per_panel, angular_size)

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.angular_size) / self.angular_size

    def points(self):
        return self.radial_nodes[:, None] * np.exp(1j * self.angles)[None, :]

    def moments(self, n):
        """Exact moments int |z|^(2n-2) dA_alpha as seen by the rule, for n = 1..len(n)."""
        n = np.asarray(n)
        s = self.radial_nodes ** 2
        return np.array([np.sum(self.radial_weights * s ** (k - 1)) for k in n])


def _ring_values(integrand, radius, M, unit):
    if hasattr(integrand, 'ring'):
        return np.asarray(integrand.ring(radius, M))
    return np.asarray(integrand(radius * unit))


def integrate_disc(integrand, rule, per_node=False):
    """Tensor-rule approximation of int_D integrand dA_alpha.

    integrand is either a callable on arrays of points, or an object with a
    ring(radius, M) method returning its values on a circle of the rule.
    """
    M = rule.angular_size
    unit = np.exp(1j * rule.angles)
    means = []
    for r in rule.radial_nodes:
        vals = _ring_values(integrand, r, M, unit)
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise NumericError('non-finite integrand at node z = %r' % (r * unit[bad],))
        means.append(np.mean(vals))
    contributions = rule.radial_weights * np.asarray(means)
    if per_node:
        return contributions
    return contributions.sum()


@dataclass(frozen=True)
class CarlesonBox:
    center_angle: float
    arc_length: float

    def __post_init__(self):
        if not 0.0 < self.arc_length <= 2.0 * np.pi + 1e-12:
            raise DomainError('arc length must lie in (0, 2pi], got %r' % (self.arc_length,))
        object.__setattr__(self, 'center_angle', float(self.center_angle) % (2.0 * np.pi))

    @property
    def depth(self):
        return self.arc_length / (2.0 * np.pi)

    @property
    def inner_radius(self):
        return 1.0 - self.depth

    def indicator(self, w, tol=1e-12):
        """1 inside S(I), 1/2 on its edges, 0 outside."""
        w = np.asarray(w)
        rho = np.abs(w)
        radial = np.where(rho > self.inner_radius + tol, 1.0,
                          np.where(rho >= self.inner_radius - tol, 0.5, 0.0))
        radial = np.where(rho >= 1.0, 0.0, radial)
        if self.arc_length >= 2.0 * np.pi - tol:
            return radial
        offset = np.abs((np.angle(w) - self.center_angle + np.pi) % (2.0 * np.pi) - np.pi)
        half = 0.5 * self.arc_length
        angular = np.where(offset < half - tol, 1.0, np.where(offset <= half + tol, 0.5, 0.0))
        return radial * angular


class _PushforwardIntegrand:
    def __init__(self, phi, boxes):
        self.phi = phi
        self.boxes = boxes

    def ring(self, radius, M):
        w, dw = self.phi.ring(radius, M)
        jac = np.abs(dw) ** 2
        return np.array([np.mean(box.indicator(w) * jac) for box in self.boxes])


def pushforward_masses(phi, boxes, rule):
    """mu_phi(S(I)) for several boxes from one pass of phi over the rule."""
    if rule.alpha != 0.0:
        raise DomainError('pushforward masses need the unweighted area rule (alpha = 0)')
    integrand = _PushforwardIntegrand(phi, list(boxes))
    masses = np.zeros(len(integrand.boxes))
    for r, w in zip(rule.radial_nodes, rule.radial_weights):
        masses += w * integrand.ring(r, rule.angular_size)
    return masses


def integrate_box_pushforward(phi, box, rule):
    """int_D 1_S(I)(phi) |phi'|^2 dA, the counting-measure mass of the box."""
    return float(pushforward_masses(phi, [box], rule)[0])


def integrate_circle(samples, normalized=False):
    """Trapezoid rule on the circle; total mass 2pi unless normalized."""
    values = np.real(samples.samples)
    if normalized:
        return float(np.mean(values))
    return float(2.0 * np.pi * np.mean(values))


def panel_trend(partials, window=6, rtol=1e-12):
    """Convergence verdict for partial values of an improper integral on nested panels.

    Increments are tested for geometric decay (ratio <= 0.8) or power decay in
    the panel index (exponent >= 1.5); exponent <= 0.5, growth, or an infinite
    partial is read as divergence.
    """
    partials = np.asarray(partials, dtype=float)
    report = {'verdict': 'inconclusive', 'tail_estimate': float('nan'), 'rate': float('nan'),
              'partials': partials}
    if partials.size and np.any(np.isinf(partials)):
        report.update(verdict='diverging', tail_estimate=float('inf'))
        return report
    if partials.size < 4:
        return report
    increments = np.abs(np.diff(partials))
    index = np.arange(1, increments.size + 1)[-window:]
    tail = increments[-window:]
    scale = max(abs(partials[-1]), np.finfo('float').tiny)
    floor = rtol * scale
    if np.all(tail <= floor):
        report.update(verdict='converging', tail_estimate=0.0, rate=0.0)
        return report
    tail = np.maximum(tail, floor)
    ratio = float(np.exp(np.mean(np.log(tail[1:] / tail[:-1]))))
    if ratio <= 0.8:
        report.update(verdict='converging', rate=ratio, tail_estimate=float(tail[-1] * ratio / (1.0 - ratio)))
        return report
    exponent = -float(np.polyfit(np.log(index), np.log(tail), 1)[0])
    report['rate'] = exponent
    if exponent >= 1.5:
        report.update(verdict='converging', tail_estimate=float(tail[-1] * index[-1] / (exponent - 1.0)))
    elif exponent <= 0.5:
        report.update(verdict='diverging', tail_estimate=float('inf'))
    return report
