"""Closed subsets of the circle stored as unions of arcs.

Arcs are kept on the unrolled interval [0, 2pi]; an arc through angle 0 is
stored as two pieces [a, 2pi] and [0, b]. Tube measures and the tube
derivative are computed exactly from the complementary gap lengths.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .quadrature import panel_trend
from .utils import DEFAULTS, DomainError, PreconditionError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def _circular_gap(x):
    return np.abs((x + np.pi) % TWO_PI - np.pi)


def _normalize(intervals):
    intervals = np.asarray(intervals, dtype=float).reshape(-1, 2)
    if intervals.size == 0:
        return np.zeros((0, 2))
    lengths = intervals[:, 1] - intervals[:, 0]
    if np.any(lengths < 0.0):
        raise DomainError('arc end precedes its start')
    if np.any(lengths >= TWO_PI):
        return np.array([[0.0, TWO_PI]])
    starts = intervals[:, 0] % TWO_PI
    starts[TWO_PI - starts < 1e-12] = 0.0
    ends = starts + lengths
    ends[np.abs(ends - TWO_PI) < 1e-12] = TWO_PI
    pieces = []
    for s, e in zip(starts, ends):
        if e > TWO_PI:
            pieces.append((s, TWO_PI))
            pieces.append((0.0, e - TWO_PI))
        else:
            pieces.append((s, e))
    pieces.sort()
    merged = [list(pieces[0])]
    for s, e in pieces[1:]:
        if s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return np.array(merged)


@dataclass(frozen=True, eq=False)
class ArcSet:
    arcs: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    generation_log: tuple = ()
    resolution: float = 0.0

    def __post_init__(self):
        arcs = _normalize(self.arcs)
        arcs.setflags(write=False)
        object.__setattr__(self, 'arcs', arcs)
        object.__setattr__(self, 'generation_log', tuple(self.generation_log))

    @classmethod
    def empty(cls):
        return cls()

    @classmethod
    def full(cls):
        return cls([[0.0, TWO_PI]])

    @classmethod
    def points(cls, angles):
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        return cls(np.stack([angles, angles], axis=1))

    @classmethod
    def arc(cls, start, end):
        return cls([[start, end]])

    @classmethod
    def from_mask(cls, mask):
        """Node i of an M-point grid stands for the cell of width 2pi/M centred at 2pi i/M."""
        mask = np.asarray(mask, dtype=bool)
        M = mask.size
        h = TWO_PI / M
        if mask.all():
            return cls.full()._with_resolution(h)
        edges = np.diff(np.concatenate([[0], mask.astype(int), [0]]))
        run_starts = np.flatnonzero(edges == 1)
        run_ends = np.flatnonzero(edges == -1)
        arcs = np.stack([(run_starts - 0.5) * h, (run_ends - 0.5) * h], axis=1)
        return cls(arcs, resolution=h)

    def _with_resolution(self, h):
        return ArcSet(self.arcs, self.generation_log, h)

    @property
    def is_empty(self):
        return self.arcs.shape[0] == 0

    @property
    def measure(self):
        return float(np.sum(self.arcs[:, 1] - self.arcs[:, 0]))

    @property
    def is_full(self):
        return self.measure >= TWO_PI - 1e-15

    @property
    def n_components(self):
        k = self.arcs.shape[0]
        if k >= 2 and self.arcs[0, 0] == 0.0 and self.arcs[-1, 1] == TWO_PI:
            return k - 1
        return k

    def contains(self, theta):
        return distance(theta, self) == 0.0

    def complement_arcs(self):
        """Open gaps (a_n, b_n) of the complement, b_n possibly beyond 2pi; longest first."""
        if self.is_empty:
            return np.array([[0.0, TWO_PI]])
        if self.is_full:
            return np.zeros((0, 2))
        a = self.arcs[:, 1]
        b = np.roll(self.arcs[:, 0], -1)
        b[-1] += TWO_PI
        gaps = np.stack([a, b], axis=1)
        gaps = gaps[gaps[:, 1] - gaps[:, 0] > 0.0]
        order = np.argsort(-(gaps[:, 1] - gaps[:, 0]), kind='stable')
        return gaps[order]

    def gap_lengths(self):
        gaps = self.complement_arcs()
        return gaps[:, 1] - gaps[:, 0]

    def midpoints(self):
        """The set of arc midpoints (a measure-zero set with the same layout)."""
        mids = 0.5 * (self.arcs[:, 0] + self.arcs[:, 1])
        if self.n_components < self.arcs.shape[0]:
            # rejoin the piece split at angle 0
            first, last = self.arcs[0], self.arcs[-1]
            joined = 0.5 * (last[0] + first[1] + TWO_PI) % TWO_PI
            mids = np.concatenate([[joined], mids[1:-1]])
        return ArcSet.points(mids)._with_log(self.generation_log)

    def _with_log(self, log):
        return ArcSet(self.arcs, log, self.resolution)

    def to_json(self):
        return {'arcs': self.arcs.tolist(), 'resolution': self.resolution,
                'generation_log': list(self.generation_log)}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        if isinstance(obj, list):
            return cls(obj)
        return cls(obj.get('arcs', []), obj.get('generation_log', ()), obj.get('resolution', 0.0))


def distance(theta, E):
    """Arclength distance from e^{i theta} to E; 0 inside."""
    if E.is_empty:
        raise DomainError('distance to the empty set is undefined')
    theta = np.asarray(theta, dtype=float) % TWO_PI
    starts, ends = E.arcs[:, 0], E.arcs[:, 1]
    k = starts.size
    idx = np.searchsorted(starts, theta, side='right') - 1
    inside = (idx >= 0) & (theta <= ends[idx % k])
    d = np.minimum(_circular_gap(theta - ends[idx % k]), _circular_gap(starts[(idx + 1) % k] - theta))
    d = np.where(inside, 0.0, d)
    return d if d.ndim else float(d)


def distance_grid(E, M):
    return distance(TWO_PI * np.arange(M) / M, E)


def tube(E, t):
    if not t > 0.0:
        raise DomainError('tube radius must be positive, got %r' % (t,))
    if E.is_empty:
        return ArcSet.empty()
    if t >= np.pi:
        return ArcSet.full()
    return ArcSet(np.stack([E.arcs[:, 0] - t, E.arcs[:, 1] + t], axis=1), resolution=E.resolution)


def tube_measure(E, t):
    """|E_t| = 2pi - sum over gaps of (g - 2t)_+."""
    if E.is_empty:
        return 0.0
    t = np.asarray(t, dtype=float)
    g = E.gap_lengths()
    shrunk = np.maximum(g[None, :] - 2.0 * t.reshape(-1, 1), 0.0).sum(axis=1)
    out = TWO_PI - shrunk
    return out.reshape(t.shape) if t.ndim else float(out[0])


def tube_derivative(E, t):
    """d|E_t|/dt = 2 * (number of gaps still open at radius t)."""
    g = np.sort(E.gap_lengths())
    t = np.asarray(t, dtype=float)
    return 2.0 * (g.size - np.searchsorted(g, 2.0 * t, side='right'))


def distance_integral(E, fn, levels=40, nodes=16):
    """Partials of int_T fn(d(zeta, E)) |dzeta| over t-panels [pi 2^-(k+1), pi 2^-k].

    Written as fn(0)|E| + int_0^pi fn(t) d|E_t|; the measure d|E_t| is
    2 n(t) dt with n(t) the open-gap count, so each panel splits at the
    half-gap lengths it contains and is integrated by Gauss-Legendre.
    """
    if E.is_empty:
        raise DomainError('distance integral over the empty set')
    x, w = roots_legendre(nodes)
    half_gaps = np.sort(0.5 * E.gap_lengths())
    atom = 0.0
    if E.measure > 0.0:
        atom = float(fn(np.array([0.0]))[0]) * E.measure
    edges = np.pi * 2.0 ** -np.arange(levels + 1)
    contributions = []
    for hi, lo in zip(edges[:-1], edges[1:]):
        inner = half_gaps[(half_gaps > lo) & (half_gaps < hi)]
        pts = np.concatenate([[lo], inner, [hi]])
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            mid = 0.5 * (a + b)
            n_open = half_gaps.size - np.searchsorted(half_gaps, mid, side='right')
            if n_open == 0:
                continue
            t = mid + 0.5 * (b - a) * x
            total += 2.0 * n_open * 0.5 * (b - a) * float(np.sum(w * fn(t)))
        contributions.append(total)
    partials = atom + np.cumsum(contributions)
    return {'partials': partials, 't_edges': edges, 'atom': atom}


def level_mask(phi, s, M=None, tol=1e-12):
    M = DEFAULTS['SET_GRID'] if M is None else M
    return np.abs(phi.boundary_values(M)) >= s - tol


def level_set(phi, s, M=None, tol=1e-12):
    """Grid approximation of E_phi(s) = {|phi| >= s}, resolution 2pi/M."""
    return ArcSet.from_mask(level_mask(phi, s, M, tol))


def level_measure(phi, s, M=None, tol=1e-12):
    mask = level_mask(phi, s, M, tol)
    return float(np.count_nonzero(mask) * TWO_PI / mask.size)


def contact_trend(phi, M=None, eps=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6)):
    """Measures of E_phi(1 - eps), the grid stand-in for the contact set E_phi(1)."""
    M = DEFAULTS['SET_GRID'] if M is None else M
    modulus = np.abs(phi.boundary_values(M))
    measures = np.array([np.count_nonzero(modulus >= 1.0 - e) * TWO_PI / M for e in eps])
    return {'eps': np.asarray(eps), 'measures': measures, 'resolution': TWO_PI / M}


def contact_directions(phi, count=4, M=4096, separation=TWO_PI / 64):
    """Directions phi*/|phi*| at up to count boundary points of largest |phi*|, pairwise separated in angle."""
    values = phi.boundary_values(M)
    modulus = np.abs(values)
    chosen = []
    for i in np.argsort(-modulus, kind='stable'):
        if len(chosen) == count or modulus[i] == 0.0:
            break
        angle = float(np.angle(values[i]))
        if all(abs(np.angle(np.exp(1j * (angle - a)))) >= separation for a in chosen):
            chosen.append(angle)
    return np.exp(1j * np.asarray(chosen, dtype=float))


def merge_directions(base, extra, tol=1e-9):
    """base followed by the directions of extra not already in it."""
    base = np.asarray(base, dtype=complex)
    if base.size == 0:
        return np.asarray(extra, dtype=complex)
    keep = [d for d in np.asarray(extra, dtype=complex) if np.min(np.abs(base - d)) > tol]
    return np.concatenate([base, np.asarray(keep, dtype=complex)])


def distribution_function(samples, lam):
    """m(lam) = |{|f| > lam}| on the grid."""
    values = np.abs(samples.samples)
    return float(np.count_nonzero(values > lam) * TWO_PI / values.size)


def layer_cake_integral(samples, lower=1.0):
    """int_lower^inf m(lam) dlam, exact for the grid distribution function."""
    values = np.sort(np.abs(samples.samples))
    h = TWO_PI / values.size
    above = values[values > lower]
    if above.size == 0:
        return 0.0
    levels = np.concatenate([[lower], above])
    counts = above.size - np.arange(above.size)
    return float(h * np.sum(np.diff(levels) * counts))


def cantor_generator(ratios, levels, start=0.0, length=TWO_PI):
    """Keep two end pieces of relative length ratios[k] of every arc, levels times."""
    ratios = np.broadcast_to(np.asarray(ratios, dtype=float), (levels,)) if np.ndim(ratios) == 0 \
        else np.asarray(ratios, dtype=float)[:levels]
    if ratios.size < levels:
        raise DomainError('need %i ratios, got %i' % (levels, ratios.size))
    if np.any(ratios <= 0.0) or np.any(ratios >= 0.5):
        raise DomainError('Cantor ratios must lie in (0, 1/2)')
    a = np.array([float(start)])
    ell = float(length)
    log = []
    for k, r in enumerate(ratios, start=1):
        child = r * ell
        a = np.stack([a, a + ell - child], axis=1).ravel()
        ell = child
        log.append({'level': k, 'ratio': float(r), 'n_arcs': int(a.size), 'arc_length': ell,
                    'measure': float(a.size * ell)})
    return ArcSet(np.stack([a, a + ell], axis=1), tuple(log))


def cantor_ratios_for_profile(profile, levels):
    """Ratios whose level-k arcs of length l_k satisfy 2^k l_k = 2pi min(1, profile(l_k)).

    For increasing profiles the tube measure of the level-k set at t = l_k is
    then within a factor 3 of 2pi profile(t).
    """
    def target(t):
        return min(1.0, float(profile(t)))

    ell = TWO_PI
    ratios = []
    for k in range(1, levels + 1):
        hi = 0.5 * ell
        lo = hi * 1e-6
        fn = lambda x, k=k: 2.0 ** k * x - TWO_PI * target(x)
        if fn(lo) >= 0.0:
            raise DomainError('profile decays too fast for a two-piece Cantor construction at level %i' % k)
        child = hi if fn(hi) <= 0.0 else brentq(fn, lo, hi, xtol=1e-300, rtol=1e-14)
        ratios.append(min(child / ell, 0.45))
        ell *= ratios[-1]
    return np.array(ratios)


@dataclass(frozen=True)
class WeightFn:
    """Weight w on (0, pi] with derivative, defining |f*| = exp(-w(d(zeta, E))).

    dini records whether int_0^pi w(t) dt / t is finite; None leaves it to
    the panel-trend test in dini_verdict.
    """
    w: Callable
    w_prime: Callable
    name: str = 'custom'
    dini: Optional[bool] = None

    def __call__(self, t):
        return self.w(np.asarray(t, dtype=float))

    def prime(self, t):
        return self.w_prime(np.asarray(t, dtype=float))

    def scaled(self, n):
        return WeightFn(lambda t: n * self.w(t), lambda t: n * self.w_prime(t), '%g*%s' % (n, self.name),
                        self.dini)

    @classmethod
    def log_power(cls, b):
        """(log(e pi / t))^(-b); distances are measured in units of pi."""
        return cls(lambda t: np.log(np.e * np.pi / t) ** -b,
                   lambda t: b * np.log(np.e * np.pi / t) ** (-b - 1.0) / t,
                   'log^-%g' % b, bool(b > 1.0))

    @classmethod
    def linear(cls, c=1.0):
        return cls(lambda t: c * t, lambda t: c * np.ones_like(t), '%g*t' % c, True)

    @classmethod
    def constant(cls, c):
        """w = c; int w(t) dt / t diverges at 0 unless c = 0, so only c = 0 is Dini."""
        return cls(lambda t: c * np.ones_like(t), lambda t: np.zeros_like(t), 'const %g' % c, bool(c == 0.0))

    def is_nondecreasing(self, t_min=1e-12, n=400):
        t = np.geomspace(t_min, np.pi, n)
        return bool(np.all(self.prime(t) >= 0.0) and np.all(self(t) >= 0.0))

    def is_concave_after_power(self, gamma, x_max=1e-3, x_min=1e-14, n=400):
        """Concavity of t -> w(t^gamma) on t^gamma in [x_min, x_max]."""
        x = np.geomspace(x_min, x_max, n)
        t = x ** (1.0 / gamma)
        slopes = np.diff(self(x)) / np.diff(t)
        scale = max(float(np.max(np.abs(slopes))), 1e-300)
        return bool(np.all(np.diff(slopes) <= 1e-9 * scale))

    def dini_verdict(self, levels=40, nodes=16):
        if self.dini is not None:
            return self.dini
        x, w = roots_legendre(nodes)
        edges = np.pi * 2.0 ** -np.arange(levels + 1)
        pieces = []
        for hi, lo in zip(edges[:-1], edges[1:]):
            t = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
            pieces.append(0.5 * (hi - lo) * float(np.sum(w * self(t) / t)))
        verdict = panel_trend(np.cumsum(pieces))['verdict']
        return {'converging': True, 'diverging': False}.get(verdict)

    def verify(self, gamma=2.5):
        return {'nondecreasing': self.is_nondecreasing(),
                'concave': self.is_concave_after_power(gamma),
                'dini': self.dini_verdict(),
                'gamma': gamma}

    def require(self, gamma=2.5):
        flags = self.verify(gamma)
        if not (flags['nondecreasing'] and flags['concave']):
            raise PreconditionError('weight %s: need w nondecreasing and w(t^%g) concave near 0, got %r'
                                    % (self.name, gamma, flags))
        return flags


def parse_set(text):
    """'point:a', 'points:a,b,..', 'arc:a,b', 'circle', 'cantor:r,k', 'cantor-mid:r,k', or JSON."""
    text = text.strip()
    if text.startswith('{') or text.startswith('['):
        return ArcSet.from_json(text)
    kind, _, args = text.partition(':')
    values = [float(v) for v in filter(None, args.split(','))]
    kind = kind.lower()
    if kind in ('point', 'points') and values:
        return ArcSet.points(values)
    if kind == 'arc' and len(values) == 2:
        return ArcSet.arc(*values)
    if kind == 'circle':
        return ArcSet.full()
    if kind in ('cantor', 'cantor-mid') and len(values) == 2:
        E = cantor_generator(values[0], int(values[1]))
        return E.midpoints() if kind == 'cantor-mid' else E
    raise PreconditionError('set: cannot parse %r' % text)


def parse_weight(text):
    """'log:b' for (log(e pi / t))^-b, 'linear:c' for c t, 'const:c'."""
    kind, _, args = text.strip().partition(':')
    kind = kind.lower()
    try:
        value = float(args) if args else 1.0
    except ValueError:
        raise PreconditionError('weight: cannot parse %r' % text)
    if kind == 'log':
        return WeightFn.log_power(value)
    if kind == 'linear':
        return WeightFn.linear(value)
    if kind in ('const', 'constant'):
        return WeightFn.constant(value)
    raise PreconditionError('weight: cannot parse %r' % text)
