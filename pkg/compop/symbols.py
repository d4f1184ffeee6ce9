"""Analytic self-maps of the disc as a small expression tree.

Every node evaluates itself and its derivative, carries a certified bound on
its sup-norm, and serialises to JSON. Series-backed nodes (RawSeries, Outer,
Exp2) evaluate on whole circles by FFT through ring().
"""
import json
import logging
import warnings
from abc import ABC, abstractmethod

import numpy as np
import scipy.fft

from .series import PowerSeries, BoundaryGrid, outer_boundary_values, recover_series
from .utils import (DEFAULTS, AccuracyWarning, DomainError, PreconditionError, fft_workers,
                    next_power_of_two)

logger = logging.getLogger(__name__)


def _unit(M):
    return np.exp(2j * np.pi * np.arange(M) / M)


def _complex_to_json(c):
    c = complex(c)
    return [c.real, c.imag]


def _complex_from_json(value):
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


class SymbolSpec(ABC):
    """Base class for symbol nodes."""
    extends_to_boundary = True

    @abstractmethod
    def _value(self, z):
        ...

    @abstractmethod
    def _deriv(self, z):
        ...

    @property
    @abstractmethod
    def bound(self):
        ...

    @abstractmethod
    def to_json(self):
        ...

    @classmethod
    def get_name(cls):
        return cls.__name__

    def _check_domain(self, z):
        rho = np.abs(np.asarray(z))
        if np.any(rho > 1.0 + 1e-12):
            raise DomainError('%s: point outside the closed disc (|z| = %g)' % (self.get_name(), float(np.max(rho))))
        if not self.extends_to_boundary and np.any(rho >= 1.0 - 1e-15):
            raise DomainError('%s has no boundary extension; evaluate at |z| < 1' % self.get_name())

    def eval(self, z):
        self._check_domain(z)
        return self._value(np.asarray(z, dtype=complex))

    def eval_deriv(self, z):
        self._check_domain(z)
        return self._deriv(np.asarray(z, dtype=complex))

    __call__ = eval
    deriv = eval_deriv

    def ring(self, radius, M):
        """Values and derivatives on |z| = radius at the M-th roots of unity."""
        z = radius * _unit(M)
        return self._value(z), self._deriv(z)

    def boundary_values(self, M):
        radius = 1.0 if self.extends_to_boundary else DEFAULTS['BOUNDARY_RADIUS']
        return self.ring(radius, M)[0]

    def sup_check(self, M=4096):
        """Grid maximum of |phi| against the certified bound."""
        grid_max = float(np.max(np.abs(self.boundary_values(M))))
        return {'grid_max': grid_max, 'bound': float(self.bound), 'passed': grid_max <= self.bound + 1e-9}

    def power_symbol(self, n):
        return Composition(Power(n), self)

    def __repr__(self):
        return json.dumps(self.to_json())


class Moebius(SymbolSpec):
    def __init__(self, a):
        self.a = complex(a)
        if not abs(self.a) < 1.0:
            raise DomainError('Moebius parameter must lie in the open disc, got %r' % (a,))

    def _value(self, z):
        return (self.a - z) / (1.0 - np.conj(self.a) * z)

    def _deriv(self, z):
        return (abs(self.a) ** 2 - 1.0) / (1.0 - np.conj(self.a) * z) ** 2

    @property
    def bound(self):
        return 1.0

    def to_json(self):
        return {'type': 'moebius', 'a': _complex_to_json(self.a)}


class Blaschke(SymbolSpec):
    def __init__(self, zeros, unimodular=1.0):
        self.factors = [Moebius(a) for a in zeros]
        self.unimodular = complex(unimodular)
        if abs(abs(self.unimodular) - 1.0) > 1e-12:
            raise DomainError('Blaschke constant must be unimodular, got %r' % (unimodular,))

    def _value(self, z):
        value = self.unimodular * np.ones_like(z)
        for factor in self.factors:
            value = value * factor._value(z)
        return value

    def _deriv(self, z):
        value = self.unimodular * np.ones_like(z)
        deriv = np.zeros_like(z)
        for factor in self.factors:
            b = factor._value(z)
            deriv = deriv * b + value * factor._deriv(z)
            value = value * b
        return deriv

    @property
    def bound(self):
        return 1.0

    def to_json(self):
        return {'type': 'blaschke', 'zeros': [_complex_to_json(f.a) for f in self.factors],
                'unimodular': _complex_to_json(self.unimodular)}


class Scale(SymbolSpec):
    def __init__(self, r):
        self.r = complex(r)
        if abs(self.r) > 1.0 + 1e-15:
            raise DomainError('Scale factor must satisfy |r| <= 1, got %r' % (r,))

    def _value(self, z):
        return self.r * z

    def _deriv(self, z):
        return self.r * np.ones_like(z)

    @property
    def bound(self):
        return abs(self.r)

    def to_json(self):
        return {'type': 'scale', 'r': _complex_to_json(self.r)}


class Affine(SymbolSpec):
    def __init__(self, c0, c1):
        self.c0 = complex(c0)
        self.c1 = complex(c1)
        if abs(self.c0) + abs(self.c1) > 1.0 + 1e-12:
            raise DomainError('Affine symbol needs |c0| + |c1| <= 1, got %g' % (abs(self.c0) + abs(self.c1)))

    def _value(self, z):
        return self.c0 + self.c1 * z

    def _deriv(self, z):
        return self.c1 * np.ones_like(z)

    @property
    def bound(self):
        return abs(self.c0) + abs(self.c1)

    def to_json(self):
        return {'type': 'affine', 'c0': _complex_to_json(self.c0), 'c1': _complex_to_json(self.c1)}


class Power(SymbolSpec):
    def __init__(self, n):
        if int(n) != n or n < 1:
            raise DomainError('Power exponent must be a positive integer, got %r' % (n,))
        self.n = int(n)

    def _value(self, z):
        return z ** self.n

    def _deriv(self, z):
        return self.n * z ** (self.n - 1)

    @property
    def bound(self):
        return 1.0

    def to_json(self):
        return {'type': 'power', 'n': self.n}


class Composition(SymbolSpec):
    """outer o inner."""

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner
        self.extends_to_boundary = inner.extends_to_boundary and (
            outer.extends_to_boundary or inner.bound < 1.0 - 1e-12)

    def _value(self, z):
        return self.outer._value(self.inner._value(z))

    def _deriv(self, z):
        return self.outer._deriv(self.inner._value(z)) * self.inner._deriv(z)

    def ring(self, radius, M):
        w, dw = self.inner.ring(radius, M)
        return self.outer._value(w), self.outer._deriv(w) * dw

    @property
    def bound(self):
        return min(self.outer.bound, 1.0)

    def to_json(self):
        return {'type': 'composition', 'outer': self.outer.to_json(), 'inner': self.inner.to_json()}


class _SeriesBacked(SymbolSpec):
    extends_to_boundary = False

    def _value(self, z):
        return np.polyval(self.series.coeffs[::-1], z)

    def _deriv(self, z):
        return np.polyval(self.series.derivative().coeffs[::-1], z)

    def ring(self, radius, M):
        return self.series.ring(radius, M)


class RawSeries(_SeriesBacked):
    def __init__(self, series, certificate_grid=None):
        self.series = series
        l1 = float(np.sum(np.abs(series.coeffs)))
        if l1 <= 1.0:
            self._bound = l1
            return
        M = certificate_grid or max(64, next_power_of_two(2 * (series.truncation_order + 1)))
        grid_max = float(np.max(np.abs(self.series.ring(DEFAULTS['BOUNDARY_RADIUS'], M)[0])))
        if grid_max > 1.0 - 1e-9:
            raise DomainError('RawSeries is not certified as a self-map: l1 = %g, grid max = %g' % (l1, grid_max))
        self._bound = grid_max

    @property
    def bound(self):
        return self._bound

    @classmethod
    def from_boundary_values(cls, values):
        """All M grid frequencies read as nonnegative; the polynomial reproduces the samples."""
        M = values.grid_size
        coeffs = scipy.fft.fft(values.samples, workers=fft_workers()) / M
        return cls(PowerSeries(coeffs), certificate_grid=M)

    def to_json(self):
        return {'type': 'raw_series', 'coeffs': [_complex_to_json(c) for c in self.series.coeffs]}


class Outer(_SeriesBacked):
    """Outer function with boundary modulus exp(logmod), times a contraction."""

    def __init__(self, logmod, N=None, contraction=1.0):
        if not 0.0 < contraction <= 1.0:
            raise DomainError('contraction must lie in (0, 1], got %r' % (contraction,))
        self.logmod = logmod
        self.contraction = float(contraction)
        M = logmod.grid_size
        N = M // 2 - 1 if N is None else int(N)
        self.boundary = outer_boundary_values(logmod)
        self.series = PowerSeries(self.contraction * recover_series(self.boundary, N).coeffs)
        grid_max = float(np.max(np.abs(self.boundary.samples)))
        if grid_max > 1.0 + 1e-9:
            raise PreconditionError('outer symbol needs log-modulus <= 0; grid max |f| = %g' % grid_max)
        self._bound = min(1.0, self.contraction * grid_max)

    @property
    def bound(self):
        return self._bound

    def boundary_values(self, M):
        if M == self.boundary.grid_size:
            return self.contraction * self.boundary.samples
        return self.series.ring(1.0, M)[0]

    def power_symbol(self, n):
        """f^n has log-modulus n * logmod."""
        return Outer(BoundaryGrid(n * np.real(self.logmod.samples)), self.series.truncation_order,
                     self.contraction ** n)

    def to_json(self):
        return {'type': 'outer', 'logmod': list(np.real(self.logmod.samples)),
                'N': self.series.truncation_order, 'contraction': self.contraction}


class Exp2(_SeriesBacked):
    """phi = exp(-exp(-f)), admissible when |Im f| < pi/4."""

    def __init__(self, f, boundary_f=None):
        self.series = f
        self.boundary_f = boundary_f
        if boundary_f is not None:
            values = boundary_f.samples
        else:
            M = max(64, next_power_of_two(2 * (f.truncation_order + 1)))
            values = f.ring(DEFAULTS['BOUNDARY_RADIUS'], M)[0]
        self.max_imag = float(np.max(np.abs(np.imag(values))))
        if not self.max_imag < np.pi / 4.0:
            raise DomainError('Exp2 needs |Im f| < pi/4 on the circle, got %g' % self.max_imag)

    @staticmethod
    def _compose(fv, dfv):
        ef = np.exp(-fv)
        value = np.exp(-ef)
        return value, value * ef * dfv

    def _value(self, z):
        return np.exp(-np.exp(-self.series(z)))

    def _deriv(self, z):
        return self._compose(self.series(z), self.series.deriv(z))[1]

    def ring(self, radius, M):
        return self._compose(*self.series.ring(radius, M))

    def boundary_values(self, M):
        if self.boundary_f is not None and M == self.boundary_f.grid_size:
            return np.exp(-np.exp(-self.boundary_f.samples))
        return self.ring(1.0, M)[0]

    @property
    def bound(self):
        return 1.0

    def to_json(self):
        return {'type': 'exp2', 'f': [_complex_to_json(c) for c in self.series.coeffs]}


def identity():
    return Scale(1.0)


def rotated(phi, gamma):
    """e^{i gamma} phi(e^{-i gamma} z)."""
    return Composition(Scale(np.exp(1j * gamma)), Composition(phi, Scale(np.exp(-1j * gamma))))


def to_series(phi, N, interior=False):
    """Taylor coefficients of phi up to N, with a self-reported residual.

    Coefficients read off the circle of radius rho carry roundoff eps / rho^n;
    past the order where that exceeds 1e-8 they are dropped with an
    AccuracyWarning.
    """
    if isinstance(phi, (RawSeries, Outer)):
        return phi.series.truncate(N)
    rho = 0.5 if interior else DEFAULTS['SERIES_RADIUS']
    M = max(64, next_power_of_two(4 * (N + 1)))
    values = phi.ring(rho, M)[0]
    c = scipy.fft.fft(values, workers=fft_workers())[:N + 1] / M
    coeffs = c / rho ** np.arange(N + 1)
    reliable = int(np.log(1e-8 / np.finfo(float).eps) / np.log(1.0 / rho))
    if N > reliable:
        warnings.warn('%s: coefficients past order %i are lost to roundoff at radius %g and were dropped'
                      % (phi.get_name(), reliable, rho), AccuracyWarning)
        coeffs[reliable + 1:] = 0.0
    check_points = 0.9 * _unit(16) if not interior else 0.4 * _unit(16)
    series = PowerSeries(coeffs)
    residual = float(np.max(np.abs(series(check_points) - phi._value(check_points))))
    if residual > 1e-6:
        warnings.warn('%s: series round-trip residual %.3g at truncation %i' % (phi.get_name(), residual, N),
                      AccuracyWarning)
    return PowerSeries(coeffs, residual=residual)


def boundary_modulus(phi, M):
    return BoundaryGrid(np.abs(phi.boundary_values(M)))


def symbol_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or 'type' not in obj:
        raise PreconditionError('symbol: expected an object with a "type" field')
    kind = obj['type']
    try:
        if kind == 'moebius':
            return Moebius(_complex_from_json(obj['a']))
        if kind == 'blaschke':
            return Blaschke([_complex_from_json(a) for a in obj['zeros']],
                            _complex_from_json(obj.get('unimodular', 1.0)))
        if kind == 'scale':
            return Scale(_complex_from_json(obj['r']))
        if kind == 'identity':
            return identity()
        if kind == 'affine':
            return Affine(_complex_from_json(obj['c0']), _complex_from_json(obj['c1']))
        if kind == 'power':
            return Power(obj['n'])
        if kind == 'composition':
            return Composition(symbol_from_json(obj['outer']), symbol_from_json(obj['inner']))
        if kind == 'raw_series':
            return RawSeries(PowerSeries([_complex_from_json(c) for c in obj['coeffs']]))
        if kind == 'outer':
            return Outer(BoundaryGrid(np.asarray(obj['logmod'], dtype=float)), obj.get('N'),
                         obj.get('contraction', 1.0))
        if kind == 'exp2':
            return Exp2(PowerSeries([_complex_from_json(c) for c in obj['f']]))
    except KeyError as err:
        raise PreconditionError('symbol.%s: missing field %s' % (kind, err))
    raise PreconditionError('symbol.type: unknown node type %r' % (kind,))


def parse_symbol(text):
    """Compact syntax ('scale:0.5', 'moebius:0.5', 'affine:0.5,0.5', 'power:2',
    'blaschke:0.5,-0.3', 'identity'), inline JSON, or a path to a JSON file."""
    text = text.strip()
    if text.startswith('{'):
        return symbol_from_json(text)
    if text.endswith('.json'):
        with open(text, 'r') as f:
            return symbol_from_json(json.load(f))
    kind, _, args = text.partition(':')
    values = [complex(a.replace('i', 'j')) if 'i' in a or 'j' in a else float(a)
              for a in filter(None, args.split(','))]
    kind = kind.lower()
    if kind == 'identity':
        return identity()
    if kind == 'scale' and len(values) == 1:
        return Scale(values[0])
    if kind == 'moebius' and len(values) == 1:
        return Moebius(values[0])
    if kind == 'affine' and len(values) == 2:
        return Affine(values[0], values[1])
    if kind == 'power' and len(values) == 1:
        return Power(int(values[0].real if isinstance(values[0], complex) else values[0]))
    if kind == 'blaschke' and values:
        return Blaschke(values)
    raise PreconditionError('symbol: cannot parse %r' % text)
