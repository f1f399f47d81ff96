"""Zames-Falb multipliers: discrete FIR taps and continuous impulse trains.

Both kinds have the form ``M = 1 - H`` where the impulse response of ``H``
has l1 norm below one. Taps may be anywhere on the integer line for the
discrete case (non-causal taps are allowed) except at n = 0.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, ValidationError

__all__ = ['MultiplierClass', 'FirMultiplier', 'ImpulseMultiplier',
           'mult_response', 'klass', 'multiplier_from_dict']


class MultiplierClass(enum.Enum):
    CLASS_C_OR_D = 'non-odd'
    CLASS_ODD = 'odd'
    INVALID = 'invalid'


def _classify(weights, extra_invalid=False):
    w = np.asarray(weights, dtype=float)
    if extra_invalid or np.sum(np.abs(w)) >= 1.0:
        return MultiplierClass.INVALID
    if np.all(w >= 0):
        return MultiplierClass.CLASS_C_OR_D
    return MultiplierClass.CLASS_ODD


@dataclass(frozen=True)
class FirMultiplier:
    """M(z) = 1 - sum_n h_n z^-n for a finite map ``taps = {n: h_n}``."""

    taps: tuple = ()

    def __init__(self, taps=()):
        items = taps.items() if isinstance(taps, dict) else taps
        clean = {}
        for n, h in items:
            if int(n) != n:
                raise ValidationError(f"tap index {n!r} is not an integer")
            h = float(h)
            if not np.isfinite(h):
                raise ValidationError("tap weights must be finite")
            clean[int(n)] = clean.get(int(n), 0.0) + h
        object.__setattr__(self, 'taps', tuple(sorted(clean.items())))

    @property
    def indices(self):
        return np.array([n for n, _ in self.taps], dtype=int)

    @property
    def weights(self):
        return np.array([h for _, h in self.taps], dtype=float)

    @property
    def l1(self):
        return float(np.sum(np.abs(self.weights)))

    def klass(self):
        has_h0 = any(n == 0 and h != 0 for n, h in self.taps)
        return _classify(self.weights, has_h0)

    def response(self, grid):
        w = np.atleast_1d(np.asarray(grid, dtype=float))
        if not self.taps:
            return np.ones_like(w, dtype=complex)
        return 1.0 - np.exp(-1j * np.outer(w, self.indices)) @ self.weights

    def to_dict(self):
        return {'kind': 'fir', 'taps': [{'n': n, 'h': h} for n, h in self.taps]}


@dataclass(frozen=True)
class ImpulseMultiplier:
    """M(jw) = 1 - sum_i h_i exp(-j w t_i) for ``impulses = [(t_i, h_i), ...]``."""

    impulses: tuple = ()

    def __init__(self, impulses=()):
        clean = tuple((float(t), float(h)) for t, h in impulses)
        if not np.all(np.isfinite(np.asarray(clean, dtype=float))):
            raise ValidationError("impulse times and weights must be finite")
        object.__setattr__(self, 'impulses', clean)

    @property
    def times(self):
        return np.array([t for t, _ in self.impulses], dtype=float)

    @property
    def weights(self):
        return np.array([h for _, h in self.impulses], dtype=float)

    @property
    def l1(self):
        return float(np.sum(np.abs(self.weights)))

    def klass(self):
        return _classify(self.weights)

    def response(self, grid):
        w = np.atleast_1d(np.asarray(grid, dtype=float))
        if not self.impulses:
            return np.ones_like(w, dtype=complex)
        return 1.0 - np.exp(-1j * np.outer(w, self.times)) @ self.weights

    def to_dict(self):
        return {'kind': 'impulse', 'taps': [{'t': t, 'h': h} for t, h in self.impulses]}


def mult_response(m, grid):
    return m.response(grid)


def klass(m):
    return m.klass()


def multiplier_from_dict(doc):
    """Parse ``{"kind": "fir"|"impulse", "taps": [{"n"|"t": ..., "h": ...}]}``."""
    try:
        kind = doc['kind']
        taps = doc['taps']
        if kind == 'fir':
            return FirMultiplier([(tap['n'], tap['h']) for tap in taps])
        if kind == 'impulse':
            return ImpulseMultiplier([(tap['t'], tap['h']) for tap in taps])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed multiplier document: {exc}") from None
    raise ValidationError(f"unknown multiplier kind {kind!r}")


def require_class(m, allowed):
    """Raise ConstructionError unless ``m.klass()`` is one of ``allowed``."""
    got = m.klass()
    if got not in allowed:
        raise ConstructionError(f"multiplier class {got.value} not in "
                                f"{[a.value for a in allowed]}")
    return m
