"""Discrete-time phase limitations over a single interval [a, b] in [0, pi].

A discrete Zames-Falb multiplier whose phase exceeds ``atan(rho)`` on the
whole of [a, b] must have ``rho < rho_d`` (non-odd class) or
``rho < rho_d_odd`` (odd class). Both are maxima over finitely many
integers; ``n_max`` bounds the search.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._common import Klass, PhaseLimit, Sign
from .errors import (ConstructionError, DegenerateIntervalError, DomainError,
                     NonPositiveMassError, ValidationError)
from .multipliers import FirMultiplier

__all__ = ['DtInterval', 'AchievingSet', 'psi_d', 'phi_d', 'phi_tilde_d',
           'phi_d1', 'nu', 'n_max', 'rho_d', 'rho_d_odd', 'achieving_set',
           'tie_b', 'sparse_multiplier', 'integral_ratio', 'signed_ratios']

TIE_RTOL = 1e-9


@dataclass(frozen=True)
class DtInterval:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise ValidationError("interval ends must be finite")
        if a == b:
            raise DegenerateIntervalError(f"degenerate interval a = b = {a}")
        if not 0 <= a < b <= np.pi:
            raise ValidationError(f"need 0 <= a < b <= pi, got a={a}, b={b}")
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)

    @property
    def width(self):
        return self.b - self.a


@dataclass(frozen=True)
class AchievingSet:
    """Integers n where the signed ratio attains ``sign * rho``.

    ``tap_signs[i]`` is the sign of the limiting tap at ``members[i]``; it
    is always +1 for the non-odd class.
    """

    members: tuple
    sign: Sign
    klass: Klass
    rho: float
    tap_signs: tuple = ()

    def __post_init__(self):
        if not self.tap_signs:
            object.__setattr__(self, 'tap_signs', (1,) * len(self.members))
        if len(self.tap_signs) != len(self.members):
            raise ValidationError("one tap sign per member required")

    def as_set(self):
        return set(self.members)


def _check_n(n):
    n = np.asarray(n)
    if np.any(n == 0):
        raise DomainError("n must be nonzero")
    if np.any(n != np.round(n)):
        raise DomainError("n must be an integer")
    return n.astype(float)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _psi(n, a, b):
    return 2.0 * np.sin(0.5 * (a + b) * n) * np.sin(0.5 * (b - a) * n) / n


def _phi1(n, a, b):
    return 2.0 * np.cos(0.5 * (a + b) * n) * np.sin(0.5 * (a - b) * n) / n


def psi_d(n, interval):
    return _out(_psi(_check_n(n), interval.a, interval.b))


def phi_d1(n, interval):
    return _out(_phi1(_check_n(n), interval.a, interval.b))


def phi_d(n, interval):
    return _out(interval.width + _phi1(_check_n(n), interval.a, interval.b))


def phi_tilde_d(n, interval):
    return _out(interval.width - np.abs(_phi1(_check_n(n), interval.a, interval.b)))


def nu(interval):
    """Beyond this index the ratio cannot beat its value at n = 1."""
    a, b = interval.a, interval.b
    den = (a - b) * (math.cos(b) - math.cos(a))
    if den == 0:
        raise DegenerateIntervalError("cos a == cos b")
    return (2 * (b - a) - 2 * math.sin(b) + 2 * math.sin(a)
            - 2 * math.cos(b) + 2 * math.cos(a)) / den


def n_max(interval):
    return max(int(math.floor(nu(interval))), 1)


def _limit(interval, odd, tie_rtol, upto=None):
    n = np.arange(1, (upto or n_max(interval)) + 1, dtype=float)
    f1 = _phi1(n, interval.a, interval.b)
    den = interval.width - np.abs(f1) if odd else interval.width + f1
    r = np.abs(_psi(n, interval.a, interval.b)) / den
    best = float(r.max())
    args = tuple(int(k) for k in n[r >= best * (1 - tie_rtol)])
    return PhaseLimit(best, args, Klass.ODD if odd else Klass.NON_ODD)


def rho_d(interval, tie_rtol=TIE_RTOL, upto=None):
    """max over 1 <= n <= n_max of |psi_d(n)|/phi_d(n).

    ``upto`` overrides the search bound (for brute-force comparisons).
    """
    return _limit(interval, False, tie_rtol, upto)


def rho_d_odd(interval, tie_rtol=TIE_RTOL, upto=None):
    return _limit(interval, True, tie_rtol, upto)


def signed_ratios(interval, klass=Klass.NON_ODD, upto=None):
    """Signed limiting ratios over n = +-1..+-upto.

    Returns arrays ``(n, tap_sign, ratio)``: the integral ratio of the
    limiting multiplier ``1 - tap_sign * z^-n``. The non-odd class uses
    positive taps only.
    """
    klass = Klass.parse(klass)
    m = np.arange(1, (upto or n_max(interval)) + 1, dtype=float)
    ps = _psi(m, interval.a, interval.b)
    f1 = _phi1(m, interval.a, interval.b)
    n = np.concatenate([m, -m])
    psi_all = np.concatenate([ps, -ps])
    f1_all = np.concatenate([f1, f1])
    taps = [1.0] if klass is Klass.NON_ODD else [1.0, -1.0]
    ns, ss, rs = [], [], []
    for s in taps:
        ns.append(n)
        ss.append(np.full_like(n, s))
        rs.append(s * psi_all / (interval.width + s * f1_all))
    return (np.concatenate(ns).astype(int), np.concatenate(ss).astype(int),
            np.concatenate(rs))


def achieving_set(interval, klass=Klass.NON_ODD, sign=Sign.POSITIVE, tie_rtol=TIE_RTOL):
    klass = Klass.parse(klass)
    sign = Sign(sign)
    n, s, r = signed_ratios(interval, klass)
    target = sign * r
    best = float(target.max())
    hit = np.flatnonzero(target >= best * (1 - tie_rtol))
    order = hit[np.argsort(n[hit], kind='stable')]
    return AchievingSet(tuple(int(x) for x in n[order]), sign, klass, best,
                        tuple(int(x) for x in s[order]))


def tie_b(a, m, n, lo, hi, klass=Klass.NON_ODD):
    """Right end b in (lo, hi) at which indices m and n give equal signed ratios.

    Positive tap signs are assumed for both indices.
    """
    def gap(b):
        iv = DtInterval(a, b)
        rm = _psi(float(m), a, b) / (iv.width + _phi1(float(m), a, b))
        rn = _psi(float(n), a, b) / (iv.width + _phi1(float(n), a, b))
        return rm - rn

    return brentq(gap, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def sparse_multiplier(achieving, weights, eps):
    """Limiting multiplier ``1 - sum_n h_n z^-n`` on the achieving set.

    ``weights`` are nonnegative, one per member, and are rescaled to sum to
    ``1 - eps``; each tap takes the member's tap sign.
    """
    if not 0 < eps < 1:
        raise ConstructionError("eps must lie in (0, 1)")
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(achieving.members),):
        raise ConstructionError("one weight per achieving-set member required")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ConstructionError("weights must be finite and nonnegative")
    total = w.sum()
    if total <= 0:
        raise ConstructionError("weights must not all vanish")
    h = (1.0 - eps) * w / total * np.asarray(achieving.tap_signs, dtype=float)
    if achieving.klass is Klass.NON_ODD and np.any(h < 0):
        raise ConstructionError("non-odd multipliers need nonnegative taps")
    return FirMultiplier(dict(zip(achieving.members, h)))


def integral_ratio(m, interval):
    """(integral of Im M) / (integral of Re M) over [a, b], in closed form."""
    n = m.indices.astype(float)
    h = m.weights
    if np.any(n == 0):
        raise DomainError("taps at n = 0 are not allowed")
    im = float(np.sum(h * _psi(n, interval.a, interval.b)))
    re = interval.width + float(np.sum(h * _phi1(n, interval.a, interval.b)))
    if re <= 0:
        raise NonPositiveMassError("integral of Re M over the interval is not positive")
    return im / re
