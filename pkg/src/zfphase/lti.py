"""Rational SISO transfer functions in the s- and z-domain.

Frequency responses are evaluated on the stability boundary: ``s = j*omega``
for continuous-time plants and ``z = exp(j*omega)`` for discrete-time ones.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (DomainError, PoleOnBoundaryError, UndefinedPhaseError,
                     ValidationError)

__all__ = ['Domain', 'TransferFunction', 'frequency_grid', 'default_grid',
           'freq_response', 'phase_deg', 'nyquist_value', 'positivity_check']

STABILITY_MARGIN = 1e-9
NYQUIST_GRID_POINTS = 10_001


class Domain(enum.Enum):
    CONTINUOUS = 'continuous'
    DISCRETE = 'discrete'


def _trim(coeffs):
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    nz = np.flatnonzero(c)
    return c[nz[0]:] if nz.size else np.zeros(1)


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """G = num/den, coefficients in descending powers of s (or z)."""

    num: np.ndarray
    den: np.ndarray
    domain: Domain = Domain.CONTINUOUS

    def __post_init__(self):
        domain = Domain(self.domain)
        num, den = _trim(self.num), _trim(self.den)
        if not np.all(np.isfinite(num)) or not np.all(np.isfinite(den)):
            raise ValidationError("coefficients must be finite")
        if den[0] == 0:
            raise ValidationError("leading denominator coefficient must be nonzero")
        object.__setattr__(self, 'num', num)
        object.__setattr__(self, 'den', den)
        object.__setattr__(self, 'domain', domain)

    @classmethod
    def continuous(cls, num, den):
        return cls(num, den, Domain.CONTINUOUS)

    @classmethod
    def discrete(cls, num, den):
        return cls(num, den, Domain.DISCRETE)

    @classmethod
    def from_dict(cls, doc):
        """Build from the JSON plant document ``{"domain", "num", "den"}``."""
        try:
            return cls(doc['num'], doc['den'], Domain(doc['domain']))
        except KeyError as exc:
            raise ValidationError(f"plant document missing field {exc}") from None
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"invalid plant document: {exc}") from None

    def to_dict(self):
        return {'domain': self.domain.value,
                'num': self.num.tolist(), 'den': self.den.tolist()}

    @property
    def is_discrete(self):
        return self.domain is Domain.DISCRETE

    @property
    def is_zero(self):
        return not np.any(self.num)

    @property
    def relative_degree(self):
        return (len(self.den) - 1) - (len(self.num) - 1)

    def is_proper(self):
        return self.is_zero or self.relative_degree >= 0

    def is_strictly_proper(self):
        return self.is_zero or self.relative_degree > 0

    def poles(self):
        return np.roots(self.den)

    def zeros(self):
        return np.roots(self.num) if not self.is_zero else np.array([])

    def is_stable(self, margin=STABILITY_MARGIN):
        p = self.poles()
        if p.size == 0:
            return True
        if self.is_discrete:
            return bool(np.all(np.abs(p) < 1.0 - margin))
        return bool(np.all(p.real < -margin))

    def scaled(self, alpha):
        return TransferFunction(alpha * self.num, self.den, self.domain)

    def boundary_points(self, omega):
        omega = np.asarray(omega, dtype=float)
        if self.is_discrete:
            return np.exp(1j * omega)
        return 1j * omega

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        return np.polyval(self.num, x) / np.polyval(self.den, x)

    def __repr__(self):
        return (f"TransferFunction(num={self.num.tolist()}, den={self.den.tolist()}, "
                f"domain={self.domain.value!r})")


def frequency_grid(points, domain=Domain.CONTINUOUS):
    """Validate a frequency grid and return it as a float array."""
    w = np.atleast_1d(np.asarray(points, dtype=float))
    if w.ndim != 1 or w.size == 0:
        raise ValidationError("frequency grid must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(w)):
        raise ValidationError("frequency grid must be finite")
    if w.size > 1 and np.any(np.diff(w) <= 0):
        raise ValidationError("frequency grid must be strictly increasing")
    if Domain(domain) is Domain.DISCRETE and (w[0] < 0 or w[-1] > np.pi):
        raise ValidationError("discrete frequency grid must lie within [0, pi]")
    return w


def default_grid(tf, n=NYQUIST_GRID_POINTS):
    """Grid on [0, pi] (discrete) or {0} plus log-spaced points (continuous).

    The continuous range spans three decades either side of the pole/zero
    magnitudes.
    """
    if tf.is_discrete:
        return np.linspace(0.0, np.pi, n)
    roots = np.concatenate([tf.poles(), tf.zeros()])
    mags = np.abs(roots[np.abs(roots) > 1e-12])
    lo = mags.min() / 1e3 if mags.size else 1e-3
    hi = mags.max() * 1e3 if mags.size else 1e3
    return np.concatenate([[0.0], np.geomspace(lo, hi, n - 1)])


def freq_response(tf, grid):
    """Evaluate G(j*omega) or G(exp(j*omega)) on ``grid``."""
    w = np.atleast_1d(np.asarray(grid, dtype=float))
    x = tf.boundary_points(w)
    den = np.polyval(tf.den, x)
    scale = np.sum(np.abs(tf.den)) * np.maximum(1.0, np.abs(x)) ** (len(tf.den) - 1)
    bad = np.abs(den) <= 1e-13 * scale
    if np.any(bad):
        raise PoleOnBoundaryError(
            f"pole on the stability boundary at omega={w[np.argmax(bad)]:g}")
    return np.polyval(tf.num, x) / den


def phase_deg(tf, grid):
    """Continuous (unwrapped) phase in degrees."""
    g = freq_response(tf, grid)
    if np.any(g == 0):
        raise UndefinedPhaseError("response is exactly zero at a grid point")
    return np.unwrap(np.angle(g, deg=True), period=360.0)


def _real_axis_crossings(tf, w):
    """Frequencies where Im G changes sign (or vanishes) on the grid."""
    g = freq_response(tf, w)
    im = g.imag
    tiny = 1e-14 * np.maximum(np.abs(g), 1e-300)
    on_axis = np.abs(im) <= tiny
    found = list(w[on_axis])
    s = np.sign(np.where(on_axis, 0.0, im))
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)

    def f(x):
        return tf(tf.boundary_points(x)).imag

    for i in idx:
        found.append(brentq(f, w[i], w[i + 1], xtol=1e-10, rtol=4 * np.finfo(float).eps))
    return np.array(sorted(found))


def nyquist_value(tf, n=NYQUIST_GRID_POINTS):
    """Supremum of k such that 1 + tau*k*G has no zero on the boundary for tau in [0, 1].

    Equals ``min(-1/Re G)`` over crossings of the negative real axis, or
    ``inf`` when the locus never reaches it.
    """
    if not tf.is_stable():
        raise DomainError("Nyquist value is only defined for stable plants")
    if tf.is_zero:
        return np.inf
    w = default_grid(tf, n)
    crossings = _real_axis_crossings(tf, w)
    candidates = []
    if crossings.size:
        re = freq_response(tf, crossings).real
        candidates.extend(-1.0 / re[re < 0])
    if not tf.is_discrete and tf.relative_degree == 0:
        g_inf = tf.num[0] / tf.den[0]
        if g_inf < 0:
            candidates.append(-1.0 / g_inf)
    return float(min(candidates)) if candidates else np.inf


def positivity_check(m, tf, k, grid, margin=0.0):
    """Sampled test of Re{M (1 + k G)} > margin.

    ``m`` is either an array of multiplier values on ``grid`` or an object
    with a ``response(grid)`` method. This is a necessary condition on the
    sampled points only, never a certificate over the continuum.
    """
    if k <= 0:
        raise DomainError("k must be positive")
    w = np.atleast_1d(np.asarray(grid, dtype=float))
    mv = m.response(w) if hasattr(m, 'response') else np.asarray(m, dtype=complex)
    if mv.shape != w.shape:
        mv = np.broadcast_to(mv, w.shape)
    return bool(np.all(np.real(mv * (1.0 + k * freq_response(tf, w))) > margin))
