"""Plant-facing procedures built on the phase limitations.

The central quantity is the *ideal multiplier phase*: the phase a
multiplier M needs so that M(1 + kG) has positive real part. Wherever the
phase of 1 + kG leaves the band [-90, 90] degrees, a multiplier must make
up the excess with the opposite sign.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._common import Klass, Sign
from .dt_limits import DtInterval, rho_d, rho_d_odd
from .errors import DegeneratePhaseError, DomainError
from .lti import Domain, default_grid, freq_response, nyquist_value

__all__ = ['ideal_phase', 'ViolationCertificate', 'find_violation', 'KplResult',
           'k_pl', 'BoundResult', 'offaxis_ct', 'offaxis_conjecture_k',
           'offaxis_reduced', 'SlopeReport', 'slope_report']

PHASE_GRID_POINTS = 2000
LEVELS = 200
OFFAXIS_ANGLES = 1800
OFFAXIS_GRID_POINTS = 4001


def ideal_phase(tf, k, grid):
    """Required multiplier phase in degrees.

    With theta the principal phase of 1 + kG: ``90 - theta`` where
    theta > 90, ``-90 - theta`` where theta < -90 and 0 elsewhere.
    """
    if not k > 0:
        raise DomainError("k must be positive")
    g = 1.0 + k * freq_response(tf, grid)
    if np.any(np.abs(g) <= 1e-12):
        raise DegeneratePhaseError("1 + kG vanishes on the grid")
    theta = np.angle(g, deg=True)
    return np.where(theta > 90, 90 - theta, np.where(theta < -90, -90 - theta, 0.0))


@dataclass(frozen=True)
class ViolationCertificate:
    """An interval on which the required phase exceeds the limitation."""

    interval: DtInterval
    k: float
    required_angle_deg: float
    limit_angle_deg: float
    sign: Sign
    klass: Klass = Klass.NON_ODD

    @property
    def margin_deg(self):
        return self.required_angle_deg - self.limit_angle_deg

    def to_dict(self):
        return {'a': self.interval.a, 'b': self.interval.b, 'k': self.k,
                'required_angle_deg': self.required_angle_deg,
                'limit_angle_deg': self.limit_angle_deg,
                'sign': int(self.sign), 'klass': self.klass.value}


def _runs(mask, sgn):
    """Maximal index runs [i, j] (j > i) where mask holds with constant sign."""
    out = []
    i, n = 0, len(mask)
    while i < n:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and mask[j + 1] and sgn[j + 1] == sgn[i]:
            j += 1
        if j > i:
            out.append((i, j))
        i = j + 1
    return out


def find_violation(tf, k, klass=Klass.NON_ODD, grid_points=PHASE_GRID_POINTS,
                   levels=LEVELS):
    """Water-level search for an interval where no multiplier can supply the phase.

    Every level L (quantiles of the sampled |ideal phase|) cuts the grid into
    runs where |ideal phase| >= L with constant sign. A run [a, b] violates
    the limitation when L > atan(rho_d(a, b)). Among all violating pairs the
    one with the largest margin is returned, or ``None``.
    """
    if not tf.is_discrete:
        raise DomainError("find_violation needs a discrete-time plant")
    klass = Klass.parse(klass)
    limit_fn = rho_d if klass is Klass.NON_ODD else rho_d_odd
    w = np.linspace(0.0, np.pi, grid_points)
    ideal = ideal_phase(tf, k, w)
    mag = np.abs(ideal)
    if not np.any(mag > 0):
        return None
    sgn = np.sign(ideal)
    vals = np.unique(mag[mag > 0])
    ls = np.unique(np.quantile(vals, np.linspace(0.0, 1.0, levels)))[::-1]
    cache = {}
    best = None
    for level in ls:
        for i, j in _runs(mag >= level, sgn):
            if (i, j) not in cache:
                cache[(i, j)] = limit_fn(DtInterval(w[i], w[j])).angle_deg
            lim = cache[(i, j)]
            if level > lim and (best is None or level - lim > best[0]):
                best = (level - lim, i, j, level, lim)
    if best is None:
        return None
    _, i, j, level, lim = best
    return ViolationCertificate(DtInterval(w[i], w[j]), float(k), float(level),
                                float(lim), Sign(int(sgn[i])), klass)


@dataclass(frozen=True)
class KplResult:
    """``k_pl`` with diagnostics.

    ``active`` is False when no violating slope exists below the Nyquist
    value (``k_pl`` is then the Nyquist value). ``nonmonotone`` records a
    violation found below the reported value or a failed local bracket.
    """

    k_pl: float
    active: bool
    nonmonotone: bool = False
    certificate: ViolationCertificate | None = None

    def __float__(self):
        return float(self.k_pl)


def k_pl(tf, klass=Klass.NON_ODD, tol=1e-4, grid_points=PHASE_GRID_POINTS,
         levels=LEVELS, scan=40):
    """Smallest slope for which the discrete phase limitation rules out every multiplier."""
    if not tf.is_discrete:
        raise DomainError("k_pl needs a discrete-time plant")
    klass = Klass.parse(klass)
    k_n = nyquist_value(tf)

    def violates(k):
        return find_violation(tf, k, klass, grid_points, levels)

    top = k_n * (1 - 1e-6) if np.isfinite(k_n) else 1e6
    probes = np.geomspace(top * 1e-3, top, scan)
    hits = [k for k in probes if violates(k) is not None]
    if not hits:
        return KplResult(float(k_n), False)
    lo = max([k for k in probes if k < hits[0]], default=0.0)
    hi = hits[0]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if violates(mid) is not None:
            hi = mid
        else:
            lo = mid
    cert = violates(hi)
    below = max(hi - tol, tol * 1e-3)
    nonmono = violates(below) is not None or violates(min(hi + tol, top)) is None
    # a gap between the hits also means the predicate is not monotone in k
    nonmono = nonmono or any(violates(k) is None for k in probes if k > hits[0])
    return KplResult(float(hi), True, bool(nonmono), cert)


@dataclass(frozen=True)
class BoundResult:
    """A slope bound with a status: 'ok', 'unbounded' or 'not_applicable'."""

    value: float
    status: str = 'ok'

    def __float__(self):
        return float(self.value)


def _locus(tf, grid_points):
    if tf.is_discrete:
        w = np.linspace(0.0, np.pi, grid_points)
    else:
        w = default_grid(tf, grid_points)
    return w, freq_response(tf, w)


def _separation(g, anchor, thetas, chunk=256):
    """Best over thetas of min over the locus of the signed distance to the line.

    The line passes through (anchor, 0) with normal (cos theta, -sin theta).
    """
    x = g.real - anchor
    y = g.imag
    best, arg = -np.inf, None
    for s in range(0, len(thetas), chunk):
        th = thetas[s:s + chunk]
        dist = np.min(np.cos(th)[:, None] * x[None, :] - np.sin(th)[:, None] * y[None, :],
                      axis=1)
        i = int(np.argmax(dist))
        if dist[i] > best:
            best, arg = float(dist[i]), float(th[i])
    return best, arg


def _open_angles(n):
    return np.radians(np.linspace(-90.0, 90.0, n + 2)[1:-1])


def _separable(g, k, delta_rel, n_angles):
    anchor = -1.0 / k + delta_rel / k
    return _separation(g, anchor, _open_angles(n_angles))[0] > 0


def offaxis_ct(tf, k, delta_rel=1e-6, n_angles=OFFAXIS_ANGLES,
               grid_points=OFFAXIS_GRID_POINTS):
    """Does a line through (-1/k + delta, 0) keep the locus (w >= 0) strictly to its right?"""
    if tf.is_discrete:
        raise DomainError("offaxis_ct needs a continuous-time plant")
    if not tf.is_stable():
        raise DomainError("plant must be stable")
    if not k > 0:
        raise DomainError("k must be positive")
    _, g = _locus(tf, grid_points)
    return bool(_separable(g, k, delta_rel, n_angles))


def _largest_k(pred, tol, k_cap=1e9):
    """Bisection for the largest k with pred(k), assuming pred holds for small k."""
    lo = 1.0
    while not pred(lo):
        lo *= 0.5
        if lo < 1e-12:
            return 0.0
    hi = 2.0 * lo
    while pred(hi):
        lo, hi = hi, 2.0 * hi
        if hi > k_cap:
            return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def offaxis_conjecture_k(tf, tol=1e-4, delta_rel=1e-6, n_angles=OFFAXIS_ANGLES,
                         grid_points=OFFAXIS_GRID_POINTS):
    """Largest k that the direct discrete analogue of the off-axis criterion would accept.

    That analogue is false in general; this value is reported for comparison.
    """
    if not tf.is_discrete:
        raise DomainError("offaxis_conjecture_k needs a discrete-time plant")
    if not tf.is_stable():
        raise DomainError("plant must be stable")
    _, g = _locus(tf, grid_points)
    k = _largest_k(lambda kk: _separable(g, kk, delta_rel, n_angles), tol)
    return BoundResult(k, 'unbounded' if math.isinf(k) else 'ok')


def _reduced_ok(w, g, tf, k2, n_angles):
    p = -1.0 / k2
    below = np.flatnonzero(g.real < p)
    if below.size == 0:
        w0 = 0.0
    else:
        i = below[-1]
        if i + 1 < len(w):
            w0 = brentq(lambda x: freq_response(tf, [x])[0].real - p, w[i], w[i + 1],
                        xtol=1e-12)
        else:
            w0 = w[i]
    seg = g.imag[w <= w0]
    tiny = 1e-12 * max(1.0, float(np.max(np.abs(g))))
    if np.all(seg <= tiny):
        thetas = np.linspace(0.0, np.pi / 2 - w0 / 2, n_angles)
    elif np.all(seg >= -tiny):
        thetas = np.linspace(w0 / 2 - np.pi / 2, 0.0, n_angles)
    else:
        return None
    return _separation(g, p, thetas)[0] > 0


def offaxis_reduced(tf, tol=1e-4, n_angles=OFFAXIS_ANGLES, grid_points=OFFAXIS_GRID_POINTS):
    """Largest K2 accepted by the reduced discrete off-axis criterion.

    omega_0 is the last frequency at which Re G crosses -1/K2 (so Re G stays
    above -1/K2 beyond it); the line angle is capped by pi/2 - omega_0/2.
    Returns status 'not_applicable' when Im G changes sign on [0, omega_0]
    at the first failing K2.
    """
    if not tf.is_discrete:
        raise DomainError("offaxis_reduced needs a discrete-time plant")
    if not tf.is_stable():
        raise DomainError("plant must be stable")
    w, g = _locus(tf, grid_points)
    state = {'na': False}

    def pred(k2):
        ok = _reduced_ok(w, g, tf, k2, n_angles)
        if ok is None:
            state['na'] = True
            return False
        return ok

    k2 = _largest_k(pred, tol)
    if math.isinf(k2):
        return BoundResult(k2, 'unbounded')
    if k2 == 0.0 and state['na']:
        return BoundResult(math.nan, 'not_applicable')
    return BoundResult(k2, 'ok')


@dataclass
class SlopeReport:
    k_N: float
    k_PL: float
    k_RO: float
    k_O: float
    klass: Klass = Klass.NON_ODD
    k_ZF_ref: float | None = None
    k_C_ref: float | None = None
    flags: dict = field(default_factory=dict)

    def ordering(self):
        """Names of the finite slopes sorted by value."""
        items = {'k_N': self.k_N, 'k_PL': self.k_PL, 'k_RO': self.k_RO, 'k_O': self.k_O,
                 'k_ZF_ref': self.k_ZF_ref, 'k_C_ref': self.k_C_ref}
        return [n for n, v in sorted(items.items(), key=lambda kv: kv[1] or 0.0)
                if v is not None and np.isfinite(v)]

    def to_dict(self):
        def num(v):
            if v is None:
                return None
            return v if np.isfinite(v) else ('inf' if v > 0 else 'nan')

        return {'k_N': num(self.k_N), 'k_PL': num(self.k_PL), 'k_RO': num(self.k_RO),
                'k_O': num(self.k_O), 'k_ZF_ref': num(self.k_ZF_ref),
                'k_C_ref': num(self.k_C_ref), 'klass': self.klass.value,
                'ordering': self.ordering(), 'flags': self.flags}


def slope_report(tf, klass=Klass.NON_ODD, k_zf_ref=None, k_c_ref=None, tol=1e-4):
    if tf.domain is not Domain.DISCRETE:
        raise DomainError("slope_report needs a discrete-time plant")
    klass = Klass.parse(klass)
    k_n = nyquist_value(tf)
    if tf.is_zero:
        pl = KplResult(math.inf, False)
    else:
        pl = k_pl(tf, klass, tol)
    ro = offaxis_reduced(tf, tol)
    ko = offaxis_conjecture_k(tf, tol)
    flags = {'k_PL_active': pl.active, 'k_PL_nonmonotone': pl.nonmonotone,
             'k_RO_status': ro.status, 'k_O_status': ko.status}
    return SlopeReport(k_n, pl.k_pl, ro.value, ko.value, klass, k_zf_ref, k_c_ref, flags)
