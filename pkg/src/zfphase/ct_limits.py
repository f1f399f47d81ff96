"""Continuous-time phase limitations of Zames-Falb multipliers.

For intervals ``0 < a < b < c < d`` a multiplier whose phase exceeds
``atan(rho)`` on [a, b] and lies below ``-atan(kappa*rho)`` on [c, d] must
have ``rho < rho_c`` (non-odd class) or ``rho < rho_c_odd`` (odd class),
where ``rho_c = sup_t |psi(t)|/phi(t)`` and ``rho_c_odd`` uses
``phi_tilde`` instead of ``phi``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._common import Klass, PhaseLimit
from .errors import (DegeneratePhaseError, DomainError, SearchIncompleteError,
                     ValidationError)
from .lti import freq_response, nyquist_value

__all__ = ['CtLimitParams', 'SweepConfig', 'Verdict', 'Klass', 'PhaseLimit',
           'psi', 'phi', 'phi1', 'phi_tilde', 'gamma', 'rho_c', 'rho_c_odd',
           'ct_limitation_verdict', 'interval_phase_pattern']

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CtLimitParams:
    """Interval pair and weights.

    Use :meth:`from_intervals` to get lambda and mu from the balance
    condition ``lambda/mu = (d^2 - c^2)/(b^2 - a^2)``, scaled so that
    ``lambda*(b - a) + kappa*mu*(d - c) = 1``.
    """

    a: float
    b: float
    c: float
    d: float
    kappa: float
    lam: float
    mu: float

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if not all(np.isfinite([a, b, c, d, self.kappa, self.lam, self.mu])):
            raise ValidationError("parameters must be finite")
        if not 0 < a < b < c < d:
            raise ValidationError(f"need 0 < a < b < c < d, got {(a, b, c, d)}")
        if self.kappa <= 0 or self.lam <= 0 or self.mu <= 0:
            raise ValidationError("kappa, lambda and mu must be positive")
        ratio = (d * d - c * c) / (b * b - a * a)
        if abs(self.lam / self.mu - ratio) > 1e-12 * ratio:
            raise ValidationError(
                f"lambda/mu = {self.lam / self.mu!r} violates the balance "
                f"condition (d^2-c^2)/(b^2-a^2) = {ratio!r}")

    @classmethod
    def from_intervals(cls, a, b, c, d, kappa=1.0):
        a, b, c, d, kappa = map(float, (a, b, c, d, kappa))
        if not 0 < a < b < c < d:
            raise ValidationError(f"need 0 < a < b < c < d, got {(a, b, c, d)}")
        if kappa <= 0:
            raise ValidationError("kappa must be positive")
        r = (d * d - c * c) / (b * b - a * a)
        mu = 1.0 / (r * (b - a) + kappa * (d - c))
        return cls(a, b, c, d, kappa, r * mu, mu)

    @property
    def base(self):
        """``lambda*(b - a) + kappa*mu*(d - c)``, the limit of phi at infinity."""
        return self.lam * (self.b - self.a) + self.kappa * self.mu * (self.d - self.c)


@dataclass(frozen=True)
class SweepConfig:
    points_per_decade: int = 4000
    min_points_per_period: int = 20
    t_switch: float | None = None
    rtol: float = 1e-10
    tie_rtol: float = 1e-9
    max_decades: float = 12.0

    def __post_init__(self):
        if self.points_per_decade < 10 or self.min_points_per_period < 4:
            raise ValidationError("sweep grid too coarse")
        if self.rtol <= 0 or self.tie_rtol < 0:
            raise ValidationError("tolerances must be positive")


class Verdict(enum.Enum):
    PRECLUDED = 'precluded'
    INCONCLUSIVE = 'inconclusive'


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("t must be strictly positive")
    return t


def _cos_diff(x, y):
    # cos x - cos y without cancellation for nearby x, y
    return 2.0 * np.sin(0.5 * (x + y)) * np.sin(0.5 * (y - x))


def _sin_diff(x, y):
    return 2.0 * np.cos(0.5 * (x + y)) * np.sin(0.5 * (x - y))


def _psi(t, p):
    return (p.lam * _cos_diff(p.a * t, p.b * t) - p.mu * _cos_diff(p.c * t, p.d * t)) / t


def _phi1(t, p):
    return (p.lam * _sin_diff(p.a * t, p.b * t)
            + p.kappa * p.mu * _sin_diff(p.c * t, p.d * t)) / t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def psi(t, p):
    return _out(_psi(_check_t(t), p))


def phi1(t, p):
    return _out(_phi1(_check_t(t), p))


def phi(t, p):
    return _out(p.base + _phi1(_check_t(t), p))


def phi_tilde(t, p):
    return _out(p.base - np.abs(_phi1(_check_t(t), p)))


def gamma(p):
    """Slope of psi/phi at the origin: psi(t)/phi(t) = gamma*t + O(t^3)."""
    a, b, c, d = p.a, p.b, p.c, p.d
    num = p.lam * (b**4 - a**4) - p.mu * (d**4 - c**4)
    den = p.lam * (b**3 - a**3) + p.kappa * p.mu * (d**3 - c**3)
    return -0.25 * num / den


def _ratio(t, p, odd):
    ps = _psi(t, p)
    f1 = _phi1(t, p)
    den = p.base - np.abs(f1) if odd else p.base + f1
    return np.abs(ps) / den


def _tail_bound(t, p):
    """Upper bound on the ratio for all arguments beyond t (inf if not yet valid)."""
    den = p.base - 2.0 * (p.lam + p.kappa * p.mu) / t
    return 2.0 * (p.lam + p.mu) / t / den if den > 0 else np.inf


def _golden_max(f, lo, hi, rtol):
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > rtol * max(abs(lo), abs(hi)):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _sup_search(p, odd, cfg):
    cfg = cfg or SweepConfig()
    klass = Klass.ODD if odd else Klass.NON_ODD
    t_switch = cfg.t_switch if cfg.t_switch is not None else 1e-3 / p.d
    # below t_switch the ratio is |gamma|*t to third order, increasing in t
    cands = [(abs(gamma(p)) * t_switch, t_switch)]
    best = cands[0][0]

    def f(x):
        return float(_ratio(np.float64(x), p, odd))

    t0 = t_switch
    t_limit = t_switch * 10.0 ** cfg.max_decades
    while True:
        t1 = t0 * 10.0
        n_period = cfg.min_points_per_period * (t1 - t0) * p.d / (2 * np.pi)
        n = int(max(cfg.points_per_decade, n_period)) + 1
        t = np.geomspace(t0, t1, n)
        r = _ratio(t, p, odd)
        inner = np.flatnonzero((r[1:-1] >= r[:-2]) & (r[1:-1] >= r[2:])) + 1
        for i in inner:
            if r[i] < best * (1 - 1e-3):
                continue
            tx, fx = _golden_max(f, t[i - 1], t[i + 1], cfg.rtol)
            cands.append((fx, tx))
            best = max(best, fx)
        if r[-1] > best:
            best = float(r[-1])
            cands.append((best, float(t[-1])))
        if _tail_bound(t1, p) < best:
            break
        if t1 >= t_limit:
            partial = _collect(cands, best, klass, cfg)
            raise SearchIncompleteError(
                f"tail bound did not drop below {best:.6g} by t = {t1:.3g}", partial)
        # overlap chunks so a peak on the seam is interior to the next one
        t0 = float(t[-3])
    return _collect(cands, best, klass, cfg)


def _collect(cands, best, klass, cfg):
    args = sorted({float(t) for v, t in cands if v >= best * (1 - cfg.tie_rtol)})
    return PhaseLimit(float(best), tuple(args), klass)


def rho_c(p, search=None):
    """sup over t > 0 of |psi(t)|/phi(t)."""
    return _sup_search(p, False, search)


def rho_c_odd(p, search=None):
    """sup over t > 0 of |psi(t)|/phi_tilde(t)."""
    return _sup_search(p, True, search)


def interval_phase_pattern(ideal_1, ideal_2, kappa):
    """Largest rho compatible with the required phases on both intervals.

    ``ideal_1`` and ``ideal_2`` are ideal multiplier phases (degrees) sampled
    on [a, b] and [c, d]. Returns ``(rho, sign)`` where ``sign`` is +1 when
    the phase must be positive on [a, b] and negative on [c, d], -1 for the
    mirrored pattern, or ``(0.0, 0)`` when neither pattern holds.
    """
    ideal_1 = np.asarray(ideal_1, dtype=float)
    ideal_2 = np.asarray(ideal_2, dtype=float)
    for sign in (1, -1):
        if np.all(sign * ideal_1 > 0) and np.all(sign * ideal_2 < 0):
            rho_1 = np.tan(np.radians(np.min(np.abs(ideal_1))))
            rho_2 = np.tan(np.radians(np.min(np.abs(ideal_2)))) / kappa
            return float(min(rho_1, rho_2)), sign
    return 0.0, 0


def ct_limitation_verdict(tf, k, interval_1, interval_2, kappa=1.0,
                          klass=Klass.NON_ODD, points=1000, search=None):
    """Decide whether the limitation rules out every multiplier for slope k.

    The phase a multiplier needs on each interval is taken from the ideal
    phase of 1 + kG. The verdict is ``PRECLUDED`` when that requirement has
    opposite constant signs on the two intervals and the implied rho reaches
    ``rho_c`` (or ``rho_c_odd``).
    """
    from .analysis import ideal_phase

    klass = Klass.parse(klass)
    if tf.is_discrete:
        raise DomainError("continuous-time plant required")
    if not k > 0:
        raise DomainError("k must be positive")
    if k >= nyquist_value(tf):
        raise DomainError("k must be below the Nyquist value")
    (a, b), (c, d) = interval_1, interval_2
    p = CtLimitParams.from_intervals(a, b, c, d, kappa)
    w1 = np.linspace(a, b, points)
    w2 = np.linspace(c, d, points)
    for w in (w1, w2):
        if np.any(np.abs(1.0 + k * freq_response(tf, w)) <= 1e-12):
            raise DegeneratePhaseError("1 + kG vanishes inside an interval")
    rho_req, sign = interval_phase_pattern(ideal_phase(tf, k, w1),
                                           ideal_phase(tf, k, w2), kappa)
    if sign == 0:
        return Verdict.INCONCLUSIVE
    limit = rho_c(p, search) if klass is Klass.NON_ODD else rho_c_odd(p, search)
    return Verdict.PRECLUDED if rho_req >= limit.rho else Verdict.INCONCLUSIVE
