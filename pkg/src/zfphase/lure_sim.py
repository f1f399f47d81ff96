"""Time-domain simulation of the Lur'e loop

    v = f + G w,    w = -N(v) + g

with a piecewise-linear slope-restricted N, plus periodic-orbit tools.
"""

import bisect
import enum
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.signal import tf2ss as _tf2ss

from .errors import DomainError, ValidationError
from .lti import freq_response

__all__ = ['PiecewiseLinearNonlinearity', 'SimConfig', 'SimResult', 'StateSpace',
           'Solver', 'tf_to_ss', 'simulate', 'detect_period', 'constant_until',
           'pulse', 'find_periodic_kick', 'FlatCycle', 'find_flat_cycle']

DIVERGENCE_NORM = 1e12


class PiecewiseLinearNonlinearity:
    """Continuous piecewise-linear map through ``(breakpoints[i], values[i])``.

    Outside the breakpoints the map extends with ``left_slope`` and
    ``right_slope``. N(0) must be 0.
    """

    def __init__(self, breakpoints, values, left_slope=0.0, right_slope=0.0):
        bp = [float(x) for x in breakpoints]
        vals = [float(y) for y in values]
        if len(bp) != len(vals) or not bp:
            raise ValidationError("need as many node values as breakpoints (at least one)")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(bp + vals + [left_slope, right_slope])):
            raise ValidationError("nonlinearity data must be finite")
        self.breakpoints = tuple(bp)
        self.values = tuple(vals)
        self.left_slope = float(left_slope)
        self.right_slope = float(right_slope)
        inner = [(y1 - y0) / (x1 - x0) for x0, x1, y0, y1 in zip(bp, bp[1:], vals, vals[1:])]
        self.slopes = tuple([self.left_slope] + inner + [self.right_slope])
        if abs(self(0.0)) > 1e-12 * max(1.0, max(abs(v) for v in vals)):
            raise ValidationError("nonlinearity must satisfy N(0) = 0")

    @classmethod
    def saturation(cls, k, level=1.0):
        """k * clip(x, -level, level)."""
        if k < 0 or level <= 0:
            raise ValidationError("need k >= 0 and level > 0")
        return cls([-level, level], [-k * level, k * level])

    @classmethod
    def deadzone_saturation(cls, k, delta, m1, m2):
        """clip(k * dz_delta(x), -m1, m2) with dz_delta(x) = sign(x) * max(|x| - delta, 0)."""
        if k <= 0 or delta < 0 or m1 < 0 or m2 < 0:
            raise ValidationError("need k > 0 and delta, m1, m2 >= 0")
        nodes = [(-delta - m1 / k, -m1), (-delta, 0.0), (delta, 0.0), (delta + m2 / k, m2)]
        bp, vals = [], []
        for x, y in nodes:
            if not bp or x > bp[-1]:
                bp.append(x)
                vals.append(y)
        return cls(bp, vals)

    @classmethod
    def oshea_asymmetric(cls, k=1000.0):
        """-k for x < -1, k*x on [-1, 0], 0 for x > 0."""
        return cls([-1.0, 0.0], [-k, 0.0])

    @classmethod
    def from_dict(cls, doc):
        kind = doc.get('kind', 'pwl')
        try:
            if kind == 'saturation':
                return cls.saturation(doc['k'], doc.get('level', 1.0))
            if kind == 'deadzone_saturation':
                return cls.deadzone_saturation(doc['k'], doc['delta'], doc['m1'], doc['m2'])
            if kind == 'oshea':
                return cls.oshea_asymmetric(doc.get('k', 1000.0))
            if kind == 'pwl':
                return cls(doc['breakpoints'], doc['values'],
                           doc.get('left_slope', 0.0), doc.get('right_slope', 0.0))
        except KeyError as exc:
            raise ValidationError(f"nonlinearity document missing field {exc}") from None
        raise ValidationError(f"unknown nonlinearity kind {kind!r}")

    def to_dict(self):
        return {'kind': 'pwl', 'breakpoints': list(self.breakpoints),
                'values': list(self.values), 'left_slope': self.left_slope,
                'right_slope': self.right_slope}

    def __call__(self, x):
        if np.ndim(x):
            return np.array([self(xi) for xi in np.ravel(x)]).reshape(np.shape(x))
        bp, vals = self.breakpoints, self.values
        if x <= bp[0]:
            return vals[0] + self.left_slope * (x - bp[0])
        if x >= bp[-1]:
            return vals[-1] + self.right_slope * (x - bp[-1])
        i = bisect.bisect_right(bp, x) - 1
        return vals[i] + self.slopes[i + 1] * (x - bp[i])

    @property
    def max_slope(self):
        return max(self.slopes)

    def is_slope_restricted(self, k):
        """True when every segment slope lies in [0, k]."""
        return all(-1e-12 <= s <= k * (1 + 1e-12) for s in self.slopes)

    def is_odd(self, probes=None):
        if probes is None:
            span = max(1.0, max(abs(b) for b in self.breakpoints))
            probes = np.linspace(0.0, 2.0 * span, 101)
        return all(abs(self(x) + self(-x)) <= 1e-12 * max(1.0, abs(self(x))) for x in probes)

    def __repr__(self):
        return (f"PiecewiseLinearNonlinearity(breakpoints={list(self.breakpoints)}, "
                f"values={list(self.values)}, left_slope={self.left_slope}, "
                f"right_slope={self.right_slope})")


def constant_until(amplitude, t_end):
    """Signal equal to ``amplitude`` for t <= t_end and zero afterwards."""
    def sig(t):
        return amplitude if t <= t_end else 0.0
    return sig


def pulse(amplitude, width):
    """Discrete pulse: ``amplitude`` for samples 0..width-1."""
    def sig(n):
        return amplitude if n < width else 0.0
    return sig


class Solver(enum.Enum):
    RK4_FIXED = 'rk4'


@dataclass
class SimConfig:
    """Duration in seconds (continuous) or samples (discrete).

    ``f`` and ``g`` map time (or sample index) to a float; ``None`` is zero.
    """

    duration: float
    step: float = 1e-4
    solver: Solver = Solver.RK4_FIXED
    f: object = None
    g: object = None
    x0: object = None
    period_window: int = 60
    period_tol: float = 1e-3

    def __post_init__(self):
        if not self.duration > 0:
            raise ValidationError("duration must be positive")
        if not self.step > 0:
            raise ValidationError("step must be positive")
        self.solver = Solver(self.solver)


@dataclass
class SimResult:
    t: np.ndarray
    v: np.ndarray
    w: np.ndarray
    settled: bool
    period: int | None
    diverged: bool
    x_final: np.ndarray = field(default=None, repr=False)

    def flags(self):
        return {'settled': bool(self.settled), 'periodic': self.period is not None,
                'period': self.period, 'diverged': bool(self.diverged)}


@dataclass(frozen=True)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float


def tf_to_ss(tf):
    """Controllable canonical realization (A, B, C, D) of a proper SISO plant."""
    if not tf.is_proper():
        raise ValidationError("improper transfer function has no state-space realization")
    if tf.is_zero:
        return StateSpace(np.zeros((0, 0)), np.zeros(0), np.zeros(0), 0.0)
    A, B, C, D = _tf2ss(tf.num, tf.den)
    return StateSpace(A, B[:, 0], C[0], float(D[0, 0]))


def _zero(_):
    return 0.0


def _loop_discrete(A, B, C, nl, f, g, x, steps):
    n = len(x)
    v = np.empty(steps + 1)
    w = np.empty(steps + 1)
    diverged = False
    for s in range(steps + 1):
        vs = sum(C[i] * x[i] for i in range(n)) + f(s)
        ws = -nl(vs) + g(s)
        v[s], w[s] = vs, ws
        if s == steps:
            break
        x = [sum(A[i][j] * x[j] for j in range(n)) + B[i] * ws for i in range(n)]
        if x and max(abs(xi) for xi in x) > DIVERGENCE_NORM:
            v[s + 1:] = np.nan
            w[s + 1:] = np.nan
            diverged = True
            break
    return v, w, x, diverged


def _loop_rk4(A, B, C, nl, f, g, x, steps, h):
    n = len(x)
    rows = range(n)
    v = np.empty(steps + 1)
    w = np.empty(steps + 1)

    def out(x, t):
        vv = sum(C[i] * x[i] for i in rows) + f(t)
        return vv, -nl(vv) + g(t)

    def rhs(x, t):
        _, ww = out(x, t)
        return [sum(A[i][j] * x[j] for j in rows) + B[i] * ww for i in rows]

    diverged = False
    for s in range(steps + 1):
        t = s * h
        v[s], w[s] = out(x, t)
        if s == steps:
            break
        k1 = rhs(x, t)
        k2 = rhs([x[i] + 0.5 * h * k1[i] for i in rows], t + 0.5 * h)
        k3 = rhs([x[i] + 0.5 * h * k2[i] for i in rows], t + 0.5 * h)
        k4 = rhs([x[i] + h * k3[i] for i in rows], t + h)
        x = [x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in rows]
        if x and max(abs(xi) for xi in x) > DIVERGENCE_NORM:
            v[s + 1:] = np.nan
            w[s + 1:] = np.nan
            diverged = True
            break
    return v, w, x, diverged


def simulate(tf, nl, cfg):
    """Simulate the loop from state ``cfg.x0`` (zero by default).

    Continuous plants use fixed-step RK4 with step ``cfg.step``; discrete
    plants use the exact recursion x+ = A x + B w. Flags are computed
    afterwards: ``settled`` when the final quarter of |v| stays below 1e-3
    of its peak, ``period`` from :func:`detect_period` (discrete only),
    ``diverged`` when the state norm passed 1e12.
    """
    if not tf.is_stable():
        raise DomainError("plant must be stable")
    if min(nl.slopes) < -1e-12:
        raise ValidationError("nonlinearity must be nondecreasing")
    ss = tf_to_ss(tf)
    if ss.D != 0:
        raise ValidationError("plant must be strictly proper (no direct feedthrough)")
    n = ss.A.shape[0]
    x0 = np.zeros(n) if cfg.x0 is None else np.asarray(cfg.x0, dtype=float)
    if x0.shape != (n,):
        raise ValidationError(f"x0 must have {n} entries")
    A, B, C = ss.A.tolist(), ss.B.tolist(), ss.C.tolist()
    f = cfg.f or _zero
    g = cfg.g or _zero
    if tf.is_discrete:
        steps = int(round(cfg.duration))
        v, w, x, diverged = _loop_discrete(A, B, C, nl, f, g, x0.tolist(), steps)
        t = np.arange(steps + 1, dtype=float)
    else:
        steps = int(round(cfg.duration / cfg.step))
        v, w, x, diverged = _loop_rk4(A, B, C, nl, f, g, x0.tolist(), steps, cfg.step)
        t = np.arange(steps + 1) * cfg.step
    settled, period = False, None
    if not diverged:
        peak = float(np.max(np.abs(v)))
        tail = v[-max(len(v) // 4, 1):]
        settled = peak == 0.0 or float(np.max(np.abs(tail))) < 1e-3 * peak
        if tf.is_discrete and len(v) > 4 * cfg.period_window:
            period = detect_period(v, cfg.period_window, cfg.period_tol)
    return SimResult(t, v, w, bool(settled), period, diverged, np.asarray(x))


def detect_period(series, window, tol=1e-3):
    """Smallest p in [2, window] with the last window matching itself shifted by p.

    The mismatch is the max abs difference relative to the max abs value of
    the window. Constant or vanishing tails return ``None``.
    """
    x = np.asarray(series, dtype=float)
    window = int(window)
    if window < 2 or len(x) <= 4 * window or not np.all(np.isfinite(x[-2 * window:])):
        return None
    tail = x[-window:]
    scale = float(np.max(np.abs(tail)))
    if scale < 1e-9 or np.ptp(tail) < 0.1 * scale:
        return None
    for p in range(2, window + 1):
        prev = x[len(x) - window - p:len(x) - p]
        if float(np.max(np.abs(tail - prev))) < tol * scale:
            return p
    return None


def find_periodic_kick(tf, nl, amplitudes, widths=(1, 2, 3, 5), duration=3000,
                       window=60, tol=1e-3):
    """First pulse input ``(amplitude, width)`` that drives the loop onto a periodic orbit.

    Returns ``(amplitude, width, SimResult)`` or ``None``.
    """
    for width in widths:
        for amp in amplitudes:
            cfg = SimConfig(duration, g=pulse(amp, width), period_window=window,
                            period_tol=tol)
            res = simulate(tf, nl, cfg)
            if res.period is not None:
                return amp, width, res
    return None


def _circulant(tf, period):
    """Map from one period of w to one period of the steady-state v = G w."""
    w = 2 * np.pi * np.arange(period) / period
    gv = freq_response(tf, w)
    return np.real(np.fft.ifft(gv[:, None] * np.fft.fft(np.eye(period), axis=0), axis=0))


def _patterns(period):
    """Sign patterns in {-1, 0, 1}^period up to rotation, excluding all-zero."""
    seen = set()
    for pat in itertools.product((-1, 0, 1), repeat=period):
        if not any(pat):
            continue
        canon = min(pat[i:] + pat[:i] for i in range(period))
        if canon in seen:
            continue
        seen.add(canon)
        yield canon


def _flat_lp(H, pattern, k):
    """Max-slack (delta, m1, m2) for an orbit visiting only the flat pieces of N.

    Pattern entry -1 means v_i lies on the lower saturation, 0 in the
    deadzone and +1 on the upper saturation. Variables (delta, m1, m2, s);
    m1 + m2 = 1 fixes the scale.
    """
    P = len(pattern)
    neg = np.array([p == -1 for p in pattern], dtype=float)
    pos = np.array([p == 1 for p in pattern], dtype=float)
    # u = -m1*neg + m2*pos and v = -H u
    dv_dm1 = H @ neg
    dv_dm2 = -H @ pos
    rows, rhs = [], []
    for i, p in enumerate(pattern):
        vi = np.array([0.0, dv_dm1[i], dv_dm2[i], 0.0])
        if p == -1:
            rows.append(vi + [1.0, 1.0 / k, 0.0, 1.0])
            rhs.append(0.0)
        elif p == 1:
            rows.append(-vi + [1.0, 0.0, 1.0 / k, 1.0])
            rhs.append(0.0)
        else:
            rows.append(vi + [-1.0, 0.0, 0.0, 1.0])
            rows.append(-vi + [-1.0, 0.0, 0.0, 1.0])
            rhs += [0.0, 0.0]
    res = linprog([0.0, 0.0, 0.0, -1.0], A_ub=np.array(rows), b_ub=rhs,
                  A_eq=[[0.0, 1.0, 1.0, 0.0]], b_eq=[1.0],
                  bounds=[(0, None), (0, None), (0, None), (None, 1.0)], method='highs')
    if res.status != 0:
        return None
    delta, m1, m2, s = res.x
    u = -m1 * neg + m2 * pos
    return float(s), float(delta), float(m1), float(m2), -H @ u


@dataclass
class FlatCycle:
    k: float
    delta: float
    m1: float
    m2: float
    pattern: tuple
    orbit: np.ndarray
    slack: float
    x0: np.ndarray
    result: SimResult | None = None

    @property
    def period(self):
        return len(self.pattern)

    def nonlinearity(self):
        return PiecewiseLinearNonlinearity.deadzone_saturation(self.k, self.delta,
                                                               self.m1, self.m2)


def _orbit_state(ss, w):
    """State at the start of the periodic orbit driven by the periodic input w."""
    n, P = ss.A.shape[0], len(w)
    acc = np.zeros(n)
    for wi in w:
        acc = ss.A @ acc + ss.B * wi
    return np.linalg.solve(np.eye(n) - np.linalg.matrix_power(ss.A, P), acc)


def find_flat_cycle(tf, k, periods=range(4, 9), min_slack=1e-6, perturb=1e-3,
                    confirm_steps=3000, window=60):
    """Search for a periodic orbit of the deadzone+saturation loop at slope k.

    Each candidate orbit stays on the flat pieces of N, where the loop is
    linear and the orbit solves a small linear program. The best candidate
    (largest slack) is confirmed by simulating from a slightly perturbed
    orbit state. Returns a :class:`FlatCycle` or ``None``.
    """
    if not tf.is_discrete:
        raise DomainError("flat-cycle search needs a discrete-time plant")
    best = None
    for P in periods:
        H = _circulant(tf, P)
        for pat in _patterns(P):
            sol = _flat_lp(H, pat, k)
            if sol is not None and sol[0] > min_slack and (best is None or sol[0] > best[0]):
                best = sol + (pat,)
    if best is None:
        return None
    slack, delta, m1, m2, orbit, pat = best
    ss = tf_to_ss(tf)
    u = np.array([-m1 if p == -1 else (m2 if p == 1 else 0.0) for p in pat])
    x_orb = _orbit_state(ss, -u)
    cyc = FlatCycle(float(k), delta, m1, m2, pat, orbit, slack, x_orb * (1 + perturb))
    cfg = SimConfig(confirm_steps, x0=cyc.x0, period_window=window)
    cyc.result = simulate(tf, cyc.nonlinearity(), cfg)
    return cyc
