"""Command-line front end.

Exit codes: 0 success, 1 numerical failure, 2 invalid input.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from ._common import Klass, Sign
from .analysis import (PHASE_GRID_POINTS, find_violation, ideal_phase, k_pl,
                       offaxis_conjecture_k, offaxis_ct, offaxis_reduced, slope_report)
from .ct_limits import CtLimitParams, rho_c, rho_c_odd
from .dt_limits import (DtInterval, achieving_set, integral_ratio, n_max, nu, rho_d,
                        rho_d_odd, sparse_multiplier)
from .errors import NumericalError, ValidationError
from .lti import (NYQUIST_GRID_POINTS, TransferFunction, default_grid, freq_response,
                  nyquist_value)
from .lure_sim import (PiecewiseLinearNonlinearity, SimConfig, constant_until, pulse,
                       simulate)


@dataclass
class RunManifest:
    subcommand: str
    inputs: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    version: str = __version__

    def to_dict(self):
        return asdict(self)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return 'inf' if x > 0 else '-inf'
        if math.isnan(x):
            return None
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None


def _plant(args, manifest):
    manifest.inputs.append(args.plant)
    return TransferFunction.from_dict(_load_json(args.plant))


def _klass(args):
    return Klass.ODD if getattr(args, 'odd', False) else Klass.NON_ODD


def _emit_json(doc, manifest, out):
    doc = dict(doc)
    doc['manifest'] = manifest.to_dict()
    out.write(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + '\n')


def _write_csv(rows, header, path, manifest, out):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if not isinstance(x, str) else x for x in row])
    if path is None:
        out.write(buf.getvalue())
        return
    with open(path, 'w') as fh:
        fh.write(buf.getvalue())
    manifest.outputs.append(path)
    with open(path + '.manifest.json', 'w') as fh:
        json.dump(_jsonable(manifest.to_dict()), fh, indent=2, sort_keys=True)
        fh.write('\n')


def cmd_rho_ct(args, manifest, out):
    p = CtLimitParams.from_intervals(args.a, args.b, args.c, args.d, args.kappa)
    lim = rho_c_odd(p) if args.odd else rho_c(p)
    _emit_json({'rho': lim.rho, 'angle_deg': lim.angle_deg, 'argmax': list(lim.argmax),
                'klass': lim.klass.value, 'lambda': p.lam, 'mu': p.mu}, manifest, out)


def cmd_rho_dt(args, manifest, out):
    iv = DtInterval(args.a, args.b)
    lim = rho_d_odd(iv) if args.odd else rho_d(iv)
    doc = {'rho': lim.rho, 'angle_deg': lim.angle_deg, 'n_max': n_max(iv), 'nu': nu(iv),
           'argmax': list(lim.argmax), 'klass': lim.klass.value}
    if args.achieving:
        pos = achieving_set(iv, lim.klass, Sign.POSITIVE)
        neg = achieving_set(iv, lim.klass, Sign.NEGATIVE)
        doc['achieving'] = {'pos': list(pos.members), 'neg': list(neg.members),
                            'pos_tap_signs': list(pos.tap_signs),
                            'neg_tap_signs': list(neg.tap_signs)}
    _emit_json(doc, manifest, out)


def cmd_kpl(args, manifest, out):
    tf = _plant(args, manifest)
    res = k_pl(tf, _klass(args), args.tol, args.grid_points or PHASE_GRID_POINTS)
    doc = {'k_PL': res.k_pl, 'active': res.active, 'nonmonotone': res.nonmonotone,
           'certificate': res.certificate.to_dict() if res.certificate else None}
    _emit_json(doc, manifest, out)


def cmd_nyquist(args, manifest, out):
    tf = _plant(args, manifest)
    n = max(args.grid_points or NYQUIST_GRID_POINTS, 3)
    k_n = nyquist_value(tf, n)
    if args.csv:
        w = default_grid(tf, n)
        g = freq_response(tf, w)
        ph = np.unwrap(np.angle(g, deg=True), period=360.0)
        _write_csv(zip(w, g.real, g.imag, ph), ['omega', 're', 'im', 'phase_deg'],
                   args.csv, manifest, out)
    _emit_json({'k_N': k_n}, manifest, out)


def cmd_offaxis(args, manifest, out):
    tf = _plant(args, manifest)
    if args.which == 'ct':
        if args.k is None:
            raise ValidationError("offaxis ct needs --k")
        ok = offaxis_ct(tf, args.k, delta_rel=args.margin)
        _emit_json({'k': args.k, 'separable': ok}, manifest, out)
        return
    res = offaxis_reduced(tf, args.tol) if args.which == 'rd' else \
        offaxis_conjecture_k(tf, args.tol, delta_rel=args.margin)
    doc = {'bound': res.value, 'status': res.status}
    if args.k is not None:
        doc['k'] = args.k
        doc['accepted'] = bool(args.k <= res.value)
    _emit_json(doc, manifest, out)


def cmd_report(args, manifest, out):
    tf = _plant(args, manifest)
    rep = slope_report(tf, _klass(args), args.kzf_ref, args.kc_ref, args.tol)
    _emit_json(rep.to_dict(), manifest, out)


def _signal(doc):
    if doc is None or doc.get('kind', 'zero') == 'zero':
        return None
    kind = doc['kind']
    if kind == 'constant_until':
        return constant_until(float(doc['amplitude']), float(doc['t_end']))
    if kind == 'pulse':
        return pulse(float(doc['amplitude']), int(doc.get('width', 1)))
    raise ValidationError(f"unknown signal kind {kind!r}")


def cmd_simulate(args, manifest, out):
    tf = _plant(args, manifest)
    manifest.inputs.append(args.nl)
    nl = PiecewiseLinearNonlinearity.from_dict(_load_json(args.nl))
    inputs = {}
    if args.input:
        manifest.inputs.append(args.input)
        inputs = _load_json(args.input)
    cfg = SimConfig(args.duration, args.step, f=_signal(inputs.get('f')),
                    g=_signal(inputs.get('g')), x0=inputs.get('x0'))
    res = simulate(tf, nl, cfg)
    _write_csv(zip(res.t, res.v, res.w), ['t', 'v', 'w'], args.out, manifest, out)
    summary = json.dumps(_jsonable({'flags': res.flags(),
                                    'max_abs_v': float(np.nanmax(np.abs(res.v)))}),
                         sort_keys=True)
    (out if args.out else sys.stderr).write(summary + '\n')


def cmd_sparse(args, manifest, out):
    iv = DtInterval(args.a, args.b)
    sign = Sign.NEGATIVE if args.negative else Sign.POSITIVE
    ach = achieving_set(iv, _klass(args), sign)
    weights = args.weights or [1.0] * len(ach.members)
    m = sparse_multiplier(ach, weights, args.eps)
    _emit_json({'multiplier': m.to_dict(), 'achieving': list(ach.members),
                'rho': ach.rho, 'integral_ratio': integral_ratio(m, iv)}, manifest, out)


def cmd_phase_dump(args, manifest, out):
    tf = _plant(args, manifest)
    if not tf.is_discrete:
        raise ValidationError("phase-dump needs a discrete-time plant")
    n = args.grid_points or PHASE_GRID_POINTS
    w = np.linspace(0.0, np.pi, n)
    theta = np.angle(1.0 + args.k * freq_response(tf, w), deg=True)
    ideal = ideal_phase(tf, args.k, w)
    cert = find_violation(tf, args.k, _klass(args), n)
    limit = np.full_like(w, np.nan)
    if cert is not None:
        inside = (w >= cert.interval.a) & (w <= cert.interval.b)
        limit[inside] = cert.limit_angle_deg
    rows = [(a, b, c, '' if np.isnan(d) else repr(float(d)))
            for a, b, c, d in zip(w, theta, ideal, limit)]
    _write_csv(rows, ['omega', 'phase_1pkG_deg', 'ideal_phase_deg', 'limit_angle_deg'],
               args.out, manifest, out)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol', type=float, default=1e-4,
                        help='absolute tolerance of slope bisections')
    common.add_argument('--grid-points', type=int, default=None,
                        help=f'frequency grid size (default {NYQUIST_GRID_POINTS} for '
                             f'nyquist, {PHASE_GRID_POINTS} elsewhere)')
    common.add_argument('--margin', type=float, default=1e-6,
                        help='relative offset delta*(1/k) of separating-line anchors')
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog='zfphase', formatter_class=fmt,
                                     description='Phase limitations of Zames-Falb multipliers.')
    parser.add_argument('--version', action='version', version=__version__)
    sub = parser.add_subparsers(dest='cmd', required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, parents=[common], formatter_class=fmt, help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add('rho-ct', cmd_rho_ct, 'continuous-time limitation for two intervals')
    for name in 'abcd':
        sp.add_argument(f'--{name}', type=float, required=True)
    sp.add_argument('--kappa', type=float, default=1.0)
    sp.add_argument('--odd', action='store_true', help='odd multiplier class')

    sp = add('rho-dt', cmd_rho_dt, 'discrete-time limitation on [a, b]')
    sp.add_argument('--a', type=float, required=True)
    sp.add_argument('--b', type=float, required=True)
    sp.add_argument('--odd', action='store_true')
    sp.add_argument('--achieving', action='store_true', help='also list achieving sets')

    sp = add('kpl', cmd_kpl, 'smallest slope excluded by the limitation')
    sp.add_argument('--plant', required=True)
    sp.add_argument('--odd', action='store_true')

    sp = add('nyquist', cmd_nyquist, 'Nyquist value of a stable plant')
    sp.add_argument('--plant', required=True)
    sp.add_argument('--csv', help='also write omega,re,im,phase_deg to this file')

    sp = add('offaxis', cmd_offaxis, 'off-axis circle criterion checks')
    sp.add_argument('which', choices=['ct', 'rd', 'conj'])
    sp.add_argument('--plant', required=True)
    sp.add_argument('--k', type=float)

    sp = add('report', cmd_report, 'slope summary for a discrete plant')
    sp.add_argument('--plant', required=True)
    sp.add_argument('--odd', action='store_true')
    sp.add_argument('--kzf-ref', type=float)
    sp.add_argument('--kc-ref', type=float)

    sp = add('simulate', cmd_simulate, "simulate the Lur'e loop")
    sp.add_argument('--plant', required=True)
    sp.add_argument('--nl', required=True, help='nonlinearity JSON')
    sp.add_argument('--input', help='inputs JSON with optional f, g, x0')
    sp.add_argument('--duration', type=float, required=True, help='seconds or samples')
    sp.add_argument('--step', type=float, default=1e-4, help='RK4 step (continuous)')
    sp.add_argument('--out', help='CSV path (default stdout)')

    sp = add('sparse', cmd_sparse, 'limiting sparse multiplier on [a, b]')
    sp.add_argument('--a', type=float, required=True)
    sp.add_argument('--b', type=float, required=True)
    sp.add_argument('--odd', action='store_true')
    sp.add_argument('--negative', action='store_true', help='negative phase pattern')
    sp.add_argument('--weights', type=float, nargs='+')
    sp.add_argument('--eps', type=float, default=1e-6)

    sp = add('phase-dump', cmd_phase_dump, 'phase curves behind the violation search')
    sp.add_argument('--plant', required=True)
    sp.add_argument('--k', type=float, required=True)
    sp.add_argument('--odd', action='store_true')
    sp.add_argument('--out', help='CSV path (default stdout)')
    return parser


def dispatch(argv, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    params = {k: v for k, v in vars(args).items() if k not in ('func', 'cmd')}
    manifest = RunManifest(args.cmd, parameters=params)
    try:
        args.func(args, manifest, out)
    except ValidationError as exc:
        print(f"zfphase {args.cmd}: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"zfphase {args.cmd}: numerical failure: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
