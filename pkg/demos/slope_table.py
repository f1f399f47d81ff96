"""Slope bounds for G(z) = z / (z^2 - 1.8 z + 0.81)."""

import json
from pathlib import Path

from zfphase.analysis import find_violation, slope_report
from zfphase.lti import TransferFunction

DATA = Path(__file__).parent / 'data'


def main():
    tf = TransferFunction.from_dict(json.loads((DATA / 'example1.json').read_text()))
    rep = slope_report(tf, k_zf_ref=1.3028, k_c_ref=1.3666)
    for name in rep.ordering():
        print(f"{name:>9}: {getattr(rep, name):.4f}")
    cert = find_violation(tf, 1.5)
    print(f"k = 1.5 certificate: [{cert.interval.a:.4f}, {cert.interval.b:.4f}], "
          f"needs {cert.required_angle_deg:.2f} deg, limit {cert.limit_angle_deg:.2f} deg")


if __name__ == '__main__':
    main()
