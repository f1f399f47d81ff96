"""Fourth-order continuous loop with asymmetric vs symmetric saturation (about 25 s)."""

import json
from pathlib import Path

import numpy as np

from zfphase.lti import TransferFunction
from zfphase.lure_sim import PiecewiseLinearNonlinearity as PWL, SimConfig, constant_until, simulate

DATA = Path(__file__).parent / 'data'


def main():
    tf = TransferFunction.from_dict(json.loads((DATA / 'oshea_xi025.json').read_text()))
    cfg = SimConfig(60.0, step=1e-4, g=constant_until(100.0, 20.0))
    for name, nl in [('asymmetric', PWL.oshea_asymmetric(1000.0)),
                     ('symmetric', PWL.saturation(1000.0))]:
        res = simulate(tf, nl, cfg)
        peak = np.max(np.abs(res.v))
        late = np.max(np.abs(res.v[res.t >= 40]))
        print(f"{name:>10}: peak |v| {peak:.4g}, max |v| for t >= 40 s {late:.4g}, "
              f"settled {res.settled}")


if __name__ == '__main__':
    main()
