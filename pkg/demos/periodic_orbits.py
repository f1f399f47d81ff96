"""Periodic solutions of the discrete example loop below the Nyquist value."""

import numpy as np

from zfphase.lti import TransferFunction
from zfphase.lure_sim import PiecewiseLinearNonlinearity, find_flat_cycle, find_periodic_kick

PLANT = TransferFunction.discrete([1, 0], [1, -1.8, 0.81])


def main():
    amp, width, res = find_periodic_kick(PLANT, PiecewiseLinearNonlinearity.saturation(2.1),
                                         np.arange(0.5, 5.01, 0.1))
    print(f"saturation, k = 2.1: pulse {amp:.1f} x {width} gives period {res.period}")
    cyc = find_flat_cycle(PLANT, 1.3666)
    print(f"deadzone+saturation, k = 1.3666: delta {cyc.delta:.5f}, m1 {cyc.m1:.3f}, "
          f"m2 {cyc.m2:.3f}, pattern {cyc.pattern}, simulated period {cyc.result.period}")


if __name__ == '__main__':
    main()
