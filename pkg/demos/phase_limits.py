"""Print continuous and discrete phase limitations for a few intervals."""

import numpy as np

from zfphase.ct_limits import CtLimitParams, rho_c, rho_c_odd
from zfphase.dt_limits import DtInterval, achieving_set, n_max, rho_d, rho_d_odd


def main():
    p = CtLimitParams.from_intervals(1.6, 2.25, 3.36, 4.725)
    print(f"continuous [1.6, 2.25] / [3.36, 4.725]: "
          f"{rho_c(p).angle_deg:.4f} deg, odd {rho_c_odd(p).angle_deg:.4f} deg")
    for a, b in [(0.7, 0.77501), (0.7198, 0.8996), (0.7, 0.75), (1e-4, np.pi - 1e-4)]:
        iv = DtInterval(a, b)
        lim = rho_d(iv)
        print(f"discrete [{a:g}, {b:.5g}]: {lim.angle_deg:.4f} deg "
              f"(odd {rho_d_odd(iv).angle_deg:.4f}), n_max {n_max(iv)}, "
              f"achieving {achieving_set(iv, tie_rtol=1e-4).members}")


if __name__ == '__main__':
    main()
