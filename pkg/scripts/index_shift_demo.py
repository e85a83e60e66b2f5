"""Compare the two one-parameter Riccati sequences on every built-in schedule.

``riccati_general`` solves the recurrence exactly; ``riccati_parametric`` is the
sequence that generates the stationary family and only solves it when
``b_{i-1} d_{i+1} / b_i^2`` is constant.  The table shows both residuals.
"""
import sys

import numpy as np

from bdriccati import (
    DParameter,
    make_asymmetric,
    make_constant,
    make_offset_exponential,
    max_riccati_residual,
    riccati_general,
    riccati_parametric,
)

SCHEDULES = {
    "constant b=0.5": make_constant(0.5, 20),
    "asymmetric eps=0.02": make_asymmetric(0.02, 100),
    "figure3": make_offset_exponential(0.1, 0.12, 0.1, 0.15, 1, 100),
    "figure4": make_offset_exponential(0.0, 0.12, 0.0, 0.15, 0.5, 100),
    "figure5": make_offset_exponential(0.01, 0.15, 0.01, 0.12, 1, 100),
}


def main() -> int:
    print(f"{'schedule':<22}{'D':>9}{'general':>12}{'parametric':>12}{'max |dy|':>12}")
    for name, s in SCHEDULES.items():
        for D in (-4.0, -40.0, -4000.0):
            dp = DParameter(D)
            g, p = riccati_general(s, dp), riccati_parametric(s, dp)
            print(
                f"{name:<22}{D:>9g}{max_riccati_residual(s, g):>12.1e}"
                f"{max_riccati_residual(s, p):>12.1e}{np.max(np.abs(g.y - p.y)):>12.1e}"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
