"""TV distance of Gillespie occupation fractions to the constant-case closed form, vs run length."""
import argparse
import sys

import numpy as np

from bdriccati import (
    DParameter,
    constant_case_closed_form,
    effective_schedule,
    empirical_stationary,
    gillespie_run,
    make_constant,
    total_variation,
)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--D", type=float, default=-1000.0)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args(argv)
    dp = DParameter(args.D)
    eff = effective_schedule(make_constant(0.5, 20), dp)
    target = constant_case_closed_form(0.5, 20, dp).p
    seeds = np.random.SeedSequence(12345).generate_state(args.seeds)
    print(f"{'t_max':>10}{'jumps':>10}{'mean TV':>10}{'max TV':>10}")
    for t_max in (1e4, 1e5, 1e6):
        tvs, jumps = [], []
        for seed in seeds:
            tr = gillespie_run(eff, 0, t_max, int(seed))
            emp = empirical_stationary(tr).p
            tvs.append(total_variation(emp, target))
            jumps.append(tr.n_jumps)
        print(f"{t_max:>10.0e}{int(np.mean(jumps)):>10d}{np.mean(tvs):>10.4f}{np.max(tvs):>10.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
