"""Radius C_n of binary i.i.d. sources (grid stand-in) against the asymptotic bound.

    python3 scripts/dms_radius_growth.py --alpha 0.5 --nmax 8 --step 0.02
"""

import argparse
import time

from guesslab.center import solve_center
from guesslab.families import dms_grid_family, dms_radius_bound
from guesslab.probkit import OrderParam


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--nmax", type=int, default=8)
    ap.add_argument("--step", type=float, default=0.02, help="grid step for P(1)")
    args = ap.parse_args()

    op = OrderParam(args.alpha)
    print(f"{'n':>3} {'C_n':>9} {'C_n/n':>9} {'bound':>9} {'iters':>6} {'sec':>6}")
    for n in range(1, args.nmax + 1):
        t0 = time.perf_counter()
        res = solve_center(dms_grid_family(n, args.step), op)
        bound = dms_radius_bound(2, n).value
        print(f"{n:>3} {res.radius_C:>9.5f} {res.radius_C / n:>9.5f} {bound:>9.5f} "
              f"{res.iterations:>6} {time.perf_counter() - t0:>6.2f}")
    print("bound omits the vanishing correction term")


if __name__ == "__main__":
    main()
