"""Worst-case redundancy of the stitched two-list guesser for binary i.i.d. sources.

    python3 scripts/binary_two_list.py --nmax 12 --rho 1
"""

import argparse

import numpy as np

from guesslab.families import binary_two_list, iid_pmf
from guesslab.guessing import redundancy


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--nmax", type=int, default=12)
    ap.add_argument("--rho", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=99, help="number of P(1) values in (0, 1)")
    args = ap.parse_args()

    grid = np.arange(1, args.points + 1) / (args.points + 1)
    print(f"{'n':>3} {'max R (bits)':>13} {'at P(1)':>8}")
    for n in range(1, args.nmax + 1):
        merged = binary_two_list(n).merged
        vals = [redundancy(iid_pmf("01", (1 - p, p), n), merged, args.rho) for p in grid]
        k = int(np.argmax(vals))
        print(f"{n:>3} {vals[k]:>13.6f} {grid[k]:>8.3f}")


if __name__ == "__main__":
    main()
