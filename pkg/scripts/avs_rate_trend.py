"""Per-letter AVS radius R_n(T_U)/n against the asymptotic rate R.

    python3 scripts/avs_rate_trend.py --alpha 0.5 --nmax 10
"""

import argparse

import numpy as np

from guesslab.families import AvsSpec, avs_center_radius, avs_rate
from guesslab.probkit import OrderParam


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--flip", type=float, default=0.1, help="crossover of the two channel rows")
    ap.add_argument("--nmax", type=int, default=10, help="largest even n")
    args = ap.parse_args()

    op = OrderParam(args.alpha)
    e = args.flip
    channel = np.array([[1 - e, e], [e, 1 - e]])
    rate = avs_rate(channel, [0.5, 0.5], op)
    print(f"R = {rate:.6f} bits")
    print(f"{'n':>3} {'R_n':>10} {'R_n/n':>10} {'gap':>10}")
    for n in range(2, args.nmax + 1, 2):
        spec = AvsSpec(("a", "b"), ("0", "1"), channel, n, (n // 2, n // 2))
        r_n = avs_center_radius(spec, op).radius_C
        print(f"{n:>3} {r_n:>10.6f} {r_n / n:>10.6f} {abs(r_n / n - rate):>10.6f}")


if __name__ == "__main__":
    main()
