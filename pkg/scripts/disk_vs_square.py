#!/usr/bin/env python3
"""Compare normalized Dirichlet eigenvalue sums of the square and the unit disk.

Prints the per-n values and the set of n where the square wins; up to n = 50
the winners are exactly {1, 2, 3, 5, 6, 9, 10, 12}.
"""

import math
import sys

import numpy as np

from eigenplane import experiments as xp
from eigenplane.exact import DIRICHLET, disk_spectrum, rectangle_spectrum


def main() -> None:
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    sq = np.cumsum(rectangle_spectrum(1, 1, DIRICHLET, n_max).values) * 6.0
    dk = np.cumsum(disk_spectrum(1.0, DIRICHLET, n_max).values) * 2.0 * math.pi**2
    print(f"{'n':>4} {'square':>16} {'disk':>16}  winner")
    for i in range(n_max):
        winner = "square" if sq[i] > dk[i] else "disk"
        print(f"{i + 1:>4} {sq[i]:>16.6f} {dk[i]:>16.6f}  {winner}")
    winners = xp.disk_vs_square(n_max)
    print(f"\nsquare larger for n in {sorted(winners)}")


if __name__ == "__main__":
    main()
