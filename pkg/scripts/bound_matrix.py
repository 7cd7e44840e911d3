#!/usr/bin/env python3
"""Stress the linear-map eigenvalue-sum bound over seeded random maps.

For each random invertible map, both boundary conditions and partial sums up
to n = 6 are checked on the equilateral triangle and the square; every report
is written as one JSON line.
"""

import sys

from eigenplane import experiments as xp
from eigenplane import fem
from eigenplane import geometry as g
from eigenplane.exact import DIRICHLET, NEUMANN


def main() -> None:
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 25
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    out = sys.argv[3] if len(sys.argv) > 3 else "bound_matrix.jsonl"
    opts = fem.FemOptions(max_refinement=4)
    maps = xp.random_invertible_maps(count, seed=seed)
    domains = {"equilateral": g.equilateral_triangle(), "square": g.square(1.0)}
    violations = 0
    with open(out, "w") as f:
        for name, d in domains.items():
            for bc in (DIRICHLET, NEUMANN):
                for T in maps:
                    for n in range(1, 7):
                        rep = xp.verify_linear_map_bound(d, T, bc, n, opts)
                        rep.inputs["domain"] = name
                        rep.inputs["seed"] = seed
                        f.write(rep.to_json() + "\n")
                        violations += not rep.holds
    total = len(domains) * 2 * count * 6
    print(f"{total} reports written to {out}; violations: {violations}")
    sys.exit(1 if violations else 0)


if __name__ == "__main__":
    main()
