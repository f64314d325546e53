#!/usr/bin/env python3
"""Monte-Carlo audit: random demands, every straggler pattern, exact checks.

Each trial draws a fresh uniform demand matrix and message block, builds the
scheme, drops every possible straggler set in turn, and decodes.  The decoded
block must equal the directly computed product, and the measured download
must equal the closed-form cost, exactly.
"""

from linsep.harness import GridPoint, sweep

grid = [
    GridPoint(k=k, n=3, n_r=2, k_c=k_c)
    for k in (3, 6, 9)
    for k_c in range(1, k + 1)
]

rows = sweep(grid, trials_per_point=10, seed=2024)

print(f"{'K':>3} {'K_c':>4} {'regime':>7} {'measured':>9} {'formula':>8} {'failures':>9}")
for row in rows:
    print(
        f"{row['K']:>3} {row['K_c']:>4} {row['regime']:>7} "
        f"{row['measured_cost']:>9} {row['formula_cost']:>8} {row['failures']:>9}"
    )

total = sum(row["failures"] for row in rows)
print(f"\n{len(rows)} grid points x 10 trials, total failures: {total}")
assert total == 0
