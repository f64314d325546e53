#!/usr/bin/env python3
"""How the download cost moves with the number of requested combinations.

With K datasets on N workers and any N_r answers required, three regimes
appear as the demand grows: a per-combination regime, a flat plateau, and a
linear tail.  The flat plateau is the striking part: within it, asking for
more combinations costs nothing extra.
"""

from linsep import bounds

K, N, N_r = 12, 4, 2
print(f"K={K} datasets, N={N} workers, decode from any N_r={N_r}")
print(f"{'K_c':>4} {'converse':>9} {'achievable':>11} {'status':>15}")
for k_c in range(1, K + 1):
    p = bounds.Params(K=K, N=N, N_r=N_r, K_c=k_c)
    v = bounds.optimality_class(p)
    print(f"{k_c:>4} {v.converse:>9} {v.achievable:>11} {v.status:>15}")

m_min, m_1 = bounds.computation_costs(bounds.Params(K=K, N=N, N_r=N_r, K_c=1))
print(f"\neach worker stores {m_min} of the {K} datasets (the minimum possible)")

# The flat window in numbers: everything from K/N to (K/N)*N_r costs the same.
per = K // N
plateau = [
    bounds.achievable_cost(bounds.Params(K=K, N=N, N_r=N_r, K_c=k_c))
    for k_c in range(per, per * N_r + 1)
]
assert len(set(plateau)) == 1
print(f"combinations {per}..{per * N_r} all cost {plateau[0]}: extras ride along free")
