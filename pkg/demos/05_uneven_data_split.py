#!/usr/bin/env python3
"""Worker counts that do not divide the data.

When N does not divide K, the datasets are embedded into N * ceil(K/N)
effective slots; the missing slots hold all-zero placeholder messages and
are spread out so no worker carries more than its share of real data.
"""

from linsep import builder, codec, field
from linsep.assignment import general_assignment
from linsep.harness import TrialConfig, run_trial

# 3 real datasets on 6 workers, any 4 must suffice.
a = general_assignment(K=3, N=6, N_r=4)
print("real dataset -> effective slot:", dict(enumerate(a.slot_of_dataset, start=1)))
print("real datasets per worker:", [list(z) for z in a.z])
assert all(len(z) <= 2 for z in a.z)

# 7 datasets on 3 workers: the full pipeline across all three demand regimes.
f = field.Field()
for k_c in (2, 5, 7):
    demand = builder.random_demand(k_c, 7, f, seed=k_c)
    scheme = builder.build_auto(demand, 3, 2, padding_seed=1, virtual_seed=2)
    messages = codec.random_messages(7, scheme.params.L or 2, f, seed=9)
    answers = [codec.encode_worker(scheme, n, messages) for n in (2, 3)]
    report = codec.decode(scheme, answers)
    assert report.recovered == field.mat_mul(demand.matrix, messages.w)
    print(f"K_c={k_c}: regime={scheme.regime:>6}, download cost {report.cost}")

# The harness replays the same thing from seeds alone.
result = run_trial(TrialConfig(k=7, n=3, n_r=2, k_c=5, demand_seed=3, message_seed=4))
print("harness exhaustive check ok:", result.all_ok, "cost", result.measured_cost)
