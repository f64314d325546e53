"""Dataset-to-worker assignments.

Dataset and worker indices are 1-based.  ``mod1`` is the modulo that lands in
``[1..a]`` (so ``mod1(a, a) == a``), which keeps the cyclic formulas directly
checkable against their closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import ceil, comb, floor

from .errors import ShapeMismatch, UnsupportedGroupedParams, UseGeneralAssignment

CYCLIC = "cyclic"
GENERAL_VIRTUAL = "general-virtual"
GROUPED = "grouped"


def mod1(b: int, a: int) -> int:
    """Modulo into [1..a]: mod1(b, a) == a whenever a divides b."""
    r = b % a
    return a if r == 0 else r


@dataclass(frozen=True)
class Assignment:
    """Per-worker dataset index sets plus replication metadata.

    ``z[n-1]`` is the sorted tuple of dataset indices assigned to worker n.
    For the general (virtual-slot) kind, ``effective_k`` is the padded slot
    count N*ceil(K/N), ``slot_of_dataset[k-1]`` is the effective slot holding
    real dataset k, and ``effective_z`` is the cyclic assignment on slots.
    """

    K: int
    N: int
    N_r: int
    kind: str
    z: tuple[tuple[int, ...], ...]
    effective_k: int = 0
    slot_of_dataset: tuple[int, ...] = field(default=())
    effective_z: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        if not (1 <= self.N_r <= self.N):
            raise ShapeMismatch(f"need 1 <= N_r <= N, got N_r={self.N_r}, N={self.N}")
        if len(self.z) != self.N:
            raise ShapeMismatch("one dataset set per worker required")

    def workers_holding(self, k: int) -> tuple[int, ...]:
        return tuple(n for n in range(1, self.N + 1) if k in self.z[n - 1])

    def replication(self, k: int) -> int:
        return len(self.workers_holding(k))

    def not_assigned(self, n: int) -> tuple[int, ...]:
        held = set(self.z[n - 1])
        return tuple(k for k in range(1, self.K + 1) if k not in held)


@dataclass(frozen=True)
class GroupedAssignment(Assignment):
    """Assignment partitioned into groups H_T, one per 2-subset T of workers."""

    groups: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = field(default=())

    def group_of(self, t: tuple[int, ...]) -> tuple[int, ...]:
        for key, members in self.groups:
            if key == tuple(sorted(t)):
                return members
        raise KeyError(t)


def _cyclic_sets(K: int, N: int, N_r: int) -> tuple[tuple[int, ...], ...]:
    per = K // N
    sets = []
    for n in range(1, N + 1):
        members = {
            mod1(n + i, N) + p * N for p in range(per) for i in range(N - N_r + 1)
        }
        sets.append(tuple(sorted(members)))
    return tuple(sets)


def cyclic_assignment(K: int, N: int, N_r: int) -> Assignment:
    """Cyclic assignment: dataset k goes to workers mod1(k,N), ..., mod1(k-N+N_r,N)."""
    if K % N != 0:
        raise UseGeneralAssignment(f"N={N} does not divide K={K}")
    if not (1 <= N_r <= N):
        raise ShapeMismatch(f"need 1 <= N_r <= N, got {N_r}")
    return Assignment(K=K, N=N, N_r=N_r, kind=CYCLIC, z=_cyclic_sets(K, N, N_r))


def allocate_real_slots(N: int, b: int) -> tuple[int, ...]:
    """Slots (within [1..N]) for b real datasets among N cyclic slots.

    Decomposes N-b into b parts p_1 <= ... <= p_b, each floor((N-b)/b) or
    ceil((N-b)/b), with the first alpha = b*ceil((N-b)/b) - (N-b) parts equal
    to the floor; real slot j is 1 + (j-1) + p_1 + ... + p_{j-1}.  Consecutive
    real slots are then at least floor(N/b) apart.
    """
    if not (1 <= b < N):
        raise ShapeMismatch(f"need 1 <= b < N, got b={b}, N={N}")
    rem = N - b
    alpha = b * ceil(rem / b) - rem
    parts = [floor(rem / b)] * alpha + [ceil(rem / b)] * (b - alpha)
    slots = []
    pos = 1
    for j in range(b):
        slots.append(pos)
        pos += 1 + parts[j]
    return tuple(slots)


def general_assignment(K: int, N: int, N_r: int) -> Assignment:
    """Assignment for K = aN + b with b >= 1, via N - b virtual slots.

    Datasets [1..aN] follow the plain cyclic rule.  The trailing b datasets
    are placed on slots chosen by ``allocate_real_slots`` inside one extra
    cyclic block of N effective slots, which caps the number of trailing real
    datasets per worker at ceil((N-N_r+1)/floor(N/b)).
    """
    b = K % N
    if b == 0:
        return cyclic_assignment(K, N, N_r)
    a = K // N
    k_eff = (a + 1) * N
    tail_slots = allocate_real_slots(N, b)
    slot_of = tuple(range(1, a * N + 1)) + tuple(a * N + s for s in tail_slots)
    effective_z = _cyclic_sets(k_eff, N, N_r)
    dataset_at = {slot: k for k, slot in enumerate(slot_of, start=1)}
    z = tuple(
        tuple(sorted(dataset_at[s] for s in zn if s in dataset_at))
        for zn in effective_z
    )
    return Assignment(
        K=K,
        N=N,
        N_r=N_r,
        kind=GENERAL_VIRTUAL,
        z=z,
        effective_k=k_eff,
        slot_of_dataset=slot_of,
        effective_z=effective_z,
    )


def grouped_assignment(
    K: int, N: int, N_r: int, group_size: int | None = None
) -> GroupedAssignment:
    """Partition datasets into (N choose 2) groups, one per 2-subset of workers.

    Supported only for N - N_r + 1 == 2 with (N choose 2) dividing K; the
    2-subsets are enumerated in lexicographic order and dataset indices fill
    the groups consecutively.
    """
    if N - N_r + 1 != 2:
        raise UnsupportedGroupedParams(
            f"grouped assignment needs N - N_r + 1 == 2, got N={N}, N_r={N_r}"
        )
    n_groups = comb(N, 2)
    if K % n_groups != 0:
        raise UnsupportedGroupedParams(f"{n_groups} groups do not divide K={K}")
    size = K // n_groups
    if group_size is not None and group_size != size:
        raise UnsupportedGroupedParams(
            f"group size {group_size} inconsistent with K/(N choose 2) = {size}"
        )
    groups = []
    nxt = 1
    for t in combinations(range(1, N + 1), 2):
        groups.append((t, tuple(range(nxt, nxt + size))))
        nxt += size
    z = []
    for n in range(1, N + 1):
        mine: list[int] = []
        for t, members in groups:
            if n in t:
                mine.extend(members)
        z.append(tuple(sorted(mine)))
    return GroupedAssignment(
        K=K, N=N, N_r=N_r, kind=GROUPED, z=tuple(z), groups=tuple(groups)
    )


def unique_group(a: Assignment, s: tuple[int, ...] | frozenset[int]) -> tuple[int, ...]:
    """G_S: datasets assigned to exactly the workers in S (|S| = N - N_r + 1)."""
    s_set = frozenset(s)
    if len(s_set) != a.N - a.N_r + 1:
        raise ShapeMismatch(
            f"|S| must be N - N_r + 1 = {a.N - a.N_r + 1}, got {len(s_set)}"
        )
    return tuple(
        k for k in range(1, a.K + 1) if frozenset(a.workers_holding(k)) == s_set
    )


@dataclass(frozen=True)
class ReplicationReport:
    violations: tuple[int, ...]  # datasets replicated fewer than N - N_r + 1 times
    storage_ok: bool | None  # per-worker unique-group sums (cyclic kind only)

    @property
    def ok(self) -> bool:
        return not self.violations and self.storage_ok is not False


def validate_replication(a: Assignment, storage_cap: int = 100_000) -> ReplicationReport:
    """Check the minimum-replication rule, plus unique-group sums when cyclic.

    Every dataset must sit on at least N - N_r + 1 workers.  For cyclic
    assignments the unique groups G_S additionally satisfy, for every worker n,
    sum over S containing n of |G_S| == (K/N)(N - N_r + 1).
    """
    need = a.N - a.N_r + 1
    violations = tuple(k for k in range(1, a.K + 1) if a.replication(k) < need)
    storage_ok: bool | None = None
    if a.kind == CYCLIC and comb(a.N, need) <= storage_cap:
        per_worker = {n: 0 for n in range(1, a.N + 1)}
        for s in combinations(range(1, a.N + 1), need):
            size = len(unique_group(a, s))
            for n in s:
                per_worker[n] += size
        want = (a.K // a.N) * need
        storage_ok = all(v == want for v in per_worker.values())
    return ReplicationReport(violations=violations, storage_ok=storage_ok)
