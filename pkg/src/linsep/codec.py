"""Worker-side encoding, master-side decoding, and decodability verification.

Decoding works in task-coefficient space: the master stacks the responders'
code rows, inverts the stack (per sub-problem where the scheme has them), and
strips any padding rows.  The simulation harness cross-checks the result
against a direct message-space multiplication, so the two paths stay
independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from . import field as fl
from .assignment import Assignment
from .builder import (
    GROUPED_REGIME,
    LARGE,
    MIDDLE,
    SMALL,
    DemandMatrix,
    Scheme,
    build_large,
)
from .errors import (
    LinsepError,
    RankDeficientDemand,
    ShapeMismatch,
    SingularMatrix,
    WrongResponderCount,
)
from .field import (
    ElementStream,
    Field,
    FMatrix,
    derive_seed,
    inverse,
    mat_mul,
    random_matrix,
    rank,
    row_stack,
)


@dataclass(frozen=True)
class MessageBlock:
    """The K x L block of message symbols, one row per message."""

    w: FMatrix

    @property
    def k(self) -> int:
        return self.w.rows

    @property
    def l(self) -> int:
        return self.w.cols


def random_messages(k: int, l: int, f: Field, seed: int) -> MessageBlock:
    return MessageBlock(random_matrix(k, l, f, seed))


def zero_messages(k: int, l: int, f: Field) -> MessageBlock:
    return MessageBlock(fl.zeros(k, l, f))


@dataclass(frozen=True)
class WorkerAnswer:
    worker: int
    x: FMatrix  # transmitted combinations; columns are symbols

    @property
    def t_n(self) -> int:
        """Total transmitted symbols."""
        return self.x.rows * self.x.cols


@dataclass(frozen=True)
class DecodeReport:
    responders: tuple[int, ...]
    success: bool
    recovered: FMatrix | None
    cost: Fraction
    detail: str | None = None


def _effective_messages(scheme: Scheme, w: MessageBlock) -> FMatrix:
    """Messages in the scheme's working space; virtual slots carry zeros."""
    if w.k != scheme.params.K:
        raise ShapeMismatch(
            f"message block has {w.k} rows, scheme expects {scheme.params.K}"
        )
    if w.w.field.q != scheme.params.q:
        raise ShapeMismatch("message block field disagrees with the scheme")
    if scheme.virtual is None:
        return w.w
    arr = np.zeros((scheme.virtual.effective_k, w.l), dtype=np.int64)
    for k, slot in enumerate(scheme.virtual.slot_of_dataset, start=1):
        arr[slot - 1] = w.w.array[k - 1]
    return FMatrix(w.w.field, arr)


def _mds_symbols(scheme: Scheme, w_eff: FMatrix, index: int) -> FMatrix:
    """Coded symbol block W_{., S}: one row per message, L/m columns."""
    m = scheme.mds.split_count
    lm = w_eff.cols // m
    subs = w_eff.array.reshape(w_eff.rows, m, lm)
    flat = FMatrix(w_eff.field, subs.transpose(1, 0, 2).reshape(m, w_eff.rows * lm))
    vec = scheme.mds.vector(index, w_eff.field)
    mixed = mat_mul(FMatrix(w_eff.field, vec.array.reshape(1, -1)), flat)
    return FMatrix(w_eff.field, mixed.array.reshape(w_eff.rows, lm))


def encode_worker(scheme: Scheme, n: int, w: MessageBlock) -> WorkerAnswer:
    """Compute worker n's transmission for the given message block."""
    if not (1 <= n <= scheme.params.N):
        raise ShapeMismatch(f"no worker {n} in a {scheme.params.N}-worker scheme")
    w_eff = _effective_messages(scheme, w)
    if scheme.regime == MIDDLE:
        return WorkerAnswer(n, mat_mul(scheme.workers[n - 1].message_rows, w_eff))
    if scheme.regime == SMALL:
        rows = []
        for sub, agg in zip(scheme.subschemes, scheme.aggregators):
            aggregates = mat_mul(agg, w_eff)
            rows.append(mat_mul(sub.workers[n - 1].message_rows, aggregates))
        return WorkerAnswer(n, row_stack(rows))
    if scheme.regime == LARGE:
        m = scheme.mds.split_count
        if w.l % m != 0 or w.l == 0:
            raise ShapeMismatch(f"message length {w.l} not divisible by {m}")
        rows = []
        for idx in range(1, scheme.mds.code_length + 1):
            symbols = _mds_symbols(scheme, w_eff, idx)
            sub = scheme.subscheme(idx)
            rows.append(mat_mul(sub.workers[n - 1].message_rows, symbols))
        return WorkerAnswer(n, row_stack(rows))
    if scheme.regime == GROUPED_REGIME:
        return WorkerAnswer(n, mat_mul(scheme.grouped.workers[n - 1].sent_rows, w_eff))
    raise ShapeMismatch(f"unknown regime {scheme.regime!r}")


def _check_answers(scheme: Scheme, answers) -> list[WorkerAnswer]:
    if len(answers) != scheme.params.N_r:
        raise WrongResponderCount(
            f"need exactly {scheme.params.N_r} answers, got {len(answers)}"
        )
    ids = [a.worker for a in answers]
    if len(set(ids)) != len(ids):
        raise WrongResponderCount("answers must come from distinct workers")
    if not all(1 <= i <= scheme.params.N for i in ids):
        raise ShapeMismatch("answer from a worker outside the scheme")
    return sorted(answers, key=lambda a: a.worker)


def _stack_task_rows(workers, responders) -> FMatrix:
    return row_stack([workers[n - 1].task_rows for n in responders])


def decode(
    scheme: Scheme, answers, demand: DemandMatrix | None = None
) -> DecodeReport:
    """Recover the requested combinations from exactly N_r worker answers."""
    if demand is not None and demand != scheme.demand:
        raise ShapeMismatch("supplied demand disagrees with the scheme's demand")
    answers = _check_answers(scheme, answers)
    responders = tuple(a.worker for a in answers)
    f = fl.Field(scheme.params.q)
    if scheme.regime == LARGE:
        width = answers[0].x.cols
        l_total = width * scheme.mds.split_count
    else:
        l_total = answers[0].x.cols
    if l_total == 0:
        raise ShapeMismatch("answers carry no symbols")
    cost = Fraction(sum(a.t_n for a in answers), l_total)

    def failure(detail: str) -> DecodeReport:
        return DecodeReport(responders, False, None, cost, detail)

    k_c = scheme.demand.k_c
    if scheme.regime == MIDDLE:
        stack = _stack_task_rows(scheme.workers, responders)
        try:
            inv = inverse(stack)
        except SingularMatrix:
            return failure("stacked code rows are singular")
        full = mat_mul(inv, row_stack([a.x for a in answers]))
        raw = full.take_rows(range(scheme.demand.k_c))
    elif scheme.regime == SMALL:
        out_rows = []
        for j, sub in enumerate(scheme.subschemes):
            stack = _stack_task_rows(sub.workers, responders)
            try:
                inv = inverse(stack)
            except SingularMatrix:
                return failure(f"sub-problem {j + 1}: stacked code rows are singular")
            x_j = row_stack([a.x.take_rows([j]) for a in answers])
            out_rows.append(mat_mul(inv, x_j).take_rows([0]))
        raw = row_stack(out_rows)
    elif scheme.regime == LARGE:
        per = scheme.rows_per_worker
        m = scheme.mds.split_count
        recovered_rows: dict[tuple[int, int], FMatrix] = {}
        for idx in range(1, scheme.mds.code_length + 1):
            sub = scheme.subscheme(idx)
            stack = _stack_task_rows(sub.workers, responders)
            try:
                inv = inverse(stack)
            except SingularMatrix:
                return failure(f"symbol subset {idx}: stacked code rows are singular")
            x_idx = row_stack(
                [a.x.take_rows(range((idx - 1) * per, idx * per)) for a in answers]
            )
            rec = mat_mul(inv, x_idx)
            for pos, j in enumerate(scheme.mds.subsets[idx - 1]):
                recovered_rows[(j, idx)] = rec.take_rows([pos])
        out_rows = []
        k_c = scheme.params.K_c
        for j in range(1, k_c + 1):
            idxs = scheme.mds.indices_containing(j)
            h_j = row_stack([recovered_rows[(j, i)] for i in idxs])
            v_j = scheme.mds.reconstruction_stack(j, f)
            try:
                segments = mat_mul(inverse(v_j), h_j)
            except SingularMatrix:
                return failure(f"component {j}: reconstruction stack is singular")
            out_rows.append(FMatrix(f, segments.array.reshape(1, -1)))
        raw = row_stack(out_rows)
    elif scheme.regime == GROUPED_REGIME:
        code = scheme.grouped
        n_all = range(1, scheme.params.N + 1)
        combo_rows = []
        null_stack = []
        for pair in combinations(responders, 2):
            tag = tuple(x for x in n_all if x not in pair)
            acc = None
            for n in pair:
                gw = code.workers[n - 1]
                e1, e2 = gw.expansion(tag)
                x_n = next(a.x for a in answers if a.worker == n)
                coeffs = fl.from_rows(x_n.field, [[e1, e2]])
                part = mat_mul(coeffs, x_n)
                acc = part if acc is None else FMatrix(
                    x_n.field, (acc.array + part.array) % x_n.field.q
                )
            combo_rows.append(acc)
            null_stack.append(code.null_vector(tag))
        v = fl.vectors_as_matrix(null_stack, f, scheme.demand.k_c)
        try:
            inv = inverse(v)
        except SingularMatrix:
            return failure("pair combinations are linearly dependent")
        raw = mat_mul(inv, row_stack(combo_rows))
    else:
        raise ShapeMismatch(f"unknown regime {scheme.regime!r}")

    if scheme.recombine is not None:
        raw = mat_mul(scheme.recombine, raw)
    return DecodeReport(responders, True, raw, cost)


# ---------------------------------------------------------------------------
# Decodability verification
# ---------------------------------------------------------------------------


def _unrank_combination(n: int, r: int, index: int) -> tuple[int, ...]:
    """Lexicographic unranking of r-subsets of [1..n]."""
    out = []
    x = 1
    for slot in range(r, 0, -1):
        while comb(n - x, slot - 1) <= index:
            index -= comb(n - x, slot - 1)
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def _sample_distinct(total: int, count: int, stream: ElementStream) -> list[int]:
    # Uniform distinct indices in [0, total); fine for count << total.
    seen: set[int] = set()
    limit = (1 << 64) - ((1 << 64) % total)
    while len(seen) < count:
        r = stream._next64()
        if r < limit:
            seen.add(r % total)
    return sorted(seen)


def responder_subsets(
    n: int, n_r: int, mode: str = "exhaustive", sample_count: int | None = None,
    seed: int = 0, subset_cap: int = 10**6,
) -> list[tuple[int, ...]]:
    total = comb(n, n_r)
    if mode == "exhaustive":
        if total > subset_cap:
            raise ShapeMismatch(
                f"{total} responder subsets exceed the exhaustive cap {subset_cap}"
            )
        return list(combinations(range(1, n + 1), n_r))
    if mode == "sample":
        count = min(sample_count or 1, total)
        stream = ElementStream(fl.Field(fl.DEFAULT_MODULUS), derive_seed(seed, "subsets"))
        return [_unrank_combination(n, n_r, i) for i in _sample_distinct(total, count, stream)]
    raise ShapeMismatch(f"unknown verification mode {mode!r}")


def verify_decodability(
    scheme: Scheme,
    mode: str = "exhaustive",
    sample_count: int | None = None,
    seed: int = 0,
    subset_cap: int = 10**6,
    subproblem_cap: int = 200,
) -> list[tuple[int, ...]]:
    """Responder subsets whose stacked code rows are not invertible.

    Exhaustive over responder subsets (or a seeded sample of ``sample_count``
    of them).  Large-regime schemes with more than ``subproblem_cap`` coded
    sub-problems are checked on a deterministic seeded sample of sub-problems,
    since their count grows combinatorially in K_c.  The returned list is
    sorted, regardless of evaluation order.
    """
    subsets = responder_subsets(
        scheme.params.N, scheme.params.N_r, mode, sample_count, seed, subset_cap
    )
    f = fl.Field(scheme.params.q)
    q = f.q

    def full_rank_stacks(worker_groups) -> set[tuple[int, ...]]:
        # worker_groups: list over sub-problems of per-worker task-row arrays.
        bad: set[tuple[int, ...]] = set()
        for rows_by_worker in worker_groups:
            for a_set in subsets:
                if a_set in bad:
                    continue
                stack = np.concatenate([rows_by_worker[n - 1] for n in a_set])
                if fl._rank_raw(stack, q) != stack.shape[0]:
                    bad.add(tuple(a_set))
        return bad

    if scheme.regime == MIDDLE:
        groups = [[w.task_rows.array for w in scheme.workers]]
        failing = full_rank_stacks(groups)
    elif scheme.regime == SMALL:
        groups = [
            [w.task_rows.array for w in sub.workers] for sub in scheme.subschemes
        ]
        failing = full_rank_stacks(groups)
    elif scheme.regime == LARGE:
        total = scheme.mds.code_length
        if total > subproblem_cap:
            stream = ElementStream(f, derive_seed(seed, "large-subproblems"))
            indices = [i + 1 for i in _sample_distinct(total, subproblem_cap, stream)]
        else:
            indices = list(range(1, total + 1))
        groups = [
            [w.task_rows.array for w in scheme.subscheme(i).workers] for i in indices
        ]
        failing = full_rank_stacks(groups)
    elif scheme.regime == GROUPED_REGIME:
        failing = set()
        n_all = range(1, scheme.params.N + 1)
        for a_set in subsets:
            vecs = [
                scheme.grouped.null_vector(tuple(x for x in n_all if x not in pair))
                for pair in combinations(a_set, 2)
            ]
            v = fl.vectors_as_matrix(vecs, f, scheme.demand.k_c)
            if v.rows != v.cols or rank(v) != v.rows:
                failing.add(tuple(a_set))
    else:
        raise ShapeMismatch(f"unknown regime {scheme.regime!r}")
    return sorted(failing)


# ---------------------------------------------------------------------------
# Full-recovery fallback
# ---------------------------------------------------------------------------


def fallback_full_recovery(
    f_mat: DemandMatrix,
    a: Assignment,
    l_symbols: int | None = None,
    *,
    seed: int = 0,
    max_attempts: int = 16,
) -> Scheme:
    """Scheme that recovers every message individually, then any K_c demand.

    Used when a specific demand matrix defeats the null-space construction:
    the master instead requests K generic independent combinations (a fresh
    seeded full-rank K x K demand, verified decodable), inverts them to get
    all messages, and applies the original demand afterwards.  Communication
    cost is K.
    """
    k, k_c = f_mat.k, f_mat.k_c
    if rank(f_mat.matrix) != k_c:
        raise RankDeficientDemand("fallback needs a full-row-rank demand")
    if k_c == k:
        return build_large(f_mat, a, l_symbols)
    f = f_mat.field
    for attempt in range(max_attempts):
        g = random_matrix(k, k, f, derive_seed(seed, "full-recovery", attempt))
        if rank(g) != k:
            continue
        scheme = build_large(DemandMatrix(g), a, l_symbols)
        if verify_decodability(scheme):
            continue
        scheme.recombine = mat_mul(f_mat.matrix, inverse(g))
        return scheme
    raise LinsepError("no decodable full-recovery demand found; widen the search")
