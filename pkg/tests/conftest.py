"""Shared test helpers: slow pure-Python oracles kept independent of the library."""

import numpy as np


def ref_matmul(a, b, q):
    """Schoolbook modular matrix product on Python ints (reference oracle)."""
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    assert all(len(r) == inner for r in a)
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            acc = 0
            for k in range(inner):
                acc += a[i][k] * b[k][j]
            out[i][j] = acc % q
    return out


def ref_rank(rows, q):
    """Rank over F_q by fraction-free elimination on Python ints."""
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if m[i][c] % q), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], q - 2, q)
        m[r] = [x * inv % q for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] % q:
                f = m[i][c]
                m[i] = [(x - f * y) % q for x, y in zip(m[i], m[r])]
        r += 1
        if r == n_rows:
            break
    return r


def in_row_span(vec, rows, q):
    """Membership of vec in the F_q row span of rows."""
    base = [list(r) for r in rows]
    return ref_rank(base + [list(vec)], q) == ref_rank(base, q)


def as_array(m):
    return np.asarray(m.array if hasattr(m, "array") else m)
