"""Small dense linear algebra over GF(2)."""

import numpy as np


def rref(A):
    """Row-reduce a 0/1 matrix; returns (reduced copy, pivot columns)."""
    M = np.array(A, dtype=np.uint8) & 1
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(M[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            M[[r, p]] = M[[p, r]]
        others = np.flatnonzero(M[:, c])
        others = others[others != r]
        M[others] ^= M[r]
        pivots.append(c)
        r += 1
    return M, pivots


def solve(A, b):
    """One solution of A x = b, free variables set to 0; None if inconsistent."""
    A = np.array(A, dtype=np.uint8) & 1
    b = np.array(b, dtype=np.uint8).reshape(-1, 1) & 1
    if A.shape[0] == 0:
        return np.zeros(A.shape[1], dtype=np.uint8)
    M, pivots = rref(np.hstack([A, b]))
    n = A.shape[1]
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for r, c in enumerate(pivots):
        x[c] = M[r, n]
    return x


def rank(A):
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(A)[1])
