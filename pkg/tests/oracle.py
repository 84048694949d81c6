"""Slow, independent reference computations used as test oracles.

Nothing here imports the package's energy or enumeration code.
"""

import itertools

import numpy as np


def term_energy(terms, x):
    return sum(v * (np.prod([x[i] for i in k]) if k else 1.0) for k, v in terms.items())


def spectrum(terms, n):
    """Energies of all 2**n assignments in itertools.product order over (+1, -1)."""
    return [term_energy(terms, x) for x in itertools.product((1, -1), repeat=n)]


def ground(terms, n, tol=1e-9):
    pts = list(itertools.product((1, -1), repeat=n))
    es = [term_energy(terms, x) for x in pts]
    lo = min(es)
    return lo, {x for x, e in zip(pts, es) if e <= lo + tol}


def psp_terms(C, groups, k, lam=1.0):
    """Paint-shop Hamiltonian written out directly from its defining sum."""
    t = {}
    for i in range(C - 1):
        t[(i, i + 1)] = t.get((i, i + 1), 0.0) - 1.0 / (C - 1)
    for g, kj in zip(groups, k):
        for i in g:
            t[(i,)] = t.get((i,), 0.0) + lam * (len(g) - 2 * kj)
        for a, b in itertools.combinations(sorted(g), 2):
            t[(a, b)] = t.get((a, b), 0.0) + lam
    return t


def square_terms():
    """H = (2a + s1 + s2 + s3 + s4)^2 expanded, aux is spin 4."""
    t = {(): 4.0 + 4.0}
    for i in range(4):
        t[(i, 4)] = 4.0
    for a, b in itertools.combinations(range(4), 2):
        t[(a, b)] = 2.0
    return t


def transverse_matrix(terms, n):
    """Dense (1-s) sum X + s H builder using Kronecker products."""
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    I = np.eye(2)
    ops = []
    for i in range(n):
        m = np.array([[1.0]])
        for j in range(n):
            # qubit 0 is the least significant bit of the basis index
            m = np.kron(m, X if j == n - 1 - i else I)
        ops.append(m)
    Tx = sum(ops)
    diag = np.empty(1 << n)
    for s in range(1 << n):
        x = [1 - 2 * ((s >> i) & 1) for i in range(n)]
        diag[s] = term_energy(terms, x)
    return Tx, np.diag(diag)


def min_gap_dense(terms, n, grid):
    Tx, D = transverse_matrix(terms, n)
    gaps = []
    for s in grid:
        ev = np.linalg.eigvalsh((1 - s) * Tx + s * D)
        gaps.append(ev[1] - ev[0])
    return np.array(gaps)
