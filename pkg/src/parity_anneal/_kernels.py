"""Hot loops: energy enumeration and Metropolis sweeps.

Each kernel has a numba version and a pure-numpy version that produce the same
numbers.  Set ``PARITY_ANNEAL_BACKEND=numpy`` to force the numpy path (numba is
used by default when it imports).
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

_backend = os.environ.get("PARITY_ANNEAL_BACKEND", "numba").strip().lower()
if _backend not in ("numba", "numpy"):
    raise ValueError(f"PARITY_ANNEAL_BACKEND must be 'numba' or 'numpy', got {_backend!r}")


def backend():
    """Name of the active kernel backend."""
    return "numba" if (_backend == "numba" and HAVE_NUMBA) else "numpy"


def set_backend(name):
    """Switch kernels at runtime; used by tests and the benchmark."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


# ---------------------------------------------------------------------------
# energies of a contiguous range of basis states
#
# State integer b encodes spins by s_i = +1 if bit i of b is 0, else -1, so
# state 0 is all +1.  A term's product is (-1)**(parity of its masked bits).
# Terms are summed in order in both backends, giving bit-identical results.


def _energies_numpy(start, count, offset, ptr, idx, coef):
    states = np.arange(start, start + count, dtype=np.int64)
    out = np.full(count, offset, dtype=np.float64)
    for t in range(len(coef)):
        par = np.zeros(count, dtype=np.int64)
        for p in range(ptr[t], ptr[t + 1]):
            par ^= (states >> idx[p]) & 1
        out += coef[t] * (1 - 2 * par)
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _energies_jit(start, count, offset, ptr, idx, coef):
        out = np.empty(count, dtype=np.float64)
        for s in range(count):
            state = start + s
            e = offset
            for t in range(coef.shape[0]):
                par = 0
                for p in range(ptr[t], ptr[t + 1]):
                    par ^= (state >> idx[p]) & 1
                e += coef[t] * (1 - 2 * par)
            out[s] = e
        return out


def energies_range(start, count, offset, ptr, idx, coef):
    """Energies of basis states ``start .. start+count-1``."""
    if backend() == "numba":
        return _energies_jit(np.int64(start), np.int64(count), float(offset), ptr, idx, coef)
    return _energies_numpy(start, count, offset, ptr, idx, coef)


# ---------------------------------------------------------------------------
# Metropolis single-spin-flip annealing on a 2-body model in CSR form.
#
# init:  (S, n) int8 starting states
# rand:  (S, n_steps, n) uniforms, one per attempted flip
# betas: (n_steps,) inverse temperature of every sweep


def _anneal_numpy(h, ptr, nbr, J, betas, init, rand):
    s = init.astype(np.float64).copy()
    n = s.shape[1]
    for step, beta in enumerate(betas):
        for i in range(n):
            cols = nbr[ptr[i]:ptr[i + 1]]
            field = np.full(s.shape[0], h[i])
            for c, w in zip(cols, J[ptr[i]:ptr[i + 1]]):
                field += w * s[:, c]
            de = -2.0 * s[:, i] * field
            flip = (de <= 0.0) | (rand[:, step, i] < np.exp(-beta * np.maximum(de, 0.0)))
            s[flip, i] = -s[flip, i]
    return s.astype(np.int8)


if HAVE_NUMBA:

    @njit(cache=True)
    def _anneal_jit(h, ptr, nbr, J, betas, init, rand):
        S, n = init.shape
        out = np.empty((S, n), dtype=np.int8)
        s = np.empty(n, dtype=np.float64)
        for r in range(S):
            for i in range(n):
                s[i] = init[r, i]
            for step in range(betas.shape[0]):
                beta = betas[step]
                for i in range(n):
                    field = h[i]
                    for p in range(ptr[i], ptr[i + 1]):
                        field += J[p] * s[nbr[p]]
                    de = -2.0 * s[i] * field
                    if de <= 0.0:
                        s[i] = -s[i]
                    elif rand[r, step, i] < np.exp(-beta * de):
                        s[i] = -s[i]
            for i in range(n):
                out[r, i] = np.int8(s[i])
        return out


def anneal(h, ptr, nbr, J, betas, init, rand):
    """Run one annealing trajectory per row of ``init``; returns final states."""
    if backend() == "numba":
        return _anneal_jit(h, ptr, nbr, J, betas, init, rand)
    return _anneal_numpy(h, ptr, nbr, J, betas, init, rand)
