"""Arbitrary-order Ising Hamiltonians over spins in {-1, +1}."""

from __future__ import annotations

import numpy as np

from . import _kernels

ENERGY_TOL = 1e-9
BRUTE_FORCE_CAP = 24
_CHUNK = 1 << 20


def as_spins(x, n=None):
    """Validate and return ``x`` as an int8 spin vector."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError("spin assignment must be one-dimensional")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError("spin values must be -1 or +1")
    if n is not None and len(arr) != n:
        raise ValueError(f"expected {n} spins, got {len(arr)}")
    return arr.astype(np.int8)


def bits_to_spins(bits):
    """Convert {0,1} values to spins via s = 2b - 1."""
    return (2 * np.asarray(bits, dtype=np.int64) - 1).astype(np.int8)


def spins_to_bits(spins):
    return ((np.asarray(spins, dtype=np.int64) + 1) // 2).astype(np.int8)


def index_to_spins(state, n):
    """Spins of basis-state integer ``state`` (bit i set means spin i is -1)."""
    bits = (np.asarray(state, dtype=np.int64)[..., None] >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def spins_to_index(x):
    x = np.asarray(x)
    return int(((x < 0).astype(np.int64) << np.arange(len(x))).sum())


class IsingHamiltonian:
    """Sum of products of spins with real coefficients.

    ``terms`` maps a sorted tuple of distinct spin indices to its coefficient;
    the empty tuple is the constant offset.  Repeated index sets passed to the
    constructor are merged by adding their coefficients.  Instances are
    treated as immutable.
    """

    __slots__ = ("n", "_terms", "_csr")

    def __init__(self, n, terms=()):
        n = int(n)
        if n < 0:
            raise ValueError("spin count must be non-negative")
        items = terms.items() if isinstance(terms, dict) else terms
        merged = {}
        for idx, coef in items:
            key = tuple(sorted(int(i) for i in idx))
            if len(set(key)) != len(key):
                raise ValueError(f"repeated index in term {idx}")
            if key and (key[0] < 0 or key[-1] >= n):
                raise ValueError(f"term {idx} out of range for n={n}")
            merged[key] = merged.get(key, 0.0) + float(coef)
        self.n = n
        self._terms = dict(sorted(merged.items(), key=lambda kv: (len(kv[0]), kv[0])))
        self._csr = None

    @property
    def terms(self):
        return dict(self._terms)

    def __eq__(self, other):
        if not isinstance(other, IsingHamiltonian):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, tuple(self._terms.items())))

    def __repr__(self):
        return f"IsingHamiltonian(n={self.n}, terms={self._terms!r})"

    def coefficient(self, idx):
        return self._terms.get(tuple(sorted(idx)), 0.0)

    @property
    def offset(self):
        return self._terms.get((), 0.0)

    @property
    def order(self):
        return max((len(k) for k in self._terms), default=0)

    def nonconstant_terms(self):
        return {k: v for k, v in self._terms.items() if k}

    def with_terms(self, extra):
        """New Hamiltonian with ``extra`` terms added (merged by summation)."""
        return IsingHamiltonian(self.n, list(self._terms.items()) + list(dict(extra).items()))

    def scaled(self, factor):
        return IsingHamiltonian(self.n, {k: factor * v for k, v in self._terms.items()})

    def term_arrays(self):
        """(offset, ptr, idx, coef) arrays for the enumeration kernels."""
        if self._csr is None:
            keys = [k for k in self._terms if k]
            ptr = np.zeros(len(keys) + 1, dtype=np.int64)
            ptr[1:] = np.cumsum([len(k) for k in keys])
            idx = np.array([i for k in keys for i in k], dtype=np.int64)
            coef = np.array([self._terms[k] for k in keys], dtype=np.float64)
            self._csr = (self.offset, ptr, idx, coef)
        return self._csr

    def quadratic_arrays(self):
        """Fields and symmetric CSR neighbour lists of a 2-body Hamiltonian."""
        if self.order > 2:
            raise ValueError("Hamiltonian has terms above order 2")
        h = np.zeros(self.n)
        adj = [[] for _ in range(self.n)]
        for k, v in self._terms.items():
            if len(k) == 1:
                h[k[0]] += v
            elif len(k) == 2:
                i, j = k
                adj[i].append((j, v))
                adj[j].append((i, v))
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(a) for a in adj])
        nbr = np.array([j for a in adj for j, _ in a], dtype=np.int64)
        J = np.array([v for a in adj for _, v in a], dtype=np.float64)
        return h, ptr, nbr, J

    # -- text format -------------------------------------------------------

    def to_text(self):
        lines = [f"n {self.n}"]
        for k, v in self._terms.items():
            lines.append(f"{' '.join(map(str, k))} : {v!r}".lstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        n = None
        terms = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if n is None:
                head = line.split()
                if len(head) != 2 or head[0] != "n":
                    raise ValueError(f"line {lineno}: expected header 'n <count>'")
                n = int(head[1])
                continue
            if ":" not in line:
                raise ValueError(f"line {lineno}: expected 'indices : coefficient'")
            left, right = line.split(":", 1)
            terms.append((tuple(int(t) for t in left.split()), float(right)))
        if n is None:
            raise ValueError("missing header 'n <count>'")
        return cls(n, terms)


def energy(h, x):
    """Energy of one spin assignment."""
    x = np.asarray(x)
    if x.shape != (h.n,):
        raise ValueError(f"assignment length {x.shape} does not match n={h.n}")
    total = 0.0
    for k, v in h.terms.items():
        total += v * (float(np.prod(x[list(k)])) if k else 1.0)
    return total


def energies(h, xs):
    """Energies of a batch of assignments, shape (S, n)."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != h.n:
        raise ValueError(f"expected shape (S, {h.n}), got {xs.shape}")
    out = np.full(xs.shape[0], h.offset)
    for k, v in h.nonconstant_terms().items():
        out += v * np.prod(xs[:, list(k)], axis=1)
    return out


def all_energies(h, cap=BRUTE_FORCE_CAP):
    """Energies of all 2**n basis states, indexed by state integer."""
    if h.n > cap:
        raise ValueError(f"n={h.n} exceeds the enumeration cap of {cap}")
    offset, ptr, idx, coef = h.term_arrays()
    total = 1 << h.n
    if total <= _CHUNK:
        return _kernels.energies_range(0, total, offset, ptr, idx, coef)
    return np.concatenate([
        _kernels.energies_range(a, min(_CHUNK, total - a), offset, ptr, idx, coef)
        for a in range(0, total, _CHUNK)
    ])


def brute_force_ground_states(h, cap=BRUTE_FORCE_CAP, tol=ENERGY_TOL):
    """Exhaustive minimum; returns (min energy, list of ground-state spin vectors)."""
    if h.n > cap:
        raise ValueError(f"n={h.n} exceeds the brute-force cap of {cap}")
    offset, ptr, idx, coef = h.term_arrays()
    total = 1 << h.n
    best = np.inf
    found, found_e = [], []
    for a in range(0, total, _CHUNK):
        e = _kernels.energies_range(a, min(_CHUNK, total - a), offset, ptr, idx, coef)
        lo = float(e.min())
        if lo > best + tol:
            continue
        best = min(best, lo)
        hits = np.flatnonzero(e <= best + tol)
        found.append(hits + a)
        found_e.append(e[hits])
    # a later chunk may have lowered the minimum; drop candidates now above it
    states = np.concatenate(found)
    keep = np.concatenate(found_e) <= best + tol
    return best, list(index_to_spins(np.sort(states[keep]), h.n))


def add_last_spin_bias(h, eps):
    """Add ``eps`` to the local field of spin n-1."""
    if h.n < 1:
        raise ValueError("Hamiltonian has no spins")
    if eps == 0:
        raise ValueError("bias must be non-zero")
    return h.with_terms({(h.n - 1,): eps})


def gauge_transform(h, g):
    """Spin-reversal transform: energy(h, x) == energy(gauge_transform(h, g), x * g)."""
    g = as_spins(g)
    if len(g) != h.n:
        raise ValueError(f"gauge length {len(g)} does not match n={h.n}")
    return IsingHamiltonian(
        h.n, {k: v * (int(np.prod(g[list(k)])) if k else 1) for k, v in h.terms.items()}
    )
