"""Simulated-annealing sampler with chain analysis and ground-state statistics.

Randomness is organised per sample: sample i draws its starting state and
Metropolis uniforms from SeedSequence(seed, spawn_key=(1, i)), and gauge
block b from spawn_key (0, b).  Starting states are drawn in the problem frame
and carried into the gauge frame, so the spin-reversal transform leaves the
un-gauged samples bit-identical; it is kept because a hardware sampler is not
gauge-symmetric and the transform plumbing is part of the pipeline.
"""

from __future__ import annotations

import hashlib
import json
import math
import zlib
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .ising import gauge_transform

_MAX_BATCH_FLOATS = 1 << 23


def _rng(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


@dataclass(frozen=True)
class SAParams:
    num_reads: int = 100
    sweeps_per_temp: int = 4
    num_temps: int = 64
    t_hot: float | None = None
    t_cold: float | None = None
    temperatures: tuple | None = None
    gauge_period: int = 100
    use_gauge: bool = True

    def __post_init__(self):
        if self.num_reads < 1:
            raise ValueError("num_reads must be positive")
        if self.sweeps_per_temp < 1:
            raise ValueError("need at least one sweep per temperature")
        if self.gauge_period < 1:
            raise ValueError("gauge_period must be positive")
        if self.temperatures is not None:
            ts = tuple(float(t) for t in self.temperatures)
            object.__setattr__(self, "temperatures", ts)
            if not ts or any(t <= 0 for t in ts) or any(b > a for a, b in zip(ts, ts[1:])):
                raise ValueError("temperature ladder must be positive and descending")
        elif self.num_temps < 1:
            raise ValueError("need at least one temperature")
        if (self.t_hot is not None and self.t_cold is not None) and not self.t_hot >= self.t_cold > 0:
            raise ValueError("need t_hot >= t_cold > 0")

    def ladder(self, h):
        """Temperatures, hottest first."""
        if self.temperatures is not None:
            return np.array(self.temperatures)
        mags = np.abs([v for k, v in h.terms.items() if k and v != 0.0])
        t_hot = self.t_hot if self.t_hot is not None else (mags.max() if mags.size else 1.0)
        t_cold = self.t_cold if self.t_cold is not None else (0.05 * mags.min() if mags.size else 0.05)
        t_cold = min(t_cold, t_hot)
        return np.geomspace(t_hot, t_cold, self.num_temps)

    def to_dict(self):
        return asdict(self)

    def digest(self):
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SampleSet:
    samples: np.ndarray
    seed: int
    params: SAParams
    nodes: tuple | None = None

    @property
    def gauge_period(self):
        return self.params.gauge_period

    def __len__(self):
        return len(self.samples)

    def __eq__(self, other):
        return (
            isinstance(other, SampleSet)
            and self.seed == other.seed
            and self.params == other.params
            and self.nodes == other.nodes
            and np.array_equal(self.samples, other.samples)
        )

    def to_text(self):
        nodes = "" if self.nodes is None else ",".join(map(str, self.nodes))
        head = f"# seed={self.seed} params={self.params.digest()} nodes={nodes}"
        rows = ["".join("+" if v > 0 else "-" for v in row) for row in self.samples]
        return "\n".join([head] + rows) + "\n"

    @classmethod
    def from_text(cls, text, params=None):
        lines = text.splitlines()
        meta = dict(kv.split("=", 1) for kv in lines[0].lstrip("# ").split())
        nodes = tuple(int(v) for v in meta["nodes"].split(",")) if meta.get("nodes") else None
        samples = np.array([[1 if ch == "+" else -1 for ch in ln] for ln in lines[1:] if ln], dtype=np.int8)
        return cls(samples, int(meta["seed"]), params or SAParams(num_reads=max(len(samples), 1)), nodes)


def simulated_anneal(h, params=SAParams(), seed=0, nodes=None):
    """One independent Metropolis annealing run per sample."""
    if h.order > 2:
        raise ValueError("simulated annealing needs a 2-body Hamiltonian")
    n = h.n
    temps = params.ladder(h)
    betas = np.repeat(1.0 / temps, params.sweeps_per_temp)
    steps = len(betas)
    out = np.empty((params.num_reads, n), dtype=np.int8)
    batch = max(1, min(params.gauge_period, _MAX_BATCH_FLOATS // max(steps * n, 1)))
    for start in range(0, params.num_reads, params.gauge_period):
        stop = min(start + params.gauge_period, params.num_reads)
        block = start // params.gauge_period
        if params.use_gauge:
            g = _rng(seed, 0, block).choice(np.array([-1, 1], dtype=np.int8), size=n)
        else:
            g = np.ones(n, dtype=np.int8)
        arrays = gauge_transform(h, g).quadratic_arrays()
        for a in range(start, stop, batch):
            b = min(a + batch, stop)
            init = np.empty((b - a, n), dtype=np.int8)
            rand = np.empty((b - a, steps, n))
            for r, idx in enumerate(range(a, b)):
                rng = _rng(seed, 1, idx)
                init[r] = rng.choice(np.array([-1, 1], dtype=np.int8), size=n) * g
                rand[r] = rng.random((steps, n))
            out[a:b] = _kernels.anneal(*arrays, betas, init, rand) * g
    return SampleSet(out, int(seed), params, None if nodes is None else tuple(nodes))


# ---------------------------------------------------------------------------
# chains


def _columns(set_, e):
    nodes = set_.nodes if set_.nodes is not None else tuple(e.nodes)
    if len(nodes) != set_.samples.shape[1]:
        raise ValueError(f"sample width {set_.samples.shape[1]} does not match {len(nodes)} nodes")
    col = {v: i for i, v in enumerate(nodes)}
    return {q: np.array([col[v] for v in sorted(ns)]) for q, ns in sorted(e.chains.items(), key=lambda kv: str(kv[0]))}


def chain_keys(e):
    return sorted(e.chains, key=lambda q: (isinstance(q, str), q))


@dataclass(frozen=True)
class ChainReport:
    """``states[s, j]`` is +1 / -1 for an aligned chain and 0 when broken."""

    chains: tuple
    states: np.ndarray

    @property
    def break_rate(self):
        return (self.states == 0).mean(axis=0) if len(self.states) else np.zeros(len(self.chains))

    @property
    def unbroken(self):
        return (self.states != 0).all(axis=1)


def chain_states(set_, e):
    cols = _columns(set_, e)
    keys = chain_keys(e)
    S = set_.samples.astype(np.int64)
    states = np.zeros((len(S), len(keys)), dtype=np.int8)
    for j, q in enumerate(keys):
        total = S[:, cols[q]].sum(axis=1)
        size = len(cols[q])
        states[:, j] = np.where(total == size, 1, np.where(total == -size, -1, 0))
    return ChainReport(tuple(keys), states)


def _coin(seed, q):
    return 1 if _rng(seed, 2, zlib.crc32(str(q).encode())).random() < 0.5 else -1


def majority_fix(sample, e, seed, nodes=None):
    """Qubit-level assignment (in ``chain_keys`` order) by majority vote per chain."""
    sample = np.asarray(sample)
    nodes = tuple(e.nodes) if nodes is None else nodes
    col = {v: i for i, v in enumerate(nodes)}
    out = np.empty(len(e.chains), dtype=np.int8)
    for j, q in enumerate(chain_keys(e)):
        total = int(sum(int(sample[col[v]]) for v in e.chains[q]))
        out[j] = 1 if total > 0 else (-1 if total < 0 else _coin(seed, q))
    return out


def _sample_seed(seed, idx):
    return int(np.random.SeedSequence(int(seed), spawn_key=(3, idx)).generate_state(1)[0])


def fix_samples(set_, e):
    """Majority-vote every sample; tie coins depend on (set seed, sample index, chain)."""
    cols = _columns(set_, e)
    keys = chain_keys(e)
    S = set_.samples.astype(np.int64)
    out = np.empty((len(S), len(keys)), dtype=np.int8)
    for j, q in enumerate(keys):
        total = S[:, cols[q]].sum(axis=1)
        out[:, j] = np.sign(total)
        for i in np.flatnonzero(total == 0):
            out[i, j] = _coin(_sample_seed(set_.seed, int(i)), q)
    return out


def _gs_keys(exact_gs):
    keys = {tuple(int(v) for v in x) for x in exact_gs}
    if not keys:
        raise ValueError("exact ground-state set is empty")
    return keys


@dataclass(frozen=True)
class GSFraction:
    raw: float
    logical: float


def gs_fraction(set_, exact_gs, e):
    """Fraction of samples in the ground set: unbroken only (raw) and after fixing (logical)."""
    gs = _gs_keys(exact_gs)
    fixed = fix_samples(set_, e)
    hit = np.array([tuple(int(v) for v in row) in gs for row in fixed], dtype=bool)
    unbroken = chain_states(set_, e).unbroken
    n = max(len(fixed), 1)
    return GSFraction(float((hit & unbroken).sum() / n), float(hit.sum() / n))


def distribution_stats(set_, exact_gs, e):
    """Histogram over ground states plus per-qubit magnetisation statistics."""
    gs = sorted(_gs_keys(exact_gs), reverse=True)
    fixed = fix_samples(set_, e)
    rows = [tuple(int(v) for v in r) for r in fixed]
    counts = {k: 0 for k in gs}
    hits = []
    for r in rows:
        if r in counts:
            counts[r] += 1
            hits.append(r)
    n_gs = len(hits)
    reference = n_gs / len(gs)
    observed = np.array([counts[k] for k in gs], dtype=float)
    chi2 = float(((observed - reference) ** 2 / reference).sum()) if reference > 0 else math.nan
    arr = np.array(hits, dtype=float).reshape(-1, len(chain_keys(e)))
    mean = arr.mean(axis=0) if n_gs else np.full(arr.shape[1], math.nan)
    var = arr.var(axis=0) if n_gs else np.full(arr.shape[1], math.nan)
    return {
        "n_samples": len(rows),
        "n_ground": n_gs,
        "n_states": len(gs),
        "uniform_reference": reference,
        "chi_square": chi2,
        "counts": {"".join("+" if v > 0 else "-" for v in k): c for k, c in counts.items()},
        "qubits": [str(q) for q in chain_keys(e)],
        "mean": [float(v) for v in mean],
        "variance": [float(v) for v in var],
    }


def physical_from_qubits(qubit_values, e, nodes=None):
    """Physical sample with every chain aligned to its qubit value."""
    nodes = tuple(e.nodes) if nodes is None else nodes
    col = {v: i for i, v in enumerate(nodes)}
    x = np.zeros(len(nodes), dtype=np.int8)
    for q, v in zip(chain_keys(e), qubit_values):
        for node in e.chains[q]:
            x[col[node]] = v
    return x
