"""Exact spectra of H(s) = (1 - s) * sum_i sigma_x^i + s * H_f."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .ising import add_last_spin_bias, all_energies, brute_force_ground_states
from .paintshop import PaintShopInstance, make_instance
from .parity import compile_lhz, quadratize, solve_flip_mask, to_multibody, tune_penalty

SIM_CAP = 20
DENSE_MAX_N = 10
DEFAULT_GRID = 201
DEFAULT_BIAS = 0.01
DEFAULT_LEVELS = 8
S_TOL = 1e-7
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Schedule:
    """Piecewise-linear s(t); flat segments are pauses."""

    breakpoints: tuple

    def __post_init__(self):
        pts = tuple((float(t), float(s)) for t, s in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if len(pts) < 2:
            raise ValueError("schedule needs at least two breakpoints")
        ts = [t for t, _ in pts]
        ss = [s for _, s in pts]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("times must be strictly increasing")
        if any(b < a for a, b in zip(ss, ss[1:])):
            raise ValueError("s must be non-decreasing")
        if ss[0] != 0.0 or ss[-1] != 1.0:
            raise ValueError("schedule must start at s=0 and end at s=1")

    @classmethod
    def linear(cls, total_time=20.0):
        return cls(((0.0, 0.0), (total_time, 1.0)))

    @classmethod
    def with_pause(cls, s_pause, pause=10.0, t_pause=None, total_time=None):
        """Ramp to ``s_pause``, hold for ``pause``, then finish at the original rate."""
        if not 0.0 < s_pause < 1.0:
            raise ValueError("pause point must lie strictly inside (0, 1)")
        t_pause = 0.5 * s_pause * 20.0 if t_pause is None else t_pause
        rate = s_pause / t_pause
        t_end = t_pause + pause + (1.0 - s_pause) / rate if total_time is None else total_time
        return cls(((0.0, 0.0), (t_pause, s_pause), (t_pause + pause, s_pause), (t_end, 1.0)))

    def s(self, t):
        ts, ss = zip(*self.breakpoints)
        return np.interp(t, ts, ss)

    @property
    def pauses(self):
        return [(a[0], b[0], a[1]) for a, b in zip(self.breakpoints, self.breakpoints[1:]) if a[1] == b[1]]


class InterpolatedOperator:
    """Sparse pieces of H(s); ``at(s)`` assembles the operator."""

    def __init__(self, h_f, cap=SIM_CAP):
        n = h_f.n
        if n > cap:
            raise ValueError(f"{n} spins exceed the simulation cap of {cap}")
        if n < 1:
            raise ValueError("need at least one spin")
        self.n = n
        self.diagonal = all_energies(h_f, cap)
        dim = 1 << n
        states = np.arange(dim)
        rows = np.repeat(states, n)
        cols = (states[:, None] ^ (1 << np.arange(n))).ravel()
        self.transverse = sp.csr_matrix((np.ones(dim * n), (rows, cols)), shape=(dim, dim))

    def at(self, s):
        if not 0.0 <= s <= 1.0:
            raise ValueError("s must lie in [0, 1]")
        return ((1.0 - s) * self.transverse + sp.diags(s * self.diagonal)).tocsr()


def interpolated_hamiltonian(h_f, s, cap=SIM_CAP):
    return InterpolatedOperator(h_f, cap).at(s)


def low_spectrum(op, k=2, dense_max_n=DENSE_MAX_N, tol=1e-8):
    """k lowest eigenvalues in ascending order."""
    if k < 2:
        raise ValueError("need at least two levels")
    dim = op.shape[0]
    k = min(k, dim)
    if dim <= (1 << dense_max_n):
        mat = op.toarray() if sp.issparse(op) else np.asarray(op)
        return scipy.linalg.eigvalsh(mat, subset_by_index=(0, k - 1))
    try:
        vals, vecs = spla.eigsh(op, k=k, which="SA", tol=1e-12, ncv=max(2 * k + 1, 20))
    except spla.ArpackNoConvergence as err:
        raise RuntimeError(f"eigensolver did not converge: {err}") from err
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    residual = np.linalg.norm(op @ vecs - vecs * vals, axis=0).max()
    if residual > tol:
        raise RuntimeError(f"eigensolver residual {residual:.2e} above {tol:.0e}")
    return vals


@dataclass(frozen=True)
class GapScan:
    grid: np.ndarray
    levels: np.ndarray
    min_gap: float
    s_star: float
    biased: bool = False

    @property
    def gaps(self):
        return self.levels[:, 1] - self.levels[:, 0]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s"] + [f"eps{i}" for i in range(self.levels.shape[1])])
        for s, row in zip(self.grid, self.levels):
            w.writerow([repr(float(s))] + [repr(float(v)) for v in row])
        return buf.getvalue()


def _ground_degenerate(h_f, cap):
    _, states = brute_force_ground_states(h_f, cap)
    return len(states) > 1


def gap_scan(h_f, grid_size=DEFAULT_GRID, bias=DEFAULT_BIAS, k=DEFAULT_LEVELS,
             cap=SIM_CAP, dense_max_n=DENSE_MAX_N, s_tol=S_TOL):
    """Minimum of eps1 - eps0 over s in [0, 1].

    A degenerate classical ground state gets ``bias`` on the last spin first.
    The coarse grid minimum is refined by golden-section search on its
    bracketing interval.
    """
    if grid_size < 3:
        raise ValueError("grid needs at least 3 points")
    biased = False
    if bias and _ground_degenerate(h_f, cap):
        h_f = add_last_spin_bias(h_f, bias)
        biased = True
    op = InterpolatedOperator(h_f, cap)
    k = max(2, min(k, 1 << op.n))
    grid = np.linspace(0.0, 1.0, grid_size)
    levels = np.array([low_spectrum(op.at(s), k, dense_max_n) for s in grid])
    gaps = levels[:, 1] - levels[:, 0]
    i = int(np.argmin(gaps))

    def gap(s):
        ev = low_spectrum(op.at(s), 2, dense_max_n)
        return ev[1] - ev[0]

    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid_size - 1)]
    s_star, g_star = _golden_min(gap, a, b, s_tol)
    if gaps[i] <= g_star:
        s_star, g_star = float(grid[i]), float(gaps[i])
    if g_star < 1e-10:
        raise RuntimeError("degeneracy unresolved: minimum gap is numerically zero")
    return GapScan(grid, levels, float(g_star), float(s_star), biased)


def _golden_min(f, a, b, tol):
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


# ---------------------------------------------------------------------------
# encodings


@dataclass(frozen=True)
class EncodingRow:
    encoding: str
    n_qubits: int
    min_gap: float | None
    s_star: float | None
    penalty: float | None = None
    skipped: str | None = None

    def to_dict(self):
        return {
            "encoding": self.encoding,
            "n_qubits": self.n_qubits,
            "min_gap": self.min_gap,
            "s_star": self.s_star,
            "penalty": self.penalty,
            "skipped": self.skipped,
        }


def encoded_hamiltonians(h_logical, bias=DEFAULT_BIAS, cap=SIM_CAP):
    """Logical, multi-body and 2-body Hamiltonians with tuned penalties.

    The bias (if the logical ground state is degenerate) is applied to the
    last logical spin before compiling.  Returns {encoding: (hamiltonian,
    compilation or None, penalty or None)}.
    """
    if bias and _ground_degenerate(h_logical, cap):
        h_logical = add_last_spin_bias(h_logical, bias)
    out = {"logical": (h_logical, None, None)}
    c = compile_lhz(h_logical)
    n_multi = c.K
    if n_multi <= cap:
        lam = tune_penalty(c, h_logical, "multibody", cap)
        cm = c.with_penalty(lam)
        out["multibody"] = (to_multibody(cm), cm, lam)
    else:
        out["multibody"] = (None, c, None)
    c2 = c.with_flip_mask(solve_flip_mask(c))
    if c2.K + len(c2.plaquettes) <= cap:
        lam2 = tune_penalty(c2, h_logical, "2body", cap)
        c2 = c2.with_penalty(lam2)
        out["2body"] = (quadratize(c2), c2, lam2)
    else:
        out["2body"] = (None, c2, None)
    return out


def compare_encodings(inst_or_h, grid_size=DEFAULT_GRID, bias=DEFAULT_BIAS, cap=SIM_CAP, **kw):
    """Gap scans of the logical, multi-body and 2-body encodings."""
    if isinstance(inst_or_h, PaintShopInstance):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            h = make_instance(inst_or_h)
    else:
        h = inst_or_h
    rows = []
    for name, (ham, comp, lam) in encoded_hamiltonians(h, bias, cap).items():
        if ham is None:
            n = comp.K if name == "multibody" else comp.K + len(comp.plaquettes)
            rows.append(EncodingRow(name, n, None, None, None, f"exceeds simulation cap {cap}"))
            continue
        if ham.n > cap:
            rows.append(EncodingRow(name, ham.n, None, None, lam, f"exceeds simulation cap {cap}"))
            continue
        scan = gap_scan(ham, grid_size, bias=0.0, cap=cap, **kw)
        rows.append(EncodingRow(name, ham.n, scan.min_gap, scan.s_star, lam))
    return rows


def summary_json(row):
    return json.dumps(row.to_dict(), sort_keys=True)
