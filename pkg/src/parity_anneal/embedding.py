"""Scalable embeddings of parity plaquettes onto Pegasus diamonds.

Diamonds are addressed by lattice coordinates (row r, column c) where
D(r, c+1) is the right neighbour of D(r, c) and D(r+1, c) the diamond below
it.  Both embeddings lay out a grid of parity-qubit sites (i, c) and one
auxiliary site per cell (r, c); a cell's corners are the grid points (r, c),
(r, c+1), (r+1, c) and (r+1, c+1).

original
    Even rows carry 4-spin parity loops Q(i, c) = D(i,c).{v0,h0} +
    D(i,c+1).{v0p,v1}; odd rows carry P(i, c) = D(i,c).{v0,v0p,v1,h0}.  The
    auxiliary of cell (r, c) is D(r,c+1).{h1,h1p} + D(r+1,c+1).{h0p,v1p}.

dense
    Each diamond D(r, c) contributes a 2-spin top part {v1,h1}, a 2-spin
    bottom part {v1p,h1p} and the auxiliary {h0,h0p} of cell (r, c).  Grid
    point (i, c) joins the bottom of D(i-1, c) with the top of D(i, c), so
    neighbouring rows share parity qubits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .ising import IsingHamiltonian
from .pegasus import extract_diamonds

MAX_CHAIN = {"original": 4, "dense": 5}
CHAIN_PREFACTOR = 1.414

_ORIGINAL_EVEN = (("v0", "h0"), ("v0p", "v1"))
_ORIGINAL_ODD = ("v0", "v0p", "v1", "h0")
_ORIGINAL_AUX = (("h1", "h1p"), ("h0p", "v1p"))
_DENSE_TOP = ("v1", "h1")
_DENSE_BOTTOM = ("v1p", "h1p")
_DENSE_AUX = ("h0", "h0p")


def point_id(i, c):
    return f"p{i}_{c}"


def aux_id(r, c):
    return f"a{r}_{c}"


@dataclass(frozen=True)
class Cell:
    """One plaquette site: four corner grid points and an auxiliary site.

    ``corners`` maps (i, c) grid points to site ids.  ``parts`` gives, per
    site, the physical nodes this cell relies on; an embedding that only uses
    some cells keeps just the union of their parts.
    """

    anchor: tuple
    corners: dict
    aux: str
    parts: dict


@dataclass(frozen=True)
class DerivedTopology:
    style: str
    chains: dict
    points: dict
    cells: dict
    edges: frozenset
    missing: frozenset

    @property
    def qubits(self):
        return frozenset(self.chains)

    def linked(self, a, b):
        return frozenset((a, b)) in self.edges

    def cell_usable(self, anchor, corners=None):
        """All needed sites present and pairwise coupled (K5, or K4 for a triangle)."""
        cell = self.cells.get(anchor)
        if cell is None:
            return False
        pts = cell.corners.keys() if corners is None else corners
        if any(p not in cell.corners for p in pts):
            return False
        sites = [cell.aux] + [cell.corners[p] for p in pts]
        if any(s in self.missing for s in sites):
            return False
        return all(self.linked(a, b) for a, b in combinations(sites, 2))

    @classmethod
    def empty(cls, style="dense"):
        return cls(style, {}, {}, {}, frozenset(), frozenset())


@dataclass(frozen=True)
class Embedding:
    style: str
    chains: dict
    couplings: dict
    chain_edges: dict = field(default_factory=dict)

    @property
    def nodes(self):
        return sorted(set().union(*self.chains.values())) if self.chains else []

    def coupling(self, a, b):
        if (a, b) in self.couplings:
            return self.couplings[(a, b)]
        return self.couplings.get((b, a))

    def to_dict(self):
        return {
            "style": self.style,
            "chains": {str(q): sorted(ns) for q, ns in self.chains.items()},
            "couplings": {f"{a},{b}": sorted(map(list, es)) for (a, b), es in self.couplings.items()},
            "chain_edges": {str(q): sorted(map(list, es)) for q, es in self.chain_edges.items()},
        }

    @classmethod
    def from_dict(cls, d):
        def key(s):
            return int(s) if s.lstrip("-").isdigit() else s

        chains = {key(q): frozenset(ns) for q, ns in d["chains"].items()}
        couplings = {}
        for k, es in d["couplings"].items():
            a, b = k.split(",")
            couplings[(key(a), key(b))] = frozenset(tuple(e) for e in es)
        chain_edges = {key(q): frozenset(tuple(e) for e in es) for q, es in d.get("chain_edges", {}).items()}
        return cls(d["style"], chains, couplings, chain_edges)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# construction


def _lattice(g):
    return {(d.row, d.position): d for row in extract_diamonds(g) for d in row}


def _pick(d, names):
    return frozenset(d[n] for n in names)


def _edges_between(g, a, b):
    return frozenset(
        tuple(sorted((x, y))) for x in a for y in g.neighbors(x) if y in b
    )


def _induced_edges(g, nodes):
    return frozenset(tuple(sorted((x, y))) for x in nodes for y in g.neighbors(x) if y in nodes and x < y)


def _finish(g, style, cells):
    chains = {}
    for cell in cells.values():
        for site, nodes in cell.parts.items():
            chains[site] = chains.get(site, frozenset()) | nodes
    points = {p: s for cell in cells.values() for p, s in cell.corners.items()}
    missing = frozenset(s for s, ns in chains.items() if ns & g.defects)
    edges = set()
    for cell in cells.values():
        sites = list(cell.parts)
        for a, b in combinations(sites, 2):
            pa = cell.parts[a] - g.defects
            pb = cell.parts[b] - g.defects
            if _edges_between(g, pa, pb):
                edges.add(frozenset((a, b)))
    topo = DerivedTopology(style, chains, points, cells, frozenset(edges), missing)
    if not cells:
        raise ValueError(f"P_{g.m} is too small for a single {style} plaquette")
    return _full_embedding(g, topo), topo


def _full_embedding(g, topo):
    usable = {s: ns for s, ns in topo.chains.items() if s not in topo.missing}
    couplings = {}
    for cell in topo.cells.values():
        for a, b in combinations(sorted(cell.parts), 2):
            if a in usable and b in usable and (a, b) not in couplings:
                couplings[(a, b)] = _edges_between(g, usable[a], usable[b])
    chain_edges = {s: _induced_edges(g, ns) for s, ns in usable.items()}
    return Embedding(topo.style, usable, couplings, chain_edges)


def build_original(g):
    """4-spin loop embedding: 20 physical spins per plaquette."""
    D = _lattice(g)

    def point(i, c):
        if i % 2 == 0:
            if (i, c) in D and (i, c + 1) in D:
                return _pick(D[i, c], _ORIGINAL_EVEN[0]) | _pick(D[i, c + 1], _ORIGINAL_EVEN[1])
            return None
        return _pick(D[i, c], _ORIGINAL_ODD) if (i, c) in D else None

    cells = {}
    for r, c in sorted(D):
        corners = [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)]
        chains = [point(*p) for p in corners]
        if any(ch is None for ch in chains) or (r, c + 1) not in D or (r + 1, c + 1) not in D:
            continue
        aux = _pick(D[r, c + 1], _ORIGINAL_AUX[0]) | _pick(D[r + 1, c + 1], _ORIGINAL_AUX[1])
        parts = {point_id(*p): ch for p, ch in zip(corners, chains)}
        parts[aux_id(r, c)] = aux
        cells[(r, c)] = Cell((r, c), {p: point_id(*p) for p in corners}, aux_id(r, c), parts)
    return _finish(g, "original", cells)


def build_dense(g):
    """Compact embedding: 10 physical spins for an isolated plaquette, shared corners."""
    D = _lattice(g)
    cells = {}
    for r, c in sorted(D):
        if (r, c + 1) not in D:
            continue
        left, right = D[r, c], D[r, c + 1]
        parts = {
            point_id(r, c): _pick(left, _DENSE_TOP),
            point_id(r + 1, c): _pick(left, _DENSE_BOTTOM),
            point_id(r, c + 1): _pick(right, _DENSE_TOP),
            point_id(r + 1, c + 1): _pick(right, _DENSE_BOTTOM),
            aux_id(r, c): _pick(left, _DENSE_AUX),
        }
        corners = {p: point_id(*p) for p in [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)]}
        cells[(r, c)] = Cell((r, c), corners, aux_id(r, c), parts)
    return _finish(g, "dense", cells)


def build_embedding(g, style):
    if style == "original":
        return build_original(g)
    if style == "dense":
        return build_dense(g)
    raise ValueError(f"unknown embedding style {style!r}")


# ---------------------------------------------------------------------------
# LHZ placement


ORIENTATIONS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class LHZPlacement:
    """LHZ triangle of base N: staircase point (a, b) sits at grid point
    (anchor[0] + sign[0]*a, anchor[1] + sign[1]*b), for a + b <= N - 1."""

    N: int
    anchor: tuple = (0, 0)
    sign: tuple = (1, 1)

    def point(self, a, b):
        return (self.anchor[0] + self.sign[0] * a, self.anchor[1] + self.sign[1] * b)

    def cell(self, a, b):
        """Topology cell anchor and the grid points of LHZ cell (a, b) that are used."""
        used = [(a, b), (a + 1, b), (a, b + 1)]
        if a + b + 2 <= self.N - 1:
            used.append((a + 1, b + 1))
        pts = [self.point(*p) for p in used]
        corner = (min(p[0] for p in [self.point(a, b), self.point(a + 1, b + 1)]),
                  min(p[1] for p in [self.point(a, b), self.point(a + 1, b + 1)]))
        return corner, pts


def _fits(t, pl):
    N = pl.N
    for a in range(N):
        for b in range(N - a):
            site = t.points.get(pl.point(a, b))
            if site is None or site in t.missing:
                return False
    for a in range(N - 1):
        for b in range(N - 1 - a):
            anchor, pts = pl.cell(a, b)
            if not t.cell_usable(anchor, pts):
                return False
    return True


def find_largest_lhz(t):
    """Largest LHZ triangle whose sites and couplings are all present.

    Every grid point and orientation is tried as an anchor; the feasible base
    size is monotone, so it is found by binary search.  Returns an
    LHZPlacement with N = 0 when not even a single triangle fits.
    """
    points = list(t.points)
    if not points:
        return LHZPlacement(0)
    rows = {p[0] for p in points}
    cols = {p[1] for p in points}
    upper = min(max(rows) - min(rows), max(cols) - min(cols)) + 1

    def any_fit(N):
        for p in sorted(points):
            for sign in ORIENTATIONS:
                pl = LHZPlacement(N, p, sign)
                if _fits(t, pl):
                    return pl
        return None

    best = any_fit(2)
    if best is None:
        return LHZPlacement(0)
    lo, hi = 2, upper
    while lo < hi:
        mid = (lo + hi + 1) // 2
        pl = any_fit(mid)
        if pl is not None:
            best, lo = pl, mid
        else:
            hi = mid - 1
    return best


def place_compilation(g, t, c, placement=None):
    """Embedding of a quadratized LHZ compilation on a derived topology.

    Chain keys are the spin indices of ``quadratize(c)``: parity qubits
    0..K-1 followed by one auxiliary per plaquette.
    """
    if placement is None:
        placement = find_largest_lhz(t)
    if placement.N < c.logical_n:
        raise ValueError(f"placement holds N={placement.N}, compilation needs {c.logical_n}")
    placement = LHZPlacement(c.logical_n, placement.anchor, placement.sign)
    if not _fits(t, placement):
        raise ValueError("placement does not fit the topology")
    parts = {}
    groups = []
    for l, p in enumerate(c.plaquettes):
        members = c.member_indices(p)
        pos = [c.parity_qubits[j].grid_pos for j in members]
        a0, b0 = min(q[0] for q in pos), min(q[1] for q in pos)
        anchor, _ = placement.cell(a0, b0)
        cell = t.cells[anchor]
        keys = []
        for j, q in zip(members, pos):
            site = cell.corners[placement.point(*q)]
            parts[j] = parts.get(j, frozenset()) | cell.parts[site]
            keys.append(j)
        parts[p.aux] = cell.parts[cell.aux]
        groups.append(keys + [p.aux])
    return _restricted(g, t.style, parts, groups)


def place_plaquette(g, t, c, anchor=None):
    """Embed a single-plaquette compilation (as from ``single_plaquette``) on one cell."""
    if len(c.plaquettes) != 1:
        raise ValueError("expected a compilation with exactly one plaquette")
    p = c.plaquettes[0]
    need = 4 if p.kind == "square" else 3
    candidates = [anchor] if anchor is not None else sorted(t.cells)
    for a in candidates:
        cell = t.cells.get(a)
        if cell is None:
            continue
        corners = sorted(cell.corners)
        ring = [corners[0], corners[1], corners[3], corners[2]][:need]
        if not t.cell_usable(a, ring):
            continue
        parts = {}
        for j, pt in zip(c.member_indices(p), ring):
            parts[j] = cell.parts[cell.corners[pt]]
        parts[p.aux] = cell.parts[cell.aux]
        return _restricted(g, t.style, parts, [list(parts)])
    raise ValueError("no usable cell for the plaquette")


def _restricted(g, style, chains, groups):
    couplings = {}
    for grp in groups:
        for a, b in combinations(sorted(grp), 2):
            couplings[(a, b)] = _edges_between(g, chains[a], chains[b])
    chain_edges = {q: _induced_edges(g, ns) for q, ns in chains.items()}
    return Embedding(style, dict(sorted(chains.items())), couplings, chain_edges)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self):
        return not self.violations


def validate_embedding(e, g):
    """Check disjointness, connectivity, couplings, defects and chain length."""
    out = []
    owner = {}
    limit = MAX_CHAIN.get(e.style)
    for q, nodes in e.chains.items():
        if not nodes:
            out.append(("empty chain", q))
            continue
        if nodes - g.nodes:
            out.append(("node not in graph", q))
            continue
        if nodes & g.defects:
            out.append(("chain uses defect", q))
        for v in nodes:
            if v in owner:
                out.append(("overlap", (owner[v], q)))
            owner.setdefault(v, q)
        start = min(nodes)
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for nb in g.neighbors(v):
                if nb in nodes and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if seen != nodes:
            out.append(("disconnected chain", q))
        if limit is not None and len(nodes) > limit:
            out.append(("chain too long", q))
    for (a, b), edges in e.couplings.items():
        if a not in e.chains or b not in e.chains:
            out.append(("coupling without chain", (a, b)))
            continue
        good = [
            (x, y) for x, y in edges
            if g.has_edge(x, y)
            and ((x in e.chains[a] and y in e.chains[b]) or (x in e.chains[b] and y in e.chains[a]))
            and not ({x, y} & g.defects)
        ]
        if not good:
            out.append(("missing coupling", (a, b)))
        elif len(good) != len(edges):
            out.append(("bad coupling edge", (a, b)))
    for q, edges in e.chain_edges.items():
        if any(not g.has_edge(x, y) or x not in e.chains[q] or y not in e.chains[q] for x, y in edges):
            out.append(("bad chain edge", q))
    return ValidationReport(out)


# ---------------------------------------------------------------------------
# physical Hamiltonian


def chain_strength(h2, prefactor=CHAIN_PREFACTOR):
    """prefactor * RMS(nonzero fields and couplings) * sqrt(mean coupling degree)."""
    coefs = np.array([v for k, v in h2.terms.items() if k and v != 0.0])
    if coefs.size == 0:
        return prefactor
    rms = math.sqrt(float(np.mean(coefs**2)))
    pairs = [k for k, v in h2.terms.items() if len(k) == 2 and v != 0.0]
    active = {i for k in h2.terms for i in k if h2.terms[k] != 0.0}
    degree = 2.0 * len(pairs) / max(len(active), 1)
    return prefactor * rms * math.sqrt(max(degree, 1.0))


@dataclass(frozen=True)
class EmbeddedProblem:
    """Physical Hamiltonian over ``nodes`` (column j is node ``nodes[j]``)."""

    hamiltonian: IsingHamiltonian
    nodes: tuple
    chain_strength: float
    chain_columns: dict
    chain_pairs: tuple

    def chain_energy(self, x):
        """Chain-term contribution: sum over chain edges of c * (1 - s_i s_j)."""
        x = np.asarray(x, dtype=np.float64)
        if not self.chain_pairs:
            return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
        i, j = np.array(self.chain_pairs).T
        return self.chain_strength * (1.0 - x[..., i] * x[..., j]).sum(axis=-1)


def embed_problem(h2, e, strength=None, prefactor=CHAIN_PREFACTOR):
    """Map a 2-body Hamiltonian over chain keys onto physical spins."""
    if h2.order > 2:
        raise ValueError("embed_problem needs a 2-body Hamiltonian")
    for q in range(h2.n):
        if q not in e.chains:
            raise ValueError(f"qubit {q} has no chain")
    c = chain_strength(h2, prefactor) if strength is None else float(strength)
    nodes = tuple(sorted(set().union(*(e.chains[q] for q in range(h2.n)))))
    col = {v: i for i, v in enumerate(nodes)}
    terms = {}

    def add(key, v):
        key = tuple(sorted(key))
        terms[key] = terms.get(key, 0.0) + v

    for k, v in h2.terms.items():
        if len(k) == 0:
            add((), v)
        elif len(k) == 1:
            chain = sorted(e.chains[k[0]])
            for node in chain:
                add((col[node],), v / len(chain))
        else:
            edges = e.coupling(*k)
            if not edges:
                raise ValueError(f"no coupling edge for pair {k}")
            for x, y in sorted(edges):
                add((col[x], col[y]), v / len(edges))
    chain_pairs = []
    for q in range(h2.n):
        for x, y in sorted(e.chain_edges.get(q, ())):
            chain_pairs.append((col[x], col[y]))
            add((col[x], col[y]), -c)
            add((), c)
    chain_columns = {q: tuple(col[v] for v in sorted(e.chains[q])) for q in range(h2.n)}
    return EmbeddedProblem(IsingHamiltonian(len(nodes), terms), nodes, c, chain_columns, tuple(chain_pairs))


def spins_per_plaquette(e):
    return sum(len(ns) for ns in e.chains.values())
