"""Pegasus P_m hardware graphs and their decomposition into diamonds.

Qubits are intervals on a 12m x 12m grid.  A vertical qubit (u=0, w, k, z)
sits at x = 12w + k and covers rows 12z + S0[k] .. +11; a horizontal qubit
(u=1, w, k, z) sits at y = 12w + k and covers columns 12z + S1[k] .. +11.
Two qubits of opposite orientation couple when their intervals cross, same
orientation qubits couple along the line (z, z+1) and in odd pairs (2j, 2j+1).

Node ids follow ((u*m + w)*12 + k)*(m-1) + z.  Only the largest connected
component (the fabric) is kept.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

VERTICAL_OFFSETS = (2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6)
HORIZONTAL_OFFSETS = (6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10)

# names of the eight qubits of a diamond, in k order within each side
CELL_NAMES = ("v0", "v0p", "v1", "v1p", "h0", "h0p", "h1", "h1p")
ROW_SUM_OFFSET = 5


def linear_index(m, u, w, k, z):
    return ((u * m + w) * 12 + k) * (m - 1) + z


def coordinates(m, q):
    q, z = divmod(q, m - 1)
    q, k = divmod(q, 12)
    u, w = divmod(q, m)
    return u, w, k, z


@dataclass(frozen=True)
class PegasusGraph:
    m: int
    nodes: frozenset
    edges: frozenset
    defects: frozenset = frozenset()
    _adj: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.defects <= self.nodes:
            raise ValueError("defects must be graph nodes")
        adj = {v: set() for v in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "_adj", {v: frozenset(s) for v, s in adj.items()})

    def neighbors(self, v):
        return self._adj[v]

    def has_edge(self, a, b):
        return b in self._adj.get(a, ())

    @property
    def usable_nodes(self):
        return self.nodes - self.defects

    def usable_edges(self):
        return {e for e in self.edges if not (set(e) & self.defects)}

    def with_defects(self, defects):
        return PegasusGraph(self.m, self.nodes, self.edges, frozenset(defects))

    def coordinates(self, q):
        return coordinates(self.m, q)

    def linear(self, u, w, k, z):
        return linear_index(self.m, u, w, k, z)

    # -- file format: header 'pegasus m', 'u v' edges, 'defect u' lines ----

    def to_text(self):
        lines = [f"pegasus {self.m}"]
        lines += [f"{a} {b}" for a, b in sorted(self.edges)]
        lines += [f"defect {d}" for d in sorted(self.defects)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        m = None
        edges = set()
        defects = set()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].split()
            if not line:
                continue
            if line[0] == "pegasus":
                m = int(line[1])
            elif line[0] == "defect":
                defects.add(int(line[1]))
            elif len(line) == 2:
                a, b = sorted((int(line[0]), int(line[1])))
                edges.add((a, b))
            else:
                raise ValueError(f"line {lineno}: cannot parse {raw!r}")
        if m is None:
            raise ValueError("missing 'pegasus m' header")
        g = generate_pegasus(m, defects)
        if edges and edges != set(g.edges):
            raise ValueError("edge list does not match Pegasus P_%d" % m)
        return g


def _crossings(m):
    """All vertical/horizontal pairs whose intervals cross, as coordinate tuples."""
    out = []
    for w in range(m):
        for k in range(12):
            x = 12 * w + k
            for z in range(m - 1):
                y0 = 12 * z + VERTICAL_OFFSETS[k]
                for y in range(y0, y0 + 12):
                    wh, kh = divmod(y, 12)
                    if wh >= m:
                        continue
                    zh, rem = divmod(x - HORIZONTAL_OFFSETS[kh], 12)
                    if 0 <= zh < m - 1:
                        out.append(((0, w, k, z), (1, wh, kh, zh)))
    return out


def _largest_component(nodes, adj):
    seen = set()
    best = set()
    for s in sorted(nodes):
        if s in seen:
            continue
        comp = {s}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for nb in adj[v]:
                if nb not in comp:
                    comp.add(nb)
                    queue.append(nb)
        seen |= comp
        if len(comp) > len(best):
            best = comp
    return best


def generate_pegasus(m, defects=()):
    """Pegasus P_m restricted to its fabric, with optional defective nodes."""
    if m < 2:
        raise ValueError("Pegasus size m must be at least 2")
    lin = lambda c: linear_index(m, *c)  # noqa: E731
    edges = set()
    for u in (0, 1):
        for w in range(m):
            for k in range(12):
                for z in range(m - 1):
                    if z + 1 < m - 1:
                        edges.add((lin((u, w, k, z)), lin((u, w, k, z + 1))))
                    if k % 2 == 0:
                        edges.add((lin((u, w, k, z)), lin((u, w, k + 1, z))))
    for a, b in _crossings(m):
        edges.add(tuple(sorted((lin(a), lin(b)))))
    nodes = set(range(24 * m * (m - 1)))
    adj = {v: [] for v in nodes}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    fabric = _largest_component(nodes, adj)
    edges = frozenset(e for e in edges if e[0] in fabric)
    defects = frozenset(int(d) for d in defects)
    if not defects <= fabric:
        raise ValueError("defects outside the fabric")
    return PegasusGraph(m, frozenset(fabric), edges, defects)


@dataclass(frozen=True)
class Diamond:
    """A complete bipartite K4,4 cell: four vertical and four horizontal qubits.

    ``external`` holds the vertical side and ``internal`` the horizontal side, so
    every internal qubit is adjacent to every external one.  ``block`` is the
    cell position in 4x4 blocks of the qubit grid and ``(row, position)`` its
    lattice coordinates: moving by (+1, -1) in blocks advances ``position``,
    moving by (+1, +2) advances ``row``.
    """

    row: int
    position: int
    block: tuple
    external: tuple
    internal: tuple
    defective: bool = False

    @property
    def qubits(self):
        return dict(zip(CELL_NAMES, self.external + self.internal))

    def __getitem__(self, name):
        return self.qubits[name]


def _find_cells(g):
    m = g.m
    cells = {}
    for w in range(m):
        for b in range(3):
            for z in range(m - 1):
                V = [linear_index(m, 0, w, 4 * b + i, z) for i in range(4)]
                if any(v not in g.nodes for v in V):
                    continue
                y0 = 12 * z + VERTICAL_OFFSETS[4 * b]
                x0 = 12 * w + 4 * b
                for yb in range(-(-y0 // 4), (y0 + 12) // 4):
                    if 4 * yb + 3 > y0 + 11:
                        continue
                    wy, by = divmod(yb, 3)
                    if wy >= m:
                        continue
                    zh, rem = divmod(x0 - HORIZONTAL_OFFSETS[4 * by], 12)
                    if not (0 <= zh < m - 1 and rem + 3 <= 11):
                        continue
                    H = [linear_index(m, 1, wy, 4 * by + i, zh) for i in range(4)]
                    if all(h in g.nodes for h in H) and all(g.has_edge(v, h) for v in V for h in H):
                        cells[(3 * w + b, yb)] = (tuple(V), tuple(H))
    return cells


def extract_diamonds(g):
    """Diamonds grouped by row; rows run 0 .. 2(m-2)."""
    rows = {}
    for (X, Y), (V, H) in _find_cells(g).items():
        r, rem = divmod(X + Y - ROW_SUM_OFFSET, 3)
        if rem or r < 0:
            raise AssertionError(f"cell {(X, Y)} off the diamond lattice")
        bad = bool((set(V) | set(H)) & g.defects)
        rows.setdefault(r, []).append(Diamond(r, X - r, (X, Y), V, H, bad))
    return [sorted(rows[r], key=lambda d: d.position) for r in sorted(rows)]


def diamond_contract_violations(g, d):
    """Pairs of the diamond that should be coupled but are not."""
    return [(i, e) for i in d.internal for e in d.external if not g.has_edge(i, e)]
