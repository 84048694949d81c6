"""Parity (LHZ) compilation of Ising Hamiltonians.

A parity qubit labelled by logical index set L stands for the product of the
logical spins in L.  Plaquettes are 3- or 4-member constraints whose labels
cancel over GF(2); a physical assignment is valid when every plaquette has
member product +1 in the unflipped frame.

Flipped qubits are stored in a negated frame (primed variables).  Every
Hamiltonian produced here, and every physical assignment passed to ``encode``
or ``decode``, lives in that primed frame.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import gf2
from .ising import BRUTE_FORCE_CAP, IsingHamiltonian, all_energies, as_spins, index_to_spins

PENALTY_FLOOR = 0.25


@dataclass(frozen=True)
class ParityQubit:
    label: tuple
    field_coefficient: float = 0.0
    flipped: bool = False
    grid_pos: tuple | None = None

    def __post_init__(self):
        label = tuple(int(i) for i in self.label)
        if not label or list(label) != sorted(set(label)):
            raise ValueError(f"label must be non-empty and strictly increasing: {self.label}")
        object.__setattr__(self, "label", label)


@dataclass(frozen=True)
class Plaquette:
    kind: str
    members: tuple
    aux: int
    form: str = "even"

    def __post_init__(self):
        if self.kind not in ("triangle", "square"):
            raise ValueError(f"unknown plaquette kind {self.kind!r}")
        if len(self.members) != (3 if self.kind == "triangle" else 4):
            raise ValueError(f"{self.kind} needs {3 if self.kind == 'triangle' else 4} members")
        if self.form not in ("even", "odd"):
            raise ValueError(f"unknown plaquette form {self.form!r}")
        object.__setattr__(self, "members", tuple(tuple(m) for m in self.members))


def plaquette_parity_check(p):
    """True iff every logical index occurs an even number of times among the member labels."""
    members = p.members if isinstance(p, Plaquette) else p
    return not reduce(lambda acc, lab: acc ^ set(lab), members, set())


@dataclass(frozen=True)
class ParityCompilation:
    logical_n: int
    parity_qubits: tuple
    plaquettes: tuple
    penalty: float = 1.0
    offset: float = 0.0
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        qubits = tuple(sorted(self.parity_qubits, key=lambda q: q.label))
        object.__setattr__(self, "parity_qubits", qubits)
        object.__setattr__(self, "plaquettes", tuple(self.plaquettes))
        index = {q.label: i for i, q in enumerate(qubits)}
        if len(index) != len(qubits):
            raise ValueError("duplicate parity qubit labels")
        object.__setattr__(self, "_index", index)
        K = len(qubits)
        for l, p in enumerate(self.plaquettes):
            if not plaquette_parity_check(p):
                raise ValueError(f"plaquette {p.members} violates the parity condition")
            if any(m not in index for m in p.members):
                raise ValueError(f"plaquette {p.members} references an unknown qubit")
            if p.aux != K + l:
                raise ValueError(f"plaquette {l} must use auxiliary index {K + l}")
            n_flipped = sum(qubits[index[m]].flipped for m in p.members)
            if (p.form == "odd") != (n_flipped % 2 == 1):
                raise ValueError(f"plaquette {p.members} form does not match its flips")
        if any(lab and lab[-1] >= self.logical_n for lab in index):
            raise ValueError("label index beyond logical_n")

    @property
    def K(self):
        return len(self.parity_qubits)

    def index(self, label):
        return self._index[tuple(label)]

    def member_indices(self, p):
        return [self._index[m] for m in p.members]

    @property
    def flip_mask(self):
        return np.array([q.flipped for q in self.parity_qubits], dtype=bool)

    def with_penalty(self, penalty):
        return dataclasses.replace(self, penalty=float(penalty))

    def with_flip_mask(self, mask):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.K,):
            raise ValueError(f"mask must have length {self.K}")
        qubits = [dataclasses.replace(q, flipped=bool(f)) for q, f in zip(self.parity_qubits, mask)]
        index = self._index
        plaqs = [
            dataclasses.replace(
                p, form="odd" if sum(mask[index[m]] for m in p.members) % 2 else "even"
            )
            for p in self.plaquettes
        ]
        return dataclasses.replace(self, parity_qubits=tuple(qubits), plaquettes=tuple(plaqs))

    # -- JSON --------------------------------------------------------------

    def to_dict(self):
        return {
            "logical_n": self.logical_n,
            "penalty": self.penalty,
            "offset": self.offset,
            "parity_qubits": [
                {
                    "label": list(q.label),
                    "field": q.field_coefficient,
                    "flipped": q.flipped,
                    "grid_pos": None if q.grid_pos is None else list(q.grid_pos),
                }
                for q in self.parity_qubits
            ],
            "plaquettes": [
                {"kind": p.kind, "members": [list(m) for m in p.members], "aux": p.aux, "form": p.form}
                for p in self.plaquettes
            ],
        }

    @classmethod
    def from_dict(cls, d):
        qubits = [
            ParityQubit(
                tuple(q["label"]),
                float(q["field"]),
                bool(q["flipped"]),
                None if q["grid_pos"] is None else tuple(q["grid_pos"]),
            )
            for q in d["parity_qubits"]
        ]
        plaqs = [
            Plaquette(p["kind"], tuple(tuple(m) for m in p["members"]), int(p["aux"]), p["form"])
            for p in d["plaquettes"]
        ]
        return cls(int(d["logical_n"]), tuple(qubits), tuple(plaqs), float(d["penalty"]), float(d.get("offset", 0.0)))

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# construction


def compile_lhz(h):
    """All-to-all LHZ triangle for a logical Hamiltonian with fields and couplings.

    Singletons are treated as pairs with a virtual index N, so the layout is the
    plain LHZ triangle on N+1 indices.  Qubit (a, b) sits at grid position
    (row N-b, column a): singletons form row 0 and the apex is (N-1, 0).
    """
    if h.order > 2:
        raise ValueError(
            "compile_lhz handles fields and pair couplings only; "
            "higher-order terms need a general parity compiler"
        )
    N = h.n
    if N < 2:
        raise ValueError("need at least two logical spins")

    def label(a, b):
        return (a,) if b == N else (a, b)

    qubits = [
        ParityQubit(label(a, b), h.coefficient(label(a, b)), False, (N - b, a))
        for a in range(N)
        for b in range(a + 1, N + 1)
    ]
    K = len(qubits)
    plaqs = []
    for b in range(1, N):
        for a in range(b):
            corners = [(a, b), (a + 1, b), (a, b + 1), (a + 1, b + 1)]
            members = [label(x, y) for x, y in corners if x != y]
            kind = "triangle" if len(members) == 3 else "square"
            plaqs.append((N - 1 - b, a, kind, members))
    plaqs.sort(key=lambda t: (t[0], t[1]))
    plaquettes = [Plaquette(kind, tuple(ms), K + l) for l, (_, _, kind, ms) in enumerate(plaqs)]
    return ParityCompilation(N, tuple(qubits), tuple(plaquettes), offset=h.offset)


def single_plaquette(kind="square", odd=True):
    """A compilation holding one isolated plaquette.

    The square is the loop (0,1),(1,2),(2,3),(0,3); the triangle is the N=2
    LHZ triangle.  With ``odd`` the first member is flipped.
    """
    if kind == "square":
        labels = [(0, 1), (1, 2), (2, 3), (0, 3)]
        n = 4
    elif kind == "triangle":
        labels = [(0,), (0, 1), (1,)]
        n = 2
    else:
        raise ValueError(f"unknown plaquette kind {kind!r}")
    qubits = [ParityQubit(lab, 0.0, odd and i == 0) for i, lab in enumerate(labels)]
    p = Plaquette(kind, tuple(labels), len(labels), "odd" if odd else "even")
    return ParityCompilation(n, tuple(qubits), (p,))


# ---------------------------------------------------------------------------
# flips and Hamiltonians


def solve_flip_mask(c):
    """Flip mask giving every square plaquette an odd number of flipped members."""
    squares = [p for p in c.plaquettes if p.kind == "square"]
    A = np.zeros((len(squares), c.K), dtype=np.uint8)
    for r, p in enumerate(squares):
        A[r, c.member_indices(p)] = 1
    x = gf2.solve(A, np.ones(len(squares), dtype=np.uint8))
    if x is None:
        raise ValueError("no flip mask makes every square plaquette odd")
    return x.astype(bool)


def _signs(c):
    return np.where(c.flip_mask, -1.0, 1.0)


def local_hamiltonian(c, n_spins=None):
    """Parity local fields in the primed frame, plus the logical offset."""
    sign = _signs(c)
    terms = {(j,): q.field_coefficient * sign[j] for j, q in enumerate(c.parity_qubits) if q.field_coefficient}
    if c.offset:
        terms[()] = c.offset
    return IsingHamiltonian(c.K if n_spins is None else n_spins, terms)


def _multibody_penalty(c, penalty):
    terms = {}
    for p in c.plaquettes:
        key = tuple(sorted(c.member_indices(p)))
        terms[key] = terms.get(key, 0.0) + (penalty if p.form == "odd" else -penalty)
    return IsingHamiltonian(c.K, terms)


def to_multibody(c):
    """H_l + Lambda * H_P with one 3- or 4-body term per plaquette."""
    if not c.penalty > 0:
        raise ValueError("penalty must be positive")
    return local_hamiltonian(c).with_terms(_multibody_penalty(c, c.penalty).terms)


def _plaquette_form(c, l, p):
    """(constant, aux weight, member weight) of the squared plaquette form."""
    if p.kind == "square":
        if p.form != "odd":
            raise ValueError(
                f"square plaquette {l} has even flip parity; it would need two auxiliary spins"
            )
        return 0.0, 2.0, 1.0
    if p.form == "odd":
        return 1.0, 2.0, 1.0
    return 1.0, -2.0, -1.0


def _quadratic_penalty(c, penalty):
    n = c.K + len(c.plaquettes)
    terms = {}

    def add(key, v):
        terms[key] = terms.get(key, 0.0) + v

    for l, p in enumerate(c.plaquettes):
        c0, wa, wm = _plaquette_form(c, l, p)
        spins = [(p.aux, wa)] + [(j, wm) for j in c.member_indices(p)]
        add((), penalty * (c0 * c0 + sum(w * w for _, w in spins)))
        for i, (si, wi) in enumerate(spins):
            if c0:
                add((si,), penalty * 2.0 * c0 * wi)
            for sj, wj in spins[i + 1:]:
                add(tuple(sorted((si, sj))), penalty * 2.0 * wi * wj)
    return IsingHamiltonian(n, terms)


def quadratize(c, mask=None):
    """2-body Hamiltonian over K parity qubits plus one auxiliary per plaquette.

    Odd squares use (2a + sum)^2, odd triangles (1 + 2a + sum)^2 and even
    triangles (1 - 2a - sum)^2, so each satisfied plaquette contributes 0.
    """
    if mask is not None:
        c = c.with_flip_mask(mask)
    if not c.penalty > 0:
        raise ValueError("penalty must be positive")
    n = c.K + len(c.plaquettes)
    return local_hamiltonian(c, n).with_terms(_quadratic_penalty(c, c.penalty).terms)


# ---------------------------------------------------------------------------
# encode / decode


def encode(c, z, aux=False):
    """Physical (primed) assignment for logical spins ``z``.

    With ``aux`` the auxiliary spins are appended, each set to the value that
    zeroes its plaquette form (needs a quadratizable flip mask).
    """
    z = as_spins(z, c.logical_n)
    x = np.array([np.prod(z[list(q.label)]) for q in c.parity_qubits], dtype=np.int8)
    x = (x * _signs(c)).astype(np.int8)
    if not aux:
        return x
    a = np.empty(len(c.plaquettes), dtype=np.int8)
    for l, p in enumerate(c.plaquettes):
        c0, wa, wm = _plaquette_form(c, l, p)
        base = c0 + wm * float(x[c.member_indices(p)].sum())
        a[l] = 1 if abs(base + wa) < abs(base - wa) else -1
    return np.concatenate([x, a])


def plaquettes_satisfied(c, x):
    """Per-plaquette validity of a primed physical assignment."""
    x = np.asarray(x)
    sigma = x[: c.K] * _signs(c)
    return np.array([np.prod(sigma[c.member_indices(p)]) > 0 for p in c.plaquettes], dtype=bool)


def decode(c, x, reference=None):
    """(logical assignment, valid) for a primed physical assignment.

    Logical spins are read from the singleton qubits.  Without singletons a
    ``reference`` list of labels must span the logical indices; the solution
    then fixes every free direction (such as a global flip) to +1.
    """
    x = np.asarray(x)
    if len(x) < c.K:
        raise ValueError(f"assignment covers {len(x)} of {c.K} parity qubits")
    sigma = (x[: c.K] * _signs(c)).astype(np.int8)
    valid = bool(plaquettes_satisfied(c, x).all())
    singles = [c._index.get((i,)) for i in range(c.logical_n)]
    if all(s is not None for s in singles):
        return sigma[singles].astype(np.int8), valid
    if reference is None:
        raise ValueError("compilation lacks the singleton row; pass a reference set of labels")
    A = np.zeros((len(reference), c.logical_n), dtype=np.uint8)
    b = np.zeros(len(reference), dtype=np.uint8)
    for r, lab in enumerate(reference):
        A[r, list(lab)] = 1
        b[r] = sigma[c.index(lab)] < 0
    bits = gf2.solve(A, b)
    if bits is None:
        return np.ones(c.logical_n, dtype=np.int8), False
    return (1 - 2 * bits.astype(np.int8)).astype(np.int8), valid


def global_flip_ambiguous(c, reference):
    """True when the reference labels leave some logical direction undetermined."""
    A = np.zeros((len(reference), c.logical_n), dtype=np.uint8)
    for r, lab in enumerate(reference):
        A[r, list(lab)] = 1
    return gf2.rank(A) < c.logical_n


def valid_states(c):
    """Boolean mask over all 2**K basis states of the valid parity configurations."""
    states = index_to_spins(np.arange(1 << c.K), c.K)
    return np.array([plaquettes_satisfied(c, s).all() for s in states], dtype=bool)


# ---------------------------------------------------------------------------
# penalty tuning


def _penalty_split(c, form, cap):
    n = c.K if form == "multibody" else c.K + len(c.plaquettes)
    if n > cap:
        raise ValueError(f"{n} spins exceed the enumeration cap of {cap}")
    local = all_energies(local_hamiltonian(c, n), cap)
    if form == "multibody":
        pen = all_energies(_multibody_penalty(c, 1.0), cap)
    elif form == "2body":
        pen = all_energies(_quadratic_penalty(c, 1.0), cap)
    else:
        raise ValueError(f"unknown form {form!r}")
    pen = pen - pen.min()
    return local, pen


def penalty_separates(local, pen, penalty, margin=1e-6):
    """Every invalid state lies strictly above the two lowest valid energies."""
    valid = pen <= 1e-9
    e = local + penalty * pen
    ev = np.sort(e[valid])
    if (~valid).sum() == 0:
        return True
    threshold = ev[min(1, len(ev) - 1)]
    return bool(e[~valid].min() > threshold + margin)


def tune_penalty(c, h_logical, form="multibody", cap=BRUTE_FORCE_CAP, floor=PENALTY_FLOOR, rtol=1e-6):
    """Smallest penalty (doubling, then bisection) that separates valid from invalid states."""
    if h_logical.n != c.logical_n:
        raise ValueError("logical Hamiltonian size does not match the compilation")
    for q in c.parity_qubits:
        expected = h_logical.coefficient(q.label)
        if abs(expected - q.field_coefficient) > 1e-12:
            raise ValueError(f"qubit {q.label} carries {q.field_coefficient}, logical term is {expected}")
    local, pen = _penalty_split(c, form, cap)
    hi = floor
    doublings = 0
    while not penalty_separates(local, pen, hi):
        hi *= 2.0
        doublings += 1
        if doublings > 60:
            raise RuntimeError("penalty scan did not converge")
    if doublings == 0:
        return hi
    lo = hi / 2.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if penalty_separates(local, pen, mid):
            hi = mid
        else:
            lo = mid
    return hi
