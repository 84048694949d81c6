"""Two-colour multi-car paint shop instances.

Spin +1 paints a car black.  Cars of the same model form a group G_j of which
exactly k_j must be black; the objective counts colour switches along the
sequence.
"""

from __future__ import annotations

import ast
import re
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .ising import IsingHamiltonian

C_CAP = 12


class PaintShopWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PaintShopInstance:
    C: int
    groups: tuple
    k: tuple
    lam: float = 1.0
    allow_zero: bool = False

    def __post_init__(self):
        groups = tuple(tuple(sorted(int(i) for i in g)) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        if sorted(i for g in groups for i in g) != list(range(self.C)):
            raise ValueError(f"groups must partition 0..{self.C - 1}")
        if len(self.k) != len(groups):
            raise ValueError("need one black count per group")
        lo = 0 if self.allow_zero else 1
        for g, kj in zip(groups, self.k):
            if not lo <= kj < len(g):
                raise ValueError(f"group {list(g)} with k={kj} is trivial")

    @property
    def label(self):
        ks = set(self.k)
        kpart = str(self.k[0]) if len(ks) == 1 else "-".join(map(str, self.k))
        return f"({self.C},{len(self.groups)},{kpart})"

    def to_text(self):
        groups = "[" + ",".join("[" + ",".join(map(str, g)) + "]" for g in self.groups) + "]"
        k = "[" + ",".join(map(str, self.k)) + "]"
        return f"C={self.C}; groups={groups}; k={k}; lambda={self.lam!r}"

    @classmethod
    def from_text(cls, text):
        fields = {}
        for part in text.strip().split(";"):
            if not part.strip():
                continue
            key, _, value = part.partition("=")
            fields[key.strip()] = value.strip()
        missing = {"C", "groups", "k"} - set(fields)
        if missing:
            raise ValueError(f"instance line lacks {sorted(missing)}")
        return cls(
            int(fields["C"]),
            tuple(ast.literal_eval(fields["groups"])),
            tuple(ast.literal_eval(fields["k"])),
            float(fields.get("lambda", 1.0)),
        )


def dominance_threshold(C):
    return 2.0 / (C - 1)


def make_instance(inst):
    """Ising Hamiltonian of a paint shop instance.

    H = -(1/(C-1)) sum s_i s_{i+1}
        + lam * sum_j [(|G_j| - 2 k_j) sum_{i in G_j} s_i + sum_{i<i' in G_j} s_i s_i']
    """
    C = inst.C
    if C < 2:
        raise ValueError("need at least two cars")
    if inst.lam < dominance_threshold(C):
        warnings.warn(
            f"lambda={inst.lam} is below the objective dominance threshold "
            f"{dominance_threshold(C):.3g}; infeasible colourings may tie or win",
            PaintShopWarning,
            stacklevel=2,
        )
    terms = [((i, i + 1), -1.0 / (C - 1)) for i in range(C - 1)]
    for g, kj in zip(inst.groups, inst.k):
        lin = inst.lam * (len(g) - 2 * kj)
        terms += [((i,), lin) for i in g if lin]
        terms += [((i, j), inst.lam) for i, j in combinations(g, 2)]
    return IsingHamiltonian(C, terms)


def count_switches(z):
    z = np.asarray(z)
    return int(np.count_nonzero(z[1:] != z[:-1]))


def check_feasibility(inst, z):
    z = np.asarray(z)
    if len(z) != inst.C:
        raise ValueError(f"expected {inst.C} spins")
    return all(int(np.count_nonzero(z[list(g)] == 1)) == kj for g, kj in zip(inst.groups, inst.k))


def set_partitions(n, min_block=2):
    """Set partitions of range(n) as restricted growth strings, blocks sorted by first element."""

    def grow(i, blocks):
        if i == n:
            if all(len(b) >= min_block for b in blocks):
                yield tuple(tuple(b) for b in blocks)
            return
        for b in blocks:
            b.append(i)
            yield from grow(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from grow(i + 1, blocks)
        blocks.pop()

    yield from grow(0, [])


def enumerate_instances(C_min=2, C_max=5, lam=1.0, allow_zero=False):
    """All non-trivial instances with C_min..C_max cars, one per grouping up to relabelling."""
    if not 2 <= C_min <= C_max <= C_CAP:
        raise ValueError(f"need 2 <= C_min <= C_max <= {C_CAP}")
    out = []
    lo = 0 if allow_zero else 1
    for C in range(C_min, C_max + 1):
        for groups in set_partitions(C, 1 if allow_zero else 2):
            ranges = [range(lo, len(g)) for g in groups]
            for k in np.ndindex(*[len(r) for r in ranges]):
                ks = tuple(r[i] for r, i in zip(ranges, k))
                out.append(PaintShopInstance(C, groups, ks, lam, allow_zero))
    return out


def labelled(instances):
    """(label, instance) pairs with a #index suffix separating grouping variants."""
    seen = {}
    for inst in instances:
        seen.setdefault(inst.label, []).append(inst)
    out = []
    for inst in instances:
        variants = seen[inst.label]
        tag = inst.label if len(variants) == 1 else f"{inst.label}#{variants.index(inst)}"
        out.append((tag, inst))
    return out


_LABEL = re.compile(r"^\((\d+),(\d+),([\d-]+)\)(?:#(\d+))?$")


def find_instance(label, lam=1.0):
    """Look up an enumerated instance by its label, e.g. '(3,1,1)' or '(4,2,1)#2'."""
    m = _LABEL.match(label.replace(" ", ""))
    if not m:
        raise ValueError(f"malformed instance label {label!r}")
    C = int(m.group(1))
    key = label.replace(" ", "")
    for tag, inst in labelled(enumerate_instances(C, C, lam)):
        if tag == key:
            return inst
    raise ValueError(f"no instance labelled {label!r}")
