import itertools
import math
import warnings

import numpy as np
import pytest

from oracle import ground, psp_terms, term_energy
from parity_anneal.ising import brute_force_ground_states
from parity_anneal.paintshop import (
    PaintShopInstance,
    PaintShopWarning,
    check_feasibility,
    count_switches,
    enumerate_instances,
    find_instance,
    labelled,
    make_instance,
)


def canonical_groupings(C):
    """Groupings found by brute-force labelling, canonicalised by first occurrence."""
    seen = set()
    for labels in itertools.product(range(C), repeat=C):
        groups = {}
        for i, g in enumerate(labels):
            groups.setdefault(g, []).append(i)
        blocks = tuple(sorted(tuple(b) for b in groups.values()))
        if all(len(b) >= 2 for b in blocks):
            seen.add(blocks)
    return seen


def oracle_count(C):
    return sum(math.prod(len(b) - 1 for b in blocks) for blocks in canonical_groupings(C))


def all_instances():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PaintShopWarning)
        return enumerate_instances(2, 5)


def spins(C):
    return [np.array(z) for z in itertools.product((1, -1), repeat=C)]


@pytest.mark.parametrize("C", range(2, 6))
def test_enumeration_counts(C):
    insts = enumerate_instances(C, C)
    assert len(insts) == oracle_count(C)
    keys = {(i.groups, i.k) for i in insts}
    assert len(keys) == len(insts)
    assert {tuple(sorted(i.groups)) for i in insts} == canonical_groupings(C)


def test_c2_single_instance():
    (inst,) = enumerate_instances(2, 2)
    assert inst.groups == ((0, 1),) and inst.k == (1,)


def test_three_421_patterns():
    variants = [i for i in enumerate_instances(4, 4) if i.label == "(4,2,1)"]
    patterns = {"".join("AB"[next(j for j, g in enumerate(v.groups) if p in g)] for p in range(4)) for v in variants}
    assert patterns == {"AABB", "ABAB", "ABBA"}
    assert [lab for lab, _ in labelled(variants)] == ["(4,2,1)#0", "(4,2,1)#1", "(4,2,1)#2"]


def test_singleton_group_excluded():
    with pytest.raises(ValueError, match="trivial"):
        PaintShopInstance(3, ((0, 1), (2,)), (1, 0))
    assert all(len(g) >= 2 for i in enumerate_instances(2, 5) for g in i.groups)


def test_allow_zero_flag():
    inst = PaintShopInstance(3, ((0, 1), (2,)), (1, 0), allow_zero=True)
    assert inst.k == (1, 0)


def test_bad_partition():
    with pytest.raises(ValueError, match="partition"):
        PaintShopInstance(3, ((0, 1),), (1,))


def test_hamiltonian_matches_definition():
    for inst in all_instances():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PaintShopWarning)
            h = make_instance(inst)
        ref = psp_terms(inst.C, inst.groups, inst.k, inst.lam)
        for z in spins(inst.C):
            assert term_energy(h.terms, z) == pytest.approx(term_energy(ref, z), abs=1e-12)


def test_311_ground_states():
    h = make_instance(find_instance("(3,1,1)"))
    lo, states = brute_force_ground_states(h)
    assert {tuple(s) for s in states} == {(1, -1, -1), (-1, -1, 1)}
    assert all(count_switches(s) == 1 for s in states)


def test_c2_tie_and_warning():
    inst = find_instance("(2,1,1)")
    with pytest.warns(PaintShopWarning):
        h = make_instance(inst)
    lo, states = brute_force_ground_states(h)
    feas = [check_feasibility(inst, s) for s in states]
    assert any(feas) and not all(feas)


@pytest.mark.parametrize("C", [3, 4, 5])
def test_no_warning_above_threshold(C):
    inst = enumerate_instances(C, C)[0]
    with warnings.catch_warnings():
        warnings.simplefilter("error", PaintShopWarning)
        make_instance(inst)


def test_count_switches_examples():
    assert count_switches([1, 1, 1]) == 0
    assert count_switches([1, -1, 1]) == 2


def test_feasibility_examples():
    inst = find_instance("(3,1,1)")
    assert check_feasibility(inst, [1, -1, -1])
    assert not check_feasibility(inst, [1, 1, -1])


def test_feasible_set_size():
    for inst in all_instances():
        n = sum(check_feasibility(inst, z) for z in spins(inst.C))
        assert n == math.prod(math.comb(len(g), k) for g, k in zip(inst.groups, inst.k))


def test_ground_states_feasible_and_switch_minimal():
    for inst in all_instances():
        if inst.C == 2:
            continue
        h = make_instance(inst)
        _, gs = ground(h.terms, inst.C)
        feasible = [z for z in spins(inst.C) if check_feasibility(inst, z)]
        best = min(count_switches(z) for z in feasible)
        assert all(check_feasibility(inst, z) for z in gs)
        assert all(count_switches(z) == best for z in gs)


def test_objective_consistency():
    for inst in all_instances():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PaintShopWarning)
            h = make_instance(inst)
        shifts = {
            round(term_energy(h.terms, z) - count_switches(z) * 2 / (inst.C - 1), 9)
            for z in spins(inst.C)
            if check_feasibility(inst, z)
        }
        assert len(shifts) == 1


def test_penalty_bracket_identity():
    # on feasible colourings each group bracket sits at its minimum value
    for size in range(2, 6):
        for k in range(1, size):
            vals = {}
            for z in itertools.product((1, -1), repeat=size):
                v = (size - 2 * k) * sum(z) + sum(a * b for a, b in itertools.combinations(z, 2))
                shifted = ((sum(z) + (size - 2 * k)) ** 2 - size - (size - 2 * k) ** 2) / 2
                assert v == shifted
                vals.setdefault(sum(1 for s in z if s == 1) == k, set()).add(v)
            assert len(vals[True]) == 1
            assert min(vals[True]) < min(vals[False])


def test_text_round_trip():
    inst = find_instance("(4,2,1)#1")
    assert PaintShopInstance.from_text(inst.to_text()) == inst
    with pytest.raises(ValueError):
        PaintShopInstance.from_text("C=3")


def test_find_instance_unknown():
    with pytest.raises(ValueError):
        find_instance("(9,9,9)")
