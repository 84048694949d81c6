import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import ground
from parity_anneal import gf2
from parity_anneal.ising import IsingHamiltonian, all_energies, brute_force_ground_states, energy
from parity_anneal.parity import (
    ParityCompilation,
    ParityQubit,
    Plaquette,
    _penalty_split,
    compile_lhz,
    decode,
    encode,
    global_flip_ambiguous,
    penalty_separates,
    plaquette_parity_check,
    plaquettes_satisfied,
    quadratize,
    single_plaquette,
    solve_flip_mask,
    to_multibody,
    tune_penalty,
    valid_states,
)


def all_to_all(N, seed=0):
    rng = np.random.default_rng(seed)
    terms = {(i,): round(rng.normal(), 3) for i in range(N)}
    terms.update({k: round(rng.normal(), 3) for k in itertools.combinations(range(N), 2)})
    return IsingHamiltonian(N, terms)


def assignments(N):
    return [np.array(z) for z in itertools.product((1, -1), repeat=N)]


@pytest.mark.parametrize("N", range(2, 9))
def test_lhz_counts(N):
    c = compile_lhz(all_to_all(N))
    K = N * (N + 1) // 2
    assert c.K == K
    assert len(c.plaquettes) == K - N
    covered = {m for p in c.plaquettes for m in p.members}
    assert covered == {q.label for q in c.parity_qubits}
    assert all(plaquette_parity_check(p) for p in c.plaquettes)
    assert [p.aux for p in c.plaquettes] == list(range(K, 2 * K - N))


def test_lhz_layout_n3():
    c = compile_lhz(all_to_all(3))
    pos = {q.label: q.grid_pos for q in c.parity_qubits}
    assert pos[(0,)] == (0, 0) and pos[(2,)] == (0, 2)
    assert pos[(0, 1)] == (2, 0)
    kinds = sorted(p.kind for p in c.plaquettes)
    assert kinds == ["square", "triangle", "triangle"]


def test_fields_land_on_parity_qubits():
    h = IsingHamiltonian(3, {(0,): 1.0, (0, 1): -1.0})
    c = compile_lhz(h)
    coef = {q.label: q.field_coefficient for q in c.parity_qubits}
    assert coef[(0,)] == 1.0 and coef[(0, 1)] == -1.0
    assert coef[(1, 2)] == 0.0 and coef[(2,)] == 0.0


def test_compile_rejects_higher_order():
    with pytest.raises(ValueError, match="higher-order"):
        compile_lhz(IsingHamiltonian(3, {(0, 1, 2): 1.0}))


@pytest.mark.parametrize(
    "members, ok",
    [
        ([(0, 1), (1, 2), (2, 3), (0, 3)], True),
        ([(0,), (1,), (0, 1)], True),
        ([(0, 1), (1, 2), (0, 3)], False),
    ],
)
def test_parity_check_examples(members, ok):
    assert plaquette_parity_check(members) is ok


def test_bad_plaquette_rejected():
    qs = [ParityQubit(lab, 0.0, False) for lab in [(0, 1), (1, 2), (0, 2), (0,)]]
    with pytest.raises(ValueError, match="parity"):
        ParityCompilation(3, tuple(qs), (Plaquette("triangle", ((0, 1), (1, 2), (0,)), 4),))


@pytest.mark.parametrize("N", range(2, 6))
@pytest.mark.parametrize("flipped", [False, True])
def test_round_trip(N, flipped):
    c = compile_lhz(all_to_all(N, N))
    if flipped:
        c = c.with_flip_mask(solve_flip_mask(c))
    for z in assignments(N):
        x = encode(c, z, aux=flipped)
        assert plaquettes_satisfied(c, x).all()
        back, valid = decode(c, x)
        assert valid
        assert np.array_equal(back, z)


@pytest.mark.parametrize("N", range(2, 6))
def test_valid_set_size(N):
    c = compile_lhz(all_to_all(N))
    assert valid_states(c).sum() == 2**N


def test_decode_flags_invalid():
    c = compile_lhz(all_to_all(3))
    x = encode(c, [1, 1, 1])
    x[c.index((0, 1))] *= -1
    assert decode(c, x)[1] is False


def test_decode_needs_reference_without_singletons():
    c = single_plaquette("square", odd=False)
    x = encode(c, [1, -1, 1, 1])
    with pytest.raises(ValueError):
        decode(c, x)
    ref = [(0, 1), (1, 2), (2, 3)]
    assert global_flip_ambiguous(c, ref)
    z, valid = decode(c, x, reference=ref)
    assert valid
    # fixed up to the global flip, which the reference resolves to spin 0 = +1
    assert list(z) in ([1, -1, 1, 1], [-1, 1, -1, -1])


@pytest.mark.parametrize("N", range(2, 7))
def test_flip_mask_makes_squares_odd(N):
    c = compile_lhz(all_to_all(N))
    c2 = c.with_flip_mask(solve_flip_mask(c))
    for p in c2.plaquettes:
        if p.kind == "square":
            assert p.form == "odd"
    # independent check of the linear system
    A = np.array([[m in p.members for m in [q.label for q in c.parity_qubits]] for p in c.plaquettes if p.kind == "square"], dtype=np.uint8)
    if len(A):
        assert np.all(A.astype(int) @ c2.flip_mask.astype(int) % 2 == 1)


def test_flip_equivalence_multibody():
    h = all_to_all(3, 5)
    c = compile_lhz(h).with_penalty(10.0)
    c2 = c.with_flip_mask(solve_flip_mask(c))
    e1 = all_energies(to_multibody(c))
    e2 = all_energies(to_multibody(c2))
    # flipped frame relabels states; the spectrum is unchanged
    np.testing.assert_allclose(np.sort(e1), np.sort(e2), atol=1e-9)


@pytest.mark.parametrize("kind", ["square", "triangle"])
def test_quadratization_matches_constraint(kind):
    c = single_plaquette(kind, odd=True)
    h = quadratize(c)
    e = all_energies(h).reshape(2, -1)  # aux is the most significant spin
    per_state = e.min(axis=0)
    for s, v in enumerate(per_state):
        x = np.array([1 - 2 * ((s >> i) & 1) for i in range(c.K)])
        if plaquettes_satisfied(c, x).all():
            assert v == pytest.approx(0.0, abs=1e-12)
        else:
            assert v >= 4.0 - 1e-12


def test_even_triangle_form():
    c = single_plaquette("triangle", odd=False)
    lo, states = brute_force_ground_states(quadratize(c))
    assert lo == 0.0
    assert all(np.prod(s[: c.K]) == 1 for s in states)


def test_even_square_not_quadratized():
    with pytest.raises(ValueError, match="auxiliary"):
        quadratize(single_plaquette("square", odd=False))


def test_encode_aux_zeroes_penalty():
    c = compile_lhz(all_to_all(4))
    c = c.with_flip_mask(solve_flip_mask(c))
    h = quadratize(c)
    hp = quadratize(c.with_penalty(2.0))
    for z in assignments(4):
        x = encode(c, z, aux=True)
        assert energy(hp, x) - energy(h, x) == pytest.approx(0.0, abs=1e-9)


def _decoded_ground(c, h_phys):
    _, states = brute_force_ground_states(h_phys)
    out = set()
    for s in states:
        z, valid = decode(c, s)
        assert valid
        out.add(tuple(int(v) for v in z))
    return out


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10_000))
def test_tuned_encodings_preserve_ground_states(N, seed):
    h = all_to_all(N, seed)
    _, ref = ground(h.terms, N)
    c = compile_lhz(h)
    lam = tune_penalty(c, h, "multibody")
    assert _decoded_ground(c, to_multibody(c.with_penalty(lam))) == ref
    c2 = c.with_flip_mask(solve_flip_mask(c))
    lam2 = tune_penalty(c2, h, "2body")
    assert _decoded_ground(c2, quadratize(c2.with_penalty(lam2))) == ref


@pytest.mark.parametrize("form", ["multibody", "2body"])
def test_tune_penalty_threshold(form):
    h = all_to_all(3, 2)
    c = compile_lhz(h)
    if form == "2body":
        c = c.with_flip_mask(solve_flip_mask(c))
    lam = tune_penalty(c, h, form)
    local, pen = _penalty_split(c, form, 24)
    assert penalty_separates(local, pen, lam)
    for factor in (1.5, 2.0, 10.0):
        assert penalty_separates(local, pen, lam * factor)
    if lam > 0.25:
        assert not penalty_separates(local, pen, lam * (1 - 1e-3))


def test_tune_penalty_rejects_mismatch():
    c = compile_lhz(all_to_all(3, 0))
    with pytest.raises(ValueError):
        tune_penalty(c, all_to_all(3, 1))


def test_json_round_trip():
    c = compile_lhz(all_to_all(4)).with_penalty(3.5)
    c = c.with_flip_mask(solve_flip_mask(c))
    back = ParityCompilation.from_json(c.to_json())
    assert back == c
    assert np.array_equal(back.flip_mask, c.flip_mask)


def test_gf2_solve_and_rank():
    A = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    x = gf2.solve(A, np.array([1, 0], dtype=np.uint8))
    assert np.array_equal(A.astype(int) @ x % 2, [1, 0])
    assert gf2.rank(A) == 2
    assert gf2.solve(np.array([[1, 1], [1, 1]], dtype=np.uint8), np.array([1, 0], dtype=np.uint8)) is None


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_gf2_solutions_check_out(r, n, data):
    A = np.array(data.draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=r, max_size=r)), dtype=np.uint8)
    x0 = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)), dtype=np.uint8)
    b = (A.astype(int) @ x0 % 2).astype(np.uint8)
    x = gf2.solve(A, b)
    assert x is not None
    assert np.array_equal(A.astype(int) @ x % 2, b)
