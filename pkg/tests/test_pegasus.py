import pytest

dnx = pytest.importorskip("dwave_networkx")

from parity_anneal.pegasus import (  # noqa: E402
    CELL_NAMES,
    PegasusGraph,
    coordinates,
    diamond_contract_violations,
    extract_diamonds,
    generate_pegasus,
    linear_index,
)


def edge_set(edges):
    return {tuple(sorted(e)) for e in edges}


@pytest.mark.parametrize("m", range(2, 7))
def test_matches_reference_generator(m):
    ref = dnx.pegasus_graph(m)
    g = generate_pegasus(m)
    assert set(g.nodes) == set(ref.nodes)
    assert edge_set(g.edges) == edge_set(ref.edges)


@pytest.mark.parametrize("m", range(2, 6))
def test_coordinates_round_trip(m):
    for q in generate_pegasus(m).nodes:
        assert linear_index(m, *coordinates(m, q)) == q


def test_smaller_graph_nests_by_coordinates():
    small, big = generate_pegasus(2), generate_pegasus(3)
    for a, b in small.edges:
        ca, cb = coordinates(2, a), coordinates(2, b)
        assert big.has_edge(linear_index(3, *ca), linear_index(3, *cb))


def test_rejects_m1():
    with pytest.raises(ValueError):
        generate_pegasus(1)


def test_defects():
    g = generate_pegasus(3)
    q = min(g.nodes)
    gd = generate_pegasus(3, [q])
    assert q not in gd.usable_nodes
    assert len(gd.usable_nodes) == len(g.nodes) - 1
    assert all(q not in e for e in gd.usable_edges())
    with pytest.raises(ValueError):
        generate_pegasus(3, [10**6])


@pytest.mark.parametrize("m", range(2, 7))
def test_diamond_rows(m):
    g = generate_pegasus(m)
    rows = extract_diamonds(g)
    assert [r[0].row for r in rows] == list(range(2 * (m - 2) + 1))
    seen = set()
    for row in rows:
        positions = [d.position for d in row]
        assert positions == sorted(set(positions))
        for d in row:
            assert diamond_contract_violations(g, d) == []
            assert len(set(d.external) | set(d.internal)) == 8
            assert all(coordinates(m, v)[0] == 0 for v in d.external)
            assert all(coordinates(m, v)[0] == 1 for v in d.internal)
            assert not (seen & set(d.external + d.internal))
            seen |= set(d.external + d.internal)


def test_diamond_names():
    d = extract_diamonds(generate_pegasus(3))[0][0]
    assert [d[n] for n in CELL_NAMES] == list(d.external + d.internal)


def test_defective_diamond_flagged():
    g = generate_pegasus(3)
    d = extract_diamonds(g)[1][0]
    gd = g.with_defects([d.internal[0]])
    flagged = [x for row in extract_diamonds(gd) for x in row if x.defective]
    assert [x.block for x in flagged] == [d.block]


def test_text_round_trip():
    g = generate_pegasus(3, [5])
    assert PegasusGraph.from_text(g.to_text()) == g
    assert PegasusGraph.from_text("pegasus 2\n").m == 2
    with pytest.raises(ValueError):
        PegasusGraph.from_text("0 1\n")
    with pytest.raises(ValueError):
        PegasusGraph.from_text("pegasus 2\n0 1\n")


def test_all_defective():
    g = generate_pegasus(3)
    gd = g.with_defects(g.nodes)
    assert not gd.usable_nodes
    assert all(d.defective for row in extract_diamonds(gd) for d in row)
