import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphstar.errors import DanglingEndpointError, DuplicateIdentifierError, GraphFormatError, SizeBoundError
from graphstar.graph import (
    Graph,
    adjacency,
    bouquet,
    bouquet_union,
    classical_automorphisms,
    disjoint_union,
    from_adjacency,
    parse_graph,
    structural_report,
)
from graphstar.graph import oriented_cycle

O2_DOC = '{"vertices":["v"],"edges":[{"id":"e1","src":"v","dst":"v"},{"id":"e2","src":"v","dst":"v"}]}'
GON3_DOC = json.dumps({
    "vertices": ["v1", "v2", "v3"],
    "edges": [
        {"id": "e1", "src": "v1", "dst": "v2"},
        {"id": "e2", "src": "v2", "dst": "v3"},
        {"id": "e3", "src": "v3", "dst": "v1"},
    ],
})


def brute_force_automorphisms(g: Graph) -> set:
    """Every (vertex perm, edge perm) pair intertwining s and r."""
    out = set()
    for vp in itertools.permutations(range(g.n_vertices)):
        for ep in itertools.permutations(range(g.n_edges)):
            if all(vp[g.src[e]] == g.src[ep[e]] and vp[g.dst[e]] == g.dst[ep[e]] for e in range(g.n_edges)):
                out.add((vp, ep))
    return out


small_adjacency = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n), min_size=n, max_size=n)
).filter(lambda D: sum(map(sum, D)) <= 6)


# -- parsing -------------------------------------------------------------------


def test_parse_o2_document():
    g = parse_graph(O2_DOC)
    assert g.vertices == ("v",)
    assert [e.id for e in g.edges] == ["e1", "e2"]
    assert adjacency(g).tolist() == [[2]]


def test_parse_three_gon_bijective():
    g = parse_graph(GON3_DOC)
    assert g.n_vertices == 3 and g.n_edges == 3
    assert sorted(g.src.tolist()) == [0, 1, 2]
    assert sorted(g.dst.tolist()) == [0, 1, 2]


def test_dangling_endpoint():
    doc = '{"vertices":["v"],"edges":[{"id":"e","src":"x","dst":"v"}]}'
    with pytest.raises(DanglingEndpointError) as exc:
        parse_graph(doc)
    assert exc.value.code == "dangling_endpoint"
    assert exc.value.location == "x"


@pytest.mark.parametrize(
    "doc",
    [
        "not json",
        "[]",
        '{"vertices":["v"]}',
        '{"vertices":"v","edges":[]}',
        '{"vertices":["v"],"edges":[{"id":"e","src":"v"}]}',
        '{"vertices":[1],"edges":[]}',
        b"\xff\xfe",
    ],
)
def test_malformed_documents(doc):
    with pytest.raises(GraphFormatError):
        parse_graph(doc)


def test_duplicate_identifiers():
    with pytest.raises(DuplicateIdentifierError):
        parse_graph('{"vertices":["v","v"],"edges":[]}')
    with pytest.raises(DuplicateIdentifierError):
        parse_graph('{"vertices":["v"],"edges":[{"id":"e","src":"v","dst":"v"},{"id":"e","src":"v","dst":"v"}]}')


def test_canonical_order_and_round_trip():
    doc = '{"vertices":["b","a"],"edges":[{"id":"y","src":"b","dst":"a"},{"id":"x","src":"a","dst":"b"}]}'
    g = parse_graph(doc)
    assert g.vertices == ("a", "b")
    assert [e.id for e in g.edges] == ["x", "y"]
    text = g.dumps()
    assert parse_graph(text) == g
    assert parse_graph(text).dumps() == text


@given(small_adjacency)
def test_round_trip_property(D):
    g = from_adjacency(D)
    assert parse_graph(g.dumps()) == g
    assert parse_graph(g.dumps()).dumps() == g.dumps()


# -- adjacency -----------------------------------------------------------------


def test_adjacency_examples():
    assert adjacency(bouquet(4)).tolist() == [[4]]
    D = adjacency(parse_graph(GON3_DOC))
    assert D.tolist() == [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    two = disjoint_union([bouquet(2), bouquet(2)])
    assert adjacency(two).tolist() == [[2, 0], [0, 2]]


@given(small_adjacency)
def test_adjacency_degrees(D):
    g = from_adjacency(D)
    A = adjacency(g)
    assert A.tolist() == [list(r) for r in D]
    assert (A.sum(axis=1) == np.bincount(g.src, minlength=g.n_vertices)).all()
    assert (A.sum(axis=0) == np.bincount(g.dst, minlength=g.n_vertices)).all()


# -- structure -----------------------------------------------------------------


@pytest.mark.parametrize("m", [2, 3, 5])
def test_m_gon_structure(m):
    rep = structural_report(oriented_cycle(m))
    assert rep.r_injective and rep.s_injective and rep.no_sources and rep.no_sinks
    assert rep.shape.kind == "m_gon_union"
    assert rep.shape["m"] == m and rep.shape["count"] == 1


def test_bouquet_union_structure():
    rep = structural_report(bouquet_union(3, 2))
    assert rep.shape.kind == "bouquet_union"
    assert rep.shape["loops"] == 3 and rep.shape["copies"] == 2
    assert rep.out_regular == 3
    assert rep.has_loops and rep.has_multiple_edges


def test_path_graph_structure():
    g = Graph.build(["a", "b"], [("e", "a", "b")])
    rep = structural_report(g)
    assert not rep.no_sinks and not rep.no_sources
    assert rep.emitting_vertices == ("a",)


def test_mixed_union_is_generic():
    g = disjoint_union([oriented_cycle(2), oriented_cycle(3)])
    assert structural_report(g).shape.kind == "generic"


@settings(max_examples=40)
@given(small_adjacency, small_adjacency)
def test_structure_of_union_is_conjunction(D1, D2):
    g1, g2 = from_adjacency(D1), from_adjacency(D2)
    r1, r2, r = structural_report(g1), structural_report(g2), structural_report(disjoint_union([g1, g2]))
    for name in ("no_sources", "no_sinks", "r_injective", "s_injective"):
        assert getattr(r, name) == (getattr(r1, name) and getattr(r2, name))
    for name in ("has_loops", "has_multiple_edges"):
        assert getattr(r, name) == (getattr(r1, name) or getattr(r2, name))
    assert len(r.components) == len(r1.components) + len(r2.components)


# -- automorphisms -------------------------------------------------------------


def test_three_gon_rotations():
    auts = classical_automorphisms(oriented_cycle(3))
    assert len(auts) == 3
    assert sorted(a.vertex_perm for a in auts) == [(0, 1, 2), (1, 2, 0), (2, 0, 1)]


@pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 6), (4, 24)])
def test_bouquet_automorphisms(n, count):
    assert len(classical_automorphisms(bouquet(n))) == count


def test_asymmetric_graph_identity_only():
    auts = classical_automorphisms(from_adjacency([[0, 1], [0, 1]]))
    assert len(auts) == 1 and auts[0].is_identity()


@settings(max_examples=60, deadline=None)
@given(small_adjacency)
def test_automorphisms_match_brute_force(D):
    g = from_adjacency(D)
    found = {(a.vertex_perm, a.edge_perm) for a in classical_automorphisms(g)}
    assert found == brute_force_automorphisms(g)


@settings(max_examples=40, deadline=None)
@given(small_adjacency)
def test_automorphisms_commute_with_adjacency_and_compose(D):
    g = from_adjacency(D)
    A = adjacency(g)
    auts = classical_automorphisms(g)
    pairs = {(a.vertex_perm, a.edge_perm) for a in auts}
    for a in auts:
        P = a.vertex_matrix()
        assert (P @ A == A @ P).all()
    for a, b in itertools.product(auts[:6], auts[:6]):
        c = a.compose(b)
        assert (c.vertex_perm, c.edge_perm) in pairs


def test_automorphism_size_bound():
    with pytest.raises(SizeBoundError):
        classical_automorphisms(oriented_cycle(11))
    assert len(classical_automorphisms(oriented_cycle(10))) == 10


def test_graph_is_immutable():
    g = bouquet(2)
    with pytest.raises(Exception):
        g.vertices = ("w",)
    with pytest.raises(ValueError):
        g.src[0] = 5
